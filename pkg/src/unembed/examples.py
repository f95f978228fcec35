"""Bundled example models and their expected-value tables.

Three families of unembedding sets, named for the constraint they satisfy:

  * ``unrestricted``: five arbitrary 2D unembeddings.
  * ``centered``: five 2D unembeddings that sum to the zero vector.
  * ``centered_unit``: six 2D unembeddings that are centered and unit norm.

``centered_unit_printed`` is a deliberately broken variant of the last one
kept for regression value: its rows 3 and 4 duplicate rows 1 and 0 (second
coordinates flipped to positive), so the set is NOT centered and its
similarity structure collapses.  ``centered_unit`` negates the second
coordinate of labels l3 and l4, which restores centering, unit norms, and
the expected cosine structure.  Golden values are asserted against the
corrected variant.

Every expected value records a ``source`` string explaining how the number
is obtained, so each golden test is auditable on its own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .geometry import (
    coargmax_feasible,
    cosine,
    decision_regions,
    inflated_bounds,
    nearest_neighbors,
    region_adjacency,
    tie_partners,
)
from .model import EmbeddingBatch, SoftmaxModel, UnembeddingSet
from .transforms import (
    cosine_forcing_translation,
    equivalent_model_pair,
    verify_equivalence,
)

__all__ = [
    "ExpectedValue",
    "CheckResult",
    "NamedExample",
    "example",
    "example_names",
    "evaluate_expected",
    "evaluate_example",
    "synthetic_embeddings",
]


@dataclass(frozen=True)
class ExpectedValue:
    """One verifiable claim about an example model."""

    check: str
    params: dict
    expected: Any
    tol: float
    source: str

    def describe(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.check}({inner})"


@dataclass(frozen=True)
class CheckResult:
    expected: ExpectedValue
    computed: Any
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status} {self.expected.describe()}: computed {self.computed!r}, "
            f"expected {self.expected.expected!r} "
            f"(tol {self.expected.tol:g}; {self.expected.source})"
        )


@dataclass(frozen=True)
class NamedExample:
    name: str
    description: str
    model: SoftmaxModel
    expected: tuple[ExpectedValue, ...]

    @property
    def unembeddings(self) -> UnembeddingSet:
        return self.model.unembeddings


def synthetic_embeddings(
    unembeddings: UnembeddingSet, n: int, seed: int = 0
) -> EmbeddingBatch:
    """Deterministic pseudo-random points spanning the inflated bounding box
    of the unembeddings.  Same seed, same points, on every platform."""
    if n < 1:
        raise ValueError(f"need at least one point, got {n}")
    bounds = inflated_bounds(unembeddings)
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    rng = np.random.default_rng(seed)
    return EmbeddingBatch(rng.uniform(lo, hi, size=(n, unembeddings.d)))


# --- check evaluation ------------------------------------------------------

def _close(a: float, b: float, tol: float) -> bool:
    return a == b if tol == 0.0 else abs(a - b) <= tol


def evaluate_expected(ex: NamedExample, ev: ExpectedValue) -> CheckResult:
    """Compute the quantity an ExpectedValue describes and compare."""
    u = ex.model.unembeddings
    kind, p = ev.check, ev.params
    if kind == "cosine_pair":
        computed = cosine(u.vector(p["i"]), u.vector(p["j"]))
        return CheckResult(ev, computed, _close(computed, ev.expected, ev.tol))
    if kind == "forced_cosine":
        a, b = u.vector(p["i"]), u.vector(p["j"])
        v = cosine_forcing_translation(a, b, p["target"])
        computed = cosine(a + v, b + v)
        return CheckResult(ev, computed, _close(computed, ev.expected, ev.tol))
    if kind == "equivalence_after_forcing":
        minus, plus = equivalent_model_pair(ex.model, p["i"], p["j"])
        points = synthetic_embeddings(u, p.get("n", 200), p.get("seed", 0))
        computed = max(
            verify_equivalence(ex.model, minus, points, ev.tol).max_prob_diff,
            verify_equivalence(ex.model, plus, points, ev.tol).max_prob_diff,
        )
        return CheckResult(ev, computed, computed < ev.tol)
    if kind == "tie_partners":
        computed = tie_partners(u, p["i"])
        return CheckResult(ev, computed, computed == set(ev.expected))
    if kind == "pair_feasible":
        computed = coargmax_feasible(u, p["i"], p["j"]).feasible
        return CheckResult(ev, computed, computed == ev.expected)
    if kind == "nearest_neighbors":
        computed = nearest_neighbors(u, p["i"], p["metric"], p["m"])
        return CheckResult(ev, computed, computed == list(ev.expected))
    if kind == "centered":
        computed = float(np.abs(u.vectors.sum(axis=0)).max())
        return CheckResult(ev, computed, computed <= ev.tol)
    if kind == "unit_norms":
        computed = float(np.abs(np.linalg.norm(u.vectors, axis=1) - 1.0).max())
        return CheckResult(ev, computed, computed <= ev.tol)
    if kind == "centering_defect":
        computed = float(np.abs(u.vectors.sum(axis=0)).max())
        return CheckResult(ev, computed, computed > ev.tol)
    if kind == "grid_adjacency":
        grid = decision_regions(ex.model, resolution=p.get("resolution", 200))
        pairs = region_adjacency(grid)
        computed = {
            a if b == p["i"] else b for a, b in pairs if p["i"] in (a, b)
        }
        return CheckResult(ev, computed, computed == set(ev.expected))
    if kind == "grids_match_after_forcing":
        bounds = inflated_bounds(u)
        base = decision_regions(ex.model, bounds)
        minus, plus = equivalent_model_pair(ex.model, p["i"], p["j"])
        computed = bool(
            np.array_equal(base.labels, decision_regions(minus, bounds).labels)
            and np.array_equal(base.labels, decision_regions(plus, bounds).labels)
        )
        return CheckResult(ev, computed, computed == ev.expected)
    raise ValueError(f"unknown check kind {kind!r}")


def evaluate_example(ex: NamedExample) -> list[CheckResult]:
    return [evaluate_expected(ex, ev) for ev in ex.expected]


# --- the fixtures ----------------------------------------------------------

def _labels(k: int) -> tuple[str, ...]:
    return tuple(f"l{i}" for i in range(k))


_UNRESTRICTED = UnembeddingSet(
    _labels(5),
    [[1.0, 0.5], [0.5, 1.0], [-1.0, 0.4], [-0.8, -0.8], [0.9, -1.2]],
)

_CENTERED = UnembeddingSet(
    _labels(5),
    [[1.4, -1.0], [1.4, 1.0], [-0.9, 0.3], [-1.0, 0.0], [-0.9, -0.3]],
)

_S = math.sqrt(1.0 - 0.95**2)

_CENTERED_UNIT = UnembeddingSet(
    _labels(6),
    [[0.95, _S], [-0.95, _S], [-1.0, 0.0], [-0.95, -_S], [0.95, -_S], [1.0, 0.0]],
)

_CENTERED_UNIT_PRINTED = UnembeddingSet(
    _labels(6),
    [[0.95, _S], [-0.95, _S], [-1.0, 0.0], [-0.95, _S], [0.95, _S], [1.0, 0.0]],
)

_EXAMPLES = {
    "unrestricted": NamedExample(
        name="unrestricted",
        description="five arbitrary 2D unembeddings",
        model=SoftmaxModel(_UNRESTRICTED),
        expected=(
            ExpectedValue(
                "cosine_pair", {"i": 0, "j": 1}, 0.8, 0.0,
                "exact arithmetic: dot 1.0, norms^2 1.25 each, 1/1.25",
            ),
            ExpectedValue(
                "forced_cosine", {"i": 0, "j": 1, "target": -1}, -1.0, 1e-12,
                "antipodal construction v = -(a + (b-a)/2)",
            ),
            ExpectedValue(
                "forced_cosine", {"i": 0, "j": 1, "target": 1}, 1.0, 1e-12,
                "collinear construction v = -a + (b-a)/2",
            ),
            ExpectedValue(
                "equivalence_after_forcing", {"i": 0, "j": 1}, 0.0, 1e-12,
                "translation adds the same shift to every score",
            ),
            ExpectedValue(
                "tie_partners", {"i": 0}, {1, 4}, 0.0,
                "exact 2D ray check per pair",
            ),
            ExpectedValue(
                "grids_match_after_forcing", {"i": 0, "j": 1}, True, 0.0,
                "argmax is unchanged by common score shifts",
            ),
        ),
    ),
    "centered": NamedExample(
        name="centered",
        description="five 2D unembeddings summing to zero",
        model=SoftmaxModel(_CENTERED),
        expected=(
            ExpectedValue(
                "centered", {}, 0.0, 1e-12, "column sums of the fixture"
            ),
            ExpectedValue(
                "cosine_pair", {"i": 0, "j": 1}, 0.96 / 2.96, 1e-12,
                "closed form 0.96/2.96",
            ),
            ExpectedValue(
                "cosine_pair", {"i": 1, "j": 2},
                -0.96 / (math.sqrt(2.96) * math.sqrt(0.9)), 1e-12,
                "closed form -0.96/(sqrt(2.96)*sqrt(0.9))",
            ),
            ExpectedValue(
                "cosine_pair", {"i": 2, "j": 4}, 0.8, 1e-12,
                "closed form 0.72/0.9",
            ),
            ExpectedValue(
                "cosine_pair", {"i": 2, "j": 3}, math.sqrt(0.9), 1e-12,
                "closed form 0.9/sqrt(0.9)",
            ),
            ExpectedValue(
                "tie_partners", {"i": 2}, {1, 3}, 0.0,
                "exact 2D ray check per pair",
            ),
            ExpectedValue(
                "pair_feasible", {"i": 2, "j": 4}, False, 0.0,
                "both rays orthogonal to g2-g4 are blocked by other labels",
            ),
            ExpectedValue(
                "pair_feasible", {"i": 0, "j": 1}, True, 0.0,
                "direction (1, 0) separates the pair from the rest",
            ),
            ExpectedValue(
                "pair_feasible", {"i": 1, "j": 2}, True, 0.0,
                "direction (-0.7, 2.3) separates the pair from the rest",
            ),
            ExpectedValue(
                "nearest_neighbors", {"i": 2, "metric": "cosine", "m": 2},
                [3, 4], 0.0,
                "cos(l2,l3)=sqrt(0.9) and cos(l2,l4)=0.8 top the row",
            ),
            ExpectedValue(
                "grid_adjacency", {"i": 2}, {1, 3}, 0.0,
                "region scan matches tie_partners away from the apex",
            ),
        ),
    ),
    "centered_unit": NamedExample(
        name="centered_unit",
        description=(
            "six centered unit-norm 2D unembeddings (sign-corrected variant; "
            "see centered_unit_printed for the broken one)"
        ),
        model=SoftmaxModel(_CENTERED_UNIT),
        expected=(
            ExpectedValue(
                "centered", {}, 0.0, 1e-12, "column sums of the fixture"
            ),
            ExpectedValue(
                "unit_norms", {}, 0.0, 1e-12,
                "rows built as (+-0.95, +-sqrt(1-0.95^2)) or (+-1, 0)",
            ),
            ExpectedValue(
                "cosine_pair", {"i": 0, "j": 1}, -(2 * 0.95**2 - 1), 1e-12,
                "closed form -(2*0.95^2-1)",
            ),
            ExpectedValue(
                "cosine_pair", {"i": 1, "j": 3}, 2 * 0.95**2 - 1, 1e-12,
                "closed form 2*0.95^2-1",
            ),
            ExpectedValue(
                "pair_feasible", {"i": 0, "j": 1}, True, 0.0,
                "direction (0, 1) separates the pair from the rest",
            ),
            ExpectedValue(
                "pair_feasible", {"i": 1, "j": 3}, False, 0.0,
                "both rays orthogonal to g1-g3 are blocked by other labels",
            ),
            ExpectedValue(
                "nearest_neighbors", {"i": 1, "metric": "cosine", "m": 1},
                [2], 0.0,
                "cos(l1,l2)=0.95 beats cos(l1,l3)=2*0.95^2-1=0.805",
            ),
        ),
    ),
    "centered_unit_printed": NamedExample(
        name="centered_unit_printed",
        description=(
            "uncorrected six-label variant: rows 3 and 4 duplicate rows 1 "
            "and 0, so the set is not centered"
        ),
        model=SoftmaxModel(_CENTERED_UNIT_PRINTED),
        expected=(
            ExpectedValue(
                "centering_defect", {}, 0.0, 0.5,
                "duplicated rows push the second-coordinate sum to 4*sqrt(1-0.95^2)",
            ),
            ExpectedValue(
                "unit_norms", {}, 0.0, 1e-12,
                "every row is still unit length",
            ),
        ),
    ),
}


def example(name: str) -> NamedExample:
    """Fetch a bundled example by name."""
    try:
        return _EXAMPLES[name]
    except KeyError:
        raise KeyError(
            f"unknown example {name!r}; available: {sorted(_EXAMPLES)}"
        ) from None


def example_names() -> tuple[str, ...]:
    return tuple(sorted(_EXAMPLES))
