"""Similarity metrics, tie feasibility, and decision-region rasterization.

Tie feasibility asks: can labels i and j be tied for the highest score at
some embedding point?  Formally, is there an f with

    f . g_i = f . g_j > f . g_k   for every other label k.

Two independent deciders are provided.  `coargmax_feasible` answers through
a linear program (any dimension); `coargmax_oracle_2d` answers exactly in
two dimensions: there f is confined to the line orthogonal to g_i - g_j, so
it suffices to test the two unit directions of that line.  The LP restricts
f to the unit box; the feasible set is a cone (closed under positive
scaling), so the restriction changes no verdict, and it bounds the LP.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, LpIndeterminateError, ZeroVectorError
from .lp import PIVOT_TOL, coargmax_lp, solve
from .model import SoftmaxModel, UnembeddingSet, as_label_vector

__all__ = [
    "cosine",
    "dot",
    "euclidean",
    "similarity_matrix",
    "nearest_neighbors",
    "coargmax_feasible",
    "coargmax_oracle_2d",
    "tie_partners",
    "decision_regions",
    "region_adjacency",
    "inflated_bounds",
    "SimilarityMatrix",
    "FeasibilityReport",
    "RegionGrid",
    "DEFAULT_EPS",
]

DEFAULT_EPS = 1e-7
METRICS = ("cosine", "dot", "euclidean")


def _pair(a, b):
    av = as_label_vector(a, "a")
    bv = as_label_vector(b, "b")
    if av.shape[0] != bv.shape[0]:
        raise DimensionMismatchError(f"d={av.shape[0]} vs d={bv.shape[0]}")
    return av, bv


def cosine(a, b) -> float:
    """Cosine similarity, clamped to [-1, 1]; both vectors must be nonzero."""
    av, bv = _pair(a, b)
    na2 = float(np.dot(av, av))
    nb2 = float(np.dot(bv, bv))
    if na2 == 0.0 or nb2 == 0.0:
        raise ZeroVectorError("cosine is undefined for zero vectors")
    value = float(np.dot(av, bv)) / math.sqrt(na2 * nb2)
    return min(1.0, max(-1.0, value))


def dot(a, b) -> float:
    av, bv = _pair(a, b)
    return float(np.dot(av, bv))


def euclidean(a, b) -> float:
    av, bv = _pair(a, b)
    return float(np.linalg.norm(av - bv))


@dataclass(frozen=True)
class SimilarityMatrix:
    """All pairwise values of one metric; values[i, j] is metric(g_i, g_j)."""

    metric: str
    labels: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        k = len(self.labels)
        if values.shape != (k, k):
            raise DimensionMismatchError(
                f"matrix shape {values.shape} for {k} labels"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))


def _mirror_upper(m: np.ndarray) -> np.ndarray:
    # exact symmetry: compute once, copy the upper triangle down
    upper = np.triu(m)
    return upper + np.triu(m, 1).T


def similarity_matrix(unembeddings: UnembeddingSet, metric: str) -> SimilarityMatrix:
    """Pairwise similarity (or distance) matrix over all labels."""
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")
    vectors = unembeddings.vectors
    if metric == "euclidean":
        diffs = vectors[:, None, :] - vectors[None, :, :]
        values = np.sqrt((diffs * diffs).sum(axis=2))
        np.fill_diagonal(values, 0.0)
    else:
        gram = vectors @ vectors.T
        if metric == "cosine":
            norms2 = np.diag(gram).copy()
            if np.any(norms2 == 0.0):
                bad = unembeddings.labels[int(np.flatnonzero(norms2 == 0.0)[0])]
                raise ZeroVectorError(
                    f"cosine is undefined for zero-norm unembedding {bad!r}"
                )
            values = np.clip(gram / np.sqrt(np.outer(norms2, norms2)), -1.0, 1.0)
            np.fill_diagonal(values, 1.0)
        else:
            values = gram
    return SimilarityMatrix(metric, unembeddings.labels, _mirror_upper(values))


def nearest_neighbors(
    unembeddings: UnembeddingSet, i: int, metric: str = "cosine", m: int = 1
) -> list[int]:
    """Indices of the m labels most similar to label i (closest, for the
    euclidean metric).  Ties break toward the lower index."""
    k = unembeddings.k
    if not 0 <= i < k:
        raise IndexError(f"label index {i} out of range for k={k}")
    if not 1 <= m <= k - 1:
        raise ValueError(f"m must be in [1, {k - 1}], got {m}")
    sim = similarity_matrix(unembeddings, metric)
    row = sim.values[i]
    others = [j for j in range(k) if j != i]
    if metric == "euclidean":
        ordered = sorted(others, key=lambda j: (row[j], j))
    else:
        ordered = sorted(others, key=lambda j: (-row[j], j))
    return ordered[:m]


@dataclass(frozen=True)
class FeasibilityReport:
    """Verdict on whether labels i and j can tie for the highest score.

    verdict is one of:
      feasible      margin > eps; witness is a point achieving the tie
      infeasible    margin is zero up to solver noise (the f=0 optimum)
      degenerate    margin in (noise, eps]: too small to trust, reported as-is
      indeterminate the solver gave no usable answer; never mapped to a verdict
    """

    i: int
    j: int
    verdict: str
    margin: float
    eps: float
    witness: np.ndarray | None = None
    lp_status: str = "optimal"

    @property
    def feasible(self) -> bool:
        return self.verdict == "feasible"


def _witness_consistent(g, i, j, f, eps) -> bool:
    scores = g @ f
    if abs(scores[i] - scores[j]) > 1e-9 * (1.0 + abs(scores[i])):
        return False
    others = np.delete(scores, [i, j])
    if others.size and (scores[i] - others.max()) <= eps / 2.0:
        return False
    return True


def coargmax_feasible(
    unembeddings: UnembeddingSet,
    i: int,
    j: int,
    eps: float = DEFAULT_EPS,
    strict: bool = True,
) -> FeasibilityReport:
    """Decide tie feasibility for labels i and j via the margin LP.

    strict=True requires the pair to strictly beat every other label
    (margin > eps).  strict=False accepts a tie at the top shared with other
    labels (margin >= 0); that is satisfiable for every pair (f = 0 ties all
    labels), so the weak variant exists only for completeness.
    """
    if i == j:
        raise ValueError("need two distinct label indices")
    sol = solve(coargmax_lp(unembeddings, i, j))
    if sol.status != "optimal":
        return FeasibilityReport(
            i, j, "indeterminate", math.nan, eps, None, sol.status
        )
    t_star = float(sol.objective)
    f = sol.x[: unembeddings.d]
    if not strict:
        verdict = "feasible" if t_star >= -PIVOT_TOL else "infeasible"
        witness = f if verdict == "feasible" else None
        return FeasibilityReport(i, j, verdict, t_star, eps, witness)
    if t_star > eps:
        if not _witness_consistent(unembeddings.vectors, i, j, f, eps):
            return FeasibilityReport(
                i, j, "indeterminate", t_star, eps, None, "witness-check-failed"
            )
        return FeasibilityReport(i, j, "feasible", t_star, eps, f)
    if t_star > PIVOT_TOL:
        # small positive margin the LP cannot distinguish from noise
        return FeasibilityReport(i, j, "degenerate", t_star, eps, None)
    return FeasibilityReport(i, j, "infeasible", t_star, eps, None)


def coargmax_oracle_2d(unembeddings: UnembeddingSet, i: int, j: int) -> bool:
    """Exact 2D decider: any candidate f lies on the line orthogonal to
    g_i - g_j, so check both unit directions of that line for strict wins."""
    if unembeddings.d != 2:
        raise DimensionMismatchError("the exact oracle applies to d=2 only")
    if i == j:
        raise ValueError("need two distinct label indices")
    g = unembeddings.vectors
    diff = g[i] - g[j]
    if diff[0] == 0.0 and diff[1] == 0.0:
        raise ZeroVectorError(
            "equal unembeddings: the orthogonal line is undefined"
        )
    w = np.array([-diff[1], diff[0]])
    others = [m for m in range(g.shape[0]) if m not in (i, j)]
    if not others:
        return True
    rel = g[i] - g[others]
    for direction in (w, -w):
        if np.all(rel @ direction > 0.0):
            return True
    return False


def tie_partners(
    unembeddings: UnembeddingSet, i: int, eps: float = DEFAULT_EPS
) -> set[int]:
    """All labels j that can tie with label i for the highest score."""
    if not 0 <= i < unembeddings.k:
        raise IndexError(f"label index {i} out of range for k={unembeddings.k}")
    partners: set[int] = set()
    for j in range(unembeddings.k):
        if j == i:
            continue
        report = coargmax_feasible(unembeddings, i, j, eps=eps)
        if report.verdict == "indeterminate":
            raise LpIndeterminateError(
                f"tie feasibility of pair ({i}, {j}) is indeterminate "
                f"(lp status: {report.lp_status})"
            )
        if report.feasible:
            partners.add(j)
    return partners


def inflated_bounds(
    unembeddings: UnembeddingSet, inflate: float = 0.5
) -> tuple[tuple[float, float], ...]:
    """Bounding box of the unembeddings, one (lo, hi) pair per axis, with
    each half-width grown by `inflate` (50% by default).  Degenerate axes
    get a unit pad."""
    vectors = unembeddings.vectors
    lo = vectors.min(axis=0)
    hi = vectors.max(axis=0)
    mid = (lo + hi) / 2.0
    half = (hi - lo) / 2.0 * (1.0 + inflate)
    half = np.where(half == 0.0, 1.0, half)
    return tuple(
        (float(m - h), float(m + h)) for m, h in zip(mid, half)
    )


@dataclass(frozen=True)
class RegionGrid:
    """Rasterized argmax regions: labels[iy, ix] is the winning label index
    at the center of cell (ix, iy)."""

    bounds: tuple[tuple[float, float], tuple[float, float]]
    resolution: tuple[int, int]
    labels: np.ndarray

    def __post_init__(self):
        (x0, x1), (y0, y1) = self.bounds
        nx, ny = self.resolution
        if not (x0 < x1 and y0 < y1):
            raise ValueError("bounds must satisfy min < max on both axes")
        if nx < 1 or ny < 1:
            raise ValueError("resolution must be at least 1 per axis")
        labels = np.array(self.labels, dtype=np.int64)
        if labels.shape != (ny, nx):
            raise DimensionMismatchError(
                f"label grid shape {labels.shape}, expected {(ny, nx)}"
            )
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(
            self, "bounds", ((float(x0), float(x1)), (float(y0), float(y1)))
        )
        object.__setattr__(self, "resolution", (int(nx), int(ny)))

    @property
    def x_centers(self) -> np.ndarray:
        (x0, x1), _ = self.bounds
        nx = self.resolution[0]
        return x0 + (np.arange(nx) + 0.5) * ((x1 - x0) / nx)

    @property
    def y_centers(self) -> np.ndarray:
        _, (y0, y1) = self.bounds
        ny = self.resolution[1]
        return y0 + (np.arange(ny) + 0.5) * ((y1 - y0) / ny)


def decision_regions(
    model: SoftmaxModel,
    bounds: tuple[tuple[float, float], tuple[float, float]] | None = None,
    resolution: int | tuple[int, int] = 200,
) -> RegionGrid:
    """Rasterize the argmax label over a 2D box (cell centers; ties to the
    lowest label index).  Default bounds: inflated_bounds(unembeddings)."""
    if model.d != 2:
        raise DimensionMismatchError("decision regions are defined for d=2")
    if bounds is None:
        bounds = inflated_bounds(model.unembeddings)
    if isinstance(resolution, int):
        resolution = (resolution, resolution)
    nx, ny = int(resolution[0]), int(resolution[1])
    if nx < 2 or ny < 2:
        raise ValueError("resolution must be at least 2 per axis")
    (x0, x1), (y0, y1) = bounds
    xs = x0 + (np.arange(nx) + 0.5) * ((x1 - x0) / nx)
    ys = y0 + (np.arange(ny) + 0.5) * ((y1 - y0) / ny)
    xx, yy = np.meshgrid(xs, ys)
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    scores = pts @ model.unembeddings.vectors.T
    winners = np.argmax(scores, axis=1).reshape(ny, nx)
    return RegionGrid(bounds, (nx, ny), winners)


def region_adjacency(
    grid: RegionGrid, apex_exclusion_cells: float = 3.0
) -> set[tuple[int, int]]:
    """Unordered label pairs that share a 4-neighbor cell edge.

    Bias-free argmax regions are cones that all meet at the origin, so cells
    adjacent across the origin would report every pair of angularly adjacent
    cones as touching.  Pairs whose cells both lie within
    `apex_exclusion_cells` pitches of the origin are skipped; what remains
    reflects shared boundary rays of positive length.
    """
    labels = grid.labels
    xs = grid.x_centers
    ys = grid.y_centers
    (x0, x1), (y0, y1) = grid.bounds
    nx, ny = grid.resolution
    pitch = max((x1 - x0) / nx, (y1 - y0) / ny)
    radius2 = (apex_exclusion_cells * pitch) ** 2
    xx, yy = np.meshgrid(xs, ys)
    near_apex = xx * xx + yy * yy <= radius2

    pairs: set[tuple[int, int]] = set()

    def _collect(a, b, near_a, near_b):
        differ = a != b
        keep = differ & ~(near_a & near_b)
        if not np.any(keep):
            return
        lo = np.minimum(a[keep], b[keep])
        hi = np.maximum(a[keep], b[keep])
        pairs.update(zip(lo.tolist(), hi.tolist()))

    _collect(labels[:, :-1], labels[:, 1:], near_apex[:, :-1], near_apex[:, 1:])
    _collect(labels[:-1, :], labels[1:, :], near_apex[:-1, :], near_apex[1:, :])
    return pairs
