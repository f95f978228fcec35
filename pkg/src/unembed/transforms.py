"""Probability-preserving transforms of unembedding sets.

Softmax probabilities depend on score differences only, so adding one common
vector v to every unembedding leaves every p(y | e) unchanged:

    e . (g(y) + v) = e . g(y) + e . v    (same additive shift for all y)

That freedom is enough to force the cosine similarity of any chosen pair of
unembeddings to -1 or +1 without touching the model's behavior:

  * target -1: v = -(a + (b - a) / 2) maps a, b to (a - b) / 2 and its
    negation, an antipodal pair.
  * target +1: v = -a + (b - a) / 2 maps a to (b - a) / 2 and b to
    3 (b - a) / 2, positively collinear vectors.

A second degree of freedom: scaling every unembedding by c > 0 while scaling
every embedding point by 1/c preserves all probabilities but scales every
pairwise distance between unembeddings by c.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, ZeroVectorError
from .model import (
    EmbeddingBatch,
    SoftmaxModel,
    UnembeddingSet,
    as_label_vector,
    predict_proba_batch,
)

__all__ = [
    "translate",
    "center",
    "normalize_rows",
    "scale_pair",
    "cosine_forcing_translation",
    "equivalent_model_pair",
    "verify_equivalence",
    "EquivalenceReport",
]


def translate(unembeddings: UnembeddingSet, v) -> UnembeddingSet:
    """Add the same vector v to every unembedding."""
    vec = as_label_vector(v, "translation vector")
    if vec.shape[0] != unembeddings.d:
        raise DimensionMismatchError(
            f"translation has d={vec.shape[0]}, set has d={unembeddings.d}"
        )
    return unembeddings.with_vectors(unembeddings.vectors + vec)


def center(unembeddings: UnembeddingSet) -> UnembeddingSet:
    """Translate so the unembeddings sum to the zero vector."""
    return translate(unembeddings, -unembeddings.vectors.mean(axis=0))


def normalize_rows(unembeddings: UnembeddingSet) -> UnembeddingSet:
    """Scale each unembedding to unit Euclidean norm.

    Unlike translation this generally changes probabilities; it exists for
    geometry comparisons, not as an equivalence transform.
    """
    norms = np.linalg.norm(unembeddings.vectors, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ZeroVectorError(
            f"cannot normalize zero-norm unembedding "
            f"{unembeddings.labels[zero[0]]!r}"
        )
    return unembeddings.with_vectors(unembeddings.vectors / norms[:, None])


def scale_pair(model: SoftmaxModel, c: float) -> SoftmaxModel:
    """Scale unembeddings by c and embeddings by 1/c (c > 0).

    Scores (1/c) e . (c g) are unchanged, so probabilities are; every
    pairwise distance between unembeddings scales by c.
    """
    c = float(c)
    if not np.isfinite(c) or c <= 0.0:
        raise ValueError(f"scale must be a positive finite number, got {c!r}")
    scaled_u = model.unembeddings.with_vectors(model.unembeddings.vectors * c)
    scaled_e = EmbeddingBatch(model.embeddings.points / c, model.embeddings.names)
    return SoftmaxModel(scaled_u, scaled_e)


def cosine_forcing_translation(a, b, target: int) -> np.ndarray:
    """Translation vector v with cos(a + v, b + v) equal to target (-1 or +1).

    target -1 requires a != b (equal vectors cannot be made antipodal by a
    common shift).  target +1 with a == b returns the zero vector: the pair
    already has cosine +1 whenever both vectors are nonzero.
    """
    av = as_label_vector(a, "a")
    bv = as_label_vector(b, "b")
    if av.shape[0] != bv.shape[0]:
        raise DimensionMismatchError(
            f"a has d={av.shape[0]}, b has d={bv.shape[0]}"
        )
    if target == -1:
        if np.array_equal(av, bv):
            raise ValueError("cannot force cosine -1 for equal vectors")
        return -(av + 0.5 * (bv - av))
    if target == 1:
        if np.array_equal(av, bv):
            return np.zeros_like(av)
        return -av + 0.5 * (bv - av)
    raise ValueError(f"target must be -1 or +1, got {target!r}")


def equivalent_model_pair(
    model: SoftmaxModel, i: int, j: int
) -> tuple[SoftmaxModel, SoftmaxModel]:
    """Two models with identical probabilities everywhere, in which
    unembeddings i and j have cosine -1 and +1 respectively."""
    u = model.unembeddings
    if i == j:
        raise ValueError("need two distinct label indices")
    if not (0 <= i < u.k and 0 <= j < u.k):
        raise IndexError(f"label indices ({i}, {j}) out of range for k={u.k}")
    a, b = u.vector(i), u.vector(j)
    if np.array_equal(a, b):
        raise ValueError(
            f"unembeddings {u.labels[i]!r} and {u.labels[j]!r} are equal; "
            "their cosine cannot be forced"
        )
    v_minus = cosine_forcing_translation(a, b, -1)
    v_plus = cosine_forcing_translation(a, b, 1)
    return (
        model.with_unembeddings(translate(u, v_minus)),
        model.with_unembeddings(translate(u, v_plus)),
    )


@dataclass(frozen=True)
class EquivalenceReport:
    """Result of comparing two models' probabilities over a point batch."""

    max_prob_diff: float
    num_points_checked: int
    worst_point: int
    worst_label: int
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_prob_diff < self.tol


def verify_equivalence(
    model_a: SoftmaxModel,
    model_b: SoftmaxModel,
    points,
    tol: float = 1e-12,
) -> EquivalenceReport:
    """Max |p_a - p_b| over the given embedding points."""
    if isinstance(points, EmbeddingBatch):
        pts = points.points
    else:
        pts = np.asarray(points, dtype=np.float64)
    if model_a.labels != model_b.labels:
        raise ValueError("models have different label sets")
    if model_a.d != model_b.d:
        raise DimensionMismatchError(
            f"models have d={model_a.d} and d={model_b.d}"
        )
    if pts.ndim != 2 or pts.shape[1] != model_a.d:
        raise DimensionMismatchError(
            f"points with shape {pts.shape} for d={model_a.d} models"
        )
    if pts.shape[0] == 0:
        raise ValueError("need at least one point to compare")
    pa = predict_proba_batch(model_a, pts)
    pb = predict_proba_batch(model_b, pts)
    diff = np.abs(pa - pb)
    flat = int(np.argmax(diff))
    worst_point, worst_label = divmod(flat, diff.shape[1])
    return EquivalenceReport(
        max_prob_diff=float(diff[worst_point, worst_label]),
        num_points_checked=int(pts.shape[0]),
        worst_point=int(worst_point),
        worst_label=int(worst_label),
        tol=float(tol),
    )
