"""Similarity metrics, tie feasibility (LP and exact oracle), region grids."""

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from unembed import (
    DimensionMismatchError,
    SoftmaxModel,
    UnembeddingSet,
    ZeroVectorError,
    coargmax_feasible,
    coargmax_oracle_2d,
    cosine,
    decision_regions,
    dot,
    euclidean,
    inflated_bounds,
    nearest_neighbors,
    region_adjacency,
    scale_pair,
    similarity_matrix,
    tie_partners,
    translate,
)
from oracle_utils import coargmax_bruteforce, cosine_reference

coord = st.floats(-10.0, 10.0, allow_nan=False, allow_infinity=False)


class TestCosine:
    def test_fixture_pair_exact(self, unrestricted):
        u = unrestricted.model.unembeddings
        # dot = 1.0, squared norms = 1.25 each: every step is exact in
        # binary floating point, so demand equality, not closeness
        assert cosine(u.vector(0), u.vector(1)) == 0.8

    def test_matches_high_precision_reference(self, rng):
        for _ in range(50):
            a = rng.uniform(-5, 5, size=4)
            b = rng.uniform(-5, 5, size=4)
            assert cosine(a, b) == pytest.approx(
                cosine_reference(a, b), abs=1e-14
            )

    def test_range_clamped(self):
        a = np.array([1.0, 1e-9])
        assert -1.0 <= cosine(a, 3.0 * a) <= 1.0
        assert -1.0 <= cosine(a, -2.0 * a) <= 1.0

    def test_zero_vector_rejected(self):
        with pytest.raises(ZeroVectorError):
            cosine([0.0, 0.0], [1.0, 0.0])

    def test_antiparallel(self):
        assert cosine([2.0, 0.0], [-3.0, 0.0]) == -1.0

    def test_symmetric(self, unrestricted):
        u = unrestricted.model.unembeddings
        for i in range(u.k):
            for j in range(u.k):
                if i != j:
                    assert cosine(u.vector(i), u.vector(j)) == cosine(
                        u.vector(j), u.vector(i)
                    )

    def test_invariant_under_positive_scaling(self, unrestricted, rng):
        u = unrestricted.model.unembeddings
        for _ in range(25):
            c = float(rng.uniform(0.01, 100.0))
            i, j = rng.choice(u.k, size=2, replace=False)
            a, b = u.vector(int(i)), u.vector(int(j))
            base = cosine(a, b)
            assert abs(cosine(c * a, b) - base) < 1e-12
            assert abs(cosine(a, c * b) - base) < 1e-12


class TestDotAndEuclidean:
    def test_dot_basic(self):
        assert dot([1.0, 2.0], [3.0, -1.0]) == 1.0

    def test_euclidean_self_is_zero(self, unrestricted):
        u = unrestricted.model.unembeddings
        for i in range(u.k):
            assert euclidean(u.vector(i), u.vector(i)) == 0.0

    def test_euclidean_known_value(self):
        assert euclidean([0.0, 0.0], [3.0, 4.0]) == 5.0


class TestSimilarityMatrix:
    @pytest.mark.parametrize("metric", ["cosine", "dot", "euclidean"])
    def test_symmetric_bitwise(self, centered, metric):
        sim = similarity_matrix(centered.model.unembeddings, metric)
        np.testing.assert_array_equal(sim.values, sim.values.T)

    def test_cosine_diagonal_is_one(self, centered):
        sim = similarity_matrix(centered.model.unembeddings, "cosine")
        np.testing.assert_array_equal(np.diag(sim.values), 1.0)

    def test_euclidean_diagonal_is_zero(self, centered):
        sim = similarity_matrix(centered.model.unembeddings, "euclidean")
        np.testing.assert_array_equal(np.diag(sim.values), 0.0)
        assert np.all(sim.values >= 0.0)

    def test_entries_match_pairwise_functions(self, unrestricted):
        u = unrestricted.model.unembeddings
        cos = similarity_matrix(u, "cosine")
        dst = similarity_matrix(u, "euclidean")
        dots = similarity_matrix(u, "dot")
        for i in range(u.k):
            for j in range(u.k):
                if i != j:
                    assert cos.values[i, j] == pytest.approx(
                        cosine(u.vector(i), u.vector(j)), abs=1e-15
                    )
                assert dst.values[i, j] == pytest.approx(
                    euclidean(u.vector(i), u.vector(j)), abs=1e-12
                )
                assert dots.values[i, j] == pytest.approx(
                    dot(u.vector(i), u.vector(j)), abs=1e-15
                )

    def test_unknown_metric_rejected(self, centered):
        with pytest.raises(ValueError):
            similarity_matrix(centered.model.unembeddings, "manhattan")

    def test_mixed_sign_dot_products(self, centered):
        # the off-diagonal dot products of this fixture carry both signs,
        # which is what makes dot similarity uninformative here
        sim = similarity_matrix(centered.model.unembeddings, "dot")
        off = sim.values[~np.eye(5, dtype=bool)]
        assert (off > 0).any() and (off < 0).any()


class TestNearestNeighbors:
    def test_centered_fixture_golden(self, centered):
        # cosine neighbors of label 2 are 3 then 4; its tie partners are
        # {1, 3}, so neighbor rank does not predict tie feasibility
        assert nearest_neighbors(centered.model.unembeddings, 2, "cosine", 2) == [3, 4]

    def test_centered_unit_golden(self, centered_unit):
        assert nearest_neighbors(centered_unit.model.unembeddings, 1, "cosine", 1) == [2]

    def test_euclidean_ordering(self):
        u = UnembeddingSet(
            ("a", "b", "c"), [[0.0, 0.0], [1.0, 0.0], [3.0, 0.0]]
        )
        assert nearest_neighbors(u, 0, "euclidean", 2) == [1, 2]

    def test_m_validated(self, centered):
        u = centered.model.unembeddings
        with pytest.raises(ValueError):
            nearest_neighbors(u, 0, "cosine", 0)
        with pytest.raises(ValueError):
            nearest_neighbors(u, 0, "cosine", u.k)

    def test_index_validated(self, centered):
        with pytest.raises(IndexError):
            nearest_neighbors(centered.model.unembeddings, 99)

    def test_cosine_ranking_invariant_under_normalization(
        self, centered, unrestricted
    ):
        from unembed import normalize_rows

        for ex in (centered, unrestricted):
            u = ex.model.unembeddings
            normalized = normalize_rows(u)
            for i in range(u.k):
                assert nearest_neighbors(u, i, "cosine", u.k - 1) == (
                    nearest_neighbors(normalized, i, "cosine", u.k - 1)
                )


class TestCoargmaxFeasible:
    def test_centered_fixture_verdicts(self, centered):
        u = centered.model.unembeddings
        assert coargmax_feasible(u, 2, 1).verdict == "feasible"
        assert coargmax_feasible(u, 2, 3).verdict == "feasible"
        assert coargmax_feasible(u, 2, 4).verdict == "infeasible"
        assert coargmax_feasible(u, 2, 0).verdict == "infeasible"

    def test_symmetric_in_pair_order(self, centered):
        u = centered.model.unembeddings
        for i, j in [(2, 4), (2, 3), (0, 1)]:
            assert coargmax_feasible(u, i, j).verdict == coargmax_feasible(u, j, i).verdict

    def test_witness_scores(self, centered):
        u = centered.model.unembeddings
        rep = coargmax_feasible(u, 2, 3)
        assert rep.witness is not None
        scores = u.vectors @ rep.witness
        assert abs(scores[2] - scores[3]) <= 1e-9 * (1.0 + abs(scores[2]))
        others = np.delete(scores, [2, 3])
        assert scores[2] - others.max() > rep.eps / 2

    def test_margin_reported(self, centered):
        rep = coargmax_feasible(centered.model.unembeddings, 2, 3)
        assert rep.margin == pytest.approx(0.2, abs=1e-9)

    def test_same_index_rejected(self, centered):
        with pytest.raises(ValueError):
            coargmax_feasible(centered.model.unembeddings, 1, 1)

    def test_weak_variant_always_feasible(self, centered):
        # f = 0 ties every label at the top, so the non-strict reading
        # accepts every pair
        u = centered.model.unembeddings
        for i in range(u.k):
            for j in range(u.k):
                if i != j:
                    assert coargmax_feasible(u, i, j, strict=False).feasible

    def test_two_label_model(self):
        u = UnembeddingSet(("a", "b"), [[1.0, 0.0], [0.0, 1.0]])
        rep = coargmax_feasible(u, 0, 1)
        assert rep.verdict == "feasible"


class TestCoargmaxOracle2d:
    def test_fixture_goldens(self, centered):
        u = centered.model.unembeddings
        assert coargmax_oracle_2d(u, 2, 1) is True
        assert coargmax_oracle_2d(u, 2, 3) is True
        assert coargmax_oracle_2d(u, 2, 4) is False
        assert coargmax_oracle_2d(u, 2, 0) is False

    def test_equal_vectors_rejected(self):
        u = UnembeddingSet(("a", "b", "c"), [[1.0, 1.0], [1.0, 1.0], [0.0, 1.0]])
        with pytest.raises(ZeroVectorError):
            coargmax_oracle_2d(u, 0, 1)

    def test_wrong_dimension_rejected(self):
        u = UnembeddingSet(("a", "b"), [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        with pytest.raises(DimensionMismatchError):
            coargmax_oracle_2d(u, 0, 1)

    def test_two_label_model_true(self):
        u = UnembeddingSet(("a", "b"), [[1.0, 0.0], [0.0, 1.0]])
        assert coargmax_oracle_2d(u, 0, 1) is True

    def test_agrees_with_bruteforce_scan(self, centered, unrestricted):
        for ex in (centered, unrestricted):
            u = ex.model.unembeddings
            for i in range(u.k):
                for j in range(i + 1, u.k):
                    found = coargmax_bruteforce(u.vectors, i, j)
                    if found is not None:
                        assert coargmax_oracle_2d(u, i, j) is True


class TestLpOracleAgreement:
    SEPARATION = 1e-3

    def _random_instance(self, rng):
        k = int(rng.integers(3, 13))
        while True:
            g = rng.uniform(-5.0, 5.0, size=(k, 2))
            diffs = g[:, None, :] - g[None, :, :]
            dist = np.sqrt((diffs**2).sum(-1))
            if dist[~np.eye(k, dtype=bool)].min() >= self.SEPARATION:
                return UnembeddingSet(tuple(f"l{n}" for n in range(k)), g)

    def test_random_sweep(self, rng):
        degenerate = 0
        pairs = 0
        for _ in range(200):
            u = self._random_instance(rng)
            for i in range(u.k):
                for j in range(i + 1, u.k):
                    pairs += 1
                    rep = coargmax_feasible(u, i, j)
                    if rep.verdict in ("degenerate", "indeterminate"):
                        degenerate += 1
                        continue
                    assert rep.feasible == coargmax_oracle_2d(u, i, j), (
                        f"disagreement at pair ({i}, {j}) of {u.vectors!r}"
                    )
        assert degenerate <= max(1, pairs // 100)

    @staticmethod
    def _true_box_margin(g, i, j):
        """Exact best margin of the tie LP over the [-1, 1]^2 box, from
        the tie-line parametrization (independent of the solver)."""
        diff = g[i] - g[j]
        w = np.array([-diff[1], diff[0]])
        w = w / np.abs(w).max()  # largest box-feasible point on the line
        others = [m for m in range(len(g)) if m not in (i, j)]
        best = -np.inf
        for direction in (w, -w):
            margins = (g[i] - g[others]) @ direction
            best = max(best, margins.min() if others else np.inf)
        return best

    @given(st.lists(st.tuples(coord, coord), min_size=3, max_size=6),
           st.data())
    @settings(max_examples=150, deadline=None)
    def test_agreement_property(self, rows, data):
        g = np.array(rows)
        diffs = g[:, None, :] - g[None, :, :]
        dist = np.sqrt((diffs**2).sum(-1))
        k = len(rows)
        assume(dist[~np.eye(k, dtype=bool)].min() >= 1e-2)
        u = UnembeddingSet(tuple(f"l{n}" for n in range(k)), g)
        i = data.draw(st.integers(0, k - 1))
        j = data.draw(st.integers(0, k - 1))
        assume(i != j)
        # margins inside (0, eps] sit below the solver's noise floor: the
        # pair can tie mathematically but not by a float-certifiable
        # amount, so no fixed-precision LP can be held to the answer
        true_margin = self._true_box_margin(g, i, j)
        assume(true_margin <= 0.0 or true_margin > 1e-7)
        rep = coargmax_feasible(u, i, j)
        assume(rep.verdict in ("feasible", "infeasible"))
        assert rep.feasible == coargmax_oracle_2d(u, i, j)


class TestTiePartners:
    def test_unrestricted_golden(self, unrestricted):
        assert tie_partners(unrestricted.model.unembeddings, 0) == {1, 4}

    def test_centered_golden(self, centered):
        assert tie_partners(centered.model.unembeddings, 2) == {1, 3}

    def test_centered_unit_goldens(self, centered_unit):
        u = centered_unit.model.unembeddings
        assert 1 in tie_partners(u, 0)
        assert 3 not in tie_partners(u, 1)

    def test_index_validated(self, centered):
        with pytest.raises(IndexError):
            tie_partners(centered.model.unembeddings, 99)

    def test_symmetry(self, centered):
        u = centered.model.unembeddings
        for i in range(u.k):
            for j in tie_partners(u, i):
                assert i in tie_partners(u, j)


class TestInflatedBounds:
    def test_each_side_grows_by_half_span_times_factor(self, unrestricted):
        (x0, x1), (y0, y1) = inflated_bounds(unrestricted.model.unembeddings)
        # x spans [-1, 1], y spans [-1.2, 1]
        assert (x0, x1) == (-1.5, 1.5)
        assert y0 == pytest.approx(-1.75)
        assert y1 == pytest.approx(1.55)

    def test_degenerate_axis_padded(self):
        u = UnembeddingSet(("a", "b"), [[1.0, 5.0], [2.0, 5.0]])
        (_, _), (y0, y1) = inflated_bounds(u)
        assert y0 < 5.0 < y1


class TestDecisionRegions:
    def test_shape_and_dtype(self, unrestricted):
        grid = decision_regions(unrestricted.model, resolution=50)
        assert grid.labels.shape == (50, 50)
        assert grid.labels.dtype == np.int64
        assert grid.labels.min() >= 0
        assert grid.labels.max() < unrestricted.model.k

    def test_resolution_two_gives_four_cells(self, unrestricted):
        grid = decision_regions(unrestricted.model, resolution=2)
        assert grid.labels.size == 4

    def test_resolution_below_two_rejected(self, unrestricted):
        with pytest.raises(ValueError):
            decision_regions(unrestricted.model, resolution=1)

    def test_two_label_grid_splits_along_logit_equality_line(self):
        # scores without bias tie where (g0 - g1) . f = 0, a line through
        # the origin; for g0 = (1, 0), g1 = (0, 1) that is the diagonal
        # x = y, so the winner is decided by sign(x - y), ties (the exact
        # diagonal of this symmetric grid) to the lower index
        u = UnembeddingSet(("a", "b"), [[1.0, 0.0], [0.0, 1.0]])
        grid = decision_regions(
            SoftmaxModel(u), ((-1.0, 1.0), (-1.0, 1.0)), 40
        )
        xs, ys = np.meshgrid(grid.x_centers, grid.y_centers)
        expected = np.where(xs >= ys, 0, 1)
        np.testing.assert_array_equal(grid.labels, expected)

    def test_requires_2d(self):
        u = UnembeddingSet(("a", "b"), [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        with pytest.raises(ValueError):
            decision_regions(SoftmaxModel(u))

    def test_cell_centers_match_formula(self, unrestricted):
        bounds = ((-2.0, 2.0), (-1.0, 3.0))
        grid = decision_regions(unrestricted.model, bounds, resolution=10)
        np.testing.assert_array_equal(
            grid.x_centers, -2.0 + (np.arange(10) + 0.5) * (4.0 / 10)
        )
        np.testing.assert_array_equal(
            grid.y_centers, -1.0 + (np.arange(10) + 0.5) * (4.0 / 10)
        )

    def test_invariant_under_translation(self, unrestricted):
        # resolution 200 keeps every cell center off the decision
        # boundaries of this fixture (min score gap ~1e-4), so rounding
        # differences cannot flip any argmax; at e.g. resolution 80 one
        # center lands exactly on a boundary line and the comparison
        # becomes an exact-tie coin flip
        model = unrestricted.model
        bounds = inflated_bounds(model.unembeddings)
        moved = model.with_unembeddings(
            translate(model.unembeddings, [0.37, -2.11])
        )
        a = decision_regions(model, bounds, 200)
        b = decision_regions(moved, bounds, 200)
        np.testing.assert_array_equal(a.labels, b.labels)

    def test_invariant_under_scaling(self, unrestricted):
        model = unrestricted.model
        bounds = inflated_bounds(model.unembeddings)
        scaled = scale_pair(model, 7.0)
        a = decision_regions(model, bounds, 200)
        b = decision_regions(scaled, bounds, 200)
        np.testing.assert_array_equal(a.labels, b.labels)

    def test_deterministic(self, centered):
        a = decision_regions(centered.model, resolution=64)
        b = decision_regions(centered.model, resolution=64)
        np.testing.assert_array_equal(a.labels, b.labels)
        np.testing.assert_array_equal(a.x_centers, b.x_centers)


class TestRegionAdjacency:
    def test_centered_fixture_adjacency(self, centered):
        grid = decision_regions(centered.model, resolution=200)
        adj = region_adjacency(grid)
        partners_of_2 = {a for a, b in adj if b == 2} | {b for a, b in adj if a == 2}
        assert partners_of_2 == {1, 3}

    def test_pairs_are_ordered(self, centered):
        grid = decision_regions(centered.model, resolution=100)
        for a, b in region_adjacency(grid):
            assert a < b

    def test_matches_tie_partner_graph(self, centered, unrestricted):
        # away from the shared apex, two argmax cones touch on the grid
        # exactly when their labels can tie
        for ex in (centered, unrestricted):
            grid = decision_regions(ex.model, resolution=200)
            adj = region_adjacency(grid)
            u = ex.model.unembeddings
            expected = set()
            for i in range(u.k):
                for j in tie_partners(u, i):
                    expected.add((min(i, j), max(i, j)))
            assert adj == expected
