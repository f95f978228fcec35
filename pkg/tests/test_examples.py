"""Bundled worked examples and their expected-value tables."""

import hashlib

import numpy as np
import pytest

from unembed import (
    evaluate_example,
    example,
    example_names,
    inflated_bounds,
    synthetic_embeddings,
)

# sha256 of the synthetic point cloud for the unrestricted example
# (n=500, seed=0), frozen on first generation
CLOUD_SHA256 = "fb43fb649b8e330dbd81e1b3bbf32228b4d56fddb5e0fa5cfac1b898f2feb795"


class TestCatalog:
    def test_names_sorted_and_complete(self):
        assert example_names() == (
            "centered", "centered_unit", "centered_unit_printed", "unrestricted",
        )

    def test_unknown_name_lists_available(self):
        with pytest.raises(KeyError, match="unrestricted"):
            example("nope")

    def test_fixture_shapes(self):
        assert example("unrestricted").model.k == 5
        assert example("centered").model.k == 5
        assert example("centered_unit").model.k == 6
        assert example("centered_unit_printed").model.k == 6
        for name in example_names():
            assert example(name).model.d == 2


class TestExpectedValues:
    @pytest.mark.parametrize("name", example_names())
    def test_all_checks_pass(self, name):
        results = evaluate_example(example(name))
        failed = [r.line() for r in results if not r.passed]
        assert not failed, "\n".join(failed)

    @pytest.mark.parametrize("name", example_names())
    def test_lines_are_printable(self, name):
        for res in evaluate_example(example(name)):
            line = res.line()
            assert line.startswith(("PASS ", "FAIL "))
            assert "expected" in line

    def test_printed_variant_fails_centering_only_by_design(self):
        # the uncorrected table is meant to demonstrate a centering
        # defect, so its expected values assert the defect is present
        results = evaluate_example(example("centered_unit_printed"))
        kinds = {r.expected.check for r in results}
        assert "centering_defect" in kinds
        assert all(r.passed for r in results)


class TestSyntheticEmbeddings:
    def test_frozen_checksum(self):
        u = example("unrestricted").model.unembeddings
        cloud = synthetic_embeddings(u, 500, seed=0)
        digest = hashlib.sha256(cloud.points.tobytes()).hexdigest()
        assert digest == CLOUD_SHA256

    def test_deterministic_per_seed(self):
        u = example("centered").model.unembeddings
        a = synthetic_embeddings(u, 50, seed=7)
        b = synthetic_embeddings(u, 50, seed=7)
        c = synthetic_embeddings(u, 50, seed=8)
        np.testing.assert_array_equal(a.points, b.points)
        assert not np.array_equal(a.points, c.points)

    def test_points_inside_inflated_bounds(self):
        u = example("unrestricted").model.unembeddings
        cloud = synthetic_embeddings(u, 300, seed=1)
        (x0, x1), (y0, y1) = inflated_bounds(u)
        assert cloud.points[:, 0].min() >= x0
        assert cloud.points[:, 0].max() <= x1
        assert cloud.points[:, 1].min() >= y0
        assert cloud.points[:, 1].max() <= y1

    def test_count_and_dimension(self):
        u = example("centered_unit").model.unembeddings
        cloud = synthetic_embeddings(u, 12, seed=0)
        assert cloud.points.shape == (12, 2)

    def test_rejects_empty_batch(self):
        u = example("centered").model.unembeddings
        with pytest.raises(ValueError):
            synthetic_embeddings(u, 0, seed=0)
