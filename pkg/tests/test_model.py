import json
import math

import numpy as np
import pytest
from numpy.testing import assert_array_equal

import gaussmap as gm
from gaussmap.errors import SchemaError, ShapeError

from conftest import random_model, single_unit_model

TRUNC_ID_32 = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])


class TestGaussianActivations:
    def test_unity_at_center(self):
        model = random_model(np.random.default_rng(0), m=4, d1=3, d2=2)
        acts = gm.gaussian_activations(model, model.centers[2])
        assert acts[2] == 1.0

    def test_one_sigma_away(self):
        model = single_unit_model(TRUNC_ID_32, center=[0.0, 0.0, 0.0], sigma=2.0)
        acts = gm.gaussian_activations(model, [2.0, 0.0, 0.0])
        assert acts[0] == pytest.approx(math.exp(-1.0), rel=1e-15)

    def test_hand_evaluation(self):
        # d1=2, mu=(0,0), sigma=2, x=(1,1): exponent -(1+1)/4
        model = gm.ModelParams(centers=[[0.0, 0.0]], sigmas=[2.0],
                               matrices=[[[1.0, 0.0]]])
        acts = gm.gaussian_activations(model, [1.0, 1.0])
        assert acts[0] == pytest.approx(math.exp(-0.5), rel=1e-15)

    def test_dimension_mismatch(self):
        model = single_unit_model(TRUNC_ID_32)
        with pytest.raises(ShapeError):
            gm.gaussian_activations(model, [1.0, 2.0])

    def test_range(self):
        rng = np.random.default_rng(7)
        model = random_model(rng, m=5, d1=4, d2=2)
        for _ in range(20):
            acts = gm.gaussian_activations(model, rng.normal(size=4))
            assert np.all(acts > 0.0) and np.all(acts <= 1.0)


class TestNormalizedWeights:
    def test_single_unit_at_center(self):
        model = single_unit_model(TRUNC_ID_32, epsilon=1e-8)
        w = gm.normalized_weights(model, [0.0, 0.0, 0.0])
        assert w[0] == pytest.approx(1.0 / (1.0 + 1e-8), rel=1e-15)

    def test_symmetry(self):
        model = gm.ModelParams(centers=[[-1.0, 0.0], [1.0, 0.0]], sigmas=[1.5, 1.5],
                               matrices=np.zeros((2, 1, 2)) + 1.0)
        w = gm.normalized_weights(model, [0.0, 0.7])
        assert w[0] == w[1]
        assert w.sum() == pytest.approx(1.0, abs=1e-7)

    def test_hand_normalization(self):
        # activations (e^-1, e^-4) with negligible epsilon
        model = gm.ModelParams(centers=[[0.0, 0.0], [3.0, 0.0]], sigmas=[1.0, 1.0],
                               matrices=np.ones((2, 1, 2)), epsilon=1e-300)
        w = gm.normalized_weights(model, [1.0, 0.0])
        g1, g2 = math.exp(-1.0), math.exp(-4.0)
        assert w == pytest.approx([g1 / (g1 + g2), g2 / (g1 + g2)], rel=1e-12)
        assert w[0] == pytest.approx(0.95257, abs=5e-6)
        assert w[1] == pytest.approx(0.04743, abs=5e-6)

    def test_sum_and_range_properties(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            model = random_model(rng, m=int(rng.integers(1, 6)), d1=4, d2=2)
            x = rng.normal(scale=3.0, size=4)
            g = gm.gaussian_activations(model, x)
            w = gm.normalized_weights(model, x)
            assert np.all(w >= 0.0) and np.all(w < 1.0)
            expected_sum = g.sum() / (g.sum() + model.epsilon)
            assert w.sum() == pytest.approx(expected_sum, rel=1e-12)
            assert 1.0 - w.sum() <= model.epsilon / (g.sum() + model.epsilon) * (1 + 1e-12)


class TestTransform:
    def test_single_unit_projection(self):
        model = single_unit_model(TRUNC_ID_32, center=[3.0, 4.0, 5.0], epsilon=1e-300)
        assert_array_equal(gm.transform_point(model, [3.0, 4.0, 5.0]), [3.0, 4.0])

    def test_weight_concentration(self):
        # all other centers effectively at infinite distance
        mats = np.stack([TRUNC_ID_32, 5.0 * TRUNC_ID_32])
        model = gm.ModelParams(centers=[[0.0, 0.0, 1.0], [1e6, 1e6, 1e6]],
                               sigmas=[1.0, 1.0], matrices=mats)
        out = gm.transform_point(model, [0.0, 0.0, 1.0])
        assert out == pytest.approx(mats[0] @ [0.0, 0.0, 1.0], abs=1e-7)

    def test_symmetric_blend(self):
        # equal weights, M1 = 2P, M2 = 0: blend collapses to P @ x
        mats = np.stack([2.0 * TRUNC_ID_32, np.zeros((2, 3))])
        model = gm.ModelParams(centers=[[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0]],
                               sigmas=[1.0, 1.0], matrices=mats, epsilon=1e-300)
        x = np.array([0.0, 2.0, -1.0])
        assert_array_equal(gm.transform_point(model, x), TRUNC_ID_32 @ x)

    def test_batch_empty(self):
        model = single_unit_model(TRUNC_ID_32)
        out = gm.transform_batch(model, np.empty((0, 3)))
        assert out.shape == (0, 2)

    def test_batch_single_row_matches_point(self):
        rng = np.random.default_rng(5)
        model = random_model(rng, m=3, d1=4, d2=2)
        x = rng.normal(size=4)
        assert_array_equal(gm.transform_batch(model, x[None, :])[0],
                           gm.transform_point(model, x))

    def test_batch_matches_per_point_loop(self):
        rng = np.random.default_rng(6)
        model = random_model(rng, m=4, d1=5, d2=3)
        batch = rng.normal(size=(10, 5))
        looped = np.stack([gm.transform_point(model, row) for row in batch])
        assert_array_equal(gm.transform_batch(model, batch), looped)

    def test_matrix_homogeneity(self):
        rng = np.random.default_rng(8)
        model = random_model(rng, m=3, d1=4, d2=2)
        scaled = gm.ModelParams(centers=model.centers, sigmas=model.sigmas,
                                matrices=2.5 * model.matrices, epsilon=model.epsilon)
        x = rng.normal(size=4)
        np.testing.assert_allclose(gm.transform_point(scaled, x),
                                   2.5 * gm.transform_point(model, x), rtol=1e-12)

    def test_single_expert_degeneracy(self):
        rng = np.random.default_rng(9)
        matrix = rng.normal(size=(2, 4))
        model = single_unit_model(matrix, center=np.zeros(4), sigma=3.0,
                                  epsilon=1e-300)
        for _ in range(10):
            x = rng.normal(size=4)
            assert_array_equal(gm.transform_point(model, x), matrix @ x)

    def test_continuity(self):
        rng = np.random.default_rng(10)
        model = random_model(rng, m=4, d1=3, d2=2)
        x = rng.normal(size=3)
        base = gm.transform_point(model, x)
        # Lipschitz-style bound estimated from coarse probes
        coarse = max(
            np.linalg.norm(gm.transform_point(model, x + 1e-3 * u) - base) / 1e-3
            for u in rng.normal(size=(20, 3))
            for u in [u / np.linalg.norm(u)]
        )
        for _ in range(10):
            u = rng.normal(size=3)
            u /= np.linalg.norm(u)
            step = gm.transform_point(model, x + 1e-7 * u) - base
            assert np.linalg.norm(step) <= 10.0 * coarse * 1e-7 + 1e-12

    def test_shape_errors(self):
        model = single_unit_model(TRUNC_ID_32)
        with pytest.raises(ShapeError):
            gm.transform_point(model, [1.0, 2.0])
        with pytest.raises(ShapeError):
            gm.transform_batch(model, np.zeros((4, 2)))


class TestAggregateMatrix:
    def test_one_hot(self):
        rng = np.random.default_rng(11)
        model = random_model(rng, m=3, d1=4, d2=2)
        weights = np.zeros(3)
        weights[1] = 1.0
        assert_array_equal(gm.aggregate_matrix(model, weights), model.matrices[1])

    def test_all_zero(self):
        model = random_model(np.random.default_rng(12), m=3, d1=4, d2=2)
        assert_array_equal(gm.aggregate_matrix(model, np.zeros(3)), np.zeros((2, 4)))

    def test_convex_blend(self):
        a = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
        b = np.array([[-1.0, 0.0, 2.0], [3.0, -2.0, 1.0]])
        model = gm.ModelParams(centers=np.zeros((2, 3)), sigmas=[1.0, 1.0],
                               matrices=np.stack([a, b]))
        blended = gm.aggregate_matrix(model, [0.25, 0.75])
        np.testing.assert_allclose(blended, 0.25 * a + 0.75 * b, rtol=1e-15)

    def test_length_mismatch(self):
        model = random_model(np.random.default_rng(13), m=3, d1=4, d2=2)
        with pytest.raises(ShapeError):
            gm.aggregate_matrix(model, [0.5, 0.5])


class TestModelParamsValidation:
    def test_inconsistent_unit_count(self):
        with pytest.raises(ShapeError):
            gm.ModelParams(centers=np.zeros((2, 3)), sigmas=[1.0],
                           matrices=np.zeros((2, 2, 3)))

    def test_output_dim_not_smaller(self):
        with pytest.raises(ShapeError):
            gm.ModelParams(centers=np.zeros((1, 2)), sigmas=[1.0],
                           matrices=np.zeros((1, 2, 2)))

    def test_nonpositive_sigma(self):
        with pytest.raises(ShapeError):
            gm.ModelParams(centers=np.zeros((1, 3)), sigmas=[0.0],
                           matrices=np.zeros((1, 2, 3)))

    def test_bad_epsilon(self):
        with pytest.raises(ShapeError):
            gm.ModelParams(centers=np.zeros((1, 3)), sigmas=[1.0],
                           matrices=np.zeros((1, 2, 3)), epsilon=0.0)

    def test_non_finite(self):
        with pytest.raises(ShapeError):
            gm.ModelParams(centers=[[np.nan, 0.0, 0.0]], sigmas=[1.0],
                           matrices=np.zeros((1, 2, 3)))

    def test_arrays_read_only(self):
        model = random_model(np.random.default_rng(14), m=2, d1=3, d2=2)
        with pytest.raises(ValueError):
            model.centers[0, 0] = 5.0


class TestSerialization:
    def test_dict_round_trip(self):
        model = random_model(np.random.default_rng(15), m=4, d1=5, d2=2)
        clone = gm.ModelParams.from_dict(model.to_dict())
        assert_array_equal(clone.centers, model.centers)
        assert_array_equal(clone.sigmas, model.sigmas)
        assert_array_equal(clone.matrices, model.matrices)
        assert clone.epsilon == model.epsilon

    def test_json_round_trip_full_precision(self):
        model = random_model(np.random.default_rng(16), m=3, d1=4, d2=3)
        doc = json.loads(json.dumps(model.to_dict()))
        clone = gm.ModelParams.from_dict(doc)
        assert_array_equal(clone.matrices, model.matrices)
        assert_array_equal(clone.centers, model.centers)
        assert_array_equal(clone.sigmas, model.sigmas)

    def test_missing_field(self):
        doc = random_model(np.random.default_rng(17), m=2, d1=3, d2=2).to_dict()
        del doc["sigmas"]
        with pytest.raises(SchemaError, match="sigmas"):
            gm.ModelParams.from_dict(doc)

    def test_mismatched_matrix_shape_names_entry(self):
        doc = random_model(np.random.default_rng(18), m=3, d1=3, d2=2).to_dict()
        doc["matrices"][1] = [[1.0, 2.0, 3.0]]  # d2=1 instead of 2
        with pytest.raises(SchemaError, match=r"matrices\[1\]"):
            gm.ModelParams.from_dict(doc)

    def test_wrong_center_width(self):
        doc = random_model(np.random.default_rng(19), m=2, d1=3, d2=2).to_dict()
        doc["input_dim"] = 4
        with pytest.raises(SchemaError, match="centers"):
            gm.ModelParams.from_dict(doc)
