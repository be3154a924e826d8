"""Unit tests for kernel-based checks and asymptotic predictions."""

import math

import numpy as np
import pytest

from app.genfn import green_function_eval
from app.kernel_analysis import (
    BACKBONE_LOCAL_CONSTANT,
    GAMMA_QUARTER,
    backbone_return_asymptotic,
    backbone_return_prob,
    chapman_kolmogorov_defect,
    fixed_vertex_asymptotic,
    fixed_vertex_ratio,
    joint_profile_bound,
    kernel_partial_sum,
    reversibility_defect,
    tooth_exponent,
    tooth_kernel_prediction,
    tooth_kernel_ratio,
    vertical_profile_bound,
)
from app.walks import CombVertex


class TestReversibility:
    """deg(u) p(u,v,n) = deg(v) p(v,u,n)."""

    @pytest.mark.parametrize("u,v,n", [((0, 0), (0, 3), 9), ((1, 0), (3, 2), 10), ((0, 2), (0, -1), 13)])
    def test_defect_vanishes(self, u, v, n):
        assert reversibility_defect(u, v, n) <= 1e-14

    def test_wrong_parity_is_zero(self):
        assert reversibility_defect((0, 0), (0, 1), 4) == 0.0

    def test_chapman_kolmogorov(self):
        assert chapman_kolmogorov_defect((0, 0), (1, 1), 3, 4) <= 1e-14
        assert chapman_kolmogorov_defect((2, -1), (0, 2), 5, 6) <= 1e-14


class TestBackboneReturn:
    """Tests for P(C2(n) = 0)."""

    def test_small_values(self):
        assert backbone_return_prob(0) == 1.0
        assert backbone_return_prob(3) == pytest.approx(0.375)

    def test_asymptotic(self):
        n = 512
        assert backbone_return_prob(n) == pytest.approx(backbone_return_asymptotic(n), rel=0.05)

    def test_asymptotic_value(self):
        assert backbone_return_asymptotic(2) == pytest.approx(1 / math.sqrt(math.pi))

    def test_rejects_bad_n(self):
        with pytest.raises(ValueError):
            backbone_return_prob(-1)
        with pytest.raises(ValueError):
            backbone_return_asymptotic(0)


class TestVerticalProfile:
    """Tests for the scaled kernel along the starting tooth."""

    def test_profile_shape(self):
        profile = vertical_profile_bound(256, 6)
        assert len(profile.values) == 7
        assert profile.values[1] == 0.0  # odd heights are unreachable at even n
        assert profile.argmax == 0
        assert profile.constant == profile.sup_value

    def test_profile_is_nonincreasing_near_backbone(self):
        profile = vertical_profile_bound(256, 10)
        assert profile.nonincreasing

    def test_k_max_limit(self):
        with pytest.raises(ValueError):
            vertical_profile_bound(256, 13)

    def test_joint_profile_is_finite(self):
        joint = joint_profile_bound(128, 0.1)
        assert 0 < joint.max_value < 2.0
        assert abs(joint.at.y) <= 128**0.4

    def test_joint_profile_eps_range(self):
        with pytest.raises(ValueError):
            joint_profile_bound(128, 0.5)


class TestToothKernel:
    """Tests for the large deviation shape along a tooth."""

    def test_exponent_values(self):
        assert tooth_exponent(0.0) == 0.0
        grid = np.linspace(0.0, 0.9, 10)
        assert np.all(np.diff(tooth_exponent(grid)) < 0)

    def test_prediction_at_zero(self):
        n = 100
        expected = math.sqrt(2.0) / (GAMMA_QUARTER * n**0.75)
        assert tooth_kernel_prediction(n, 0) == pytest.approx(expected)

    def test_prediction_range(self):
        with pytest.raises(ValueError):
            tooth_kernel_prediction(10, 10)
        with pytest.raises(ValueError):
            tooth_kernel_prediction(0, 0)

    def test_ratio_needs_even_arguments(self):
        with pytest.raises(ValueError):
            tooth_kernel_ratio(11, 2)
        with pytest.raises(ValueError):
            tooth_kernel_ratio(12, 3)

    def test_ratio_near_one(self):
        assert tooth_kernel_ratio(1024, 0) == pytest.approx(1.0, abs=0.15)
        assert tooth_kernel_ratio(1024, 2) == pytest.approx(1.0, abs=0.15)


class TestFixedVertex:
    """Tests for the fixed-vertex local limit."""

    def test_constant(self):
        assert BACKBONE_LOCAL_CONSTANT == pytest.approx(2**-0.75 * 4 / GAMMA_QUARTER)

    def test_asymptotic_parity(self):
        assert fixed_vertex_asymptotic((0, 0), (0, 1), 10) == 0.0
        assert fixed_vertex_asymptotic((0, 0), (0, 1), 11) > 0.0

    def test_degree_enters(self):
        on_backbone = fixed_vertex_asymptotic((0, 0), (2, 0), 100)
        on_tooth = fixed_vertex_asymptotic((0, 0), (1, 1), 100)
        assert on_backbone == pytest.approx(2 * on_tooth)

    def test_ratio_near_one(self):
        assert fixed_vertex_ratio(CombVertex(0, 0), CombVertex(0, 0), 1024) == pytest.approx(1.0, abs=0.05)

    def test_ratio_rejects_wrong_parity(self):
        with pytest.raises(ValueError):
            fixed_vertex_ratio(CombVertex(0, 0), CombVertex(1, 0), 10)


class TestPartialSums:
    """Kernel power series against the closed-form Green function."""

    @pytest.mark.parametrize("k,l", [(0, 0), (1, 0), (0, 1), (2, 1), (-1, 2)])
    def test_matches_green_function(self, k, l):
        z = 0.5
        series = kernel_partial_sum(CombVertex(k, l), z, 80)
        assert series == pytest.approx(green_function_eval(k, l, z), abs=1e-12)
