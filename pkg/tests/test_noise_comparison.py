import numpy as np
import pytest

from qmrand.closed_form import pguess_star_noisy_projective
from qmrand.decompositions import joint_noise_decomposition
from qmrand.linalg import DomainError
from qmrand.noise_comparison import (
    delta_to_epsilon,
    shared_noise_lower_bound,
    single_noise_curve,
    sweep_curves,
)
from qmrand.povm import NoiseModel


class TestDeltaEpsilon:
    def test_endpoints(self):
        assert delta_to_epsilon(0.0) == 0.0
        assert abs(delta_to_epsilon(1.0) - 1.0) < 1e-12

    def test_threshold(self):
        assert abs(delta_to_epsilon(0.5) - (1.0 - 1.0 / np.sqrt(2.0))) < 1e-12

    def test_spot_inverse(self):
        assert abs(delta_to_epsilon(0.2775) - 0.15) < 1e-12

    def test_roundtrip(self):
        for delta in np.linspace(0.0, 1.0, 31):
            eps = delta_to_epsilon(float(delta))
            assert abs(eps * (2.0 - eps) - delta) < 1e-12

    def test_domain(self):
        with pytest.raises(DomainError):
            delta_to_epsilon(1.2)


class TestSingleNoise:
    def test_endpoints(self):
        assert single_noise_curve(0.0) == 0.5
        assert single_noise_curve(1.0) == 1.0

    def test_spot(self):
        # (1 + sqrt(0.2775 * 1.7225)) / 2
        assert abs(single_noise_curve(0.2775) - 0.8456854603537731) < 1e-12

    def test_matches_qubit_closed_form(self):
        for delta in np.linspace(0.0, 1.0, 41):
            eps_as_delta = float(delta)
            curve = single_noise_curve(eps_as_delta)
            ref = pguess_star_noisy_projective(NoiseModel(2, eps_as_delta)).pguess
            assert abs(curve - ref) < 1e-12


class TestSharedNoise:
    def test_plateau(self):
        assert shared_noise_lower_bound(0.5) == 1.0
        assert shared_noise_lower_bound(0.8) == 1.0

    def test_origin(self):
        assert shared_noise_lower_bound(0.0) == 0.5

    def test_spot(self):
        # (1 + 2 sqrt(0.2775 * 0.7225)) / 2
        expected = 0.5 * (1.0 + 2.0 * np.sqrt(0.2775 * 0.7225))
        assert abs(shared_noise_lower_bound(0.2775) - expected) < 1e-15

    def test_matches_joint_decomposition(self):
        for delta in np.linspace(0.01, 0.49, 13):
            eps = delta_to_epsilon(float(delta))
            jd = joint_noise_decomposition(eps)
            assert abs(shared_noise_lower_bound(float(delta)) - jd.guess_value()) < 1e-10

    def test_strict_dominance_below_plateau(self):
        for delta in np.linspace(0.01, 0.49, 25):
            gap = shared_noise_lower_bound(float(delta)) - single_noise_curve(float(delta))
            closed = 0.5 * np.sqrt(delta) * (2 * np.sqrt(1 - delta) - np.sqrt(2 - delta))
            assert gap > 0.0
            assert abs(gap - closed) < 1e-12


class TestSweep:
    def test_small_grid(self):
        pts = sweep_curves([0.0, 0.5, 1.0])
        assert pts[0].single_noise_pguess == 0.5
        assert abs(pts[1].single_noise_pguess - 0.5 * (1 + np.sqrt(0.75))) < 1e-12
        assert pts[1].shared_noise_lower_bound == 1.0
        assert pts[2].single_noise_pguess == 1.0

    def test_monotone(self):
        pts = sweep_curves(np.linspace(0.0, 1.0, 101))
        single = [p.single_noise_pguess for p in pts]
        shared = [p.shared_noise_lower_bound for p in pts]
        assert np.all(np.diff(single) >= -1e-12)
        assert np.all(np.diff(shared) >= -1e-12)

    def test_pointwise_dominance(self):
        for p in sweep_curves(np.linspace(0.0, 1.0, 101)):
            assert p.shared_noise_lower_bound >= p.single_noise_pguess - 1e-12
