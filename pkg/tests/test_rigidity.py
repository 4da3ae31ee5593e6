import math

import numpy as np
import numpy.testing as npt
import pytest

from opencavity import (
    NotNormalized,
    UndefinedValue,
    b_antisymmetry_residual,
    build_report,
    rho_direct,
    rho_spectral,
)
from opencavity.scattering import solve_scattering

from conftest import single_site_model


class TestRhoDirect:
    def test_real_vector_fully_rigid(self):
        mod, theta = rho_direct(np.array([1.0, 2.0, 3.0]))
        npt.assert_allclose(mod, 1.0, rtol=0, atol=1e-15)
        npt.assert_allclose(theta, 0.0, rtol=0, atol=1e-15)

    def test_circular_vector_zero(self):
        mod, _ = rho_direct(np.array([1.0, 1.0j]) / math.sqrt(2.0))
        assert mod < 1e-15

    def test_mixed_vector(self):
        mod, _ = rho_direct(np.array([1.0 + 1.0j, 1.0]))
        npt.assert_allclose(mod, math.sqrt(5.0) / 3.0, rtol=0, atol=1e-15)

    def test_theta_range(self):
        rng = np.random.RandomState(41)
        for _ in range(25):
            psi = rng.randn(4) + 1j * rng.randn(4)
            mod, theta = rho_direct(psi)
            assert -math.pi / 2.0 < theta <= math.pi / 2.0
            assert 0.0 <= mod <= 1.0 + 1e-12

    def test_rotation_invariant_modulus(self):
        # |rho| does not change under a global phase of psi.
        rng = np.random.RandomState(7)
        psi = rng.randn(5) + 1j * rng.randn(5)
        mod0, _ = rho_direct(psi)
        for phase in (0.3, 1.1, 2.9):
            mod, _ = rho_direct(psi * np.exp(1j * phase))
            npt.assert_allclose(mod, mod0, rtol=0, atol=1e-14)

    def test_zero_sum_gives_zero_theta(self):
        mod, theta = rho_direct(np.array([1.0, 1.0j]))
        assert mod == 0.0
        assert theta == 0.0

    def test_zero_vector_undefined(self):
        with pytest.raises(UndefinedValue):
            rho_direct(np.zeros(3))


class TestRhoSpectral:
    def test_single_state(self):
        assert rho_spectral(np.array([1.0]), np.array([1.0])) == 1.0

    def test_circular_coefficients_cancel(self):
        c = np.array([1.0, 1.0j]) / math.sqrt(2.0)
        val = rho_spectral(c, np.array([1.0, 1.0]))
        assert abs(val) < 1e-15

    def test_weights_enter_linearly(self):
        val = rho_spectral(np.array([1.0, 0.0]), np.array([5.0, 1.0]))
        npt.assert_allclose(val, 5.0 + 0.0j, rtol=0, atol=1e-15)

    def test_rejects_unnormalized(self):
        with pytest.raises(NotNormalized):
            rho_spectral(np.array([1.0, 1.0]), np.array([1.0, 1.0]))

    def test_infinite_a_norm_undefined(self):
        with pytest.raises(UndefinedValue):
            rho_spectral(np.array([1.0, 0.0]), np.array([math.inf, 1.0]))


class TestBAntisymmetryResidual:
    def test_pure_antisymmetric(self):
        b = np.array([[0.0, 1.0j], [1.0j, 0.0]])
        npt.assert_allclose(
            b_antisymmetry_residual(b), 1.0, rtol=0, atol=1e-15
        )

    def test_exactly_antisymmetric_zero(self):
        b = np.array([[0.0, 1.0 + 1.0j], [-1.0 - 1.0j, 0.0]])
        assert b_antisymmetry_residual(b) == 0.0

    def test_scalar_matrix(self):
        assert b_antisymmetry_residual(np.array([[0.3j]])) == 0.0

    def test_scale_invariant_denominator(self):
        rng = np.random.RandomState(3)
        a = rng.randn(4, 4) + 1j * rng.randn(4, 4)
        b = a - a.T
        assert b_antisymmetry_residual(b) < 1e-14
        assert b_antisymmetry_residual(1e6 * b) < 1e-14


class TestBuildReport:
    def test_fields_present(self):
        sol = solve_scattering(single_site_model(), 0.4)
        rep = sol.rigidity
        assert rep.energy == 0.4
        assert 0.0 <= rep.rho_direct_mod <= 1.0 + 1e-12
        assert -math.pi / 2.0 < rep.rho_direct_theta <= math.pi / 2.0
        assert isinstance(rep.rho_spectral, complex)
        assert rep.b_antisymmetry_residual >= 0.0
        assert len(rep.per_state_r) == 1

    def test_spectral_matches_direct_modulus(self):
        # For a one-level cavity the interior wave is the resonance state,
        # so both phase-rigidity routes agree.
        sol = solve_scattering(single_site_model(), 0.4)
        rep = sol.rigidity
        npt.assert_allclose(
            abs(rep.rho_spectral), rep.rho_direct_mod, rtol=0, atol=1e-10
        )

    def test_per_state_r_in_range(self):
        from conftest import reference_models

        for label, model, grid in reference_models():
            sol = solve_scattering(model, float(grid[17]))
            for _, r in sol.rigidity.per_state_r:
                assert 0.0 <= r <= 1.0, label

    def test_report_via_build_report(self):
        sol = solve_scattering(single_site_model(), -0.9)
        rebuilt = build_report(sol.spectral, sol.c, sol.psi_interior)
        assert rebuilt.energy == sol.rigidity.energy
        npt.assert_allclose(
            rebuilt.rho_direct_mod, sol.rigidity.rho_direct_mod,
            rtol=0, atol=1e-15,
        )
