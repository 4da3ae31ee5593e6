"""Transmission through the cavity by two independent routes.

The scattering matrix of the two-lead cavity is

    S_ab(E) = delta_ab - 2 pi i a_a(E) G_ab(E) a_b(E),

with G(E) = (E - H_eff(E))^(-1) the interior Green's function projected onto
the contact sites and a_a(E) the channel amplitudes. The transmission
amplitude t(E) = S_RL can be evaluated either directly from a linear solve
(the ground truth) or from the biorthogonal resonance expansion

    t(E) = -2 pi i sum_lam a_R phi_lam[c_R] phi_lam[c_L] a_L / (E - z_lam),

which is exact when the spectrum at E is complete and non-defective. The two
routes agreeing to rounding is the central consistency check of the
spectral machinery; they separate only at a defective spectrum, where the
expansion does not exist and only the direct route remains.

Widths obey the sum rule Gamma_lam * A_lam = 2 pi sum_C a_C^2 |phi_lam[c_C]|^2
exactly at every energy, so Gamma_lam itself stays below the right-hand side
with equality only for rigid states (A = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DefectiveSpectrum, PoleOnAxis, UndefinedValue
from .linalg import solve_linear
from .model import CavityModel
from .rigidity import RigidityReport, build_report
from .spectrum import SpectralSet, assemble_heff, biorthogonal_spectrum

__all__ = [
    "TwoLevelProfile",
    "ScatteringSolution",
    "coefficients_c",
    "interior_wavefunction",
    "solve_scattering",
    "transmission_spectral",
    "transmission_direct",
    "s_matrix",
    "wigner_delay",
    "width_vs_coupling",
    "two_level_profile",
]

# Real-axis pole rejection distance for the spectral route.
POLE_TOL = 1e-12


@dataclass(frozen=True)
class TwoLevelProfile:
    """Closed-form transmission of two interfering resonances.

    The profile t(E) = -2i Gamma / D - (Gamma / D)^2 with
    D = E - e0 + i Gamma / 2 describes a pair of modes that share one decay
    channel pattern: a degenerate complex pole of second order. |t| vanishes
    exactly at E = e0 and peaks symmetrically at E = e0 +- Gamma / 2 with
    height 2.
    """

    e0: float
    gamma: float
    grid: np.ndarray
    t_values: np.ndarray


@dataclass(frozen=True)
class ScatteringSolution:
    """Fully solved scattering state at one energy.

    ``c`` holds the resonance-expansion coefficients of the interior state
    (normalized to sum |c|^2 = 1), ``psi_interior`` the state itself,
    ``t_spectral`` and ``t_direct`` the two transmission routes,
    ``s_matrix`` the 2x2 scattering matrix and ``rigidity`` the bundled
    phase-rigidity measures. ``spectral`` keeps the underlying spectrum for
    further inspection.
    """

    energy: float
    incoming: int
    c: np.ndarray
    psi_interior: np.ndarray
    t_spectral: complex
    t_direct: complex
    s_matrix: np.ndarray
    rigidity: RigidityReport
    spectral: SpectralSet


def _pole_guard(spectral, energy):
    for s in spectral.states:
        if abs(energy - s.z) < POLE_TOL:
            raise PoleOnAxis(
                f"evaluation energy {energy!r} sits on the pole z = {s.z!r}"
            )


def _require_nondefective(spectral):
    for s in spectral.states:
        if not math.isfinite(s.a_norm):
            raise DefectiveSpectrum(
                "spectrum contains a defective state; the resonance "
                "expansion does not exist there"
            )


def coefficients_c(spectral, model, energy=None, incoming=0):
    """Resonance-expansion coefficients of the interior scattering state.

    The interior state excited through the incoming channel expands as
    psi = sum_lam c_lam phi_lam with c_lam proportional to
    a_in phi_lam[c_in] / (E - z_lam); the returned coefficients are
    normalized to sum |c|^2 = 1.

    Parameters
    ----------
    spectral : SpectralSet
    model : CavityModel
    energy : float or None
        Evaluation energy of the amplitudes and pole denominators; defaults
        to the energy the spectrum was assembled at. Passing a different
        value evaluates the frozen-spectrum approximation.
    incoming : int
        Channel index, 0 for L (default) and 1 for R.

    Raises
    ------
    PoleOnAxis
        E coincides with an eigenvalue to within 1e-12.
    DefectiveSpectrum
        The spectrum contains a defective state.
    UndefinedValue
        All coefficients vanish (the incoming contact is dark at E).
    """
    e = spectral.energy if energy is None else float(energy)
    _require_nondefective(spectral)
    _pole_guard(spectral, e)
    a_in = model.channels[incoming].contact_amplitude(e)
    idx = model.contact_indices[incoming]
    c = np.array(
        [a_in * s.phi[idx] / (e - s.z) for s in spectral.states], dtype=complex
    )
    nrm = math.sqrt(float(np.sum(np.abs(c) ** 2)))
    if nrm == 0.0:
        raise UndefinedValue("interior state vanishes at this energy")
    return c / nrm


def interior_wavefunction(spectral, coeffs):
    """Interior state sum_lam c_lam phi_lam from expansion coefficients."""
    c = np.asarray(coeffs, dtype=complex).ravel()
    mat = np.column_stack([s.phi for s in spectral.states])
    return mat @ c


def transmission_spectral(spectral, model, energy=None):
    """Transmission amplitude L -> R from the resonance expansion.

    Parameters
    ----------
    spectral : SpectralSet
    model : CavityModel
    energy : float or None
        Defaults to the spectrum's own energy; see :func:`coefficients_c`
        for the meaning of a mismatch.

    Returns
    -------
    complex

    Raises
    ------
    PoleOnAxis, DefectiveSpectrum
        Same conditions as :func:`coefficients_c`.
    """
    e = spectral.energy if energy is None else float(energy)
    _require_nondefective(spectral)
    _pole_guard(spectral, e)
    a = model.channel_amplitudes(e)
    i_l, i_r = model.contact_indices
    acc = 0.0 + 0.0j
    for s in spectral.states:
        acc += s.phi[i_r] * s.phi[i_l] / (e - s.z)
    return -2j * math.pi * a[0] * a[1] * acc


def transmission_direct(model, energy):
    """Transmission amplitude L -> R from a direct linear solve.

    Solves (E - H_eff(E)) x = e_L and reads off
    t = -2 pi i a_R x[c_R] a_L. Ground truth for the spectral route; works
    at defective spectra too.

    Raises
    ------
    SingularMatrix
        E - H_eff(E) is numerically singular (pole on the real axis).
    OutsideBand
        |E| is not inside every lead band.
    """
    e = float(energy)
    a = model.channel_amplitudes(e)
    i_l, i_r = model.contact_indices
    h = assemble_heff(model, e)
    m = np.eye(model.dimension, dtype=complex) * e - h
    rhs = np.zeros(model.dimension, dtype=complex)
    rhs[i_l] = 1.0
    x = solve_linear(m, rhs)
    return complex(-2j * math.pi * a[0] * a[1] * x[i_r])


def s_matrix(model, energy):
    """Full 2x2 scattering matrix at a real in-band energy.

    S_ab = delta_ab - 2 pi i a_a G_ab a_b over the channel order (L, R).
    Unitary up to rounding for any alpha, by construction of the
    self-energies and amplitudes from the same surface Green's function.
    """
    e = float(energy)
    a = model.channel_amplitudes(e)
    idx = model.contact_indices
    h = assemble_heff(model, e)
    m = np.eye(model.dimension, dtype=complex) * e - h
    rhs = np.zeros((model.dimension, 2), dtype=complex)
    for col, i in enumerate(idx):
        rhs[i, col] = 1.0
    x = solve_linear(m, rhs)
    s = np.eye(2, dtype=complex)
    for row in range(2):
        for col in range(2):
            s[row, col] -= 2j * math.pi * a[row] * a[col] * x[idx[row], col]
    return s


def wigner_delay(model, energy, dE=1e-5):
    """Wigner-Smith delay from the total scattering phase.

    tau(E) = d/dE arg det S(E), evaluated by the centered difference
    arg[det S(E + dE) / det S(E - dE)] / (2 dE). With |det S| = 1 this is
    the sum of the eigenphase derivatives; at an isolated resonance it
    peaks at the resonance lifetime.

    Parameters
    ----------
    model : CavityModel
    energy : float
        Both E - dE and E + dE must lie inside the band.
    dE : float
    """
    e = float(energy)
    step = float(dE)
    det_p = np.linalg.det(s_matrix(model, e + step))
    det_m = np.linalg.det(s_matrix(model, e - step))
    return float(np.angle(det_p / det_m)) / (2.0 * step)


def solve_scattering(model, energy, incoming=0):
    """Solve one scattering energy end to end.

    Assembles and diagonalizes H_eff(E), expands the interior state,
    evaluates both transmission routes, the 2x2 S matrix and the rigidity
    report, and returns everything in one record.

    Raises
    ------
    PoleOnAxis, DefectiveSpectrum, UndefinedValue
        Propagated from the expansion; the direct-only quantities are not
        reported separately when the expansion fails.
    """
    e = float(energy)
    spectral = biorthogonal_spectrum(assemble_heff(model, e), e)
    c = coefficients_c(spectral, model, incoming=incoming)
    psi = interior_wavefunction(spectral, c)
    return ScatteringSolution(
        energy=e,
        incoming=incoming,
        c=c,
        psi_interior=psi,
        t_spectral=complex(transmission_spectral(spectral, model)),
        t_direct=transmission_direct(model, e),
        s_matrix=s_matrix(model, e),
        rigidity=build_report(spectral, c, psi),
        spectral=spectral,
    )


def width_vs_coupling(spectral, model, energy=None):
    """Per-state width against its channel-coupling bound.

    For each state the pair (gamma, product) holds the width
    gamma = -2 Im z and the right-hand side of the width sum rule,
    product = 2 pi sum_C a_C(E)^2 |phi[c_C]|^2 = gamma * A. The two agree
    in the isolated regime (A -> 1) and separate in the overlapping regime,
    where gamma stays strictly below the product.

    Returns
    -------
    tuple of (float, float)
        One pair per state, spectrum order. The product is nan for a
        defective state, whose biorthogonal norm does not exist.
    """
    e = spectral.energy if energy is None else float(energy)
    a = model.channel_amplitudes(e)
    idx = model.contact_indices
    out = []
    for s in spectral.states:
        if not math.isfinite(s.a_norm):
            out.append((s.width, math.nan))
            continue
        p = 2.0 * math.pi * sum(
            a[k] ** 2 * abs(s.phi[i]) ** 2 for k, i in enumerate(idx)
        )
        out.append((s.width, float(p)))
    return tuple(out)


def two_level_profile(e0, gamma, energies):
    """Closed-form transmission of two modes sharing one decay channel.

    t(E) = -2i Gamma / D - (Gamma / D)^2 with D = E - e0 + i Gamma / 2.
    |t| vanishes exactly at E = e0 (perfect antiresonance) and reaches 2 at
    E = e0 +- Gamma / 2.

    Returns
    -------
    TwoLevelProfile
    """
    e0 = float(e0)
    gamma = float(gamma)
    grid = np.asarray(energies, dtype=float)
    d = grid - e0 + 0.5j * gamma
    t = -2j * gamma / d - (gamma / d) ** 2
    return TwoLevelProfile(e0=e0, gamma=gamma, grid=grid, t_values=t)
