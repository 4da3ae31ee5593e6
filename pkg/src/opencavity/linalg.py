"""Dense complex linear algebra kernels.

Matrices handled here are small (cavity dimension, at most a few hundred) and
dense. Eigendecomposition and linear solves are delegated to LAPACK through
numpy/scipy; what this module adds is the contract layer used everywhere else:

* deterministic eigenvalue ordering (ascending real part, ties by imaginary
  part),
* a per-pair reciprocal condition number so near-defective pairs can be
  recognized,
* an explicit singularity threshold on the LU pivots,
* a fixed-coefficient Nelder-Mead simplex minimizer.

2x2 matrices are diagonalized in closed form (stable quadratic formula plus
adjugate-row eigenvectors). The generic QR iteration perturbs a defective
eigenvalue pair by ~sqrt(eps)*||M||, which is too coarse at an exceptional
point; the closed form computes the discriminant, and with it the coalescence,
exactly when the entries permit.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg
import scipy.optimize

from .exceptions import ConvergenceFailure, InvalidMatrix, SingularMatrix

__all__ = ["EigenSystem", "eig_general", "solve_linear", "minimize_simplex"]


@dataclass(frozen=True)
class EigenSystem:
    """Spectral decomposition of a general complex matrix.

    Attributes
    ----------
    values : (n,) complex ndarray
        Eigenvalues sorted by real part, ties broken by imaginary part.
    vectors : (n, n) complex ndarray
        Right eigenvectors as columns, unit Euclidean norm, ordered like
        ``values``.
    condition : (n,) float ndarray
        Reciprocal condition number of each eigenpair,
        |w^H v| / (||w|| ||v||) with w the matching left eigenvector. Values
        near zero flag a nearly defective pair.
    """

    values: np.ndarray
    vectors: np.ndarray
    condition: np.ndarray


def _check_square(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.view(float))):
        raise InvalidMatrix("matrix contains non-finite entries")
    return a


def _eig2(a: np.ndarray):
    """Closed-form eigendecomposition of a 2x2 complex matrix."""
    tr = a[0, 0] + a[1, 1]
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    disc = tr * tr - 4.0 * det
    sq = np.sqrt(disc)
    # Pick the sign that avoids cancellation in tr + sq.
    if (np.conj(tr) * sq).real < 0.0:
        sq = -sq
    z1 = 0.5 * (tr + sq)
    z2 = det / z1 if z1 != 0.0 else 0.5 * (tr - sq)

    scale = np.abs(a).max()
    values = np.array([z1, z2], dtype=complex)
    vectors = np.empty((2, 2), dtype=complex)
    conds = np.empty(2)
    for i, z in enumerate(values):
        # Rows of adj(a - z) span the right null space of (a - z).
        cand_r = (
            np.array([a[0, 1], z - a[0, 0]]),
            np.array([z - a[1, 1], a[1, 0]]),
        )
        v = max(cand_r, key=lambda u: np.abs(u).max())
        if np.abs(v).max() <= 16 * np.finfo(float).eps * max(scale, abs(z)):
            # Numerically a scalar matrix: any basis diagonalizes it.
            v = np.eye(2, dtype=complex)[:, i]
        v = v / np.linalg.norm(v)
        cand_l = (
            np.array([a[1, 0], z - a[0, 0]]),
            np.array([z - a[1, 1], a[0, 1]]),
        )
        w = max(cand_l, key=lambda u: np.abs(u).max())
        if np.abs(w).max() <= 16 * np.finfo(float).eps * max(scale, abs(z)):
            w = np.eye(2, dtype=complex)[:, i]
        w = w / np.linalg.norm(w)
        vectors[:, i] = v
        conds[i] = abs(w @ v)
    return values, vectors, conds


def eig_general(m) -> EigenSystem:
    """Eigendecompose a general complex square matrix.

    Parameters
    ----------
    m : array_like, shape (n, n)
        Complex matrix. No structure is assumed.

    Returns
    -------
    EigenSystem
        Values sorted ascending by real part (ties by imaginary part), unit
        right eigenvectors, and per-pair reciprocal condition numbers.

    Raises
    ------
    InvalidMatrix
        Not square or contains NaN/inf.
    ConvergenceFailure
        The underlying QR iteration failed to converge.
    """
    a = _check_square(m)
    n = a.shape[0]
    if n == 0:
        raise InvalidMatrix("empty matrix")
    if n == 1:
        return EigenSystem(
            values=a[0, :1].copy(),
            vectors=np.ones((1, 1), dtype=complex),
            condition=np.ones(1),
        )
    if n == 2:
        values, vectors, conds = _eig2(a)
    else:
        try:
            values, vl, vr = scipy.linalg.eig(a, left=True, right=True)
        except np.linalg.LinAlgError as err:
            raise ConvergenceFailure(f"eigensolver did not converge: {err}") from err
        vectors = vr
        conds = np.empty(n)
        for i in range(n):
            nl = np.linalg.norm(vl[:, i])
            nr = np.linalg.norm(vr[:, i])
            conds[i] = abs(np.vdot(vl[:, i], vr[:, i])) / (nl * nr)
    order = np.lexsort((values.imag, values.real))
    return EigenSystem(
        values=values[order],
        vectors=vectors[:, order],
        condition=conds[order],
    )


def solve_linear(m, rhs) -> np.ndarray:
    """Solve m @ x = rhs by LU factorization with partial pivoting.

    Parameters
    ----------
    m : array_like, shape (n, n)
    rhs : array_like, shape (n,) or (n, k)

    Returns
    -------
    ndarray
        Solution with the same trailing shape as ``rhs``.

    Raises
    ------
    SingularMatrix
        Some pivot |U_ii| fell below 1e-14 * ||m||_inf.
    InvalidMatrix
        Shape mismatch or non-finite entries.
    """
    a = _check_square(m)
    b = np.asarray(rhs, dtype=complex)
    if b.shape[0] != a.shape[0]:
        raise InvalidMatrix(
            f"rhs length {b.shape[0]} does not match matrix dimension {a.shape[0]}"
        )
    norm_inf = np.abs(a).sum(axis=1).max() if a.size else 0.0
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    except np.linalg.LinAlgError as err:
        raise SingularMatrix(str(err)) from err
    pivots = np.abs(np.diag(lu))
    if pivots.min() < 1e-14 * norm_inf:
        raise SingularMatrix(
            f"pivot {pivots.min():.3e} below threshold {1e-14 * norm_inf:.3e}"
        )
    return scipy.linalg.lu_solve((lu, piv), b, check_finite=False)


def minimize_simplex(
    f: Callable[[np.ndarray], float],
    start: Sequence[float],
    tol: float = 1e-8,
) -> tuple[np.ndarray, float]:
    """Minimize a scalar function with the Nelder-Mead simplex method.

    Fixed reflection/expansion/contraction/shrink coefficients (1, 2, 0.5,
    0.5) and an iteration cap of 2000; the run is deterministic given the
    start point. Termination is purely geometric: the simplex diameter in the
    infinity norm must fall below ``tol``.

    Parameters
    ----------
    f : callable
        Maps a parameter vector to a finite float.
    start : sequence of float
        Initial point; sets the search dimension.
    tol : float
        Simplex diameter bound at termination. Must be positive.

    Returns
    -------
    (ndarray, float)
        Argmin estimate and the function value there.

    Raises
    ------
    ConvergenceFailure
        Iteration cap reached first; carries the best point and value found.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    x0 = np.asarray(start, dtype=float)
    if x0.ndim != 1 or x0.size == 0:
        raise ValueError("start must be a non-empty 1-d sequence")
    result = scipy.optimize.minimize(
        f,
        x0,
        method="Nelder-Mead",
        options={
            "maxiter": 2000,
            "maxfev": 10**9,
            # max_i ||x_i - x_best||_inf <= tol/2 bounds the diameter by tol.
            "xatol": 0.5 * tol,
            "fatol": np.inf,
            "adaptive": False,
        },
    )
    if not result.success:
        raise ConvergenceFailure(
            f"simplex did not contract below {tol:g} within 2000 iterations",
            best_point=np.asarray(result.x, dtype=float),
            best_value=float(result.fun),
        )
    return np.asarray(result.x, dtype=float), float(result.fun)
