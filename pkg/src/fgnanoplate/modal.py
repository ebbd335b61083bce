"""Generalized eigenproblem ``K x = omega^2 M x`` and frequency post-processing."""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse as sps

from .assembly import GlobalSystem
from .errors import FormulationError, SolverError

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-8
ZERO_EIG_RTOL = 1e-12
TIE_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class ModalResult:
    """
    Lowest eigenpairs of a constrained plate system.

    ``omegas`` are in the units implied by the inputs: lengths in nm with SI
    moduli and densities give rad/ns. ``modes`` are M-orthonormal columns over
    the free dofs.
    """

    omegas: np.ndarray
    Omegas: np.ndarray
    modes: np.ndarray
    mu: float
    eigenvalues: np.ndarray
    residuals: np.ndarray
    flagged: np.ndarray  # indices of (near-)zero or negative eigenvalues

    def __len__(self):
        return self.omegas.size


def _dense(mat) -> np.ndarray:
    return mat.toarray() if sps.issparse(mat) else np.asarray(mat)


def _order(eigvals: np.ndarray, modes: np.ndarray) -> np.ndarray:
    """Ascending eigenvalue; ties broken by the dof index of peak amplitude."""
    peak = np.argmax(np.abs(modes), axis=0)
    scale = max(np.abs(eigvals).max(), np.finfo(float).tiny)
    order = list(np.argsort(eigvals, kind="stable"))
    i = 0
    while i < len(order):
        j = i + 1
        while j < len(order) and eigvals[order[j]] - eigvals[order[i]] <= TIE_RTOL * scale:
            j += 1
        order[i:j] = sorted(order[i:j], key=lambda k: (peak[k], eigvals[k]))
        i = j
    return np.array(order, dtype=int)


def solve_modes(system: GlobalSystem, k: int) -> ModalResult:
    """
    ``k`` smallest eigenpairs via Cholesky reduction of ``M`` to a standard problem.

    Raises
    ------
    FormulationError
        ``M`` is not symmetric positive definite.
    SolverError
        A returned pair misses the residual bound ``RESIDUAL_TOL``.
    """
    K = _dense(system.K)
    M = _dense(system.M)
    n = K.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"requested {k} modes from a system with {n} free dofs")
    try:
        L = la.cholesky(M, lower=True)
    except la.LinAlgError as exc:
        raise FormulationError(f"mass matrix is not positive definite (mu = {system.mu})") from exc
    # A = L^-1 K L^-T
    A = la.solve_triangular(L, la.solve_triangular(L, K, lower=True).T, lower=True)
    A = 0.5 * (A + A.T)
    lam, Y = la.eigh(A, subset_by_index=[0, k - 1])
    X = la.solve_triangular(L, Y, lower=True, trans="T")

    order = _order(lam, X)
    lam = lam[order]
    X = X[:, order]
    # deterministic sign: largest-magnitude component positive
    peak = np.argmax(np.abs(X), axis=0)
    X = X * np.sign(X[peak, np.arange(X.shape[1])])

    KX = K @ X
    MX = M @ X
    res = np.linalg.norm(KX - MX * lam, axis=0) / np.maximum(np.linalg.norm(KX, axis=0), np.finfo(float).tiny)
    if np.any(res > RESIDUAL_TOL):
        raise SolverError(
            f"eigen residuals above {RESIDUAL_TOL:g}: max {res.max():.3e} "
            f"(n = {n}, k = {k}, mu = {system.mu})"
        )

    lam_max = np.abs(la.eigvalsh(A, subset_by_index=[n - 1, n - 1])[0])
    flagged = np.flatnonzero(lam <= ZERO_EIG_RTOL * lam_max)
    if flagged.size:
        warnings.warn(
            f"{flagged.size} eigenvalue(s) at or below {ZERO_EIG_RTOL:g} * max: modes {flagged.tolist()}",
            RuntimeWarning,
            stacklevel=2,
        )
    omegas = np.sqrt(np.clip(lam, 0.0, None))
    s = system.section
    Omegas = nondimensionalize(omegas, s.h, s.rho_c, s.G_c)
    log.debug("solved %d modes on %d dofs, Omega_1 = %.6g", k, n, Omegas[0])
    return ModalResult(omegas, Omegas, X, system.mu, lam, res, flagged)


def nondimensionalize(omega, h: float, rho_c: float, G_c: float):
    """``Omega = omega * h * sqrt(rho_c / G_c)``."""
    if not (h > 0 and rho_c > 0 and G_c > 0):
        raise ValueError("h, rho_c and G_c must be positive")
    return np.asarray(omega) * h * np.sqrt(rho_c / G_c)


def frequency_ratio(Omega_nl, Omega_l):
    """Nonlocal over local frequency."""
    Omega_l = np.asarray(Omega_l, dtype=float)
    if np.any(Omega_l == 0):
        raise ZeroDivisionError("local frequency is zero")
    if np.any(Omega_l < 0):
        raise ValueError("local frequency must be positive")
    out = np.asarray(Omega_nl, dtype=float) / Omega_l
    return float(out) if out.ndim == 0 else out
