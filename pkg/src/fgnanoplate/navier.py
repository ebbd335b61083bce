"""
Closed-form checks for simply supported plates.

Each Navier mode ``(m, n)`` uses the sine/cosine expansion

    u0 = U cos(ax) sin(by)    v0 = V sin(ax) cos(by)    w0 = W sin(ax) sin(by)
    tx = X cos(ax) sin(by)    ty = Y sin(ax) cos(by)

with ``a = m pi / a_len`` and ``b = n pi / b_len``, which turns the FSDT
equations into a 5x5 generalized eigenproblem per mode.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .errors import DegenerateParameterError, DomainError
from .material import SectionProperties


@dataclass(frozen=True)
class NavierMode:
    m: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise DomainError(f"half-wave numbers must be >= 1, got ({self.m}, {self.n})")

    def wavenumbers(self, a: float, b: float) -> tuple[float, float]:
        return self.m * np.pi / a, self.n * np.pi / b

    def laplacian_eig(self, a: float, b: float) -> float:
        """``alpha^2 + beta^2`` (minus the Laplacian eigenvalue of the mode)."""
        al, be = self.wavenumbers(a, b)
        return al * al + be * be


def nonlocal_ratio(mode: NavierMode, mu: float, a: float, b: float) -> float:
    """``1 / sqrt(1 + mu (alpha^2 + beta^2))``, independent of the material."""
    if mu < 0:
        raise DomainError(f"mu must be >= 0, got {mu}")
    return 1.0 / np.sqrt(1.0 + mu * mode.laplacian_eig(a, b))


def mode_matrices(mode: NavierMode, section: SectionProperties, a: float, b: float, mu: float = 0.0):
    """Per-mode stiffness and mass over amplitudes ``(U, V, W, X, Y)``."""
    al, be = mode.wavenumbers(a, b)
    Bp = np.array([[-al, 0, 0, 0, 0], [0, -be, 0, 0, 0], [be, al, 0, 0, 0]], dtype=float)
    Bb = np.array([[0, 0, 0, -al, 0], [0, 0, 0, 0, -be], [0, 0, 0, be, al]], dtype=float)
    Bs = np.array([[0, 0, al, 1, 0], [0, 0, be, 0, 1]], dtype=float)
    K = (
        Bp.T @ section.A @ Bp
        + Bp.T @ section.B @ Bb
        + Bb.T @ section.B @ Bp
        + Bb.T @ section.D @ Bb
        + Bs.T @ section.Es @ Bs
    )
    M = section.inertia * (1.0 + mu * (al * al + be * be))
    return K, M


def navier_local_fsdt(mode: NavierMode, section: SectionProperties, a: float, b: float) -> float:
    """
    Lowest (flexural) angular frequency of Navier mode ``mode``, local elasticity.

    When the section has no bending-extension coupling only the 3x3
    ``(W, X, Y)`` block is solved.
    """
    K, M = mode_matrices(mode, section, a, b)
    if np.allclose(section.B, 0.0, atol=1e-12 * np.abs(section.A).max() * section.h) and section.I12 == 0:
        idx = [2, 3, 4]
        K = K[np.ix_(idx, idx)]
        M = M[np.ix_(idx, idx)]
    try:
        lam = la.eigh(K, M, eigvals_only=True)
    except la.LinAlgError as exc:
        raise DegenerateParameterError(f"singular per-mode system for {mode}") from exc
    lam = lam[lam > 0]
    if lam.size == 0:
        raise DegenerateParameterError(f"no positive eigenvalue for {mode}")
    return float(np.sqrt(lam[0]))


def navier_spectrum(section: SectionProperties, a: float, b: float, count: int, mu: float = 0.0, max_wave: int = 8):
    """
    Lowest ``count`` flexural frequencies over modes up to ``max_wave``.

    Returns a list of ``(omega, NavierMode)`` sorted by frequency; each
    frequency includes the nonlocal ratio for ``mu``.
    """
    out = []
    for m in range(1, max_wave + 1):
        for n in range(1, max_wave + 1):
            mode = NavierMode(m, n)
            omega = navier_local_fsdt(mode, section, a, b) * nonlocal_ratio(mode, mu, a, b)
            out.append((omega, mode))
    out.sort(key=lambda t: (t[0], t[1].m, t[1].n))
    return out[:count]


def kirchhoff_frequency(mode: NavierMode, D: float, rho_h: float, a: float, b: float) -> float:
    """Classical thin-plate frequency ``(alpha^2 + beta^2) sqrt(D / (rho h))``."""
    return mode.laplacian_eig(a, b) * np.sqrt(D / rho_h)
