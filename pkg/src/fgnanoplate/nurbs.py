"""
Tensor-product NURBS bases and rectangular plate patches.

Basis evaluation works element by element: only the (p+1) functions that are
nonzero on a knot span are ever computed.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateGeometryError,
    DomainError,
    InsufficientControlPointsError,
    KnotVectorError,
    UnsupportedOrderError,
)


@dataclass(frozen=True, eq=False)
class KnotVector:
    """
    Open (clamped) knot vector of a univariate B-spline basis.

    Parameters
    ----------
    knots : array_like
        Non-decreasing parameter values. The first and last values must each
        be repeated exactly ``degree + 1`` times.
    degree : int
        Polynomial degree ``p`` of the basis.
    """

    knots: np.ndarray
    degree: int

    def __post_init__(self):
        knots = np.array(self.knots, dtype=float)
        knots.setflags(write=False)
        object.__setattr__(self, "knots", knots)
        p = self.degree
        if p < 0 or int(p) != p:
            raise KnotVectorError(f"degree must be a non-negative integer, got {p!r}")
        if knots.ndim != 1 or not np.all(np.isfinite(knots)):
            raise KnotVectorError("knots must be a finite 1-D sequence")
        if np.any(np.diff(knots) < 0):
            raise KnotVectorError("knots must be non-decreasing")
        if knots.size - p - 1 < p + 1:
            raise KnotVectorError(
                f"{knots.size} knots cannot support a degree-{p} basis "
                f"(need at least {2 * (p + 1)})"
            )
        lo, hi = knots[0], knots[-1]
        if not hi > lo:
            raise KnotVectorError("knot vector spans an empty interval")
        if np.count_nonzero(knots == lo) != p + 1 or np.count_nonzero(knots == hi) != p + 1:
            raise KnotVectorError(
                f"end knots must be repeated exactly p+1 = {p + 1} times (open knot vector)"
            )

    @classmethod
    def open_uniform(cls, degree: int, n_basis: int) -> "KnotVector":
        """Open knot vector on [0, 1] with uniformly spaced interior knots."""
        n_el = n_basis - degree
        if n_el < 1:
            raise InsufficientControlPointsError(
                f"{n_basis} control points cannot carry a degree-{degree} basis"
            )
        interior = np.arange(1, n_el) / n_el
        knots = np.concatenate([np.zeros(degree + 1), interior, np.ones(degree + 1)])
        return cls(knots, degree)

    @property
    def n_basis(self) -> int:
        return self.knots.size - self.degree - 1

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.knots[0]), float(self.knots[-1])

    def nonzero_spans(self) -> list[int]:
        """Indices ``i`` with ``knots[i] < knots[i+1]`` (the elements)."""
        k = self.knots
        return [i for i in range(self.degree, self.n_basis) if k[i + 1] > k[i]]

    def find_span(self, xi: float) -> int:
        """
        Binary search for the span containing ``xi``.

        ``xi`` equal to the last knot maps to the final nonzero span.
        """
        k = self.knots
        lo, hi = self.domain
        if not (lo <= xi <= hi):
            raise DomainError(f"xi = {xi} outside knot range [{lo}, {hi}]")
        n = self.n_basis - 1
        if xi >= k[n + 1]:
            return n
        return int(np.searchsorted(k, xi, side="right") - 1)

    def greville(self) -> np.ndarray:
        p = self.degree
        if p == 0:
            return 0.5 * (self.knots[:-1] + self.knots[1:])
        return np.array([self.knots[i + 1 : i + p + 1].mean() for i in range(self.n_basis)])


def _check_span(kv: KnotVector, span: int, xi: float) -> None:
    k = kv.knots
    lo, hi = kv.domain
    if not (lo <= xi <= hi):
        raise DomainError(f"xi = {xi} outside knot range [{lo}, {hi}]")
    if not (kv.degree <= span < kv.n_basis) or not k[span + 1] > k[span]:
        raise DomainError(f"span {span} is not a nonzero knot span")
    # the right end of a span is admitted so element boundaries can be evaluated
    if not (k[span] <= xi <= k[span + 1]):
        raise DomainError(f"xi = {xi} not inside span [{k[span]}, {k[span + 1]}]")


def bspline_basis(kv: KnotVector, span: int, xi: float) -> np.ndarray:
    """
    Values of the p+1 B-spline functions ``N_{span-p..span, p}`` at ``xi``.

    Triangular Cox-de Boor scheme, O(p^2).
    """
    _check_span(kv, span, xi)
    k = kv.knots
    p = kv.degree
    N = np.zeros(p + 1)
    left = np.zeros(p + 1)
    right = np.zeros(p + 1)
    N[0] = 1.0
    for j in range(1, p + 1):
        left[j] = xi - k[span + 1 - j]
        right[j] = k[span + j] - xi
        saved = 0.0
        for r in range(j):
            temp = N[r] / (right[r + 1] + left[j - r])
            N[r] = saved + right[r + 1] * temp
            saved = left[j - r] * temp
        N[j] = saved
    return N


def bspline_basis_derivs(kv: KnotVector, span: int, xi: float, k: int) -> np.ndarray:
    """
    Basis values and derivatives up to order ``k`` on one span.

    Returns
    -------
    ndarray, shape (p+1, k+1)
        Column ``j`` holds the ``j``-th derivative of each supported function.
    """
    p = kv.degree
    if k < 0 or k > p:
        raise UnsupportedOrderError(f"derivative order {k} not supported for degree {p}")
    _check_span(kv, span, xi)
    U = kv.knots

    ndu = np.zeros((p + 1, p + 1))
    left = np.zeros(p + 1)
    right = np.zeros(p + 1)
    ndu[0, 0] = 1.0
    for j in range(1, p + 1):
        left[j] = xi - U[span + 1 - j]
        right[j] = U[span + j] - xi
        saved = 0.0
        for r in range(j):
            # lower triangle stores knot differences, upper the basis values
            ndu[j, r] = right[r + 1] + left[j - r]
            temp = ndu[r, j - 1] / ndu[j, r]
            ndu[r, j] = saved + right[r + 1] * temp
            saved = left[j - r] * temp
        ndu[j, j] = saved

    ders = np.zeros((k + 1, p + 1))
    ders[0] = ndu[:, p]
    a = np.zeros((2, p + 1))
    for r in range(p + 1):
        s1, s2 = 0, 1
        a[0, 0] = 1.0
        for kk in range(1, k + 1):
            d = 0.0
            rk, pk = r - kk, p - kk
            if r >= kk:
                a[s2, 0] = a[s1, 0] / ndu[pk + 1, rk]
                d = a[s2, 0] * ndu[rk, pk]
            j1 = 1 if rk >= -1 else -rk
            j2 = kk - 1 if r - 1 <= pk else p - r
            for j in range(j1, j2 + 1):
                a[s2, j] = (a[s1, j] - a[s1, j - 1]) / ndu[pk + 1, rk + j]
                d += a[s2, j] * ndu[rk + j, pk]
            if r <= pk:
                a[s2, kk] = -a[s1, kk - 1] / ndu[pk + 1, r]
                d += a[s2, kk] * ndu[r, pk]
            ders[kk, r] = d
            s1, s2 = s2, s1
    fac = p
    for kk in range(1, k + 1):
        ders[kk] *= fac
        fac *= p - kk
    return ders.T


@dataclass(frozen=True, eq=False)
class Element:
    """One nonzero knot-span rectangle of a patch."""

    span_u: int
    span_v: int
    xi_range: tuple[float, float]
    eta_range: tuple[float, float]
    connectivity: np.ndarray  # global control-point indices, u fastest


@dataclass(frozen=True, eq=False)
class BasisEval:
    """Rational basis data at one parametric point of one element."""

    values: np.ndarray  # (nsf,)
    grad_param: np.ndarray  # (nsf, 2): d/dxi, d/deta
    grad: np.ndarray  # (nsf, 2): d/dx, d/dy
    jacobian: np.ndarray  # [[dx/dxi, dx/deta], [dy/dxi, dy/deta]]
    det_jacobian: float
    point: np.ndarray  # physical (x, y)


@dataclass(frozen=True, eq=False)
class PatchMesh:
    """
    Tensor-product NURBS patch.

    Control point ``(i, j)`` (``i`` along u, ``j`` along v) has global index
    ``j * n_u + i``.
    """

    knot_u: KnotVector
    knot_v: KnotVector
    control_points: np.ndarray  # (n_u * n_v, 2)
    weights: np.ndarray  # (n_u * n_v,)
    elements: tuple[Element, ...] = field(init=False)

    def __post_init__(self):
        cp = np.array(self.control_points, dtype=float)
        w = np.array(self.weights, dtype=float)
        n_u, n_v = self.knot_u.n_basis, self.knot_v.n_basis
        if cp.shape != (n_u * n_v, 2):
            raise InsufficientControlPointsError(
                f"control net shape {cp.shape} does not match basis counts {n_u} x {n_v}"
            )
        if w.shape != (n_u * n_v,):
            raise InsufficientControlPointsError("one weight per control point is required")
        if not np.all(w > 0):
            raise DegenerateGeometryError("weights must be strictly positive")
        cp.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "control_points", cp)
        object.__setattr__(self, "weights", w)

        p, q = self.knot_u.degree, self.knot_v.degree
        ku, kv = self.knot_u.knots, self.knot_v.knots
        elements = []
        for sv in self.knot_v.nonzero_spans():
            for su in self.knot_u.nonzero_spans():
                iu = np.arange(su - p, su + 1)
                jv = np.arange(sv - q, sv + 1)
                conn = (jv[:, None] * n_u + iu[None, :]).ravel()
                conn.setflags(write=False)
                elements.append(
                    Element(
                        su,
                        sv,
                        (float(ku[su]), float(ku[su + 1])),
                        (float(kv[sv]), float(kv[sv + 1])),
                        conn,
                    )
                )
        object.__setattr__(self, "elements", tuple(elements))

    @property
    def shape(self) -> tuple[int, int]:
        return self.knot_u.n_basis, self.knot_v.n_basis

    @property
    def n_control_points(self) -> int:
        return self.control_points.shape[0]

    def boundary_indices(self) -> dict[str, np.ndarray]:
        """Control points on each edge: ``x0``, ``x1`` (u ends) and ``y0``, ``y1`` (v ends)."""
        n_u, n_v = self.shape
        idx = np.arange(n_u * n_v).reshape(n_v, n_u)
        return {"x0": idx[:, 0], "x1": idx[:, -1], "y0": idx[0, :], "y1": idx[-1, :]}

    def locate(self, xi: float, eta: float) -> int:
        """Index of the element containing parametric point ``(xi, eta)``."""
        su = self.knot_u.find_span(xi)
        sv = self.knot_v.find_span(eta)
        for e, el in enumerate(self.elements):
            if el.span_u == su and el.span_v == sv:
                return e
        raise DomainError(f"no element contains ({xi}, {eta})")


def make_patch(a: float, b: float, p: int, n_u: int, n_v: int) -> PatchMesh:
    """
    Rectangular ``[0, a] x [0, b]`` patch with open uniform knots and unit weights.

    Control points sit at the Greville abscissae, which makes the geometry map
    affine (constant jacobian).
    """
    if not (a > 0 and b > 0):
        raise DomainError(f"plate dimensions must be positive, got a={a}, b={b}")
    if p < 1:
        raise UnsupportedOrderError("patches need degree p >= 1")
    for name, n in (("n_u", n_u), ("n_v", n_v)):
        if n < p + 1:
            raise InsufficientControlPointsError(f"{name}={n} < p+1={p + 1}")
    ku = KnotVector.open_uniform(p, n_u)
    kv = KnotVector.open_uniform(p, n_v)
    gx = a * ku.greville()
    gy = b * kv.greville()
    X, Y = np.meshgrid(gx, gy)  # rows follow v, columns follow u
    cp = np.column_stack([X.ravel(), Y.ravel()])
    return PatchMesh(ku, kv, cp, np.ones(n_u * n_v))


def eval_basis(patch: PatchMesh, element: int, xi: float, eta: float) -> BasisEval:
    """Rational basis values and first derivatives at ``(xi, eta)`` on ``element``."""
    el = patch.elements[element]
    for val, (lo, hi), name in ((xi, el.xi_range, "xi"), (eta, el.eta_range, "eta")):
        if not (lo <= val <= hi):
            raise DomainError(f"{name} = {val} outside element range [{lo}, {hi}]")
    du = bspline_basis_derivs(patch.knot_u, el.span_u, xi, 1)
    dv = bspline_basis_derivs(patch.knot_v, el.span_v, eta, 1)

    N = np.outer(dv[:, 0], du[:, 0]).ravel()
    dN_dxi = np.outer(dv[:, 0], du[:, 1]).ravel()
    dN_deta = np.outer(dv[:, 1], du[:, 0]).ravel()

    w = patch.weights[el.connectivity]
    Nw = N * w
    W = Nw.sum()
    dW_dxi = (dN_dxi * w).sum()
    dW_deta = (dN_deta * w).sum()
    R = Nw / W
    dR = np.column_stack(
        [
            w * (dN_dxi * W - N * dW_dxi) / W**2,
            w * (dN_deta * W - N * dW_deta) / W**2,
        ]
    )

    P = patch.control_points[el.connectivity]
    J = P.T @ dR
    det = float(np.linalg.det(J))
    if not det > 0.0:
        raise DegenerateGeometryError(f"non-positive jacobian determinant {det:g} on element {element}")
    grad = np.linalg.solve(J.T, dR.T).T
    return BasisEval(R, dR, grad, J, det, R @ P)


def geometry(patch: PatchMesh, xi: float, eta: float) -> np.ndarray:
    """Physical coordinates of parametric point ``(xi, eta)``."""
    return eval_basis(patch, patch.locate(xi, eta), xi, eta).point


def gauss_points(patch: PatchMesh, n_gauss: int | None = None, elements=None):
    """
    Yield ``(element_index, BasisEval, weight)`` for every quadrature point.

    ``weight`` already includes the parent-to-parametric scaling and the
    geometry jacobian, so it integrates directly over physical area. The
    default rule uses ``max(p, q) + 1`` points per direction. ``elements``
    restricts the loop to a subset of element indices.
    """
    if n_gauss is None:
        n_gauss = max(patch.knot_u.degree, patch.knot_v.degree) + 1
    g, gw = np.polynomial.legendre.leggauss(n_gauss)
    if elements is None:
        elements = range(len(patch.elements))
    for e in elements:
        el = patch.elements[e]
        (u0, u1), (v0, v1) = el.xi_range, el.eta_range
        scale = 0.25 * (u1 - u0) * (v1 - v0)
        for jv in range(n_gauss):
            eta = 0.5 * (v0 + v1) + 0.5 * (v1 - v0) * g[jv]
            for iu in range(n_gauss):
                xi = 0.5 * (u0 + u1) + 0.5 * (u1 - u0) * g[iu]
                be = eval_basis(patch, e, xi, eta)
                yield e, be, gw[iu] * gw[jv] * scale * be.det_jacobian
