"""
Stiffness and mass matrices of the nonlocal FSDT plate.

Each control point carries five unknowns ordered ``(u0, v0, w0, theta_x,
theta_y)``; global dof ``5 * node + field``.

The nonlocal operator ``(1 - mu * lap)`` ends up on the inertia side of the
equations of motion. After integration by parts (boundary term dropped) it
contributes the gradient mass ``mu * int grad(N)^T I grad(N) dA`` on top of
the consistent mass, so ``M = M0 + mu * Mg`` while ``K`` stays local.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
import scipy.sparse as sps

from .errors import AssemblyError, DomainError, OverConstrainedError
from .material import SectionProperties
from .nurbs import BasisEval, PatchMesh, gauss_points

N_FIELDS = 5
FIELDS = ("u0", "v0", "w0", "theta_x", "theta_y")
U0, V0, W0, TX, TY = range(N_FIELDS)

DENSE_DOF_LIMIT = 2000


class BoundaryCondition(str, Enum):
    SSSS = "SSSS"
    CCCC = "CCCC"


# fields fixed on edges x = 0, a and on edges y = 0, b
_EDGE_FIELDS = {
    BoundaryCondition.SSSS: ((U0, W0, TY), (V0, W0, TX)),
    BoundaryCondition.CCCC: (tuple(range(N_FIELDS)), tuple(range(N_FIELDS))),
}


@dataclass(frozen=True)
class NonlocalParams:
    """Nonlocal parameter ``mu = (e0 * a)^2`` in length units squared."""

    mu: float = 0.0

    def __post_init__(self):
        if not self.mu >= 0:
            raise DomainError(f"nonlocal parameter must be >= 0, got {self.mu}")

    @classmethod
    def from_length(cls, e0: float, internal_length: float) -> "NonlocalParams":
        return cls((e0 * internal_length) ** 2)


@dataclass(frozen=True, eq=False)
class DofMap:
    n_nodes: int
    constrained: np.ndarray

    def __post_init__(self):
        c = np.unique(np.asarray(self.constrained, dtype=int))
        if c.size and (c[0] < 0 or c[-1] >= self.n_dofs):
            raise AssemblyError("constrained dof index out of range")
        c.setflags(write=False)
        object.__setattr__(self, "constrained", c)

    @property
    def n_dofs(self) -> int:
        return N_FIELDS * self.n_nodes

    @property
    def free(self) -> np.ndarray:
        mask = np.ones(self.n_dofs, dtype=bool)
        mask[self.constrained] = False
        return np.flatnonzero(mask)

    @staticmethod
    def dof(node, field):
        return N_FIELDS * np.asarray(node) + field

    def expand(self, reduced: np.ndarray) -> np.ndarray:
        """Scatter free-dof vectors (or column stacks) back to full length, zeros at constraints."""
        reduced = np.asarray(reduced)
        full = np.zeros((self.n_dofs,) + reduced.shape[1:], dtype=reduced.dtype)
        full[self.free] = reduced
        return full


@dataclass(frozen=True, eq=False)
class GlobalSystem:
    """
    Assembled plate matrices.

    ``K`` and ``M`` are over the free dofs of ``dof_map`` (all dofs before
    :func:`apply_bcs`). ``M0`` and ``Mg`` are kept so that other nonlocal
    parameters can be applied without reassembly.
    """

    K: np.ndarray | sps.csr_matrix
    M0: np.ndarray | sps.csr_matrix
    Mg: np.ndarray | sps.csr_matrix
    mu: float
    dof_map: DofMap
    patch: PatchMesh
    section: SectionProperties
    bc: BoundaryCondition | None = None

    @property
    def M(self):
        return self.M0 + self.mu * self.Mg

    @property
    def n_free(self) -> int:
        return self.K.shape[0]

    def with_mu(self, mu: float) -> "GlobalSystem":
        return replace(self, mu=NonlocalParams(mu).mu)


def field_operator(basis: BasisEval) -> np.ndarray:
    """5 x 5nsf matrix interpolating the five fields from nodal dofs."""
    nsf = basis.values.size
    Nm = np.zeros((N_FIELDS, N_FIELDS * nsf))
    for f in range(N_FIELDS):
        Nm[f, f::N_FIELDS] = basis.values
    return Nm


def strain_operators(basis: BasisEval):
    """
    Strain-displacement matrices at one quadrature point.

    Returns
    -------
    Bp : (3, 5nsf)
        membrane strains ``(u0,x, v0,y, u0,y + v0,x)``
    Bb : (3, 5nsf)
        curvatures ``(tx,x, ty,y, tx,y + ty,x)``
    Bs : (2, 5nsf)
        shear strains ``(tx + w0,x, ty + w0,y)``
    Bg : (10, 5nsf)
        ``d/dx`` and ``d/dy`` of every field, rows ``2 * field + {0, 1}``
    """
    R = basis.values
    dx = basis.grad[:, 0]
    dy = basis.grad[:, 1]
    nsf = R.size
    n = N_FIELDS * nsf
    Bp = np.zeros((3, n))
    Bb = np.zeros((3, n))
    Bs = np.zeros((2, n))
    Bg = np.zeros((2 * N_FIELDS, n))

    Bp[0, U0::5] = dx
    Bp[1, V0::5] = dy
    Bp[2, U0::5] = dy
    Bp[2, V0::5] = dx

    Bb[0, TX::5] = dx
    Bb[1, TY::5] = dy
    Bb[2, TX::5] = dy
    Bb[2, TY::5] = dx

    Bs[0, TX::5] = R
    Bs[0, W0::5] = dx
    Bs[1, TY::5] = R
    Bs[1, W0::5] = dy

    for f in range(N_FIELDS):
        Bg[2 * f, f::5] = dx
        Bg[2 * f + 1, f::5] = dy
    return Bp, Bb, Bs, Bg


def _element_parts(patch: PatchMesh, section: SectionProperties, n_gauss=None, elements=None):
    """Yield ``(element, Ke, M0e, Mge)`` for every element of ``patch``."""
    C = section.constitutive
    I5 = section.inertia
    current = None
    for e, be, w in gauss_points(patch, n_gauss, elements):
        if e != current:
            if current is not None:
                yield current, Ke, np.kron(m0, I5), np.kron(mg, I5)
            nsf = be.values.size
            Ke = np.zeros((N_FIELDS * nsf, N_FIELDS * nsf))
            m0 = np.zeros((nsf, nsf))
            mg = np.zeros((nsf, nsf))
            current = e
        if not w > 0:
            raise AssemblyError(f"non-positive integration weight on element {e}")
        Bp, Bb, Bs, _ = strain_operators(be)
        Bk = np.vstack([Bp, Bb, Bs])
        Ke += w * (Bk.T @ C @ Bk)
        m0 += w * np.outer(be.values, be.values)
        mg += w * (be.grad @ be.grad.T)
    if current is not None:
        yield current, Ke, np.kron(m0, I5), np.kron(mg, I5)


def element_matrices(
    patch: PatchMesh,
    element: int,
    section: SectionProperties,
    nl: NonlocalParams,
    n_gauss: int | None = None,
):
    """
    Element stiffness and (nonlocal) mass matrices.

    ``Me = int N^T I N dA + mu * int Bg^T I~ Bg dA`` where ``I`` carries I11
    on translations, I22 on rotations and I12 on the ``u0/theta_x`` and
    ``v0/theta_y`` couplings. Uses ``(p+1)^2`` Gauss points by default.
    """
    if not 0 <= element < len(patch.elements):
        raise DomainError(f"element index {element} out of range")
    for _, Ke, M0e, Mge in _element_parts(patch, section, n_gauss, [element]):
        return Ke, M0e + nl.mu * Mge
    raise AssemblyError("element produced no quadrature points")  # pragma: no cover


def _scatter(n_dofs: int, blocks, dense: bool):
    if dense:
        out = np.zeros((n_dofs, n_dofs))
        for dofs, mat in blocks:
            out[np.ix_(dofs, dofs)] += mat
        return out
    rows, cols, vals = [], [], []
    for dofs, mat in blocks:
        r, c = np.meshgrid(dofs, dofs, indexing="ij")
        rows.append(r.ravel())
        cols.append(c.ravel())
        vals.append(mat.ravel())
    return sps.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_dofs, n_dofs),
    ).tocsr()


def element_dofs(patch: PatchMesh, element: int) -> np.ndarray:
    conn = patch.elements[element].connectivity
    return (N_FIELDS * conn[:, None] + np.arange(N_FIELDS)[None, :]).ravel()


def assemble(
    patch: PatchMesh,
    section: SectionProperties,
    nl: NonlocalParams = NonlocalParams(),
    n_gauss: int | None = None,
    dense: bool | None = None,
) -> GlobalSystem:
    """Scatter-add element matrices into the unconstrained global system."""
    n_dofs = N_FIELDS * patch.n_control_points
    if dense is None:
        dense = n_dofs < DENSE_DOF_LIMIT
    Kb, M0b, Mgb = [], [], []
    for e, Ke, M0e, Mge in _element_parts(patch, section, n_gauss):
        dofs = element_dofs(patch, e)
        if dofs.size != Ke.shape[0]:
            raise AssemblyError(f"element {e}: connectivity does not match element matrix size")
        Kb.append((dofs, Ke))
        M0b.append((dofs, M0e))
        Mgb.append((dofs, Mge))
    return GlobalSystem(
        K=_scatter(n_dofs, Kb, dense),
        M0=_scatter(n_dofs, M0b, dense),
        Mg=_scatter(n_dofs, Mgb, dense),
        mu=nl.mu,
        dof_map=DofMap(patch.n_control_points, np.array([], dtype=int)),
        patch=patch,
        section=section,
    )


def constrained_dofs(patch: PatchMesh, bc: BoundaryCondition | str) -> np.ndarray:
    bc = BoundaryCondition(bc)
    on_x, on_y = _EDGE_FIELDS[bc]
    edges = patch.boundary_indices()
    dofs = []
    for edge, fields in (("x0", on_x), ("x1", on_x), ("y0", on_y), ("y1", on_y)):
        for f in fields:
            dofs.append(DofMap.dof(edges[edge], f))
    return np.unique(np.concatenate(dofs))


def _restrict(mat, keep):
    if sps.issparse(mat):
        return mat[keep][:, keep].tocsr()
    return mat[np.ix_(keep, keep)]


def apply_bcs(system: GlobalSystem, bc: BoundaryCondition | str) -> GlobalSystem:
    """Eliminate rows and columns of the dofs fixed by ``bc``."""
    if system.bc is not None:
        raise AssemblyError("boundary conditions already applied")
    bc = BoundaryCondition(bc)
    dof_map = DofMap(system.patch.n_control_points, constrained_dofs(system.patch, bc))
    keep = dof_map.free
    if keep.size == 0:
        raise OverConstrainedError("boundary conditions leave no free dofs")
    return replace(
        system,
        K=_restrict(system.K, keep),
        M0=_restrict(system.M0, keep),
        Mg=_restrict(system.Mg, keep),
        dof_map=dof_map,
        bc=bc,
    )
