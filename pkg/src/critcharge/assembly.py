"""
Galerkin assembly of Hamiltonian/overlap pairs.

Radial one-particle problems use the measure r^2 dr with the 4*pi absorbed
into the orbital (normalization int psi^2 r^2 dr = 1). The three-variable
problem uses r1^2 r2^2 dr1 dr2 du with u = cos(theta12); separable terms are
Kronecker products of axis matrices and only 1/r12 is integrated element by
element.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Union

import numpy as np
from scipy import sparse

from .errors import InvalidArgumentError
from .mesh_basis import (
    AxisMesh,
    RadialMesh,
    ShapeSet,
    TensorMesh3,
    element_quadrature,
    gauss_rule,
)

logger = logging.getLogger(__name__)

RadialFunction = Callable[[np.ndarray], np.ndarray]

NORMALIZATION_WARN_TOL = 1e-6


@dataclass(frozen=True)
class DofMap:
    """Node-major dof numbering: value (and derivative for C1) per node."""

    mesh: AxisMesh
    shapes: ShapeSet

    @property
    def n_full(self) -> int:
        return self.mesh.n_nodes * self.shapes.dofs_per_node

    @property
    def element_dofs(self) -> np.ndarray:
        dpn = self.shapes.dofs_per_node
        left = np.arange(self.mesh.n_elements)[:, None] * dpn + np.arange(dpn)[None, :]
        return np.concatenate([left, left + dpn], axis=1)

    @property
    def boundary_value_dof(self) -> int:
        """Value dof of the last node (psi(r_cut) = 0)."""
        return (self.mesh.n_nodes - 1) * self.shapes.dofs_per_node

    def free_dofs(self, dirichlet: bool = True) -> np.ndarray:
        keep = np.ones(self.n_full, dtype=bool)
        if dirichlet:
            keep[self.boundary_value_dof] = False
        return np.flatnonzero(keep)


@dataclass(frozen=True)
class AxisTables:
    points: np.ndarray
    weights: np.ndarray
    values: np.ndarray
    derivatives: np.ndarray
    dofs: np.ndarray
    n_full: int


def axis_tables(mesh: AxisMesh, shapes: ShapeSet) -> AxisTables:
    points, weights = element_quadrature(mesh)
    x, _ = gauss_rule().reference()
    values, derivatives = shapes.evaluate(x[None, :], mesh.widths[:, None])
    dof_map = DofMap(mesh, shapes)
    return AxisTables(points, weights, values, derivatives, dof_map.element_dofs, dof_map.n_full)


def axis_matrix(
    tables: AxisTables, weight: np.ndarray, derivative: bool = False
) -> sparse.csr_matrix:
    """int N_i N_j weight dx (or N_i' N_j') over the full axis, no boundary deletion."""
    basis = tables.derivatives if derivative else tables.values
    local = np.einsum("eq,eqa,eqb->eab", tables.weights * weight, basis, basis)
    rows = np.broadcast_to(tables.dofs[:, :, None], local.shape)
    cols = np.broadcast_to(tables.dofs[:, None, :], local.shape)
    matrix = sparse.coo_matrix(
        (local.ravel(), (rows.ravel(), cols.ravel())), shape=(tables.n_full, tables.n_full)
    )
    return matrix.tocsr()


@dataclass(frozen=True, eq=False)
class OperatorPair:
    """Symmetric H and SPD S in the nodal basis, plus named single-term matrices."""

    H: sparse.csr_matrix
    S: sparse.csr_matrix
    terms: Mapping[str, sparse.csr_matrix] = field(default_factory=dict)
    free_dofs: Optional[np.ndarray] = None
    n_full: Optional[int] = None

    def __post_init__(self):
        if self.H.shape != self.S.shape or self.H.shape[0] != self.H.shape[1]:
            raise InvalidArgumentError(
                f"H {self.H.shape} and S {self.S.shape} must be square and equal in size"
            )

    @classmethod
    def from_dense(cls, H, S) -> "OperatorPair":
        return cls(sparse.csr_matrix(np.asarray(H, dtype=float)), sparse.csr_matrix(np.asarray(S, dtype=float)))

    @property
    def n_dof(self) -> int:
        return self.H.shape[0]

    @property
    def bandwidth(self) -> int:
        coo = sparse.coo_matrix(self.H + self.S)
        if coo.nnz == 0:
            return 0
        return int(np.max(np.abs(coo.row - coo.col)))

    def is_symmetric(self, rtol: float = 1e-12) -> bool:
        for matrix in (self.H, self.S):
            scale = max(abs(matrix).max(), 1.0)
            if abs(matrix - matrix.T).max() > rtol * scale:
                return False
        return True

    def expand(self, coeffs: np.ndarray) -> np.ndarray:
        """Reduced coefficient vector back onto all dofs (deleted dofs = 0)."""
        if self.free_dofs is None:
            return np.asarray(coeffs, dtype=float)
        full = np.zeros(self.n_full)
        full[self.free_dofs] = coeffs
        return full


def _restrict(matrix: sparse.spmatrix, keep: np.ndarray) -> sparse.csr_matrix:
    return sparse.csr_matrix(matrix)[keep][:, keep]


def _check_radial(mesh, shapes) -> None:
    if not isinstance(mesh, RadialMesh):
        raise InvalidArgumentError(f"expected a RadialMesh, got {type(mesh).__name__}")
    if not isinstance(shapes, ShapeSet):
        raise InvalidArgumentError(f"expected a ShapeSet, got {type(shapes).__name__}")


def _sample(fn: Union[RadialFunction, float, None], points: np.ndarray) -> np.ndarray:
    if fn is None:
        return np.zeros_like(points)
    if callable(fn):
        values = np.asarray(fn(points), dtype=float)
        return np.broadcast_to(values, points.shape)
    return np.full_like(points, float(fn))


def assemble_radial_term(
    mesh: RadialMesh,
    shapes: ShapeSet,
    weight: Union[RadialFunction, float],
    dirichlet: bool = True,
    derivative: bool = False,
) -> sparse.csr_matrix:
    """int N_i N_j weight(r) r^2 dr, e.g. weight = 1/r gives the <1/r> matrix."""
    _check_radial(mesh, shapes)
    tables = axis_tables(mesh, shapes)
    r = tables.points
    matrix = axis_matrix(tables, _sample(weight, r) * r * r, derivative=derivative)
    return _restrict(matrix, DofMap(mesh, shapes).free_dofs(dirichlet))


def assemble_radial(
    mesh: RadialMesh,
    shapes: ShapeSet,
    potential: Union[RadialFunction, float, None],
    dirichlet: bool = True,
) -> OperatorPair:
    _check_radial(mesh, shapes)
    tables = axis_tables(mesh, shapes)
    r = tables.points
    r2 = r * r
    potential_values = _sample(potential, r)
    if not np.all(np.isfinite(potential_values)):
        raise InvalidArgumentError("potential is not finite at every quadrature point")

    kinetic = 0.5 * axis_matrix(tables, r2, derivative=True)
    potential_matrix = axis_matrix(tables, potential_values * r2)
    overlap = axis_matrix(tables, r2)

    dof_map = DofMap(mesh, shapes)
    keep = dof_map.free_dofs(dirichlet)
    kinetic = _restrict(kinetic, keep)
    potential_matrix = _restrict(potential_matrix, keep)
    inverse_r = _restrict(axis_matrix(tables, r), keep)
    return OperatorPair(
        H=(kinetic + potential_matrix).tocsr(),
        S=_restrict(overlap, keep),
        terms={"kinetic": kinetic, "potential": potential_matrix, "inverse_r": inverse_r},
        free_dofs=keep,
        n_full=dof_map.n_full,
    )


class NodalFunction:
    """Finite-element interpolant of a full coefficient vector on a radial mesh."""

    def __init__(self, mesh: AxisMesh, shapes: ShapeSet, coeffs: np.ndarray):
        self.mesh = mesh
        self.shapes = shapes
        self.coeffs = np.asarray(coeffs, dtype=float)
        self._dofs = DofMap(mesh, shapes).element_dofs
        if self.coeffs.size != DofMap(mesh, shapes).n_full:
            raise InvalidArgumentError(
                f"{self.coeffs.size} coefficients for {DofMap(mesh, shapes).n_full} dofs"
            )

    def _locate(self, r: np.ndarray):
        nodes = self.mesh.nodes
        element = np.clip(np.searchsorted(nodes, r, side="right") - 1, 0, self.mesh.n_elements - 1)
        h = self.mesh.widths[element]
        x = np.clip((r - nodes[element]) / h, 0.0, 1.0)
        values, derivatives = self.shapes.evaluate(x, h)
        local = self.coeffs[self._dofs[element]]
        outside = (r < nodes[0]) | (r > nodes[-1])
        return values, derivatives, local, outside

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        values, _, local, outside = self._locate(r)
        return np.where(outside, 0.0, np.sum(values * local, axis=-1))

    def derivative(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        _, derivatives, local, outside = self._locate(r)
        return np.where(outside, 0.0, np.sum(derivatives * local, axis=-1))


class HartreePotential:
    """Spherical Hartree potential of a density on a radial mesh.

    V_H(r) = (1/r) int_0^r rho 4 pi r'^2 dr' + int_r^rcut rho 4 pi r' dr'

    Whole elements are integrated once with the 10-point rule and kept as
    prefix sums; the partial element containing r gets the same rule mapped
    onto [r_left, r].
    """

    def __init__(self, density: RadialFunction, mesh: RadialMesh):
        self.density = density
        self.mesh = mesh
        self._x, self._w = gauss_rule().reference()
        r, w = element_quadrature(mesh)
        rho = _sample(density, r)
        inner = np.sum(w * rho * 4.0 * np.pi * r * r, axis=1)
        outer = np.sum(w * rho * 4.0 * np.pi * r, axis=1)
        self._inner_before = np.concatenate(([0.0], np.cumsum(inner)))
        self._outer_from = np.concatenate((np.cumsum(outer[::-1])[::-1], [0.0]))
        self.charge = float(self._inner_before[-1])

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        flat = np.atleast_1d(r).ravel()
        nodes = self.mesh.nodes
        element = np.clip(np.searchsorted(nodes, flat, side="right") - 1, 0, self.mesh.n_elements - 1)
        left = nodes[element]
        span = np.clip(flat, left, nodes[element + 1]) - left
        t = left[:, None] + span[:, None] * self._x[None, :]
        wt = span[:, None] * self._w[None, :]
        rho = _sample(self.density, t)
        partial_inner = np.sum(wt * rho * 4.0 * np.pi * t * t, axis=1)
        partial_outer = np.sum(wt * rho * 4.0 * np.pi * t, axis=1)
        inner = self._inner_before[element] + partial_inner
        outer = self._outer_from[element] - partial_outer
        with np.errstate(divide="ignore", invalid="ignore"):
            values = np.where(flat > 0.0, inner / flat, 0.0) + outer
        values = np.where(flat > nodes[-1], self.charge / np.maximum(flat, nodes[-1]), values)
        return values.reshape(r.shape)


def hartree_potential(
    orbital_density: RadialFunction,
    mesh: RadialMesh,
    expected_charge: Optional[float] = None,
) -> HartreePotential:
    if not isinstance(mesh, RadialMesh):
        raise InvalidArgumentError(f"expected a RadialMesh, got {type(mesh).__name__}")
    potential = HartreePotential(orbital_density, mesh)
    if expected_charge is not None and abs(potential.charge - expected_charge) > NORMALIZATION_WARN_TOL:
        logger.warning(
            "Density integrates to %.9f electrons, expected %.9f", potential.charge, expected_charge
        )
    return potential


def expectation(matrix, coeffs, overlap=None) -> float:
    """coeffs^T M coeffs; with `overlap` the S-normalization is checked first."""
    coeffs = np.asarray(coeffs, dtype=float)
    if matrix.shape[0] != coeffs.size or matrix.shape[1] != coeffs.size:
        raise InvalidArgumentError(
            f"matrix {matrix.shape} does not match coefficient vector of length {coeffs.size}"
        )
    if overlap is not None:
        norm = float(coeffs @ (overlap @ coeffs))
        if abs(norm - 1.0) > 1e-10:
            raise InvalidArgumentError(f"coefficients are not S-normalized (norm {norm:.12f})")
    return float(coeffs @ (matrix @ coeffs))


def _tensor_keep(tables: tuple[AxisTables, AxisTables, AxisTables], maps: tuple[DofMap, DofMap]) -> np.ndarray:
    keep1 = np.zeros(tables[0].n_full, dtype=bool)
    keep1[maps[0].free_dofs()] = True
    keep2 = np.zeros(tables[1].n_full, dtype=bool)
    keep2[maps[1].free_dofs()] = True
    keep_u = np.ones(tables[2].n_full, dtype=bool)
    mask = keep1[:, None, None] & keep2[None, :, None] & keep_u[None, None, :]
    return np.flatnonzero(mask.ravel())


def _kron3(a, b, c) -> sparse.csr_matrix:
    return sparse.kron(a, sparse.kron(b, c, format="csr"), format="csr")


def repulsion_matrix(t1: AxisTables, t2: AxisTables, tu: AxisTables) -> sparse.csr_matrix:
    """int Phi_a Phi_b r1^2 r2^2 / r12 over every element of the tensor mesh."""
    n_local = t1.values.shape[-1]
    pairs = n_local * n_local
    n2, nu = t2.n_full, tu.n_full
    size = t1.n_full * n2 * nu

    p2 = np.einsum("jq,jqa,jqb->jqab", t2.weights * t2.points**2, t2.values, t2.values)
    p2 = p2.reshape(p2.shape[0], p2.shape[1], pairs)
    pu = np.einsum("kq,kqa,kqb->kqab", tu.weights, tu.values, tu.values)
    pu = pu.reshape(pu.shape[0], pu.shape[1], pairs)

    a_idx, b_idx = np.divmod(np.arange(pairs), n_local)
    r2 = t2.points[:, :, None, None]
    u = tu.points[None, None, :, :]

    data, all_rows, all_cols = [], [], []
    for i in range(t1.points.shape[0]):
        r1 = t1.points[i][:, None, None, None, None]
        kernel = 1.0 / np.sqrt(r1**2 + r2[None] ** 2 - 2.0 * r1 * r2[None] * u[None])
        p1 = np.einsum("q,qa,qb->qab", t1.weights[i] * t1.points[i] ** 2, t1.values[i], t1.values[i])
        p1 = p1.reshape(-1, pairs)
        local = np.einsum("qp,qjskt,jsm,ktn->jkpmn", p1, kernel, p2, pu, optimize=True)

        g1 = t1.dofs[i]
        row1, col1 = g1[a_idx], g1[b_idx]
        row2, col2 = t2.dofs[:, a_idx], t2.dofs[:, b_idx]
        row_u, col_u = tu.dofs[:, a_idx], tu.dofs[:, b_idx]
        rows = (
            (row1[None, None, :, None, None] * n2 + row2[:, None, None, :, None]) * nu
            + row_u[None, :, None, None, :]
        )
        cols = (
            (col1[None, None, :, None, None] * n2 + col2[:, None, None, :, None]) * nu
            + col_u[None, :, None, None, :]
        )
        rows, cols = np.broadcast_arrays(rows, cols)
        data.append(local.ravel())
        all_rows.append(rows.ravel())
        all_cols.append(cols.ravel())
    matrix = sparse.coo_matrix(
        (np.concatenate(data), (np.concatenate(all_rows), np.concatenate(all_cols))),
        shape=(size, size),
    ).tocsr()
    return (0.5 * (matrix + matrix.T)).tocsr()


def assemble_tensor_pair(
    mesh: TensorMesh3,
    shapes: ShapeSet,
    nuclear: float,
    repulsion: float,
    interaction: bool = True,
) -> OperatorPair:
    """H = T - nuclear * (1/r1 + 1/r2) + repulsion * 1/r12 on the tensor mesh."""
    if not isinstance(mesh, TensorMesh3):
        raise InvalidArgumentError(f"expected a TensorMesh3, got {type(mesh).__name__}")
    if not isinstance(shapes, ShapeSet):
        raise InvalidArgumentError(f"expected a ShapeSet, got {type(shapes).__name__}")
    t1 = axis_tables(mesh.axis_r1, shapes)
    t2 = axis_tables(mesh.axis_r2, shapes)
    tu = axis_tables(mesh.axis_u, shapes)

    def radial(t: AxisTables, power: int, derivative: bool = False):
        return axis_matrix(t, t.points**power, derivative=derivative)

    m1_r2, m2_r2 = radial(t1, 2), radial(t2, 2)
    m1_r1, m2_r1 = radial(t1, 1), radial(t2, 1)
    m1_r0, m2_r0 = radial(t1, 0), radial(t2, 0)
    k1, k2 = radial(t1, 2, True), radial(t2, 2, True)
    mu = axis_matrix(tu, np.ones_like(tu.points))
    ku = axis_matrix(tu, 1.0 - tu.points**2, derivative=True)

    overlap = _kron3(m1_r2, m2_r2, mu)
    kinetic = 0.5 * (
        _kron3(k1, m2_r2, mu)
        + _kron3(m1_r2, k2, mu)
        + _kron3(m1_r0, m2_r2, ku)
        + _kron3(m1_r2, m2_r0, ku)
    )
    inverse_r = _kron3(m1_r1, m2_r2, mu) + _kron3(m1_r2, m2_r1, mu)

    keep = _tensor_keep((t1, t2, tu), (DofMap(mesh.axis_r1, shapes), DofMap(mesh.axis_r2, shapes)))
    terms = {
        "kinetic": _restrict(kinetic, keep),
        "nuclear": _restrict(inverse_r, keep),
        "repulsion": _restrict(repulsion_matrix(t1, t2, tu), keep),
    }
    hamiltonian = terms["kinetic"] - nuclear * terms["nuclear"]
    if interaction:
        hamiltonian = hamiltonian + repulsion * terms["repulsion"]
    logger.debug(
        "Assembled tensor pair: %d elements, %d dofs, nnz(H)=%d",
        mesh.n_elements,
        keep.size,
        hamiltonian.nnz,
    )
    return OperatorPair(
        H=hamiltonian.tocsr(),
        S=_restrict(overlap, keep),
        terms=terms,
        free_dofs=keep,
        n_full=t1.n_full * t2.n_full * tu.n_full,
    )


def assemble_exact3d(
    mesh: TensorMesh3,
    shapes: ShapeSet,
    z_charge: float,
    form: str = "direct",
    interaction: bool = True,
) -> OperatorPair:
    """Direct form: coupling Z on the nuclear term. Scaled form: lambda = 1/Z on 1/r12."""
    if not z_charge > 0.0:
        raise InvalidArgumentError(f"z_charge must be positive, got {z_charge}")
    if form == "direct":
        return assemble_tensor_pair(mesh, shapes, z_charge, 1.0, interaction)
    if form == "scaled":
        return assemble_tensor_pair(mesh, shapes, 1.0, 1.0 / z_charge, interaction)
    raise InvalidArgumentError(f"unknown form {form!r}; expected 'direct' or 'scaled'")
