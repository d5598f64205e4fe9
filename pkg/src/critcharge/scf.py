"""
Closed-shell self-consistent field for two electrons in one spatial orbital.

Conventions: the radial orbital absorbs sqrt(4 pi), so int psi^2 r^2 dr = 1
and the total density is rho = 2 psi^2 / (4 pi).

Both correlation terms take the Wigner radius from the radial pair density
2 psi^2, i.e. r_s = (3 / (4 pi * 4 pi rho))^(1/3).

Methods:
  hf         V_eff = -Z/r + V_H[rho]/2 (exchange cancels the self-Hartree half)
  hf_wigner  hf plus E_c = <psi|V_c|psi>; the operator carries dE_c/d(psi^2)
  lda        V_eff = -Z/r + V_H[rho] + V_x + V_c (Kohn-Sham)
"""

from __future__ import annotations

import enum
import logging
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .assembly import (
    AxisTables,
    NodalFunction,
    OperatorPair,
    assemble_radial,
    axis_tables,
    hartree_potential,
)
from .config import CONSTANTS
from .eigen import solve_banded
from .errors import InvalidArgumentError, ScfConvergenceError
from .mesh_basis import RadialMesh, ShapeSet

logger = logging.getLogger(__name__)


class ScfMethod(str, enum.Enum):
    HF = "hf"
    HF_WIGNER = "hf_wigner"
    LDA = "lda"


class ThresholdMode(str, enum.Enum):
    ANALYTIC = "analytic"
    NUMERIC = "numeric"


@dataclass(frozen=True)
class ScfConfig:
    method: ScfMethod = ScfMethod.HF
    mixing: float = CONSTANTS["SCF_MIXING"]
    energy_tol: float = CONSTANTS["SCF_ENERGY_TOL"]
    density_tol: float = CONSTANTS["SCF_DENSITY_TOL"]
    max_iter: int = CONSTANTS["SCF_MAX_ITER"]
    one_electron_energy: ThresholdMode = ThresholdMode.ANALYTIC
    interaction: bool = True

    def __post_init__(self):
        try:
            object.__setattr__(self, "method", ScfMethod(self.method))
            object.__setattr__(
                self, "one_electron_energy", ThresholdMode(self.one_electron_energy)
            )
        except ValueError as exc:
            raise InvalidArgumentError(str(exc)) from exc
        if not 0.0 < self.mixing <= 1.0:
            raise InvalidArgumentError(f"mixing must lie in (0, 1], got {self.mixing}")
        if not (self.energy_tol > 0.0 and self.density_tol > 0.0):
            raise InvalidArgumentError("SCF tolerances must be positive")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise InvalidArgumentError(f"max_iter must be a positive integer, got {self.max_iter}")

    def describe(self) -> dict:
        return {
            "method": self.method.value,
            "mixing": self.mixing,
            "energy_tol": self.energy_tol,
            "density_tol": self.density_tol,
            "max_iter": self.max_iter,
            "one_electron_energy": self.one_electron_energy.value,
            "interaction": self.interaction,
        }


@dataclass(frozen=True)
class EnergyBreakdown:
    E_tot: float
    E_kin: float
    E_en: float
    E_H: float
    E_x: float
    E_c: float
    epsilon: float

    @classmethod
    def from_components(cls, E_kin, E_en, E_H, E_x, E_c, epsilon) -> "EnergyBreakdown":
        return cls(E_kin + E_en + E_H + E_x + E_c, E_kin, E_en, E_H, E_x, E_c, epsilon)

    def as_dict(self) -> dict:
        return {key: float(value) for key, value in asdict(self).items()}


@dataclass(frozen=True, eq=False)
class ScfResult:
    method: ScfMethod
    z: float
    mesh: RadialMesh
    shapes: ShapeSet
    coefficients: np.ndarray
    breakdown: EnergyBreakdown
    iterations: int
    converged: bool
    mean_radius: float
    unbound: bool = False
    extra: dict = field(default_factory=dict)

    @property
    def orbital(self) -> NodalFunction:
        return NodalFunction(self.mesh, self.shapes, self.coefficients)

    def density(self, r) -> np.ndarray:
        return 2.0 * self.orbital(r) ** 2 / (4.0 * np.pi)

    @property
    def potential_derivative(self) -> float:
        """<dH/dZ> = <-1/r1 - 1/r2> at the converged state."""
        return self.breakdown.E_en / self.z

    def to_payload(self) -> dict:
        return {
            "method": self.method.value,
            "z": self.z,
            "coefficients": [float(c) for c in self.coefficients],
            "breakdown": self.breakdown.as_dict(),
            "iterations": self.iterations,
            "converged": self.converged,
            "mean_radius": self.mean_radius,
            "unbound": self.unbound,
            "extra": dict(self.extra),
        }

    @classmethod
    def from_payload(cls, payload: dict, mesh: RadialMesh, shapes: ShapeSet) -> "ScfResult":
        return cls(
            method=ScfMethod(payload["method"]),
            z=payload["z"],
            mesh=mesh,
            shapes=shapes,
            coefficients=np.asarray(payload["coefficients"], dtype=float),
            breakdown=EnergyBreakdown(**payload["breakdown"]),
            iterations=payload["iterations"],
            converged=payload["converged"],
            mean_radius=payload["mean_radius"],
            unbound=payload["unbound"],
            extra=dict(payload.get("extra", {})),
        )


def wigner_correlation_potential(r_s):
    r_s = np.asarray(r_s, dtype=float)
    if np.any(r_s < 0.0):
        raise InvalidArgumentError("r_s must be non-negative")
    value = -CONSTANTS["WIGNER_A"] / (CONSTANTS["WIGNER_B"] + r_s)
    return float(value) if value.ndim == 0 else value


def _wigner_radius(rho: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.where(rho > 0.0, np.cbrt(3.0 / (4.0 * np.pi * np.where(rho > 0.0, rho, 1.0))), np.inf)


def _wigner_energy_density(rho: np.ndarray) -> np.ndarray:
    """Correlation energy per electron, -a / (b + r_s)."""
    r_s = _wigner_radius(rho)
    return np.where(np.isinf(r_s), 0.0, -CONSTANTS["WIGNER_A"] / (CONSTANTS["WIGNER_B"] + r_s))


def _pair_density(psi: np.ndarray) -> np.ndarray:
    """Density the correlation terms see: 2 psi^2 = 4 pi rho."""
    return 2.0 * psi * psi


def lda_potentials(rho):
    """(V_x, V_c) for the local exchange and Wigner correlation functionals."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0.0):
        raise InvalidArgumentError("density must be non-negative")
    a, b = CONSTANTS["WIGNER_A"], CONSTANTS["WIGNER_B"]
    v_x = -np.cbrt(3.0 * rho / np.pi)
    r_s = _wigner_radius(rho)
    finite = np.isfinite(r_s)
    r_s_safe = np.where(finite, r_s, 0.0)
    v_c = np.where(
        finite,
        -a / (b + r_s_safe) - a * r_s_safe / (3.0 * (b + r_s_safe) ** 2),
        0.0,
    )
    if rho.ndim == 0:
        return float(v_x), float(v_c)
    return v_x, v_c


def _lda_exchange_energy_density(rho: np.ndarray) -> np.ndarray:
    """Exchange energy per electron, -(3/4) (3/pi)^(1/3) rho^(1/3)."""
    return -0.75 * np.cbrt(3.0 * rho / np.pi)


class _OrbitalGrid:
    """Orbital values on the element quadrature points of one mesh."""

    def __init__(self, mesh: RadialMesh, shapes: ShapeSet, pair: OperatorPair):
        self.mesh = mesh
        self.shapes = shapes
        self.pair = pair
        self.tables: AxisTables = axis_tables(mesh, shapes)
        self.r = self.tables.points
        self.w = self.tables.weights

    def values(self, coeffs: np.ndarray) -> np.ndarray:
        full = self.pair.expand(coeffs)
        return np.einsum("eql,el->eq", self.tables.values, full[self.tables.dofs])

    def function(self, coeffs: np.ndarray) -> NodalFunction:
        return NodalFunction(self.mesh, self.shapes, self.pair.expand(coeffs))

    def integrate(self, integrand: np.ndarray) -> float:
        """int integrand r^2 dr."""
        return float(np.sum(self.w * integrand * self.r * self.r))


def _normalize(coeffs: np.ndarray, overlap) -> np.ndarray:
    return coeffs / np.sqrt(coeffs @ (overlap @ coeffs))


def _hydrogenic_guess(z: float, mesh: RadialMesh, shapes: ShapeSet, pair: OperatorPair) -> np.ndarray:
    nodes = mesh.nodes
    values = np.exp(-z * nodes)
    if shapes.dofs_per_node == 1:
        full = values
    else:
        full = np.column_stack([values, -z * values]).ravel()
    return _normalize(full[pair.free_dofs], pair.S)


class _MeanField:
    """Effective potential and energy functional of one method at fixed Z."""

    def __init__(self, method: ScfMethod, z: float, grid: _OrbitalGrid, interaction: bool):
        self.method = method
        self.z = z
        self.grid = grid
        self.interaction = interaction

    def _hartree(self, coeffs: np.ndarray):
        orbital = self.grid.function(coeffs)
        # one-electron Hartree potential; the total density's is twice this
        return hartree_potential(
            lambda r: orbital(r) ** 2 / (4.0 * np.pi), self.grid.mesh, expected_charge=1.0
        )

    def potential(self, coeffs: np.ndarray):
        z = self.z
        if not self.interaction:
            return lambda r: -z / r
        v_one = self._hartree(coeffs)
        orbital = self.grid.function(coeffs)
        method = self.method

        def v_eff(r):
            psi = orbital(r)
            rho = 2.0 * psi * psi / (4.0 * np.pi)
            if method is ScfMethod.LDA:
                v_x, _ = lda_potentials(rho)
                _, v_c = lda_potentials(_pair_density(psi))
                return -z / r + 2.0 * v_one(r) + v_x + v_c
            value = -z / r + v_one(r)
            if method is ScfMethod.HF_WIGNER:
                # d(n V_c(n))/dn has the LDA form; half of it per orbital
                _, v_c = lda_potentials(_pair_density(psi))
                value = value + 0.5 * v_c
            return value

        return v_eff

    def energies(self, coeffs: np.ndarray, pair: OperatorPair, epsilon: float) -> EnergyBreakdown:
        grid = self.grid
        e_kin = 2.0 * float(coeffs @ (pair.terms["kinetic"] @ coeffs))
        e_en = -2.0 * self.z * float(coeffs @ (pair.terms["inverse_r"] @ coeffs))
        if not self.interaction:
            return EnergyBreakdown.from_components(e_kin, e_en, 0.0, 0.0, 0.0, epsilon)

        psi = grid.values(coeffs)
        psi2 = psi * psi
        rho = 2.0 * psi2 / (4.0 * np.pi)
        pair_rho = _pair_density(psi)
        v_one = self._hartree(coeffs)(grid.r)
        j_integral = grid.integrate(psi2 * v_one)

        if self.method is ScfMethod.LDA:
            e_h = 2.0 * j_integral
            # int f(rho) d^3r = 4 pi int f r^2 dr
            e_x = 4.0 * np.pi * grid.integrate(rho * _lda_exchange_energy_density(rho))
            e_c = 4.0 * np.pi * grid.integrate(rho * _wigner_energy_density(pair_rho))
            breakdown = EnergyBreakdown.from_components(e_kin, e_en, e_h, e_x, e_c, epsilon)
            v_x, _ = lda_potentials(rho)
            _, v_c = lda_potentials(pair_rho)
            eigen_form = (
                2.0 * epsilon
                - e_h
                - 4.0 * np.pi * grid.integrate(rho * (v_x + v_c))
                + e_x
                + e_c
            )
            logger.debug(
                "LDA energy: components %.12f, eigenvalue form %.12f", breakdown.E_tot, eigen_form
            )
            return breakdown

        e_c = 0.0
        if self.method is ScfMethod.HF_WIGNER:
            v_c = wigner_correlation_potential(_wigner_radius(pair_rho))
            e_c = grid.integrate(psi2 * v_c)
        return EnergyBreakdown.from_components(e_kin, e_en, j_integral, 0.0, e_c, epsilon)

    def density_residual(self, old: np.ndarray, new: np.ndarray) -> float:
        grid = self.grid
        rho_old = 2.0 * grid.values(old) ** 2 / (4.0 * np.pi)
        rho_new = 2.0 * grid.values(new) ** 2 / (4.0 * np.pi)
        return float(np.sqrt(4.0 * np.pi * grid.integrate((rho_new - rho_old) ** 2)))


def scf_solve(z: float, mesh: RadialMesh, shapes: ShapeSet, config: Optional[ScfConfig] = None) -> ScfResult:
    config = config or ScfConfig()
    if not z > 0.0:
        raise InvalidArgumentError(f"nuclear charge must be positive, got {z}")
    if not isinstance(mesh, RadialMesh):
        raise InvalidArgumentError(f"expected a RadialMesh, got {type(mesh).__name__}")

    template = assemble_radial(mesh, shapes, lambda r: -z / r)
    grid = _OrbitalGrid(mesh, shapes, template)
    field_ = _MeanField(config.method, z, grid, config.interaction)

    psi = _hydrogenic_guess(z, mesh, shapes, template)
    previous_energy = None
    delta_e = residual = float("inf")
    breakdown = None
    converged = False
    iteration = 0

    for iteration in range(1, config.max_iter + 1):
        pair = assemble_radial(mesh, shapes, field_.potential(psi))
        solution = solve_banded(pair, 1)
        predicted = solution.ground_vector
        if predicted @ (pair.S @ psi) < 0.0:
            predicted = -predicted

        breakdown = field_.energies(psi, pair, solution.lowest)
        residual = field_.density_residual(psi, predicted)
        if previous_energy is not None:
            delta_e = abs(breakdown.E_tot - previous_energy)
        previous_energy = breakdown.E_tot
        logger.debug(
            "SCF %s Z=%.6g iter %d: E_tot=%.12f eps=%.12f dE=%.3e res=%.3e",
            config.method.value,
            z,
            iteration,
            breakdown.E_tot,
            solution.lowest,
            delta_e,
            residual,
        )
        if delta_e < config.energy_tol and residual < config.density_tol:
            converged = True
            break
        if not config.interaction:
            psi = predicted
            continue
        psi = _normalize((1.0 - config.mixing) * psi + config.mixing * predicted, pair.S)

    if not converged:
        raise ScfConvergenceError(iteration, delta_e, residual, breakdown)

    # final state: the eigenvector of the self-consistent operator
    psi = _normalize(predicted, pair.S)
    final_pair = pair
    breakdown = field_.energies(psi, final_pair, solution.lowest)

    psi_q = grid.values(psi)
    mean_radius = grid.integrate(psi_q * psi_q * grid.r)
    unbound = mean_radius > CONSTANTS["UNBOUND_RADIUS_FRACTION"] * mesh.r_cut
    if unbound:
        logger.warning(
            "Orbital for %s at Z=%.6g looks unbound: <r>=%.4g against r_cut=%.4g",
            config.method.value,
            z,
            mean_radius,
            mesh.r_cut,
        )
    logger.info(
        "SCF %s Z=%.6g converged in %d iterations: E_tot=%.9f eps=%.9f",
        config.method.value,
        z,
        iteration,
        breakdown.E_tot,
        breakdown.epsilon,
    )
    return ScfResult(
        method=config.method,
        z=float(z),
        mesh=mesh,
        shapes=shapes,
        coefficients=template.expand(psi),
        breakdown=breakdown,
        iterations=iteration,
        converged=True,
        mean_radius=mean_radius,
        unbound=bool(unbound),
        extra={
            "density_residual": residual,
            "delta_e": delta_e,
            "virial_ratio": virial_ratio(breakdown),
        },
    )


def one_electron_energy(
    z: float,
    mesh: Optional[RadialMesh] = None,
    shapes: Optional[ShapeSet] = None,
    mode: ThresholdMode = ThresholdMode.ANALYTIC,
) -> float:
    """Hydrogenic threshold -Z^2/2, analytic or solved on the given mesh."""
    if not z > 0.0:
        raise InvalidArgumentError(f"nuclear charge must be positive, got {z}")
    mode = ThresholdMode(mode)
    if mode is ThresholdMode.ANALYTIC:
        return -0.5 * z * z
    if mesh is None or shapes is None:
        raise InvalidArgumentError("numeric threshold needs a mesh and a shape set")
    return solve_banded(assemble_radial(mesh, shapes, lambda r: -z / r), 1).lowest


def threshold_derivative(
    z: float,
    mesh: Optional[RadialMesh] = None,
    shapes: Optional[ShapeSet] = None,
    mode: ThresholdMode = ThresholdMode.ANALYTIC,
) -> float:
    """d/dZ of the one-electron threshold: -Z analytically, <-1/r> on the mesh."""
    mode = ThresholdMode(mode)
    if mode is ThresholdMode.ANALYTIC:
        return -float(z)
    if mesh is None or shapes is None:
        raise InvalidArgumentError("numeric threshold needs a mesh and a shape set")
    pair = assemble_radial(mesh, shapes, lambda r: -z / r)
    vector = solve_banded(pair, 1).ground_vector
    return -float(vector @ (pair.terms["inverse_r"] @ vector))


def virial_ratio(breakdown: EnergyBreakdown) -> float:
    """|2 E_kin + E_pot| / |E_tot|; zero for an exact Coulomb eigenstate."""
    e_pot = breakdown.E_tot - breakdown.E_kin
    return abs(2.0 * breakdown.E_kin + e_pot) / abs(breakdown.E_tot)
