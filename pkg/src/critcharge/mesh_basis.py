"""
Meshes, shape functions and the Gauss-Legendre rule.

All shapes live on the reference element x in [0, 1]; an element with left
node r_L and width h maps x to r = r_L + x * h. Local dofs are ordered left
node first, and within a node value before derivative:

    C0: [N_L, N_R]                     N_L = 1 - x, N_R = x
    C1: [H00, h*H10, H01, h*H11]       Hermite cubics
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre

from .errors import InvalidArgumentError

logger = logging.getLogger(__name__)

QUADRATURE_POINTS = 10


class Grading(str, enum.Enum):
    UNIFORM = "uniform"
    GEOMETRIC = "geometric"


class Continuity(str, enum.Enum):
    C0 = "c0"
    C1 = "c1"


@dataclass(frozen=True, eq=False)
class AxisMesh:
    """Ordered nodes on [lower, upper]; immutable."""

    nodes: np.ndarray
    grading: Grading = Grading.UNIFORM
    growth: float = 1.0

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise InvalidArgumentError("a mesh needs at least two nodes")
        if np.any(np.diff(nodes) <= 0.0):
            raise InvalidArgumentError("mesh nodes must be strictly increasing")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    @property
    def n_elements(self) -> int:
        return self.nodes.size - 1

    @property
    def n_nodes(self) -> int:
        return self.nodes.size

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def lower(self) -> float:
        return float(self.nodes[0])

    @property
    def upper(self) -> float:
        return float(self.nodes[-1])

    def scaled(self, factor: float) -> "AxisMesh":
        if factor <= 0.0:
            raise InvalidArgumentError(f"scale factor must be positive, got {factor}")
        return type(self)(self.nodes * factor, self.grading, self.growth)

    def describe(self) -> dict:
        return {
            "n_elements": self.n_elements,
            "lower": self.lower,
            "upper": self.upper,
            "grading": self.grading.value,
            "growth": self.growth,
        }

    def __eq__(self, other):
        if not isinstance(other, AxisMesh):
            return NotImplemented
        return (
            type(self) is type(other)
            and self.grading == other.grading
            and self.growth == other.growth
            and np.array_equal(self.nodes, other.nodes)
        )

    def __hash__(self):
        return hash((type(self).__name__, self.grading, self.growth, self.nodes.tobytes()))


class RadialMesh(AxisMesh):
    """Mesh on [0, r_cut] in bohr."""

    def __post_init__(self):
        super().__post_init__()
        if self.nodes[0] != 0.0:
            raise InvalidArgumentError("radial mesh must start at r = 0")

    @property
    def r_cut(self) -> float:
        return self.upper


@dataclass(frozen=True)
class TensorMesh3:
    """Tensor product of (r1, r2, u = cos theta12) axes."""

    axis_r1: RadialMesh
    axis_r2: RadialMesh
    axis_u: AxisMesh

    def __post_init__(self):
        if self.axis_u.lower != -1.0 or self.axis_u.upper != 1.0:
            raise InvalidArgumentError("angular axis must cover exactly [-1, 1]")

    @property
    def n_elements(self) -> int:
        return self.axis_r1.n_elements * self.axis_r2.n_elements * self.axis_u.n_elements

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.axis_r1.n_elements, self.axis_r2.n_elements, self.axis_u.n_elements)

    def scaled(self, factor: float) -> "TensorMesh3":
        """Scale both radial axes; the angular axis is dimensionless."""
        return TensorMesh3(
            self.axis_r1.scaled(factor), self.axis_r2.scaled(factor), self.axis_u
        )

    def describe(self) -> dict:
        return {
            "r1": self.axis_r1.describe(),
            "r2": self.axis_r2.describe(),
            "u": self.axis_u.describe(),
        }


def _check_size(n_elements: int, r_cut: float) -> None:
    if int(n_elements) != n_elements or n_elements < 1:
        raise InvalidArgumentError(f"n_elements must be a positive integer, got {n_elements}")
    if not r_cut > 0.0:
        raise InvalidArgumentError(f"r_cut must be positive, got {r_cut}")


def build_uniform_mesh(n_elements: int, r_cut: float) -> RadialMesh:
    _check_size(n_elements, r_cut)
    nodes = np.linspace(0.0, r_cut, int(n_elements) + 1)
    return RadialMesh(nodes, Grading.UNIFORM, 1.0)


def build_graded_mesh(n_elements: int, r_cut: float, growth: float) -> RadialMesh:
    """Geometric widths h_{e+1} = growth * h_e summing to r_cut."""
    _check_size(n_elements, r_cut)
    if not growth >= 1.0:
        raise InvalidArgumentError(f"growth must be >= 1, got {growth}")
    if growth == 1.0:
        return build_uniform_mesh(n_elements, r_cut)
    n = int(n_elements)
    first = r_cut * (growth - 1.0) / (growth**n - 1.0)
    widths = first * growth ** np.arange(n)
    nodes = np.concatenate(([0.0], np.cumsum(widths)))
    # pin the end node so nodes[-1] == r_cut exactly
    nodes[-1] = r_cut
    return RadialMesh(nodes, Grading.GEOMETRIC, float(growth))


def build_angular_mesh(n_elements: int) -> AxisMesh:
    if int(n_elements) != n_elements or n_elements < 1:
        raise InvalidArgumentError(f"n_elements must be a positive integer, got {n_elements}")
    return AxisMesh(np.linspace(-1.0, 1.0, int(n_elements) + 1), Grading.UNIFORM, 1.0)


def build_tensor_mesh(
    n_radial: int, n_angular: int, r_cut: float, growth: float = 1.0
) -> TensorMesh3:
    radial = build_graded_mesh(n_radial, r_cut, growth)
    return TensorMesh3(radial, radial, build_angular_mesh(n_angular))


@dataclass(frozen=True)
class QuadRule:
    abscissae: np.ndarray
    weights: np.ndarray

    def reference(self) -> tuple[np.ndarray, np.ndarray]:
        """Rule mapped onto the reference element [0, 1]."""
        return 0.5 * (self.abscissae + 1.0), 0.5 * self.weights


@lru_cache(maxsize=None)
def gauss_rule(order: int = QUADRATURE_POINTS) -> QuadRule:
    """Gauss-Legendre rule on [-1, 1], nodes polished by Newton iteration."""
    x, _ = legendre.leggauss(order)
    p = legendre.Legendre.basis(order)
    dp = p.deriv()
    for _ in range(50):
        step = p(x) / dp(x)
        x = x - step
        if np.max(np.abs(step)) < 1e-15:
            break
    w = 2.0 / ((1.0 - x**2) * dp(x) ** 2)
    x.setflags(write=False)
    w.setflags(write=False)
    return QuadRule(x, w)


def element_quadrature(mesh: AxisMesh, rule: QuadRule | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Physical points and dr-weights per element, each shaped (n_elements, n_points)."""
    x, w = (rule or gauss_rule()).reference()
    h = mesh.widths[:, None]
    return mesh.nodes[:-1, None] + h * x[None, :], h * w[None, :]


@dataclass(frozen=True)
class ShapeSet:
    continuity: Continuity = Continuity.C0

    def __post_init__(self):
        value = self.continuity
        if not isinstance(value, Continuity):
            value = str(value).lower()
        try:
            object.__setattr__(self, "continuity", Continuity(value))
        except ValueError:
            raise InvalidArgumentError(
                f"continuity must be 'c0' or 'c1', got {self.continuity!r}"
            ) from None

    @property
    def dofs_per_node(self) -> int:
        return 1 if self.continuity is Continuity.C0 else 2

    @property
    def n_local(self) -> int:
        return 2 * self.dofs_per_node

    def reference(self, x) -> tuple[np.ndarray, np.ndarray]:
        """Shapes and d/dx on the reference element, before any width factor.

        C1 derivative shapes are returned without their h prefactor; see
        `evaluate` for the physical form.
        """
        x = np.asarray(x, dtype=float)
        if self.continuity is Continuity.C0:
            values = np.stack([1.0 - x, x], axis=-1)
            slopes = np.stack([-np.ones_like(x), np.ones_like(x)], axis=-1)
            return values, slopes
        x2, x3 = x * x, x * x * x
        values = np.stack(
            [1.0 - 3.0 * x2 + 2.0 * x3, x - 2.0 * x2 + x3, 3.0 * x2 - 2.0 * x3, x3 - x2],
            axis=-1,
        )
        slopes = np.stack(
            [-6.0 * x + 6.0 * x2, 1.0 - 4.0 * x + 3.0 * x2, 6.0 * x - 6.0 * x2, 3.0 * x2 - 2.0 * x],
            axis=-1,
        )
        return values, slopes

    def scale(self, h) -> np.ndarray:
        """Per-dof value factor: 1 for value shapes, h for C1 derivative shapes."""
        h = np.asarray(h, dtype=float)
        if self.continuity is Continuity.C0:
            return np.stack([np.ones_like(h), np.ones_like(h)], axis=-1)
        one = np.ones_like(h)
        return np.stack([one, h, one, h], axis=-1)

    def evaluate(self, x, h) -> tuple[np.ndarray, np.ndarray]:
        """Values and d/dr for an element of width h (broadcasts over x and h)."""
        values, slopes = self.reference(x)
        factor = self.scale(h)
        h = np.asarray(h, dtype=float)[..., None]
        return values * factor, slopes * factor / h


def shape_eval(shapes: ShapeSet, x, h: float) -> tuple[np.ndarray, np.ndarray]:
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0.0) or np.any(x_arr > 1.0):
        raise InvalidArgumentError(f"reference coordinate must lie in [0, 1], got {x}")
    if not h > 0.0:
        raise InvalidArgumentError(f"element width must be positive, got {h}")
    return shapes.evaluate(x_arr, h)
