"""
Finite-size scaling for the critical nuclear charge.

A gap point pairs the binding gap E(2e) - E(1e) with its Hellmann-Feynman
derivative. From two sizes N, N' the log-ratio

    Delta(o; N, N') = ln(|o_N| / |o_N'|) / ln(N' / N)

of the gap and of its derivative gives

    Gamma = Delta_H / (Delta_H - Delta_dH),

whose curves for (N - d, N) and (N, N + d) cross at the pseudo-critical
coupling. The crossing sequence is extrapolated to 1/N -> 0 with a
Bulirsch-Stoer tableau, and a grid scan over nu scores the data collapse
E N^(alpha/nu) against N^(1/nu) (Z - Z_c).
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Protocol, Sequence

import numpy as np
from scipy import optimize

from .config import CONSTANTS, EXACT_METHODS, SCF_METHODS
from .errors import (
    AnalysisError,
    CollapseError,
    DegenerateSequenceError,
    InvalidArgumentError,
    NoCrossingError,
    PoleError,
    SolverError,
    UndefinedDeltaError,
)
from .exact3d import Form, exact_solve
from .mesh_basis import Continuity, ShapeSet, build_graded_mesh, build_tensor_mesh
from .scf import ScfConfig, ThresholdMode, one_electron_energy, scf_solve, threshold_derivative

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GapPoint:
    coupling: float
    level: int
    gap: float
    dgap: float
    method: str
    basis_size: int
    energy: float = 0.0
    threshold: float = 0.0

    def to_payload(self) -> dict:
        return asdict(self)

    @classmethod
    def from_payload(cls, payload: dict) -> "GapPoint":
        return cls(**payload)


@dataclass(frozen=True)
class GammaCurve:
    levels: tuple[int, int]
    couplings: tuple[float, ...]
    values: tuple[float, ...]


@dataclass(frozen=True)
class Crossing:
    n: int
    z_c: float
    alpha: float
    bracket: tuple[float, float]
    residual: float
    coupling: float
    basis_size: int

    @property
    def resolved(self) -> bool:
        """True when the curves agree at the root to CROSSING_RESIDUAL_TOL."""
        return self.residual <= CONSTANTS["CROSSING_RESIDUAL_TOL"]

    def as_row(self) -> dict:
        return {"N": self.n, "Z_c": self.z_c, "alpha": self.alpha}


@dataclass(frozen=True)
class Extrapolation:
    limit: float
    error: float
    tableau: tuple[tuple[float, ...], ...]
    richardson: Optional[float] = None
    agrees: bool = True


@dataclass(frozen=True)
class CollapseResult:
    x: np.ndarray
    y: np.ndarray
    n: np.ndarray
    residual: float
    alpha: float
    nu: float
    z_c: float
    log_scale: bool = False


@dataclass(frozen=True)
class GapOptions:
    """Mesh, basis and solver settings shared by every point of one FSS run."""

    r_cut: float = CONSTANTS["DEFAULT_R_CUT"]
    growth: float = 1.0
    n_angular: int = CONSTANTS["DEFAULT_ANGULAR_ELEMENTS"]
    continuity: Continuity = Continuity.C0
    threshold: ThresholdMode = ThresholdMode.ANALYTIC
    mixing: float = CONSTANTS["SCF_MIXING"]
    energy_tol: float = CONSTANTS["SCF_ENERGY_TOL"]
    density_tol: float = CONSTANTS["SCF_DENSITY_TOL"]
    max_iter: int = CONSTANTS["SCF_MAX_ITER"]
    interaction: bool = True

    def __post_init__(self):
        object.__setattr__(self, "continuity", Continuity(self.continuity))
        object.__setattr__(self, "threshold", ThresholdMode(self.threshold))

    @classmethod
    def from_run_config(cls, config) -> "GapOptions":
        return cls(
            r_cut=config.mesh.r_cut,
            growth=config.mesh.growth,
            n_angular=config.mesh.n_angular,
            continuity=config.mesh.basis,
            threshold=config.scf.one_electron_energy,
            mixing=config.scf.mixing,
            energy_tol=config.scf.energy_tol,
            density_tol=config.scf.density_tol,
            max_iter=config.scf.max_iter,
        )

    def describe(self) -> dict:
        data = asdict(self)
        data["continuity"] = self.continuity.value
        data["threshold"] = self.threshold.value
        return data

    def scf_config(self, method: str) -> ScfConfig:
        return ScfConfig(
            method=method,
            mixing=self.mixing,
            energy_tol=self.energy_tol,
            density_tol=self.density_tol,
            max_iter=self.max_iter,
            one_electron_energy=self.threshold,
            interaction=self.interaction,
        )


def basis_size(method: str, level: int, options: GapOptions) -> int:
    """Size entering Delta: element count in 1D, n^2 * n_angular for the tensor mesh."""
    if method in EXACT_METHODS:
        return level * level * options.n_angular
    return level


def gap_point(z: float, n: int, method: str, options: Optional[GapOptions] = None) -> GapPoint:
    """Gap and its coupling derivative at coupling `z` (lambda for exact_scaled)."""
    options = options or GapOptions()
    shapes = ShapeSet(options.continuity)
    try:
        if method in SCF_METHODS:
            mesh = build_graded_mesh(n, options.r_cut, options.growth)
            result = scf_solve(z, mesh, shapes, options.scf_config(method))
            energy, derivative = result.breakdown.E_tot, result.potential_derivative
            threshold = one_electron_energy(z, mesh, shapes, options.threshold)
            threshold_slope = threshold_derivative(z, mesh, shapes, options.threshold)
        elif method in EXACT_METHODS:
            mesh = build_tensor_mesh(n, options.n_angular, options.r_cut, options.growth)
            form = Form.DIRECT if method == "exact_direct" else Form.SCALED
            result = exact_solve(z, mesh, shapes, form, interaction=options.interaction)
            energy, derivative = result.energy, result.coupling_derivative
            if form is Form.DIRECT:
                threshold = one_electron_energy(z, mesh.axis_r1, shapes, options.threshold)
                threshold_slope = threshold_derivative(z, mesh.axis_r1, shapes, options.threshold)
            else:
                # lambda multiplies only 1/r12; the scaled threshold is the Z = 1 atom
                threshold = one_electron_energy(1.0, mesh.axis_r1, shapes, options.threshold)
                threshold_slope = 0.0
        else:
            raise InvalidArgumentError(f"unknown gap method {method!r}")
    except SolverError as exc:
        logger.error("Solve failed for %s at coupling %.6g, N=%d: %s", method, z, n, exc)
        raise

    point = GapPoint(
        coupling=float(z),
        level=int(n),
        gap=energy - threshold,
        dgap=derivative - threshold_slope,
        method=method,
        basis_size=basis_size(method, n, options),
        energy=energy,
        threshold=threshold,
    )
    logger.debug("Gap point %s", point)
    return point


def delta(o_n: float, o_np: float, n: float, n_prime: float) -> float:
    if n == n_prime or n <= 0 or n_prime <= 0:
        raise InvalidArgumentError(f"delta needs distinct positive sizes, got {n} and {n_prime}")
    if o_n == 0.0 or o_np == 0.0 or (o_n > 0.0) != (o_np > 0.0):
        raise UndefinedDeltaError(o_n, o_np)
    if not (math.isfinite(o_n) and math.isfinite(o_np)):
        raise UndefinedDeltaError(o_n, o_np)
    return math.log(abs(o_n) / abs(o_np)) / math.log(n_prime / n)


def gamma(delta_h: float, delta_dh: float) -> float:
    difference = delta_h - delta_dh
    if difference == 0.0 or abs(difference) <= 1e-15 * max(abs(delta_h), abs(delta_dh), 1.0):
        raise PoleError(delta_h)
    return delta_h / difference


def gamma_from_points(a: GapPoint, b: GapPoint) -> float:
    delta_h = delta(a.gap, b.gap, a.basis_size, b.basis_size)
    delta_dh = delta(a.dgap, b.dgap, a.basis_size, b.basis_size)
    return gamma(delta_h, delta_dh)


class GapModel(Protocol):
    method: str

    def gap(self, z: float, level: int) -> GapPoint: ...

    def gamma(self, z: float, level_a: int, level_b: int) -> float: ...


class SolverGapModel:
    """Gap points from the solvers, memoized in memory and in an optional result cache."""

    def __init__(self, method: str, options: Optional[GapOptions] = None, cache=None):
        if method not in SCF_METHODS + EXACT_METHODS:
            raise InvalidArgumentError(f"unknown gap method {method!r}")
        self.method = method
        self.options = options or GapOptions()
        self.cache = cache
        self._memo: dict[tuple[float, int], GapPoint] = {}

    @property
    def is_scaled(self) -> bool:
        return self.method == "exact_scaled"

    def cache_fields(self, z: float, level: int) -> dict:
        return {
            "kind": "gap_point",
            "method": self.method,
            "coupling": float(z),
            "level": int(level),
            "options": self.options.describe(),
        }

    def remember(self, point: GapPoint) -> None:
        self._memo[(point.coupling, point.level)] = point

    def known(self, z: float, level: int) -> bool:
        return (float(z), int(level)) in self._memo

    def lookup(self, z: float, level: int) -> Optional[GapPoint]:
        point = self._memo.get((float(z), int(level)))
        if point is not None or self.cache is None:
            return point
        record = self.cache.get(self.cache.key(self.cache_fields(z, level)))
        if record is None:
            return None
        point = GapPoint.from_payload(record.payload)
        self.remember(point)
        return point

    def store(self, point: GapPoint) -> None:
        self.remember(point)
        if self.cache is not None:
            fields = self.cache_fields(point.coupling, point.level)
            self.cache.put(self.cache.key(fields), point.to_payload())

    def gap(self, z: float, level: int) -> GapPoint:
        point = self.lookup(z, level)
        if point is None:
            point = gap_point(z, level, self.method, self.options)
            self.store(point)
        return point

    def gamma(self, z: float, level_a: int, level_b: int) -> float:
        return gamma_from_points(self.gap(z, level_a), self.gap(z, level_b))


class SyntheticGapModel:
    """Known-answer fixture.

    Gamma(Z; N, N') = alpha + (Z - z_c)(1/N - 1/N') crosses at z_c with height
    alpha for every N, and the gap -N^(-alpha/nu) exp(N^(1/nu) (Z - z_c))
    collapses exactly at (alpha, nu, z_c).
    """

    method = "synthetic"
    is_scaled = False

    def __init__(self, z_c: float = 0.91, alpha: float = 1.0, nu: float = 0.85):
        self.z_c = z_c
        self.alpha = alpha
        self.nu = nu

    def gap(self, z: float, level: int) -> GapPoint:
        scale = level ** (1.0 / self.nu)
        value = -(level ** (-self.alpha / self.nu)) * math.exp(scale * (z - self.z_c))
        return GapPoint(
            coupling=float(z),
            level=int(level),
            gap=value,
            dgap=value * scale,
            method=self.method,
            basis_size=int(level),
            energy=value,
            threshold=0.0,
        )

    def gamma(self, z: float, level_a: int, level_b: int) -> float:
        return self.alpha + (z - self.z_c) * (1.0 / level_a - 1.0 / level_b)

    def collapse_points(self, levels: Sequence[int], x_grid: Sequence[float]) -> list[tuple[int, float, float]]:
        """(N, Z, E) on a shared scaling-variable grid, so every N samples the same x."""
        points = []
        for level in levels:
            for x in x_grid:
                z = self.z_c + x / level ** (1.0 / self.nu)
                points.append((int(level), z, self.gap(z, level).gap))
        return points


def scan_grid(bracket: tuple[float, float], samples: int) -> np.ndarray:
    lo, hi = bracket
    return np.linspace(lo, hi, int(samples))


def gamma_curve(model: GapModel, level_a: int, level_b: int, couplings: Sequence[float]) -> GammaCurve:
    """Gamma on a coupling grid; points at a pole or undefined Delta are skipped."""
    kept, values = [], []
    for z in couplings:
        try:
            values.append(model.gamma(float(z), level_a, level_b))
            kept.append(float(z))
        except (PoleError, UndefinedDeltaError) as exc:
            logger.debug("Gamma(%d, %d) skipped at %.6g: %s", level_a, level_b, z, exc)
    return GammaCurve((level_a, level_b), tuple(kept), tuple(values))


def _crossing_function(model: GapModel, n: int, delta_n: int) -> Callable[[float], float]:
    def g(z: float) -> float:
        try:
            return model.gamma(z, n - delta_n, n) - model.gamma(z, n, n + delta_n)
        except (PoleError, UndefinedDeltaError):
            return float("nan")

    return g


class _UndefinedAt(Exception):
    def __init__(self, z: float):
        super().__init__(z)
        self.z = z


def _checked(g) -> Callable[[float], float]:
    def finite(z: float) -> float:
        value = g(z)
        if math.isnan(value):
            raise _UndefinedAt(z)
        return value

    return finite


def _window_edge(g, defined: float, undefined: float) -> tuple[float, float]:
    """Last point with g defined between a defined and an undefined coupling."""
    value = g(defined)
    for _ in range(CONSTANTS["CROSSING_MAX_STEPS"]):
        if abs(undefined - defined) <= CONSTANTS["CROSSING_XTOL"]:
            break
        m = 0.5 * (defined + undefined)
        gm = g(m)
        if math.isnan(gm):
            undefined = m
        else:
            defined, value = m, gm
    return defined, value


def _refine(g, a: float, b: float, depth: int = 0) -> tuple[float, float, Optional[tuple[float, float]]]:
    """Root of g in a sign-changing bracket.

    Brent's method while g stays defined. When it lands where Gamma is
    undefined (the gaps of neighbouring sizes straddle zero), the window is
    narrowed from both sides and the root is the secant across it; the
    residual is then the smaller |g| at the two window edges.
    """
    try:
        root, info = optimize.brentq(
            _checked(g),
            a,
            b,
            xtol=CONSTANTS["CROSSING_XTOL"],
            maxiter=CONSTANTS["CROSSING_MAX_STEPS"],
            full_output=True,
            disp=False,
        )
    except _UndefinedAt as exc:
        left, g_left = _window_edge(g, a, exc.z)
        right, g_right = _window_edge(g, b, exc.z)
        ga = g(a)
        if (g_left > 0.0) != (g_right > 0.0):
            root = left - g_left * (right - left) / (g_right - g_left)
            logger.debug("Crossing across undefined window [%.10g, %.10g]", left, right)
            return min(max(root, left), right), min(abs(g_left), abs(g_right)), (left, right)
        if depth >= 2:
            raise PoleError(exc.z) from None
        # the sign change is on one side of the window, not across it
        if (g_left > 0.0) != (ga > 0.0):
            return _refine(g, a, left, depth + 1)
        return _refine(g, right, b, depth + 1)
    if not info.converged:
        logger.warning("Brent refinement stopped after %d steps: %s", info.iterations, info.flag)
    root = float(root)
    value = g(root)
    if math.isnan(value):
        raise PoleError(root)
    return root, value, None


def _crossing_height(model: GapModel, n: int, delta_n: int, root: float, window) -> float:
    def height(z: float) -> float:
        return 0.5 * (model.gamma(z, n - delta_n, n) + model.gamma(z, n, n + delta_n))

    if window is None:
        return height(root)
    left, right = window
    if right == left:
        return height(left)
    t = (root - left) / (right - left)
    return (1.0 - t) * height(left) + t * height(right)


def find_crossing(
    n: int,
    delta_n: int,
    model: GapModel,
    bracket: tuple[float, float],
    samples: int = 21,
) -> Crossing:
    """Pseudo-critical coupling where Gamma(N - d, N) and Gamma(N, N + d) cross."""
    if delta_n < 1 or n - delta_n < 1:
        raise InvalidArgumentError(f"invalid size chain N={n}, delta={delta_n}")
    lo, hi = float(min(bracket)), float(max(bracket))
    g = _crossing_function(model, n, delta_n)

    grid = scan_grid((lo, hi), max(int(samples), 3))
    sampled = [(float(z), g(float(z))) for z in grid]
    undefined = [z for z, v in sampled if math.isnan(v)]
    if undefined:
        logger.info(
            "N=%d: Gamma undefined at %d of %d couplings, neighbouring gaps differ in sign there",
            n,
            len(undefined),
            len(sampled),
        )
    finite = [(z, v) for z, v in sampled if not math.isnan(v)]
    scale = max((abs(v) for _, v in finite), default=0.0)
    if not finite or scale <= 1e-14:
        raise NoCrossingError(lo, hi, sampled)

    candidates = []
    for (za, ga), (zb, gb) in zip(finite, finite[1:]):
        if ga == 0.0:
            candidates.append((za, za, ga, ga))
        elif ga * gb < 0.0:
            candidates.append((za, zb, ga, gb))
    if finite[-1][1] == 0.0:
        candidates.append((finite[-1][0], finite[-1][0], 0.0, 0.0))
    if not candidates:
        raise NoCrossingError(lo, hi, sampled)

    last_pole = None
    for za, zb, ga, gb in candidates:
        if za == zb:
            root, residual, window = za, 0.0, None
        else:
            try:
                root, residual, window = _refine(g, za, zb)
            except PoleError as exc:
                last_pole = exc
                continue
            limit = max(abs(ga), abs(gb)) if window is None else scale
            if abs(residual) > limit:
                # g grew on the way in: a pole, not a root
                logger.info("Pole of g between %.6g and %.6g for N=%d, trying next bracket", za, zb, n)
                last_pole = PoleError(root)
                continue
        alpha = _crossing_height(model, n, delta_n, root, window)
        z_c = 1.0 / root if getattr(model, "is_scaled", False) else root
        size = n
        if hasattr(model, "options"):
            size = basis_size(model.method, n, model.options)
        crossing = Crossing(
            n=int(n),
            z_c=z_c,
            alpha=alpha,
            bracket=(za, zb),
            residual=abs(residual),
            coupling=root,
            basis_size=size,
        )
        logger.info("Crossing N=%d: Z_c=%.8f alpha=%.6f (|g|=%.2e)", n, z_c, alpha, crossing.residual)
        if not crossing.resolved:
            logger.warning(
                "Crossing N=%d not resolved: |g|=%.2e at the root exceeds %.0e",
                n,
                crossing.residual,
                CONSTANTS["CROSSING_RESIDUAL_TOL"],
            )
        return crossing
    raise last_pole or NoCrossingError(lo, hi, sampled)


def _check_sequence(sequence) -> tuple[np.ndarray, np.ndarray]:
    if len(sequence) < 3:
        raise InvalidArgumentError(f"extrapolation needs at least 3 points, got {len(sequence)}")
    sizes = np.array([float(n) for n, _ in sequence])
    values = np.array([float(v) for _, v in sequence])
    if np.any(sizes <= 0.0) or np.any(np.diff(sizes) <= 0.0):
        raise InvalidArgumentError("sizes must be positive and strictly increasing")
    return sizes, values


def bst_extrapolate(sequence: Sequence[tuple[float, float]], omega: float = 1.0) -> Extrapolation:
    """Bulirsch-Stoer rational extrapolation in h = 1/N with exponent omega.

    T[m][i] = T[m-1][i+1] + (T[m-1][i+1] - T[m-1][i]) /
              ((h_i / h_{i+m})^omega (1 - (T[m-1][i+1] - T[m-1][i]) /
                                        (T[m-1][i+1] - T[m-2][i+1])) - 1)

    with T[-1] = 0 and T[0] the input values.
    """
    if not omega > 0.0:
        raise InvalidArgumentError(f"omega must be positive, got {omega}")
    sizes, values = _check_sequence(sequence)
    h = 1.0 / sizes
    scale = max(float(np.max(np.abs(values))), 1e-300)
    converged_tol = 1e-13 * scale

    previous = np.zeros_like(values)
    current = values.copy()
    tableau = [tuple(float(v) for v in current)]
    for m in range(1, len(values)):
        nxt = np.empty(len(current) - 1)
        for i in range(len(nxt)):
            diff = current[i + 1] - current[i]
            if abs(diff) <= converged_tol:
                nxt[i] = current[i + 1]
                continue
            inner = current[i + 1] - previous[i + 1]
            if inner == 0.0:
                nxt[i] = current[i + 1]
                continue
            denominator = (h[i] / h[i + m]) ** omega * (1.0 - diff / inner) - 1.0
            if abs(denominator) <= 1e-14 or not math.isfinite(denominator):
                raise DegenerateSequenceError(m)
            nxt[i] = current[i + 1] + diff / denominator
        if not np.all(np.isfinite(nxt)):
            raise DegenerateSequenceError(m)
        previous, current = current, nxt
        tableau.append(tuple(float(v) for v in current))

    limit = tableau[-1][0]
    error = abs(limit - tableau[-2][-1])
    richardson = richardson_extrapolate(sequence)
    agrees = abs(richardson - limit) <= 2.0 * error + 1e-12
    if not agrees:
        logger.warning(
            "Bulirsch-Stoer limit %.10g and polynomial limit %.10g differ by more than 2x the error %.2e",
            limit,
            richardson,
            error,
        )
    return Extrapolation(limit, error, tuple(tableau), richardson, agrees)


def richardson_extrapolate(sequence: Sequence[tuple[float, float]]) -> float:
    """Neville evaluation at h = 0 of the polynomial in h = 1/N through every point."""
    sizes, values = _check_sequence(sequence)
    h = 1.0 / sizes
    p = values.copy()
    for m in range(1, len(p)):
        for i in range(len(p) - m):
            p[i] = (h[i + m] * p[i] - h[i] * p[i + 1]) / (h[i + m] - h[i])
    return float(p[0])


def _collapse_curves(x: np.ndarray, curve: np.ndarray, n: np.ndarray) -> np.ndarray:
    """Each size's curve linearly interpolated onto the x values inside the shared window."""
    groups = []
    for size in np.unique(n):
        member = n == size
        order = np.argsort(x[member])
        gx, gy = x[member][order], curve[member][order]
        if gx.size < 2:
            raise CollapseError(f"size {int(size)} has fewer than two points")
        groups.append((gx, gy))
    lo = max(gx[0] for gx, _ in groups)
    hi = min(gx[-1] for gx, _ in groups)
    if not hi > lo:
        raise CollapseError(f"sizes share no scaling-variable window ({lo:.4g} >= {hi:.4g})")
    common = np.unique(x[(x >= lo) & (x <= hi)])
    if common.size < 2:
        raise CollapseError("fewer than two points inside the shared window")
    return np.array([np.interp(common, gx, gy) for gx, gy in groups])


def collapse(
    points: Sequence[tuple[float, float, float]],
    alpha: float,
    nu: float,
    z_c: float,
) -> CollapseResult:
    """Rescale (N, Z, E) points and score the spread between N groups.

    Every size is interpolated onto the union of scaling-variable samples
    inside the window all sizes cover, so the sizes need not sample the same
    x. A gap of one sign is compared as log|y|, which turns the exponential
    tail into a straight line. The residual is the mean across-size variance
    over that grid divided by the variance of all interpolated values.
    """
    if not nu > 0.0:
        raise InvalidArgumentError(f"nu must be positive, got {nu}")
    data = np.asarray(points, dtype=float)
    if data.ndim != 2 or data.shape[1] != 3 or data.shape[0] == 0:
        raise CollapseError("points must be a non-empty list of (N, Z, E)")
    n, z, e = data.T
    if np.unique(n).size < 2:
        raise CollapseError("need at least two sizes")
    x = n ** (1.0 / nu) * (z - z_c)
    y = e * n ** (alpha / nu)

    one_sign = bool(np.all(y > 0.0) or np.all(y < 0.0))
    curve = np.log(np.abs(y)) if one_sign else y
    stacked = _collapse_curves(x, curve, n)
    spread = float(np.mean(stacked.var(axis=0)))
    total = float(stacked.var())
    residual = spread / total if total > 0.0 else spread
    return CollapseResult(x, y, n.astype(int), residual, alpha, nu, z_c, one_sign)


def scan_nu(
    points: Sequence[tuple[float, float, float]],
    alpha: float,
    z_c: float,
    nu_grid: Sequence[float],
) -> tuple[float, list[tuple[float, float]]]:
    """Collapse residual per nu; returns the minimizer and the full scan."""
    scores = []
    for nu in nu_grid:
        try:
            scores.append((float(nu), collapse(points, alpha, nu, z_c).residual))
        except CollapseError as exc:
            logger.debug("nu=%.4f skipped: %s", nu, exc)
    if not scores:
        raise CollapseError("no nu on the grid produced a residual")
    best = min(scores, key=lambda item: item[1])[0]
    logger.info("Collapse scan: best nu=%.4f over %d grid points", best, len(scores))
    return best, scores


def crossing_chain(
    model: GapModel,
    levels: Sequence[int],
    delta_n: int,
    bracket: tuple[float, float],
    samples: int = 21,
) -> list[Crossing]:
    crossings = []
    for n in levels:
        try:
            crossings.append(find_crossing(n, delta_n, model, bracket, samples))
        except AnalysisError as exc:
            logger.error("No crossing for N=%d: %s", n, exc)
            raise
    return crossings
