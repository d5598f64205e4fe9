"""
Exception hierarchy for critcharge.

Every error carries the process exit code the CLI reports for it:
0 ok, 2 configuration, 3 solver, 4 analysis.
"""

from __future__ import annotations

from typing import Any, Sequence

ERROR_MESSAGES = {
    "INVALID_ARGUMENT": "invalid argument: {detail}",
    "CONFIG": "configuration error: {detail}",
    "BREAKDOWN": "overlap matrix is not positive definite (leading minor {pivot})",
    "NO_CONVERGENCE": "eigensolver did not converge after {iterations} iterations (residual {residual:.3e})",
    "SHIFT_COLLISION": "shifted matrix H - {shift:.6g} S is singular",
    "SCF_NO_CONVERGENCE": "SCF did not converge in {iterations} iterations (|dE| {delta_e:.3e}, density residual {residual:.3e})",
    "UNDEFINED_DELTA": "delta undefined for values {o_n!r} and {o_np!r}",
    "POLE": "gamma has a pole: delta_H == delta_dH == {value!r}",
    "NO_CROSSING": "no crossing in bracket [{lo:.6g}, {hi:.6g}]",
    "DEGENERATE_SEQUENCE": "extrapolation tableau degenerated at column {column}",
    "COLLAPSE": "collapse residual undefined: {detail}",
}


class CritChargeError(Exception):
    """Base class; `exit_code` is what the CLI returns."""

    exit_code = 1


class InvalidArgumentError(CritChargeError, ValueError):
    exit_code = 2

    def __init__(self, detail: str):
        super().__init__(ERROR_MESSAGES["INVALID_ARGUMENT"].format(detail=detail))
        self.detail = detail


class ConfigError(CritChargeError):
    exit_code = 2

    def __init__(self, detail: str):
        super().__init__(ERROR_MESSAGES["CONFIG"].format(detail=detail))
        self.detail = detail


class SolverError(CritChargeError):
    exit_code = 3


class NumericalBreakdownError(SolverError):
    def __init__(self, pivot: int):
        super().__init__(ERROR_MESSAGES["BREAKDOWN"].format(pivot=pivot))
        self.pivot = pivot


class ConvergenceError(SolverError):
    def __init__(self, iterations: int, residual: float):
        super().__init__(
            ERROR_MESSAGES["NO_CONVERGENCE"].format(
                iterations=iterations, residual=residual
            )
        )
        self.iterations = iterations
        self.residual = residual


class ShiftCollisionError(SolverError):
    def __init__(self, shift: float):
        super().__init__(ERROR_MESSAGES["SHIFT_COLLISION"].format(shift=shift))
        self.shift = shift


class ScfConvergenceError(SolverError):
    def __init__(self, iterations: int, delta_e: float, residual: float, breakdown: Any):
        super().__init__(
            ERROR_MESSAGES["SCF_NO_CONVERGENCE"].format(
                iterations=iterations, delta_e=delta_e, residual=residual
            )
        )
        self.iterations = iterations
        self.breakdown = breakdown


class AnalysisError(CritChargeError):
    exit_code = 4


class UndefinedDeltaError(AnalysisError):
    def __init__(self, o_n: float, o_np: float):
        super().__init__(ERROR_MESSAGES["UNDEFINED_DELTA"].format(o_n=o_n, o_np=o_np))


class PoleError(AnalysisError):
    def __init__(self, value: float):
        super().__init__(ERROR_MESSAGES["POLE"].format(value=value))


class NoCrossingError(AnalysisError):
    def __init__(self, lo: float, hi: float, samples: Sequence[tuple[float, float]] = ()):
        message = ERROR_MESSAGES["NO_CROSSING"].format(lo=lo, hi=hi)
        if samples:
            listing = ", ".join(f"g({z:.6g})=" + ("undefined" if g != g else f"{g:.3e}") for z, g in samples)
            message = f"{message}; sampled {listing}"
        super().__init__(message)
        self.samples = list(samples)
        self.undefined = [z for z, g in self.samples if g != g]


class DegenerateSequenceError(AnalysisError):
    def __init__(self, column: int):
        super().__init__(ERROR_MESSAGES["DEGENERATE_SEQUENCE"].format(column=column))
        self.column = column


class CollapseError(AnalysisError):
    def __init__(self, detail: str):
        super().__init__(ERROR_MESSAGES["COLLAPSE"].format(detail=detail))
