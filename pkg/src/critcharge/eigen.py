"""
Generalized symmetric-definite eigensolvers for H x = eps S x.

solve_banded: banded Cholesky of S (breakdown check), a shift below the
spectrum found by banded Cholesky of H - sigma S, and Lanczos on the banded
inverse. Small pairs go straight to a dense solver. Meant for 1D radial pairs.

solve_shift_invert: sparse LU of H - sigma S driving ARPACK in shift-invert
mode. Meant for the 3D tensor pairs.

Both finish with a small Rayleigh-Ritz step that S-orthonormalizes the
returned vectors.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import linalg
from scipy.sparse import linalg as sparse_linalg

from .assembly import OperatorPair
from .errors import (
    ConvergenceError,
    InvalidArgumentError,
    NumericalBreakdownError,
    ShiftCollisionError,
)

logger = logging.getLogger(__name__)

MAX_ITERATIONS = 500
MIN_SUBSPACE_PAD = 10
DENSE_LIMIT = 64
MAX_SHIFT_TRIALS = 60


@dataclass(frozen=True, eq=False)
class EigenSolution:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray

    @property
    def lowest(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def ground_vector(self) -> np.ndarray:
        return self.eigenvectors[:, 0]

    def __len__(self) -> int:
        return self.eigenvalues.size


def _check_k(pair: OperatorPair, k: int) -> int:
    if int(k) != k or k < 1:
        raise InvalidArgumentError(f"k must be a positive integer, got {k}")
    if k > pair.n_dof:
        raise InvalidArgumentError(f"k = {k} exceeds the basis dimension {pair.n_dof}")
    return int(k)


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude component of every column positive."""
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0.0] = 1.0
    return vectors * signs


def _residuals(pair: OperatorPair, values: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    hx = pair.H @ vectors
    sx = pair.S @ vectors
    return np.linalg.norm(hx - sx * values[None, :], axis=0)


def _upper_band(matrix, bandwidth: int) -> np.ndarray:
    """LAPACK upper band storage: ab[bandwidth + i - j, j] = A[i, j] for i <= j."""
    n = matrix.shape[0]
    ab = np.zeros((bandwidth + 1, n))
    for offset in range(bandwidth + 1):
        ab[bandwidth - offset, offset:] = matrix.diagonal(offset)
    return ab


def _rayleigh_ritz(pair: OperatorPair, basis: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    h_small = basis.T @ (pair.H @ basis)
    s_small = basis.T @ (pair.S @ basis)
    values, w = linalg.eigh(0.5 * (h_small + h_small.T), 0.5 * (s_small + s_small.T))
    return values[:k], _fix_signs(basis @ w[:, :k])


def _lanczos(pair: OperatorPair, k: int, shift: float, solve: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """ARPACK shift-invert with `solve` applying (H - shift S)^-1; returns the Ritz basis."""
    n = pair.n_dof

    def matvec(b):
        x = solve(b)
        if not np.all(np.isfinite(x)):
            raise ShiftCollisionError(shift)
        return x

    op_inv = sparse_linalg.LinearOperator((n, n), matvec=matvec, dtype=float)
    ncv = min(n, max(2 * k + MIN_SUBSPACE_PAD, 20))
    try:
        _, basis = sparse_linalg.eigsh(
            pair.H,
            k=k,
            M=pair.S,
            sigma=shift,
            which="LM",
            OPinv=op_inv,
            ncv=ncv,
            maxiter=MAX_ITERATIONS,
            v0=np.ones(n),
        )
    except sparse_linalg.ArpackNoConvergence as exc:
        residual = float("nan")
        if exc.eigenvectors is not None and exc.eigenvectors.size:
            partial = _residuals(pair, np.asarray(exc.eigenvalues), exc.eigenvectors)
            residual = float(np.max(partial))
        raise ConvergenceError(MAX_ITERATIONS, residual) from exc
    if not np.all(np.isfinite(basis)):
        raise ShiftCollisionError(shift)
    return basis


def _factor_band(pbtrf, ab: np.ndarray):
    factor, info = pbtrf(ab, lower=0)
    if info < 0:
        raise InvalidArgumentError(f"pbtrf rejected argument {-info}")
    return factor, int(info)


def _shift_below_spectrum(pair: OperatorPair, bandwidth: int, pbtrf) -> tuple[float, np.ndarray]:
    """Largest tried sigma with H - sigma S positive definite, i.e. sigma < eps_0."""
    # every H_ii / S_ii is a Rayleigh quotient, so the minimum bounds eps_0 from above
    top = float(np.min(pair.H.diagonal() / pair.S.diagonal()))
    step = max(abs(top), 1.0) * 1e-2
    shift = top - step
    for _ in range(MAX_SHIFT_TRIALS):
        factor, info = _factor_band(pbtrf, _upper_band(pair.H - shift * pair.S, bandwidth))
        if info == 0:
            return shift, factor
        step *= 2.0
        shift = top - step
    raise ShiftCollisionError(shift)


def solve_banded(pair: OperatorPair, k: int = 1) -> EigenSolution:
    k = _check_k(pair, k)
    n = pair.n_dof
    bandwidth = pair.bandwidth

    s_band = _upper_band(pair.S, bandwidth)
    (pbtrf,) = linalg.get_lapack_funcs(("pbtrf",), (s_band,))
    _, info = _factor_band(pbtrf, s_band)
    if info > 0:
        raise NumericalBreakdownError(info)

    if n <= max(DENSE_LIMIT, 2 * k + MIN_SUBSPACE_PAD):
        values, vectors = linalg.eigh(pair.H.toarray(), pair.S.toarray(), subset_by_index=[0, k - 1])
        vectors = _fix_signs(vectors)
    else:
        shift, factor = _shift_below_spectrum(pair, bandwidth, pbtrf)
        basis = _lanczos(pair, k, shift, lambda b: linalg.cho_solve_banded((factor, False), b))
        values, vectors = _rayleigh_ritz(pair, basis, k)

    logger.debug("Banded solve: n=%d bandwidth=%d lowest=%.12f", n, bandwidth, values[0])
    return EigenSolution(values, vectors, _residuals(pair, values, vectors))


def solve_shift_invert(pair: OperatorPair, k: int = 1, shift: float = 0.0) -> EigenSolution:
    k = _check_k(pair, k)
    n = pair.n_dof
    if k >= n - 1:
        raise InvalidArgumentError(f"shift-invert needs k < n - 1 (k={k}, n={n})")

    shifted = (pair.H - shift * pair.S).tocsc()
    try:
        lu = sparse_linalg.splu(shifted)
    except RuntimeError as exc:
        # SuperLU reports an exactly singular factor this way
        raise ShiftCollisionError(shift) from exc

    basis = _lanczos(pair, k, shift, lu.solve)
    values, vectors = _rayleigh_ritz(pair, basis, k)
    if not np.all(np.isfinite(values)):
        raise ShiftCollisionError(shift)

    if values[0] < shift:
        logger.warning("Shift %.6g lies above eigenvalue %.6g", shift, values[0])
    logger.debug("Shift-invert solve: n=%d shift=%.6g lowest=%.12f", n, shift, values[0])
    return EigenSolution(values, vectors, _residuals(pair, values, vectors))
