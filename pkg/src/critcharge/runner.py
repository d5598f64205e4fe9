"""Worker pool for gap-point solves."""

from __future__ import annotations

import concurrent.futures
import logging
from typing import Iterable, Sequence

from .errors import CritChargeError, SolverError
from .fss import GapOptions, GapPoint, SolverGapModel, gap_point

logger = logging.getLogger(__name__)


def _solve_payload(method: str, options: GapOptions, z: float, level: int) -> dict:
    # errors cross the process boundary as text; their constructors do not pickle
    try:
        return {"point": gap_point(z, level, method, options).to_payload()}
    except CritChargeError as exc:
        return {"error": str(exc)}


def compute_gap_points(
    requests: Iterable[tuple[float, int]],
    model: SolverGapModel,
    workers: int = 1,
) -> list[GapPoint]:
    """Fill `model` with gap points for every (coupling, level); cache misses go to the pool."""
    unique = list(dict.fromkeys((float(z), int(level)) for z, level in requests))
    missing = [(z, level) for z, level in unique if model.lookup(z, level) is None]
    logger.info(
        "%d gap points requested, %d to solve with %d worker(s)", len(unique), len(missing), workers
    )

    if workers <= 1 or len(missing) <= 1:
        for z, level in missing:
            model.store(gap_point(z, level, model.method, model.options))
    else:
        _solve_in_pool(missing, model, workers)

    return [model.lookup(z, level) for z, level in unique]


def _solve_in_pool(missing: Sequence[tuple[float, int]], model: SolverGapModel, workers: int) -> None:
    failure = None
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        futures = {
            pool.submit(_solve_payload, model.method, model.options, z, level): (z, level)
            for z, level in missing
        }
        for future in concurrent.futures.as_completed(futures):
            z, level = futures[future]
            outcome = future.result()
            if "error" in outcome:
                logger.error("Worker failed at coupling %.6g, N=%d: %s", z, level, outcome["error"])
                failure = failure or SolverError(outcome["error"])
                continue
            model.store(GapPoint.from_payload(outcome["point"]))
    if failure is not None:
        raise failure
