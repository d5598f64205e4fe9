"""
Command line: `python -m critcharge solve ...` and `python -m critcharge fss ...`.

Exit codes: 0 ok, 2 configuration, 3 solver, 4 analysis.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .cache import ResultCache
from .config import CONSTANTS, RunConfig, load_run_config
from .errors import ConfigError, CritChargeError
from .exact3d import ExactResult, Form, exact_solve
from .fss import (
    GapOptions,
    SolverGapModel,
    SyntheticGapModel,
    bst_extrapolate,
    collapse,
    crossing_chain,
    gamma_curve,
    scan_grid,
    scan_nu,
)
from .mesh_basis import ShapeSet, build_graded_mesh, build_tensor_mesh
from .runner import compute_gap_points
from .scf import ScfConfig, ScfResult, scf_solve

logger = logging.getLogger(__name__)

ENERGY_COLUMNS = ["method", "Z", "N", "E_tot", "E_Kin", "E_en", "E_H", "E_x", "E_c", "epsilon"]
SUMMARY_KEYS = ("z_c", "alpha", "nu", "z_c_err", "alpha_err")


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(value) for value in row])
    return path


def write_json(path: Path, data) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return path


def _solve_fields(config: RunConfig) -> dict:
    return {
        "kind": "solve",
        "method": config.method,
        "charge": config.charge,
        "mesh": config.to_dict()["mesh"],
        "scf": config.to_dict()["scf"],
    }


def _energy_row(config: RunConfig, payload: dict) -> list:
    n = config.mesh.n_elements
    if config.is_scf:
        b = payload["breakdown"]
        return [config.method, config.charge, n, b["E_tot"], b["E_kin"], b["E_en"], b["E_H"], b["E_x"], b["E_c"], b["epsilon"]]
    result = ExactResult.from_payload(payload)
    parts = result.physical_components()
    energy = result.physical_energy
    z = config.charge
    return [config.method, z, n, energy, parts["E_kin"], parts["E_en"], parts["E_H"], 0.0, 0.0, energy + 0.5 * z * z]


def _run_solve(config: RunConfig) -> dict:
    spec = config.mesh
    shapes = ShapeSet(spec.basis)
    if config.is_scf:
        mesh = build_graded_mesh(spec.n_elements, spec.r_cut, spec.growth)
        scf = ScfConfig(
            method=config.method,
            mixing=config.scf.mixing,
            energy_tol=config.scf.energy_tol,
            density_tol=config.scf.density_tol,
            max_iter=config.scf.max_iter,
            one_electron_energy=config.scf.one_electron_energy,
        )
        return scf_solve(config.charge, mesh, shapes, scf).to_payload()
    mesh = build_tensor_mesh(spec.n_elements, spec.n_angular, spec.r_cut, spec.growth)
    if config.method == "exact_direct":
        return exact_solve(config.charge, mesh, shapes, Form.DIRECT).to_payload()
    return exact_solve(1.0 / config.charge, mesh, shapes, Form.SCALED).to_payload()


def cmd_solve(config: RunConfig, cache: Optional[ResultCache] = None) -> dict:
    """Solve one (method, Z, N) point; writes energies.csv and result.json."""
    if not (config.is_scf or config.is_exact):
        raise ConfigError(f"method {config.method!r} has no solve command")
    payload = None
    key = None
    if cache is not None:
        key = cache.key(_solve_fields(config))
        record = cache.get(key)
        if record is not None:
            logger.info("Serving %s Z=%g N=%d from cache", config.method, config.charge, config.mesh.n_elements)
            payload = record.payload
    if payload is None:
        payload = _run_solve(config)
        if cache is not None:
            cache.put(key, payload)

    out = Path(config.output_dir)
    energies = write_csv(out / "energies.csv", ENERGY_COLUMNS, [_energy_row(config, payload)])
    summary = {key_: value for key_, value in payload.items() if key_ != "coefficients"}
    result = write_json(
        out / "result.json",
        {"config": config.to_dict(), "result": summary, "version": __version__},
    )
    return {"energies": energies, "result": result}


def _couplings(config: RunConfig, scaled: bool) -> np.ndarray:
    fss = config.fss
    if scaled:
        return scan_grid((1.0 / fss.z_max, 1.0 / fss.z_min), fss.z_points)
    return scan_grid((fss.z_min, fss.z_max), fss.z_points)


def _extrapolation_rows(name: str, result) -> list:
    rows = []
    for m, column in enumerate(result.tableau):
        for i, value in enumerate(column):
            rows.append([name, m, i, value])
    rows.append([name, "limit", "", result.limit])
    rows.append([name, "error", "", result.error])
    rows.append([name, "richardson", "", result.richardson])
    return rows


def cmd_fss(config: RunConfig, cache: Optional[ResultCache] = None) -> dict:
    """Gamma curves, crossings, extrapolation and optional collapse for one method."""
    fss = config.fss
    if config.method == "synthetic":
        model = SyntheticGapModel(config.synthetic.z_c, config.synthetic.alpha, config.synthetic.nu)
    elif config.is_scf or config.is_exact:
        model = SolverGapModel(config.method, GapOptions.from_run_config(config), cache)
    else:
        raise ConfigError(f"method {config.method!r} has no fss command")
    scaled = model.is_scaled
    couplings = _couplings(config, scaled)
    levels = fss.levels

    if isinstance(model, SolverGapModel):
        compute_gap_points(
            [(float(c), level) for level in levels for c in couplings], model, config.workers
        )

    out = Path(config.output_dir)
    gamma_rows = []
    for level_a, level_b in fss.gamma_pairs:
        curve = gamma_curve(model, level_a, level_b, couplings)
        for c, value in zip(curve.couplings, curve.values):
            gamma_rows.append([1.0 / c if scaled else c, level_a, level_b, value])
    files = {"gamma": write_csv(out / "gamma.csv", ["Z", "N", "N'", "Gamma"], gamma_rows)}

    bracket = (float(couplings[0]), float(couplings[-1]))
    crossings = crossing_chain(model, fss.crossing_levels, fss.delta_n, bracket, fss.z_points)
    files["crossings"] = write_csv(
        out / "crossings.csv",
        ["N", "Z_c", "alpha"],
        [[c.n, c.z_c, c.alpha] for c in crossings],
    )

    coupling_fit = bst_extrapolate([(c.basis_size, c.coupling) for c in crossings], fss.omega)
    alpha_fit = bst_extrapolate([(c.basis_size, c.alpha) for c in crossings], fss.omega)
    name = "lambda_c" if scaled else "Z_c"
    files["extrapolation"] = write_csv(
        out / "extrapolation.csv",
        ["quantity", "m", "i", "value"],
        _extrapolation_rows(name, coupling_fit) + _extrapolation_rows("alpha", alpha_fit),
    )
    if scaled:
        z_c = 1.0 / coupling_fit.limit
        z_c_err = coupling_fit.error / coupling_fit.limit**2
    else:
        z_c, z_c_err = coupling_fit.limit, coupling_fit.error

    nu = None
    if fss.collapse:
        critical = coupling_fit.limit
        points = []
        for level in levels:
            for c in couplings:
                if abs(c - critical) <= fss.collapse_window:
                    point = model.gap(float(c), level)
                    points.append((point.basis_size, point.coupling, point.gap))
        nu_grid = np.linspace(fss.nu_min, fss.nu_max, fss.nu_points)
        nu, _ = scan_nu(points, alpha_fit.limit, critical, nu_grid)
        best = collapse(points, alpha_fit.limit, nu, critical)
        files["collapse"] = write_csv(
            out / "collapse.csv",
            ["x", "y", "N"],
            [[x, y, int(n)] for x, y, n in zip(best.x, best.y, best.n)],
        )

    summary = {
        "z_c": z_c,
        "alpha": alpha_fit.limit,
        "nu": nu,
        "z_c_err": z_c_err,
        "alpha_err": alpha_fit.error,
    }
    files["summary"] = write_json(out / "summary.json", summary)
    logger.info("FSS %s: Z_c=%.6f +- %.1e, alpha=%.6f", config.method, z_c, z_c_err, alpha_fit.limit)
    return files


def _common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--method", help="hf, hf-wigner, lda, exact, exact-scaled or synthetic")
    parser.add_argument("--config", help="JSON or YAML run configuration")
    parser.add_argument("--basis", choices=["c0", "c1"])
    parser.add_argument("--rcut", type=float)
    parser.add_argument("--growth", type=float)
    parser.add_argument("--angular", type=int, help="angular elements for exact methods")
    parser.add_argument("--output-dir")
    parser.add_argument("--cache-dir")
    parser.add_argument("--no-cache", action="store_true")
    parser.add_argument("--verbose", "-v", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="critcharge", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="ground state of one (method, Z, N)")
    _common_arguments(solve)
    solve.add_argument("--elements", type=int)
    solve.add_argument("--charge", type=float)

    fss = sub.add_parser("fss", help="finite-size-scaling chain for one method")
    _common_arguments(fss)
    fss.add_argument("--n-min", type=int)
    fss.add_argument("--n-max", type=int)
    fss.add_argument("--delta-n", type=int)
    fss.add_argument("--step", type=int, help="spacing of crossing sizes, defaults to delta-n")
    fss.add_argument("--z-min", type=float)
    fss.add_argument("--z-max", type=float)
    fss.add_argument("--z-points", type=int)
    fss.add_argument("--omega", type=float)
    fss.add_argument("--threshold", choices=["analytic", "numeric"])
    fss.add_argument("--collapse", action="store_true", default=None)
    fss.add_argument("--workers", type=int)
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    mesh = {
        "basis": args.basis,
        "r_cut": args.rcut,
        "growth": args.growth,
        "n_angular": args.angular,
    }
    overrides = {
        "method": args.method,
        "mesh": mesh,
        "output_dir": args.output_dir,
        "cache_dir": args.cache_dir,
    }
    if args.command == "solve":
        mesh["n_elements"] = args.elements
        overrides["charge"] = args.charge
    else:
        overrides["fss"] = {
            "n_min": args.n_min,
            "n_max": args.n_max,
            "delta_n": args.delta_n,
            "step": args.step,
            "z_min": args.z_min,
            "z_max": args.z_max,
            "z_points": args.z_points,
            "omega": args.omega,
            "collapse": args.collapse,
        }
        overrides["scf"] = {"one_electron_energy": args.threshold}
        overrides["workers"] = args.workers
    return overrides


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        config = load_run_config(args.config, _overrides(args))
        cache = None if args.no_cache else ResultCache(config.cache_dir)
        if args.command == "solve":
            cmd_solve(config, cache)
        else:
            cmd_fss(config, cache)
    except CritChargeError as exc:
        logger.error("%s", exc)
        return exc.exit_code
    return CONSTANTS["EXIT_OK"]

