"""``audit`` command line: matrix audits, sweeps, file checks and geometry.

Exit codes: 0 when nothing was violated, 2 when an inequality violation was
recorded, 1 for usage, hypothesis and file-format errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from . import ineq_audit as ia
from . import linalg_core as la
from . import warp_geom as wg

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATION = 2

COMMANDS = ("matrix-audit", "geometry", "sweep", "verify-file")
SWEEPS = {"harmonic": ia.harmonic_sweep, "chain": ia.chain_sweep}


@dataclass
class RunConfig:
    command: str
    check: str = "t010"
    dims: tuple[int, int] = (2, 8)
    trials: int = 1000
    seed: int = 42
    tol: float | None = None
    model: str = "chen-cone"
    grid: list[int] = field(default_factory=lambda: [5])
    interpretation: str = "floor_t1"
    laplacian_sign: str = "divgrad"
    out_path: str | None = None
    format: str = "json"
    file: str | None = None

    def tolerance(self) -> float:
        if self.tol is not None:
            return self.tol
        return wg.DEFAULT_SETTINGS.geo_tol if self.command == "geometry" else ia.AUDIT_TOL


class UsageError(ValueError):
    pass


def parse_dims(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    try:
        if not sep:
            return int(lo), int(lo)
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from None


def _grid(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or N1,N2,..., got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="audit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--check", default="t010")
    common.add_argument("--dims", type=parse_dims, default=(2, 8), help="inclusive range A..B")
    common.add_argument("--trials", type=int, default=1000)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--tol", type=float, default=None,
                        help="violation tolerance (default 1e-9; 1e-6 for geometry)")
    common.add_argument("--model", default="chen-cone")
    common.add_argument("--grid", type=_grid, default=[5], help="points per axis, N or N1,N2,...")
    common.add_argument("--interpretation", default="floor_t1",
                        choices=[*ia.INTERPRETATIONS, "all"])
    common.add_argument("--laplacian-sign", dest="laplacian_sign", default="divgrad",
                        choices=["divgrad", "negative"])
    common.add_argument("--out", dest="out_path", default=None)
    common.add_argument("--format", default="json", choices=["json", "csv"])
    sub.add_parser("matrix-audit", parents=[common], help="seeded random audit of a matrix check")
    sub.add_parser("geometry", parents=[common], help="second fundamental form checks on a catalog model")
    sub.add_parser("sweep", parents=[common], help="exhaustive sweep of a scalar bound (harmonic, chain)")
    vf = sub.add_parser("verify-file", parents=[common], help="run a check on a matrix file")
    vf.add_argument("file")
    return parser


def config_from_args(argv=None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    return RunConfig(**vars(ns))


# ---------------------------------------------------------------------------
# report writing


def _clean(obj):
    """Make report payloads JSON-safe (numpy scalars, tuples, non-finite floats)."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "tolist"):
        return _clean(obj.tolist())
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def build_report(config: RunConfig, check_name: str, results, violations, summary,
                 started: float | None = None) -> dict:
    echo = asdict(config)
    echo["tol"] = config.tolerance()
    return _clean({
        "tool_version": __version__,
        "config_echo": echo,
        "check_name": check_name,
        "started_unix_seconds": int(time.time() if started is None else started),
        "results": results,
        "violations": violations,
        "summary": summary,
    })


def _flatten(row: dict) -> dict:
    out = {}
    for k, v in row.items():
        if isinstance(v, dict):
            out.update({f"{k}.{kk}": vv for kk, vv in v.items()})
        else:
            out[k] = v
    return out


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    rows = [_flatten(r) for r in report["results"]]
    fields: list[str] = []
    for r in rows:
        fields += [k for k in r if k not in fields]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def emit(config: RunConfig, report: dict) -> None:
    text = render(report, config.format)
    if config.out_path:
        path = Path(config.out_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    else:
        sys.stdout.write(text)


def artifact_dir(config: RunConfig) -> Path | None:
    return Path(config.out_path).parent if config.out_path else None


def _violations(rep: ia.AuditReport) -> list[dict]:
    return [
        {"trial": v.trial_index, "dim": v.dim, "margin": v.margin, "artifact": v.artifact_path,
         **({"sides": v.sides} if v.sides is not None else {})}
        for v in rep.violations
    ]


# ---------------------------------------------------------------------------
# commands


def cmd_matrix_audit(config: RunConfig, started: float | None = None) -> int:
    tol = config.tolerance()
    if config.check == "t0" and config.interpretation == "all":
        interps = list(ia.INTERPRETATIONS)
    else:
        interps = [config.interpretation]
    results, violations, table = [], [], {}
    min_margin = None
    trials = 0
    extras = {}
    for interp in interps:
        rep = ia.run_audit(config.check, config.dims, config.trials, config.seed, tol,
                           interpretation=interp, artifact_dir=artifact_dir(config))
        trials += rep.trials
        tag = {"interpretation": rep.interpretation} if rep.interpretation else {}
        results += [{**tag, **r} for r in rep.results]
        violations += [{**tag, **v} for v in _violations(rep)]
        if rep.min_margin is not None and (min_margin is None or rep.min_margin < min_margin):
            min_margin = rep.min_margin
        if rep.interpretation:
            table[rep.interpretation] = rep.extras["side_violations"]
        extras = rep.extras if len(interps) == 1 else extras
    summary = {
        "trials": trials,
        "min_margin": min_margin,
        "min_margin_defined": min_margin is not None,
        "verdict": "violated" if violations else "clean",
        "extras": extras,
    }
    if table:
        summary["verdict_table"] = table
    emit(config, build_report(config, config.check, results, violations, summary, started))
    return EXIT_VIOLATION if violations else EXIT_OK


def cmd_sweep(config: RunConfig, started: float | None = None) -> int:
    if config.check not in SWEEPS:
        raise UsageError(f"unknown sweep {config.check!r}; available: {', '.join(SWEEPS)}")
    lo, hi = config.dims
    res = SWEEPS[config.check](hi, v_min=lo)
    results = [{"v_min": res.v_min, "v_max": res.v_max, "checked": res.checked, **res.min_margins}]
    violations = [{"trial": v, "margin": None, "artifact": None} for v in res.failures]
    summary = {"trials": res.checked, "min_margin": min(res.min_margins.values()),
               "verdict": "clean" if res.passed else "violated"}
    emit(config, build_report(config, config.check, results, violations, summary, started))
    return EXIT_OK if res.passed else EXIT_VIOLATION


def cmd_verify_file(config: RunConfig, started: float | None = None) -> int:
    matrix = la.read_matrix(config.file)
    tol = config.tolerance()
    options = {"interpretation": config.interpretation} if config.check == "t0" else {}
    if options.get("interpretation") == "all":
        raise UsageError("verify-file needs a single interpretation")
    trial = ia.evaluate_instance(config.check, matrix, seed=config.seed, **options)
    row = {"file": config.file, "margin": trial.margin, **trial.values}
    if trial.side_margins is not None:
        row["side_margins"] = trial.side_margins
    violated = trial.margin < -tol
    violations = [{"trial": 0, "margin": trial.margin, "artifact": config.file}] if violated else []
    summary = {"trials": 1, "min_margin": trial.margin, "verdict": "violated" if violated else "clean"}
    emit(config, build_report(config, config.check, [row], violations, summary, started))
    return EXIT_VIOLATION if violated else EXIT_OK


def cmd_geometry(config: RunConfig, started: float | None = None) -> int:
    settings = wg.GeometrySettings(geo_tol=config.tolerance(), laplacian_sign=config.laplacian_sign)
    model = wg.get_model(config.model)
    grid = config.grid[0] if len(config.grid) == 1 else config.grid
    points = model.grid(grid)
    structure = wg.check_cr_structure(model, points, settings)
    verdict = wg.check_warping_bound(model, points, settings)
    results = [
        {"point": r.point, "h_sq": r.h_sq, "grad_lnf_sq": r.grad_lnf_sq,
         "lap_lnf": r.lap_lnf, "rhs": r.rhs, "margin": r.margin}
        for r in verdict.records
    ]
    violations = [
        {"trial": i, "margin": r.margin, "artifact": None}
        for i, r in enumerate(verdict.records) if r.margin < -settings.geo_tol
    ]
    summary = {
        "trials": len(results),
        "min_margin": verdict.min_margin,
        "max_abs_margin": verdict.max_abs_margin,
        "verdict": verdict.verdict,
        "cr_structure": structure,
        "dt_minimality": wg.check_dt_minimality(model, points, settings),
        **wg.check_xi_relations(model, points, settings),
        "equality_diagnostics": verdict.diagnostics,
    }
    emit(config, build_report(config, model.name, results, violations, summary, started))
    return EXIT_VIOLATION if violations else EXIT_OK


HANDLERS = {
    "matrix-audit": cmd_matrix_audit,
    "geometry": cmd_geometry,
    "sweep": cmd_sweep,
    "verify-file": cmd_verify_file,
}


def run(config: RunConfig, started: float | None = None) -> int:
    try:
        return HANDLERS[config.command](config, started)
    except (ia.UnknownCheck, ia.HypothesisViolation, la.LinalgError, wg.GeometryError,
            UsageError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) else str(exc)
        print(f"audit: error: {msg}", file=sys.stderr)
        return EXIT_ERROR


def main(argv=None) -> int:
    try:
        config = config_from_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
