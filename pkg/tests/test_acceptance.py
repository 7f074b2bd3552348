"""Acceptance suite: one test and one PASS/FAIL line per criterion."""

import json
import math
import time

import numpy as np
import pytest

from warpaudit import cli
from warpaudit import ineq_audit as ia
from warpaudit import linalg_core as la
from warpaudit import warp_geom as wg

DIMS = (2, 8)
TRIALS = 1000
SEED = 42
# mpmath oracle (50 digits) for the diag(0.1, 0.2) spot values
SPOT_LHS = 0.28081282756084294
SPOT_RHS = 1.5008102715630192


def _timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0


def test_criterion_1_harmonic_sweep(criterion):
    ia.harmonic_sweep(10)  # load the compiled kernel outside the timed region
    res, secs = _timed(ia.harmonic_sweep, 10**6)
    ok = res.passed and res.checked == 10**6 - 1 and secs < 5.0
    criterion(1, ok, f"v=2..1e6 failures={len(res.failures)} min margins={res.min_margins} in {secs:.3f}s")


def test_criterion_2_chain_sweep(criterion):
    ia.chain_sweep(10)
    res, secs = _timed(ia.chain_sweep, 10**4)
    ok = res.passed and res.checked == 10**4 - 1 and secs < 1.0
    criterion(2, ok, f"v=2..1e4 failures={len(res.failures)} in {secs:.3f}s")


def test_criterion_3_weighted_power_sum_bound(criterion):
    rep = ia.run_audit("t010", DIMS, TRIALS, SEED, 1e-9)
    lhs, rhs = ia.t010_sides(np.diag([0.1, 0.2]))
    spot = abs(lhs - SPOT_LHS) < 1e-6 and abs(rhs - SPOT_RHS) < 1e-6
    ok = rep.trials == 7000 and rep.clean and spot
    criterion(3, ok, f"{rep.trials} trials, {len(rep.violations)} violations, min margin {rep.min_margin:.3g}; "
                     f"diag(0.1,0.2) lhs={lhs:.7f} rhs={rhs:.7f}")


def test_criterion_4_doubly_stochastic_bound(criterion):
    rep = ia.run_audit("c1", DIMS, TRIALS, SEED, 1e-9)
    max_hs = rep.extras["max_hs_norm"]
    ident = True
    for v in range(DIMS[0], DIMS[1] + 1):
        lhs, rhs = ia.c1_sides(np.eye(v))
        ident &= abs(la.hs_norm(np.eye(v)) - math.sqrt(v)) < 1e-12 and lhs <= rhs
    ok = rep.trials == 7000 and rep.clean and max_hs > 1 and ident
    criterion(4, ok, f"{rep.trials} trials, {len(rep.violations)} violations; max observed ||A||_2 = {max_hs:.4f} "
                     f"(> 1; identity gives sqrt(v))")


def test_criterion_5_weighted_harmonic(criterion):
    dims = (2, 16)
    per_dim = math.ceil(10**5 / (dims[1] - dims[0] + 1))
    rep = ia.run_audit("weighted_harmonic", dims, per_dim, SEED, 1e-9)
    proof = rep.extras["proof_bound_violations"]
    ok = rep.trials >= 10**5 and rep.clean and isinstance(proof, int)
    criterion(5, ok, f"{rep.trials} weight vectors, statement violations={len(rep.violations)}, "
                     f"proof-bound violations={proof} (min proof margin {rep.extras['proof_bound_min_margin']:.3g})")


def test_criterion_6_t0_verdict_table(criterion, tmp_path):
    tables, artifacts = [], []
    for run in ("a", "b"):
        table = {}
        out = tmp_path / run
        for interp in ia.INTERPRETATIONS:
            rep = ia.run_audit("t0", DIMS, TRIALS, SEED, 1e-9, interpretation=interp, artifact_dir=out)
            table[interp] = rep.extras["side_violations"]
            # every persisted instance reproduces its recorded margin and failed sides
            for v in rep.violations[:25]:
                again = ia.evaluate_instance("t0", la.read_matrix(v.artifact_path), interpretation=interp)
                assert again.margin == v.margin
                assert [s for s, m in again.side_margins.items() if m < -1e-9] == v.sides
            assert len(list(out.glob(f"t0-{interp}_*.mat"))) == len(rep.violations)
        tables.append(table)
        artifacts.append({p.name: p.read_bytes() for p in out.glob("*.mat")})
    example = ia.t0_sides(np.eye(2), 2.25 * np.eye(2), "floor_t1")
    ok = tables[0] == tables[1] and artifacts[0] == artifacts[1] and example.lower_margin < 0
    criterion(6, ok, f"verdict table {tables[0]}; {len(artifacts[0])} instances persisted identically twice; "
                     f"x=I2, a=2.25 I2 floor_t1 lower margin {example.lower_margin:.4f}")


@pytest.mark.parametrize("check", ["kyfan", "weyl", "submult", "pm_order", "ab_ba"])
def test_criterion_7_background_facts(criterion, check):
    rep = ia.run_audit(check, DIMS, TRIALS, SEED, 1e-9)
    ok = rep.trials == 7000 and rep.clean
    criterion(7, ok, f"{check}: {rep.trials} trials, {len(rep.violations)} violations, "
                     f"min margin {rep.min_margin:.3g}")


def test_criterion_8_geometry(criterion):
    t0 = time.perf_counter()
    notes, ok = [], True
    for name, model in wg.builtin_models().items():
        pts = model.grid(5)
        cr = max(wg.check_cr_structure(model, pts).values())
        dt = wg.check_dt_minimality(model, pts)
        xi = wg.check_xi_relations(model, pts)["h_xi_xi_max"]
        verdict = wg.check_warping_bound(model, pts)
        good = cr < 1e-7 and dt < 1e-6 and xi < 1e-8 and verdict.min_margin >= -1e-6
        if name in ("flat-product", "chen-cone"):
            good &= verdict.verdict == "equality" and verdict.max_abs_margin < 1e-6
        if name == "chen-cone":
            for r in verdict.records:
                target = 2.0 / (r.point[0] ** 2 + r.point[1] ** 2)
                good &= abs(r.h_sq - target) < 1e-6 and abs(r.rhs - target) < 1e-6
        if name == "circle-fiber":
            good &= verdict.verdict == "strict" and all(abs(r.margin - 1) < 1e-6 for r in verdict.records)
        ok &= good
        notes.append(f"{name}={verdict.verdict}(ok={good}, cr={cr:.1e}, dt={dt:.1e}, xi={xi:.1e})")
    secs = time.perf_counter() - t0
    criterion(8, ok and secs < 30, f"{'; '.join(notes)} in {secs:.1f}s")


def test_criterion_9_determinism(criterion, tmp_path):
    runs = [
        ["matrix-audit", "--check", "t010", "--dims", "2..8", "--trials", "200"],
        ["matrix-audit", "--check", "t0", "--interpretation", "all", "--dims", "2..8", "--trials", "100"],
        ["matrix-audit", "--check", "weighted_harmonic", "--dims", "2..8", "--trials", "200"],
        ["sweep", "--check", "harmonic", "--dims", "2..100000"],
        ["geometry", "--model", "chen-cone", "--format", "csv"],
    ]
    same = []
    for i, argv in enumerate(runs):
        texts = []
        for rep in ("a", "b"):
            out = tmp_path / f"{i}{rep}" / "report.out"
            cli.run(cli.config_from_args([*argv, "--out", str(out)]))
            text = out.read_text().replace(str(out.parent), "<out>")
            if argv[-1] != "csv":
                data = json.loads(text)
                data.pop("started_unix_seconds")
                text = json.dumps(data, indent=2)
            texts.append(text)
        same.append(texts[0] == texts[1])
    criterion(9, all(same), f"{sum(same)}/{len(runs)} repeated audits byte-identical (timestamps excluded)")
