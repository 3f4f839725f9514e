"""Command-line interface: info, analytic, simulate, compare, verify.

Exit codes: 0 success, 1 check failure, 2 usage error, 3 I/O error.
All configuration travels through flags (no environment variables) so
every run is reproducible from its manifest.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import os
import sys

from . import analytic, sphere, verification
from .channel import ChannelConfig, simulate
from .output import CurveTable, gnuplot_script, parse_snr_grid, write_manifest
from .permutation import Constellation

DEFAULT_GRID = "-10:30:0.25"

# Comparison defaults: sphere-model curves at n=1e5 for the standard rate
# ladder, and the permutation-constellation shapes whose Stirling-form
# rates match those labels.
COMPARE_SPHERE_N = 100_000
COMPARE_SPHERE_RATES = (2, 4, 6, 8)
COMPARE_PERM_SHAPES = ((2, 1, 50), (4, 2, 50), (6, 4, 30), (8, 8, 20))


def _utc_now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def _parse_pdem(text: str) -> list[float]:
    out = []
    for part in text.split(","):
        value = float(part)
        if not 0.0 < value < 1.0:
            raise ValueError(f"p_dem targets must lie in (0, 1), got {value}")
        out.append(value)
    return out


def _k_from_rate(rf: float) -> int:
    exponent = (rf - 2.0) / 2.0
    k = 2.0**exponent
    if exponent < 0 or abs(k - round(k)) > 1e-9:
        raise ValueError(
            f"rate {rf} does not map to an integer k via k = 2^((rf-2)/2)"
        )
    return int(round(k))


def _try(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ValueError:
        return None


def cmd_info(args) -> int:
    con = Constellation(k=args.k, q=args.q)
    rho0_exact = sphere.shannon_limit(con.rf_exact)
    rho0_approx = sphere.shannon_limit(con.rf_approx)
    print(f"k                = {con.k}")
    print(f"q                = {con.q}")
    print(f"n                = {con.n}")
    print(f"N                = {con.dim}")
    print(f"log2_signals     = {con.log2_signal_count:.12g}")
    print(f"rf_exact         = {con.rf_exact:.12g}")
    print(f"rf_approx        = {con.rf_approx:.12g}")
    print(f"level_spacing    = {con.level_spacing:.12g}")
    print(f"rho_s0(rf_exact) = {rho0_exact:.12g}")
    print(f"rho_s0(rf_approx)= {rho0_approx:.12g}")
    return 0


def _sphere_table(rf: float, n: int, grid, targets: list[float]) -> CurveTable:
    columns = [
        "snr_db", "snr", "rho0_ratio",
        "p_sphere", "p_chernoff", "p_chi2",
        "loss_sphere", "loss_chernoff",
    ]
    for t in targets:
        columns += [f"loss_sphere_p{t:g}", f"loss_chernoff_p{t:g}"]
    columns.append("flag")
    table = CurveTable(columns)
    rho0 = sphere.shannon_limit(rf)
    for pt in grid:
        ratio = pt.linear / rho0
        p_sp = sphere.error_prob_sphere(n, pt.linear, rf)
        p_ch = sphere.error_prob_chernoff(n, ratio)
        p_x2 = sphere.error_prob_chi2(n, ratio)
        flags = []
        if ratio <= 1.0:
            flags.append("below_limit")
        loss_sp = loss_ch = None
        if p_sp > 0.0:
            loss_sp = sphere.energy_loss_sphere(rf, n, p_sp)
        if p_ch > 0.0:
            loss_ch = sphere.energy_loss_chernoff(n, p_ch)
        if p_sp == 0.0 or p_ch == 0.0:
            flags.append("underflow")
        row = {
            "snr_db": pt.db, "snr": pt.linear, "rho0_ratio": ratio,
            "p_sphere": p_sp, "p_chernoff": p_ch, "p_chi2": p_x2,
            "loss_sphere": loss_sp, "loss_chernoff": loss_ch,
            "flag": ";".join(flags),
        }
        for t in targets:
            row[f"loss_sphere_p{t:g}"] = sphere.energy_loss_sphere(rf, n, t)
            row[f"loss_chernoff_p{t:g}"] = sphere.energy_loss_chernoff(n, t)
        table.add_row(row)
    return table


def _perm_table(k: int, n: int, grid, targets: list[float]) -> CurveTable:
    columns = [
        "snr_db", "snr", "d_min",
        "p_union_raw", "p_union", "p_exact",
        "loss_closed_exact", "loss_closed_approx", "loss_numeric",
    ]
    for t in targets:
        columns += [
            f"loss_closed_exact_p{t:g}",
            f"loss_closed_approx_p{t:g}",
            f"loss_numeric_p{t:g}",
        ]
    columns.append("flag")
    table = CurveTable(columns)
    for pt in grid:
        d = analytic.predicted_min_distance(k, n, pt.linear)
        p_raw = analytic.message_error_union_raw(n, d)
        p_u = analytic.message_error_union(n, d)
        p_ex = analytic.message_error_exact(n, d)
        flags = []
        if p_raw > 1.0:
            flags.append("clamped")
        loss_ce = loss_ca = loss_nm = None
        if 0.0 < p_u < 1.0:
            loss_ce = _try(analytic.energy_loss_closed_form, k, n, p_u, "exact")
            loss_ca = _try(analytic.energy_loss_closed_form, k, n, p_u, "approx")
            loss_nm = _try(analytic.energy_loss_numeric, k, n, p_u, "exact")
            if loss_ce is None or loss_ca is None:
                flags.append("invalid_region")
        elif p_u == 0.0:
            flags.append("underflow")
        row = {
            "snr_db": pt.db, "snr": pt.linear, "d_min": d,
            "p_union_raw": p_raw, "p_union": p_u, "p_exact": p_ex,
            "loss_closed_exact": loss_ce, "loss_closed_approx": loss_ca,
            "loss_numeric": loss_nm,
            "flag": ";".join(flags),
        }
        for t in targets:
            row[f"loss_closed_exact_p{t:g}"] = _try(
                analytic.energy_loss_closed_form, k, n, t, "exact"
            )
            row[f"loss_closed_approx_p{t:g}"] = _try(
                analytic.energy_loss_closed_form, k, n, t, "approx"
            )
            row[f"loss_numeric_p{t:g}"] = _try(
                analytic.energy_loss_numeric, k, n, t, "exact"
            )
        table.add_row(row)
    return table


def cmd_analytic(args) -> int:
    grid = parse_snr_grid(args.snr_db)
    targets = _parse_pdem(args.pdem) if args.pdem else []
    if args.family == "scsh":
        if args.rf is None or args.n is None:
            raise UsageError("family scsh requires --rf and --n")
        table = _sphere_table(args.rf, args.n, grid, targets)
        config = {"family": "scsh", "rf": args.rf, "n": args.n}
    else:
        if args.k is not None:
            k = args.k
        elif args.rf is not None:
            k = _k_from_rate(args.rf)
        else:
            raise UsageError("family scopt requires --k or --rf")
        if args.q is not None:
            n = k * args.q
        elif args.n is not None:
            n = args.n
        else:
            raise UsageError("family scopt requires --q or --n")
        table = _perm_table(k, n, grid, targets)
        config = {"family": "scopt", "k": k, "n": n,
                  "rf_exact": Constellation(k, 1).rf_exact}
    config.update({
        "snr_db": args.snr_db,
        "pdem": targets,
        "format": args.format,
    })
    started = _utc_now()
    table.write(args.out, args.format)
    manifest_path = args.out + ".manifest.json"
    write_manifest(manifest_path, "analytic", config, [args.out], started, _utc_now())
    print(f"wrote {args.out} ({len(table.rows)} rows) and {manifest_path}")
    return 0


def cmd_simulate(args) -> int:
    con = Constellation(k=args.k, q=args.q)
    grid = parse_snr_grid(args.snr_db)
    detector = {"ml": "ml", "rank": "rank", "threshold": "threshold"}[args.detector]
    columns = [
        "snr_db", "snr", "trials",
        "message_errors", "block_errors", "coordinate_errors", "invalid_blocks",
        "p_message", "p_message_lo", "p_message_hi",
        "p_coordinate", "p_coordinate_lo", "p_coordinate_hi",
        "pred_p_coordinate", "pred_p_message", "pred_p_union", "pred_p_exact",
    ]
    table = CurveTable(columns)
    reports = []
    started = _utc_now()
    for pt in grid:
        cfg = ChannelConfig(
            rho_s=pt.linear, trials=args.trials, seed=args.seed,
            detector=detector, workers=args.workers,
            chunk_size=args.chunk_size, backend=args.backend,
        )
        rep = simulate(con, cfg)
        reports.append({"snr_db": pt.db, **rep.to_dict()})
        d = analytic.predicted_min_distance(con.k, con.n, pt.linear)
        table.add_row({
            "snr_db": pt.db, "snr": pt.linear, "trials": rep.trials,
            "message_errors": rep.message_errors,
            "block_errors": rep.block_errors,
            "coordinate_errors": rep.coordinate_errors,
            "invalid_blocks": rep.invalid_blocks,
            "p_message": rep.p_message,
            "p_message_lo": rep.p_message_ci[0],
            "p_message_hi": rep.p_message_ci[1],
            "p_coordinate": rep.p_coordinate,
            "p_coordinate_lo": rep.p_coordinate_ci[0],
            "p_coordinate_hi": rep.p_coordinate_ci[1],
            "pred_p_coordinate": analytic.coordinate_error_rate(con.k, pt.linear),
            "pred_p_message": analytic.message_error_product(con.k, con.q, pt.linear),
            "pred_p_union": analytic.message_error_union(con.n, d),
            "pred_p_exact": analytic.message_error_exact(con.n, d),
        })
    data_path = f"{args.out}.{args.format}"
    table.write(data_path, args.format)
    reports_path = f"{args.out}_reports.json"
    with open(reports_path, "w", encoding="utf-8") as fh:
        json.dump(reports, fh, indent=1)
        fh.write("\n")
    config = {
        "k": args.k, "q": args.q, "snr_db": args.snr_db,
        "trials": args.trials, "seed": args.seed, "detector": args.detector,
        "workers": args.workers, "chunk_size": args.chunk_size,
        "backend": args.backend, "format": args.format,
    }
    manifest_path = f"{args.out}_manifest.json"
    write_manifest(
        manifest_path, "simulate", config, [data_path, reports_path],
        started, _utc_now(),
    )
    print(f"wrote {data_path}, {reports_path}, {manifest_path}")
    return 0


def cmd_compare(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    grid = parse_snr_grid(args.snr_db)
    started = _utc_now()
    files = []
    curves = []
    for rf in COMPARE_SPHERE_RATES:
        table = CurveTable(["snr_db", "snr", "rho0_ratio", "p_sphere", "p_chernoff"])
        rho0 = sphere.shannon_limit(float(rf))
        for pt in grid:
            ratio = pt.linear / rho0
            table.add_row({
                "snr_db": pt.db, "snr": pt.linear, "rho0_ratio": ratio,
                "p_sphere": sphere.error_prob_sphere(COMPARE_SPHERE_N, pt.linear, float(rf)),
                "p_chernoff": sphere.error_prob_chernoff(COMPARE_SPHERE_N, ratio),
            })
        path = os.path.join(args.out, f"sphere_rf{rf}.csv")
        table.write(path, "csv")
        files.append(path)
        curves.append((os.path.basename(path), f"sphere rf={rf}", 4, "dashtype 2"))
    for rf_label, k, n in COMPARE_PERM_SHAPES:
        rf_exact = Constellation(k, 1).rf_exact
        table = CurveTable(
            ["snr_db", "snr", "rf_exact", "d_min", "p_union", "p_exact"]
        )
        for pt in grid:
            d = analytic.predicted_min_distance(k, n, pt.linear)
            table.add_row({
                "snr_db": pt.db, "snr": pt.linear, "rf_exact": rf_exact,
                "d_min": d,
                "p_union": analytic.message_error_union(n, d),
                "p_exact": analytic.message_error_exact(n, d),
            })
        path = os.path.join(args.out, f"perm_rf{rf_label}.csv")
        table.write(path, "csv")
        files.append(path)
        curves.append((os.path.basename(path), f"perm rf~{rf_label} n={n}", 5, ""))
    script = gnuplot_script(
        "error_prob.png", curves, "message error probability vs SNR"
    )
    script_path = os.path.join(args.out, "error_prob_curves.gp")
    with open(script_path, "w", encoding="utf-8") as fh:
        fh.write(script)
    files.append(script_path)
    config = {"snr_db": args.snr_db, "sphere_n": COMPARE_SPHERE_N,
              "sphere_rates": list(COMPARE_SPHERE_RATES),
              "perm_shapes": [list(s) for s in COMPARE_PERM_SHAPES]}
    manifest_path = os.path.join(args.out, "manifest.json")
    write_manifest(manifest_path, "compare", config, files, started, _utc_now())
    print(f"wrote {len(files)} files + manifest under {args.out}")
    return 0


def cmd_verify(args) -> int:
    results = verification.run_all(fast=args.fast)
    total = 0.0
    failed = 0
    for res in results:
        total += res.elapsed
        status = "PASS" if res.passed else "FAIL"
        if not res.passed:
            failed += 1
        print(f"[{status}] {res.name} ({res.elapsed:.2f}s): {res.detail}")
    print(f"{len(results) - failed}/{len(results)} checks passed in {total:.1f}s")
    if args.out:
        summary = {
            "passed": failed == 0,
            "elapsed": total,
            "checks": [
                {"name": r.name, "passed": r.passed, "detail": r.detail,
                 "elapsed": r.elapsed}
                for r in results
            ],
        }
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=1, sort_keys=True)
            fh.write("\n")
    return 1 if failed else 0


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="constlab",
        description="permutation-constellation laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_info = sub.add_parser("info", help="constellation parameter table")
    p_info.add_argument("--k", type=int, required=True)
    p_info.add_argument("--q", type=int, required=True)
    p_info.set_defaults(fn=cmd_info)

    p_an = sub.add_parser("analytic", help="closed-form sweep to CSV/JSON")
    p_an.add_argument("--family", choices=("scsh", "scopt"), required=True)
    p_an.add_argument("--rf", type=float)
    p_an.add_argument("--n", type=int)
    p_an.add_argument("--k", type=int)
    p_an.add_argument("--q", type=int)
    p_an.add_argument("--snr-db", default=DEFAULT_GRID)
    p_an.add_argument("--pdem", help="comma-separated error-probability targets")
    p_an.add_argument("--out", required=True)
    p_an.add_argument("--format", choices=("csv", "json"), default="csv")
    p_an.set_defaults(fn=cmd_analytic)

    p_sim = sub.add_parser("simulate", help="Monte Carlo sweep")
    p_sim.add_argument("--k", type=int, required=True)
    p_sim.add_argument("--q", type=int, required=True)
    p_sim.add_argument("--snr-db", default=DEFAULT_GRID)
    p_sim.add_argument("--trials", type=int, required=True)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--detector", choices=("threshold", "rank", "ml"), default="rank")
    p_sim.add_argument("--workers", type=int, default=1)
    p_sim.add_argument("--chunk-size", type=int, default=32768)
    p_sim.add_argument("--backend", choices=("auto", "compiled", "python"), default="auto")
    p_sim.add_argument("--out", required=True, help="output path prefix")
    p_sim.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sim.set_defaults(fn=cmd_simulate)

    p_cmp = sub.add_parser("compare", help="emit the standard curve families")
    p_cmp.add_argument("--out", default="compare_out")
    p_cmp.add_argument("--snr-db", default=DEFAULT_GRID)
    p_cmp.set_defaults(fn=cmd_compare)

    p_ver = sub.add_parser("verify", help="run all cross-module checks")
    p_ver.add_argument("--out", help="write machine-readable summary JSON")
    p_ver.add_argument("--fast", action="store_true", help="reduced Monte Carlo sizes")
    p_ver.set_defaults(fn=cmd_verify)
    return parser


def _merge_negative_grid(argv: list[str]) -> list[str]:
    """Join '--snr-db -10:30:0.25' into one token so argparse does not
    mistake the negative start for an option."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok == "--snr-db" and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"--snr-db={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(_merge_negative_grid(list(argv)))
    try:
        return args.fn(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits 2
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
