"""Command-line front end.

Subcommands:
    bounds sweep FILE   evaluate outer-bound families over a blocklength sweep
    ed latency FILE     early-decoding latency table over a blocklength sweep
    verify FILE         Monte Carlo checks, NDJSON report stream
    timesharing FILE    finite-blocklength time-sharing curves

Each takes a scenario file and writes CSV (plus optional SVG).  Relative
output paths land in $HBGBC_OUT_DIR when that is set.
"""

import argparse
import json
import math
import os
import sys
from typing import List, Optional

from tomli import TOMLDecodeError

from .scalar import cap, disp_shell, q_inv
from .bounds import sato_het, sato_hom, single_user_bound
from .early_decoding import (
    InfeasibleError,
    ed_best_allocation,
    ed_min_blocklength,
    effective_gains,
)
from .mc import (
    McConfig,
    simulate_dt_decoder,
    verify_coop_density,
    verify_error_decomposition,
    verify_rx1_density,
    verify_sic1_density,
)
from .report import (
    BOUNDS_HEADER,
    ED_HEADER,
    TS_HEADER,
    CurveRecord,
    render_svg,
    write_csv,
    write_ndjson,
)
from .scenario_file import RunSpec, load_run
from .timesharing import pair_rates, solo_rate_pair, ts_rates


def sweep_records(run: RunSpec, order: str) -> List[CurveRecord]:
    """Evaluate the requested bound families at every sweep point."""
    n1_values = run.sweep.values() if run.sweep else [run.n1]
    recs = []
    for n1 in n1_values:
        s = run.scenario_for(n1)
        for fam in run.families:
            if fam == "sato_het":
                bits = sato_het(s, order).sum_bits
                per = bits / s.n1
            elif fam == "sato_hom":
                bits = sato_hom(s, order).sum_bits
                per = bits / s.n1
            elif fam == "single_user_1":
                bits = single_user_bound(s, 1, order)
                per = bits / s.n1
            else:
                bits = single_user_bound(s, 2, order)
                per = bits / s.n2
            recs.append(CurveRecord(run.scenario_id, f"{fam}_bits",
                                    "n1", n1, "log_m_bits", bits, order))
            recs.append(CurveRecord(run.scenario_id, f"{fam}_per_use",
                                    "n1", n1, "rate_bits_per_use", per, order))
    return recs


def _ed_latency_point(run: RunSpec, n1: int):
    eps1, eps2 = run.eps_pair
    p1, p2 = run.power_pair
    delta = run.delta_fraction * p2

    def pass_at(n2: int):
        s = run.scenario_for(n1, n2, prefer="split")
        g = effective_gains(s, delta)
        p = n2 / n1
        c_bar1 = p * float(cap(g.g1 * p1)) + (1.0 - p) * float(cap(s.h1 * p1))
        v_bar1 = (p * float(disp_shell(g.g1 * p1))
                  + (1.0 - p) * float(disp_shell(s.h1 * p1)))
        log_m1 = n1 * c_bar1 - math.sqrt(n1 * v_bar1) * q_inv(eps1)
        if log_m1 <= 0.0:
            raise InfeasibleError(
                f"user 1 supports no message at n1={n1} "
                f"(log_m1={log_m1:.3f} bits)"
            )
        alloc = ed_best_allocation(s, (eps1, eps2), log_m1,
                                   include_log_k=run.include_log_k,
                                   delta=delta)
        floor = ed_min_blocklength(log_m1, g.g2 * p1, alloc.eps_sic1,
                                   run.include_log_k)
        return log_m1, alloc, floor, g

    # log M1 depends on n2 through the interference fraction, and the
    # floor depends on log M1; iterate to the joint fixed point.
    n2 = n1
    prev = None
    for _ in range(200):
        log_m1, alloc, floor, g = pass_at(n2)
        n2_next = min(floor, n1)
        if n2_next == n2:
            break
        if prev is not None and n2_next == prev:
            # two-cycle from the integer ceiling; take the safe side
            n2 = max(n2, n2_next)
            log_m1, alloc, floor, g = pass_at(n2)
            break
        prev = n2
        n2 = n2_next
    if floor > n1:
        raise InfeasibleError(
            f"early decoding needs n2={floor} > n1={n1}; "
            f"the prefix cannot carry user 1's message"
        )
    n2_asym = math.ceil(log_m1 / float(cap(g.g2 * p1)))
    return [n1, log_m1, floor, n2_asym, alloc.eps_sic1]


def ed_latency_rows(run: RunSpec) -> List[list]:
    n1_values = run.sweep.values() if run.sweep else [run.n1]
    return [_ed_latency_point(run, n1) for n1 in n1_values]


def verify_reports(run: RunSpec, seed: Optional[int] = None) -> list:
    mc = run.mc
    sd = mc["seed"] if seed is None else seed
    sig = mc["confidence_sigmas"]
    reports = []
    for check in mc["checks"]:
        if check in ("sic1_density", "rx1_density"):
            s = run.scenario_for(mc["n1"], mc["n2"], prefer="split")
            cfg = McConfig(trials=mc["trials"], seed=sd, n1=mc["n1"],
                           n2=mc["n2"], scenario=s, confidence_sigmas=sig)
            fn = (verify_sic1_density if check == "sic1_density"
                  else verify_rx1_density)
            reports.append(fn(cfg))
        elif check == "coop_density":
            prefer = "sum" if run.power_sum is not None else "any"
            s = run.scenario_for(mc["n1"], mc["n2"], prefer=prefer)
            cfg = McConfig(trials=mc["trials"], seed=sd, n1=mc["n1"],
                           n2=mc["n2"], scenario=s, confidence_sigmas=sig)
            reports.append(verify_coop_density(cfg, mc["rho"]))
        elif check == "dt_decoder":
            d = mc["dt"]
            prefer = "split" if run.power_pair is not None else "sum"
            s = run.scenario_for(d["n1"], d["n2"], prefer=prefer)
            cfg = McConfig(trials=d["trials"], seed=sd, n1=d["n1"],
                           n2=d["n2"], scenario=s, confidence_sigmas=sig)
            reports.append(simulate_dt_decoder(cfg, d["messages"]))
        else:
            d = mc["decomp"]
            s = run.scenario_for(d["n1"], d["n2"], prefer="split")
            cfg = McConfig(trials=d["trials"], seed=sd, n1=d["n1"],
                           n2=d["n2"], scenario=s, confidence_sigmas=sig)
            reports.append(verify_error_decomposition(
                cfg, d["messages_1"], d["messages_2"]))
    return reports


def _alpha_grid(step: float) -> List[float]:
    k = round(1.0 / step)
    if abs(k * step - 1.0) < 1e-9:
        return [i / k for i in range(k + 1)]
    vals, a = [], 0.0
    while a < 1.0 - 1e-12:
        vals.append(a)
        a += step
    vals.append(1.0)
    return vals


def timesharing_records(run: RunSpec) -> List[CurveRecord]:
    power = run.power_sum if run.power_sum is not None else sum(run.power_pair)
    a = solo_rate_pair(1, run.h1, power, run.eps)
    b = solo_rate_pair(2, run.h2, power, run.eps)
    alphas = _alpha_grid(run.alpha_step)
    recs = [
        CurveRecord(run.scenario_id, "asymptotic", "rate1_normalized",
                    alpha, "rate2_normalized", 1.0 - alpha, "first", "ok")
        for alpha in alphas
    ]
    for n in run.ts_blocklengths:
        r10 = pair_rates(a, n)[0]
        r20 = pair_rates(b, n)[1]
        if r10 <= 0.0 or r20 <= 0.0:
            raise InfeasibleError(
                f"n={n} is too short for a positive single-user rate"
            )
        for alpha in alphas:
            r1, r2 = ts_rates(a, b, alpha, n)
            sub1 = alpha * n
            sub2 = (1.0 - alpha) * n
            low = (0.0 < sub1 < 64.0) or (0.0 < sub2 < 64.0)
            recs.append(CurveRecord(
                run.scenario_id, f"n{n}", "rate1_normalized", r1 / r10,
                "rate2_normalized", r2 / r20, "second",
                "low" if low else "ok"))
    return recs


def _out_path(explicit: Optional[str], from_file: Optional[str],
              default_name: str) -> str:
    path = explicit or from_file or default_name
    if not os.path.isabs(path):
        base = os.environ.get("HBGBC_OUT_DIR")
        if base:
            path = os.path.join(base, path)
    return path


def _svg_path(run: RunSpec, csv_path: str) -> str:
    if run.out_svg:
        return _out_path(None, run.out_svg, run.out_svg)
    root, _ = os.path.splitext(csv_path)
    return root + ".svg"


def cmd_bounds_sweep(args) -> int:
    run = load_run(args.file)
    order = args.order or run.order
    recs = sweep_records(run, order)
    csv_path = _out_path(args.out, run.out_csv,
                         f"{run.scenario_id}_bounds.csv")
    write_csv(csv_path, BOUNDS_HEADER, [r.row() for r in recs])
    print(f"wrote {csv_path} ({len(recs)} records)")
    if args.svg or run.out_svg:
        svg = _svg_path(run, csv_path)
        render_svg(svg, [r for r in recs if r.y_name == "rate_bits_per_use"],
                   title=run.scenario_id)
        print(f"wrote {svg}")
    return 0


def cmd_ed_latency(args) -> int:
    run = load_run(args.file)
    rows = ed_latency_rows(run)
    csv_path = _out_path(args.out, run.out_csv, f"{run.scenario_id}_ed.csv")
    write_csv(csv_path, ED_HEADER, rows)
    print(f"wrote {csv_path} ({len(rows)} rows)")
    if args.svg or run.out_svg:
        recs = []
        for n1, _, n2_shell, n2_asym, _e in rows:
            recs.append(CurveRecord(run.scenario_id, "n2_shell", "n1", n1,
                                    "blocklength", float(n2_shell), run.order))
            recs.append(CurveRecord(run.scenario_id, "n2_asymptotic", "n1", n1,
                                    "blocklength", float(n2_asym), run.order))
        svg = _svg_path(run, csv_path)
        render_svg(svg, recs, title=run.scenario_id)
        print(f"wrote {svg}")
    return 0


def cmd_verify(args) -> int:
    run = load_run(args.file)
    reports = verify_reports(run, seed=args.seed)
    dicts = [r.to_json_dict() for r in reports]
    for d in dicts:
        sys.stdout.write(json.dumps(d) + "\n")
    if args.out:
        write_ndjson(_out_path(args.out, None, args.out), dicts)
    return 0 if all(r.passed for r in reports) else 1


def cmd_timesharing(args) -> int:
    run = load_run(args.file)
    recs = timesharing_records(run)
    csv_path = _out_path(args.out, run.out_csv, f"{run.scenario_id}_ts.csv")
    write_csv(csv_path, TS_HEADER, [r.row(with_confidence=True) for r in recs])
    print(f"wrote {csv_path} ({len(recs)} records)")
    if args.svg or run.out_svg:
        svg = _svg_path(run, csv_path)
        render_svg(svg, recs, title=run.scenario_id)
        print(f"wrote {svg}")
    return 0


def _add_common(sp, with_order: bool, with_svg: bool = True):
    sp.add_argument("file", help="scenario file (TOML)")
    sp.add_argument("--out", help="output path; overrides the scenario file")
    if with_svg:
        sp.add_argument("--svg", action="store_true",
                        help="also render an SVG plot next to the CSV")
    if with_order:
        sp.add_argument("--order", choices=["first", "second", "halflogn"],
                        help="expansion order; overrides the scenario file")
    sp.add_argument("--seed", type=int,
                    help="override the scenario file's seed")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hbgbc",
        description="Rate bounds and latency tools for the two-user "
                    "Gaussian broadcast channel with per-user blocklengths.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bounds", help="outer-bound evaluations")
    bsub = b.add_subparsers(dest="subcommand", required=True)
    bs = bsub.add_parser("sweep", help="evaluate bound families over a sweep")
    _add_common(bs, with_order=True)
    bs.set_defaults(fn=cmd_bounds_sweep)

    e = sub.add_parser("ed", help="early-decoding tools")
    esub = e.add_subparsers(dest="subcommand", required=True)
    el = esub.add_parser("latency",
                         help="minimum early-decoding blocklength sweep")
    _add_common(el, with_order=False)
    el.set_defaults(fn=cmd_ed_latency)

    v = sub.add_parser("verify", help="Monte Carlo verification checks")
    _add_common(v, with_order=False, with_svg=False)
    v.set_defaults(fn=cmd_verify)

    t = sub.add_parser("timesharing", help="finite-blocklength time sharing")
    _add_common(t, with_order=False)
    t.set_defaults(fn=cmd_timesharing)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError, TOMLDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
