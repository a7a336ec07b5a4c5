"""Command-line entry point: ``python -m jumpform <command>``.

Exit codes: 0 success, 1 a verification failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import contextlib
import sys
from pathlib import Path

import numpy as np

from . import acceptance, brown, io
from .errors import BadConfig, JumpformError, VerificationFailure
from .montecarlo import McConfig, run_mc
from .quadrature import QuadratureConfig
from .squarefns import SQUARE_FUNCTIONS, square_function_report
from .verifiers import compare_to_baseline, hardy_stein_check, load_baseline, write_baseline


@contextlib.contextmanager
def _output(target: str):
    if target == "-":
        yield sys.stdout
    else:
        with open(target, "w", newline="") as fh:
            yield fh


def _field(args, chain):
    return io.resolve_field(args.f, chain)


def cmd_inspect(args) -> int:
    chain = io.load_chain(args.chainfile)
    spec = chain.spec
    comps = np.unique(chain.kernel.components).size
    print(f"states          {chain.n}")
    print(f"edges           {chain.kernel.undirected_edges[0].size}")
    print(f"components      {comps}")
    print(f"conservative    {chain.gen.conservative}")
    print(f"zero modes      {spec.zero_modes.size}")
    print(f"spectral gap    {spec.gap!r}")
    print(f"lambda_max      {spec.lambda_max!r}")
    print("spectrum        " + " ".join(f"{v:.12g}" for v in spec.lambdas))
    return 0


def cmd_squarefns(args) -> int:
    chain = io.load_chain(args.chainfile)
    f = _field(args, chain)
    p_list = io.parse_list(args.p)
    try:
        config = QuadratureConfig(rel_tol=args.tol)
    except ValueError as exc:
        raise BadConfig(str(exc)) from None
    rep = square_function_report(chain.spec, chain.kernel, f, p_list, config, cross_check=args.cross_check)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = [
        {"state_index": i, **{k: rep.values(k)[i] for k in SQUARE_FUNCTIONS}} for i in range(chain.n)
    ]
    method = ";".join(f"{k}:{v}" for k, v in rep.method.items())
    norms = [
        {"p": p, **{f"norm_{k}": v[k] for k in SQUARE_FUNCTIONS}, "method": method,
         "tol": rep.quad_tolerance_achieved}
        for p, v in rep.p_norms.items()
    ]
    with open(out / "squarefns_report.csv", "w", newline="") as fh:
        io.write_csv(fh, "report", rows)
    with open(out / "squarefns_norms.csv", "w", newline="") as fh:
        io.write_csv(fh, "norms", norms)
    io.write_csv(sys.stdout, "norms", norms)
    return 0


def cmd_hardy_stein(args) -> int:
    chain = io.load_chain(args.chainfile)
    rows, worst = [], 0.0
    for seed in range(args.seeds):
        f = io.resolve_field(f"random:{seed}", chain) if args.f is None else _field(args, chain)
        for p in io.parse_list(args.p):
            r = hardy_stein_check(chain, f, p)
            worst = max(worst, r.rel_err)
            rows.append({"seed": seed, "n": chain.n, "p": p, "lhs": r.lhs, "rhs": r.rhs, "rel_err": r.rel_err})
    with _output(args.out) as fh:
        io.write_csv(fh, "hardy_stein", rows)
    if worst > args.tol:
        raise VerificationFailure(f"Hardy-Stein relative error {worst:.3e} exceeds {args.tol:g}")
    return 0


def cmd_brown(args) -> int:
    rows = []
    for p in io.parse_list(args.p):
        if p <= 1:
            raise BadConfig(f"p must exceed 1, got {p}")
        rows += brown.ratio_scan(p, io.parse_list(args.n, int), with_H=not args.no_h)
    with _output(args.out) as fh:
        io.write_csv(fh, "brown", rows)
    return 0


def cmd_mc(args) -> int:
    chain = io.load_chain(args.chainfile)
    f = _field(args, chain)
    start = args.start if args.start == "stationary" else int(args.start)
    cfg = McConfig(T=args.T, paths=args.paths, seed=args.seed, start_state=start)
    rep = run_mc(chain, f, cfg)
    row = {"seed": args.seed, "n": chain.n, "T": args.T, "paths": args.paths,
           **{k: getattr(rep, k) for k in io.SCHEMAS["mc"][4:]}}
    with _output(args.out) as fh:
        io.write_csv(fh, "mc", [row])
    if not rep.identities_hold():
        gaps = rep.identity_gaps()
        raise VerificationFailure(
            f"bracket identities off by {gaps['M2']:.2f} and {gaps['square']:.2f} standard errors"
        )
    return 0


def cmd_verify_all(args) -> int:
    failed = 0
    for crit in acceptance.CRITERIA:
        res = crit(args.seed_base)
        print(res.line, flush=True)
        failed += not res.passed
    rows = acceptance.estimate_scans(args.seed_base)
    if args.write_baseline:
        write_baseline(rows, args.write_baseline)
        print(f"baseline written to {args.write_baseline}")
    baseline = load_baseline(args.baseline or acceptance.shipped_baseline_path())
    problems = compare_to_baseline(rows, baseline)
    status = "PASS" if not problems else "FAIL"
    print(f"[{status}] scans L^p estimate ratios vs baseline: {len(rows)} rows, {len(problems)} regressions")
    for msg in problems:
        print(f"       {msg}")
    failed += bool(problems)
    print(f"{failed} failing item(s)")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jumpform", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("inspect", help="validate a chain file and print its spectrum")
    p.add_argument("chainfile")
    p.set_defaults(run=cmd_inspect)

    p = sub.add_parser("squarefns", help="the four square functions of a field")
    p.add_argument("chainfile")
    p.add_argument("--f", required=True, help="field file or preset (random:S, meanzero:S, eigen:K, indicator:I, brown)")
    p.add_argument("--p", default="2", help="comma-separated exponents")
    p.add_argument("--tol", type=float, default=1e-10, help="quadrature relative tolerance")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--cross-check", action="store_true", help="also run quadrature where closed forms exist")
    p.set_defaults(run=cmd_squarefns)

    p = sub.add_parser("hardy-stein", help="Hardy-Stein identity on seeded random fields")
    p.add_argument("chainfile")
    p.add_argument("--p", default="1.5,2,2.5,3,4")
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--f", default=None, help="fixed field instead of seeded random ones")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--out", default="-")
    p.set_defaults(run=cmd_hardy_stein)

    p = sub.add_parser("brown", help="ratio scan on the counterexample chain family")
    p.add_argument("--p", default="4")
    p.add_argument("--n", default="8,16,32,64,128,256")
    p.add_argument("--no-h", action="store_true", help="skip the H column")
    p.add_argument("--out", default="-")
    p.set_defaults(run=cmd_brown)

    p = sub.add_parser("mc", help="Monte Carlo bracket identities")
    p.add_argument("chainfile")
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--f", default="random:0")
    p.add_argument("--start", default="0", help="state index or 'stationary'")
    p.add_argument("--out", default="-")
    p.set_defaults(run=cmd_mc)

    p = sub.add_parser("verify-all", help="run the acceptance suite and the estimate scans")
    p.add_argument("--baseline", default=None, help="baseline JSON (default: the packaged one)")
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--write-baseline", default=None, metavar="FILE")
    p.set_defaults(run=cmd_verify_all)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except VerificationFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1
    except BadConfig as exc:
        print(f"bad input: {exc}", file=sys.stderr)
        return 2
    except JumpformError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
