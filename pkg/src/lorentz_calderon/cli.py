"""Command-line front end: verdict | sweep | kfunc | counterexample | selftest.

Exit codes: 0 success, 1 self-test failure, 2 bad flags or invalid parameters.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import List, Optional

import numpy as np

from . import __version__, selftest
from .calderon import OPERATORS
from .errors import LorentzCalderonError, NoSolution, SpecError
from .families import FamilySpec, corpus, counterexample_table, parse_function, sweep_ratio
from .kfunc import bracket, domain_couple, oracle_K_profile, target_couple
from .lorentz import DEFAULT_PPD
from .params import CLAUSES, INF, Exponent, LorentzSpec, derive, r1r2_solve, verdict_combined, verdict_R, verdict_S

SCHEMA_VERSION = 1
PPD_ENV = "RI_GRID_PPD"


def fmt(x) -> str:
    """17 significant digits; ``inf``/``nan`` spelled out."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _exponent(text: str) -> Exponent:
    try:
        return Exponent.parse(text)
    except LorentzCalderonError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _lorentz(text: str) -> LorentzSpec:
    try:
        return LorentzSpec.parse(text)
    except LorentzCalderonError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _float_list(text: str) -> List[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def resolve_ppd(flag: Optional[int]) -> int:
    if flag is not None:
        ppd = flag
    else:
        env = os.environ.get(PPD_ENV)
        if env is None or not env.strip():
            return DEFAULT_PPD
        try:
            ppd = int(env)
        except ValueError:
            raise SpecError(f"{PPD_ENV} must be a positive integer (got {env!r})") from None
    if ppd < 1:
        raise SpecError(f"grid density must be a positive integer (got {ppd})")
    return ppd


def _add_params(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("parameters (exact rationals such as 3/2, or inf)")
    for name in ("p0", "q0", "p1", "q1"):
        g.add_argument(f"--{name}", type=_exponent, default=Exponent(2))
    g.add_argument("--q", type=_exponent, default=Exponent(4))


def _params(args):
    return derive(args.p0, args.q0, args.p1, args.q1, args.q)


def _params_dict(P):
    return {
        "p0": str(P.p0), "q0": str(P.q0), "p1": str(P.p1), "q1": str(P.q1), "q": str(P.q),
        "r": str(P.r), "alpha": str(P.alpha), "r1_min": str(P.r1_min),
        "regime": "A" if P.regime_a else "B",
    }


def _meta_lines(args, P, ppd, extra=()):
    lines = [
        f"# schema_version={SCHEMA_VERSION}",
        f"# lorentz-calderon {__version__} {args.command}",
        "# params " + " ".join(f"{k}={v}" for k, v in _params_dict(P).items()),
        f"# grid_ppd={ppd}",
    ]
    lines.extend(f"# {e}" for e in extra)
    return lines


def cmd_verdict(args, out) -> int:
    P = _params(args)
    r1, s1 = args.r1, args.s1
    try:
        r2_derived = r1r2_solve(P, r1=r1)
    except NoSolution:
        r2_derived = None
    r2 = args.r2
    r2_eff = r2 if r2 is not None else r2_derived
    if args.s2 is not None:
        s2 = args.s2
    elif r2_eff is not None and r2_eff.infinite:
        s2 = INF
    elif r2_eff is not None and r2_eff == 1:
        s2 = Exponent(1)
    else:
        s2 = s1
    verdicts = {
        "verdict_R": verdict_R(P, r1, s1, r2, s2),
        "verdict_S": verdict_S(P, r1, s1, r2, s2),
        "verdict_combined": verdict_combined(P, r1, s1, r2, s2),
    }
    doc = {
        "schema_version": SCHEMA_VERSION,
        "params": _params_dict(P),
        "r1": str(r1),
        "s1": str(s1),
        "r2_derived": None if r2_derived is None else str(r2_derived),
        "r2": None if r2_eff is None else str(r2_eff),
        "s2": str(s2),
    }
    for k, v in verdicts.items():
        doc[k] = v.to_dict()
    doc["clauses"] = {v.clause: CLAUSES[v.clause] for v in verdicts.values()}
    out.write(json.dumps(doc, indent=2, sort_keys=False) + "\n")
    return 0


def cmd_sweep(args, out) -> int:
    P = _params(args)
    ppd = resolve_ppd(args.grid)
    fam = FamilySpec.parse(args.family, count=args.n, seed=args.seed, ppd=ppd)
    rep = sweep_ratio(args.op, args.domain, args.target, fam, P, ppd=ppd)
    lines = _meta_lines(args, P, ppd, [
        f"op={args.op} domain={args.domain.p},{args.domain.s} target={args.target.p},{args.target.s}",
        f"family={args.family} n={args.n} seed={args.seed}",
        f"outcome: {rep.label}",
    ])
    lines.append("index,family_param,norm_domain,norm_target,ratio")
    for r in rep.rows:
        lines.append(f"{r.index},{fmt(r.family_param)},{fmt(r.norm_domain)},{fmt(r.norm_target)},{fmt(r.ratio)}")
    lines.append(f"summary,max_ratio,{fmt(rep.max_ratio)},argmax,{rep.argmax}")
    out.write("\n".join(lines) + "\n")
    return 0


def cmd_kfunc(args, out) -> int:
    P = _params(args)
    ppd = resolve_ppd(args.grid)
    couple = domain_couple(P) if args.couple == "domain" else target_couple(P.p1, P.q1)
    if args.f:
        funcs = [parse_function(s, ppd) for s in args.f]
    else:
        funcs = corpus(args.seed, args.corpus, monotone_only=True)
    if args.t:
        ts = np.asarray(args.t, dtype=np.float64)
    else:
        ts = np.logspace(-3, 3, 25)
    lines = _meta_lines(args, P, ppd, [f"couple={couple.name} X={couple.X} Y={couple.Y}"])
    lines.append("f_index,t,oracle,holmstedt,ratio")
    for i, f in enumerate(funcs):
        K = oracle_K_profile(f, ts, couple, ppd)
        for t, k in zip(ts, K):
            h = couple.holmstedt(f, t)
            lines.append(f"{i},{fmt(t)},{fmt(k)},{fmt(h)},{fmt(k / h if h > 0 else math.nan)}")
    nonzero = [f for f in funcs if not f.is_zero]
    if nonzero:
        lo, hi = bracket(nonzero, ts, couple, ppd)
        lines.append(f"summary,c_min,{fmt(lo)},c_max,{fmt(hi)}")
    out.write("\n".join(lines) + "\n")
    return 0


def cmd_counterexample(args, out) -> int:
    P = _params(args)
    ppd = resolve_ppd(args.grid)
    rows = counterexample_table(P, args.tmax_list, args.r1, args.s1, args.s2, ppd)
    lines = _meta_lines(args, P, ppd, [f"r1={args.r1} s1={args.s1} s2={args.s2} r2={r1r2_solve(P, r1=args.r1)}"])
    lines.append("T,norm_f0,truncated_S_norm,loglog_ratio")
    for r in rows:
        lines.append(f"{fmt(r.T)},{fmt(r.norm_f0)},{fmt(r.truncated_S_norm)},{fmt(r.loglog_ratio)}")
    out.write("\n".join(lines) + "\n")
    return 0


def cmd_selftest(args, out) -> int:
    out.write(f"# schema_version={SCHEMA_VERSION}\n# lorentz-calderon {__version__} selftest\n")
    return selftest.run(out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lorentz-calderon", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verdict", help="symbolic boundedness verdicts for R, S and both")
    _add_params(p)
    p.add_argument("--r1", type=_exponent, required=True)
    p.add_argument("--s1", type=_exponent, required=True)
    p.add_argument("--r2", type=_exponent, default=None, help="default: solved from r1")
    p.add_argument("--s2", type=_exponent, default=None, help="default: forced value or s1")
    p.set_defaults(func=cmd_verdict)

    p = sub.add_parser("sweep", help="operator-norm ratios over a function family (CSV)")
    _add_params(p)
    p.add_argument("--op", choices=sorted(OPERATORS), required=True)
    p.add_argument("--domain", type=_lorentz, required=True, help="p,s")
    p.add_argument("--target", type=_lorentz, required=True, help="p,s")
    p.add_argument("--family", required=True, help="e.g. char:0,1 or logpow:3,1,100")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid", type=int, default=None, help=f"points per decade (env {PPD_ENV}, default {DEFAULT_PPD})")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("kfunc", help="oracle vs closed-form K-functionals (CSV)")
    _add_params(p)
    p.add_argument("--couple", choices=("domain", "target"), required=True)
    p.add_argument("--f", action="append", help="function literal (repeatable); default: random corpus")
    p.add_argument("--corpus", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t", type=float, action="append", help="t value (repeatable); default: 25 points in [1e-3, 1e3]")
    p.add_argument("--grid", type=int, default=None)
    p.set_defaults(func=cmd_kfunc)

    p = sub.add_parser("counterexample", help="growth of the truncated S-norm of the log-power profile (CSV)")
    _add_params(p)
    p.add_argument("--tmax-list", type=_float_list, default=[1e2, 1e4, 1e8, 1e16])
    p.add_argument("--r1", type=_exponent, default=Exponent(3))
    p.add_argument("--s1", type=_exponent, default=Exponent(2))
    p.add_argument("--s2", type=_exponent, default=Exponent(1))
    p.add_argument("--grid", type=int, default=None)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("selftest", help="run the invariant suite; exit 0 on full pass, 1 otherwise")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except (LorentzCalderonError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
