"""Command line: `ellrecip qexp ...` prints expansions, `ellrecip verify ...` runs suites.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or domain error,
3 internal error.  Options may also come from a `key = value` file given
with --config; flags on the command line win.
"""
from __future__ import annotations

import argparse
import sys
import traceback
from fractions import Fraction
from math import gcd
from pathlib import Path

from . import distribution as dist
from . import eisenstein as eis
from .errors import DomainError
from .moments import measure_coherence_check
from .qseries import QExpansion
from .reciprocity import (
    TadicElement,
    derive_d1,
    derive_d2,
    exp_star_verify,
    generator_grid,
    group_law_check,
    rm_logtheta_check,
)
from .reports import combine, dumps, make_report, passed, run_ordered

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3

IDENTITIES = {
    "dist": "sum over the D^2 sub-boxes of (rD)^(k-2) F_k = r^(k-2) F_k on the box",
    "borel": "T and sigma_d act on F_k and g_c through the index (a, b) -> (a, a+b), (a, db)",
    "siegel": "g_c is lift-independent, two-c symmetric, distributional up to roots of unity, D2 log g_c = c^2 E_1(x) - c E_1(cx)",
    "measure": "(k-2)! (S_(n+1) - S_n) lies in p^n Z_(p)[zeta]",
    "rm": "R_M log theta(q, q_(Mp^n)^a zeta^b) = p^-n log theta(q^(p^n), q_M^a zeta_M^b)",
    "grouplaw": "x*(g1 g2) = (x*g1)*g2 and [d1, d2] = -p^m d1",
    "reciprocity": "lim sum_(a = alpha mod M) a^(k-1) E_(u,1)(q^(p^n), q_M^a zeta_M^beta) = M^(k-1) F_u^(k)",
}


def _ints(text):
    return [int(x) for x in str(text).split(",") if x.strip()]


def _pairs(text):
    out = []
    for item in str(text).split(","):
        a, b = item.split(":")
        out.append((int(a), int(b)))
    return out


def _frac(text):
    return Fraction(str(text))


def _read_config(path):
    tokens = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"config line without '=': {raw!r}", "key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("_", "-")
        if value.lower() in ("true", "yes", "on"):
            tokens.append(f"--{key}")
        elif value.lower() not in ("false", "no", "off"):
            tokens += [f"--{key}", value]
    return tokens


# -- qexp ------------------------------------------------------------------

def _qexp(args) -> QExpansion:
    kind = args.kind
    if kind == "F":
        return eis.eisenstein_F(args.k, eis.TorsionIndex(args.L, args.a, args.b), args.prec, args.hecke_e2)
    if kind == "Fu":
        return eis.eisenstein_F_u(args.k, args.u, eis.TorsionIndex(args.L, args.a, args.b), args.prec, args.p, args.hecke_e2)
    if kind == "E":
        return eis.e_series_spec(args.k, args.s, eis.TorsionIndex(args.L, args.a, args.b), args.prec, args.lift)
    if kind == "theta":
        return eis.theta_spec(args.s, eis.TorsionIndex(args.L, args.a, args.b), args.prec, args.lift)
    if kind == "siegel_c":
        return eis.siegel_unit_c(args.c, eis.TorsionIndex(args.L, args.a, args.b), args.prec, args.lift)
    if kind == "siegel_u":
        return eis.siegel_unit_u(args.u, eis.TorsionIndex(args.L, args.a, args.b), args.prec, args.p, args.lift)
    raise DomainError(f"unknown kind {kind}")


def cmd_qexp(args):
    series = _qexp(args)
    print(series)
    if args.json:
        Path(args.json).write_text(series.to_json() + "\n")
    return EXIT_PASS


# -- verify suites -----------------------------------------------------------

def _dist_job(k, r, a, b, D, prec):
    return dist.distribution_relation_check(k, dist.CosetBox(r, a, b), D, prec)


def suite_dist(args):
    jobs = [
        (k, r, a, b, D, args.prec)
        for k in _ints(args.k)
        for r in _ints(args.levels)
        for a in range(r)
        for b in range(r)
        for D in _ints(args.D)
    ]
    return run_ordered(_dist_job, jobs, args.workers)


def suite_borel(args):
    jobs = [(k, L, args.prec) for k in _ints(args.k) for L in _ints(args.levels)]
    reports = run_ordered(dist.borel_equivariance_check, jobs, args.workers)
    cjobs = [(c, L, args.extra) for c in _ints(args.c) for L in _ints(args.levels)]
    return reports + run_ordered(dist.borel_siegel_check, cjobs, args.workers)


def _refine_job(c, L, a, b, D, extra):
    return dist.siegel_distribution_check(c, dist.CosetBox(L, a, b), D, extra)


def suite_siegel(args):
    cs, levels, extra = _ints(args.c), _ints(args.levels), args.extra
    reports = run_ordered(dist.siegel_lift_check, [(c, L, extra) for c in cs for L in levels], args.workers)
    pairs = [(c1, c2) for i, c1 in enumerate(cs) for c2 in cs[i + 1:]]
    reports += run_ordered(
        dist.siegel_composition_check, [(c1, c2, L, extra) for c1, c2 in pairs for L in levels], args.workers
    )
    rjobs = [
        (c, L, a, b, D, extra)
        for c in cs
        for L in levels
        for a in range(L)
        for b in range(L)
        for D in _ints(args.D)
        if gcd(c, D) == 1
    ]
    reports += run_ordered(_refine_job, rjobs, args.workers)
    reports += run_ordered(dist.siegel_dlog_check, [(c, L, args.prec) for c in cs for L in levels], args.workers)
    return reports


def suite_measure(args):
    out = []
    for k in _ints(args.k):
        for n in _ints(args.n):
            t = n if args.t is None else args.t
            out.append(
                measure_coherence_check(
                    k, args.u, args.N, args.alpha, args.beta, n, args.prec, t, args.p, args.workers
                )
            )
    return out


def _rm_job(M, n, a, b, prec, p):
    return rm_logtheta_check(M, n, a, b, prec, p)


def suite_rm(args):
    M = args.M or args.p
    jobs = [(M, n, a, b, args.prec, args.p) for n in _ints(args.n) for a, b in _pairs(args.pairs)]
    return run_ordered(_rm_job, jobs, args.workers)


def _commutator_report(M, m, p, T, prec):
    params = {"M": M, "m": m, "p": p, "T": T}
    for r in range(1, 3):
        f = QExpansion.monomial(1, Fraction(r, M), M, prec, M)
        for s in range(T):
            x = TadicElement.monomial(T, f, s)
            lhs = derive_d1(derive_d2(x, m, p), m, p) - derive_d2(derive_d1(x, m, p), m, p)
            rhs = derive_d1(x, m, p).scale(-(p**m))
            if lhs != rhs:
                return make_report("commutator", params, {"monomial": [r, s]})
    return make_report("commutator", params)


def suite_grouplaw(args):
    p, m = args.p, args.m
    M = args.M or p**m
    T = args.T
    pp = args.padic_prec if args.padic_prec is not None else 2 * m + 2
    grid = generator_grid(m, p)
    jobs = [(g1, g2, M, T, pp) for g1 in grid for g2 in grid]
    return [_commutator_report(M, m, p, T, args.prec)] + run_ordered(group_law_check, jobs, args.workers)


def suite_reciprocity(args):
    M = args.M or args.p
    return [
        exp_star_verify(
            k, args.u, M, args.alpha, args.beta, args.qprec, args.nmax, args.target, args.p, args.workers
        )
        for k in _ints(args.k)
    ]


SUITES = {
    "dist": suite_dist,
    "borel": suite_borel,
    "siegel": suite_siegel,
    "measure": suite_measure,
    "rm": suite_rm,
    "grouplaw": suite_grouplaw,
    "reciprocity": suite_reciprocity,
}


def _suite_params(args):
    skip = {"command", "suite", "config", "out", "workers", "func"}
    return {k: str(v) for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def cmd_verify(args):
    if args.p < 2 or any(args.p % d == 0 for d in range(2, int(args.p**0.5) + 1)):
        raise DomainError(f"p={args.p} is not prime", "p prime")
    reports = SUITES[args.suite](args)
    report = combine(args.suite, _suite_params(args), reports, identity=IDENTITIES[args.suite])
    text = dumps(report)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    n_pass = sum(passed(r) for r in reports)
    print(f"{args.suite}: {report['status']} ({n_pass}/{len(reports)} checks)", file=sys.stderr)
    return EXIT_PASS if passed(report) else EXIT_FAIL


# -- parser ------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="ellrecip", description=__doc__.splitlines()[0], allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", required=True)

    q = sub.add_parser("qexp", help="print a q-expansion")
    q.add_argument("kind", choices=["F", "Fu", "E", "theta", "siegel_c", "siegel_u"])
    q.add_argument("--k", type=int, default=2)
    q.add_argument("--L", type=int, default=1)
    q.add_argument("--a", type=int, default=0)
    q.add_argument("--b", type=int, default=0)
    q.add_argument("--c", type=int, default=5)
    q.add_argument("--u", type=int, default=7)
    q.add_argument("--p", type=int, default=5)
    q.add_argument("--s", type=int, default=1)
    q.add_argument("--lift", type=int)
    q.add_argument("--prec", type=_frac, default=Fraction(3))
    q.add_argument("--hecke-e2", action="store_true")
    q.add_argument("--json", help="also write the series as JSON to this file")
    q.set_defaults(func=cmd_qexp)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=sorted(SUITES))
    v.add_argument("--config")
    v.add_argument("--out")
    v.add_argument("--workers", type=int, default=1)
    v.add_argument("--p", type=int, default=5)
    v.add_argument("--k", default="1,3,4")
    v.add_argument("--D", default="2,3")
    v.add_argument("--levels", default="1,2,5")
    v.add_argument("--c", default="5,7")
    v.add_argument("--prec", type=_frac, default=Fraction(3))
    v.add_argument("--extra", type=int, default=2)
    v.add_argument("--u", type=int, default=7)
    v.add_argument("--N", type=int, default=3)
    v.add_argument("--M", type=int)
    v.add_argument("--m", type=int, default=1)
    v.add_argument("--T", type=int, default=4)
    v.add_argument("--padic-prec", type=int)
    v.add_argument("--alpha", type=int, default=1)
    v.add_argument("--beta", type=int, default=2)
    v.add_argument("--n", default="0,1")
    v.add_argument("--t", type=int)
    v.add_argument("--pairs", default="1:2,2:1,1:0")
    v.add_argument("--nmax", type=int, default=3)
    v.add_argument("--qprec", type=_frac, default=Fraction(2))
    v.add_argument("--target", type=int, default=2)
    v.set_defaults(func=cmd_verify)
    return parser


def _with_config(argv):
    pre = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config or len(argv) < 2:
        return argv
    # config values go before the user's flags so that flags win
    return argv[:2] + _read_config(known.config) + argv[2:]


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_with_config(argv))
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return EXIT_PASS if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"domain error: {exc} (violated hypothesis: {exc.hypothesis})", file=sys.stderr)
        return EXIT_USAGE
    except Exception:  # noqa: BLE001 - the exit code is the contract
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
