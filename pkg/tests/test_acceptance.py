"""One test per acceptance criterion; each prints a single PASS/FAIL line.

The lines are also collected and repeated in the pytest terminal summary.
"""
import json
from fractions import Fraction
from math import factorial

import pytest

from ellrecip.cli import main
from ellrecip.distribution import (
    CosetBox,
    borel_equivariance_check,
    borel_siegel_check,
    distribution_relation_check,
)
from ellrecip.eisenstein import TorsionIndex, e_series_spec, eisenstein_F
from ellrecip.moments import measure_coherence_check
from ellrecip.reciprocity import (
    PmElement,
    TadicElement,
    corollary_sum,
    derive_d1,
    derive_d2,
    exp_star_verify,
    generator_grid,
    group_law_check,
    reciprocity_partial_sum,
    rm_logtheta_check,
)
from ellrecip.qseries import QExpansion

from .test_eisenstein import FROZEN, ORACLE_E_SIGN

RESULTS = []


def record(n, ok, detail=""):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else "")
    print(line)
    RESULTS.append(line)
    return ok


def _pass(rep):
    return rep["status"] == "PASS"


def test_criterion_1_distribution():
    reps = [
        distribution_relation_check(k, CosetBox(r, a, b), D, 3)
        for k in (1, 3, 4)
        for r in (1, 2, 5)
        for a in range(r)
        for b in range(r)
        for D in (2, 3)
    ]
    bad = [r["params"] for r in reps if not _pass(r)]
    assert record(1, not bad, f"{len(reps)} boxes"), bad


def test_criterion_2_siegel(tmp_path, capsys):
    out = tmp_path / "siegel.json"
    code = main(["verify", "siegel", "--c", "5,7", "--levels", "2,3,5", "--prec", "2", "--out", str(out)])
    capsys.readouterr()
    rep = json.loads(out.read_text())
    n = len(rep["results"])
    assert record(2, code == 0 and _pass(rep), f"{n} checks"), rep["firstFailure"]


def test_criterion_3_borel():
    reps = [borel_equivariance_check(k, 5, 2) for k in (1, 2, 3, 4)]
    reps += [borel_siegel_check(c, 5) for c in (5, 7)]
    assert record(3, all(map(_pass, reps)))


def test_criterion_4_oracle():
    worst = 0.0
    for row in FROZEN:
        tau = complex(*row["tau"])
        prec = 12 if tau.imag > 0.5 else 30
        idx = TorsionIndex(row["L"], row["a"], row["b"])
        if row["kind"] == "F":
            x = eisenstein_F(row["k"], idx, prec)
        else:
            x = e_series_spec(row["k"], row["s"], idx, prec, lift=row["lift"]).scale(ORACLE_E_SIGN)
        worst = max(worst, abs(x.evaluate(tau) - complex(*row["value"])))
    assert record(4, worst < 1e-5, f"max error {worst:.1e}")


def test_criterion_5_rm_logtheta():
    reps = [
        rm_logtheta_check(5, n, a, b, 2, 5)
        for n in (1, 2)
        for a, b in ((1, 2), (2, 1), (1, 0))
    ]
    assert record(5, all(map(_pass, reps)))


def test_criterion_6_pm_structure():
    p, m, M, T = 5, 1, 5, 4
    comm = True
    for r in (1, 2, 3):
        f = QExpansion.monomial(1, Fraction(r, M), M, 2, M)
        for s in range(T):
            x = TadicElement.monomial(T, f, s)
            lhs = derive_d1(derive_d2(x, m, p), m, p) - derive_d2(derive_d1(x, m, p), m, p)
            comm &= lhs == derive_d1(x, m, p).scale(-(p**m))
    grid = generator_grid(m, p)
    law = all(_pass(group_law_check(g1, g2, M, T, 2 * m + 2)) for g1 in grid for g2 in grid)
    assert record(6, comm and law, f"commutator {comm}, group law on {len(grid) ** 2} pairs {law}")


@pytest.mark.xfail(
    strict=True,
    reason="UNATTAINED: e2-weighted components miss p^n; analysis in notes/decisions.md",
)
def test_criterion_7_measure_coherence():
    p, N, u = 5, 3, 7
    fails = []
    for k in (2, 3, 4):
        for n in (0, 1):
            rep = measure_coherence_check(k, u, N, 1, 2, n, 2, n, p)
            if not _pass(rep):
                fails.append(f"k={k} n={n} orders={rep['componentOrders']}")
    ok = record(7, not fails, "; ".join(fails))
    assert ok


def test_criterion_8_reciprocity():
    reps = [
        exp_star_verify(k, 7, 5, a, b, 2, 3, 2, 5, slack=1)
        for k in (2, 3, 4)
        for a, b in ((1, 2), (2, 1))
    ]
    ss = sorted({tuple(row["observedS"] for row in r["cauchyTable"]) for r in reps})
    finals = sorted({r["finalDefectValuation"] for r in reps})
    assert record(8, all(map(_pass, reps)), f"s(1), s(2) = {ss}, final p-order {finals}")


def test_criterion_9_cross_module():
    ok = True
    for k in (2, 3):
        for a, b in ((1, 2), (2, 1)):
            for n in (0, 1, 2):
                s, _ = corollary_sum(k, 7, 5, a, b, n, 2, 5)
                ok &= s.scale(factorial(k - 2) * 5) == reciprocity_partial_sum(k, 7, 5, a, b, n, 2, 5)
    assert record(9, ok)


SUITE_ARGS = {
    "dist": ["--k", "1,3,4", "--D", "2,3", "--levels", "1,2,5"],
    "borel": ["--k", "1,2,3,4", "--levels", "5"],
    "siegel": ["--c", "5,7", "--levels", "2,3"],
    "measure": ["--k", "2,3", "--n", "0"],
    "rm": ["--p", "5", "--M", "5", "--n", "1,2"],
    "grouplaw": ["--p", "5", "--m", "1"],
    "reciprocity": ["--p", "5", "--M", "5", "--k", "2,3", "--nmax", "2"],
}


def test_criterion_10_determinism(tmp_path, capsys):
    same = []
    for suite, extra in SUITE_ARGS.items():
        paths = [tmp_path / f"{suite}{i}.json" for i in range(2)]
        for path in paths:
            main(["verify", suite, *extra, "--out", str(path)])
        same.append(paths[0].read_bytes() == paths[1].read_bytes())
    capsys.readouterr()
    assert record(10, all(same), f"{sum(same)}/{len(same)} suites identical")
