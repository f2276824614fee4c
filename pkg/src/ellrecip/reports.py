"""Deterministic JSON reports shared by the verification suites."""
import json
from concurrent.futures import ProcessPoolExecutor

SCHEMA_VERSION = 1


def series_terms(x):
    return x.to_json_obj()["terms"] if x is not None else None


def failure(index, lhs=None, rhs=None, **extra):
    out = {"index": index, "lhsTerms": series_terms(lhs), "rhsTerms": series_terms(rhs)}
    out.update(extra)
    return out


def make_report(check, params, first_failure=None, **extra):
    rep = {
        "check": check,
        "params": params,
        "status": "PASS" if first_failure is None else "FAIL",
        "firstFailure": first_failure,
    }
    rep.update(extra)
    return rep


def combine(check, params, reports, **extra):
    """Suite report: PASS iff all sub-reports pass, first failure kept."""
    first = None
    for r in reports:
        if r["status"] != "PASS":
            first = {"check": r["check"], "params": r["params"], "detail": r["firstFailure"]}
            break
    return make_report(check, params, first, results=list(reports), **extra)


def dumps(report) -> str:
    return json.dumps(
        {"schemaVersion": SCHEMA_VERSION, **report}, sort_keys=True, indent=1, default=str
    ) + "\n"


def passed(report) -> bool:
    return report["status"] == "PASS"


def run_ordered(fn, jobs, workers=1):
    """Map fn over jobs, optionally in a process pool; results keep job order."""
    jobs = list(jobs)
    if workers <= 1 or len(jobs) < 2:
        return [fn(*j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futs = [pool.submit(fn, *j) for j in jobs]
        return [f.result() for f in futs]
