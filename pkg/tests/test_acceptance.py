"""Acceptance gate: every relation family at its stated regime and budget.

Each criterion prints a single pass/fail line; the final criterion checks
that the closed-form and series methods never disagreed anywhere above.
"""

import time

import pytest

from qcurrents.verify import RunConfig, run_suite

_CACHE: dict = {}


def _run(suite: str, **kw):
    key = (suite, tuple(sorted(kw.items())))
    if key not in _CACHE:
        cfg = RunConfig(suites=(suite,), **kw)
        t0 = time.monotonic()
        reports = run_suite(suite, cfg.to_context(), cfg)
        _CACHE[key] = (reports, time.monotonic() - t0)
    return _CACHE[key]


def _criterion(name: str, runs: list, budget: float):
    reports, elapsed = [], 0.0
    for r, dt in runs:
        reports.extend(r)
        elapsed += dt
    bad = [r for r in reports if r.verdict == "fail"]
    ok = not bad and elapsed < budget
    print(f"\nACCEPT {name}: {'pass' if ok else 'FAIL'} "
          f"({len(reports)} checks, {elapsed:.1f}s / {budget:.0f}s)")
    assert not bad, [(r.id, r.ctx, r.method, r.witness) for r in bad[:5]]
    assert elapsed < budget, f"{elapsed:.1f}s over budget {budget}s"


def test_criterion_01_structure_constants():
    runs = [_run("R0", N=N, k=1, r=3, lam=(1,) * (N - 1), T=6)
            for N in (2, 3, 4, 5)]
    _criterion("1 structure constants", runs, 10)


def test_criterion_02_trig_current_relations():
    runs = []
    serre = []
    for N in (2, 3):
        for k in (1, 2):
            reports, dt = _run("R1", N=N, k=k, r=k + 2,
                               lam=(1,) * (N - 1), T=12)
            plain = [r for r in reports if "serre" not in r.id]
            cubic = [r for r in reports if "serre" in r.id]
            frac = sum(r.millis for r in cubic) / 1000.0
            runs.append((plain, dt - frac))
            serre.append((cubic, frac))
    _criterion("2a quadratic current relations", runs, 600)
    _criterion("2b cubic current relations", serre, 1200)


def test_criterion_03_dressing_exchange():
    _criterion("3 dressing exchange factors",
               [_run("R2", N=3, k=1, r=3, lam=(1, 1), T=8)], 60)


def test_criterion_04_elliptic_current_relations():
    runs = [_run("R3", N=2, k=1, r=3, lam=(1,), T=16),
            _run("R3", N=3, k=1, r=3, lam=(1, 1), T=6)]
    _criterion("4 elliptic current relations", runs, 1800)


def test_criterion_05_vertex_operator_exchange():
    runs = [_run("R5", N=2, k=1, r=3, lam=(1,), T=8),
            _run("R5", N=3, k=1, r=3, lam=(1, 1), T=6)]
    _criterion("5 vertex operator exchange", runs, 600)


def test_criterion_06_degeneration_limits():
    runs = [_run("R6", N=2, k=1, r=3, lam=(1,), T=8),
            _run("R6", N=3, k=1, r=3, lam=(1, 1), T=6)]
    _criterion("6 degeneration limits", runs, 60)


def test_criterion_07_screening_currents():
    _criterion("7 screening currents",
               [_run("R7", N=2, k=1, r=3, lam=(1,), T=12)], 1200)


def test_criterion_08_intertwiner_exchange():
    runs = []
    for suite in ("R8", "R9"):
        for N in (2, 3):
            runs.append(_run(suite, N=N, k=1, r=3,
                             lam=(1,) * (N - 1), T=8 if N == 2 else 6))
    _criterion("8 intertwiner exchange", runs, 900)


def test_criterion_09_theta_identities():
    _criterion("9 theta identities",
               [_run("R10", N=2, k=1, r=3, lam=(1,), T=8)], 60)


def test_criterion_10_method_agreement():
    """Wherever both the closed-form and series routes ran, they agreed."""
    reports = [r for rs, _ in _CACHE.values() for r in rs]
    assert reports, "no criteria were executed"
    both = [r for r in reports if "+series" in r.method]
    disagreements = [
        r for r in reports
        if r.witness and "series" in str(r.witness.get("reason", ""))]
    ok = bool(both) and not disagreements
    print(f"\nACCEPT 10 method agreement: {'pass' if ok else 'FAIL'} "
          f"({len(both)} double-checked, {len(disagreements)} disagreements)")
    assert both, "no relation exercised both verification methods"
    assert not disagreements, [(r.id, r.witness) for r in disagreements]
