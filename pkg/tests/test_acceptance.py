"""Exit criteria. Each test records one PASS/FAIL line, printed in the
pytest terminal summary under "acceptance criteria"."""

from __future__ import annotations

import io
import time

import numpy as np
import pytest

from rotform.cli import main
from rotform.geometry import LengthUnit, SymmetricForm, scale_free_distance
from rotform.reconstruction import recover_form
from rotform.rotation_group import averaged_form, euclidean_oracle, make_oracle
from rotform.verification import (
    MUTATIONS,
    check_dluu,
    check_forward,
    check_oracle,
    check_orbit_ray,
    check_pythagoras,
    check_ubh,
    membership_agreement,
    mutate,
    random_spd,
)

from conftest import ACCEPTANCE_LINES

TOL = 1e-9
UNIT = LengthUnit()
EUCLIDEAN = SymmetricForm.identity()
DIAG = SymmetricForm.diagonal(1, 4, 9)


def acceptance_form(k: int) -> SymmetricForm:
    return random_spd(np.random.default_rng([7000, k]), cond=1e3)


def record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def test_1_roundtrip():
    start = time.perf_counter()
    worst = 0.0
    for k in range(50):
        m = acceptance_form(k)
        assert m.condition <= 1e3
        b = recover_form(make_oracle(m), UNIT)
        expected = m.m / float(UNIT.n0 @ m.m @ UNIT.n0)
        worst = max(worst, np.linalg.norm(b.m - expected) / np.linalg.norm(expected))
    elapsed = time.perf_counter() - start
    ok = worst <= TOL and elapsed < 5
    record(1, ok, f"round-trip, 50 forms: max rel Frobenius {worst:.3g} (<= 1e-9), {elapsed:.2f}s (< 5s)")
    assert worst <= TOL
    assert elapsed < 5


def test_2_identity_suites():
    start = time.perf_counter()
    forms = [EUCLIDEAN] + [acceptance_form(100 + k) for k in range(10)]
    reports = []
    for m in forms:
        o = make_oracle(m)
        reports += [
            check_ubh(o, 1000, 1),
            check_dluu(o, 1000, 1),
            check_orbit_ray(o, UNIT, 1000, 1),
        ]
    elapsed = time.perf_counter() - start
    failures = sum(r.failures for r in reports)
    worst = max(r.max_residual for r in reports)
    ok = failures == 0 and worst <= TOL and elapsed < 30
    record(2, ok, f"ubh/dluu/orbit, 11 forms x 1000 trials: {failures} failures, max residual {worst:.3g}, {elapsed:.1f}s (< 30s)")
    assert failures == 0
    assert worst <= TOL
    assert elapsed < 30


def test_3_pythagoras():
    reports = [check_pythagoras(make_oracle(acceptance_form(200 + k)), UNIT, 1000, 3) for k in range(10)]
    failures = sum(r.failures for r in reports)
    worst = max(r.max_residual for r in reports)
    out = io.StringIO()
    import tempfile, os

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "id.txt")
        with open(path, "w") as fh:
            fh.write("1 0 0\n0 1 0\n0 0 1\n")
        code = main(["pythagoras", "--form", path, "--unit", "1,0,0", "--v", "3,0,0", "--w", "0,4,0"], out)
    vals = {k: float(v) for k, v in (line.split(" = ") for line in out.getvalue().splitlines())}
    triple_ok = (
        code == 0
        and vals["a"] == pytest.approx(3, rel=1e-12)
        and vals["b"] == pytest.approx(4, rel=1e-12)
        and vals["c"] == pytest.approx(5, rel=1e-12)
        and abs(vals["residual"]) <= 1e-12
    )
    ok = failures == 0 and worst <= TOL and triple_ok
    record(3, ok, f"pythagoras, 10 forms x 1000 trials: {failures} failures, max rel defect {worst:.3g}; "
           f"3-4-5: a={vals['a']:.17g} b={vals['b']:.17g} c={vals['c']:.17g} residual={vals['residual']:.3g}")
    assert failures == 0 and worst <= TOL
    assert triple_ok


def test_4_forward():
    forms = [EUCLIDEAN, DIAG] + [acceptance_form(300 + k) for k in range(5)]
    reports = [check_forward(m, 1000, 4) for m in forms]
    failures = sum(r.failures for r in reports)
    worst = max(r.max_residual for r in reports)
    ok = failures == 0 and worst <= TOL
    record(4, ok, f"forward direction, {len(forms)} forms x 1000 trials: {failures} failures, max residual {worst:.3g}")
    assert failures == 0 and worst <= TOL


def test_5_membership_agreement():
    results = []
    for k in range(10):
        m = acceptance_form(400 + k)
        b = recover_form(make_oracle(m), UNIT)
        results.append(membership_agreement(m, b, 100, np.random.default_rng([500, k])))
    agreed = [a for a, _ in results]
    ok = all(a == t == 200 for a, t in results)
    record(5, ok, f"membership agreement per form: {agreed} (each must be 200/200)")
    assert ok


def test_6_haar_crosscheck():
    start = time.perf_counter()
    dists = {}
    for name, m, seed in (("euclidean", EUCLIDEAN, 61), ("diag(1,4,9)", DIAG, 62)):
        avg = averaged_form(m, 100_000, np.random.default_rng(seed))
        rec = recover_form(make_oracle(m), UNIT)
        dists[name] = scale_free_distance(avg.m, rec.m)
    elapsed = time.perf_counter() - start
    ok = all(d <= 0.05 for d in dists.values()) and elapsed < 10
    detail = ", ".join(f"{k} {v:.3g}" for k, v in dists.items())
    record(6, ok, f"Haar average vs reconstruction (<= 0.05): {detail}; {elapsed:.2f}s (< 10s)")
    assert all(d <= 0.05 for d in dists.values())
    assert elapsed < 10


def test_7_mutation_sensitivity():
    caught = {}
    for kind in MUTATIONS:
        bad = mutate(euclidean_oracle(), kind)
        reports = [
            check_ubh(bad, 100, 7),
            check_dluu(bad, 100, 7),
            check_orbit_ray(bad, UNIT, 100, 7),
            check_pythagoras(bad, UNIT, 100, 7),
            check_oracle(bad, 100, 7),
        ]
        caught[kind] = [r.suite for r in reports if r.failures > 0]
    ok = all(caught.values())
    detail = "; ".join(f"{k}: failed {','.join(v) or 'nothing'}" for k, v in caught.items())
    record(7, ok, f"mutants: {detail}")
    assert ok
