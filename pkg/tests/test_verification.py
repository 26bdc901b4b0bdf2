from __future__ import annotations

import dataclasses
import json

import numpy as np
import pytest

from rotform.geometry import E2, LengthUnit, SymmetricForm
from rotform.rotation_group import euclidean_oracle, make_oracle, so_membership
from rotform.verification import (
    MUTATIONS,
    SUITES,
    TrialReport,
    check_dluu,
    check_forward,
    check_haar_crosscheck,
    check_oracle,
    check_orbit_ray,
    check_pythagoras,
    check_roundtrip,
    check_ubh,
    haar_bound,
    mutate,
    non_member,
    random_spd,
    run_suite,
)

from conftest import spd

DIAG = SymmetricForm.diagonal(1, 4, 9)


def without_timing(r: TrialReport) -> TrialReport:
    return dataclasses.replace(r, millis=0)


@pytest.mark.parametrize("name", [s for s in SUITES if s != "haar"])
def test_suites_pass_on_valid_forms(name, form):
    r = run_suite(name, form, 100, 3)
    assert r.passed, r.errors
    assert r.max_residual <= 1e-9


def test_haar_suite():
    r = check_haar_crosscheck(DIAG, 20_000, 1)
    assert r.passed and r.max_residual <= haar_bound(20_000)
    single = check_haar_crosscheck(DIAG, 1, 1)
    assert single.passed and single.trials == 1


def test_roundtrip_with_other_unit():
    r = check_roundtrip(DIAG, LengthUnit(E2), seed=4)
    assert r.passed and r.trials == 201


def test_non_members_are_rejected():
    rng = np.random.default_rng(0)
    for k in range(30):
        assert not so_membership(DIAG, non_member(DIAG, rng, k % 3))


@pytest.mark.parametrize("kind", MUTATIONS)
def test_every_mutation_is_caught(kind):
    bad = mutate(make_oracle(DIAG), kind)
    unit = LengthUnit()
    reports = [
        check_ubh(bad, 50, 1),
        check_dluu(bad, 50, 1),
        check_orbit_ray(bad, unit, 50, 1),
        check_pythagoras(bad, unit, 50, 1),
        check_oracle(bad, 50, 1),
    ]
    assert any(r.failures > 0 for r in reports)


def test_mutation_specifics():
    o = euclidean_oracle()
    assert check_ubh(mutate(o, "det_flip"), 20, 1).failures == 20
    assert check_dluu(mutate(o, "scale"), 20, 1).failures == 20
    assert check_oracle(mutate(o, "transpose"), 20, 1).failures > 0
    assert check_ubh(mutate(o, "shear"), 20, 1).failures > 0
    with pytest.raises(ValueError):
        mutate(o, "nonsense")


def test_identity_oracle_dluu():
    # stabilizers of a ray in the Euclidean group are rotations about it
    assert check_dluu(euclidean_oracle(), 50, 0).passed


def test_forward_rejects_nonsymmetric_input():
    from rotform.errors import InvalidForm

    with pytest.raises(InvalidForm):
        check_forward(SymmetricForm(np.array([[1.0, 0.2, 0], [0, 1, 0], [0, 0, 1]])), 1, 0)


def test_reports_reproducible():
    o = make_oracle(spd(2))
    a = check_orbit_ray(o, LengthUnit(), 40, 9)
    b = check_orbit_ray(o, LengthUnit(), 40, 9)
    assert without_timing(a) == without_timing(b)
    assert a.max_residual == b.max_residual


def test_parallel_matches_serial():
    o = make_oracle(spd(5))
    serial = check_ubh(o, 60, 4)
    threaded = check_ubh(o, 60, 4, jobs=4)
    assert without_timing(serial) == without_timing(threaded)


def test_report_json_schema():
    r = check_dluu(euclidean_oracle(), 5, 2)
    data = json.loads(json.dumps(r.to_json()))
    assert list(data) == ["suite", "trials", "failures", "max_residual", "seed", "millis"]
    assert isinstance(data["trials"], int) and isinstance(data["max_residual"], float)


def test_random_spd_condition():
    for s in range(20):
        b = random_spd(np.random.default_rng(s), cond=50)
        assert b.condition <= 50
    a = random_spd(np.random.default_rng(3))
    b = random_spd(np.random.default_rng(3))
    np.testing.assert_array_equal(a.m, b.m)


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("nope", DIAG, 1, 0)
