"""Seeded randomized suites checking each step of the construction.

Every suite runs ``trials`` independent trials. Trial ``i`` draws from its own
generator seeded with ``(seed, i)``, so reports do not depend on execution
order and serial and threaded runs agree exactly. A trial fails if it raises,
or if any of its relative residuals exceeds the suite tolerance.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .errors import RotformError
from .geometry import (
    IDENTITY,
    TOL,
    Flag,
    LengthUnit,
    Rotation,
    SymmetricForm,
    Vector3,
    apply_flag,
    flag_residual,
    independence,
    rel_dist,
    scale_free_distance,
    vnorm,
)
from .reconstruction import (
    involution_residual,
    is_perp,
    map_residual,
    norm,
    perp_vector,
    recover_form,
)
from .rotation_group import (
    TransportOracle,
    averaged_form,
    haar_sample,
    make_oracle,
    membership_residuals,
    so_membership,
    transport,
)

MIN_SAMPLE_NORM = 1e-3
MIN_SAMPLE_INDEPENDENCE = 1e-6
N_AUX = 10
MUTATIONS = ("det_flip", "scale", "transpose", "shear")

SUITES = ("ubh", "dluu", "orbit", "pythagoras", "forward", "roundtrip", "haar")


@dataclass(frozen=True)
class TrialReport:
    suite: str
    trials: int
    failures: int
    max_residual: float
    seed: int
    millis: int
    tol: float = TOL
    errors: tuple[str, ...] = field(default=(), compare=False)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "trials": self.trials,
            "failures": self.failures,
            "max_residual": self.max_residual,
            "seed": self.seed,
            "millis": self.millis,
        }


def trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


def random_vector(rng: np.random.Generator) -> Vector3:
    while True:
        v = rng.standard_normal(3)
        if vnorm(v) >= MIN_SAMPLE_NORM:
            return v


def random_pair(rng: np.random.Generator) -> tuple[Vector3, Vector3]:
    while True:
        v = random_vector(rng)
        w = random_vector(rng)
        if independence(v, w) >= MIN_SAMPLE_INDEPENDENCE:
            return v, w


def random_flag(rng: np.random.Generator) -> Flag:
    return Flag(*random_pair(rng))


def random_partner(rng: np.random.Generator, v: Vector3) -> Vector3:
    """A random vector well independent of ``v``."""
    while True:
        w = random_vector(rng)
        if independence(v, w) >= MIN_SAMPLE_INDEPENDENCE:
            return w


def random_spd(rng: np.random.Generator, cond: float = 1e3) -> SymmetricForm:
    """``A^T A + eps I`` with normal ``A`` and ``eps = 1e-3 trace(A^T A) / 3``,
    redrawn until the condition number is at most ``cond``."""
    while True:
        a = rng.standard_normal((3, 3))
        m = a.T @ a
        m = m + 1e-3 * np.trace(m) / 3.0 * np.eye(3)
        form = SymmetricForm(0.5 * (m + m.T), max_condition=math.inf)
        if form.condition <= cond:
            return SymmetricForm(form.m, max_condition=max(cond, 1.0))


def mutate(o: TransportOracle, kind: str) -> TransportOracle:
    """A deliberately broken copy of ``o``.

    ``det_flip`` negates every result (det -1), ``scale`` multiplies by 1.01,
    ``transpose`` returns ``d^T``, and ``shear`` composes with a fixed shear on
    the right, which breaks both form preservation and uniqueness.
    """
    shear = np.eye(3)
    shear[0, 1] = 0.25
    ops: dict[str, Callable[[np.ndarray], np.ndarray]] = {
        "det_flip": lambda m: -m,
        "scale": lambda m: 1.01 * m,
        "transpose": lambda m: m.T,
        "shear": lambda m: m @ shear,
    }
    if kind not in ops:
        raise ValueError(f"unknown mutation {kind!r}; expected one of {MUTATIONS}")
    op = ops[kind]

    def fn(f1: Flag, f2: Flag) -> Rotation:
        return Rotation(op(o(f1, f2).m))

    return TransportOracle(fn, f"{o.tag}+{kind}")


def _run(
    suite: str,
    trials: int,
    seed: int,
    trial: Callable[[np.random.Generator], Iterable[float]],
    tol: float,
    jobs: int = 1,
) -> TrialReport:
    def one(i: int):
        try:
            res = list(trial(trial_rng(seed, i)))
        except (RotformError, ValueError, ArithmeticError) as exc:
            return None, f"trial {i}: {type(exc).__name__}: {exc}"
        return res, None

    start = time.perf_counter()
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            results = list(pool.map(one, range(trials)))
    else:
        results = [one(i) for i in range(trials)]
    failures = 0
    worst = 0.0
    errors = []
    for res, err in results:
        if err is not None:
            failures += 1
            errors.append(err)
            continue
        finite = [r for r in res if math.isfinite(r)]
        if len(finite) < len(res) or any(r > tol for r in finite):
            failures += 1
        if finite:
            worst = max(worst, max(finite))
    millis = int(round((time.perf_counter() - start) * 1000))
    return TrialReport(suite, trials, failures, worst, seed, millis, tol, tuple(errors[:10]))


def check_ubh(
    o: TransportOracle, trials: int, seed: int, tol: float = TOL, jobs: int = 1
) -> TrialReport:
    """The three involutions attached to a flag ``[v, w]``.

    ``[v,w] -> [-v,w]`` squares to 1 and negates ``v``; ``[v,w] -> [v,-w]``
    squares to 1 and fixes ``v``, and moving within the same flag gives the
    identity; ``[v,w] -> [w,v]`` squares to 1 and sends ``v`` to ``lam w``
    with ``lam > 0`` and ``lam w`` back to ``v``.
    """

    def trial(rng):
        v, w = random_pair(rng)
        f = Flag(v, w)

        r = o(f, Flag(-v, w))
        yield involution_residual(r)
        yield map_residual(r, v, -v)

        r = o(f, Flag(v, -w))
        yield involution_residual(r)
        yield map_residual(r, v, v)
        a = rng.standard_normal()
        c = rng.uniform(0.5, 2.0)
        s = o(f, Flag(v, a * v + c * w))
        yield rel_dist(s.m, IDENTITY)

        r = o(f, Flag(w, v))
        yield involution_residual(r)
        rv = r.m @ v
        lam = float(rv @ w) / float(w @ w)
        yield math.inf if lam <= 0.0 else map_residual(r, v, lam * w)
        yield map_residual(r, lam * w, v)

    return _run("ubh", trials, seed, trial, tol, jobs)


def check_dluu(
    o: TransportOracle, trials: int, seed: int, tol: float = TOL, jobs: int = 1
) -> TrialReport:
    """A rotation mapping a ray onto itself fixes it pointwise."""

    def trial(rng):
        u = random_vector(rng)
        w1 = random_partner(rng, u)
        w2 = random_partner(rng, u)
        d = o(Flag(u, w1), Flag(u, w2))
        yield map_residual(d, u, u)

    return _run("dluu", trials, seed, trial, tol, jobs)


def check_orbit_ray(
    o: TransportOracle,
    unit: LengthUnit,
    trials: int,
    seed: int,
    tol: float = TOL,
    jobs: int = 1,
) -> TrialReport:
    """The norm does not depend on which flags carry the unit onto the ray of ``v``."""

    def trial(rng):
        v = random_vector(rng)
        norms = [norm(o, unit, v, tol=tol)]
        for _ in range(N_AUX):
            aux = (random_partner(rng, unit.n0), random_partner(rng, v))
            norms.append(norm(o, unit, v, aux=aux, tol=tol))
        yield (max(norms) - min(norms)) / min(norms)

    return _run("orbit", trials, seed, trial, tol, jobs)


def check_pythagoras(
    o: TransportOracle,
    unit: LengthUnit,
    trials: int,
    seed: int,
    tol: float = TOL,
    jobs: int = 1,
) -> TrialReport:
    """``a^2 + b^2 = c^2`` for norms of ``v``, ``w`` and ``v + w`` with ``w`` perpendicular to ``v``."""

    def trial(rng):
        v = random_vector(rng)
        u = perp_vector(o, v, aux=random_partner(rng, v), tol=tol)
        s = rng.standard_normal()
        while abs(s) < MIN_SAMPLE_NORM:
            s = rng.standard_normal()
        w = s * u
        yield 0.0 if is_perp(o, w, v, tol) else math.inf
        a = norm(o, unit, v, tol=tol)
        b = norm(o, unit, w, tol=tol)
        c = norm(o, unit, v + w, tol=tol)
        yield abs(a * a + b * b - c * c) / (c * c)

    return _run("pythagoras", trials, seed, trial, tol, jobs)


def check_forward(
    form: SymmetricForm, trials: int, seed: int, tol: float = TOL, jobs: int = 1
) -> TrialReport:
    """Transport in SO(V; b) preserves ``b``, has det 1, maps the flag, and is a cocycle."""

    def trial(rng):
        f1, f2, f3 = random_flag(rng), random_flag(rng), random_flag(rng)
        d12 = transport(form, f1, f2)
        d23 = transport(form, f2, f3)
        d13 = transport(form, f1, f3)
        d21 = transport(form, f2, f1)
        for d in (d12, d23, d13):
            yield from membership_residuals(form, d)
        yield flag_residual(f2, apply_flag(d12, f1))
        yield flag_residual(f3, apply_flag(d13, f1))
        yield rel_dist(d13.m, d23.m @ d12.m)
        yield rel_dist(d12.m @ d21.m, IDENTITY)
        yield rel_dist(transport(form, f1, f1).m, IDENTITY)

    return _run("forward", trials, seed, trial, tol, jobs)


def check_oracle(
    o: TransportOracle, trials: int, seed: int, tol: float = TOL, jobs: int = 1
) -> TrialReport:
    """Oracle contract: results map the source flag onto the target; ``f -> f`` is the identity."""

    def trial(rng):
        f1, f2 = random_flag(rng), random_flag(rng)
        yield flag_residual(f2, apply_flag(o(f1, f2), f1))
        yield rel_dist(o(f1, f1).m, IDENTITY)

    return _run("oracle", trials, seed, trial, tol, jobs)


def non_member(form: SymmetricForm, rng: np.random.Generator, kind: int) -> Rotation:
    """A matrix outside SO(V; b): a reflection-type isometry, a random det-1 matrix,
    or an isometry composed with a small shear."""
    if kind == 0:
        return Rotation(-haar_sample(form, rng).m)
    if kind == 1:
        while True:
            a = rng.standard_normal((3, 3))
            det = np.linalg.det(a)
            if abs(det) > 1e-3:
                break
        if det < 0:
            a = -a
        return Rotation(a / abs(det) ** (1.0 / 3.0))
    shear = np.eye(3)
    shear[0, 2] = 1e-3 * (1.0 + rng.uniform())
    return Rotation(haar_sample(form, rng).m @ shear)


def membership_agreement(
    form: SymmetricForm, recovered: SymmetricForm, n: int, rng: np.random.Generator, tol: float = TOL
) -> tuple[int, int]:
    """Classify ``n`` Haar members of ``form`` and ``n`` non-members under both forms.

    Returns ``(agreements, total)``.
    """
    agree = 0
    for i in range(2 * n):
        d = haar_sample(form, rng) if i < n else non_member(form, rng, i % 3)
        agree += so_membership(form, d, tol) == so_membership(recovered, d, tol)
    return agree, 2 * n


def check_roundtrip(
    form: SymmetricForm,
    unit: LengthUnit | None = None,
    seed: int = 0,
    n_membership: int = 100,
    tol: float = TOL,
) -> TrialReport:
    """Recover the form from its own oracle and compare with ``M / (n0^T M n0)``.

    ``max_residual`` is the relative Frobenius distance; each membership
    disagreement counts as one further failure.
    """
    unit = unit or LengthUnit()
    start = time.perf_counter()
    failures = 0
    errors: list[str] = []
    try:
        got = recover_form(make_oracle(form), unit, tol)
    except RotformError as exc:
        return TrialReport(
            "roundtrip", 1, 1, 0.0, seed, 0, tol, (f"{type(exc).__name__}: {exc}",)
        )
    n0 = unit.n0
    expected = form.m / float(n0 @ form.m @ n0)
    dist = float(np.linalg.norm(got.m - expected)) / float(np.linalg.norm(expected))
    failures += dist > tol
    agree, total = membership_agreement(form, got, n_membership, trial_rng(seed, 0), tol)
    if agree != total:
        errors.append(f"membership agreement {agree}/{total}")
    failures += total - agree
    millis = int(round((time.perf_counter() - start) * 1000))
    return TrialReport("roundtrip", 1 + total, failures, dist, seed, millis, tol, tuple(errors))


def haar_bound(n_samples: int) -> float:
    return 3.0 / math.sqrt(n_samples) + 0.02


def check_haar_crosscheck(
    form: SymmetricForm, n_samples: int, seed: int, unit: LengthUnit | None = None
) -> TrialReport:
    """Compare the group-averaged dot product against the reconstructed form, up to scale.

    Tolerance is ``3 / sqrt(n) + 0.02``; a single sample is reported but never fails.
    """
    start = time.perf_counter()
    bound = haar_bound(n_samples)
    try:
        avg = averaged_form(form, n_samples, trial_rng(seed, 0))
        rec = recover_form(make_oracle(form), unit or LengthUnit())
    except RotformError as exc:
        return TrialReport("haar", n_samples, 1, 0.0, seed, 0, bound, (str(exc),))
    dist = scale_free_distance(avg.m, rec.m)
    failures = int(n_samples > 1 and not dist <= bound)
    millis = int(round((time.perf_counter() - start) * 1000))
    return TrialReport("haar", n_samples, failures, dist, seed, millis, bound)


def run_suite(
    name: str,
    form: SymmetricForm,
    trials: int,
    seed: int,
    unit: LengthUnit | None = None,
    tol: float = TOL,
    jobs: int = 1,
) -> TrialReport:
    """Run one named suite against ``form`` and its oracle."""
    unit = unit or LengthUnit()
    o = make_oracle(form)
    if name == "ubh":
        return check_ubh(o, trials, seed, tol, jobs)
    if name == "dluu":
        return check_dluu(o, trials, seed, tol, jobs)
    if name == "orbit":
        return check_orbit_ray(o, unit, trials, seed, tol, jobs)
    if name == "pythagoras":
        return check_pythagoras(o, unit, trials, seed, tol, jobs)
    if name == "forward":
        return check_forward(form, trials, seed, tol, jobs)
    if name == "roundtrip":
        return check_roundtrip(form, unit, seed, tol=tol)
    if name == "haar":
        return check_haar_crosscheck(form, trials, seed, unit)
    raise ValueError(f"unknown suite {name!r}; expected one of {SUITES}")
