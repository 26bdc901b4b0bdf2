"""Recover a scalar product from flag transport alone.

Everything here talks to a :class:`~rotform.rotation_group.TransportOracle`
and never to the form behind it. The chain is

    flip involutions -> perpendicularity -> half-turns r_n
      -> linear forms alpha_v (from r_v w + w = alpha_v(w) v)
      -> norm of a length unit -> b(v, w) = |v|^2 alpha_v(w) / 2.

Each step asserts the identities it relies on and raises an
:class:`~rotform.errors.OracleContractError` subclass when the oracle
violates them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AsymmetricResult,
    DegenerateFlag,
    InvalidForm,
    InvolutionViolated,
    NonPositiveScale,
    NotPositiveDefinite,
    ZeroVector,
)
from .geometry import (
    BASIS,
    FLAG_MIN_INDEPENDENCE,
    IDENTITY,
    TOL,
    Flag,
    LengthUnit,
    Rotation,
    SymmetricForm,
    Vector3,
    as_vector,
    auxiliary_basis_vector,
    independence,
    is_zero,
    solve_collinear,
    vnorm,
)
from .rotation_group import TransportOracle


def involution_residual(r: Rotation) -> float:
    """``|r^2 - id|_F / |r|_F^2``."""
    m = r.m
    return float(np.linalg.norm(m @ m - IDENTITY)) / float(np.sum(m * m))


def map_residual(r: Rotation, x: Vector3, y: Vector3) -> float:
    """``|r x - y| / (|r|_F |x|)``; how far ``r`` is from sending ``x`` to ``y``."""
    scale = float(np.linalg.norm(r.m)) * vnorm(x)
    if scale == 0.0:
        return vnorm(y)
    return vnorm(r.m @ x - y) / scale


def _require(ok: bool, what: str) -> None:
    if not ok:
        raise InvolutionViolated(what)


def flip_involution(o: TransportOracle, v: Vector3, w: Vector3, tol: float = TOL) -> Rotation:
    """The rotation taking ``[v, w]`` to ``[v, -w]``: an involution fixing ``v``."""
    v = as_vector(v)
    w = as_vector(w)
    r = o(Flag(v, w), Flag(v, -w))
    _require(involution_residual(r) <= tol, "flip involution does not square to the identity")
    _require(map_residual(r, v, v) <= tol, "flip involution does not fix its axis")
    return r


@dataclass(frozen=True, eq=False)
class PerpendicularityWitness:
    """A rotation ``r`` with ``r v = v`` and ``r w = -w``, certifying ``w`` perpendicular to ``v``."""

    r: Rotation
    v: Vector3
    w: Vector3
    tol: float = TOL

    def __post_init__(self):
        _require(involution_residual(self.r) <= self.tol, "witness is not an involution")
        _require(map_residual(self.r, self.v, self.v) <= self.tol, "witness does not fix v")
        _require(map_residual(self.r, self.w, -self.w) <= self.tol, "witness does not negate w")


def _dependent(v: Vector3, w: Vector3) -> bool:
    return independence(v, w) < FLAG_MIN_INDEPENDENCE


def is_perp(o: TransportOracle, w: Vector3, v: Vector3, tol: float = TOL) -> bool:
    """Whether some rotation fixes ``v`` and negates ``w``.

    Zero vectors are perpendicular to everything; a nonzero vector is never
    perpendicular to a multiple of itself. Neither case consults the oracle,
    since flags need independent vectors.
    """
    v = as_vector(v)
    w = as_vector(w)
    if is_zero(v) or is_zero(w):
        return True
    if _dependent(v, w):
        return False
    r = flip_involution(o, v, w, tol)
    return map_residual(r, w, -w) <= tol


def perpendicularity_witness(
    o: TransportOracle, w: Vector3, v: Vector3, tol: float = TOL
) -> PerpendicularityWitness | None:
    """A witness for ``w`` perpendicular to ``v``, or None if there is none."""
    v = as_vector(v)
    w = as_vector(w)
    if is_zero(w):
        return PerpendicularityWitness(Rotation(IDENTITY), v, w, tol)
    if is_zero(v):
        # any rotation reversing the ray of w; [w, a] -> [-w, a]
        a = BASIS[auxiliary_basis_vector(w)]
        return PerpendicularityWitness(o(Flag(w, a), Flag(-w, a)), v, w, tol)
    if _dependent(v, w):
        return None
    r = flip_involution(o, v, w, tol)
    if map_residual(r, w, -w) > tol:
        return None
    return PerpendicularityWitness(r, v, w, tol)


def perp_vector(
    o: TransportOracle, n: Vector3, aux: Vector3 | None = None, tol: float = TOL
) -> Vector3:
    """A nonzero vector perpendicular to ``n``.

    The flip involution ``r`` of the plane spanned by ``n`` and ``aux`` acts as
    ``-1`` on the perpendicular line of that plane, so ``aux - r aux`` spans it.
    ``aux`` defaults to the standard basis vector most independent of ``n``.
    """
    n = as_vector(n)
    if is_zero(n):
        raise ZeroVector("perp_vector needs n != 0")
    if aux is None:
        aux = BASIS[auxiliary_basis_vector(n)]
    aux = as_vector(aux)
    r = flip_involution(o, n, aux, tol)
    u = aux - r.m @ aux
    if _dependent(n, u):
        raise InvolutionViolated("perpendicular vector collapsed onto n")
    return u


def half_turn(o: TransportOracle, n: Vector3, tol: float = TOL) -> Rotation:
    """The rotation ``r_n`` fixing ``n`` and negating every vector perpendicular to ``n``."""
    n = as_vector(n)
    if is_zero(n):
        raise ZeroVector("half_turn needs n != 0")
    k = auxiliary_basis_vector(n)
    u = perp_vector(o, n, BASIS[k], tol)
    r = o(Flag(n, u), Flag(n, -u))
    _require(map_residual(r, n, n) <= tol, "half-turn does not fix its axis")
    _require(involution_residual(r) <= tol, "half-turn does not square to the identity")
    u2 = perp_vector(o, n, BASIS[auxiliary_basis_vector(n, skip=k)], tol)
    if _dependent(u, u2):
        raise DegenerateFlag("auxiliary perpendicular vectors are dependent")
    _require(map_residual(r, u2, -u2) <= tol, "half-turn does not negate the perpendicular plane")
    return r


class AlphaForm:
    """The linear form ``alpha_v`` defined by ``r_v w + w = alpha_v(w) v``.

    It takes the value 2 on ``v`` and vanishes on vectors perpendicular to
    ``v``. The half-turn ``r_v`` is computed once on construction.
    """

    def __init__(self, o: TransportOracle, base: Vector3, tol: float = TOL):
        self.base = as_vector(base)
        self.oracle = o
        self.tol = tol
        self.half_turn = half_turn(o, self.base, tol)

    def __call__(self, w: Vector3) -> float:
        w = as_vector(w)
        # the collinearity check is where r_v w = alpha v - gamma w gets gamma = 1
        return solve_collinear(self.half_turn.m @ w + w, self.base, self.tol)

    def __repr__(self) -> str:
        return f"AlphaForm(base={self.base.tolist()}, oracle={self.oracle!r})"


def alpha(o: TransportOracle, v: Vector3, w: Vector3, tol: float = TOL) -> float:
    return AlphaForm(o, v, tol)(w)


def norm(
    o: TransportOracle,
    unit: LengthUnit,
    v: Vector3,
    aux: tuple[Vector3, Vector3] | None = None,
    tol: float = TOL,
) -> float:
    """Length of ``v`` in multiples of the length unit.

    A rotation ``d`` carrying some flag on ``n0`` to some flag on ``v`` gives
    ``d n0 = mu v`` with ``mu > 0``; ``v`` then has norm ``1 / mu``. The answer
    must not depend on the auxiliary half-plane directions ``aux = (a, b)``,
    which default to the standard basis vectors most independent of ``n0`` and
    ``v``.
    """
    v = as_vector(v)
    if is_zero(v):
        return 0.0
    n0 = unit.n0
    if aux is None:
        a = BASIS[auxiliary_basis_vector(n0)]
        b = BASIS[auxiliary_basis_vector(v)]
    else:
        a, b = (as_vector(x) for x in aux)
    d = o(Flag(n0, a), Flag(v, b))
    mu = solve_collinear(d.m @ n0, v, tol)
    if not mu > 0.0:
        raise NonPositiveScale(f"transported unit landed at {mu:.6g} times v")
    return 1.0 / mu


def scalar_product(
    o: TransportOracle, unit: LengthUnit, v: Vector3, w: Vector3, tol: float = TOL
) -> float:
    """``b(v, w) = |v|^2 alpha_v(w) / 2``, and 0 for ``v = 0``."""
    v = as_vector(v)
    if is_zero(v):
        return 0.0
    return norm(o, unit, v, tol=tol) ** 2 * alpha(o, v, w, tol) / 2.0


def recover_form(
    o: TransportOracle, unit: LengthUnit | None = None, tol: float = TOL
) -> SymmetricForm:
    """The scalar product invariant under the oracle's group, normalized so the unit has length 1.

    Evaluates ``b(e_i, e_j)`` on the standard basis, checks symmetry, and
    returns the symmetrized matrix divided by ``b(n0, n0)``.
    """
    unit = unit or LengthUnit()
    gram = np.empty((3, 3))
    for i, e in enumerate(BASIS):
        alpha_e = AlphaForm(o, e, tol)
        sq = norm(o, unit, e, tol=tol) ** 2
        for j, f in enumerate(BASIS):
            gram[i, j] = sq * alpha_e(f) / 2.0
    big = float(np.max(np.abs(gram)))
    asym = float(np.max(np.abs(gram - gram.T)))
    if asym > tol * big:
        raise AsymmetricResult(f"b(e_i, e_j) != b(e_j, e_i): max difference {asym:.3g}")
    gram = 0.5 * (gram + gram.T)
    n0 = unit.n0
    unit_sq = float(n0 @ gram @ n0)
    if not unit_sq > 0.0:
        raise NotPositiveDefinite(f"recovered b(n0, n0) = {unit_sq:.6g}")
    try:
        return SymmetricForm(gram / unit_sq, max_condition=math.inf)
    except InvalidForm as exc:
        raise NotPositiveDefinite(str(exc)) from None


def pythagoras(
    o: TransportOracle, unit: LengthUnit, v: Vector3, w: Vector3, tol: float = TOL
) -> tuple[float, float, float, float]:
    """Norms ``a, b, c`` of ``v, w, v + w`` and the defect ``a^2 + b^2 - c^2``.

    Raises ValueError unless ``w`` is perpendicular to ``v``.
    """
    v = as_vector(v)
    w = as_vector(w)
    if not is_perp(o, w, v, tol):
        raise ValueError(
            "v and w are not perpendicular: no rotation fixes v and maps w to -w"
        )
    a = norm(o, unit, v, tol=tol)
    b = norm(o, unit, w, tol=tol)
    c = norm(o, unit, v + w, tol=tol)
    return a, b, c, a * a + b * b - c * c
