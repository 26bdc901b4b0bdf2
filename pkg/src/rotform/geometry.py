"""Fixed-size (3) linear algebra: vectors, forms, rotations and flags.

Vectors and matrices are plain ``numpy`` arrays of shape ``(3,)`` and
``(3, 3)``. The domain wrappers (:class:`SymmetricForm`, :class:`Rotation`,
:class:`Flag`, :class:`LengthUnit`) hold read-only copies and validate their
invariants on construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

import numpy as np

from .errors import DegenerateFlag, IllConditionedForm, InvalidForm, NotCollinear, ZeroVector

Vector3 = np.ndarray
Matrix3 = np.ndarray

TOL = 1e-9
TOL_SYM = 1e-12
TOL_DET = 1e-9
ZERO_THRESHOLD = 1e-300
FLAG_MIN_INDEPENDENCE = 1e-12
PIVOT_THRESHOLD = 1e-14
MAX_CONDITION = 1e6
JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 50

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])
BASIS = (E1, E2, E3)
IDENTITY = np.eye(3)

for _a in (E1, E2, E3, IDENTITY):
    _a.flags.writeable = False


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


def as_vector(x) -> Vector3:
    """Coerce ``x`` to a finite float vector of shape (3,)."""
    v = np.asarray(x, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    if not np.isfinite(v).all():
        raise ValueError("vector has non-finite coordinates")
    return v


def as_matrix(x) -> Matrix3:
    m = np.asarray(x, dtype=float)
    if m.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError("matrix has non-finite entries")
    return m


def det3(m: Matrix3) -> float:
    (a, b, c), (d, e, f), (g, h, i) = m.tolist()
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def cross(a: Vector3, b: Vector3) -> Vector3:
    # np.cross carries ~20us of axis handling for a 3-vector
    a0, a1, a2 = a.tolist()
    b0, b1, b2 = b.tolist()
    return np.array([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0])


def vnorm(v: Vector3) -> float:
    """Euclidean coordinate norm of a 3-vector (cheaper than ``np.linalg.norm``)."""
    return math.sqrt(float(v @ v))


def is_zero(v: Vector3) -> bool:
    return float(np.linalg.norm(v)) <= ZERO_THRESHOLD


def independence(v: Vector3, w: Vector3) -> float:
    """Normalized Gram determinant ``1 - cos^2`` of the coordinate angle.

    Computed as ``|v x w|^2 / (|v|^2 |w|^2)`` (Lagrange's identity) to avoid
    the cancellation in ``|v|^2 |w|^2 - <v, w>^2``. Zero for a zero vector.
    """
    a0, a1, a2 = v.tolist()
    b0, b1, b2 = w.tolist()
    vv = a0 * a0 + a1 * a1 + a2 * a2
    ww = b0 * b0 + b1 * b1 + b2 * b2
    if vv == 0.0 or ww == 0.0:
        return 0.0
    c0 = a1 * b2 - a2 * b1
    c1 = a2 * b0 - a0 * b2
    c2 = a0 * b1 - a1 * b0
    return (c0 * c0 + c1 * c1 + c2 * c2) / vv / ww


def auxiliary_basis_vector(x: Vector3, skip: int | None = None) -> int:
    """Index of the standard basis vector most independent of ``x``.

    Minimizes ``|cos|`` of the coordinate angle, ties going to the lowest
    index. ``skip`` excludes one index (used to pick a second auxiliary).
    """
    a = np.abs(np.asarray(x, dtype=float))
    if skip is not None:
        a = a.copy()
        a[skip] = np.inf
    return int(np.argmin(a))


def jacobi_eigh(
    a: Matrix3, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS
) -> tuple[np.ndarray, Matrix3]:
    """Eigendecomposition of a symmetric 3x3 matrix by cyclic Jacobi rotations.

    Returns eigenvalues in ascending order and the matching orthonormal
    eigenvectors as columns. Stops once the off-diagonal Frobenius norm is
    at most ``tol`` times the norm of the whole matrix.
    """
    a = np.array(a, dtype=float)
    v = np.eye(3)
    scale = float(np.linalg.norm(a))
    if scale == 0.0:
        return np.zeros(3), v
    for _ in range(max_sweeps):
        off = math.sqrt(a[0, 1] ** 2 + a[0, 2] ** 2 + a[1, 2] ** 2)
        if off <= tol * scale:
            order = np.argsort(np.diag(a), kind="stable")
            return np.diag(a)[order].copy(), v[:, order].copy()
        for p, q in ((0, 1), (0, 2), (1, 2)):
            apq = a[p, q]
            if abs(apq) <= 1e-18 * scale:
                # negligible against the matrix; rotating would only overflow theta
                a[p, q] = a[q, p] = 0.0
                continue
            theta = (a[q, q] - a[p, p]) / (2.0 * apq)
            if abs(theta) > 1e150:
                t = 0.5 / theta
            else:
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
            c = 1.0 / math.sqrt(t * t + 1.0)
            s = t * c
            j = np.eye(3)
            j[p, p] = c
            j[q, q] = c
            j[p, q] = s
            j[q, p] = -s
            a = j.T @ a @ j
            a[p, q] = a[q, p] = 0.0
            v = v @ j
    raise IllConditionedForm(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


@dataclass(frozen=True, eq=False)
class SymmetricForm:
    """Symmetric positive-definite bilinear form ``b(v, w) = v^T m w``.

    The matrix is symmetrized on construction after checking that its
    asymmetry is below ``TOL_SYM`` relative to its largest entry.
    """

    m: Matrix3
    max_condition: float = MAX_CONDITION
    eigenvalues: np.ndarray = field(init=False, repr=False)
    eigenvectors: Matrix3 = field(init=False, repr=False)

    def __post_init__(self):
        try:
            m = as_matrix(self.m)
        except ValueError as exc:
            raise InvalidForm(str(exc)) from None
        big = float(np.max(np.abs(m)))
        asym = float(np.max(np.abs(m - m.T)))
        if big == 0.0 or asym > TOL_SYM * big:
            if big == 0.0:
                raise InvalidForm("not positive definite: zero matrix")
            raise InvalidForm(f"not symmetric: max |m - m^T| = {asym:.3g}")
        m = 0.5 * (m + m.T)
        evals, evecs = jacobi_eigh(m)
        if evals[0] <= 0.0:
            raise InvalidForm(f"not positive definite: smallest eigenvalue {evals[0]:.6g}")
        cond = evals[2] / evals[0]
        if cond > self.max_condition:
            raise IllConditionedForm(
                f"condition number {cond:.3g} exceeds {self.max_condition:.3g}"
            )
        object.__setattr__(self, "m", _frozen(m))
        object.__setattr__(self, "eigenvalues", _frozen(evals))
        object.__setattr__(self, "eigenvectors", _frozen(evecs))

    @classmethod
    def identity(cls) -> SymmetricForm:
        return cls(np.eye(3))

    @classmethod
    def diagonal(cls, *entries: float) -> SymmetricForm:
        return cls(np.diag(np.asarray(entries, dtype=float)))

    def __call__(self, v: Vector3, w: Vector3) -> float:
        return float(v @ self.m @ w)

    @property
    def condition(self) -> float:
        return float(self.eigenvalues[2] / self.eigenvalues[0])

    @cached_property
    def sqrt(self) -> Matrix3:
        """Symmetric square root ``M^{1/2}``."""
        q = self.eigenvectors
        return _frozen((q * np.sqrt(self.eigenvalues)) @ q.T)

    @cached_property
    def inv_sqrt(self) -> Matrix3:
        q = self.eigenvectors
        return _frozen((q / np.sqrt(self.eigenvalues)) @ q.T)

    def scaled(self, factor: float) -> SymmetricForm:
        return SymmetricForm(self.m * factor, self.max_condition)


@dataclass(frozen=True, eq=False)
class Rotation:
    """Invertible linear map of V, a candidate element of a rotation group.

    Only finiteness and invertibility are enforced here. Whether the map is a
    genuine rotation (``det = 1``, form preserving) is a question answered by
    :func:`rotform.rotation_group.so_membership`, so that results of broken
    oracles can still be inspected.
    """

    m: Matrix3

    def __post_init__(self):
        m = as_matrix(self.m)
        if abs(det3(m)) <= ZERO_THRESHOLD:
            raise ValueError("rotation matrix is singular")
        object.__setattr__(self, "m", _frozen(m))

    @classmethod
    def identity(cls) -> Rotation:
        return cls(IDENTITY)

    @property
    def det(self) -> float:
        return det3(self.m)

    def inverse(self) -> Rotation:
        return Rotation(np.linalg.inv(self.m))

    def __matmul__(self, other: Union[Rotation, np.ndarray]):
        if isinstance(other, Rotation):
            return Rotation(self.m @ other.m)
        return self.m @ other


@dataclass(frozen=True, eq=False)
class Flag:
    """The pair (half-plane ``Rv + R>=0 w``, boundary ray ``R>=0 v``)."""

    v: Vector3
    w: Vector3

    def __post_init__(self):
        v = as_vector(self.v)
        w = as_vector(self.w)
        g = independence(v, w)
        if not g >= FLAG_MIN_INDEPENDENCE:
            raise DegenerateFlag(f"flag vectors are linearly dependent (independence {g:.3g})")
        object.__setattr__(self, "v", _frozen(v))
        object.__setattr__(self, "w", _frozen(w))


@dataclass(frozen=True, eq=False)
class LengthUnit:
    """A length unit, represented by one vector of the orbit it spans."""

    n0: Vector3 = E1

    def __post_init__(self):
        n0 = as_vector(self.n0)
        if is_zero(n0):
            raise ZeroVector("length unit must be a nonzero vector")
        object.__setattr__(self, "n0", _frozen(n0))


def flag_new(v, w) -> Flag:
    return Flag(v, w)


def _fit_flag(f1: Flag, f2: Flag) -> tuple[float, float, float]:
    """Write ``f2`` in terms of ``f1``.

    Returns ``(lam, c, residual)`` where ``f2.v ~ lam f1.v`` and
    ``f2.w ~ a f1.v + c f1.w`` in the least-squares sense, and ``residual`` is
    the larger of the two relative residuals.
    """
    v1, w1, v2, w2 = f1.v, f1.w, f2.v, f2.w
    vv = float(v1 @ v1)
    lam = float(v2 @ v1) / vv
    res_v = vnorm(v2 - lam * v1) / vnorm(v2)
    vw = float(v1 @ w1)
    ww = float(w1 @ w1)
    rv = float(v1 @ w2)
    rw = float(w1 @ w2)
    det = vv * ww - vw * vw
    a = (ww * rv - vw * rw) / det
    c = (vv * rw - vw * rv) / det
    res_w = vnorm(w2 - a * v1 - c * w1) / vnorm(w2)
    return lam, c, max(res_v, res_w)


def flag_residual(f1: Flag, f2: Flag) -> float:
    """Relative residual of ``f2`` against the flag ``f1``; ``inf`` if a ray or side flips."""
    lam, c, res = _fit_flag(f1, f2)
    if lam <= 0.0 or c <= 0.0:
        return math.inf
    return res


def flag_equal(f1: Flag, f2: Flag, tol: float = TOL) -> bool:
    """True iff ``f1`` and ``f2`` are the same (half-plane, ray) pair within ``tol``."""
    return flag_residual(f1, f2) <= tol


def apply_flag(d: Rotation, f: Flag) -> Flag:
    return Flag(d.m @ f.v, d.m @ f.w)


def frame_matrix(b: SymmetricForm, f: Flag) -> Matrix3:
    """Columns are the ``b``-orthonormal, positively oriented frame adapted to ``f``.

    Gram-Schmidt in the ``b`` inner product on ``(v, w, v x w)``, projecting
    each vector against the finished ones (never via the Gram matrix, whose
    Cholesky factor would square the conditioning of thin flags).
    Orientation is positive because ``det(v, w, v x w) = |v x w|^2 > 0`` and
    every step only adds multiples of earlier vectors and rescales by a
    positive factor.
    """
    # plain floats: numpy call overhead dominates at this size
    (m00, m01, m02), (m10, m11, m12), (m20, m21, m22) = b.m.tolist()

    def mul(x):
        return (
            m00 * x[0] + m01 * x[1] + m02 * x[2],
            m10 * x[0] + m11 * x[1] + m12 * x[2],
            m20 * x[0] + m21 * x[1] + m22 * x[2],
        )

    def dot(x, y):
        return x[0] * y[0] + x[1] * y[1] + x[2] * y[2]

    v = f.v.tolist()
    w = f.w.tolist()
    mv = mul(v)
    s1 = math.sqrt(dot(v, mv))
    e1 = [x / s1 for x in v]
    me1 = [x / s1 for x in mv]
    k = dot(w, me1)
    u = [w[i] - k * e1[i] for i in range(3)]
    mu = mul(u)
    uu = dot(u, mu)
    ww = dot(w, mul(w))
    if uu <= PIVOT_THRESHOLD * ww:
        raise IllConditionedForm(f"Gram-Schmidt pivot {uu / ww:.3g} below threshold")
    s2 = math.sqrt(uu)
    e2 = [x / s2 for x in u]
    me2 = [x / s2 for x in mu]
    c = [
        v[1] * w[2] - v[2] * w[1],
        v[2] * w[0] - v[0] * w[2],
        v[0] * w[1] - v[1] * w[0],
    ]
    k1 = dot(c, me1)
    k2 = dot(c, me2)
    t = [c[i] - k1 * e1[i] - k2 * e2[i] for i in range(3)]
    tt = dot(t, mul(t))
    if tt <= PIVOT_THRESHOLD * dot(c, mul(c)):
        raise IllConditionedForm("Gram-Schmidt pivot below threshold for the third vector")
    s3 = math.sqrt(tt)
    return np.array([e1, e2, [x / s3 for x in t]]).T


def adapted_frame(b: SymmetricForm, f: Flag) -> tuple[Vector3, Vector3, Vector3]:
    """``b``-orthonormal frame ``(e1, e2, e3)`` with ``e1`` on the ray of ``f``,
    ``e2`` on its open half-plane side, and ``det(e1|e2|e3) > 0``."""
    fm = frame_matrix(b, f)
    return fm[:, 0], fm[:, 1], fm[:, 2]


def solve_collinear(target: Vector3, direction: Vector3, tol: float = TOL) -> float:
    """Scalar ``alpha`` with ``target = alpha * direction``, by least squares.

    Raises NotCollinear if the residual exceeds
    ``tol * (|target| + |alpha direction| + |direction|)``.
    """
    dd = float(direction @ direction)
    if math.sqrt(dd) <= ZERO_THRESHOLD:
        raise ZeroVector("direction must be nonzero")
    alpha = float(target @ direction) / dd
    fitted = alpha * direction
    res = vnorm(target - fitted)
    bound = tol * (vnorm(target) + vnorm(fitted) + math.sqrt(dd))
    if res > bound:
        raise NotCollinear(f"residual {res:.3g} exceeds {bound:.3g}")
    return alpha


def rel_dist(a: np.ndarray, b: np.ndarray) -> float:
    """``|a - b| / max(|a|, |b|)``, Frobenius for matrices; 0 when both vanish."""
    scale = max(float(np.linalg.norm(a)), float(np.linalg.norm(b)))
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(a - b)) / scale


def scale_free_distance(a: Matrix3, b: Matrix3) -> float:
    """``min_{s>0} |s a - b|_F / |b|_F`` with the optimal ``s = <a,b>_F / <a,a>_F``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    s = float(np.sum(a * b)) / float(np.sum(a * a))
    s = max(s, 0.0)
    return float(np.linalg.norm(s * a - b)) / float(np.linalg.norm(b))
