"""The special orthogonal group of a scalar product, acting on flags.

:func:`transport` is the constructive form of the defining axiom of a rotation
group: for any two flags there is exactly one group element carrying the first
onto the second. :func:`make_oracle` closes it over a fixed form so that
consumers only ever see flag-to-flag transport.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import (
    IDENTITY,
    TOL,
    Flag,
    Rotation,
    SymmetricForm,
    frame_matrix,
)


def transport(b: SymmetricForm, f1: Flag, f2: Flag) -> Rotation:
    """The unique element of SO(V; b) mapping flag ``f1`` onto ``f2``.

    With ``F1``, ``F2`` the adapted frames as column matrices, the result is
    ``F2 F1^{-1}``. Since ``F1`` is ``b``-orthonormal, ``F1^{-1} = F1^T M``.
    """
    fr1 = frame_matrix(b, f1)
    fr2 = frame_matrix(b, f2)
    return Rotation(fr2 @ (fr1.T @ b.m))


def membership_residuals(b: SymmetricForm, d: Rotation) -> tuple[float, float]:
    """``(|d^T M d - M|_F / |M|_F, |det d - 1|)``."""
    m = b.m
    pull = float(np.linalg.norm(d.m.T @ m @ d.m - m)) / float(np.linalg.norm(m))
    return pull, abs(d.det - 1.0)


def so_membership(b: SymmetricForm, d: Rotation, tol: float = TOL) -> bool:
    pull, det_err = membership_residuals(b, d)
    return pull <= tol and det_err <= tol


def _quaternion_matrices(q: np.ndarray) -> np.ndarray:
    """Rotation matrices for a stack of quaternions ``(w, x, y, z)``, normalized first."""
    q = q / np.linalg.norm(q, axis=-1, keepdims=True)
    w, x, y, z = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            np.stack([1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)], -1),
            np.stack([2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)], -1),
            np.stack([2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)], -1),
        ],
        -2,
    )


def haar_sample(b: SymmetricForm, rng: np.random.Generator) -> Rotation:
    """Haar-distributed element of SO(V; b).

    A uniform unit quaternion (four normal deviates, normalized) gives ``Q`` in
    the coordinate SO(3); ``M^{-1/2} Q M^{1/2}`` then preserves ``b``.
    """
    q = _quaternion_matrices(rng.standard_normal(4))
    return Rotation(b.inv_sqrt @ q @ b.sqrt)


def haar_samples(b: SymmetricForm, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` Haar samples as an ``(n, 3, 3)`` array.

    Consumes the generator exactly like ``n`` successive :func:`haar_sample`
    calls, so both routes give the same matrices for the same seed.
    """
    q = _quaternion_matrices(rng.standard_normal((n, 4)))
    return b.inv_sqrt @ q @ b.sqrt


def averaged_form(
    b: SymmetricForm, n_samples: int, rng: np.random.Generator, chunk: int = 50_000
) -> SymmetricForm:
    """Group average of the coordinate dot product over ``n_samples`` Haar samples.

    Returns ``(1/n) sum d_i^T d_i``, symmetrized. Invariance forces the exact
    average to be a positive multiple of ``b``; this is only a Monte-Carlo
    estimate, used to cross-check reconstruction.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    acc = np.zeros((3, 3))
    done = 0
    while done < n_samples:
        k = min(chunk, n_samples - done)
        d = haar_samples(b, k, rng)
        acc += np.einsum("nki,nkj->ij", d, d)
        done += k
    acc /= n_samples
    return SymmetricForm(0.5 * (acc + acc.T), max_condition=math.inf)


@dataclass(frozen=True)
class TransportOracle:
    """Flag-to-flag transport of some rotation group, and nothing else.

    Calling the oracle with two flags returns the group element carrying the
    first onto the second. ``tag`` only labels the oracle in diagnostics.
    """

    fn: Callable[[Flag, Flag], Rotation]
    tag: str = "oracle"

    def __call__(self, f1: Flag, f2: Flag) -> Rotation:
        return self.fn(f1, f2)

    transport = __call__

    def __repr__(self) -> str:
        return f"TransportOracle({self.tag!r})"


def make_oracle(b: SymmetricForm, tag: str | None = None) -> TransportOracle:
    def fn(f1: Flag, f2: Flag) -> Rotation:
        return transport(b, f1, f2)

    return TransportOracle(fn, tag or "SO(V;b)")


def euclidean_oracle() -> TransportOracle:
    return make_oracle(SymmetricForm(IDENTITY), "euclidean")

