"""Exception hierarchy.

Two families: ``InputError`` for bad arguments (degenerate flags, zero vectors,
invalid forms), and ``OracleContractError`` for results that contradict the
rotation-group axioms. The CLI maps the first to exit code 2 and the second to
exit code 3.
"""

from __future__ import annotations


class RotformError(Exception):
    """Base class for all errors raised by this package."""


class InputError(RotformError, ValueError):
    pass


class DegenerateFlag(InputError):
    """The two vectors of a flag are (numerically) linearly dependent."""


class ZeroVector(InputError):
    pass


class InvalidForm(InputError):
    """A matrix failed a SymmetricForm invariant (shape, finiteness, symmetry, definiteness)."""


class IllConditionedForm(InputError):
    """Form too badly conditioned for the default tolerances to be meaningful."""


class OracleContractError(RotformError, ArithmeticError):
    """A transport oracle returned something no rotation group could."""


class NotCollinear(OracleContractError):
    pass


class NonPositiveScale(OracleContractError):
    pass


class InvolutionViolated(OracleContractError):
    pass


class AsymmetricResult(OracleContractError):
    pass


class NotPositiveDefinite(OracleContractError):
    pass
