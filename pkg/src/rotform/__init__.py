"""Scalar products on a 3-dimensional real vector space, recovered from rotation groups.

A rotation group acts simply transitively on flags (a half-plane together with
a ray on its boundary). Given only flag-to-flag transport, :mod:`reconstruction`
rebuilds the invariant scalar product up to scale; :mod:`rotation_group`
provides the forward direction SO(V; b) for a given form.
"""

from .errors import (
    AsymmetricResult,
    DegenerateFlag,
    IllConditionedForm,
    InputError,
    InvalidForm,
    InvolutionViolated,
    NonPositiveScale,
    NotCollinear,
    NotPositiveDefinite,
    OracleContractError,
    RotformError,
    ZeroVector,
)
from .geometry import (
    Flag,
    LengthUnit,
    Rotation,
    SymmetricForm,
    adapted_frame,
    apply_flag,
    flag_equal,
    flag_new,
    jacobi_eigh,
    solve_collinear,
)
from .reconstruction import (
    AlphaForm,
    PerpendicularityWitness,
    alpha,
    flip_involution,
    half_turn,
    is_perp,
    norm,
    perp_vector,
    recover_form,
    scalar_product,
)
from .rotation_group import (
    TransportOracle,
    averaged_form,
    haar_sample,
    make_oracle,
    so_membership,
    transport,
)

__version__ = "0.1.0"
