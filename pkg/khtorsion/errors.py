"""
Exception hierarchy for khtorsion.

Input problems (bad PD text, bad movie files, inapplicable moves) derive
from InputError and map to exit status 2. Broken internal invariants
(d² ≠ 0, non-homogeneous maps, non-monomial torsion) derive from
InternalError and map to exit status 3.
"""
from typing import Optional


class KhtError(Exception):
    """Base class for all khtorsion errors."""
    exit_code = 1


class InputError(KhtError, ValueError):
    """Raised when user supplied data cannot be used."""
    exit_code = 2


class InternalError(KhtError, RuntimeError):
    """Raised when a computed object violates an invariant it must satisfy."""
    exit_code = 3


class MalformedPD(InputError):
    pass


class ArcMultiplicity(InputError):
    pass


class InconsistentOrientation(InputError):
    pass


class NonPlanarDiagram(InputError):
    pass


class NotAKnot(InputError):
    pass


class MultiComponentWhereKnotRequired(NotAKnot):
    pass


class ConfigError(InputError):
    pass


class MalformedMovie(InputError):
    pass


class MovieError(InputError):
    """Movie problem tied to a position in the move list."""

    def __init__(self, message: str, move_index: Optional[int] = None):
        if move_index is not None:
            message = f"move {move_index}: {message}"
        super().__init__(message)
        self.move_index = move_index


class FrameMismatch(MovieError):
    pass


class BadLocus(MovieError):
    pass


class MoveNotApplicable(MovieError):
    pass


class EndpointNotKnot(MovieError):
    pass


class NotConnected(InputError):
    pass


class NoSuchHandle(MovieError):
    pass


class NotReversePair(MovieError):
    pass


class D2NotZero(InternalError):
    pass


class NotHomogeneous(InternalError):
    pass


class NonMonomialTorsion(InternalError):
    pass


class ComposeNotZero(InternalError):
    pass


class NotAChainMap(InternalError):
    pass


class NotWellDefined(InternalError):
    pass


class MapConstructionError(InternalError):
    pass
