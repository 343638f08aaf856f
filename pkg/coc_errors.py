#!/usr/bin/env python3
"""
COC Error Hierarchy
===================

Every failure the library can report is a COCError. The class decides the CLI
exit code, so callers only need to catch the base class:

    COCError
      InputError (exit 1)       - bad tables, bad covectors, wrong preconditions
      NumericalError (exit 2)   - rank / convergence / conditioning failures

Anything else escaping the CLI is an internal error (exit 3).
"""

from typing import Any, Dict, Optional


class COCError(Exception):
    """Base class for all COC failures"""
    exit_code = 3

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": type(self).__name__,
            "message": self.message,
            "details": self.details,
        }


# ============================================================================
# INPUT ERRORS (exit 1)
# ============================================================================

class InputError(COCError):
    exit_code = 1


class AlgebraFormatError(InputError):
    """Malformed algebra JSON (missing fields, wrong types, duplicates)"""


class AntisymmetryViolation(InputError):
    """(i,j) and (j,i) entries disagree, or [e_i, e_i] != 0"""


class JacobiViolation(InputError):
    """Cyclic Jacobi sum exceeds tau_alg on some triple"""


class IndexOutOfRange(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class NotAnIdeal(InputError):
    pass


class UnknownAlgebra(InputError):
    pass


class NotBounded(InputError):
    """An operation that needs a bounded orbit got an unbounded one"""


class ConfigError(InputError):
    pass


class UsageError(InputError):
    """Bad command line: unknown flags, missing or conflicting arguments"""


# ============================================================================
# NUMERICAL ERRORS (exit 2)
# ============================================================================

class NumericalError(COCError):
    exit_code = 2


class RankAmbiguous(NumericalError):
    """Singular values straddle the rank threshold within a factor of 10"""


class LeviNotFound(NumericalError):
    pass


class CriterionDisagreement(NumericalError):
    """Cartan's criterion and the derived series disagree on solvability"""


class DecompositionFailed(NumericalError):
    pass


class IndefiniteBorderline(NumericalError):
    """Restricted Killing form has eigenvalues too close to zero to sign"""


class FlowDiverged(NumericalError):
    pass


class WitnessReplayFailed(NumericalError):
    pass
