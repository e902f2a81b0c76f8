#!/usr/bin/env python3
"""
Error Hierarchy

Every failure raised by signclust derives from SignedClusteringError so the
CLI can turn it into a machine-readable JSON object. Input validation errors
also derive from ValueError.
"""

from typing import Any, Dict, Optional


class SignedClusteringError(Exception):
    """Base class for all signclust errors"""

    exit_code: int = 1

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.context = dict(context or {})

    def to_dict(self) -> Dict[str, Any]:
        """Serialise for the JSON error channel"""
        payload: Dict[str, Any] = {
            'error': type(self).__name__,
            'message': self.message,
        }
        if self.context:
            payload['context'] = self.context
        return payload

    def __str__(self) -> str:
        if not self.context:
            return self.message
        where = ', '.join(f"{key}={value}" for key, value in self.context.items())
        return f"{self.message} ({where})"


class ValidationError(SignedClusteringError, ValueError):
    """Rejected input; exit code 2"""

    exit_code = 2


class ConfigError(ValidationError):
    """Parameter or configuration value out of range"""


class ParseError(ValidationError):
    """Malformed line in an input file"""


class DimensionMismatch(ValidationError):
    """Vector or matrix shapes disagree"""


class EmptyVocabulary(ValidationError):
    """No words survived loading and filtering"""


class ConflictError(ValidationError):
    """The same pair or edge is declared with incompatible values"""


class GraphValidationError(ValidationError):
    """Weight matrix is not a valid signed graph"""


class BadK(ValidationError):
    """Cluster count outside the admissible range"""


class TooLarge(ValidationError):
    """Instance exceeds the exhaustive enumeration budget"""


class IsolatedVertexError(SignedClusteringError):
    """A node has zero signed degree"""

    exit_code = 2


class EmptyClusterError(SignedClusteringError):
    """A cluster of the partition has no members"""


class ZeroVolumeError(SignedClusteringError):
    """A cluster has zero volume, sNcut is undefined"""


class ConvergenceError(SignedClusteringError):
    """An iterative routine ran out of budget"""


class DegenerateRows(SignedClusteringError):
    """All rows of the relaxed solution point the same way"""


class RankDeficient(SignedClusteringError):
    """A Procrustes cross-product matrix has a zero singular value"""


class SingleClassError(SignedClusteringError):
    """Entropy needs at least two gold classes"""

    exit_code = 2
