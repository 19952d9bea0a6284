from __future__ import annotations


class PptCanonError(ValueError):
    """Base class for every typed failure raised by pptcanon."""


class NormalizationError(PptCanonError):
    """Raised when a vector or state is not normalized within tolerance."""


class NotHermitianError(PptCanonError):
    """Raised when a matrix that must be Hermitian is not."""


class NotPsdError(PptCanonError):
    """Raised when a matrix has an eigenvalue below the negative tolerance."""


class SingularError(PptCanonError):
    """Raised when an inverse square root is requested of a singular matrix."""


class DimensionMismatch(PptCanonError):
    """Raised when matrix shapes disagree with the tripartite dimensions."""


class PreconditionError(PptCanonError):
    """Raised when generator parameters are outside their valid range."""


class NotPptError(PptCanonError):
    """Raised when a state fails the positive partial transpose test."""


class RankMismatch(PptCanonError):
    """Raised when the state rank or corner rank differs from N."""


class StructureViolation(PptCanonError):
    """Raised when the filtered state is not of the canonical product form."""


class CommutatorViolation(PptCanonError):
    """Raised when a generator family is not commuting and normal."""


class DegeneracyUnresolved(PptCanonError):
    """Raised when no common eigenbasis could be separated numerically."""


class NoWitness(PptCanonError):
    """Raised when no product pair with a full-rank sandwich was found."""


class CertificationFailure(PptCanonError):
    """Raised when a candidate ensemble does not reconstruct the state."""


class FileFormatError(PptCanonError):
    """Raised when a state or ensemble file cannot be parsed."""
