"""Exception types shared across the package.

Every contract violation raises a subclass of WorkbenchError so callers can
distinguish modelling mistakes from genuine bugs.  Exceptions carry enough
structured context (witnesses, suggested fixes) to be reported verbatim.
"""


class WorkbenchError(Exception):
    """Base class for all contract violations raised by this package."""


class FieldMismatch(WorkbenchError):
    """Operands live in different coefficient fields."""


class OrderNotSupported(WorkbenchError):
    """Requested root of unity does not exist in the field.

    Carries .suggested_conductor, the smallest cyclotomic conductor that
    would make the request valid.
    """

    def __init__(self, message, suggested_conductor=None):
        super().__init__(message)
        self.suggested_conductor = suggested_conductor


class BoundsExceeded(WorkbenchError):
    """Input is larger than the supported desk-scale bounds."""


class NotNormal(WorkbenchError):
    """Subgroup was required to be normal but is not."""


class NotAUnit(WorkbenchError):
    """Residue was required to be an invertible unit but is not."""


class InvalidNormalCharacter(WorkbenchError):
    """Character data fails the compatibility laws; .report holds details."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class LevelNotAdmissibleClass(WorkbenchError):
    """Level subgroup fails a membership condition of the admissible class."""


class InconsistentValues(WorkbenchError):
    """Partial or serialized data contradicts the equivariance laws."""


class InstanceMismatch(WorkbenchError):
    """Operands belong to different workbench instances."""


class CompatibilityViolation(WorkbenchError):
    """A pushforward precondition (image of kernel, twist, character) fails."""


class ParentMismatch(WorkbenchError):
    """Basis elements belong to a different algebra object."""


class NotNested(WorkbenchError):
    """Level pair passed to an embedding is not nested."""


class WellDefinednessFailure(WorkbenchError):
    """Internal tripwire: a quantity depended on a choice it must not."""


class NonSplitBlock(WorkbenchError):
    """A simple block is not split over the configured field.

    Carries .suggested_conductor, a conductor expected to split the algebra.
    """

    def __init__(self, message, suggested_conductor=None):
        super().__init__(message)
        self.suggested_conductor = suggested_conductor


class NotIdempotent(WorkbenchError):
    """Matrix or element passed to a class map is not idempotent."""


class NotPermutation(WorkbenchError):
    """An induced automorphism did not permute the block basis."""


class NoTwistConfigured(WorkbenchError):
    """Tower has no attached automorphism but one is required."""


class BaseMismatch(WorkbenchError):
    """Laurent operands are defined over different base algebras."""


class ConfigError(WorkbenchError):
    """Configuration document is malformed; message carries the JSON path."""
