"""
Errors Module
Exception hierarchy; every error carries an ErrorCode
"""

from typing import Optional

from .constants import ErrorCode


class RidepoolError(Exception):
    """Base error with a machine readable code"""
    code = ErrorCode.UNKNOWN_ERROR

    def __init__(self, message: str, details: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.details = details


class InputError(RidepoolError):
    """Bad or missing input; CLI exit code 2"""


class SolverError(RidepoolError):
    """Solver internal failure; CLI exit code 3"""


class SchemaError(InputError):
    code = ErrorCode.SCHEMA_ERROR


class MissingModelError(InputError):
    code = ErrorCode.MISSING_MODEL


class ModelError(InputError):
    """Maximum likelihood estimate does not exist or cannot be computed"""


class SeparationError(ModelError):
    code = ErrorCode.SEPARATION


class SingularDesignError(ModelError):
    code = ErrorCode.SINGULAR_DESIGN


class EmptyCategoryError(ModelError):
    code = ErrorCode.EMPTY_CATEGORY


class OutOfServiceError(InputError):
    code = ErrorCode.OUT_OF_SERVICE


class DuplicateRequestError(InputError):
    code = ErrorCode.DUPLICATE_REQUEST


class UnknownRequestError(InputError):
    code = ErrorCode.UNKNOWN_REQUEST


class NoConnectionError(InputError):
    code = ErrorCode.NO_CONNECTION


class EmptyAcceptedSetError(InputError):
    code = ErrorCode.EMPTY_ACCEPTED_SET


class ReportMismatchError(InputError):
    code = ErrorCode.REPORT_MISMATCH


class InconsistentFixingError(SolverError):
    code = ErrorCode.INCONSISTENT_FIXING


class InfeasibleError(SolverError):
    code = ErrorCode.INFEASIBLE
