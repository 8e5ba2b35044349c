"""Exception types; each carries the CLI exit code it maps to."""


class ToricDiagError(Exception):
    code = "error"
    exit_status = 1


class InputError(ToricDiagError, ValueError):
    code = "input_error"
    exit_status = 3


class VerificationError(ToricDiagError):
    code = "verification_failed"
    exit_status = 2


class WindowTooSmallError(ToricDiagError):
    code = "window_too_small"
    exit_status = 4


class SearchBoundExceeded(ToricDiagError):
    code = "kmax_exhausted"
    exit_status = 4
