"""Exception hierarchy shared by every module of the package."""


class SurfholError(Exception):
    """Base class for all package errors."""


class TagMismatch(SurfholError):
    pass


class NonFinite(SurfholError):
    pass


class LogDomain(SurfholError):
    """Raised when a group element lies outside the injectivity radius of log."""


class FieldEvaluation(SurfholError):
    pass


class GridMismatch(SurfholError):
    pass


class TauNotInvertible(SurfholError):
    pass


class VariationTooCoarse(SurfholError):
    pass


class NotDiffeo(SurfholError):
    pass


class ConditionViolated(SurfholError):
    pass


class NotComposable(SurfholError):
    def __init__(self, message, left=None, right=None):
        super().__init__(message)
        self.left = left
        self.right = right


class NotQuasiFlat(SurfholError):
    pass


class ConfigParse(SurfholError):
    def __init__(self, message, field=None, line=None):
        where = []
        if field is not None:
            where.append(f"field {field!r}")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.field = field
        self.line = line


class UnknownTask(ConfigParse):
    pass


class UnknownFamily(ConfigParse):
    pass
