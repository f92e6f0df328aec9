"""Exception hierarchy shared by every module."""


class McbopError(Exception):
    """Base class for all library errors."""


class DivisionByZero(McbopError, ZeroDivisionError):
    """Raised when inverting a ring element whose value part vanishes."""


class Singular(McbopError):
    """A matrix (or its value part, over jets) is not invertible."""


class QuasideterminantUndefined(Singular):
    def __init__(self, i, j, msg=None):
        self.i, self.j = i, j
        super().__init__(msg or f"quasideterminant |A|_{{{i},{j}}} undefined: deleted submatrix is singular")


class MomentConditionViolated(McbopError):
    def __init__(self, n):
        self.n = n
        super().__init__(f"moment condition fails: principal block minor (m_ij)_{{i,j<={n}}} is singular")


class VnSingular(Singular):
    def __init__(self, n):
        self.n = n
        super().__init__(f"V_{n} is singular")


class HnSingular(Singular):
    def __init__(self, n):
        self.n = n
        super().__init__(f"H_{n} is singular")


class SystemSingular(Singular):
    pass


class TruncationTooSmall(McbopError):
    pass


class UnsupportedFamily(McbopError):
    pass


class MeasureParseError(McbopError):
    pass


class ConfigError(McbopError):
    pass
