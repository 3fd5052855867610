"""Exception types shared across the package."""


class AffineSphereError(Exception):
    """Base class for all package errors."""


class ZeroDivisor(AffineSphereError):
    """Inversion of a split-complex number on the null cone (u*v = 0)."""


class ZeroVector(AffineSphereError):
    """A nonzero vector was required."""


class DomainError(AffineSphereError):
    """Evaluation left the real domain of an analytic function."""


class ExprSyntaxError(AffineSphereError):
    """Malformed curve expression; carries the byte offset of the failure."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownFunction(ExprSyntaxError):
    pass


class NonIntegerExponent(ExprSyntaxError):
    pass


class EvalError(AffineSphereError):
    """Expression evaluation failed; carries the offending subexpression."""

    def __init__(self, message: str, subexpr: str = ""):
        super().__init__(f"{message}: {subexpr}" if subexpr else message)
        self.subexpr = subexpr


class UnboundParameter(EvalError):
    pass


class NotAdmissible(AffineSphereError):
    """An admissibility condition failed; records which one and where."""

    def __init__(self, condition: str, s: float, residual: float):
        super().__init__(
            f"admissibility condition {condition!r} fails at s={s:.6g} "
            f"(residual {residual:.3e})"
        )
        self.condition = condition
        self.s = s
        self.residual = residual


class LambdaNonPositive(AffineSphereError):
    """The metric function along the curve is not strictly positive."""

    def __init__(self, s: float, value: float):
        super().__init__(f"lambda(s) = {value:.6g} <= 0 at s={s:.6g}")
        self.s = s
        self.value = value


class DegenerateProjection(AffineSphereError):
    """[alpha', alpha'', xi] vanishes; the conormal is not determined."""


class ConvexityViolation(AffineSphereError):
    """a''(x) <= 0 somewhere on the initial interval."""

    def __init__(self, x: float, value: float):
        super().__init__(
            f"a''(x) = {value:.6g} <= 0 at x={x:.6g}; "
            "flip the sign of the data (f -> -f) if the concave problem is intended"
        )
        self.x = x
        self.value = value


class OutOfChart(AffineSphereError):
    """Requested (x, y) point is not reached by the parameter rectangle."""


class JacobianSingular(AffineSphereError):
    """Chart inversion hit the singular set (degenerate Jacobian)."""


class QuadratureFailure(AffineSphereError):
    """Adaptive quadrature could not meet the requested tolerance."""

    def __init__(self, requested: float, achieved: float):
        super().__init__(
            f"quadrature tolerance {requested:.3e} not met "
            f"(achieved error estimate {achieved:.3e})"
        )
        self.requested = requested
        self.achieved = achieved


class SymmetryMismatch(AffineSphereError):
    """The claimed symmetry does not fix the Bjorling data."""

    def __init__(self, condition: str, s: float, deviation: float):
        super().__init__(
            f"symmetry condition {condition!r} fails at s={s:.6g} "
            f"(deviation {deviation:.3e})"
        )
        self.condition = condition
        self.s = s
        self.deviation = deviation


class SpecInvalid(AffineSphereError):
    """Invalid catalog surface parameters."""


class ConfigError(AffineSphereError):
    """Invalid run configuration (CLI exit code 2)."""
