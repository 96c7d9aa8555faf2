"""Exception types shared across the package."""


class ToricHeightError(Exception):
    """Base class for all errors raised by this package."""


class SlopeMismatch(ToricHeightError):
    """Two functions (or a function and a divisor) disagree on ray slopes."""


class NonFiniteSample(ToricHeightError):
    """A sampled value was NaN or infinite."""


class SlopeOrderViolation(ToricHeightError):
    """No concave function can have slope_neg_inf < slope_pos_inf."""


class DomainMismatch(ToricHeightError):
    """The interval handed to a conjugate differs from the slope range."""


class EnvelopeMismatch(ToricHeightError):
    """The alleged envelope fails to majorize the function."""


class NonCompactSupport(ToricHeightError):
    """Dirichlet energy needs zero ray slopes and zero ray values."""


class NotSemipositive(ToricHeightError):
    """Operation requires a concave metric function."""


class OutsidePolytope(ToricHeightError):
    """The normalized lattice point lies outside the divisor polytope."""


class ParseError(ToricHeightError):
    """Input text is not well-formed."""


class ValidationError(ToricHeightError):
    """Input parsed but violates the schema or the type invariants."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
