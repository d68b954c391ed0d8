"""Exception hierarchy shared by all modules."""


class LorentzCalderonError(Exception):
    """Base class for every error raised by this package."""


class ExponentError(LorentzCalderonError, ArithmeticError):
    """Undefined extended-rational operation (division by zero, inf - inf, 0 * inf)."""


class ParameterError(LorentzCalderonError, ValueError):
    """Parameter tuple violates 1 < p0 < q < inf, 1 < p1 < inf, 1 <= q0 <= q1 <= inf."""


class NoSolution(LorentzCalderonError, ValueError):
    """The scaling relation between r1 and r2 has no admissible partner."""


class NonNormable(LorentzCalderonError, ValueError):
    """A Lorentz pair (p, s) is not equivalent to a rearrangement-invariant space."""


class TrivialSpace(LorentzCalderonError, ValueError):
    """The downgraded space X<p0,q0> contains only the zero function."""


class GridError(LorentzCalderonError, ValueError):
    """Requested grid is empty or exceeds the size cap."""


class DivergentIntegral(LorentzCalderonError, ArithmeticError):
    """Power-weighted integral diverges at the origin."""


class DegenerateInput(LorentzCalderonError, ValueError):
    """Input function is identically zero where a nonzero one is required."""


class SpecError(LorentzCalderonError, ValueError):
    """Malformed exponent, Lorentz pair, function literal or family specification."""
