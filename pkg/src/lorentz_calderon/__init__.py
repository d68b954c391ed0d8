"""Lorentz-space Calderon operators, downgraded functionals and K-functionals on (0, inf)."""

from .errors import (
    DegenerateInput,
    DivergentIntegral,
    ExponentError,
    GridError,
    LorentzCalderonError,
    NonNormable,
    NoSolution,
    ParameterError,
    SpecError,
    TrivialSpace,
)
from .params import (
    INF,
    Exponent,
    LorentzSpec,
    ParamSet,
    Verdict,
    derive,
    nontrivial_downgrade,
    r1r2_solve,
    verdict_combined,
    verdict_R,
    verdict_S,
)
from .stepfn import StepFunction

__version__ = "0.1.0"
