"""Decision procedures for transducers, reset VASS, incrementing automata
and higher-order pushdown automata, with regular separability on top."""

from .basis import BACKEND
from .errors import (
    AlphabetError,
    ArityError,
    FormatError,
    ParameterError,
    RegsepError,
    ShapeError,
    UsageError,
)
from .kernel import PAD, Nfa, Tri, nu_value

__version__ = "0.1.0"
