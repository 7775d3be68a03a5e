"""Numerics for the generalized Stieltjes-Wigert moment problem."""

from .chains import ChainSequence, ParameterSequence
from .gsw import MomentSequence, Polynomial, RecurrenceCoeffs
from .modified import ModifiedMoments
from .qseries import LogReal, QParams
from .spectrum import DiscreteMeasure

__all__ = [
    "ChainSequence",
    "DiscreteMeasure",
    "LogReal",
    "ModifiedMoments",
    "MomentSequence",
    "ParameterSequence",
    "Polynomial",
    "QParams",
    "RecurrenceCoeffs",
]
