"""Sprague-Grundy values of subtraction-division games and checks of their structure."""

from .characterize import (
    MismatchReport,
    Verdict,
    ZeroVerdict,
    characterize_1_2d,
    characterize_a_2d,
    characterize_perturbed,
    residue_rule,
    verify_characterization,
)
from .digits import DigitString, from_digits, to_digits
from .engine import (
    ConfigurationError,
    GameSpec,
    Outcome,
    SGTable,
    SubtractDisallowed,
    VirtualValue,
    best_move,
    build_table,
    mex,
    outcome,
    sg_value,
)
from .holding import coprime_part, detect_holding, g_sequence, holding_bound, verify_persistence
from .reductions import applicable_rule, classify_case, reduce_to_base, sg_star, verify_rules

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError", "DigitString", "GameSpec", "MismatchReport", "Outcome",
    "SGTable", "SubtractDisallowed", "Verdict", "VirtualValue", "ZeroVerdict",
    "applicable_rule", "best_move", "build_table", "characterize_1_2d",
    "characterize_a_2d", "characterize_perturbed", "classify_case", "coprime_part",
    "detect_holding", "from_digits", "g_sequence", "holding_bound", "mex", "outcome",
    "reduce_to_base", "residue_rule", "sg_star", "sg_value", "to_digits",
    "verify_characterization", "verify_persistence", "verify_rules",
]
