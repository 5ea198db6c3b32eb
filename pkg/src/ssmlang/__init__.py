"""Finite-precision state space models compiled from formal languages."""

__version__ = "0.1.0"

from .automata import Dfa, is_aperiodic, minimize_dfa, parse_dfa
from .compiler import (
    NotStarFree,
    compile_bounded_dyck,
    compile_counter,
    compile_counter_language,
    compile_flip_flop,
    compile_language,
    compile_mod_counter,
    compile_parity_signed,
    compile_readout_last,
    compile_set_reset,
    compile_star_free,
)
from .krohn_rhodes import SetResetAutomaton, krohn_rhodes_decompose
from .languages import get_language
from .ssm import SsmModel, load_model, recognize, run_model, save_model, trace
from .verify import (
    Exhaustive,
    RandomWords,
    check_equivalence,
    parity_convergence_demo,
    random_nonneg_model,
)

__all__ = [
    "Dfa", "is_aperiodic", "minimize_dfa", "parse_dfa", "NotStarFree", "compile_bounded_dyck",
    "compile_counter", "compile_counter_language", "compile_flip_flop", "compile_language",
    "compile_mod_counter", "compile_parity_signed", "compile_readout_last", "compile_set_reset",
    "compile_star_free", "SetResetAutomaton", "krohn_rhodes_decompose", "get_language",
    "SsmModel", "load_model", "recognize", "run_model", "save_model", "trace", "Exhaustive",
    "RandomWords", "check_equivalence", "parity_convergence_demo", "random_nonneg_model",
]
