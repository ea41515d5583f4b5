"""Model checking knowledge of strategies in concurrent game structures."""

from .checker import EvalConfig, State, Verdict, a_consistent, accessible, check, check_common, successors
from .core import Assignment, Cgs, History, Strategy
from .errors import ConfigError, InputError, ModelError, ParseError, ResourceError, StratEpiError
from .logic import parse, render
from .perspective import EMPTY, InformationPerspective, fully_informed

__all__ = [
    "Assignment", "Cgs", "ConfigError", "EMPTY", "EvalConfig", "History", "InformationPerspective",
    "InputError", "ModelError", "ParseError", "ResourceError", "State", "StratEpiError", "Strategy",
    "Verdict", "a_consistent", "accessible", "check", "check_common", "fully_informed", "parse",
    "render", "successors",
]
