"""A Pure Type System kernel with contextful and context-free judgments."""

from .correspond import annotate, is_annotated, synthesize_context, to_ginf
from .errors import FuelExhausted, KernelError, TypingError
from .ginf import GinfJudgment, eigen_open, ginf_check, ginf_infer
from .kernel import Thm, mk_app, mk_conv, mk_lam, mk_pi, mk_sort, mk_var
from .pts_check import (
    Context,
    ContextfulJudgment,
    Decl,
    check_judgment,
    compatible,
    infer_type,
    merge,
    strengthen_to_hfv,
    wf_context,
)
from .pts_spec import PRESETS, PtsSpec, load_spec, parse_spec
from .surface import parse_context, parse_term, print_term
from .syntax import (
    App,
    Bound,
    Free,
    FreeVar,
    Lam,
    Pi,
    Sort,
    beta_eq,
    beta_step,
    close_term,
    fv,
    hfv,
    hfvt,
    normalize,
    open_term,
    subst_free,
)

__all__ = [
    "App", "Bound", "Context", "ContextfulJudgment", "Decl", "Free", "FreeVar",
    "FuelExhausted", "GinfJudgment", "KernelError", "Lam", "PRESETS", "Pi", "PtsSpec",
    "Sort", "Thm", "TypingError", "annotate", "beta_eq", "beta_step", "check_judgment",
    "close_term", "compatible", "eigen_open", "fv", "ginf_check", "ginf_infer", "hfv",
    "hfvt", "infer_type", "is_annotated", "load_spec", "merge", "mk_app", "mk_conv",
    "mk_lam", "mk_pi", "mk_sort", "mk_var", "normalize", "open_term", "parse_context",
    "parse_spec", "parse_term", "print_term", "strengthen_to_hfv", "subst_free",
    "synthesize_context", "to_ginf", "wf_context",
]

__version__ = "0.1.0"
