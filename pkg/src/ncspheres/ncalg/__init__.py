"""Presented *-algebras, matrices over them, and cyclic chains."""

from .chains import (
    CyclicChain,
    DegreeZero,
    NotProportional,
    ProportionalToZero,
    chern_even,
    chern_odd,
    connes_B,
    cycle_ratio,
    cyclic_tensor,
    hochschild_b,
    proportionality,
)
from .matrices import CheckResult, MatNC, NotSquare, mat_check
from .presentation import (
    Generator,
    NCPoly,
    Presentation,
    ProbeReport,
    RewriteError,
    confluence_probe,
    normal_form,
    random_word,
    star,
    words_up_to,
)

__all__ = [
    "CheckResult",
    "CyclicChain",
    "DegreeZero",
    "Generator",
    "MatNC",
    "NCPoly",
    "NotProportional",
    "NotSquare",
    "Presentation",
    "ProbeReport",
    "ProportionalToZero",
    "RewriteError",
    "chern_even",
    "chern_odd",
    "confluence_probe",
    "connes_B",
    "cycle_ratio",
    "cyclic_tensor",
    "hochschild_b",
    "mat_check",
    "normal_form",
    "proportionality",
    "random_word",
    "star",
    "words_up_to",
]
