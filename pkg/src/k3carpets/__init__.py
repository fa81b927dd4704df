"""Exact syzygy computations for K3 carpets and degenerate K3 surfaces."""

from .carpets import CarpetParams, GeneratorBasis, carpet_generators
from .errors import (
    BudgetExceeded,
    CarpetError,
    DimensionError,
    DomainError,
    InvariantViolation,
    ParameterError,
    PreconditionError,
    RankDeficiencyError,
    UnsupportedBasisError,
)
from .groebner import buchberger_certify, initial_ideal, normal_form
from .linalg import SparseIntMatrix, factorize, smith_normal_form
from .pipeline import char_p_betti, conjecture_scan, green_report
from .ring import Polynomial, Ring
from .schreyer import BettiTable, betti_table, schreyer_resolve
from .strands import constant_strand, minimal_betti_table

__version__ = "0.1.0"
