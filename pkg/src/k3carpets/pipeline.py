"""Green's-conjecture decision for carpets and degenerate K3 surfaces, prime by prime."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod

from .budget import UNLIMITED
from .carpets import CarpetParams, carpet_generators
from .errors import BudgetExceeded, InvariantViolation
from .linalg import FactoredInteger, factor_invariants, rank_mod_p, smith_normal_form
from .schreyer import BettiTable, binom, schreyer_resolve
from .strands import _RESOLUTIONS, constant_strand, minimal_betti_table

CONTROL_PRIME = 32003


def green_column_count(a):
    """Expected number of columns of the Green matrix of X(a,a)."""
    return a * binom(2 * a - 1, a + 1) - 2 * binom(2 * a - 3, a - 1)


def tetragonal_betti_table(a, b) -> BettiTable:
    """Betti table predicted for X_(0,1)(a,b) (two strands and duality)."""
    n = a + b
    entries = {(0, 0): 1, (n - 1, n + 2): 1}
    for i in range(1, n - 1):
        v = i * binom(n - 2, i + 1) + (max(a - i, 0) + max(b - i, 0)) * binom(n - 2, i - 1)
        if v:
            entries[(i, i + 1)] = v
            entries[(n - 1 - i, n + 1 - i)] = v
    return BettiTable(entries)


def resolution_for(params: CarpetParams, budget=UNLIMITED):
    F = _RESOLUTIONS.get(params)
    if F is None:
        F = schreyer_resolve(carpet_generators(params), budget=budget)
        _RESOLUTIONS[params] = F
    return F


@dataclass
class GreenReport:
    params: CarpetParams
    strand_degree: int
    matrix_shape: tuple
    rank_over_Q: int
    holds_over_Q: bool
    invariant_factors: tuple  # nonzero invariant factors over all blocks, sorted
    det_product: FactoredInteger
    exceptional_primes: list
    block_count: int
    per_prime_tables: dict = field(default_factory=dict)

    @property
    def genus(self):
        return self.params.genus

    @property
    def clifford_index(self):
        return self.params.clifford_index

    def to_json(self):
        p = self.params
        return {
            "a": p.a,
            "b": p.b,
            "e": [p.e1, p.e2],
            "genus": self.genus,
            "clifford_index": self.clifford_index,
            "strand_degree": self.strand_degree,
            "matrix_shape": list(self.matrix_shape),
            "rank_over_Q": self.rank_over_Q,
            "holds_over_Q": self.holds_over_Q,
            "det": str(self.det_product),
            "det_product": self.det_product.to_json(),
            "exceptional_primes": list(self.exceptional_primes),
            "blocks": self.block_count,
            "per_prime_tables": {str(k): t.to_json() for k, t in sorted(self.per_prime_tables.items())},
        }

    def to_text(self):
        p = self.params
        lines = [
            f"params: a={p.a} b={p.b} e={p.e1},{p.e2}",
            f"genus: {self.genus}",
            f"clifford_index: {self.clifford_index}",
            f"strand_degree: {self.strand_degree}",
            f"matrix_shape: {self.matrix_shape[0]} x {self.matrix_shape[1]}",
            f"rank_over_Q: {self.rank_over_Q}",
            f"holds_over_Q: {str(self.holds_over_Q).lower()}",
            f"det: {self.det_product}",
            f"exceptional_primes: [{', '.join(map(str, self.exceptional_primes))}]",
        ]
        out = "\n".join(lines) + "\n"
        for q, t in sorted(self.per_prime_tables.items()):
            out += f"\ncharacteristic {q}:\n" + t.to_text()
        return out


def green_report(params: CarpetParams, tables=False, budget=UNLIMITED, verify=True) -> GreenReport:
    """Decide Green's conjecture from D_a on the strand of degree a+1.

    The reported determinant is the product of the nonzero invariant factors
    of D_a, computed block by block.  When D_a has full column rank this is the
    usual invariant-factor product; the exceptional primes are exactly the
    primes where the rank of D_a drops below its rank over Q.
    """
    a = params.a
    F = resolution_for(params, budget)
    k = a + 1
    S = constant_strand(F, k)
    D = S.map(a)
    factors = []
    rank = 0
    blocks = S.blocks() if S.beta(a) else {}
    for blk in blocks.values():
        budget.check()
        M = blk.map(a)
        if not M.cols or not M.entries:
            continue
        snf = smith_normal_form(M, verify=verify)
        rank += snf.rank
        factors.extend(snf.invariant_factors)
    factors.sort()
    det = factor_invariants(factors)
    exceptional = det.primes
    report = GreenReport(
        params=params,
        strand_degree=k,
        matrix_shape=D.shape,
        rank_over_Q=rank,
        holds_over_Q=rank == D.cols,
        invariant_factors=tuple(factors),
        det_product=det,
        exceptional_primes=exceptional,
        block_count=len(blocks),
    )
    if verify:
        _cross_check(report, S)
    if tables:
        for q in [0, *exceptional]:
            budget.check()
            report.per_prime_tables[q] = char_p_betti(params, q)
    return report


def _cross_check(report: GreenReport, S):
    """Exceptional primes agree with rank drops of D_a modulo p (and a control prime)."""
    a = report.params.a
    if not report.det_product.fully_factored:
        raise InvariantViolation("determinant has an unfactored cofactor")
    if prod(report.invariant_factors) != report.det_product.value:
        raise InvariantViolation("factorisation does not reproduce the invariant factors")
    for p in report.exceptional_primes:
        if S.rank(a, p) >= report.rank_over_Q:
            raise InvariantViolation(f"{p} divides the invariant factors but D_a keeps its rank mod {p}")
    if CONTROL_PRIME not in report.exceptional_primes and S.rank(a, CONTROL_PRIME) != report.rank_over_Q:
        raise InvariantViolation(f"rank of D_a drops mod {CONTROL_PRIME}, which divides no invariant factor")


def char_p_betti(params: CarpetParams, p: int) -> BettiTable:
    return minimal_betti_table(params.a, params.b, params.e, p)


@dataclass
class ScanRow:
    params: CarpetParams
    exceptional_primes: list
    flagged_primes: list  # exceptional primes p >= (g-1)/2

    def to_json(self):
        p = self.params
        return {
            "a": p.a,
            "b": p.b,
            "e": [p.e1, p.e2],
            "genus": p.genus,
            "exceptional_primes": self.exceptional_primes,
            "flagged_primes": self.flagged_primes,
        }


@dataclass
class ScanResult:
    rows: list
    truncated: bool = False

    def to_json(self):
        return {"rows": [r.to_json() for r in self.rows], "truncated": self.truncated}

    def to_text(self):
        lines = ["a b e exceptional_primes flagged"]
        for r in self.rows:
            p = r.params
            lines.append(
                f"{p.a} {p.b} {p.e1},{p.e2} [{', '.join(map(str, r.exceptional_primes))}]"
                f" [{', '.join(map(str, r.flagged_primes))}]"
            )
        if self.truncated:
            lines.append("TRUNCATED: budget exceeded")
        return "\n".join(lines) + "\n"


def default_grid(a_max, e=(2, 1)):
    return [CarpetParams(a, a, *e) for a in range(2, a_max + 1)]


def conjecture_scan(a_max=None, grid=None, budget=UNLIMITED) -> ScanResult:
    """Green reports over a grid; flags exceptional primes p with 2p >= g - 1."""
    if grid is None:
        grid = default_grid(a_max) if a_max is not None else []
    rows = []
    try:
        for params in grid:
            budget.check()
            rep = green_report(params, budget=budget)
            g = params.genus
            flagged = [p for p in rep.exceptional_primes if 2 * p >= g - 1]
            rows.append(ScanRow(params, rep.exceptional_primes, flagged))
    except BudgetExceeded:
        return ScanResult(rows, truncated=True)
    return ScanResult(rows)
