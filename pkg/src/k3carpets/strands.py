"""Constant strands of a resolution, their multidegree blocks and homology."""

from __future__ import annotations

from dataclasses import dataclass, field

from .carpets import CarpetParams, carpet_generators
from .errors import InvariantViolation, ParameterError, PreconditionError
from .linalg import SparseIntMatrix, is_prime, rank_mod_p, rank_q
from .schreyer import BettiTable, FreeResolution, schreyer_resolve


def _check_characteristic(p):
    if p != 0 and not is_prime(p):
        raise ParameterError(f"characteristic must be 0 or a prime, got {p}")


class StrandComplex:
    """Chain of integer matrices D_i: Z^{beta_{i,k}} -> Z^{beta_{i-1,k}} for one internal degree k.

    ``generators[i]`` lists the indices (in F_i) of the degree-k generators;
    ``multidegrees[i]`` holds their multidegrees when known.
    """

    def __init__(self, degree, generators, maps, multidegrees=None):
        self.degree = degree
        self.generators = {i: list(g) for i, g in generators.items() if g}
        self.maps = maps
        self.multidegrees = multidegrees
        self._rank_cache = {}
        self._blocks = None

    @property
    def terms(self):
        return sorted((i, len(g)) for i, g in self.generators.items())

    def beta(self, i):
        return len(self.generators.get(i, ()))

    def positions(self):
        return sorted(self.generators)

    def map(self, i) -> SparseIntMatrix:
        """D_i, always returned with shape (beta_{i-1}, beta_i)."""
        M = self.maps.get(i)
        if M is None:
            return SparseIntMatrix(self.beta(i - 1), self.beta(i))
        return M

    def rank(self, i, characteristic=0):
        _check_characteristic(characteristic)
        key = (i, characteristic)
        if key not in self._rank_cache:
            if self.multidegrees is not None and self.beta(i) and self.beta(i - 1):
                r = sum(blk.rank(i, characteristic) for blk in self.blocks().values())
            else:
                r = matrix_rank(self.map(i), characteristic)
            self._rank_cache[key] = r
        return self._rank_cache[key]

    def blocks(self):
        if self._blocks is None:
            self._blocks = block_decompose(self)
        return self._blocks

    def __repr__(self):
        return f"StrandComplex(k={self.degree}, terms={self.terms})"


def matrix_rank(M: SparseIntMatrix, characteristic=0):
    if not M.entries:
        return 0
    return rank_q(M) if characteristic == 0 else rank_mod_p(M, characteristic)


def constant_strands(F: FreeResolution):
    """All constant strands of F keyed by internal degree (one pass over the differentials)."""
    R = F.ring
    deg = R.code_degree
    md = R.multidegree
    # local position of every generator inside its degree
    local = []
    by_degree = {}
    mdegs = {}
    for i, lv in enumerate(F.levels):
        pos = []
        for j, c in enumerate(lv.np):
            k = deg(c)
            gens = by_degree.setdefault(k, {}).setdefault(i, [])
            pos.append(len(gens))
            gens.append(j)
            mdegs.setdefault(k, {}).setdefault(i, []).append(md(R.decode(c)))
        local.append(pos)
    entries = {}
    for i in range(1, len(F.levels)):
        lv = F.levels[i]
        for (r, c), v in F.constant_entries(i).items():
            k = deg(lv.np[c])
            if deg(F.levels[i - 1].np[r]) != k:
                raise InvariantViolation("constant entry between generators of different degree")
            entries.setdefault(k, {}).setdefault(i, {})[(local[i - 1][r], local[i][c])] = v
    out = {}
    for k, gens in sorted(by_degree.items()):
        maps = {}
        for i, ent in entries.get(k, {}).items():
            maps[i] = SparseIntMatrix(len(gens.get(i - 1, ())), len(gens[i]), ent)
        out[k] = StrandComplex(k, gens, maps, mdegs[k])
    return out


def constant_strand(F: FreeResolution, k: int) -> StrandComplex:
    strands = _strand_cache(F)
    if k in strands:
        return strands[k]
    return StrandComplex(k, {}, {}, {})


def _strand_cache(F):
    cache = getattr(F, "_strands", None)
    if cache is None:
        cache = constant_strands(F)
        F._strands = cache
    return cache


@dataclass
class BlockDecomposition:
    blocks: dict = field(default_factory=dict)  # Multidegree -> StrandComplex

    def __len__(self):
        return len(self.blocks)

    def values(self):
        return self.blocks.values()

    def items(self):
        return self.blocks.items()


def block_decompose(S: StrandComplex) -> BlockDecomposition:
    """Split S by the multidegree of its generators.

    Each block is a StrandComplex whose ``generators[i]`` are local row/column
    indices of S (not indices into F).
    """
    if S.multidegrees is None:
        raise PreconditionError("strand has no multidegree data")
    where = {}
    members = {}
    for i, mds in S.multidegrees.items():
        for loc, m in enumerate(mds):
            where[(i, loc)] = m
            members.setdefault(m, {}).setdefault(i, []).append(loc)
    pos = {}
    for m, per in members.items():
        for i, locs in per.items():
            for n, loc in enumerate(locs):
                pos[(i, loc)] = n
    ents = {}
    for i, M in S.maps.items():
        for (r, c), v in M.entries.items():
            m = where[(i, c)]
            if where[(i - 1, r)] != m:
                raise InvariantViolation("strand entry joins different multidegrees")
            ents.setdefault(m, {}).setdefault(i, {})[(pos[(i - 1, r)], pos[(i, c)])] = v
    blocks = {}
    for m in sorted(members):
        per = members[m]
        maps = {
            i: SparseIntMatrix(len(per.get(i - 1, ())), len(per[i]), e)
            for i, e in ents.get(m, {}).items()
        }
        blocks[m] = StrandComplex(S.degree, per, maps, None)
    return BlockDecomposition(blocks)


def strand_homology_dim(S: StrandComplex, i: int, characteristic=0) -> int:
    """dim H_i = beta_i - rank D_i - rank D_{i+1} over Q or F_p."""
    _check_characteristic(characteristic)
    b = S.beta(i)
    if not b:
        return 0
    h = b - S.rank(i, characteristic) - S.rank(i + 1, characteristic)
    if h < 0:
        raise InvariantViolation("negative homology dimension; strand is not a complex")
    return h


def resolution_minimal_betti(F: FreeResolution, characteristic=0) -> BettiTable:
    """Betti numbers of the minimal resolution over Q or F_p from strand homology."""
    _check_characteristic(characteristic)
    entries = {}
    for k, S in _strand_cache(F).items():
        for i in S.positions():
            h = strand_homology_dim(S, i, characteristic)
            if h:
                entries[(i, k)] = h
    return BettiTable(entries)


_RESOLUTIONS = {}


def carpet_resolution(params: CarpetParams) -> FreeResolution:
    """Schreyer resolution of the carpet ideal, memoised per parameter set."""
    F = _RESOLUTIONS.get(params)
    if F is None:
        F = schreyer_resolve(carpet_generators(params))
        _RESOLUTIONS[params] = F
    return F


def minimal_betti_table(a, b, e=(2, 1), characteristic=0) -> BettiTable:
    _check_characteristic(characteristic)
    return resolution_minimal_betti(carpet_resolution(CarpetParams(a, b, *e)), characteristic)
