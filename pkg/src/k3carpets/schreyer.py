"""Schreyer free resolutions over Z from a Groebner basis with +1 leads.

A term n*e_j of F_q is stored as one integer key

    key = (code(n * NP_j) << RANK_BITS) | rank_j

where NP_j is the name product of e_j and rank_j the position of e_j in the
induced (Schreyer) order among equal monomials.  Integer comparison of keys is
the induced module order, and multiplying a term by a monomial u adds
``code(u) << RANK_BITS``.  Among equal monomials the generator with the larger
index chain wins, which puts the lead of the syzygy between e_j and e_k (j < k)
on e_k.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from math import comb

from .budget import UNLIMITED
from .carpets import GeneratorBasis
from .errors import InvariantViolation, ParameterError, PreconditionError
from .groebner import MonomialIdeal, _as_basis, buchberger_certify
from .ring import Multidegree, Polynomial, Ring

RANK_BITS = 24
RANK_MASK = (1 << RANK_BITS) - 1


@dataclass(frozen=True)
class NamedGenerator:
    homological_degree: int
    name: tuple  # exponent tuples m_1, ..., m_p
    internal_degree: int
    multidegree: Multidegree
    index: int


class Level:
    """Generators of one free module F_p and the differential F_p -> F_{p-1}."""

    __slots__ = ("np", "parent", "multiplier", "rank", "rank_to_index", "diff")

    def __init__(self):
        self.np = []  # name product codes
        self.parent = []  # index of the generator carrying the lead term
        self.multiplier = []  # code of the last monomial of the name
        self.rank = []
        self.rank_to_index = []
        self.diff = []  # per generator: [(key, coeff)] in decreasing key order

    def __len__(self):
        return len(self.np)


def _minimal_codes(ring: Ring, codes):
    divides = ring.code_divides
    kept = []
    for c in sorted(set(codes)):
        if not any(divides(k, c) for k in kept):
            kept.append(c)
    return kept


class FreeResolution:
    def __init__(self, ring: Ring, levels):
        self.ring = ring
        self.levels = levels

    @property
    def length(self):
        return len(self.levels) - 1

    def rank(self, i):
        return len(self.levels[i]) if 0 <= i < len(self.levels) else 0

    def ranks(self):
        return [len(lv) for lv in self.levels]

    def degree(self, i, j):
        return self.ring.code_degree(self.levels[i].np[j])

    def generator(self, i, j) -> NamedGenerator:
        R = self.ring
        names = []
        p, k = i, j
        while p >= 1:
            names.append(R.decode(self.levels[p].multiplier[k]))
            k = self.levels[p].parent[k]
            p -= 1
        np_code = self.levels[i].np[j]
        return NamedGenerator(
            i, tuple(reversed(names)), R.code_degree(np_code), R.multidegree(R.decode(np_code)), j
        )

    def generators(self, i):
        return [self.generator(i, j) for j in range(self.rank(i))]

    def terms(self, i, j):
        """d(e_j) for e_j in F_i as [(row index in F_{i-1}, monomial code, coeff)]."""
        prev = self.levels[i - 1]
        out = []
        for key, v in self.levels[i].diff[j]:
            r = prev.rank_to_index[key & RANK_MASK]
            out.append((r, (key >> RANK_BITS) - prev.np[r], v))
        return out

    def differential(self, i):
        """Sparse matrix {(row, col): Polynomial} of F_i -> F_{i-1}."""
        entries = {}
        for j in range(self.rank(i)):
            for r, code, v in self.terms(i, j):
                entries.setdefault((r, j), {})[code] = v
        return {k: Polynomial(self.ring, t) for k, t in sorted(entries.items())}

    def constant_entries(self, i):
        """{(row, col): integer} of the degree-zero coefficients of F_i -> F_{i-1}."""
        if i < 1 or i >= len(self.levels):
            return {}
        prev = self.levels[i - 1]
        out = {}
        for j, d in enumerate(self.levels[i].diff):
            for key, v in d:
                r = prev.rank_to_index[key & RANK_MASK]
                if key >> RANK_BITS == prev.np[r]:
                    out[(r, j)] = v
        return out

    def __repr__(self):
        return f"FreeResolution(ranks={self.ranks()})"


def _initial_levels(ring: Ring, gens):
    lv0 = Level()
    lv0.np = [0]
    lv0.parent = [-1]
    lv0.multiplier = [0]
    lv0.rank = [0]
    lv0.rank_to_index = [0]
    lv0.diff = [[]]
    lv1 = Level()
    for k, g in enumerate(gens):
        lead = g.lead_code()
        sign = g.codes[lead]
        lv1.np.append(lead)
        lv1.parent.append(0)
        lv1.multiplier.append(lead)
        lv1.diff.append(sorted(((c << RANK_BITS, v * sign) for c, v in g.codes.items()), reverse=True))
    order = sorted(range(len(gens)))
    lv1.rank = list(range(len(gens)))
    lv1.rank_to_index = order
    return lv0, lv1


def _next_level(ring: Ring, prev2: Level, prev: Level, budget):
    """Build level p from levels p-1 (``prev``) and p-2 (``prev2``)."""
    divides = ring.code_divides
    lcm = ring.code_lcm
    degree = ring.code_degree
    # group generators of F_{p-1} by the component of their lead term
    children = {}
    for k in range(len(prev)):
        children.setdefault(prev.parent[k], []).append(k)
    new = []  # (np, parent, multiplier)
    for comp, ks in children.items():
        for pos, k in enumerate(ks):
            if pos == 0:
                continue
            npk = prev.np[k]
            quots = [lcm(prev.np[j], npk) - npk for j in ks[:pos]]
            for m in _minimal_codes(ring, quots):
                new.append((m + npk, k, m))
    if len(new) > RANK_MASK:
        raise ParameterError("resolution level too large for the key encoding")

    def lead_key(item):
        npl, k, _ = item
        return (npl << RANK_BITS) | prev.rank[k]

    new.sort(key=lambda it: (degree(it[0]), -lead_key(it)))
    lv = Level()
    lv.np = [it[0] for it in new]
    lv.parent = [it[1] for it in new]
    lv.multiplier = [it[2] for it in new]
    order = sorted(range(len(new)), key=lambda l: (prev.rank[lv.parent[l]], l))
    lv.rank = [0] * len(new)
    for r, l in enumerate(order):
        lv.rank[l] = r
    lv.rank_to_index = order

    # reducers: for each component of F_{p-2}, generators of F_{p-1} leading there
    reducers = {}
    for comp, ks in children.items():
        reducers[comp] = [(prev.np[k], prev.rank[k], prev.diff[k][1:]) for k in ks]
    p2_index = prev2.rank_to_index
    for l in range(len(new)):
        if l % 256 == 0:
            budget.check()
        k, m = lv.parent[l], lv.multiplier[l]
        shift0 = m << RANK_BITS
        s = {(lv.np[l] << RANK_BITS) | prev.rank[k]: 1}
        t = {}
        heap = []
        for key, v in prev.diff[k]:
            t[key + shift0] = v
            heap.append(-(key + shift0))
        heapq.heapify(heap)
        while heap:
            key = -heapq.heappop(heap)
            c = t.pop(key, 0)
            if not c:
                continue
            KT = key >> RANK_BITS
            comp = p2_index[key & RANK_MASK]
            for npj, rj, tail in reducers.get(comp, ()):
                if divides(npj, KT):
                    break
            else:
                raise InvariantViolation("syzygy reduction hit an irreducible term")
            skey = (KT << RANK_BITS) | rj
            w = s.get(skey, 0) - c
            if w:
                s[skey] = w
            else:
                s.pop(skey, None)
            shift = (KT - npj) << RANK_BITS
            for tk, tv in tail:
                k2 = tk + shift
                old = t.get(k2)
                if old is None:
                    t[k2] = -c * tv
                    heapq.heappush(heap, -k2)
                else:
                    w = old - c * tv
                    if w:
                        t[k2] = w
                    else:
                        del t[k2]
        lv.diff.append(sorted(s.items(), reverse=True))
    return lv


def schreyer_resolve(basis, certify=True, budget=UNLIMITED) -> FreeResolution:
    """Schreyer resolution of P/I for a Groebner basis with +1 or -1 leads."""
    basis = _as_basis(basis)
    R = basis.ring
    if R.modulus is not None:
        raise PreconditionError("resolutions are computed over Z")
    leads = basis.lead_codes
    if len(set(leads)) != len(leads):
        raise PreconditionError("lead terms must be pairwise distinct")
    if certify and not buchberger_certify(basis):
        raise PreconditionError("input is not a Groebner basis")
    lv0, lv1 = _initial_levels(R, basis.generators)
    levels = [lv0, lv1] if len(lv1) else [lv0]
    while len(levels) >= 2:
        budget.check()
        lv = _next_level(R, levels[-2], levels[-1], budget)
        if not len(lv):
            break
        levels.append(lv)
    return FreeResolution(R, levels)


def resolve_monomial(ideal, ring: Ring | None = None, budget=UNLIMITED) -> FreeResolution:
    """Schreyer resolution of a monomial ideal.

    A MonomialIdeal is sorted by degree then decreasing term order; a list of
    exponent tuples is used in the order given.
    """
    if isinstance(ideal, MonomialIdeal):
        leads = ideal.generators()
        leads.sort(key=sum)
    else:
        leads = [tuple(m) for m in ideal]
    if ring is None:
        if not leads:
            raise ParameterError("cannot infer the ring of an empty ideal")
        n = len(leads[0])
        ring = Ring(n - 1, 0) if n >= 2 else Ring(0, 0)
        if ring.nvars != n:
            raise ParameterError("pass the ring explicitly")
    gens = [Polynomial.monomial(ring, m) for m in leads]
    return schreyer_resolve(GeneratorBasis(ring, gens), certify=False, budget=budget)


# ---------------------------------------------------------------------------
# checks


def minimality_check(F: FreeResolution) -> bool:
    """True iff no differential entry has a nonzero constant coefficient."""
    for i in range(1, len(F.levels)):
        prev = F.levels[i - 1]
        for d in F.levels[i].diff:
            for key, _ in d:
                if key >> RANK_BITS == prev.np[prev.rank_to_index[key & RANK_MASK]]:
                    return False
    return True


def check_d_squared(F: FreeResolution) -> bool:
    """d_{i-1} o d_i == 0 exactly, for every i >= 2."""
    for i in range(2, len(F.levels)):
        prev = F.levels[i - 1]
        for d in F.levels[i].diff:
            acc = {}
            for key, v in d:
                j = prev.rank_to_index[key & RANK_MASK]
                shift = ((key >> RANK_BITS) - prev.np[j]) << RANK_BITS
                for k2, w in prev.diff[j]:
                    kk = k2 + shift
                    acc[kk] = acc.get(kk, 0) + v * w
            if any(acc.values()):
                return False
    return True


def check_homogeneity(F: FreeResolution) -> bool:
    """Every term n*e_j of d(e_l) has multidegree(n * NP_j) == multidegree(NP_l)."""
    R = F.ring
    md = R.multidegree
    for i in range(1, len(F.levels)):
        lv = F.levels[i]
        for l, d in enumerate(lv.diff):
            target = md(R.decode(lv.np[l]))
            for key, _ in d:
                if md(R.decode(key >> RANK_BITS)) != target:
                    return False
    return True


def check_name_degrees(F: FreeResolution) -> bool:
    """Internal degree and multidegree of each generator are those of its name product."""
    R = F.ring
    for i in range(1, len(F.levels)):
        for j in range(F.rank(i)):
            g = F.generator(i, j)
            if len(g.name) != i:
                return False
            prod_exp = tuple(map(sum, zip(*g.name)))
            if sum(prod_exp) != g.internal_degree or R.multidegree(prod_exp) != g.multidegree:
                return False
            if R.encode(prod_exp) != F.levels[i].np[j]:
                return False
    return True


# ---------------------------------------------------------------------------
# Betti tables


class BettiTable:
    """Nonzero Betti numbers beta_{i,j} keyed by (homological i, internal degree j)."""

    def __init__(self, entries=None):
        self.entries = {(int(i), int(j)): int(v) for (i, j), v in (entries or {}).items() if v}
        for v in self.entries.values():
            if v < 0:
                raise ParameterError("negative Betti number")

    def __getitem__(self, ij):
        return self.entries.get(tuple(ij), 0)

    def __eq__(self, other):
        return isinstance(other, BettiTable) and self.entries == other.entries

    def __repr__(self):
        return f"BettiTable({dict(sorted(self.entries.items()))})"

    def columns(self):
        return max((i for i, _ in self.entries), default=-1) + 1

    def rows(self):
        return sorted({j - i for i, j in self.entries})

    def row(self, r):
        """Values beta_{i,i+r} for i = 0 .. last column."""
        return [self[(i, i + r)] for i in range(self.columns())]

    def totals(self):
        return [sum(v for (i, _), v in self.entries.items() if i == c) for c in range(self.columns())]

    def dominates(self, other):
        keys = set(self.entries) | set(other.entries)
        return all(self[k] >= other[k] for k in keys)

    def to_text(self):
        ncol = self.columns()
        rows = list(range(0, max(self.rows(), default=0) + 1))
        cells = [["", *[str(i) for i in range(ncol)]], ["total:", *[str(t) for t in self.totals()]]]
        for r in rows:
            cells.append([f"{r}:", *[str(self[(i, i + r)]) if self[(i, i + r)] else "." for i in range(ncol)]])
        widths = [max(len(row[c]) for row in cells) for c in range(ncol + 1)]
        lines = [" ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in cells]
        return "\n".join(lines) + "\n"

    def to_json(self):
        return {
            "entries": [[i, j, v] for (i, j), v in sorted(self.entries.items())],
            "rows": {str(r): self.row(r) for r in self.rows()},
        }

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        return cls({(i, j): v for i, j, v in data["entries"]})


def betti_table(F: FreeResolution) -> BettiTable:
    entries = {}
    deg = F.ring.code_degree
    for i, lv in enumerate(F.levels):
        for c in lv.np:
            key = (i, deg(c))
            entries[key] = entries.get(key, 0) + 1
    return BettiTable(entries)


# ---------------------------------------------------------------------------
# closed forms for the carpet resolution


def binom(n, k):
    if n < 0 or k < 0 or k > n:
        return 0
    return comb(n, k)


def _linear_strand_long(a, b, p):
    if not 1 <= p <= a + b - 2:
        return 0
    s = p * binom(a, p + 1)
    s += sum((a - 2) * binom(a + j - 1, p - 1) + binom(a + j - 2, p - 1) for j in range(b - 1))
    s += sum(j * binom(a + j - 2, p - 1) for j in range(1, b - 1))
    s += (b - 2) * binom(a - 2 + b - 1, p - 1)
    s += binom(b - 2, p - 1)
    return s


def _linear_strand_short(a, b, p):
    if not 1 <= p <= a + b - 2:
        return 0
    return binom(a - 2, p - 1) + binom(b - 2, p - 1) + p * binom(a + b - 1, p + 1) - 2 * binom(a + b - 3, p - 1)


def _quadratic_strand(a, b, p):
    if not 2 <= p <= a + b - 1:
        return 0
    s = sum(binom(a + j - 2, p - 2) for j in range(b - 1))
    s += sum(j * binom(a + j - 2, p - 2) for j in range(1, b - 1))
    s += (b - 2) * binom(a - 2 + b - 1, p - 2)
    for q in range(p - 1):
        s += binom(b - 2, q) * (
            (p - q - 1) * binom(a, p - q) + (a - p + q + 1) * binom(a, p - q - 2) + binom(a - 2, p - q - 4)
        )
    return s


def _cubic_strand(a, b, p):
    if not 3 <= p <= a + b - 1:
        return 0
    return binom(a + b - 4, p - 3)


def closed_form_betti(a, b, p):
    """(beta_{p,p+1}, beta_{p,p+2}, beta_{p,p+3}) of the carpet Schreyer resolution."""
    if b < 2 or a < b:
        raise ParameterError(f"closed forms need a >= b >= 2, got a={a}, b={b}")
    if not 0 <= p <= a + b - 1:
        raise ParameterError(f"p={p} outside 0..{a + b - 1}")
    long_form = _linear_strand_long(a, b, p)
    if long_form != _linear_strand_short(a, b, p):
        raise InvariantViolation(f"linear strand forms disagree at a={a}, b={b}, p={p}")
    return long_form, _quadratic_strand(a, b, p), _cubic_strand(a, b, p)


def closed_form_table(a, b) -> BettiTable:
    entries = {(0, 0): 1}
    for p in range(a + b):
        for r, v in enumerate(closed_form_betti(a, b, p), start=1):
            if v:
                entries[(p, p + r)] = v
    return BettiTable(entries)
