"""Division with +-1 leads, Buchberger certification, initial and colon ideals,
and Hilbert functions of artinian reductions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from itertools import combinations, combinations_with_replacement
from math import gcd

from .carpets import GeneratorBasis
from .errors import ParameterError, UnsupportedBasisError
from .linalg import SparseIntMatrix, rank_q
from .ring import Polynomial, Ring, compare_monomials


def _as_basis(basis):
    if isinstance(basis, GeneratorBasis):
        return basis
    polys = list(basis)
    if not polys:
        raise ParameterError("empty basis needs an explicit GeneratorBasis with a ring")
    return GeneratorBasis(polys[0].ring, polys)


def _unit_leads(basis: GeneratorBasis):
    p = basis.ring.modulus
    units = {1, -1} if p is None else {1, p - 1}
    for g in basis.generators:
        if g.lead_coefficient() not in units:
            raise UnsupportedBasisError(f"lead coefficient {g.lead_coefficient()} of {g} is not +-1")


def _reduce_terms(terms: dict, ring: Ring, gens, leads, field=False):
    """Fully reduce ``terms`` (consumed) against generators with the given lead codes."""
    p = ring.modulus
    divides = ring.code_divides
    rem = {}
    tails = [(g.codes, lc) for g, lc in zip(gens, leads)]
    while terms:
        c = max(terms)
        v = terms.pop(c)
        if p is not None:
            v %= p
        if not v:
            continue
        for (gt, lc) in tails:
            if divides(lc, c):
                lead_coeff = gt[lc]
                if field:
                    f = Fraction(v) / lead_coeff
                elif p is not None:
                    f = v * lead_coeff % p  # lead_coeff is its own inverse
                else:
                    f = v * lead_coeff
                shift = c - lc
                for gc, gv in gt.items():
                    if gc == lc:
                        continue
                    k = gc + shift
                    w = terms.get(k, 0) - f * gv
                    if w:
                        terms[k] = w
                    else:
                        terms.pop(k, None)
                break
        else:
            rem[c] = v
    return Polynomial(ring, rem)


def normal_form(f: Polynomial, basis) -> Polynomial:
    """Remainder of f on division by a basis whose leads are +1 or -1."""
    basis = _as_basis(basis)
    _unit_leads(basis)
    if f.ring != basis.ring:
        f = Polynomial(basis.ring, f.codes)
    return _reduce_terms(dict(f.codes), basis.ring, basis.generators, basis.lead_codes)


def s_polynomial(f: Polynomial, g: Polynomial, field=False) -> Polynomial:
    R = f.ring
    lf, lg = f.lead_code(), g.lead_code()
    L = R.code_lcm(lf, lg)
    cf, cg = f.codes[lf], g.codes[lg]
    if field:
        left = Polynomial(R, {c + L - lf: Fraction(v) / cf for c, v in f.codes.items()})
        right = Polynomial(R, {c + L - lg: Fraction(v) / cg for c, v in g.codes.items()})
    else:
        left = Polynomial(R, {c + L - lf: v * cg for c, v in f.codes.items()})
        right = Polynomial(R, {c + L - lg: v * cf for c, v in g.codes.items()})
    return left - right


def critical_pairs(basis: GeneratorBasis, product_criterion=True):
    """Index pairs (i, j) ordered by (degree of lcm, i, j)."""
    R = basis.ring
    leads = basis.lead_codes
    pairs = []
    for i, j in combinations(range(len(leads)), 2):
        L = R.code_lcm(leads[i], leads[j])
        if product_criterion and L == leads[i] + leads[j]:
            continue
        pairs.append((R.code_degree(L), i, j))
    pairs.sort()
    return [(i, j) for _, i, j in pairs]


def failing_pairs(basis, product_criterion=True, stop_at_first=False):
    basis = _as_basis(basis)
    _unit_leads(basis)
    R = basis.ring
    out = []
    for i, j in critical_pairs(basis, product_criterion):
        s = s_polynomial(basis[i], basis[j])
        r = _reduce_terms(dict(s.codes), R, basis.generators, basis.lead_codes)
        if not r.is_zero():
            out.append((i, j, r))
            if stop_at_first:
                break
    return out


def buchberger_certify(basis, product_criterion=True) -> bool:
    """True iff every S-polynomial reduces to zero.

    Pairs with coprime lead terms always reduce to zero, so they are skipped
    unless ``product_criterion`` is False.
    """
    return not failing_pairs(basis, product_criterion, stop_at_first=True)


def buchberger_complete(polys, max_steps=100000):
    """Reduced Groebner basis over Q (coefficients as Fractions, monic leads)."""
    polys = [p for p in polys if not p.is_zero()]
    if not polys:
        return []
    R = polys[0].ring
    if R.modulus is not None:
        raise ParameterError("buchberger_complete works over Q only")

    def monic(p):
        lc = p.lead_coefficient()
        return Polynomial(R, {c: Fraction(v) / lc for c, v in p.codes.items()})

    G = []
    for p in polys:
        r = _reduce_terms(dict(p.codes), R, G, [g.lead_code() for g in G], field=True)
        if not r.is_zero():
            G.append(monic(r))
    pairs = [(i, j) for i, j in combinations(range(len(G)), 2)]
    steps = 0
    while pairs:
        steps += 1
        if steps > max_steps:
            raise ParameterError("Buchberger completion did not finish")
        pairs.sort(key=lambda ij: (R.code_degree(R.code_lcm(G[ij[0]].lead_code(), G[ij[1]].lead_code())), ij))
        i, j = pairs.pop(0)
        li, lj = G[i].lead_code(), G[j].lead_code()
        if R.code_lcm(li, lj) == li + lj:
            continue
        s = s_polynomial(G[i], G[j], field=True)
        r = _reduce_terms(dict(s.codes), R, G, [g.lead_code() for g in G], field=True)
        if not r.is_zero():
            G.append(monic(r))
            pairs.extend((k, len(G) - 1) for k in range(len(G) - 1))
    # interreduce
    G = [g for k, g in enumerate(G) if not any(
        R.code_divides(h.lead_code(), g.lead_code()) and (h.lead_code() != g.lead_code() or m < k)
        for m, h in enumerate(G) if m != k)]
    out = []
    for k, g in enumerate(G):
        others = G[:k] + G[k + 1:]
        lc = g.lead_code()
        tail = {c: v for c, v in g.codes.items() if c != lc}
        r = _reduce_terms(tail, R, others, [h.lead_code() for h in others], field=True)
        out.append(Polynomial(R, {lc: Fraction(1), **r.codes}))
    return sorted(out, key=lambda g: -g.lead_code())


def normal_form_over_q(f: Polynomial, groebner_basis) -> Polynomial:
    gb = list(groebner_basis)
    return _reduce_terms(dict(f.codes), f.ring, gb, [g.lead_code() for g in gb], field=True)


# ---------------------------------------------------------------------------
# monomial ideals


def _divides(m, n):
    return all(u <= v for u, v in zip(m, n))


def _grevlex_desc(monos):
    return sorted(monos, key=cmp_to_key(compare_monomials), reverse=True)


class MonomialIdeal:
    """Monomial ideal given by its minimal generators (exponent tuples)."""

    def __init__(self, generators, nvars=None):
        gens = {tuple(m) for m in generators}
        lengths = {len(m) for m in gens}
        if len(lengths) > 1:
            raise ParameterError("generators of different lengths")
        self.nvars = nvars if nvars is not None else (lengths.pop() if lengths else 0)
        minimal = [m for m in gens if not any(n != m and _divides(n, m) for n in gens)]
        self.minimal_generators = frozenset(minimal)

    def generators(self):
        """Minimal generators in decreasing term order."""
        return _grevlex_desc(self.minimal_generators)

    def contains(self, m):
        return any(_divides(g, m) for g in self.minimal_generators)

    def __contains__(self, m):
        return self.contains(m)

    def __eq__(self, other):
        return isinstance(other, MonomialIdeal) and self.minimal_generators == other.minimal_generators

    def __hash__(self):
        return hash(self.minimal_generators)

    def __len__(self):
        return len(self.minimal_generators)

    def __repr__(self):
        return f"MonomialIdeal({len(self)} generators)"

    def format(self, ring: Ring):
        return "(" + ", ".join(ring.format_monomial(m) for m in self.generators()) + ")"


def initial_ideal(basis) -> MonomialIdeal:
    basis = _as_basis(basis)
    return MonomialIdeal(basis.lead_terms, basis.ring.nvars)


def colon_sequence(leads):
    """Entry k is (leads[0..k-1]) : leads[k], minimally generated."""
    leads = [tuple(m) for m in leads]
    if len(set(leads)) != len(leads):
        raise ParameterError("lead terms must be pairwise distinct")
    n = len(leads[0]) if leads else 0
    out = []
    for k, lk in enumerate(leads):
        quots = [tuple(max(u, v) - v for u, v in zip(lj, lk)) for lj in leads[:k]]
        out.append(MonomialIdeal(quots, n))
    return out


def monomials_of_degree(nvars, d):
    for combo in combinations_with_replacement(range(nvars), d):
        e = [0] * nvars
        for v in combo:
            e[v] += 1
        yield tuple(e)


def standard_monomial_count(ideal: MonomialIdeal, degree: int, nvars: int | None = None):
    n = ideal.nvars if nvars is None else nvars
    return sum(1 for m in monomials_of_degree(n, degree) if not ideal.contains(m))


@dataclass(frozen=True)
class HilbertProfile:
    values: tuple
    length_total: int
    artinian: bool = True


def monomial_quotient_profile(ideal: MonomialIdeal, max_length=None) -> HilbertProfile:
    """Hilbert function of k[vars]/ideal; non-artinian ideals are flagged."""
    n = ideal.nvars
    pure = set()
    for g in ideal.minimal_generators:
        nz = [v for v in range(n) if g[v]]
        if len(nz) == 1:
            pure.add(nz[0])
    if len(pure) < n:
        return HilbertProfile((), -1, False)
    values = []
    d = 0
    while True:
        h = standard_monomial_count(ideal, d, n)
        if h == 0:
            break
        values.append(h)
        d += 1
        if max_length is not None and sum(values) > max_length:
            break
    return HilbertProfile(tuple(values), sum(values), True)


def artinian_substitution(ring: Ring):
    """Variable map for x_0 -> 0, y_0 -> x_a, y_b -> 0 into k[x_1..x_a, y_1..y_{b-1}]."""
    a, b = ring.a, ring.b
    target = {}
    for i in range(1, a + 1):
        target[ring.var_index("x", i)] = i - 1
    for j in range(1, b):
        target[ring.var_index("y", j)] = a + j - 1
    target[ring.var_index("y", 0)] = a - 1
    killed = {ring.var_index("x", 0), ring.var_index("y", b)}
    return target, killed, a + b - 1


def artinian_hilbert(basis) -> HilbertProfile:
    """Hilbert function of P/(in(I) + (x_0, x_a - y_0, y_b))."""
    basis = _as_basis(basis)
    R = basis.ring
    target, killed, n = artinian_substitution(R)
    images = []
    for m in basis.lead_terms:
        if any(m[v] for v in killed):
            continue
        e = [0] * n
        for v, k in enumerate(m):
            if k:
                e[target[v]] += k
        images.append(tuple(e))
    return monomial_quotient_profile(MonomialIdeal(images, n))


def expected_degree(a, b):
    return 2 * (a + b)


def _solve_linear_forms(ring: Ring, forms):
    """Express pivot variables as rational combinations of the free ones."""
    n = ring.nvars
    rows = []
    for f in forms:
        if f.is_zero() or not f.is_homogeneous() or f.degree() != 1:
            raise ParameterError(f"{f} is not a linear form")
        vec = [Fraction(0)] * n
        for m, c in f.terms():
            vec[m.index(1)] = Fraction(c)
        rows.append(vec)
    pivots = {}
    for vec in rows:
        for v, row in pivots.items():
            if vec[v]:
                f = vec[v]
                vec = [x - f * y for x, y in zip(vec, row)]
        nz = next((v for v in range(n) if vec[v]), None)
        if nz is None:
            raise ParameterError("linear forms are dependent")
        inv = 1 / vec[nz]
        vec = [x * inv for x in vec]
        for v in list(pivots):
            row = pivots[v]
            if row[nz]:
                f = row[nz]
                pivots[v] = [x - f * y for x, y in zip(row, vec)]
        pivots[nz] = vec
    free = [v for v in range(n) if v not in pivots]
    # pivot var = -sum_{free} coeff * free var
    subst = {}
    for v, row in pivots.items():
        subst[v] = {free.index(u): -row[u] for u in free if row[u]}
    for k, u in enumerate(free):
        subst[u] = {k: Fraction(1)}
    return subst, len(free)


@dataclass(frozen=True)
class LengthCertificate:
    holds: bool
    length: int | None  # None when the quotient is longer than allowed or not artinian

    def __bool__(self):
        return self.holds


def lemma_ab_certificate(basis, linear_forms, expected_length=None) -> LengthCertificate:
    """Does P/(in(basis) + linear forms) have finite length <= the expected degree?

    The expected degree defaults to 2(a+b).  Lengths are computed degree by
    degree as dim P_d minus the rank of the image of in(basis)_d.
    """
    basis = _as_basis(basis)
    R = basis.ring
    if expected_length is None:
        expected_length = expected_degree(R.a, R.b)
    subst, nfree = _solve_linear_forms(R, linear_forms)
    ideal = initial_ideal(basis)
    total = 0
    d = 0
    while True:
        image_rows = []
        for m in monomials_of_degree(R.nvars, d):
            if not ideal.contains(m):
                continue
            poly = {(): Fraction(1)}
            for v, k in enumerate(m):
                for _ in range(k):
                    nxt = {}
                    for mono, c in poly.items():
                        for u, cu in subst[v].items():
                            key = tuple(sorted(mono + (u,)))
                            nxt[key] = nxt.get(key, 0) + c * cu
                    poly = {kk: vv for kk, vv in nxt.items() if vv}
            if poly:
                image_rows.append(poly)
        space = list(combinations_with_replacement(range(nfree), d))
        col = {mono: i for i, mono in enumerate(space)}
        ent = {}
        for r, poly in enumerate(image_rows):
            den = 1
            for c in poly.values():
                den = den * c.denominator // gcd(den, c.denominator)
            for mono, c in poly.items():
                ent[(r, col[mono])] = int(c * den)
        rank = rank_q(SparseIntMatrix(len(image_rows), len(space), ent)) if ent else 0
        h = len(space) - rank
        if h == 0:
            return LengthCertificate(total <= expected_length, total)
        total += h
        if total > expected_length:
            return LengthCertificate(False, None)
        d += 1


