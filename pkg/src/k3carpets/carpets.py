"""Defining equations of K3 carpets X(a,b) and the degenerate surfaces X_e(a,b)."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

from .errors import DomainError, ParameterError
from .linalg import rank_mod_p, rational_rank, solve_rational, SparseIntMatrix
from .ring import Polynomial, Ring


@dataclass(frozen=True)
class CarpetParams:
    a: int
    b: int
    e1: int = 2
    e2: int = 1

    def __post_init__(self):
        if not (isinstance(self.a, int) and isinstance(self.b, int)):
            raise ParameterError("a and b must be integers")
        if self.b < 1 or self.a < self.b:
            raise ParameterError(f"need a >= b >= 1, got a={self.a}, b={self.b}")

    @property
    def e(self):
        return (self.e1, self.e2)

    @property
    def is_carpet(self):
        return self.e == (2, 1)

    @property
    def genus(self):
        return self.a + self.b + 1

    @property
    def clifford_index(self):
        return self.b

    def ring(self, modulus=None):
        return Ring(self.a, self.b, modulus)

    def __str__(self):
        return f"({self.a},{self.b},({self.e1},{self.e2}))"


class GeneratorBasis:
    """An ordered list of polynomials together with their lead monomials."""

    def __init__(self, ring: Ring, generators, params: CarpetParams | None = None):
        self.ring = ring
        self.params = params
        self.generators = list(generators)
        for g in self.generators:
            if g.ring != ring:
                raise DomainError("generator from a different ring")
            if g.is_zero():
                raise ParameterError("zero generator")
        self.lead_codes = [g.lead_code() for g in self.generators]

    @property
    def lead_terms(self):
        return [self.ring.decode(c) for c in self.lead_codes]

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def __getitem__(self, i):
        return self.generators[i]

    def without(self, index):
        gens = self.generators[:index] + self.generators[index + 1 :]
        return GeneratorBasis(self.ring, gens, self.params)

    def reduce_mod(self, p):
        return GeneratorBasis(self.ring.with_modulus(p), [g.reduce_mod(p) for g in self.generators], self.params)

    def __repr__(self):
        return f"GeneratorBasis({len(self)} generators in {self.ring!r})"


def sort_generators(polys):
    """Order by degree, then by descending lead term."""
    return sorted(polys, key=lambda g: (g.degree(), -g.lead_code()))


def _minor_x(R, i, j):
    # columns i < j of MX; lead term x_{i+1} x_j
    return R.x(i + 1) * R.x(j) - R.x(i) * R.x(j + 1)


def _minor_y(R, i, j):
    return R.y(i + 1) * R.y(j) - R.y(i) * R.y(j + 1)


def carpet_generators(params: CarpetParams, modulus=None) -> GeneratorBasis:
    a, b, e1, e2 = params.a, params.b, params.e1, params.e2
    R = params.ring(modulus)
    x, y = R.x, R.y
    gens = [_minor_x(R, i, j) for i, j in combinations(range(a), 2)]
    gens += [_minor_y(R, i, j) for i, j in combinations(range(b), 2)]
    if b >= 2:
        for i in range(a - 1):
            for j in range(b - 1):
                gens.append(x(i + 2) * y(j) - e1 * x(i + 1) * y(j + 1) + e2 * x(i) * y(j + 2))
    elif a >= 2:
        for i in range(a - 1):
            gens.append(
                x(i + 2) * y(0) ** 2 - e1 * x(i + 1) * y(0) * y(1) + e2 * x(i) * y(1) ** 2
            )
    else:
        gens.append(x(1) ** 2 * y(0) ** 2 - e1 * x(0) * x(1) * y(0) * y(1) + e2 * x(0) ** 2 * y(1) ** 2)
    return GeneratorBasis(R, sort_generators(gens), params)


def expected_generator_count(a, b):
    if a >= 2 and b >= 2:
        return comb(a + b - 1, 2)
    if b == 1 and a >= 2:
        return comb(a, 2) + a - 1
    return 1


def scroll_matrix_columns(R: Ring, t: int):
    """Columns of M_t: (x_i, x_{i+1}) then (y_j, t*y_{j+1})."""
    cols = [(R.x(i), R.x(i + 1)) for i in range(R.a)]
    cols += [(R.y(j), t * R.y(j + 1)) for j in range(R.b)]
    return cols


def _normalized(p):
    return -p if p.lead_coefficient() < 0 else p


def two_by_two_minors(columns):
    out = []
    for (u1, v1), (u2, v2) in combinations(columns, 2):
        m = u1 * v2 - u2 * v1
        if not m.is_zero():
            out.append(_normalized(m))
    return out


def scroll_matrix_minors(a, b, t_num: int, ring: Ring | None = None):
    """All nonzero 2x2 minors of the 2 x (a+b) scroll matrix with y-block scaled by t."""
    R = ring or Ring(a, b)
    return two_by_two_minors(scroll_matrix_columns(R, t_num))


# ---------------------------------------------------------------------------
# the canonical map alpha


def alpha_of_mixed_minor(i, j, params: CarpetParams):
    """Image x_0^(q-i-j) x_1^(i+j) of the mixed minor x_i y_{j+1} - x_{i+1} y_j.

    Returned as the exponent pair (q-i-j, i+j) in k[x_0, x_1].
    """
    a, b = params.a, params.b
    if not (0 <= i <= a - 1 and 0 <= j <= b - 1):
        raise ParameterError(f"mixed minor index ({i}, {j}) out of range for a={a}, b={b}")
    q = a + b - 2
    return (q - i - j, i + j)


def quadric_vector(poly, monomials):
    index = {m: k for k, m in enumerate(monomials)}
    vec = [0] * len(monomials)
    for m, c in poly.terms():
        vec[index[m]] = c
    return vec


def degree_two_monomials(R: Ring):
    n = R.nvars
    out = []
    for u in range(n):
        for v in range(u, n):
            e = [0] * n
            e[u] += 1
            e[v] += 1
            out.append(tuple(e))
    return out


@dataclass(frozen=True)
class AlphaKernelCheck:
    minor_count: int
    kernel_dim: int
    generators_in_kernel: bool
    generators_span_kernel: bool


def alpha_kernel_check(params: CarpetParams) -> AlphaKernelCheck:
    """Compare ker(alpha) on I_2(M_1)_2 with the span of the quadric generators of I_(2,1)."""
    a, b = params.a, params.b
    if a < 2 or b < 2:
        raise ParameterError("alpha kernel check needs a, b >= 2")
    R = params.ring()
    q = a + b - 2
    minors, images = [], []
    for i, j in combinations(range(a), 2):
        minors.append(_minor_x(R, i, j))
        images.append(None)
    for i, j in combinations(range(b), 2):
        minors.append(_minor_y(R, i, j))
        images.append(None)
    for i in range(a):
        for j in range(b):
            minors.append(R.x(i) * R.y(j + 1) - R.x(i + 1) * R.y(j))
            images.append(alpha_of_mixed_minor(i, j, params)[1])
    # alpha as a matrix: column per minor, row per monomial x_0^(q-s) x_1^s
    alpha_cols = []
    for s in images:
        col = [0] * (q + 1)
        if s is not None:
            col[s] = 1
        alpha_cols.append(col)
    alpha_rows = [[c[r] for c in alpha_cols] for r in range(q + 1)]
    kernel_dim = len(minors) - rational_rank(alpha_rows)

    mons = degree_two_monomials(R)
    minor_vecs = [quadric_vector(m, mons) for m in minors]
    gens = [g for g in carpet_generators(CarpetParams(a, b)).generators if g.degree() == 2]
    coords = []
    in_kernel = True
    for g in gens:
        sol = solve_rational(minor_vecs, quadric_vector(g, mons))
        if sol is None:
            in_kernel = False
            continue
        coords.append(sol)
        image = [sum(c * v for c, v in zip(sol, row)) for row in alpha_rows]
        if any(image):
            in_kernel = False
    spans = in_kernel and rational_rank(coords) == kernel_dim
    return AlphaKernelCheck(len(minors), kernel_dim, in_kernel, spans)


# ---------------------------------------------------------------------------
# quadrics of low rank


def rank3_witness(i, j, params: CarpetParams):
    """det((x_i+y_j, x_{i+1}+y_{j+1}), (x_{i+1}+y_{j+1}, x_{i+2}+y_{j+2}))."""
    a, b = params.a, params.b
    if a < 2 or b < 2:
        raise ParameterError("rank-3 witnesses need a, b >= 2")
    if not (0 <= i <= a - 2 and 0 <= j <= b - 2):
        raise ParameterError(f"witness index ({i}, {j}) out of range")
    R = params.ring()
    z = [R.x(i + k) + R.y(j + k) for k in range(3)]
    return z[0] * z[2] - z[1] * z[1]


def gram_matrix(q: Polynomial):
    """Symmetric matrix G with q = (1/2) v^T G v (diagonal entries doubled)."""
    R = q.ring
    if q.is_zero() or not q.is_homogeneous() or q.degree() != 2:
        raise ParameterError("quadric_rank needs a homogeneous quadric")
    n = R.nvars
    G = [[0] * n for _ in range(n)]
    for m, c in q.terms():
        vs = [v for v in range(n) for _ in range(m[v])]
        u, v = vs
        if u == v:
            G[u][u] += 2 * c
        else:
            G[u][v] += c
            G[v][u] += c
    return G


def quadric_rank(q: Polynomial) -> int:
    p = q.ring.modulus
    if p == 2:
        raise DomainError("quadric rank is not supported in characteristic 2")
    G = gram_matrix(q)
    if p is None:
        return rational_rank(G)
    return rank_mod_p(SparseIntMatrix.from_dense(G), p)


# ---------------------------------------------------------------------------
# resonance


def resonance_minors(params: CarpetParams, k: int, modulus=None):
    """2x2 minors of the scroll matrix forced by a root ratio of order k.

    Rows are (x_0..x_{a-k}, y_0..y_{b-k}) and (x_k..x_a, s*y_k..s*y_b) with
    s = -1 for k = 2 and s = +1 otherwise.
    """
    a, b = params.a, params.b
    if k < 1:
        raise ParameterError("k must be positive")
    if a < k + 1 or b < k + 1:
        raise ParameterError(f"resonance minors need a, b >= k+1 = {k + 1}")
    R = params.ring(modulus)
    s = -1 if k == 2 else 1
    cols = [(R.x(i), R.x(i + k)) for i in range(a - k + 1)]
    cols += [(R.y(j), s * R.y(j + k)) for j in range(b - k + 1)]
    return two_by_two_minors(cols)
