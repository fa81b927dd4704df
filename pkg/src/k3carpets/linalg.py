"""Exact sparse integer linear algebra.

Smith normal form, ranks over Q and F_p, invariant-factor products and trial
division factorisation.  Everything is exact; there is no floating point here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd, isqrt, prod

from .errors import ParameterError, RankDeficiencyError, InvariantViolation

DEFAULT_FACTOR_BOUND = 10**6


# ---------------------------------------------------------------------------
# integers

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Miller-Rabin; deterministic below 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FactoredInteger:
    prime_powers: dict = field(default_factory=dict)
    unfactored_cofactor: int = 1

    @property
    def value(self) -> int:
        return prod(p**k for p, k in self.prime_powers.items()) * self.unfactored_cofactor

    @property
    def fully_factored(self) -> bool:
        return self.unfactored_cofactor == 1

    @property
    def primes(self) -> list:
        return sorted(self.prime_powers)

    def __mul__(self, other):
        pp = dict(self.prime_powers)
        for p, k in other.prime_powers.items():
            pp[p] = pp.get(p, 0) + k
        return FactoredInteger(dict(sorted(pp.items())), self.unfactored_cofactor * other.unfactored_cofactor)

    def __str__(self):
        parts = [f"{p}^{k}" if k > 1 else str(p) for p, k in sorted(self.prime_powers.items())]
        if self.unfactored_cofactor != 1:
            parts.append(f"[{self.unfactored_cofactor}]")
        return "*".join(parts) if parts else "1"

    def to_json(self):
        return {
            "prime_powers": {str(p): k for p, k in sorted(self.prime_powers.items())},
            "unfactored_cofactor": str(self.unfactored_cofactor),
        }


def factorize(n: int, bound: int = DEFAULT_FACTOR_BOUND) -> FactoredInteger:
    """Trial division by every integer up to ``bound``.

    A leftover cofactor is prime when it is below ``bound**2``; otherwise it is
    returned unfactored.
    """
    if n < 1:
        raise ParameterError(f"factorize needs n >= 1, got {n}")
    pp = {}
    d = 2
    while d <= bound and d * d <= n:
        if n % d == 0:
            k = 0
            while n % d == 0:
                n //= d
                k += 1
            pp[d] = k
        d += 1 if d == 2 else 2
    cofactor = 1
    if n > 1:
        if n <= bound * bound or d * d > n:
            pp[n] = pp.get(n, 0) + 1
        else:
            cofactor = n
    return FactoredInteger(dict(sorted(pp.items())), cofactor)


# ---------------------------------------------------------------------------
# sparse matrices


class SparseIntMatrix:
    """rows x cols integer matrix stored as ``{(r, c): v}`` without zeros (0-based)."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries=None):
        if rows < 0 or cols < 0:
            raise ParameterError("negative matrix dimension")
        clean = {}
        for (r, c), v in (entries or {}).items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise ParameterError(f"entry ({r}, {c}) outside {rows}x{cols}")
            if v:
                clean[(r, c)] = int(v)
        self.rows = rows
        self.cols = cols
        self.entries = clean

    @classmethod
    def from_dense(cls, data, cols=None):
        data = [list(row) for row in data]
        ncols = cols if cols is not None else (len(data[0]) if data else 0)
        return cls(len(data), ncols, {(r, c): v for r, row in enumerate(data) for c, v in enumerate(row) if v})

    def to_dense(self):
        out = [[0] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def nnz(self):
        return len(self.entries)

    def __eq__(self, other):
        return (
            isinstance(other, SparseIntMatrix)
            and self.shape == other.shape
            and self.entries == other.entries
        )

    def __repr__(self):
        return f"SparseIntMatrix({self.rows}x{self.cols}, nnz={self.nnz})"

    def transpose(self):
        return SparseIntMatrix(self.cols, self.rows, {(c, r): v for (r, c), v in self.entries.items()})

    def submatrix(self, row_idx, col_idx):
        rpos = {r: i for i, r in enumerate(row_idx)}
        cpos = {c: j for j, c in enumerate(col_idx)}
        ent = {}
        for (r, c), v in self.entries.items():
            i = rpos.get(r)
            if i is not None:
                j = cpos.get(c)
                if j is not None:
                    ent[(i, j)] = v
        return SparseIntMatrix(len(row_idx), len(col_idx), ent)

    def row_dicts(self):
        rows = {}
        for (r, c), v in self.entries.items():
            rows.setdefault(r, {})[c] = v
        return rows

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ParameterError(f"shape mismatch {self.shape} @ {other.shape}")
        right = other.row_dicts()
        out = {}
        for (r, k), v in self.entries.items():
            for c, w in right.get(k, {}).items():
                out[(r, c)] = out.get((r, c), 0) + v * w
        return SparseIntMatrix(self.rows, other.cols, out)

    def is_zero(self):
        return not self.entries

    # -- text format: "rows cols nnz" then "r c v" (1-based, sorted) ----
    def to_text(self) -> str:
        lines = [f"{self.rows} {self.cols} {self.nnz}"]
        for (r, c) in sorted(self.entries):
            lines.append(f"{r + 1} {c + 1} {self.entries[(r, c)]}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str):
        lines = text.splitlines()
        if not lines:
            raise ParameterError("empty matrix text")
        head = lines[0].split()
        if len(head) != 3:
            raise ParameterError(f"bad header {lines[0]!r}")
        rows, cols, nnz = map(int, head)
        body = [ln for ln in lines[1:] if ln.strip()]
        if len(body) != nnz:
            raise ParameterError(f"header says {nnz} entries, found {len(body)}")
        ent = {}
        prev = None
        for ln in body:
            r, c, v = ln.split()
            key = (int(r) - 1, int(c) - 1)
            if prev is not None and key <= prev:
                raise ParameterError("entries not strictly sorted by (row, col)")
            prev = key
            if int(v) == 0:
                raise ParameterError("explicit zero entry")
            ent[key] = int(v)
        return cls(rows, cols, ent)


# ---------------------------------------------------------------------------
# ranks


def _check_prime(p):
    if not is_prime(p):
        raise ParameterError(f"characteristic {p} is not prime")


def rank_mod_p(M: SparseIntMatrix, p: int) -> int:
    """Rank over F_p by row elimination on the reduced matrix."""
    _check_prime(p)
    pivots = {}
    for row in M.row_dicts().values():
        row = {c: v % p for c, v in row.items() if v % p}
        while row:
            c = min(row)
            piv = pivots.get(c)
            if piv is None:
                inv = pow(row[c], -1, p)
                pivots[c] = {k: v * inv % p for k, v in row.items()}
                break
            f = row[c]
            for k, v in piv.items():
                w = (row.get(k, 0) - f * v) % p
                if w:
                    row[k] = w
                else:
                    row.pop(k, None)
    return len(pivots)


def rank_q(M: SparseIntMatrix) -> int:
    """Rank over Q by fraction-free elimination with content removal."""
    pivots = {}
    for row in M.row_dicts().values():
        row = dict(row)
        while row:
            c = min(row)
            piv = pivots.get(c)
            if piv is None:
                g = 0
                for v in row.values():
                    g = gcd(g, v)
                pivots[c] = {k: v // g for k, v in row.items()}
                break
            a, f = piv[c], row[c]
            g = gcd(a, f)
            a, f = a // g, f // g
            new = {k: a * v for k, v in row.items()}
            for k, v in piv.items():
                w = new.get(k, 0) - f * v
                if w:
                    new[k] = w
                else:
                    new.pop(k, None)
            g = 0
            for v in new.values():
                g = gcd(g, v)
            row = {k: v // g for k, v in new.items()} if g > 1 else new
    return len(pivots)


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SnfResult:
    invariant_factors: tuple
    rank: int

    def count_not_divisible_by(self, p: int) -> int:
        return sum(1 for d in self.invariant_factors if d % p)

    def product(self) -> int:
        return prod(self.invariant_factors)


def _divisibility_chain(values):
    vals = sorted(abs(v) for v in values)
    units = [v for v in vals if v == 1]
    rest = [v for v in vals if v != 1]
    for i in range(len(rest)):
        for j in range(i + 1, len(rest)):
            a, b = rest[i], rest[j]
            g = gcd(a, b)
            if g != a:
                rest[i], rest[j] = g, a // g * b
    return tuple(units + rest)


def _diagonalize(M: SparseIntMatrix):
    rows = M.row_dicts()
    cols = {}
    for (r, c) in M.entries:
        cols.setdefault(c, set()).add(r)
    diag = []

    def add_row_multiple(dst, src, q):
        # row[dst] -= q * row[src]
        rd = rows[dst]
        for c, v in rows[src].items():
            w = rd.get(c, 0) - q * v
            if w:
                if c not in rd:
                    cols[c].add(dst)
                rd[c] = w
            else:
                if c in rd:
                    del rd[c]
                    cols[c].discard(dst)
        if not rd:
            del rows[dst]

    def drop(r, c):
        for cc in rows.pop(r):
            cols[cc].discard(r)
        cols.pop(c, None)

    while rows:
        # pivot: smallest |v|, ties lowest row then column
        best = None
        for r in sorted(rows):
            for c, v in rows[r].items():
                av = abs(v)
                if best is None or av < best[0] or (av == best[0] and (r, c) < (best[1], best[2])):
                    best = (av, r, c)
            if best[0] == 1:
                break
        _, r, c = best
        while True:
            p = rows[r][c]
            smaller = None
            for r2 in sorted(cols[c] - {r}):
                q = rows[r2][c] // p
                add_row_multiple(r2, r, q)
                rem = rows.get(r2, {}).get(c, 0)
                if rem and (smaller is None or abs(rem) < abs(smaller[2])):
                    smaller = (r2, c, rem)
            if smaller is None:
                # column clear; now the row via column operations, which only touch row r
                row = rows[r]
                for c2 in sorted(k for k in row if k != c):
                    v = row[c2] % p  # remainder carries the sign of p, |v| < |p|
                    if v:
                        row[c2] = v
                    else:
                        del row[c2]
                        cols[c2].discard(r)
                others = [(abs(v), r, c2) for c2, v in row.items() if c2 != c]
                if not others:
                    diag.append(p)
                    drop(r, c)
                    break
                _, r, c = min(others)
                continue
            r, c = smaller[0], smaller[1]
    return diag


def smith_normal_form(M: SparseIntMatrix, verify: bool = True) -> SnfResult:
    """Invariant factors d_1 | d_2 | ... | d_r of M (all positive)."""
    diag = _diagonalize(M)
    res = SnfResult(_divisibility_chain(diag), len(diag))
    if verify:
        _verify_snf(M, res)
    return res


def _verify_snf(M, res):
    if res.rank != rank_q(M):
        raise InvariantViolation("SNF rank disagrees with rank over Q")
    g = 0
    for v in M.entries.values():
        g = gcd(g, v)
    if res.rank and res.invariant_factors[0] != abs(g):
        raise InvariantViolation("first invariant factor is not the gcd of the entries")
    if M.rows * M.cols <= 36:
        dense = M.to_dense()
        for k in range(2, min(3, res.rank) + 1):
            if minor_gcd(dense, k) != prod(res.invariant_factors[:k]):
                raise InvariantViolation(f"invariant factors disagree with {k}x{k} minor gcd")


def invariant_factor_product(M: SparseIntMatrix, snf: SnfResult | None = None) -> FactoredInteger:
    """Product of the invariant factors of a full-column-rank matrix, factored."""
    snf = snf or smith_normal_form(M)
    if snf.rank < M.cols:
        raise RankDeficiencyError(f"rank {snf.rank} < {M.cols} columns")
    return factor_invariants(snf.invariant_factors)


def factor_invariants(factors, bound=DEFAULT_FACTOR_BOUND) -> FactoredInteger:
    out = FactoredInteger()
    for d in factors:
        if d != 1:
            out = out * factorize(d, bound)
    return out


# ---------------------------------------------------------------------------
# small dense helpers


def det_int(rows) -> int:
    """Determinant of a small square integer matrix (Bareiss)."""
    n = len(rows)
    if n == 0:
        return 1
    a = [list(r) for r in rows]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def minor_gcd(dense, k) -> int:
    """gcd of all k x k minors of a dense integer matrix."""
    m = len(dense)
    n = len(dense[0]) if m else 0
    g = 0
    for rs in combinations(range(m), k):
        for cs in combinations(range(n), k):
            g = gcd(g, det_int([[dense[r][c] for c in cs] for r in rs]))
    return g


def rational_rank(vectors) -> int:
    """Rank over Q of a list of equal-length rational vectors."""
    return len(_row_echelon(vectors)[0])


def _row_echelon(vectors):
    basis, pivcols = [], []
    for vec in vectors:
        v = [Fraction(x) for x in vec]
        for b, pc in zip(basis, pivcols):
            if v[pc]:
                f = v[pc]
                v = [x - f * y for x, y in zip(v, b)]
        nz = next((i for i, x in enumerate(v) if x), None)
        if nz is None:
            continue
        inv = 1 / v[nz]
        v = [x * inv for x in v]
        for idx, b in enumerate(basis):
            if b[nz]:
                f = b[nz]
                basis[idx] = [x - f * y for x, y in zip(b, v)]
        basis.append(v)
        pivcols.append(nz)
    return basis, pivcols


def solve_rational(columns, target):
    """Coefficients c with sum c_i * columns[i] == target, or None if unsolvable."""
    n = len(columns)
    dim = len(target)
    aug = [[Fraction(columns[i][r]) for i in range(n)] + [Fraction(target[r])] for r in range(dim)]
    pivots = []
    row = 0
    for col in range(n):
        pr = next((r for r in range(row, dim) if aug[r][col]), None)
        if pr is None:
            continue
        aug[row], aug[pr] = aug[pr], aug[row]
        inv = 1 / aug[row][col]
        aug[row] = [x * inv for x in aug[row]]
        for r in range(dim):
            if r != row and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[row])]
        pivots.append(col)
        row += 1
    if any(aug[r][n] for r in range(row, dim)):
        return None
    sol = [Fraction(0)] * n
    for r, col in enumerate(pivots):
        sol[col] = aug[r][n]
    return sol
