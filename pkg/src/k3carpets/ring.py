"""Exact polynomial arithmetic in Z[x_0..x_a, y_0..y_b] or F_p[x_0..x_a, y_0..y_b].

Monomials are dense exponent tuples ordered x_0, ..., x_a, y_0, ..., y_b.  The
term order is graded reverse lexicographic with x_0 > ... > x_a > y_0 > ... > y_b.

Internally every monomial is also carried as an integer *code*

    code(m) = deg(m) * B**n - sum_v e_v * B**v,      B = 2**EXP_BITS

which is additive under multiplication and whose integer order coincides with
the term order.  Divisibility is read off the packed exponent field
``E = (-code) mod B**n`` with one guard bit per field.
"""

from __future__ import annotations

import re
from typing import NamedTuple

from .errors import DimensionError, DomainError, ParameterError
from .linalg import is_prime

EXP_BITS = 8
MAX_EXPONENT = (1 << (EXP_BITS - 1)) - 1


class Multidegree(NamedTuple):
    """Fine grading with deg x_i = (1, 0, i) and deg y_j = (0, 1, j)."""

    dx: int
    dy: int
    weight: int

    def __add__(self, other):
        return Multidegree(self.dx + other.dx, self.dy + other.dy, self.weight + other.weight)

    def __sub__(self, other):
        return Multidegree(self.dx - other.dx, self.dy - other.dy, self.weight - other.weight)

    @property
    def total(self):
        return self.dx + self.dy


def compare_monomials(m1, m2):
    """Return -1, 0 or 1 comparing exponent tuples in graded reverse lex order."""
    if len(m1) != len(m2):
        raise DimensionError(f"monomials of length {len(m1)} and {len(m2)}")
    d1, d2 = sum(m1), sum(m2)
    if d1 != d2:
        return 1 if d1 > d2 else -1
    for u, v in zip(reversed(m1), reversed(m2)):
        if u != v:
            return 1 if u < v else -1
    return 0


class Ring:
    """The polynomial ring in x_0..x_a, y_0..y_b over Z or over F_p."""

    def __init__(self, a: int, b: int, modulus: int | None = None):
        if a < 0 or b < 0:
            raise ParameterError(f"need a, b >= 0, got a={a}, b={b}")
        if modulus is not None and not is_prime(modulus):
            raise DomainError(f"modulus {modulus} is not prime")
        self.a = a
        self.b = b
        self.modulus = modulus
        self.nvars = a + b + 2
        n = self.nvars
        self._top = EXP_BITS * n
        self._field_mask = (1 << self._top) - 1
        self._guard = sum(1 << (EXP_BITS * v + EXP_BITS - 1) for v in range(n))
        self._var_codes = [self._encode_unchecked(self._unit(v)) for v in range(n)]
        self._multideg = [Multidegree(1, 0, i) for i in range(a + 1)] + [
            Multidegree(0, 1, j) for j in range(b + 1)
        ]

    # -- identity -------------------------------------------------------
    def _key(self):
        return (self.a, self.b, self.modulus)

    def __eq__(self, other):
        return isinstance(other, Ring) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        dom = "ZZ" if self.modulus is None else f"GF({self.modulus})"
        return f"Ring(a={self.a}, b={self.b}, {dom})"

    def with_modulus(self, modulus):
        return Ring(self.a, self.b, modulus)

    # -- variables ------------------------------------------------------
    def _unit(self, v):
        e = [0] * self.nvars
        e[v] = 1
        return tuple(e)

    def var_index(self, kind: str, index: int) -> int:
        if kind == "x":
            if not 0 <= index <= self.a:
                raise ParameterError(f"x_{index} not in ring with a={self.a}")
            return index
        if kind == "y":
            if not 0 <= index <= self.b:
                raise ParameterError(f"y_{index} not in ring with b={self.b}")
            return self.a + 1 + index
        raise ParameterError(f"unknown variable kind {kind!r}")

    def var_name(self, v: int) -> str:
        return f"x{v}" if v <= self.a else f"y{v - self.a - 1}"

    def x(self, i):
        return Polynomial.monomial(self, self._unit(self.var_index("x", i)))

    def y(self, j):
        return Polynomial.monomial(self, self._unit(self.var_index("y", j)))

    def one(self):
        return Polynomial.monomial(self, (0,) * self.nvars)

    def zero(self):
        return Polynomial(self, {})

    def monomial(self, **powers):
        """Build an exponent tuple from keywords such as ``x1=2, y0=1``."""
        e = [0] * self.nvars
        for name, k in powers.items():
            e[self.var_index(name[0], int(name[1:]))] += k
        return tuple(e)

    # -- monomial codes -------------------------------------------------
    def _encode_unchecked(self, m):
        E = 0
        for v, k in enumerate(m):
            E |= k << (EXP_BITS * v)
        return (sum(m) << self._top) - E

    def encode(self, m) -> int:
        if len(m) != self.nvars:
            raise DimensionError(f"monomial of length {len(m)} in ring with {self.nvars} variables")
        for k in m:
            if k < 0 or k > MAX_EXPONENT:
                raise ParameterError(f"exponent {k} out of range 0..{MAX_EXPONENT}")
        return self._encode_unchecked(m)

    def decode(self, code: int):
        E = (-code) & self._field_mask
        mask = (1 << EXP_BITS) - 1
        return tuple((E >> (EXP_BITS * v)) & mask for v in range(self.nvars))

    def code_degree(self, code: int) -> int:
        return -((-code) >> self._top)

    def code_fields(self, code: int) -> int:
        return (-code) & self._field_mask

    def code_divides(self, cm: int, cn: int) -> bool:
        g = self._guard
        m = -cm & self._field_mask
        n = -cn & self._field_mask
        return ((n | g) - m) & g == g

    def _ge_mask(self, e1, e2):
        # 0xFF in every field where e1 >= e2, computed on packed fields
        ge = ((e1 | self._guard) - e2) & self._guard
        return (ge >> (EXP_BITS - 1)) * ((1 << EXP_BITS) - 1)

    def _from_fields(self, E):
        deg = sum(E.to_bytes(self._top // 8 + 1, "little"))
        return (deg << self._top) - E

    def code_lcm(self, c1, c2):
        mask = self._field_mask
        e1, e2 = -c1 & mask, -c2 & mask
        fm = self._ge_mask(e1, e2)
        return self._from_fields((e1 & fm) | (e2 & ~fm & mask))

    def code_gcd(self, c1, c2):
        mask = self._field_mask
        e1, e2 = -c1 & mask, -c2 & mask
        fm = self._ge_mask(e1, e2)
        return self._from_fields((e2 & fm) | (e1 & ~fm & mask))

    # -- gradings -------------------------------------------------------
    def multidegree(self, m) -> Multidegree:
        dx = sum(m[: self.a + 1])
        dy = sum(m[self.a + 1 :])
        w = sum(i * k for i, k in enumerate(m[: self.a + 1]))
        w += sum(j * k for j, k in enumerate(m[self.a + 1 :]))
        return Multidegree(dx, dy, w)

    def compare(self, m1, m2):
        if len(m1) != self.nvars or len(m2) != self.nvars:
            raise DimensionError("monomial does not belong to this ring")
        return compare_monomials(m1, m2)

    # -- text -----------------------------------------------------------
    def format_monomial(self, m) -> str:
        parts = []
        for v, k in enumerate(m):
            if k == 1:
                parts.append(self.var_name(v))
            elif k > 1:
                parts.append(f"{self.var_name(v)}^{k}")
        return "*".join(parts) if parts else "1"

    _TERM = re.compile(r"[+-]?[^+-]+")

    def parse(self, text: str) -> Polynomial:
        """Parse ``x1^2-x0*x2``-style text (whitespace is ignored)."""
        s = "".join(text.split())
        if not s:
            raise ParameterError("empty polynomial text")
        terms = {}
        pos = 0
        for match in self._TERM.finditer(s):
            if match.start() != pos:
                raise ParameterError(f"cannot parse {text!r}")
            pos = match.end()
            tok = match.group()
            sign = -1 if tok[0] == "-" else 1
            tok = tok.lstrip("+-")
            coeff = sign
            exps = [0] * self.nvars
            for factor in tok.split("*"):
                if factor.isdigit():
                    coeff *= int(factor)
                    continue
                fm = re.fullmatch(r"([xy])(\d+)(?:\^(\d+))?", factor)
                if fm is None:
                    raise ParameterError(f"bad factor {factor!r} in {text!r}")
                v = self.var_index(fm.group(1), int(fm.group(2)))
                exps[v] += int(fm.group(3) or 1)
            c = self.encode(tuple(exps))
            terms[c] = terms.get(c, 0) + coeff
        if pos != len(s):
            raise ParameterError(f"cannot parse {text!r}")
        return Polynomial(self, terms)


def multidegree(m, ring: Ring) -> Multidegree:
    return ring.multidegree(m)


class Polynomial:
    """Immutable polynomial; terms kept as ``{monomial code: coefficient}``."""

    __slots__ = ("ring", "_terms", "_hash")

    def __init__(self, ring: Ring, terms: dict):
        p = ring.modulus
        if p is None:
            self._terms = {c: v for c, v in terms.items() if v}
        else:
            self._terms = {c: v % p for c, v in terms.items() if v % p}
        self.ring = ring
        self._hash = None

    @classmethod
    def monomial(cls, ring, m, coeff=1):
        return cls(ring, {ring.encode(m): coeff})

    @classmethod
    def from_terms(cls, ring, pairs):
        """Build from ``[(exponent tuple, coefficient), ...]``."""
        terms = {}
        for m, v in pairs:
            c = ring.encode(tuple(m))
            terms[c] = terms.get(c, 0) + v
        return cls(ring, terms)

    # -- inspection -----------------------------------------------------
    @property
    def codes(self):
        return self._terms

    def is_zero(self):
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def terms(self):
        """``[(exponent tuple, coefficient)]`` in strictly decreasing term order."""
        dec = self.ring.decode
        return [(dec(c), self._terms[c]) for c in sorted(self._terms, reverse=True)]

    def lead_code(self):
        if not self._terms:
            raise ValueError("zero polynomial has no lead term")
        return max(self._terms)

    def lead_monomial(self):
        return self.ring.decode(self.lead_code())

    def lead_coefficient(self):
        return self._terms[self.lead_code()]

    def coefficient(self, m):
        return self._terms.get(self.ring.encode(tuple(m)), 0)

    def degree(self):
        return max(self.ring.code_degree(c) for c in self._terms) if self._terms else -1

    def is_homogeneous(self):
        return len({self.ring.code_degree(c) for c in self._terms}) <= 1

    def multidegrees(self):
        md = self.ring.multidegree
        return {md(self.ring.decode(c)) for c in self._terms}

    def is_multihomogeneous(self):
        return len(self.multidegrees()) <= 1

    # -- arithmetic -----------------------------------------------------
    def _check(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        if other.ring.nvars != self.ring.nvars or other.ring.a != self.ring.a:
            raise DimensionError(f"{self.ring!r} vs {other.ring!r}")
        if other.ring.modulus != self.ring.modulus:
            raise DomainError(f"mixed coefficient domains {self.ring!r} vs {other.ring!r}")
        return None

    def __add__(self, other):
        if isinstance(other, int):
            other = self.ring.one() * other
        if self._check(other) is NotImplemented:
            return NotImplemented
        terms = dict(self._terms)
        for c, v in other._terms.items():
            terms[c] = terms.get(c, 0) + v
        return Polynomial(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ring, {c: -v for c, v in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = self.ring.one() * other
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return Polynomial(self.ring, {c: v * other for c, v in self._terms.items()})
        if self._check(other) is NotImplemented:
            return NotImplemented
        terms = {}
        for c1, v1 in self._terms.items():
            for c2, v2 in other._terms.items():
                c = c1 + c2
                terms[c] = terms.get(c, 0) + v1 * v2
        return Polynomial(self.ring, terms)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise ParameterError("negative power")
        out = self.ring.one()
        for _ in range(k):
            out = out * self
        return out

    def mul_monomial(self, m, coeff=1):
        s = self.ring.encode(tuple(m))
        return Polynomial(self.ring, {c + s: v * coeff for c, v in self._terms.items()})

    def reduce_mod(self, p):
        """Image in F_p[...] (coefficients taken mod p)."""
        return Polynomial(self.ring.with_modulus(p), self._terms)

    def lift(self):
        """Integer polynomial with symmetric representatives (identity over Z)."""
        p = self.ring.modulus
        if p is None:
            return self
        return Polynomial(
            self.ring.with_modulus(None),
            {c: (v - p if v > p // 2 else v) for c, v in self._terms.items()},
        )

    # -- identity and text ----------------------------------------------
    def __eq__(self, other):
        if isinstance(other, int):
            return self == self.ring.one() * other
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self._terms.items())))
        return self._hash

    def __str__(self):
        if not self._terms:
            return "0"
        out = []
        for m, v in self.terms():
            mono = self.ring.format_monomial(m)
            mag = abs(v)
            if mono == "1":
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if v < 0:
                out.append("-" + body)
            else:
                out.append(("+" if out else "") + body)
        return "".join(out)

    def __repr__(self):
        return f"Polynomial({self})"
