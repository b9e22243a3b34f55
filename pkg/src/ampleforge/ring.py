"""Sparse multivariate polynomial arithmetic over a prime field.

Everything downstream (Groebner bases, resolutions, cohomology) runs on the
two types defined here: a graded polynomial ring S = F_p[x0..xn] with the
degree-reverse-lexicographic order, and immutable sparse polynomials whose
terms are kept strictly sorted in that order.
"""

from __future__ import annotations

import re
from fractions import Fraction

# Exponents must fit in 16 bits; Frobenius powers multiply exponents by p and
# overflow is reported, never wrapped.
MAX_EXPONENT = 0xFFFF

DEFAULT_ALIASES = ("x", "y", "z", "w")


class RingError(ValueError):
    """Structural problem: bad ring parameters or mixed-ring operands."""


class ExponentOverflowError(OverflowError):
    """An exponent left the 16-bit storage range (e.g. iterated Frobenius)."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


class GradedRing:
    """F_p[x0..xn] with n+1 = nvars variables and the degrevlex order."""

    __slots__ = ("p", "nvars", "names")

    def __init__(self, p: int, nvars: int, names: tuple[str, ...] | None = None):
        if not (2 <= p < 2**31):
            raise RingError(f"modulus {p} out of range [2, 2^31)")
        if not _is_prime(p):
            raise RingError(f"modulus {p} is not prime")
        if nvars < 2:
            raise RingError("need at least 2 variables (P^1 is the smallest space)")
        if names is None:
            if nvars <= len(DEFAULT_ALIASES):
                names = DEFAULT_ALIASES[:nvars]
            else:
                names = tuple(f"x{i}" for i in range(nvars))
        if len(names) != nvars or len(set(names)) != nvars:
            raise RingError("variable names must be distinct and match nvars")
        self.p = p
        self.nvars = nvars
        self.names = tuple(names)

    @property
    def projective_dim(self) -> int:
        return self.nvars - 1

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GradedRing)
            and self.p == other.p
            and self.nvars == other.nvars
        )

    def __hash__(self) -> int:
        return hash((self.p, self.nvars))

    def __repr__(self) -> str:
        return f"GradedRing(p={self.p}, nvars={self.nvars})"

    # -- variable lookup: accepts the ring's own names plus canonical x<i> --

    def var_index(self, name: str) -> int:
        if name in self.names:
            return self.names.index(name)
        m = re.fullmatch(r"x(\d)", name)
        if m and int(m.group(1)) < self.nvars:
            return int(m.group(1))
        raise RingError(f"unknown variable {name!r} in {self!r}")

    def variable(self, i: int) -> "Polynomial":
        exps = [0] * self.nvars
        exps[i] = 1
        return Polynomial(self, ((tuple(exps), 1),))

    def constant(self, c: int) -> "Polynomial":
        c %= self.p
        if c == 0:
            return Polynomial(self, ())
        return Polynomial(self, (((0,) * self.nvars, c),))

    def zero(self) -> "Polynomial":
        return Polynomial(self, ())

    def one(self) -> "Polynomial":
        return self.constant(1)

    def inv(self, c: int) -> int:
        c %= self.p
        if c == 0:
            raise ZeroDivisionError("inverse of 0 mod p")
        return pow(c, self.p - 2, self.p)


# ---------------------------------------------------------------------------
# Monomials.  Internally a monomial is a plain tuple of exponents; the class
# below is the API-surface wrapper that carries the cached degree.
# ---------------------------------------------------------------------------


def mono_degree(exps: tuple[int, ...]) -> int:
    return sum(exps)


def mono_key(exps: tuple[int, ...]):
    """Sort key realizing degrevlex: larger key = larger monomial."""
    return (sum(exps), tuple(-e for e in reversed(exps)))


def mono_cmp(e1: tuple[int, ...], e2: tuple[int, ...]) -> int:
    if len(e1) != len(e2):
        raise RingError("monomial length mismatch")
    k1, k2 = mono_key(e1), mono_key(e2)
    return (k1 > k2) - (k1 < k2)


def mono_mul(e1: tuple[int, ...], e2: tuple[int, ...]) -> tuple[int, ...]:
    out = tuple(a + b for a, b in zip(e1, e2))
    if any(e > MAX_EXPONENT for e in out):
        raise ExponentOverflowError(f"exponent exceeds {MAX_EXPONENT}: {out}")
    return out

def mono_divides(e1: tuple[int, ...], e2: tuple[int, ...]) -> bool:
    return all(a <= b for a, b in zip(e1, e2))


def mono_div(e1: tuple[int, ...], e2: tuple[int, ...]) -> tuple[int, ...]:
    """e1 / e2, assuming divisibility."""
    return tuple(a - b for a, b in zip(e1, e2))


def mono_lcm(e1: tuple[int, ...], e2: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(max(a, b) for a, b in zip(e1, e2))


def mono_coprime(e1: tuple[int, ...], e2: tuple[int, ...]) -> bool:
    return all(a == 0 or b == 0 for a, b in zip(e1, e2))


class Monomial:
    """Exponent vector with its degree cached at construction."""

    __slots__ = ("exponents", "degree")

    def __init__(self, exponents):
        self.exponents = tuple(int(e) for e in exponents)
        if any(e < 0 for e in self.exponents):
            raise RingError("negative exponent in monomial")
        if any(e > MAX_EXPONENT for e in self.exponents):
            raise ExponentOverflowError(f"exponent exceeds {MAX_EXPONENT}")
        self.degree = sum(self.exponents)

    def check(self) -> None:
        # invariant: cached degree equals the recomputed exponent sum
        assert self.degree == sum(self.exponents)

    def __eq__(self, other) -> bool:
        return isinstance(other, Monomial) and self.exponents == other.exponents

    def __hash__(self) -> int:
        return hash(self.exponents)

    def __repr__(self) -> str:
        return f"Monomial{self.exponents}"


def monomial_compare(m1: Monomial, m2: Monomial) -> int:
    """Total order: degree first, then reverse-lex scanning right to left.

    Returns -1, 0 or 1.  Smaller exponent on the last differing variable
    (scanned from the right) wins.
    """
    return mono_cmp(m1.exponents, m2.exponents)


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------


class Polynomial:
    """Immutable sparse polynomial; terms sorted descending in degrevlex.

    ``terms`` is a tuple of (exponent tuple, coefficient) with coefficients
    in [1, p-1].  The zero polynomial has an empty term tuple.
    """

    __slots__ = ("ring", "terms")

    def __init__(self, ring: GradedRing, terms):
        self.ring = ring
        self.terms = tuple(terms)

    # construction ----------------------------------------------------------

    @staticmethod
    def from_dict(ring: GradedRing, d: dict) -> "Polynomial":
        items = []
        for exps, c in d.items():
            c %= ring.p
            if c:
                if len(exps) != ring.nvars:
                    raise RingError("exponent tuple has wrong length")
                if any(e < 0 for e in exps):
                    raise RingError("negative exponent")
                if any(e > MAX_EXPONENT for e in exps):
                    raise ExponentOverflowError(f"exponent exceeds {MAX_EXPONENT}")
                items.append((tuple(exps), c))
        items.sort(key=lambda t: mono_key(t[0]), reverse=True)
        return Polynomial(ring, items)

    # predicates ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_homogeneous(self) -> bool:
        degs = {mono_degree(e) for e, _ in self.terms}
        return len(degs) <= 1

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(mono_degree(e) for e, _ in self.terms)

    # leading data (degrevlex) ----------------------------------------------

    def lead(self) -> tuple[tuple[int, ...], int]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return self.terms[0]

    def lead_monomial(self) -> tuple[int, ...]:
        return self.lead()[0]

    def lead_coeff(self) -> int:
        return self.lead()[1]

    # arithmetic ------------------------------------------------------------

    def _check_ring(self, other: "Polynomial") -> None:
        if self.ring != other.ring:
            raise RingError("operands live in different rings")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check_ring(other)
        acc = dict(self.terms)
        p = self.ring.p
        for e, c in other.terms:
            v = (acc.get(e, 0) + c) % p
            if v:
                acc[e] = v
            else:
                acc.pop(e, None)
        return Polynomial.from_dict(self.ring, acc)

    def __neg__(self) -> "Polynomial":
        p = self.ring.p
        return Polynomial(self.ring, tuple((e, (-c) % p) for e, c in self.terms))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check_ring(other)
        p = self.ring.p
        acc: dict = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = mono_mul(e1, e2)
                v = (acc.get(e, 0) + c1 * c2) % p
                if v:
                    acc[e] = v
                else:
                    acc.pop(e, None)
        return Polynomial.from_dict(self.ring, acc)

    def scalar_mul(self, c: int) -> "Polynomial":
        c %= self.ring.p
        if c == 0:
            return self.ring.zero()
        p = self.ring.p
        return Polynomial(self.ring, tuple((e, (k * c) % p) for e, k in self.terms))

    def term_mul(self, exps: tuple[int, ...], c: int) -> "Polynomial":
        """Multiply by the single term c*x^exps."""
        c %= self.ring.p
        if c == 0:
            return self.ring.zero()
        p = self.ring.p
        return Polynomial(
            self.ring,
            tuple((mono_mul(e, exps), (k * c) % p) for e, k in self.terms),
        )

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        return self.scalar_mul(self.ring.inv(self.lead_coeff()))

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power")
        out = self.ring.one()
        for _ in range(k):
            out = out * self
        return out

    def bracket_power(self, q: int) -> "Polynomial":
        """x^a -> x^(q*a) on every term; equals f^q over F_p for q a p-power."""
        terms = []
        for e, c in self.terms:
            ee = tuple(a * q for a in e)
            if any(a > MAX_EXPONENT for a in ee):
                raise ExponentOverflowError(
                    f"Frobenius power exponent exceeds {MAX_EXPONENT}"
                )
            terms.append((ee, c))
        return Polynomial(self.ring, tuple(terms))

    # equality / hashing ----------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.ring == other.ring
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.ring, self.terms))

    # text ------------------------------------------------------------------

    def __repr__(self) -> str:
        return f"Polynomial({format_poly(self)!r})"

    def __str__(self) -> str:
        return format_poly(self)


def poly_arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    """Dispatch form of +, -, *, scalar multiple (b = constant)."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "scalar_mul":
        if not (b.is_zero() or b.degree() == 0):
            raise RingError("scalar_mul needs a constant second operand")
        c = 0 if b.is_zero() else b.lead_coeff()
        return a.scalar_mul(c)
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# Text syntax: terms joined by +/-, '*' optional, '^' for powers, variables
# named x0..x9 or aliased x,y,z,w.  Whitespace-insensitive.
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*([0-9]+|[A-Za-z][A-Za-z0-9]*|\^|\*|\+|\-)")


class PolyParseError(ValueError):
    def __init__(self, text: str, pos: int, msg: str):
        self.pos = pos
        super().__init__(f"at column {pos + 1}: {msg} in {text!r}")


def parse_poly(ring: GradedRing, text: str) -> Polynomial:
    """Parse the whitespace-insensitive +/- term syntax."""
    tokens: list[tuple[str, int]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise PolyParseError(text, pos, "unexpected character")
        tokens.append((m.group(1), m.start(1)))
        pos = m.end()

    acc: dict = {}
    i = 0
    n = len(tokens)
    if n == 0:
        raise PolyParseError(text, 0, "empty polynomial")

    first = True
    while i < n:
        sign = 1
        saw_sign = False
        while i < n and tokens[i][0] in "+-":
            if tokens[i][0] == "-":
                sign = -sign
            saw_sign = True
            i += 1
        if not first and not saw_sign:
            raise PolyParseError(text, tokens[i][1], "expected + or - between terms")
        if i >= n:
            raise PolyParseError(text, len(text) - 1, "dangling sign")
        first = False

        coeff = 1
        exps = [0] * ring.nvars
        saw_factor = False
        expect_factor = True
        while i < n:
            tok, at = tokens[i]
            if tok in "+-" and not expect_factor:
                break
            if tok == "*":
                if not saw_factor:
                    raise PolyParseError(text, at, "'*' with no left factor")
                expect_factor = True
                i += 1
                continue
            if tok == "^":
                raise PolyParseError(text, at, "'^' with no base")
            if tok.isdigit():
                coeff *= int(tok)
                i += 1
            else:
                try:
                    vi = ring.var_index(tok)
                except RingError:
                    raise PolyParseError(text, at, f"unknown variable {tok!r}")
                i += 1
                e = 1
                if i < n and tokens[i][0] == "^":
                    i += 1
                    if i >= n or not tokens[i][0].isdigit():
                        raise PolyParseError(text, at, "'^' needs an integer exponent")
                    e = int(tokens[i][0])
                    i += 1
                if exps[vi] + e > MAX_EXPONENT:
                    raise ExponentOverflowError(f"exponent exceeds {MAX_EXPONENT}")
                exps[vi] += e
            saw_factor = True
            expect_factor = False
        if not saw_factor:
            raise PolyParseError(text, tokens[min(i, n - 1)][1], "empty term")
        key = tuple(exps)
        acc[key] = (acc.get(key, 0) + sign * coeff) % ring.p

    return Polynomial.from_dict(ring, acc)


def format_poly(f: Polynomial) -> str:
    """Canonical printer; parse(format(f)) == f."""
    if f.is_zero():
        return "0"
    ring = f.ring
    parts = []
    for idx, (exps, c) in enumerate(f.terms):
        factors = []
        for vi, e in enumerate(exps):
            if e == 1:
                factors.append(ring.names[vi])
            elif e > 1:
                factors.append(f"{ring.names[vi]}^{e}")
        if not factors:
            body = str(c)
        elif c == 1:
            body = "*".join(factors)
        else:
            body = "*".join([str(c)] + factors)
        parts.append(("" if idx == 0 else " + ") + body)
    return "".join(parts)


# Exact rational helper used by Hilbert polynomial assembly downstream.
def binomial_poly(shift: int, r: int) -> list[Fraction]:
    """Coefficients (ascending) of the polynomial d -> C(d + shift, r)."""
    # C(d+shift, r) = prod_{i=0}^{r-1} (d + shift - i) / r!
    coeffs = [Fraction(1)]
    for i in range(r):
        c = shift - i
        new = [Fraction(0)] * (len(coeffs) + 1)
        for k, a in enumerate(coeffs):
            new[k] += a * c
            new[k + 1] += a
        coeffs = new
    fact = 1
    for i in range(1, r + 1):
        fact *= i
    return [a / fact for a in coeffs]
