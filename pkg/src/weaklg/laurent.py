"""Sparse Laurent polynomials over exact rationals and their constant-term series.

The central object is the series Phi_f(t) = sum_i phi(i) t^i where phi(i) is
the coefficient of x^0 in f^i.  Two evaluation strategies are provided: plain
incremental powers, and a split-power convolution that only ever expands f up
to half the requested order.  Both are exact; coefficients are Python ints
where possible and Fractions otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import linalg


class DimensionMismatch(ValueError):
    """Operands live in different numbers of variables."""


class ParseError(ValueError):
    """Malformed text input.  Remembers the offending 1-based line number."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


def normalize_rational(value):
    """Coerce to an exact rational, collapsing integral Fractions to int."""
    if isinstance(value, bool):
        raise TypeError("coefficient must be int or Fraction, not bool")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return int(value) if value.denominator == 1 else value
    raise TypeError(f"coefficient must be int or Fraction, not {type(value).__name__}")


def format_rational(value) -> str:
    """Render as `p` or `p/q` in lowest terms."""
    value = normalize_rational(value)
    if isinstance(value, int):
        return str(value)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text, line=None):
    """Parse `p` or `p/q`.  Decimal notation is rejected on purpose."""
    token = text.strip()
    if not token or "." in token:
        raise ParseError(f"bad rational {token!r}", line)
    try:
        return normalize_rational(Fraction(token))
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad rational {token!r}", line) from None


def multiply_term_maps(a, b, reduce=None):
    """Multiply two {exponent tuple: coefficient} maps.

    This is the inner loop of every power computation, so it works on raw
    dicts rather than LaurentPoly wrappers.  When `reduce` is given it is
    applied to every accumulated coefficient; the mod-p search passes
    ``lambda c: c % p`` so the whole enumeration runs over small ints, while
    exact callers pass nothing.  Terms that reduce to zero are dropped.
    """
    if len(a) > len(b):
        a, b = b, a
    out = {}
    get = out.get
    if reduce is None:
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                v = get(e)
                out[e] = ca * cb if v is None else v + ca * cb
        return {e: c for e, c in out.items() if c}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            v = get(e)
            out[e] = reduce(ca * cb) if v is None else reduce(v + ca * cb)
    return {e: c for e, c in out.items() if c}


class LaurentPoly:
    """Immutable sparse Laurent polynomial in n variables.

    Terms are a map from integer exponent tuples to nonzero exact rationals.
    Every exposed ordering is lexicographic in the exponent tuple, which makes
    serialization deterministic.
    """

    __slots__ = ("_n", "_terms")

    def __init__(self, n, terms=()):
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise ValueError("dimension must be a positive integer")
        data = {}
        items = terms.items() if hasattr(terms, "items") else terms
        for exps, value in items:
            e = tuple(exps)
            if len(e) != n:
                raise DimensionMismatch(
                    f"exponent vector {e} has length {len(e)}, expected {n}"
                )
            for x in e:
                if not isinstance(x, int) or isinstance(x, bool):
                    raise TypeError(f"exponents must be integers: {e}")
            data[e] = data.get(e, 0) + normalize_rational(value)
        self._n = n
        self._terms = {e: normalize_rational(c) for e, c in data.items() if c}

    @classmethod
    def zero(cls, n):
        return cls(n)

    @classmethod
    def constant(cls, n, value):
        return cls(n, {(0,) * n: value})

    @classmethod
    def monomial(cls, n, exps, coeff=1):
        return cls(n, {tuple(exps): coeff})

    @property
    def dimension(self):
        return self._n

    def terms(self):
        """Sorted (exponents, coefficient) pairs."""
        return tuple(sorted(self._terms.items()))

    def term_map(self):
        """Defensive copy of the raw exponent-to-coefficient dict."""
        return dict(self._terms)

    def support(self):
        return tuple(sorted(self._terms))

    def coefficient(self, exps):
        return self._terms.get(tuple(exps), 0)

    def constant_term(self):
        return self._terms.get((0,) * self._n, 0)

    def is_zero(self):
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._n == other._n and self._terms == other._terms

    def __hash__(self):
        return hash((self._n, frozenset(self._terms.items())))

    def __neg__(self):
        return LaurentPoly(self._n, {e: -c for e, c in self._terms.items()})

    def _check_dim(self, other):
        if self._n != other._n:
            raise DimensionMismatch(
                f"cannot combine polynomials in {self._n} and {other._n} variables"
            )

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        self._check_dim(other)
        data = dict(self._terms)
        for e, c in other._terms.items():
            data[e] = data.get(e, 0) + c
        return LaurentPoly(self._n, data)

    def __sub__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.__add__(-other)

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            self._check_dim(other)
            return LaurentPoly(self._n, multiply_term_maps(self._terms, other._terms))
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if other == 0:
                return LaurentPoly(self._n)
            return LaurentPoly(self._n, {e: c * other for e, c in self._terms.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or isinstance(k, bool) or k < 0:
            raise ValueError("power exponent must be a nonnegative integer")
        result = {(0,) * self._n: 1}
        for _ in range(k):
            result = multiply_term_maps(result, self._terms)
        return LaurentPoly(self._n, result)

    def __repr__(self):
        return f"LaurentPoly(n={self._n}, terms={len(self._terms)})"

    def to_text(self):
        """One term per line, `<coeff> : <e1> ... <en>`, sorted by exponents."""
        lines = [f"# dim {self._n}"]
        for exps, c in sorted(self._terms.items()):
            lines.append(f"{format_rational(c)} : {' '.join(str(x) for x in exps)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        declared = None
        entries = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("dim"):
                    try:
                        declared = int(body[3:].strip())
                    except ValueError:
                        raise ParseError("bad dimension declaration", lineno) from None
                    if declared < 1:
                        raise ParseError("dimension must be positive", lineno)
                continue
            left, sep, right = line.partition(":")
            if not sep:
                raise ParseError("expected '<coefficient> : <exponents>'", lineno)
            coeff = parse_rational(left, lineno)
            try:
                exps = tuple(int(tok) for tok in right.split())
            except ValueError:
                raise ParseError(f"bad exponent list {right.strip()!r}", lineno) from None
            if not exps:
                raise ParseError("missing exponent list", lineno)
            if declared is None:
                declared = len(exps)
            if len(exps) != declared:
                raise ParseError(
                    f"exponent vector has length {len(exps)}, expected {declared}", lineno
                )
            if exps in entries:
                raise ParseError(f"duplicate exponent vector {exps}", lineno)
            entries[exps] = coeff
        if declared is None:
            raise ParseError("empty input: the zero polynomial needs a '# dim n' line")
        return cls(declared, entries)


class PowerSeries:
    """Exact truncated power series c_0 + c_1 t + ... + c_N t^N."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs):
        vals = tuple(normalize_rational(c) for c in coeffs)
        if not vals:
            raise ValueError("a power series needs at least the order-0 coefficient")
        self._coeffs = vals

    @property
    def order(self):
        return len(self._coeffs) - 1

    def coefficients(self):
        return self._coeffs

    def __getitem__(self, i):
        if not isinstance(i, int) or isinstance(i, bool):
            raise TypeError("series index must be an integer")
        if i < 0 or i > self.order:
            raise IndexError(f"coefficient index {i} outside 0..{self.order}")
        return self._coeffs[i]

    def __iter__(self):
        return iter(self._coeffs)

    def __eq__(self, other):
        if not isinstance(other, PowerSeries):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self):
        return hash(self._coeffs)

    def truncate(self, N):
        if N < 0 or N > self.order:
            raise ValueError(f"cannot truncate order-{self.order} series at {N}")
        return PowerSeries(self._coeffs[: N + 1])

    def is_zero(self):
        return all(c == 0 for c in self._coeffs)

    def __repr__(self):
        head = ", ".join(format_rational(c) for c in self._coeffs[:4])
        tail = ", ..." if self.order >= 4 else ""
        return f"PowerSeries([{head}{tail}], order={self.order})"

    def to_text(self):
        return "\n".join(f"{i} {format_rational(c)}" for i, c in enumerate(self._coeffs)) + "\n"

    @classmethod
    def from_text(cls, text):
        entries = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(None, 1)
            if len(parts) != 2:
                raise ParseError("expected '<index> <coefficient>'", lineno)
            try:
                idx = int(parts[0])
            except ValueError:
                raise ParseError(f"bad index {parts[0]!r}", lineno) from None
            if idx in entries:
                raise ParseError(f"duplicate index {idx}", lineno)
            entries[idx] = parse_rational(parts[1], lineno)
        if not entries:
            raise ParseError("empty series input")
        top = max(entries)
        missing = [i for i in range(top + 1) if i not in entries]
        if missing:
            raise ParseError(f"missing coefficient for index {missing[0]}")
        return cls(entries[i] for i in range(top + 1))


def constant_term_series(f, N):
    """phi(i) for i = 0..N, keeping the full expansion of each power of f."""
    if not isinstance(f, LaurentPoly):
        raise TypeError("constant_term_series expects a LaurentPoly")
    if N < 0:
        raise ValueError("series order must be nonnegative")
    origin = (0,) * f.dimension
    coeffs = [1]
    power = {origin: 1}
    for _ in range(N):
        power = multiply_term_maps(power, f._terms)
        coeffs.append(power.get(origin, 0))
    return PowerSeries(coeffs)


def constant_term_series_mitm(f, N):
    """Same output as constant_term_series via the split-power convolution.

    phi(a+b) = sum_m [f^a]_m [f^b]_{-m} with a = floor(i/2), so the largest
    expanded power is ceil(N/2).  This is the sanctioned fast path for deep
    prefixes; the plain routine is the oracle it is tested against.
    """
    if not isinstance(f, LaurentPoly):
        raise TypeError("constant_term_series_mitm expects a LaurentPoly")
    if N < 0:
        raise ValueError("series order must be nonnegative")
    origin = (0,) * f.dimension
    top = (N + 1) // 2
    powers = [{origin: 1}]
    for _ in range(top):
        powers.append(multiply_term_maps(powers[-1], f._terms))
    coeffs = []
    for i in range(N + 1):
        half = i // 2
        small, big = powers[half], powers[i - half]
        if len(small) > len(big):
            small, big = big, small
        total = 0
        for e, c in small.items():
            c2 = big.get(tuple(-x for x in e))
            if c2 is not None:
                total += c * c2
        coeffs.append(total)
    return PowerSeries(coeffs)


def substitute_monomial(f, matrix):
    """Relabel monomials by an integer change of variables, x^m -> x^(U m).

    U must be unimodular so the relabeling is a bijection of the monomial
    lattice; the constant-term series is then unchanged because U m = 0 only
    for m = 0.
    """
    n = f.dimension
    U = [tuple(int(x) for x in row) for row in matrix]
    if len(U) != n or any(len(row) != n for row in U):
        raise DimensionMismatch(f"matrix must be {n}x{n}")
    d = linalg.det(U)
    if d not in (1, -1):
        raise ValueError(f"matrix is not unimodular (det = {d})")
    terms = {}
    for exps, c in f._terms.items():
        e = tuple(sum(U[i][j] * exps[j] for j in range(n)) for i in range(n))
        terms[e] = c
    return LaurentPoly(n, terms)


def resize(f, scales):
    """Scale each variable, x_i -> alpha_i x_i, multiplying a_m by alpha^m.

    Monomial products that contribute to a constant term have exponent sum
    zero, so the scale factors cancel and Phi_f is unchanged.
    """
    n = f.dimension
    alphas = []
    for a in scales:
        a = normalize_rational(a)
        if a == 0:
            raise ValueError("scale factors must be nonzero")
        alphas.append(Fraction(a))
    if len(alphas) != n:
        raise DimensionMismatch(f"expected {n} scale factors, got {len(alphas)}")
    terms = {}
    for exps, c in f._terms.items():
        factor = Fraction(1)
        for a, e in zip(alphas, exps):
            factor *= a**e
        terms[exps] = c * factor
    return LaurentPoly(n, terms)


@dataclass(frozen=True)
class ClearingReport:
    """Result of clearing denominators of the pencil 1 - t f.

    `shift` is the componentwise monomial shift that clears all negative
    exponents; `cleared_degree` is the total degree of the cleared pencil,
    and `passes` says whether it equals dimension + 1 (degree 4 for n = 3,
    the anticanonical degree of projective space).
    """

    passes: bool
    cleared_degree: int
    shift: tuple


def quartic_compactification_check(f):
    """Clear poles of 1 - t f by the minimal monomial shift and grade the result.

    The shift d has d_i = max(0, -min exponent of x_i over the support); the
    cleared degree is the larger of |d| (from the shifted 1) and the maximal
    shifted total degree over the support.  Passing means the pencil closes
    up in projective space in degree n + 1.
    """
    if f.is_zero():
        raise ValueError("the zero polynomial has no clearing degree")
    n = f.dimension
    support = f.support()
    shift = tuple(max(0, -min(m[i] for m in support)) for i in range(n))
    shifted_max = max(sum(m[i] + shift[i] for i in range(n)) for m in support)
    cleared = max(sum(shift), shifted_max)
    return ClearingReport(cleared == n + 1, cleared, shift)
