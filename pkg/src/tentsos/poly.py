"""Exact sparse multivariate polynomial arithmetic over the rationals.

A polynomial in n variables is stored as a map from exponent tuples to
Fraction coefficients:

    x0^2 * x1 + 3/2   ->   {(2, 1): Fraction(1), (0, 0): Fraction(3, 2)}

Zero coefficients are never stored, so the zero polynomial has an empty
term map.  All arithmetic is exact; floating point enters only through
``evaluate`` and the numeric layers built on top of this module.

Monomials are ordered graded-lexicographically with the fixed variable
order x0 > x1 > ... (total degree first, then lexicographic within a
degree).  Every iteration over terms uses this order, which keeps all
downstream matrix assembly deterministic.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

Exponent = Tuple[int, ...]

NEG_INFINITY = float("-inf")


class DimensionMismatchError(ValueError):
    """Raised when polynomials or points with different variable counts meet."""


class ParseError(ValueError):
    """Raised on malformed polynomial text."""


def grlex_key(exponent: Exponent) -> tuple:
    """Sort key realizing graded lex order (ascending)."""
    return (sum(exponent), tuple(-e for e in exponent))


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


class Polynomial:
    """Immutable-by-convention sparse polynomial with Fraction coefficients.

    The variable count is fixed at construction and never changes; mixing
    polynomials with different ``num_vars`` raises DimensionMismatchError.
    """

    __slots__ = ("num_vars", "terms")

    def __init__(self, num_vars: int, terms: Mapping[Exponent, Fraction] | None = None):
        if num_vars < 1:
            raise ValueError("num_vars must be >= 1")
        self.num_vars = int(num_vars)
        clean: Dict[Exponent, Fraction] = {}
        if terms:
            for mono, coeff in terms.items():
                mono = tuple(int(e) for e in mono)
                if len(mono) != num_vars:
                    raise DimensionMismatchError(
                        f"monomial {mono} has length {len(mono)}, expected {num_vars}"
                    )
                if any(e < 0 for e in mono):
                    raise ValueError(f"negative exponent in monomial {mono}")
                c = _as_fraction(coeff)
                if c != 0:
                    clean[mono] = c
        self.terms = clean

    # ---- constructors -------------------------------------------------

    @staticmethod
    def zero(num_vars: int) -> "Polynomial":
        return Polynomial(num_vars, {})

    @staticmethod
    def constant(num_vars: int, value) -> "Polynomial":
        return Polynomial(num_vars, {(0,) * num_vars: _as_fraction(value)})

    @staticmethod
    def variable(num_vars: int, index: int) -> "Polynomial":
        if not 0 <= index < num_vars:
            raise ValueError(f"variable index {index} out of range for n={num_vars}")
        mono = tuple(1 if i == index else 0 for i in range(num_vars))
        return Polynomial(num_vars, {mono: Fraction(1)})

    @staticmethod
    def monomial(num_vars: int, exponents: Sequence[int], coeff=1) -> "Polynomial":
        return Polynomial(num_vars, {tuple(exponents): _as_fraction(coeff)})

    # ---- basic queries -------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> float:
        """Total degree; the zero polynomial has degree -infinity."""
        if not self.terms:
            return NEG_INFINITY
        return max(sum(m) for m in self.terms)

    def coefficient(self, exponents: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(exponents), Fraction(0))

    def max_abs_coeff(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        return max(abs(c) for c in self.terms.values())

    def sorted_terms(self) -> List[Tuple[Exponent, Fraction]]:
        """Terms in ascending graded lex order (deterministic)."""
        return sorted(self.terms.items(), key=lambda item: grlex_key(item[0]))

    def _check_same_vars(self, other: "Polynomial") -> None:
        if self.num_vars != other.num_vars:
            raise DimensionMismatchError(
                f"operand variable counts differ: {self.num_vars} vs {other.num_vars}"
            )

    # ---- ring operations -------------------------------------------------

    def __add__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.num_vars, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check_same_vars(other)
        out = dict(self.terms)
        for mono, coeff in other.terms.items():
            new = out.get(mono, Fraction(0)) + coeff
            if new == 0:
                out.pop(mono, None)
            else:
                out[mono] = new
        return Polynomial(self.num_vars, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.num_vars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.num_vars, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            c = _as_fraction(other)
            return Polynomial(self.num_vars, {m: c * v for m, v in self.terms.items()})
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check_same_vars(other)
        out: Dict[Exponent, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = tuple(a + b for a, b in zip(m1, m2))
                new = out.get(mono, Fraction(0)) + c1 * c2
                if new == 0:
                    out.pop(mono, None)
                else:
                    out[mono] = new
        return Polynomial(self.num_vars, out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Polynomial":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        result = Polynomial.constant(self.num_vars, 1)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.num_vars == other.num_vars and self.terms == other.terms

    __hash__ = None  # mutable dict inside; value semantics via __eq__ only

    # ---- calculus -------------------------------------------------

    def partial(self, index: int) -> "Polynomial":
        """Exact partial derivative with respect to variable ``index``."""
        if not 0 <= index < self.num_vars:
            raise ValueError(f"variable index {index} out of range")
        out: Dict[Exponent, Fraction] = {}
        for mono, coeff in self.terms.items():
            e = mono[index]
            if e == 0:
                continue
            new_mono = mono[:index] + (e - 1,) + mono[index + 1:]
            out[new_mono] = out.get(new_mono, Fraction(0)) + coeff * e
        return Polynomial(self.num_vars, out)

    def gradient(self) -> List["Polynomial"]:
        return [self.partial(i) for i in range(self.num_vars)]

    # ---- evaluation -------------------------------------------------

    def evaluate(self, point: Sequence[float]) -> float:
        """Floating-point value at ``point`` (term-by-term accumulation)."""
        if len(point) != self.num_vars:
            raise DimensionMismatchError(
                f"point has {len(point)} coordinates, expected {self.num_vars}"
            )
        total = 0.0
        for mono, coeff in self.terms.items():
            term = float(coeff)
            for x, e in zip(point, mono):
                if e:
                    term *= float(x) ** e
            total += term
        return total

    def evaluate_exact(self, point: Sequence[Fraction]) -> Fraction:
        """Exact rational value at a rational point."""
        if len(point) != self.num_vars:
            raise DimensionMismatchError(
                f"point has {len(point)} coordinates, expected {self.num_vars}"
            )
        total = Fraction(0)
        for mono, coeff in self.terms.items():
            term = coeff
            for x, e in zip(point, mono):
                if e:
                    term *= _as_fraction(x) ** e
            total += term
        return total

    # ---- structure -------------------------------------------------

    def homogeneous_parts(self) -> Dict[int, "Polynomial"]:
        """Split into homogeneous components, keyed by degree."""
        buckets: Dict[int, Dict[Exponent, Fraction]] = {}
        for mono, coeff in self.terms.items():
            buckets.setdefault(sum(mono), {})[mono] = coeff
        return {d: Polynomial(self.num_vars, t) for d, t in sorted(buckets.items())}

    def leading_form(self) -> "Polynomial":
        """Highest-degree homogeneous part; undefined for the zero polynomial."""
        if not self.terms:
            raise ValueError("the zero polynomial has no leading form")
        d = self.degree()
        return Polynomial(
            self.num_vars,
            {m: c for m, c in self.terms.items() if sum(m) == d},
        )

    # ---- printing -------------------------------------------------

    def to_text(self, var_names: Sequence[str] | None = None) -> str:
        """Render in the shared text format, highest-degree terms first."""
        if self.is_zero():
            return "0"
        names = list(var_names) if var_names else default_var_names(self.num_vars)
        if len(names) != self.num_vars:
            raise DimensionMismatchError("variable name count mismatch")
        pieces: List[str] = []
        for mono, coeff in sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True):
            factors = []
            for name, e in zip(names, mono):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            mag = abs(coeff)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = str(mag) + "*" + "*".join(factors)
            if not pieces:
                pieces.append(body if coeff > 0 else "-" + body)
            else:
                pieces.append(("+ " if coeff > 0 else "- ") + body)
        return " ".join(pieces)

    def __repr__(self) -> str:
        return f"Polynomial({self.num_vars}, {self.to_text()!r})"


def default_var_names(num_vars: int) -> List[str]:
    return [f"x{i + 1}" for i in range(num_vars)]


# ---- derived constructions ----------------------------------------------


def norm_sq_x(num_vars: int) -> Polynomial:
    """The squared euclidean norm x1^2 + ... + xn^2 as a polynomial."""
    if num_vars < 1:
        raise ValueError("num_vars must be >= 1")
    terms: Dict[Exponent, Fraction] = {}
    for i in range(num_vars):
        mono = tuple(2 if j == i else 0 for j in range(num_vars))
        terms[mono] = Fraction(1)
    return Polynomial(num_vars, terms)


def grad_norm_sq(f: Polynomial) -> Polynomial:
    """Sum of squared partial derivatives of ``f``."""
    out = Polynomial.zero(f.num_vars)
    for p in f.gradient():
        out = out + p * p
    return out


# ---- text format ----------------------------------------------------------
#
# Shared grammar (whitespace-insensitive):
#   expr   := term (('+'|'-') term)*
#   term   := sign* factor (('*'|'/') factor)*
#   factor := atom ('^' INT)?          ('**' also accepted)
#   atom   := NUMBER | NAME | '(' expr ')'
# NUMBER is an integer or decimal literal; decimals parse as exact rationals
# (0.5 -> 1/2).  '/' is rational division and requires a nonzero constant
# divisor.  Variables default to x1..xn in order of first appearance.


_TOKEN_OPS = ("**", "+", "-", "*", "/", "^", "(", ")")


def _tokenize(text: str) -> List[str]:
    tokens: List[str] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if text.startswith("**", i):
            tokens.append("^")
            i += 2
            continue
        if ch in "+-*/^()":
            tokens.append(ch)
            i += 1
            continue
        if ch.isdigit() or ch == ".":
            j = i
            seen_dot = False
            while j < n and (text[j].isdigit() or (text[j] == "." and not seen_dot)):
                seen_dot = seen_dot or text[j] == "."
                j += 1
            tokens.append(text[i:j])
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(text[i:j])
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r} at position {i}")
    return tokens


def _is_number(token: str) -> bool:
    return bool(token) and (token[0].isdigit() or token[0] == ".")


def _is_name(token: str) -> bool:
    return bool(token) and (token[0].isalpha() or token[0] == "_")


class _Parser:
    def __init__(self, tokens: List[str], names: List[str]):
        self.tokens = tokens
        self.pos = 0
        self.names = names
        self.n = len(names)
        self.index = {name: i for i, name in enumerate(names)}

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input")
        self.pos += 1
        return tok

    def parse_expr(self) -> Polynomial:
        # leading sign belongs to the first term
        result = self.parse_term()
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.parse_term()
            result = result + rhs if op == "+" else result - rhs
        return result

    def parse_term(self) -> Polynomial:
        sign = 1
        while self.peek() in ("+", "-"):
            if self.take() == "-":
                sign = -sign
        result = self.parse_factor()
        while self.peek() in ("*", "/"):
            op = self.take()
            rhs = self.parse_factor()
            if op == "*":
                result = result * rhs
            else:
                if rhs.degree() > 0 or rhs.is_zero():
                    raise ParseError("division is only defined by nonzero constants")
                result = result * (1 / rhs.coefficient((0,) * self.n))
        return result * sign if sign < 0 else result

    def parse_factor(self) -> Polynomial:
        base = self.parse_atom()
        if self.peek() == "^":
            self.take()
            tok = self.take()
            neg = False
            if tok == "-":
                neg = True
                tok = self.take()
            if not _is_number(tok) or "." in tok:
                raise ParseError(f"exponent must be an integer, got {tok!r}")
            if neg:
                raise ParseError("negative exponents are not polynomials")
            base = base ** int(tok)
        return base

    def parse_atom(self) -> Polynomial:
        tok = self.take()
        if tok == "(":
            inner = self.parse_expr()
            if self.take() != ")":
                raise ParseError("unbalanced parentheses")
            return inner
        if _is_number(tok):
            return Polynomial.constant(self.n, Fraction(tok))
        if _is_name(tok):
            if tok not in self.index:
                raise ParseError(f"unknown variable {tok!r}")
            return Polynomial.variable(self.n, self.index[tok])
        raise ParseError(f"unexpected token {tok!r}")


def parse_polynomial(
    text: str, var_names: Sequence[str] | None = None
) -> Tuple[Polynomial, List[str]]:
    """Parse the shared text format.

    Returns the polynomial together with the variable name list.  Without an
    explicit ``var_names``, variables are collected in order of first
    appearance in the expression; a constant expression gets the single
    placeholder variable x1.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty polynomial text")
    if var_names is None:
        names: List[str] = []
        for tok in tokens:
            if _is_name(tok) and tok not in names:
                names.append(tok)
        if not names:
            names = ["x1"]
    else:
        names = list(var_names)
        if len(set(names)) != len(names):
            raise ParseError("duplicate variable names")
    parser = _Parser(tokens, names)
    poly = parser.parse_expr()
    if parser.peek() is not None:
        raise ParseError(f"trailing input at token {parser.peek()!r}")
    return poly, names
