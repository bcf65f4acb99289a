"""Sparse multivariate polynomials over Q(i).

A :class:`Polynomial` is an immutable map from exponent tuples to nonzero
:class:`~framecert.exact_arith.GaussRational` coefficients, tied to a
:class:`VariableTable`.  Term orders are described by :class:`TermOrder`,
which also exposes an integer weight matrix used by the Groebner kernels.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Mapping, Sequence

from .exact_arith import ONE, ZERO, GaussRational, as_gauss, format_rational

Monomial = tuple

__all__ = [
    "Monomial",
    "Polynomial",
    "PolynomialError",
    "TermOrder",
    "VariableTable",
    "integer_primitive_part",
    "is_homogeneous",
    "leading_term",
    "poly_arith",
    "substitute",
]

MAX_EXPONENT = (1 << 15) - 1


class PolynomialError(ValueError):
    pass


class VariableTable:
    """Ordered, duplicate-free tuple of variable names."""

    __slots__ = ("names", "_index")

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise PolynomialError(f"duplicate variable names in {names}")
        for name in names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name):
                raise PolynomialError(f"bad variable name {name!r}")
        self.names = names
        self._index = {n: k for k, n in enumerate(names)}

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __contains__(self, name):
        return name in self._index

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise PolynomialError(f"unknown variable {name!r}") from None

    def __eq__(self, other):
        return isinstance(other, VariableTable) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"VariableTable({list(self.names)!r})"

    # convenience constructors
    def var(self, name: str) -> "Polynomial":
        exp = [0] * len(self.names)
        exp[self.index(name)] = 1
        return Polynomial(self, {tuple(exp): ONE})

    def gens(self) -> list["Polynomial"]:
        return [self.var(n) for n in self.names]

    def const(self, c) -> "Polynomial":
        c = as_gauss(c)
        if not c:
            return Polynomial(self, {})
        return Polynomial(self, {(0,) * len(self.names): c})

    def zero_monomial(self) -> tuple:
        return (0,) * len(self.names)


# ---------------------------------------------------------------------------
# term orders


@dataclass(frozen=True)
class TermOrder:
    """``lex``, ``grevlex`` or ``block``.

    A block order compares the exponents of the ``elim`` variables under
    ``inner`` first and breaks ties on the remaining variables with
    ``outer``.  Variables inside each block keep their table order.
    """

    kind: str = "grevlex"
    elim: tuple = ()
    inner: str = "grevlex"
    outer: str = "grevlex"

    def __post_init__(self):
        if self.kind not in ("lex", "grevlex", "block"):
            raise PolynomialError(f"unknown term order {self.kind!r}")
        if self.kind == "block":
            if self.inner not in ("lex", "grevlex") or self.outer not in ("lex", "grevlex"):
                raise PolynomialError("block orders nest lex or grevlex only")
            object.__setattr__(self, "elim", tuple(self.elim))

    @classmethod
    def lex(cls) -> "TermOrder":
        return cls("lex")

    @classmethod
    def grevlex(cls) -> "TermOrder":
        return cls("grevlex")

    @classmethod
    def block(cls, elim: Iterable[str], inner="grevlex", outer="grevlex") -> "TermOrder":
        return cls("block", tuple(elim), inner, outer)

    def __str__(self):
        if self.kind == "block":
            return f"block({','.join(self.elim)};{self.inner};{self.outer})"
        return self.kind

    def weight_matrix(self, table: VariableTable) -> list[list[int]]:
        """Nonnegative integer rows ``W`` with ``a < b`` iff ``W a <lex W b``."""
        n = len(table)
        if self.kind == "lex":
            return _lex_rows(list(range(n)), n)
        if self.kind == "grevlex":
            return _grevlex_rows(list(range(n)), n)
        elim_idx = sorted(table.index(v) for v in self.elim)
        rest_idx = [k for k in range(n) if k not in set(elim_idx)]
        rows = []
        for idx, kind in ((elim_idx, self.inner), (rest_idx, self.outer)):
            if idx:
                rows += _lex_rows(idx, n) if kind == "lex" else _grevlex_rows(idx, n)
        return rows

    def sort_key(self, table: VariableTable):
        rows = self.weight_matrix(table)

        def key(exp):
            return tuple(sum(w * e for w, e in zip(row, exp) if w) for row in rows)

        return key


def _lex_rows(idx: list[int], n: int) -> list[list[int]]:
    rows = []
    for k in idx:
        row = [0] * n
        row[k] = 1
        rows.append(row)
    return rows


def _grevlex_rows(idx: list[int], n: int) -> list[list[int]]:
    # total degree, then prefix sums dropping the last variable each time:
    # a smaller exponent on the last variable means a larger monomial.
    rows = []
    for cut in range(len(idx), 1, -1):
        row = [0] * n
        for k in idx[:cut]:
            row[k] = 1
        rows.append(row)
    if idx:
        row = [0] * n
        row[idx[0]] = 1
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# polynomials


class Polynomial:
    """Immutable sparse polynomial with Gaussian-rational coefficients."""

    __slots__ = ("table", "terms", "_hash")

    def __init__(self, table: VariableTable, terms: Mapping[tuple, GaussRational] | None = None, *, _trusted=False):
        object.__setattr__(self, "table", table)
        if _trusted:
            object.__setattr__(self, "terms", terms)
        else:
            n = len(table)
            clean = {}
            for exp, c in (terms or {}).items():
                exp = tuple(int(e) for e in exp)
                if len(exp) != n:
                    raise PolynomialError(f"exponent vector {exp} does not match {n} variables")
                if any(e < 0 or e > MAX_EXPONENT for e in exp):
                    raise PolynomialError(f"exponent out of range in {exp}")
                c = as_gauss(c)
                if c:
                    clean[exp] = clean.get(exp, ZERO) + c
                    if not clean[exp]:
                        del clean[exp]
            object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    def __reduce__(self):
        return (_rebuild_polynomial, (self.table, self.terms))

    # -- basic queries ---------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self) -> GaussRational:
        return self.terms.get(self.table.zero_monomial(), ZERO)

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, name: str) -> int:
        k = self.table.index(name)
        return max((e[k] for e in self.terms), default=-1)

    def variables(self) -> set[str]:
        used = set()
        for exp in self.terms:
            for k, e in enumerate(exp):
                if e:
                    used.add(self.table.names[k])
        return used

    def is_real(self) -> bool:
        return all(c.is_real() for c in self.terms.values())

    def coefficient(self, exp) -> GaussRational:
        return self.terms.get(tuple(exp), ZERO)

    def sorted_terms(self, order: TermOrder | None = None):
        """Terms in decreasing order (grevlex by default)."""
        key = (order or TermOrder.grevlex()).sort_key(self.table)
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    # -- arithmetic ------------------------------------------------------
    def _check(self, other: "Polynomial"):
        if self.table != other.table:
            raise PolynomialError("polynomials live over different variable tables")

    def _lift(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return self.table.const(other)

    def __add__(self, other):
        other = self._lift(other)
        terms = dict(self.terms)
        for exp, c in other.terms.items():
            s = terms.get(exp)
            if s is None:
                terms[exp] = c
            else:
                s = s + c
                if s:
                    terms[exp] = s
                else:
                    del terms[exp]
        return Polynomial(self.table, terms, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.table, {e: -c for e, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = as_gauss(other)
            if not c:
                return Polynomial(self.table, {}, _trusted=True)
            return Polynomial(self.table, {e: v * c for e, v in self.terms.items()}, _trusted=True)
        self._check(other)
        if len(self.terms) < len(other.terms):
            a, b = self.terms, other.terms
        else:
            a, b = other.terms, self.terms
        out: dict = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                s = out.get(e)
                out[e] = ca * cb if s is None else s + ca * cb
        out = {e: c for e, c in out.items() if c}
        if any(x > MAX_EXPONENT for e in out for x in e):
            raise OverflowError("exponent overflow in polynomial product")
        return Polynomial(self.table, out, _trusted=True)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = as_gauss(other)
        return self * (ONE / c)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise PolynomialError("polynomial powers need a nonnegative integer")
        result = self.table.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def mul_term(self, exp, coeff) -> "Polynomial":
        coeff = as_gauss(coeff)
        if not coeff:
            return Polynomial(self.table, {}, _trusted=True)
        return Polynomial(
            self.table,
            {tuple(x + y for x, y in zip(e, exp)): c * coeff for e, c in self.terms.items()},
            _trusted=True,
        )

    def conj_coeffs(self) -> "Polynomial":
        return Polynomial(self.table, {e: c.conj() for e, c in self.terms.items()}, _trusted=True)

    def real_part(self) -> "Polynomial":
        return Polynomial(
            self.table, {e: GaussRational(c.re) for e, c in self.terms.items() if c.re}, _trusted=True
        )

    def imag_part(self) -> "Polynomial":
        return Polynomial(
            self.table, {e: GaussRational(c.im) for e, c in self.terms.items() if c.im}, _trusted=True
        )

    # -- comparison ------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.table == other.table and self.terms == other.terms
        try:
            return self == self.table.const(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.table, frozenset(self.terms.items()))))
        return self._hash

    # -- evaluation ------------------------------------------------------
    def evaluate(self, point: Mapping[str, object] | Sequence):
        """Evaluate at numbers (exact or floating); missing names raise."""
        if isinstance(point, Mapping):
            values = [point[n] for n in self.table.names]
        else:
            values = list(point)
        total = 0
        for exp, c in self.terms.items():
            term = _coeff_value(c, values[0] if values else 0)
            for v, e in zip(values, exp):
                if e:
                    term = term * v**e
            total = total + term
        return total

    def substitute(self, bindings: Mapping[str, "Polynomial"]) -> "Polynomial":
        return substitute(self, bindings)

    def change_table(self, table: VariableTable) -> "Polynomial":
        """Re-express over another table containing all used variables."""
        used = self.variables()
        for name in used:
            table.index(name)
        pos = [table.index(n) if n in table else None for n in self.table.names]
        n = len(table)
        out = {}
        for exp, c in self.terms.items():
            new = [0] * n
            for k, e in enumerate(exp):
                if e:
                    new[pos[k]] = e
            out[tuple(new)] = c
        return Polynomial(table, out, _trusted=True)

    # -- text / JSON -----------------------------------------------------
    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"Polynomial({self.to_str()!r})"

    def to_str(self, order: TermOrder | None = None) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exp, c in self.sorted_terms(order):
            mono = "*".join(
                name if e == 1 else f"{name}^{e}" for name, e in zip(self.table.names, exp) if e
            )
            if c.is_real():
                sign = "-" if c.re < 0 else "+"
                mag = abs(c.re)
                coeff = "" if (mag == 1 and mono) else format_rational(mag)
            else:
                sign = "+"
                coeff = f"({c})"
            body = f"{coeff}*{mono}" if coeff and mono else (coeff or mono)
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    @classmethod
    def parse(cls, text: str, table: VariableTable) -> "Polynomial":
        return _Parser(text, table).parse()

    def to_json(self, order: TermOrder | None = None) -> list:
        return [[list(exp), c.to_pair()] for exp, c in self.sorted_terms(order)]

    @classmethod
    def from_json(cls, data, table: VariableTable) -> "Polynomial":
        if not isinstance(data, list):
            raise PolynomialError("polynomial JSON must be a list of [exponents, [re, im]] terms")
        terms = {}
        for k, item in enumerate(data):
            try:
                exp, coeff = item
                exp = tuple(int(e) for e in exp)
                c = GaussRational.from_pair(coeff)
            except (TypeError, ValueError) as exc:
                raise PolynomialError(f"bad polynomial term #{k}: {item!r}") from exc
            if exp in terms:
                raise PolynomialError(f"duplicate monomial {exp} in polynomial JSON")
            terms[exp] = c
        return cls(table, terms)


def _coeff_value(c: GaussRational, sample):
    if c.is_real():
        value = c.re
    else:
        value = None
    # exact inputs stay exact; floating inputs get floating coefficients
    if isinstance(sample, (int, Fraction, GaussRational)):
        return value if value is not None else c
    try:
        import mpmath

        if isinstance(sample, (mpmath.mpf, mpmath.mpc)):
            if value is not None:
                return mpmath.mpf(value.numerator) / value.denominator
            return mpmath.mpc(
                mpmath.mpf(c.re.numerator) / c.re.denominator,
                mpmath.mpf(c.im.numerator) / c.im.denominator,
            )
    except ImportError:  # pragma: no cover
        pass
    return float(value) if value is not None else complex(c)


# ---------------------------------------------------------------------------
# parsing


class _Parser:
    _token = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")

    def __init__(self, text: str, table: VariableTable):
        self.table = table
        self.tokens = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = self._token.match(text, pos)
            if not m:
                raise PolynomialError(f"cannot parse polynomial at column {pos + 1}: {text[pos:pos + 10]!r}")
            num, name, op = m.groups()
            if num:
                self.tokens.append(("num", Fraction(num)))
            elif name:
                self.tokens.append(("name", name))
            else:
                self.tokens.append(("op", "^" if op == "**" else op))
            pos = m.end()
        self.k = 0

    def peek(self):
        return self.tokens[self.k] if self.k < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.k += 1
        return tok

    def parse(self) -> Polynomial:
        if not self.tokens:
            raise PolynomialError("empty polynomial")
        p = self.expr()
        if self.k != len(self.tokens):
            raise PolynomialError(f"unexpected token {self.peek()[1]!r}")
        return p

    def expr(self):
        sign = 1
        if self.peek() == ("op", "-"):
            self.take()
            sign = -1
        elif self.peek() == ("op", "+"):
            self.take()
        acc = self.term() * sign
        while self.peek() in (("op", "+"), ("op", "-")):
            _, op = self.take()
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self):
        acc = self.factor()
        while self.peek() in (("op", "*"), ("op", "/")):
            _, op = self.take()
            f = self.factor()
            if op == "*":
                acc = acc * f
            else:
                if not f.is_constant() or f.is_zero():
                    raise PolynomialError("division only by nonzero constants")
                acc = acc / f.constant_value()
        return acc

    def factor(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num" or val.denominator != 1:
                raise PolynomialError("exponent must be a nonnegative integer")
            base = base ** int(val)
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return self.table.const(val)
        if kind == "name":
            if val == "i" and "i" not in self.table:
                return self.table.const(GaussRational(0, 1))
            return self.table.var(val)
        if (kind, val) == ("op", "("):
            p = self.expr()
            if self.take() != ("op", ")"):
                raise PolynomialError("missing ')'")
            return p
        if (kind, val) == ("op", "-"):
            return -self.factor()
        raise PolynomialError(f"unexpected token {val!r}")


# ---------------------------------------------------------------------------
# module-level operations


def _rebuild_polynomial(table, terms):
    return Polynomial(table, terms, _trusted=True)


def poly_arith(p: Polynomial, q: Polynomial, op: str) -> Polynomial:
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise PolynomialError(f"unknown operation {op!r}")


def substitute(p: Polynomial, bindings: Mapping[str, Polynomial]) -> Polynomial:
    """Simultaneously replace variables by polynomials over the same table."""
    table = p.table
    idx = []
    for name, value in bindings.items():
        if not isinstance(value, Polynomial):
            value = table.const(value)
        elif value.table != table:
            raise PolynomialError("binding lives over a different variable table")
        idx.append((table.index(name), value))
    if not idx:
        return p
    targets = {k: v for k, v in idx}
    powers: dict = {}

    def power(k, e):
        key = (k, e)
        if key not in powers:
            powers[key] = targets[k] ** e
        return powers[key]

    out = Polynomial(table, {}, _trusted=True)
    groups: dict = {}
    for exp, c in p.terms.items():
        kept = tuple(0 if k in targets else e for k, e in enumerate(exp))
        subs = tuple((k, exp[k]) for k in targets if exp[k])
        groups.setdefault(subs, {})[kept] = c
    for subs, part in groups.items():
        acc = Polynomial(table, part, _trusted=True)
        for k, e in subs:
            acc = acc * power(k, e)
        out = out + acc
    return out


def leading_term(p: Polynomial, order: TermOrder) -> tuple[tuple, GaussRational]:
    if p.is_zero():
        raise PolynomialError("the zero polynomial has no leading term")
    key = order.sort_key(p.table)
    exp = max(p.terms, key=key)
    return exp, p.terms[exp]


def is_homogeneous(p: Polynomial) -> tuple[bool, int]:
    """``(True, d)`` when every term has total degree ``d``; zero counts as degree -1."""
    degrees = {sum(e) for e in p.terms}
    if not degrees:
        return True, -1
    if len(degrees) == 1:
        return True, degrees.pop()
    return False, max(degrees)


def integer_primitive_part(p: Polynomial) -> Polynomial:
    """Scale a real polynomial to coprime integer coefficients, lex-leading coefficient positive."""
    if not p.is_real():
        raise PolynomialError("integer_primitive_part needs real coefficients")
    if p.is_zero():
        return p
    dens = [c.re.denominator for c in p.terms.values()]
    lcm = reduce(lambda a, b: a * b // gcd(a, b), dens, 1)
    ints = {e: (c.re * lcm).numerator for e, c in p.terms.items()}
    content = reduce(gcd, ints.values(), 0)
    lead = max(ints)  # tuple comparison is lex with the table order
    if ints[lead] < 0:
        content = -content
    return Polynomial(p.table, {e: GaussRational(v // content) for e, v in ints.items()}, _trusted=True)
