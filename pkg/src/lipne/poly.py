"""Sparse multivariate polynomials over the Gaussian rationals Q(i).

Coefficients are sympy ``QQ_I`` elements (exact, lowest terms).  Ring
arithmetic, homogeneous parts and derivatives are implemented here
directly on the sparse term map; gcd, resultants and squarefree
decomposition are delegated to sympy's sparse polynomial rings.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from numbers import Integral, Rational
from typing import Iterable, Mapping, Sequence

import mpmath
import sympy
from sympy import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix
from sympy.polys.rings import ring as _sympy_ring

from .errors import DomainError, StructuralError

Scalar = QQ_I.dtype
ZERO = QQ_I.zero
ONE = QQ_I.one
I_UNIT = QQ_I(0, 1)


def to_scalar(value) -> Scalar:
    """Coerce ints, Fractions, ``(re, im)`` pairs, exact complex values or strings to QQ_I."""
    if isinstance(value, Scalar):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, Integral):
        return QQ_I(int(value), 0)
    if isinstance(value, (Rational, Fraction)):
        return QQ_I(QQ(int(value.numerator), int(value.denominator)), 0)
    if isinstance(value, tuple) and len(value) == 2:
        re, im = (_to_q(v) for v in value)
        return QQ_I(re, im)
    if isinstance(value, str):
        from .parser import parse_polynomial

        p = parse_polynomial(value, variables=())
        return p.constant_coefficient()
    if isinstance(value, complex):
        re, im = Fraction(value.real), Fraction(value.imag)
        if re.denominator > 2**20 or im.denominator > 2**20:
            raise DomainError(f"{value!r} is not an exactly representable Gaussian rational")
        return QQ_I(_to_q(re), _to_q(im))
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return QQ_I(QQ(int(value.numerator), int(value.denominator)), 0)
    raise TypeError(f"cannot convert {value!r} to a Gaussian rational")


def _to_q(v):
    if isinstance(v, str):
        v = Fraction(v)
    if isinstance(v, float):
        v = Fraction(v)
    if isinstance(v, Integral):
        return QQ(int(v))
    return QQ(int(v.numerator), int(v.denominator))


def _q_str(q) -> str:
    num, den = int(q.numerator), int(q.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


def format_scalar(c: Scalar) -> str:
    """Render as ``p/q``, ``p/q*i`` or ``(a+b*i)``; parseable by :mod:`lipne.parser`."""
    re, im = c.x, c.y
    if im == 0:
        return _q_str(re)
    if re == 0:
        if im == 1:
            return "i"
        if im == -1:
            return "-i"
        return f"{_q_str(im)}*i"
    sign = "+" if im > 0 else "-"
    mag = abs(im)
    imag = "i" if mag == 1 else f"{_q_str(mag)}*i"
    return f"({_q_str(re)}{sign}{imag})"


def scalar_to_mpc(c: Scalar) -> mpmath.mpc:
    re = mpmath.mpf(int(c.x.numerator)) / int(c.x.denominator)
    im = mpmath.mpf(int(c.y.numerator)) / int(c.y.denominator)
    return mpmath.mpc(re, im)


def scalar_to_complex(c: Scalar) -> complex:
    return complex(float(Fraction(int(c.x.numerator), int(c.x.denominator))),
                   float(Fraction(int(c.y.numerator), int(c.y.denominator))))


def scalar_to_pair(c: Scalar) -> list[str]:
    return [_q_str(c.x), _q_str(c.y)]


def scalar_from_pair(pair: Sequence[str]) -> Scalar:
    return QQ_I(_to_q(Fraction(pair[0])), _to_q(Fraction(pair[1])))


def grlex_key(exps: tuple[int, ...]) -> tuple:
    return (sum(exps), exps)


@lru_cache(maxsize=256)
def _ring(variables: tuple[str, ...]):
    symbols = [sympy.Symbol(v) for v in variables]
    R, *_ = _sympy_ring(symbols, QQ_I)
    return R


class Polynomial:
    """Immutable sparse polynomial.

    ``terms`` maps exponent tuples (one entry per variable) to nonzero
    Gaussian-rational coefficients.
    """

    __slots__ = ("variables", "terms", "_hash")

    def __init__(self, variables: Iterable[str], terms: Mapping | None = None):
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise StructuralError(f"duplicate variable names in {self.variables}")
        n = len(self.variables)
        clean: dict[tuple[int, ...], Scalar] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n:
                raise StructuralError(f"exponent vector {exps} does not match {n} variables")
            if any(e < 0 for e in exps):
                raise StructuralError(f"negative exponent in {exps}")
            c = to_scalar(c)
            if c:
                clean[exps] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, variables: tuple[str, ...], terms: dict) -> "Polynomial":
        obj = cls.__new__(cls)
        obj.variables = variables
        obj.terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, variables: Iterable[str]) -> "Polynomial":
        return cls._raw(tuple(variables), {})

    @classmethod
    def constant(cls, value, variables: Iterable[str]) -> "Polynomial":
        variables = tuple(variables)
        return cls(variables, {(0,) * len(variables): value})

    @classmethod
    def variable(cls, name: str, variables: Iterable[str]) -> "Polynomial":
        variables = tuple(variables)
        if name not in variables:
            raise StructuralError(f"unknown variable {name!r}")
        exps = tuple(1 if v == name else 0 for v in variables)
        return cls._raw(variables, {exps: ONE})

    @classmethod
    def from_sympy(cls, p, variables: Sequence[str]) -> "Polynomial":
        return cls._raw(tuple(variables), {tuple(k): v for k, v in p.items() if v})

    def to_sympy(self):
        return _ring(self.variables).from_dict(dict(self.terms))

    # -- basic structure -------------------------------------------------

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def __bool__(self) -> bool:
        return bool(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_coefficient(self) -> Scalar:
        return self.terms.get((0,) * self.nvars, ZERO)

    def coefficient(self, exps: Sequence[int]) -> Scalar:
        return self.terms.get(tuple(exps), ZERO)

    @property
    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def index(self, var: str | int) -> int:
        if isinstance(var, int):
            if not 0 <= var < self.nvars:
                raise StructuralError(f"variable index {var} out of range")
            return var
        try:
            return self.variables.index(var)
        except ValueError:
            raise StructuralError(f"unknown variable {var!r}; have {self.variables}") from None

    def degree(self, var: str | int) -> int:
        k = self.index(var)
        if not self.terms:
            return -1
        return max(e[k] for e in self.terms)

    def leading_term(self) -> tuple[tuple[int, ...], Scalar]:
        if not self.terms:
            raise DomainError("zero polynomial has no leading term")
        e = max(self.terms, key=grlex_key)
        return e, self.terms[e]

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def _check_same(self, other: "Polynomial") -> None:
        if self.variables != other.variables:
            raise StructuralError(
                f"variable lists differ: {self.variables} vs {other.variables}")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check_same(other)
            return other
        return Polynomial.constant(other, self.variables)

    # -- ring arithmetic -------------------------------------------------

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, ZERO) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Polynomial._raw(self.variables, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            return self.scale(to_scalar(other))
        self._check_same(other)
        out: dict[tuple[int, ...], Scalar] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, ZERO) + c1 * c2
        return Polynomial._raw(self.variables, {e: c for e, c in out.items() if c})

    def __rmul__(self, other) -> "Polynomial":
        return self.scale(to_scalar(other))

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise DomainError("negative powers are not polynomials")
        result = Polynomial.constant(1, self.variables)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, c) -> "Polynomial":
        c = to_scalar(c)
        if not c:
            return Polynomial.zero(self.variables)
        return Polynomial._raw(self.variables, {e: c * v for e, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            try:
                other = Polynomial.constant(other, self.variables)
            except TypeError:
                return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.variables, frozenset(self.terms.items())))
        return self._hash

    # -- homogeneous structure -------------------------------------------

    def homogeneous_part(self, m: int) -> "Polynomial":
        if m < 0:
            raise DomainError("degree must be non-negative")
        return Polynomial._raw(self.variables,
                               {e: c for e, c in self.terms.items() if sum(e) == m})

    def order_at_origin(self) -> int:
        """Lowest total degree carrying a nonzero term."""
        if not self.terms:
            raise DomainError("the zero polynomial has no order")
        return min(sum(e) for e in self.terms)

    def initial_form(self) -> "Polynomial":
        return self.homogeneous_part(self.order_at_origin())

    def diff(self, var: str | int) -> "Polynomial":
        k = self.index(var)
        out = {}
        for e, c in self.terms.items():
            if e[k]:
                e2 = e[:k] + (e[k] - 1,) + e[k + 1:]
                out[e2] = c * e[k]
        return Polynomial._raw(self.variables, out)

    def gradient_at_origin(self) -> list[Scalar]:
        return [self.terms.get(tuple(1 if j == k else 0 for j in range(self.nvars)), ZERO)
                for k in range(self.nvars)]

    # -- evaluation ------------------------------------------------------

    def evaluate(self, point: Sequence) -> Scalar:
        """Exact evaluation at a point of Q(i)^n."""
        if len(point) != self.nvars:
            raise StructuralError(f"point has {len(point)} coordinates, expected {self.nvars}")
        pt = [to_scalar(v) for v in point]
        total = ZERO
        for e, c in self.terms.items():
            t = c
            for v, k in zip(pt, e):
                if k:
                    t = t * v**k
            total += t
        return total

    def evaluate_numeric(self, point: Sequence) -> mpmath.mpc:
        total = mpmath.mpc(0)
        for e, c in self.terms.items():
            t = scalar_to_mpc(c)
            for v, k in zip(point, e):
                if k:
                    t *= v**k
            total += t
        return total

    def substitute(self, forms: Sequence["Polynomial"], variables: Sequence[str] | None = None
                   ) -> "Polynomial":
        """Replace variable ``k`` by ``forms[k]``; all forms share one variable list."""
        if len(forms) != self.nvars:
            raise StructuralError(f"need {self.nvars} substitution forms, got {len(forms)}")
        if variables is None:
            variables = forms[0].variables if forms else ()
        variables = tuple(variables)
        for form in forms:
            if form.variables != variables:
                raise StructuralError("substitution forms must share a variable list")
        cache: dict[tuple[int, int], Polynomial] = {}

        def power(k: int, m: int) -> Polynomial:
            key = (k, m)
            if key not in cache:
                cache[key] = forms[k] ** m
            return cache[key]

        out = Polynomial.zero(variables)
        one = Polynomial.constant(1, variables)
        for e, c in self.terms.items():
            t = one.scale(c)
            for k, m in enumerate(e):
                if m:
                    t = t * power(k, m)
            out = out + t
        return out

    def rename(self, variables: Sequence[str]) -> "Polynomial":
        variables = tuple(variables)
        if len(variables) != self.nvars:
            raise StructuralError("rename must keep the variable count")
        return Polynomial(variables, self.terms)

    def monic(self) -> "Polynomial":
        """Scale so the graded-lex leading coefficient is 1 (zero stays zero)."""
        if not self.terms:
            return self
        _, lc = self.leading_term()
        return self.scale(ONE / lc)

    def is_associate(self, other: "Polynomial") -> bool:
        self._check_same(other)
        return self.monic() == other.monic()

    # -- rendering -------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for e in sorted(self.terms, key=grlex_key, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.variables, e) if k)
            neg = (c.y == 0 and c.x < 0) or (c.x == 0 and c.y < 0)
            mag = -c if neg else c
            if not mono:
                body = format_scalar(mag)
            elif mag == ONE:
                body = mono
            else:
                body = f"{format_scalar(mag)}*{mono}"
            if not pieces:
                pieces.append(("-" if neg else "") + body)
            else:
                pieces.append((" - " if neg else " + ") + body)
        return "".join(pieces)

    def __repr__(self) -> str:
        return f"Polynomial({list(self.variables)!r}, {str(self)!r})"


def _check_pair(f: Polynomial, g: Polynomial) -> None:
    if not isinstance(f, Polynomial) or not isinstance(g, Polynomial):
        raise StructuralError("expected Polynomial operands")
    f._check_same(g)


def arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    _check_pair(a, b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise StructuralError(f"unknown operation {op!r}")


def order_at_origin(f: Polynomial) -> int:
    return f.order_at_origin()


def homogeneous_part(f: Polynomial, m: int) -> Polynomial:
    return f.homogeneous_part(m)


def partial_derivative(f: Polynomial, var: str | int) -> Polynomial:
    return f.diff(var)


def divide(f: Polynomial, g: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Multivariate division by a single divisor in graded-lex order: f = q*g + r."""
    _check_pair(f, g)
    if g.is_zero:
        raise DomainError("division by zero polynomial")
    lg, lc = g.leading_term()
    inv = ONE / lc
    rem: dict = {}
    quo: dict = {}
    p = dict(f.terms)
    while p:
        e = max(p, key=grlex_key)
        c = p[e]
        if all(a >= b for a, b in zip(e, lg)):
            shift = tuple(a - b for a, b in zip(e, lg))
            coeff = c * inv
            quo[shift] = quo.get(shift, ZERO) + coeff
            for eg, cg in g.terms.items():
                t = tuple(a + b for a, b in zip(eg, shift))
                v = p.get(t, ZERO) - coeff * cg
                if v:
                    p[t] = v
                else:
                    p.pop(t, None)
        else:
            rem[e] = c
            del p[e]
    return (Polynomial._raw(f.variables, {e: c for e, c in quo.items() if c}),
            Polynomial._raw(f.variables, rem))


def divides(g: Polynomial, f: Polynomial) -> bool:
    return divide(f, g)[1].is_zero


def gcd(f: Polynomial, g: Polynomial) -> Polynomial:
    """Greatest common divisor, normalized to graded-lex leading coefficient 1."""
    _check_pair(f, g)
    if f.is_zero and g.is_zero:
        raise DomainError("gcd(0, 0) is undefined")
    if f.is_zero:
        return g.monic()
    if g.is_zero:
        return f.monic()
    if f.nvars == 0:
        return Polynomial.constant(1, ())
    h = f.to_sympy().gcd(g.to_sympy())
    return Polynomial.from_sympy(h, f.variables).monic()


def squarefree_part(f: Polynomial) -> Polynomial:
    """Product of the distinct irreducible factors of f, monic under graded lex."""
    if f.is_zero:
        raise DomainError("the zero polynomial has no squarefree part")
    if f.is_constant():
        return Polynomial.constant(1, f.variables)
    return Polynomial.from_sympy(f.to_sympy().sqf_part(), f.variables).monic()


def is_squarefree(f: Polynomial) -> bool:
    return squarefree_part(f).total_degree == f.total_degree


def squarefree_decomposition(f: Polynomial) -> list[tuple[Polynomial, int]]:
    """Pairwise coprime squarefree factors with multiplicities (units dropped)."""
    if f.is_zero:
        raise DomainError("the zero polynomial has no squarefree decomposition")
    if f.is_constant():
        return []
    _, factors = f.to_sympy().sqf_list()
    return [(Polynomial.from_sympy(p, f.variables).monic(), int(m)) for p, m in factors]


def resultant(f: Polynomial, g: Polynomial, var: str | int) -> Polynomial:
    """Resultant eliminating ``var``, as a polynomial in the remaining variables.

    Sign convention: determinant of the Sylvester matrix with the rows of
    ``f`` first.
    """
    _check_pair(f, g)
    k = f.index(var)
    df, dg = f.degree(k), g.degree(k)
    if df <= 0 and dg <= 0:
        raise DomainError(f"both polynomials have degree 0 in {f.variables[k]!r}")
    rest = f.variables[:k] + f.variables[k + 1:]
    order = (f.variables[k],) + rest

    def moved(p: Polynomial) -> Polynomial:
        return Polynomial._raw(order, {(e[k],) + e[:k] + e[k + 1:]: c for e, c in p.terms.items()})

    fs, gs = moved(f).to_sympy(), moved(g).to_sympy()
    # sympy's sign is only right for deg f >= deg g; swap using Res(f,g) = (-1)^(mn) Res(g,f)
    if df >= dg:
        r = fs.resultant(gs)
    else:
        r = gs.resultant(fs)
        if (df * dg) % 2:
            r = -r
    if not hasattr(r, "items"):
        return Polynomial.constant(r, rest)
    if r.ring.ngens == len(order):
        return Polynomial._raw(rest, {e[1:]: c for e, c in r.items() if c})
    return Polynomial._raw(rest, {tuple(e): c for e, c in r.items() if c})


def _exact_matrix(M: Sequence[Sequence]) -> list[list[Scalar]]:
    return [[to_scalar(v) for v in row] for row in M]


def determinant(M: Sequence[Sequence]) -> Scalar:
    rows = _exact_matrix(M)
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise StructuralError("matrix must be square")
    if n == 0:
        return ONE
    return DomainMatrix(rows, (n, n), QQ_I).det()


def inverse(M: Sequence[Sequence]) -> list[list[Scalar]]:
    rows = _exact_matrix(M)
    n = len(rows)
    if determinant(rows) == ZERO:
        raise DomainError("matrix is singular")
    inv = DomainMatrix(rows, (n, n), QQ_I).inv()
    return [[inv[i, j].element for j in range(n)] for i in range(n)]


def linear_substitute(f: Polynomial, M: Sequence[Sequence]) -> Polynomial:
    """Compose f with the linear map M: variable k becomes sum_j M[k][j] * x_j."""
    rows = _exact_matrix(M)
    n = f.nvars
    if len(rows) != n or any(len(r) != n for r in rows):
        raise StructuralError(f"matrix must be {n}x{n}")
    if determinant(rows) == ZERO:
        raise DomainError("coordinate change matrix is singular")
    xs = [Polynomial.variable(v, f.variables) for v in f.variables]
    forms = []
    for row in rows:
        form = Polynomial.zero(f.variables)
        for c, x in zip(row, xs):
            if c:
                form = form + x.scale(c)
        forms.append(form)
    return f.substitute(forms, f.variables)
