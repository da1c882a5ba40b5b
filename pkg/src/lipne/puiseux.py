"""Newton-Puiseux expansion of plane curve germs.

Branches of ``f(x, y) = 0`` through the origin are produced as
conjugacy classes ``x = t^p, y = sum c_n t^n`` (the "y chart") or, for
branches tangent to ``x = 0``, with the roles of the coordinates swapped
(the "x chart").  The first Newton polygon is handled in exact Q(i)
arithmetic so root multiplicities at the top level are certified; deeper
levels run in mpmath at the requested precision with explicit magnitude
and error bookkeeping for every coefficient, and any zero/nonzero
decision that the bookkeeping cannot settle raises
:class:`~lipne.errors.PrecisionError`, which triggers a precision
doubling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

from .errors import DomainError, PrecisionError, PreconditionError, TruncationError
from .poly import (
    ZERO,
    Polynomial,
    gcd,
    is_squarefree,
    scalar_to_mpc,
    squarefree_decomposition,
    squarefree_part,
    to_scalar,
)

DEFAULT_PRECISION = 128
MAX_RETRIES = 4
TRUNCATION_MARGIN = 4
RESIDUAL_TOLERANCE = 1e-15
_GUARD = 16
_MAX_DEPTH = 200


@dataclass(frozen=True)
class Term:
    exponent: Fraction
    coefficient: mpmath.mpc
    radius: mpmath.mpf = mpmath.mpf(0)


@dataclass(frozen=True)
class PuiseuxBranch:
    """One conjugacy class of Puiseux roots.

    In chart ``"y"`` the branch is ``(x, y) = (t^p, sum c t^(e*p))`` with
    ``x, y`` the first and second variable; in chart ``"x"`` the two
    coordinates are swapped.  ``truncation_exponent`` is ``None`` when the
    series terminates exactly.
    """

    ramification_index: int
    series: tuple[Term, ...]
    truncation_exponent: Fraction | None
    conjugacy_size: int
    chart: str = "y"
    variables: tuple[str, str] = ("x", "y")
    conjugate_index: int = 0
    tangent_key: tuple | None = field(default=None, compare=False)
    precision: int = DEFAULT_PRECISION

    @property
    def p(self) -> int:
        return self.ramification_index

    @property
    def exact(self) -> bool:
        return self.truncation_exponent is None

    @property
    def leading_exponent(self) -> Fraction | None:
        return self.series[0].exponent if self.series else None

    def conjugate(self, k: int) -> "PuiseuxBranch":
        """Image under t -> exp(2 pi i k / p) t."""
        p = self.ramification_index
        k %= p
        with mpmath.workprec(self.precision):
            terms = []
            for term in self.series:
                n = int(term.exponent * p)
                zeta = _root_of_unity(k * n, p)
                terms.append(Term(term.exponent, term.coefficient * zeta, term.radius))
        return replace(self, series=tuple(terms),
                       conjugate_index=(self.conjugate_index + k) % p)

    def coefficient(self, exponent: Fraction) -> Term | None:
        for term in self.series:
            if term.exponent == exponent:
                return term
        return None

    def evaluate(self, base: mpmath.mpc) -> mpmath.mpc:
        """Dependent coordinate at base coordinate ``base`` (principal root)."""
        p = self.ramification_index
        t = mpmath.root(base, p) if p > 1 else mpmath.mpc(base)
        return self.evaluate_t(t)

    def evaluate_t(self, t) -> mpmath.mpc:
        p = self.ramification_index
        return mpmath.fsum(term.coefficient * t ** int(term.exponent * p) for term in self.series)

    def point(self, t) -> tuple:
        """Ambient point in the original (first, second) coordinates at parameter t."""
        base = t ** self.ramification_index
        dep = self.evaluate_t(t)
        return (base, dep) if self.chart == "y" else (dep, base)

    def to_dict(self) -> dict:
        return {
            "p": self.ramification_index,
            "terms": [
                [t.exponent.numerator, t.exponent.denominator,
                 mpmath.nstr(t.coefficient.real, 30), mpmath.nstr(t.coefficient.imag, 30),
                 mpmath.nstr(t.radius, 5)]
                for t in self.series
            ],
            "conjugacy": self.conjugacy_size,
            "chart": self.chart,
            "variables": list(self.variables),
            "truncation": (None if self.truncation_exponent is None
                           else [self.truncation_exponent.numerator,
                                 self.truncation_exponent.denominator]),
        }

    @classmethod
    def from_dict(cls, data: dict, precision: int = DEFAULT_PRECISION) -> "PuiseuxBranch":
        with mpmath.workprec(precision):
            terms = []
            for entry in data["terms"]:
                if len(entry) < 5:
                    raise DomainError("numeric branch terms must carry an error radius")
                num, den, re, im, rad = entry[:5]
                terms.append(Term(Fraction(int(num), int(den)),
                                  mpmath.mpc(mpmath.mpf(str(re)), mpmath.mpf(str(im))),
                                  mpmath.mpf(str(rad))))
        terms.sort(key=lambda t: t.exponent)
        p = _lcm_denominators(t.exponent for t in terms)
        trunc = data.get("truncation")
        trunc = None if trunc is None else Fraction(int(trunc[0]), int(trunc[1]))
        return cls(p, tuple(terms), trunc, p, data.get("chart", "y"),
                   tuple(data.get("variables", ("x", "y"))), precision=precision)


@dataclass(frozen=True)
class NewtonEdge:
    slope: Fraction
    start: tuple[int, int]
    end: tuple[int, int]
    points: tuple[tuple[int, int], ...]
    edge_polynomial: Polynomial

    @property
    def exponent(self) -> Fraction:
        """Leading Puiseux exponent of the roots attached to this edge."""
        return -1 / self.slope


@dataclass(frozen=True)
class NewtonPolygon:
    edges: tuple[NewtonEdge, ...]
    x_factor: int = 0
    y_factor: int = 0


def _root_of_unity(a: int, p: int):
    a %= p
    if a == 0:
        return mpmath.mpc(1)
    if 2 * a == p:
        return mpmath.mpc(-1)
    if 4 * a == p:
        return mpmath.mpc(0, 1)
    if 4 * a == 3 * p:
        return mpmath.mpc(0, -1)
    return mpmath.expjpi(mpmath.mpf(2 * a) / p)


def _lcm_denominators(exponents: Iterable[Fraction]) -> int:
    p = 1
    for e in exponents:
        p = p * e.denominator // math.gcd(p, e.denominator)
    return p


# -- Newton polygon ----------------------------------------------------------

def _chain(points: set[tuple[int, int]], start: tuple[int, int]) -> list[tuple]:
    """Lower convex chain from ``start`` down to the j = min row.

    Returns ``(mu, start, end, edge_points)`` with ``mu`` the positive
    valuation of the attached roots.
    """
    jmin = min(j for _, j in points)
    edges = []
    cur = start
    while cur[1] > jmin:
        best = None
        members = []
        for (i, j) in points:
            if j >= cur[1]:
                continue
            mu = Fraction(i - cur[0], cur[1] - j)
            if best is None or mu < best:
                best, members = mu, [(i, j)]
            elif mu == best:
                members.append((i, j))
        if best is None or best <= 0:
            raise DomainError("degenerate Newton polygon")
        end = min(members, key=lambda pt: pt[1])
        edges.append((best, cur, end, tuple(sorted([cur, *members], key=lambda pt: -pt[1]))))
        cur = end
    return edges


def newton_polygon(f: Polynomial) -> NewtonPolygon:
    """Exact Newton polygon of a bivariate germ (first variable = x, second = y).

    Only the part relevant to roots ``y(x)`` of positive valuation is
    returned; powers of ``x`` or ``y`` dividing ``f`` are reported in
    ``x_factor`` / ``y_factor`` and removed first.
    """
    if f.nvars != 2:
        raise DomainError("Newton polygons need exactly two variables")
    if f.is_zero:
        raise DomainError("zero polynomial")
    if f.constant_coefficient():
        raise DomainError("not a germ through the origin")
    a = min(e[0] for e in f.terms)
    b = min(e[1] for e in f.terms)
    terms = {(i - a, j - b): c for (i, j), c in f.terms.items()}
    points = set(terms)
    rows = [j for (i, j) in points if i == 0]
    if not rows or 0 in rows:
        # a unit (or a pure power of x) after removing monomial factors
        return NewtonPolygon((), a, b)
    r = min(rows)
    edges = []
    for mu, s, e, pts in _chain(points, (0, r)):
        jlow = e[1]
        q = mu.denominator
        coeffs = {}
        for pt in pts:
            coeffs[((pt[1] - jlow),)] = terms[pt]
        poly = Polynomial(("z",), coeffs)
        edges.append(NewtonEdge(-1 / mu, (s[0] + a, s[1] + b), (e[0] + a, e[1] + b),
                                tuple((i + a, j + b) for i, j in pts), poly))
        del q
    return NewtonPolygon(tuple(edges), a, b)


# -- numeric machinery -------------------------------------------------------

class _Ctx:
    def __init__(self, prec: int):
        self.prec = prec
        self.eps = mpmath.mpf(2) ** (-prec)
        self.lo = mpmath.mpf(2) ** _GUARD
        self.hi = mpmath.mpf(2) ** (2 * _GUARD)

    def classify(self, val, mag, err) -> bool:
        """True if certified zero, False if certified nonzero."""
        bound = err + 64 * self.eps * mag
        a = abs(val)
        if a <= self.lo * bound:
            return True
        if a > self.hi * bound or a > mpmath.mpf(2) ** (-self.prec // 2) * mag:
            return False
        raise PrecisionError("cannot decide whether a coefficient vanishes",
                             required_precision=2 * self.prec)


# A numeric bivariate polynomial: (i, j) -> [value, magnitude, error]
NumPoly = dict


def _num_from_exact(f: Polynomial) -> NumPoly:
    out = {}
    for e, c in f.terms.items():
        v = scalar_to_mpc(c)
        out[e] = [v, abs(v), mpmath.mpf(0)]
    return out


def _substitute(F: NumPoly, q: int, m: int, c, c_rad, v: int, ctx: _Ctx,
                max_i: int | None = None) -> NumPoly:
    """x^-v F(x^q, x^m (c + y)), with magnitude and error propagation."""
    jmax = max(j for _, j in F)
    cabs = abs(c)
    cpow = [mpmath.mpc(1)]
    apow = [mpmath.mpf(1)]
    upow = [mpmath.mpf(1)]
    for _ in range(jmax):
        cpow.append(cpow[-1] * c)
        apow.append(apow[-1] * cabs)
        upow.append(upow[-1] * (cabs + c_rad))
    out: dict = {}
    for (i, j), (a, mag, err) in F.items():
        e = q * i + m * j - v
        if e < 0:
            raise PrecisionError("Newton polygon inconsistent at working precision",
                                 required_precision=2 * ctx.prec)
        if max_i is not None and e > max_i:
            continue
        aa = abs(a)
        for l in range(j + 1):
            b = math.comb(j, l)
            slot = out.get((e, l))
            if slot is None:
                slot = out[(e, l)] = [mpmath.mpc(0), mpmath.mpf(0), mpmath.mpf(0)]
            slot[0] += a * b * cpow[j - l]
            slot[1] += mag * b * upow[j - l]
            slot[2] += b * (err * upow[j - l] + aa * (upow[j - l] - apow[j - l]))
    return out


def _clean(F: NumPoly, ctx: _Ctx) -> NumPoly:
    return {k: s for k, s in F.items() if not ctx.classify(*s)}


def _companion_roots(coeffs: Sequence) -> list:
    """Roots of sum coeffs[k] z^k via companion-matrix eigenvalues."""
    d = len(coeffs) - 1
    lead = coeffs[-1]
    if d == 1:
        return [-coeffs[0] / lead]
    M = mpmath.matrix(d, d)
    for k in range(1, d):
        M[k, k - 1] = 1
    for k in range(d):
        M[k, d - 1] = -coeffs[k] / lead
    ev = mpmath.eig(M, left=False, right=False)
    return list(ev)


def _horner(coeffs, z):
    acc = mpmath.mpc(0)
    for a in reversed(coeffs):
        acc = acc * z + a
    return acc


def _derivative_coeffs(coeffs, k: int):
    """Coefficients of psi^(k) / k!."""
    return [math.comb(l, k) * coeffs[l] for l in range(k, len(coeffs))]


def _polish(coeffs, errs, z, ctx: _Ctx):
    """Newton refinement of a simple root; returns (root, radius)."""
    dco = [l * coeffs[l] for l in range(1, len(coeffs))]
    for _ in range(100):
        fz = _horner(coeffs, z)
        dz = _horner(dco, z)
        if dz == 0:
            raise PrecisionError("derivative vanished while polishing a root",
                                 required_precision=2 * ctx.prec)
        step = fz / dz
        z -= step
        if abs(step) <= ctx.eps * max(1, abs(z)):
            break
    fz = _horner(coeffs, z)
    dz = _horner(dco, z)
    coef_err = sum((e * abs(z) ** l for l, e in enumerate(errs)), mpmath.mpf(0))
    mag = sum((abs(a) * abs(z) ** l for l, a in enumerate(coeffs)), mpmath.mpf(0))
    rad = (2 * abs(fz) + coef_err + 64 * ctx.eps * mag) / abs(dz) + 4 * ctx.eps * abs(z)
    return z, rad


def _numeric_roots(coeffs, errs, mags, ctx: _Ctx) -> list[tuple]:
    """Distinct roots of a numeric polynomial with multiplicities.

    Clusters companion eigenvalues, then refines each cluster centre as a
    simple root of the (r-1)-th derivative and validates the multiplicity.
    """
    d = len(coeffs) - 1
    raw = _companion_roots(coeffs)
    scale = max([mpmath.mpf(1)] + [abs(z) for z in raw])
    tau = mpmath.mpf(2) ** (-(ctx.prec - 2 * _GUARD) / (d + 1)) * scale
    groups: list[list] = []
    for z in raw:
        hits = [g for g in groups if any(abs(z - w) <= tau for w in g)]
        merged = [z]
        for g in hits:
            merged.extend(g)
            groups.remove(g)
        groups.append(merged)
    loose = mpmath.mpf(2) ** (-ctx.prec // 3)
    out = []
    for g in groups:
        r = len(g)
        centre = mpmath.fsum(g) / r
        dco = _derivative_coeffs(coeffs, r - 1)
        derr = [math.comb(l, r - 1) * errs[l] for l in range(r - 1, len(errs))]
        z, rad = _polish(dco, derr, centre, ctx)
        for k in range(r + 1):
            val = abs(_horner(_derivative_coeffs(coeffs, k), z))
            size = sum((math.comb(l, k) * mags[l] * abs(z) ** (l - k)
                        for l in range(k, len(mags))), mpmath.mpf(0))
            small = val <= loose * size
            if (k < r and not small) or (k == r and small):
                raise PrecisionError("root multiplicity could not be certified",
                                     required_precision=2 * ctx.prec)
        out.append((z, r, rad))
    return out


def univariate_roots(psi: Polynomial, precision: int = DEFAULT_PRECISION) -> list[tuple]:
    """Roots ``(value, multiplicity, radius)`` of an exact univariate polynomial.

    Multiplicities come from the exact squarefree chain; values are
    Newton-polished simple roots of each squarefree factor.
    """
    with mpmath.workprec(precision):
        return _sort_roots(_exact_roots(psi, _Ctx(precision)))


def _snap(z, check) -> mpmath.mpc | None:
    """``z`` as an exact Gaussian rational if ``check`` accepts a nearby small-height candidate."""
    re = Fraction(float(z.real)).limit_denominator(1 << 12)
    im = Fraction(float(z.imag)).limit_denominator(1 << 12)
    cand = to_scalar((re, im))
    if not check(cand):
        return None
    return mpmath.mpc(mpmath.mpf(re.numerator) / re.denominator,
                      mpmath.mpf(im.numerator) / im.denominator)


def _exact_roots(psi: Polynomial, ctx: _Ctx) -> list[tuple]:
    out = []
    for factor, mult in squarefree_decomposition(psi):
        d = factor.total_degree
        coeffs = [scalar_to_mpc(factor.coefficient((k,))) for k in range(d + 1)]
        zeros = [mpmath.mpf(0)] * (d + 1)
        for z in _companion_roots(coeffs):
            root, rad = _polish(coeffs, zeros, z, ctx)
            exact = _snap(root, lambda c: factor.evaluate((c,)) == ZERO)
            out.append((root, mult, rad) if exact is None else (exact, mult, mpmath.mpf(0)))
    return out


def _sort_roots(roots: list[tuple]) -> list[tuple]:
    return sorted(roots, key=lambda r: (float(r[0].real), float(r[0].imag), r[1]))


@dataclass
class _Raw:
    p: int
    terms: list  # (n, coefficient, radius) with y = sum c t^n
    trunc: int | None  # t-exponent through which the series is exact; None = terminating
    key: tuple


class _Expander:
    def __init__(self, ctx: _Ctx, truncation: Fraction | None, margin: int = TRUNCATION_MARGIN):
        self.ctx = ctx
        self.truncation = truncation
        self.margin = margin

    def _target(self, p: int, m: int) -> int:
        """Tail length needed so terms through max(truncation, m/p + margin) are present."""
        sep = Fraction(m, p)
        target = sep + self.margin
        if self.truncation is not None:
            target = max(target, self.truncation)
        return max(0, math.floor(target * p) - m)

    def chart(self, f: Polynomial, minimum: Fraction, strict: bool, key: tuple) -> list[_Raw]:
        out: list[_Raw] = []
        a = min(e[0] for e in f.terms)
        b = min(e[1] for e in f.terms)
        if b:
            # y divides f: the exact branch y = 0 (tangent to the base axis).
            out.append(_Raw(1, [], None, key + ("flat",)))
        terms = {(i - a, j - b): c for (i, j), c in f.terms.items()}
        if (0, 0) in terms or not any(i == 0 and j > 0 for i, j in terms):
            return out
        base = Polynomial(f.variables, terms)
        self.base = base
        poly = newton_polygon(base)
        F = _num_from_exact(base)
        for edge in poly.edges:
            mu = edge.exponent
            if mu < minimum or (strict and mu == minimum):
                continue
            q, m = mu.denominator, mu.numerator
            v = q * edge.start[0] + m * edge.start[1]
            roots = _sort_roots(_exact_roots(_reduce_edge(edge.edge_polynomial, q), self.ctx))
            for idx, (rho, mult, rad) in enumerate(roots):
                tkey = key + ((idx,) if mu == 1 else ("flat",))
                out.extend(self._root(F, 1, 0, [], q, m, v, rho, mult, rad, tkey, 0))
        return out

    def _terminates(self, p: int, terms: list) -> bool:
        """Exact check that ``x = t^p, y = sum c t^n`` solves the chart polynomial."""
        t = Polynomial.variable("t", ("t",))
        y = Polynomial.zero(("t",))
        for n, c, _ in terms:
            cq = _snap(c, lambda z: True)
            if cq is None:
                return False
            y = y + t ** n * to_scalar((Fraction(float(cq.real)).limit_denominator(1 << 12),
                                        Fraction(float(cq.imag)).limit_denominator(1 << 12)))
        return self.base.substitute([t ** p, y], ("t",)).is_zero

    def _root(self, F, p, m_acc, prefix, q, m, v, rho, mult, rho_rad, key, depth) -> list[_Raw]:
        ctx = self.ctx
        c = mpmath.root(rho, q) if q > 1 else rho
        c_rad = rho_rad * abs(c) / (q * abs(rho))
        if q > 1 and rho_rad == 0:
            rho_exact = to_scalar((Fraction(float(rho.real)).limit_denominator(1 << 12),
                                   Fraction(float(rho.imag)).limit_denominator(1 << 12)))
            snapped = _snap(c, lambda z: z ** q == rho_exact)
            if snapped is not None:
                c = snapped
        p2 = p * q
        m2 = m_acc * q + m
        prefix2 = [(n * q, cc, rr) for n, cc, rr in prefix] + [(m2, c, c_rad)]
        if mult == 1:
            K = self._target(p2, m2)
            if c_rad == 0 and all(rr == 0 for _, _, rr in prefix):
                # exact so far: the series terminates if nothing is left on y = 0
                full = _substitute(F, q, m, c, c_rad, v, ctx)
                if (all(s[0] == 0 and s[2] == 0 for (i, j), s in full.items() if j == 0)
                        and self._terminates(p2, prefix2)):
                    return [_Raw(p2, prefix2, None, key)]
            F1 = _clean(_substitute(F, q, m, c, c_rad, v, ctx, max_i=K), ctx)
            tail = _tail(F1, K, ctx)
            terms = prefix2 + [(m2 + k, b, r) for k, b, r in tail]
            return [_Raw(p2, terms, m2 + K, key)]
        F1 = _clean(_substitute(F, q, m, c, c_rad, v, ctx), ctx)
        return self._descend(F1, p2, m2, prefix2, mult, key, depth + 1)

    def _descend(self, F: NumPoly, p, m_acc, prefix, r_expected, key, depth) -> list[_Raw]:
        ctx = self.ctx
        if depth > _MAX_DEPTH:
            raise TruncationError("Newton-Puiseux descent did not separate the branches")
        out: list[_Raw] = []
        column = sorted(j for (i, j) in F if i == 0)
        if not column or column[0] != r_expected:
            raise PrecisionError("root multiplicity changed under substitution",
                                 required_precision=2 * ctx.prec)
        r = r_expected
        jmin = min(j for _, j in F)
        if jmin >= 2:
            raise PrecisionError("repeated root detected in a squarefree input",
                                 required_precision=2 * ctx.prec)
        if jmin == 1:
            out.append(_Raw(p, list(prefix), None, key))
            F = {(i, j - 1): s for (i, j), s in F.items()}
            r -= 1
            if r == 0:
                return out
        for mu, start, end, pts in _chain(set(F), (0, r)):
            q, m = mu.denominator, mu.numerator
            v = q * start[0] + m * start[1]
            jlow = end[1]
            deg = (start[1] - jlow) // q
            coeffs = [mpmath.mpc(0)] * (deg + 1)
            errs = [mpmath.mpf(0)] * (deg + 1)
            mags = [mpmath.mpf(0)] * (deg + 1)
            for pt in pts:
                k = (pt[1] - jlow) // q
                val, mag, err = F[pt]
                coeffs[k], mags[k], errs[k] = val, mag, err + 64 * ctx.eps * mag
            for rho, mult, rad in _sort_roots(_numeric_roots(coeffs, errs, mags, ctx)):
                out.extend(self._root(F, p, m_acc, prefix, q, m, v, rho, mult, rad, key, depth))
        return out


def _reduce_edge(phi: Polynomial, q: int) -> Polynomial:
    """psi(z) with phi(c) = psi(c^q) (phi already divided by its lowest power)."""
    return Polynomial(("z",), {(e[0] // q,): c for e, c in phi.terms.items()})


def _tail(F: NumPoly, K: int, ctx: _Ctx) -> list[tuple]:
    """Unramified tail y = sum_{k=1..K} b_k t^k solving F(t, y) = 0 (simple root at 0)."""
    if K <= 0:
        return []
    slot = F.get((0, 1))
    if slot is None:
        raise PrecisionError("simple root lost its derivative", required_precision=2 * ctx.prec)
    a = slot[0]
    terms = [(i, j, s) for (i, j), s in F.items() if i <= K]
    jmax = max(j for _, j, _ in terms)
    y = [mpmath.mpc(0)] * (K + 1)

    def series_powers(ser, absolute=False):
        pw = [[mpmath.mpc(1)] + [mpmath.mpc(0)] * K]
        for _ in range(jmax):
            prev = pw[-1]
            nxt = [mpmath.mpc(0)] * (K + 1)
            for u, pu in enumerate(prev):
                if pu == 0:
                    continue
                for w in range(1, K + 1 - u):
                    if ser[w] != 0:
                        nxt[u + w] += pu * ser[w]
            pw.append(nxt)
        return pw

    for _ in range(K):
        pw = series_powers(y)
        R = [mpmath.mpc(0)] * (K + 1)
        for i, j, (val, _, _) in terms:
            row = pw[j]
            for u in range(K + 1 - i):
                if row[u] != 0:
                    R[i + u] += val * row[u]
        for k in range(1, K + 1):
            y[k] -= R[k] / a
    # magnitude majorant of the final residual for radii and zero tests
    ay = [abs(z) for z in y]
    pw = series_powers(ay)
    M = [mpmath.mpf(0)] * (K + 1)
    for i, j, (_, mag, err) in terms:
        row = pw[j]
        for u in range(K + 1 - i):
            M[i + u] += (64 * ctx.eps * mag + err) * abs(row[u])
    out = []
    for k in range(1, K + 1):
        rad = 4 * M[k] / abs(a) + 4 * ctx.eps * abs(y[k])
        if abs(y[k]) <= ctx.lo * rad:
            continue
        out.append((k, y[k], rad))
    return out


def _finalize(raws: list[_Raw], chart: str, variables: tuple, prec: int) -> list[PuiseuxBranch]:
    out = []
    for raw in raws:
        p = raw.p
        terms = tuple(Term(Fraction(n, p), c, r) for n, c, r in sorted(raw.terms, key=lambda t: t[0]))
        pmin = _lcm_denominators(t.exponent for t in terms)
        if pmin != p:
            raise PrecisionError("ramification index is not minimal at working precision",
                                 required_precision=2 * prec)
        trunc = None if raw.trunc is None else Fraction(raw.trunc, p)
        out.append(PuiseuxBranch(p, terms, trunc, p, chart, variables,
                                 tangent_key=raw.key, precision=prec))
    return out


def _branch_sort_key(b: PuiseuxBranch):
    return (0 if b.chart == "y" else 1,
            [(t.exponent, float(t.coefficient.real), float(t.coefficient.imag)) for t in b.series])


def _swap(f: Polynomial) -> Polynomial:
    return Polynomial((f.variables[1], f.variables[0]),
                      {(e[1], e[0]): c for e, c in f.terms.items()})


class _ShortSeries(Exception):
    """Substitute-back residual too large: the series needs more terms."""


def _expand_once(f: Polynomial, truncation, prec: int, margin: int) -> list[PuiseuxBranch]:
    with mpmath.workprec(prec):
        ctx = _Ctx(prec)
        expander = _Expander(ctx, truncation, margin)
        ident = str(f)
        ys = expander.chart(f, Fraction(1), False, (ident, "y"))
        xs = expander.chart(_swap(f), Fraction(1), True, (ident, "x"))
        branches = (_finalize(ys, "y", f.variables, prec)
                    + _finalize(xs, "x", f.variables, prec))
        branches.sort(key=_branch_sort_key)
        for b in branches:
            res = residual_check(f, b)
            if not res < RESIDUAL_TOLERANCE:
                if b.truncation_exponent is None:
                    raise PrecisionError(f"exact branch failed substitute-back check ({res:.3g})",
                                         required_precision=2 * prec)
                raise _ShortSeries(res)
    return branches


def puiseux_expand(f: Polynomial, truncation: Fraction | int | None = None,
                   precision: int = DEFAULT_PRECISION) -> list[PuiseuxBranch]:
    """All branches of ``f = 0`` at the origin, one entry per conjugacy class.

    ``truncation`` is a minimum exponent through which every series is
    computed; each branch is in any case expanded at least
    ``TRUNCATION_MARGIN`` exponent units past the point where it separates
    from every other branch.  The margin is doubled when a branch fails the
    substitute-back check, and the precision is doubled on undecidable
    coefficients.
    """
    if f.nvars != 2:
        raise DomainError("Puiseux expansion needs a polynomial in two variables")
    if f.is_zero:
        raise DomainError("zero polynomial")
    if f.constant_coefficient():
        raise DomainError("not a germ through the origin")
    if not is_squarefree(f):
        repeated = squarefree_part(gcd(f, gcd(f.diff(0), f.diff(1))))
        raise PreconditionError(f"input is not squarefree; repeated factor {repeated}")
    if truncation is not None:
        truncation = Fraction(truncation)
    prec = int(precision)
    margin = TRUNCATION_MARGIN
    last: Exception | None = None
    doublings = lengthenings = 0
    while True:
        try:
            return _expand_once(f, truncation, prec, margin)
        except PrecisionError as exc:
            last = exc
            if doublings == MAX_RETRIES:
                break
            doublings += 1
            prec *= 2
        except _ShortSeries as exc:
            last = exc
            if lengthenings == MAX_RETRIES:
                raise TruncationError(f"substitute-back residual {exc.args[0]:.3g} persists with "
                                      f"{margin} exponent units of margin")
            lengthenings += 1
            margin *= 2
    raise PrecisionError(f"precision exhausted after {MAX_RETRIES} doublings: {last}",
                         required_precision=prec)


# -- branch invariants ---------------------------------------------------------

def branch_tangent(b: PuiseuxBranch) -> tuple:
    """Tangent direction in the original (first, second) coordinates."""
    if b.chart == "x":
        return (mpmath.mpc(0), mpmath.mpc(1))
    term = b.coefficient(Fraction(1))
    c = term.coefficient if term is not None else mpmath.mpc(0)
    return (mpmath.mpc(1), c)


def branch_is_smooth(b: PuiseuxBranch) -> bool:
    if b.truncation_exponent is not None and b.truncation_exponent < 2:
        raise TruncationError("truncation below exponent 2 cannot certify smoothness")
    return b.ramification_index == 1


def _balls_equal(c1, r1, c2, r2) -> bool | None:
    """True if certainly equal, False if certainly different, None if undecidable."""
    diff = abs(c1 - c2)
    if diff == 0 and (r1 == 0 and r2 == 0):
        return True
    if diff > r1 + r2:
        return False
    if diff == 0:
        return True
    return None


def separation_exponent(b1: PuiseuxBranch, b2: PuiseuxBranch) -> Fraction:
    """Least exponent at which the two series differ (1 for transversal charts)."""
    if b1.chart != b2.chart:
        return Fraction(1)
    exps = sorted({t.exponent for t in b1.series} | {t.exponent for t in b2.series})
    limits = [b.truncation_exponent for b in (b1, b2) if b.truncation_exponent is not None]
    limit = min(limits) if limits else None
    zero = mpmath.mpc(0)
    for e in exps:
        if limit is not None and e > limit:
            break
        t1, t2 = b1.coefficient(e), b2.coefficient(e)
        c1, r1 = (t1.coefficient, t1.radius) if t1 else (zero, 0)
        c2, r2 = (t2.coefficient, t2.radius) if t2 else (zero, 0)
        same = _balls_equal(c1, r1, c2, r2)
        if same is None:
            raise PrecisionError(f"cannot decide whether coefficients at exponent {e} differ")
        if not same:
            return e
    if limit is None:
        raise DomainError("the two branches are identical")
    raise TruncationError("series truncated before the branches separate")


def residual_check(f: Polynomial, b: PuiseuxBranch, samples: int = 8,
                   base_range: tuple[float, float] = (1e-7, 1e-5)) -> float:
    """Scaled substitute-back residual of ``b`` in ``f``.

    Returns the maximum over log-spaced base-coordinate samples of
    ``|f(point)| / (|x|^v * max|coeff|)`` where ``v`` is the valuation of the
    dominant terms of ``f`` along the branch.
    """
    g = f if b.chart == "y" else _swap(f)
    lead = b.leading_exponent
    vals = []
    for (i, j) in g.terms:
        vals.append(Fraction(i) + (j * lead if lead is not None else (0 if j == 0 else 10**9)))
    v0 = min(vals)
    with mpmath.workprec(b.precision):
        cmax = max(abs(scalar_to_mpc(c)) for c in g.terms.values())
        lo, hi = (mpmath.log10(mpmath.mpf(x)) for x in base_range)
        worst = mpmath.mpf(0)
        for k in range(samples):
            x = mpmath.mpf(10) ** (lo + (hi - lo) * k / max(1, samples - 1))
            t = mpmath.root(x, b.ramification_index)
            y = b.evaluate_t(t)
            val = abs(g.evaluate_numeric((mpmath.mpc(x), y)))
            worst = max(worst, val / (x ** (v0.numerator / mpmath.mpf(v0.denominator)) * cmax))
    return float(worst)


# -- branches in n-space -------------------------------------------------------

@dataclass(frozen=True)
class SpaceBranch:
    """A curve branch in C^n parametrized over coordinate ``base``.

    ``coordinates[k]`` is the series of coordinate k as a function of the
    base coordinate (``coordinates[base]`` is ignored and kept empty).
    """

    base: int
    coordinates: tuple[tuple[Term, ...], ...]
    truncation_exponent: Fraction | None = None
    ramification_index: int = 1
    tangent_key: tuple | None = field(default=None, compare=False)
    precision: int = DEFAULT_PRECISION

    @property
    def dimension(self) -> int:
        return len(self.coordinates)

    @classmethod
    def build(cls, base: int, coordinates, truncation=None, p: int | None = None,
              precision: int = DEFAULT_PRECISION, tangent_key=None) -> "SpaceBranch":
        coords = tuple(tuple(sorted(c, key=lambda t: t.exponent)) if k != base else ()
                       for k, c in enumerate(coordinates))
        if not 0 <= base < len(coords):
            raise DomainError(f"base coordinate {base} out of range")
        for k, series in enumerate(coords):
            for term in series:
                if term.exponent < 1:
                    raise DomainError(
                        f"coordinate {k} has exponent {term.exponent} < 1: the branch is tangent "
                        "to the kernel of the base coordinate; change coordinates first")
        lcm = _lcm_denominators(t.exponent for s in coords for t in s)
        if p is None or truncation is None:
            p = lcm
        elif p % lcm:
            raise DomainError(f"ramification index {p} is incompatible with the exponents")
        return cls(base, coords, truncation, p, tangent_key, precision)

    @classmethod
    def from_plane(cls, b: PuiseuxBranch) -> "SpaceBranch":
        base = 0 if b.chart == "y" else 1
        coords = [(), ()]
        coords[1 - base] = b.series
        return cls(base, tuple(coords), b.truncation_exponent, b.ramification_index,
                   b.tangent_key, b.precision)

    def tangent(self) -> list[tuple]:
        """Tangent direction as (value, radius) pairs, normalized to 1 at the base."""
        out = []
        for k, series in enumerate(self.coordinates):
            if k == self.base:
                out.append((mpmath.mpc(1), mpmath.mpf(0)))
                continue
            hit = [t for t in series if t.exponent == 1]
            out.append((hit[0].coefficient, hit[0].radius) if hit else (mpmath.mpc(0), mpmath.mpf(0)))
        return out

    def is_smooth(self) -> bool:
        if self.truncation_exponent is not None and self.truncation_exponent < 2:
            raise TruncationError("truncation below exponent 2 cannot certify smoothness")
        return self.ramification_index == 1

    def to_dict(self) -> dict:
        return {
            "base": self.base,
            "p": self.ramification_index,
            "coordinates": [
                [[t.exponent.numerator, t.exponent.denominator,
                  mpmath.nstr(t.coefficient.real, 30), mpmath.nstr(t.coefficient.imag, 30),
                  mpmath.nstr(t.radius, 5)] for t in series]
                for series in self.coordinates
            ],
            "truncation": (None if self.truncation_exponent is None
                           else [self.truncation_exponent.numerator,
                                 self.truncation_exponent.denominator]),
        }

    @classmethod
    def from_dict(cls, data: dict, precision: int = DEFAULT_PRECISION) -> "SpaceBranch":
        coords = []
        with mpmath.workprec(precision):
            for series in data["coordinates"]:
                terms = []
                for entry in series:
                    if len(entry) < 5:
                        raise DomainError("numeric branch terms must carry an error radius")
                    num, den, re, im, rad = entry[:5]
                    terms.append(Term(Fraction(int(num), int(den)),
                                      mpmath.mpc(mpmath.mpf(str(re)), mpmath.mpf(str(im))),
                                      mpmath.mpf(str(rad))))
                coords.append(tuple(terms))
        trunc = data.get("truncation")
        trunc = None if trunc is None else Fraction(int(trunc[0]), int(trunc[1]))
        return cls.build(int(data["base"]), coords, trunc, data.get("p"), precision)
