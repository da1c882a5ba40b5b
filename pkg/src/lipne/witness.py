"""Numeric arc-pair witnesses for non-NE curve germs.

Two branches with a common tangent are followed over a real segment of
the base line.  Their outer distance shrinks like ``t^q`` while the inner
distance stays bounded below by twice the distance from the base point to
the discriminant, which is of order ``t``; the ratio therefore blows up
like ``t^(1-q)``.  The report samples all three quantities, fits the
exponent, and records any violated inequality.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np
from scipy import integrate, stats

from .curves import Status, plane_curve_ne
from .errors import DomainError, PrecisionError, PreconditionError
from .poly import ONE, ZERO, Polynomial, Scalar, inverse, scalar_to_mpc, squarefree_part
from .puiseux import DEFAULT_PRECISION, PuiseuxBranch, puiseux_expand, separation_exponent, univariate_roots
from .slicer import SliceCertificate, discriminant, find_general_projection, transformed

DEFAULT_T_RANGE = (1e-6, 1e-2)
DEFAULT_EPSILON = 0.1
MIN_RADIUS = 0.01


@dataclass(frozen=True)
class WitnessConfig:
    seed: int = 0
    attempts: int = 32
    samples: int = 16
    t_range: tuple[float, float] = DEFAULT_T_RANGE
    epsilon: float | None = None
    precision: int = DEFAULT_PRECISION
    require_non_ne: bool = True


@dataclass(frozen=True)
class ArcPair:
    """Two branches over the same base segment ``t -> t*w``, ``0 < t <= epsilon``.

    The branches live in slice coordinates ``(s, u)``; ``lift`` maps these
    to the ambient space, and ``projection_norm`` is the Frobenius norm of
    the projection onto the base (where ``delta`` lives).
    """

    branch1: PuiseuxBranch
    branch2: PuiseuxBranch
    epsilon: float
    direction_w: tuple[complex, ...]
    separation_q: Fraction
    line: tuple[Scalar, ...]
    lift: tuple[tuple[Scalar, Scalar], ...]
    delta: Polynomial
    projection_norm: float
    curve: Polynomial

    def to_dict(self) -> dict:
        return {
            "branch1": self.branch1.to_dict(),
            "branch2": self.branch2.to_dict(),
            "epsilon": self.epsilon,
            "direction_w": [[z.real, z.imag] for z in self.direction_w],
            "separation_q": [self.separation_q.numerator, self.separation_q.denominator],
            "discriminant": str(self.delta),
            "curve": str(self.curve),
        }


@dataclass(frozen=True)
class WitnessSample:
    t: float
    outer: float
    outer_radius: float
    inner_lower: float
    inner_arclength: float | None
    arclength_error: float | None
    ratio: float


@dataclass
class WitnessReport:
    samples: list[WitnessSample]
    fitted_slope: float
    slope_radius: float
    predicted_slope: Fraction
    outer_slope: float
    outer_slope_radius: float
    conclusion: str
    separation_q: Fraction
    epsilon: float
    cone_radius: float
    separation_certified: bool
    violations: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    pair: dict | None = None

    def to_dict(self) -> dict:
        return {
            "schema": "lipne-witness/1",
            "samples": [vars(s) for s in self.samples],
            "fitted_slope": self.fitted_slope,
            "slope_radius": self.slope_radius,
            "predicted_slope": str(self.predicted_slope),
            "outer_slope": self.outer_slope,
            "outer_slope_radius": self.outer_slope_radius,
            "conclusion": self.conclusion,
            "separation_q": str(self.separation_q),
            "epsilon": self.epsilon,
            "cone_radius": self.cone_radius,
            "separation_certified": self.separation_certified,
            "violations": list(self.violations),
            "warnings": list(self.warnings),
            "pair": self.pair,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", "outer", "outer_radius", "inner_lower", "inner_arclength",
                         "arclength_error", "ratio"])
        for s in self.samples:
            writer.writerow([repr(s.t), repr(s.outer), repr(s.outer_radius), repr(s.inner_lower),
                             "" if s.inner_arclength is None else repr(s.inner_arclength),
                             "" if s.arclength_error is None else repr(s.arclength_error),
                             repr(s.ratio)])
        return buf.getvalue()


# -- pair construction -----------------------------------------------------------

def _choose_pair(branches: list[PuiseuxBranch], allow_transversal: bool):
    for b in branches:
        if b.ramification_index >= 2:
            return b, b.conjugate(1)
    for i, b1 in enumerate(branches):
        for b2 in branches[i + 1:]:
            if b1.tangent_key is not None and b1.tangent_key == b2.tangent_key:
                return b1, b2
    if allow_transversal and len(branches) >= 2:
        return branches[0], branches[1]
    raise PreconditionError("curve has no pair of branches with a common tangent")


def _restricted_roots(delta: Polynomial, line: Sequence[Scalar], precision: int) -> list[tuple]:
    """Roots of s -> delta(s*w) with multiplicities and radii."""
    terms: dict = {}
    for e, c in delta.terms.items():
        coeff = c
        for wk, ek in zip(line, e):
            coeff = coeff * wk ** ek
        k = sum(e)
        terms[(k,)] = terms.get((k,), ZERO) + coeff
    restricted = Polynomial(("s",), terms)
    if restricted.is_zero:
        raise DomainError("the base line lies inside the discriminant")
    if restricted.is_constant():
        return []
    return univariate_roots(restricted, precision)


def _choose_epsilon(delta, line, precision, override) -> float:
    if override is not None:
        if not override > 0:
            raise DomainError("epsilon must be positive")
        return float(override)
    eps = DEFAULT_EPSILON
    for root, _, rad in _restricted_roots(delta, line, precision):
        size = abs(root) - rad
        if abs(root) > rad and size > 0:
            eps = min(eps, float(size) / 2)
    return eps


def _assemble(curve: Polynomial, delta: Polynomial, line, lift, proj_rows,
              config: WitnessConfig) -> ArcPair:
    reduced = squarefree_part(curve)
    verdict = plane_curve_ne(reduced)
    if config.require_non_ne and verdict.status is not Status.NON_NE:
        raise PreconditionError("the curve is NE; no non-NE witness exists")
    branches = puiseux_expand(reduced, precision=config.precision)
    if any(b.chart != "y" for b in branches):
        raise DomainError("a branch is tangent to the projection kernel; the frame is not general")
    b1, b2 = _choose_pair(branches, allow_transversal=not config.require_non_ne)
    q = separation_exponent(b1, b2)
    if config.require_non_ne and not q > 1:
        raise PreconditionError(f"separation exponent {q} does not exceed 1")
    eps = _choose_epsilon(delta, line, config.precision, config.epsilon)
    w = [complex(scalar_to_mpc(c)) for c in line]
    norm_w = math.sqrt(sum(abs(z) ** 2 for z in w))
    proj_norm = math.sqrt(sum(abs(complex(scalar_to_mpc(c))) ** 2 for row in proj_rows for c in row))
    return ArcPair(b1, b2, eps, tuple(z / norm_w for z in w), q, tuple(line),
                   tuple(tuple(row) for row in lift), delta, proj_norm, reduced)


def build_arc_pair(source: Polynomial | SliceCertificate,
                   config: WitnessConfig | None = None) -> ArcPair:
    """Arc pair on a non-NE plane curve or on the slice curve of a certificate."""
    config = config or WitnessConfig()
    if isinstance(source, SliceCertificate):
        M = source.frame.change_of_coordinates
        inv = inverse(M)
        n = source.frame.n
        return _assemble(source.slice_polynomial, source.discriminant, source.line_direction,
                         source.lift(), inv[: n - 1], config)
    f = source
    if f.nvars != 2:
        raise DomainError("plane-curve witnesses need 2 variables; pass a slice certificate")
    f = squarefree_part(f)
    frame = find_general_projection(f, config.seed, config.attempts)
    g = transformed(f, frame)
    delta = discriminant(f, frame, g)
    M = frame.change_of_coordinates
    return _assemble(g, delta, (ONE,), M, inverse(M)[:1], config)


# -- sampling ----------------------------------------------------------------------

def _check_ts(pair: ArcPair, ts: Sequence[float]) -> None:
    for t in ts:
        if not 0 < t <= pair.epsilon:
            raise DomainError(f"sample t = {t} lies outside (0, {pair.epsilon}]")


def _column_norm(pair: ArcPair, col: int) -> mpmath.mpf:
    return mpmath.sqrt(mpmath.fsum(abs(scalar_to_mpc(row[col])) ** 2 for row in pair.lift))


def _outer(pair: ArcPair, t: float) -> tuple[mpmath.mpf, mpmath.mpf]:
    """|u1(t) - u2(t)| * |kernel column|, summed term-wise to avoid cancellation."""
    b1, b2 = pair.branch1, pair.branch2
    coeffs: dict[Fraction, list] = {}
    for sign, b in ((1, b1), (-1, b2)):
        for term in b.series:
            slot = coeffs.setdefault(term.exponent, [mpmath.mpc(0), mpmath.mpf(0)])
            slot[0] += sign * term.coefficient
            slot[1] += term.radius
    lt = mpmath.log(mpmath.mpf(t))
    total = mpmath.mpc(0)
    rad = mpmath.mpf(0)
    for e, (c, r) in coeffs.items():
        te = mpmath.exp(lt * e.numerator / e.denominator)
        total += c * te
        rad += r * te
    limits = [b.truncation_exponent for b in (b1, b2) if b.truncation_exponent is not None]
    if limits:
        cap = min(limits) + Fraction(1, max(b1.p, b2.p))
        scale = max([abs(c) for c, _ in coeffs.values()] + [mpmath.mpf(1)])
        rad += scale * mpmath.exp(lt * cap.numerator / cap.denominator)
    col = _column_norm(pair, 1)
    return abs(total) * col, rad * col


def outer_distance_samples(pair: ArcPair, ts: Sequence[float]) -> list[float]:
    """Euclidean distances between the two arc points over t*w."""
    _check_ts(pair, ts)
    with mpmath.workprec(pair.branch1.precision):
        return [float(_outer(pair, t)[0]) for t in ts]


def _taylor_exclusion(delta: Polynomial, y0: Sequence, prec: int) -> mpmath.mpf:
    """Radius rho with no zero of delta in the ball B(y0, rho), from a Taylor majorant."""
    coeffs: dict[int, mpmath.mpf] = {}
    c0 = mpmath.mpc(0)
    for e, c in delta.terms.items():
        parts = [[(k, math.comb(ek, k) * y0[i] ** (ek - k)) for k in range(ek + 1)]
                 for i, ek in enumerate(e)]
        acc = {(): scalar_to_mpc(c)}
        for i, options in enumerate(parts):
            nxt = {}
            for key, val in acc.items():
                for k, factor in options:
                    nxt[key + (k,)] = nxt.get(key + (k,), 0) + val * factor
            acc = nxt
        for key, val in acc.items():
            deg = sum(key)
            if deg == 0:
                c0 += val
            else:
                coeffs[deg] = coeffs.get(deg, mpmath.mpf(0)) + abs(val)
    # summing contributions before taking moduli would be sharper; this bound is still valid
    target = abs(c0)
    if target == 0:
        return mpmath.mpf(0)

    def majorant(rho):
        return mpmath.fsum(a * rho ** k for k, a in coeffs.items())

    hi = mpmath.mpf(1)
    while majorant(hi) < target:
        hi *= 2
        if hi > 1e6:
            return hi
    lo = mpmath.mpf(0)
    for _ in range(80):
        mid = (lo + hi) / 2
        if majorant(mid) < target:
            lo = mid
        else:
            hi = mid
    return lo


def _distance_to_delta(pair: ArcPair, t: float, roots) -> mpmath.mpf:
    if pair.delta.is_constant():
        return mpmath.inf
    y0 = [mpmath.mpf(t) * scalar_to_mpc(c) for c in pair.line]
    if pair.delta.nvars == 1:
        best = mpmath.inf
        for root, _, rad in roots:
            best = min(best, abs(y0[0] - root) - rad)
        return best
    return _taylor_exclusion(pair.delta, y0, pair.branch1.precision)


def inner_lower_bound_samples(pair: ArcPair, delta: Polynomial | None, ts: Sequence[float],
                              warn: list | None = None) -> list[float | None]:
    """Certified lower bounds 2 d(t*w, V(delta)) / |pi| for the inner distance."""
    _check_ts(pair, ts)
    if delta is not None and delta != pair.delta:
        pair = ArcPair(**{**vars(pair), "delta": delta})
    out: list[float | None] = []
    with mpmath.workprec(pair.branch1.precision):
        roots = (univariate_roots(pair.delta, pair.branch1.precision)
                 if pair.delta.nvars == 1 and not pair.delta.is_constant() else [])
        for t in ts:
            d = _distance_to_delta(pair, t, roots)
            if not d > 0:
                if warn is not None:
                    warn.append(f"sample t = {t} lies on the discriminant; skipped")
                out.append(None)
                continue
            out.append(float(2 * d / pair.projection_norm))
    return out


def _arclength(pair: ArcPair, b: PuiseuxBranch, t: float) -> tuple[float, float]:
    lift = [[complex(scalar_to_mpc(c)) for c in row] for row in pair.lift]
    a = np.array([row[0] for row in lift])
    bb = np.array([row[1] for row in lift])
    aa = float(np.vdot(a, a).real)
    bn = float(np.vdot(bb, bb).real)
    ab = complex(np.vdot(a, bb))
    p = b.ramification_index
    terms = [(int(term.exponent * p), complex(term.coefficient)) for term in b.series]

    def speed(sigma: float) -> float:
        ds = p * sigma ** (p - 1)
        du = sum(n * c * sigma ** (n - 1) for n, c in terms)
        val = ds * ds * aa + abs(du) ** 2 * bn + 2 * (ds * du * ab.conjugate()).real
        return math.sqrt(max(val, 0.0))

    upper = t ** (1.0 / p)
    for limit in (200, 2000):
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                val, err = integrate.quad(speed, 0.0, upper, epsabs=0.0, epsrel=1e-13, limit=limit)
                return float(val), float(err + 4 * np.finfo(float).eps * val)
            except integrate.IntegrationWarning:
                continue
    raise PrecisionError("arclength quadrature did not converge")


def arclength_inner_estimate(pair: ArcPair, ts: Sequence[float],
                             with_error: bool = False) -> list:
    """Length of the path gamma1(t) -> 0 -> gamma2(t) along the two arcs."""
    _check_ts(pair, ts)
    out = []
    for t in ts:
        l1, e1 = _arclength(pair, pair.branch1, t)
        l2, e2 = _arclength(pair, pair.branch2, t)
        out.append((l1 + l2, e1 + e2) if with_error else l1 + l2)
    return out


def fit_growth_exponent(samples: Sequence) -> tuple[float, float]:
    """Least-squares slope of log(ratio) against log(t) and its confidence radius."""
    pts = [(s.t, s.ratio) if isinstance(s, WitnessSample) else (float(s[0]), float(s[1]))
           for s in samples]
    return _fit(pts)


def _fit(pts: list[tuple[float, float]]) -> tuple[float, float]:
    pts = [(t, r) for t, r in pts if t > 0 and r > 0]
    if len(pts) < 8:
        raise DomainError("at least 8 positive samples are needed for a fit")
    ts = [t for t, _ in pts]
    if math.log10(max(ts) / min(ts)) < 2:
        raise DomainError("samples must span at least two decades of t")
    fit = stats.linregress(np.log([t for t, _ in pts]), np.log([r for _, r in pts]))
    return float(fit.slope), max(3 * float(fit.stderr), MIN_RADIUS)


def sample_grid(epsilon: float, samples: int, t_range=DEFAULT_T_RANGE) -> list[float]:
    lo, hi = t_range
    if hi > epsilon:
        lo, hi = epsilon * lo / hi, epsilon
    return [float(x) for x in np.logspace(math.log10(lo), math.log10(hi), samples)]


def witness_report(pair: ArcPair, config: WitnessConfig | None = None) -> WitnessReport:
    config = config or WitnessConfig()
    ts = sample_grid(pair.epsilon, config.samples, config.t_range)
    notes: list[str] = []
    with mpmath.workprec(pair.branch1.precision):
        outers = [_outer(pair, t) for t in ts]
    inners = inner_lower_bound_samples(pair, None, ts, notes)
    arcs = arclength_inner_estimate(pair, ts, with_error=True)
    samples = []
    violations = []
    tiny = 4 * np.finfo(float).eps
    for t, (o, orad), lo, (arc, aerr) in zip(ts, outers, inners, arcs):
        if lo is None:
            continue
        o, orad = float(o), float(orad)
        samples.append(WitnessSample(t, o, orad, lo, arc, aerr, lo / o))
        if o > arc + aerr + orad + tiny * arc:
            violations.append(f"t={t:.3e}: outer {o:.6e} exceeds arclength {arc:.6e}")
        if lo > arc + aerr + tiny * arc:
            violations.append(f"t={t:.3e}: inner lower bound {lo:.6e} exceeds arclength {arc:.6e}")
    slope, radius = _fit([(s.t, s.ratio) for s in samples])
    oslope, oradius = _fit([(s.t, s.outer) for s in samples])
    if slope + radius < 0:
        conclusion = "RatioDiverges"
    elif slope - radius <= 0 <= slope + radius:
        conclusion = "Bounded"
    else:
        conclusion = "Inconclusive"
    cone_r = min(s.inner_lower * pair.projection_norm / 2 / s.t for s in samples)
    if not cone_r > 0:
        violations.append("base points are not uniformly separated from the discriminant")
    certified = all(s.outer > s.outer_radius for s in samples)
    return WitnessReport(samples, slope, radius, 1 - pair.separation_q, oslope, oradius,
                         conclusion, pair.separation_q, pair.epsilon, cone_r, certified,
                         violations, notes, pair.to_dict())


def witness(source: Polynomial | SliceCertificate, config: WitnessConfig | None = None
            ) -> WitnessReport:
    config = config or WitnessConfig()
    return witness_report(build_arc_pair(source, config), config)


__all__ = [
    "ArcPair",
    "WitnessConfig",
    "WitnessReport",
    "WitnessSample",
    "arclength_inner_estimate",
    "build_arc_pair",
    "fit_growth_exponent",
    "inner_lower_bound_samples",
    "outer_distance_samples",
    "sample_grid",
    "witness",
    "witness_report",
]
