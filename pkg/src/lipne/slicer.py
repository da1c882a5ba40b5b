"""One-sided non-NE test for hypersurface germs by slicing with admissible planes.

A general projection kills a line avoiding the tangent cone; its
discriminant is the reduced resultant in the kernel coordinate.  A line
outside the tangent cone of the discriminant pulls back to a plane, and
if the curve cut out on that plane is non-NE, so is the hypersurface.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .cone import has_multiple_component
from .curves import Reason, Status, Verdict, gradient_data, plane_curve_ne, polynomial_input, reduce_with_warning
from .errors import DomainError, SearchExhausted
from .poly import (
    ONE,
    ZERO,
    Polynomial,
    Scalar,
    determinant,
    resultant,
    scalar_to_pair,
    squarefree_part,
    to_scalar,
)

SLICE_VARIABLES = ("s", "u")


def _fresh(name: str, taken: Sequence[str]) -> str:
    while name in taken:
        name += "_"
    return name


@dataclass(frozen=True)
class ProjectionFrame:
    """Coordinates whose last axis is the kernel of the projection."""

    kernel_direction: tuple[Scalar, ...]
    change_of_coordinates: tuple[tuple[Scalar, ...], ...]
    generality_value: Scalar
    pivot: int

    @property
    def n(self) -> int:
        return len(self.kernel_direction)

    def to_dict(self) -> dict:
        return {
            "kernel_direction": [scalar_to_pair(c) for c in self.kernel_direction],
            "matrix": [[scalar_to_pair(c) for c in row] for row in self.change_of_coordinates],
            "generality_value": scalar_to_pair(self.generality_value),
            "pivot": self.pivot,
        }


def _parse_vector(v: Sequence) -> tuple[Scalar, ...]:
    vec = tuple(to_scalar(c) for c in v)
    if not vec or all(c == ZERO for c in vec):
        raise DomainError("zero direction")
    return vec


def frame_matrix(v: Sequence[Scalar]) -> tuple[tuple[tuple[Scalar, ...], ...], int]:
    """Standard basis with the pivot column removed and ``v`` appended last."""
    n = len(v)
    pivot = next(k for k, c in enumerate(v) if c != ZERO)
    cols = [tuple(ONE if r == k else ZERO for r in range(n)) for k in range(n) if k != pivot]
    cols.append(tuple(v))
    return tuple(tuple(cols[c][r] for c in range(n)) for r in range(n)), pivot


def is_general(f: Polynomial, v: Sequence) -> ProjectionFrame | None:
    """Frame for the projection with kernel span(v), if f_d(v) != 0."""
    vec = _parse_vector(v)
    if len(vec) != f.nvars:
        raise DomainError(f"direction has {len(vec)} entries, expected {f.nvars}")
    value = f.initial_form().evaluate(vec)
    if value == ZERO:
        return None
    M, pivot = frame_matrix(vec)
    return ProjectionFrame(vec, M, value, pivot)


def _random_vector(rng: random.Random, n: int, height: int) -> tuple[Scalar, ...]:
    while True:
        vec = tuple(to_scalar((rng.randint(-height, height), rng.randint(-height, height)))
                    for _ in range(n))
        if any(c != ZERO for c in vec):
            return vec


def _unit(n: int, k: int) -> tuple[Scalar, ...]:
    return tuple(ONE if j == k else ZERO for j in range(n))


def direction_candidates(n: int, seed: int, attempts: int, height: int,
                         include_basis: bool = True) -> Iterator[tuple[Scalar, ...]]:
    """Deterministic candidate directions: basis vectors, the all-ones vector, then random."""
    rng = random.Random(f"{seed}:{n}:{height}")
    seen = set()
    produced = 0
    fixed = [_unit(n, k) for k in range(n)] + [tuple(ONE for _ in range(n))] if include_basis else []
    for vec in fixed:
        if produced >= attempts:
            return
        if vec not in seen:
            seen.add(vec)
            produced += 1
            yield vec
    misses = 0
    while produced < attempts and misses < 50 * attempts:
        vec = _random_vector(rng, n, height)
        if vec in seen:
            misses += 1
            continue
        seen.add(vec)
        produced += 1
        yield vec


def find_general_projection(f: Polynomial, seed: int = 0, attempts: int = 32,
                            height: int = 5) -> ProjectionFrame:
    if f.is_zero or f.constant_coefficient() != ZERO:
        raise DomainError("not a germ through the origin")
    log = []
    for v in direction_candidates(f.nvars, seed, attempts, height):
        frame = is_general(f, v)
        if frame is not None:
            return frame
        log.append({"direction": [scalar_to_pair(c) for c in v], "generality_value": ["0", "0"]})
    raise SearchExhausted("no general projection found", log)


def kernel_variable(f: Polynomial, frame: ProjectionFrame) -> str:
    return _fresh("u", [v for k, v in enumerate(f.variables) if k != frame.pivot])


def transformed(f: Polynomial, frame: ProjectionFrame) -> Polynomial:
    """g = f o M in variables (original names minus the pivot, kernel variable)."""
    names = [v for k, v in enumerate(f.variables) if k != frame.pivot]
    names.append(kernel_variable(f, frame))
    M = frame.change_of_coordinates
    forms = []
    for row in M:
        terms = {}
        for c, coeff in enumerate(row):
            if coeff != ZERO:
                e = [0] * f.nvars
                e[c] = 1
                terms[tuple(e)] = coeff
        forms.append(Polynomial(names, terms))
    return f.substitute(forms, names)


def discriminant(f: Polynomial, frame: ProjectionFrame, g: Polynomial | None = None) -> Polynomial:
    """Reduced Res_u(g, dg/du), a polynomial in the n-1 base coordinates."""
    if g is None:
        g = transformed(f, frame)
    u = g.nvars - 1
    res = resultant(g, g.diff(u), u)
    if res.is_zero:
        raise DomainError("resultant vanishes identically: f not reduced or kernel line inside X")
    if res.is_constant():
        return Polynomial.constant(ONE, res.variables)
    return squarefree_part(res)


def is_admissible_line(delta: Polynomial, w: Sequence) -> Scalar | None:
    """Initial form of delta at w when nonzero (line not inside the cone of delta)."""
    if delta.is_zero:
        raise DomainError("zero discriminant")
    vec = _parse_vector(w)
    if len(vec) != delta.nvars:
        raise DomainError(f"line direction has {len(vec)} entries, expected {delta.nvars}")
    value = delta.initial_form().evaluate(vec)
    return None if value == ZERO else value


def slice_polynomial(g: Polynomial, w: Sequence[Scalar]) -> Polynomial:
    """g(s*w, u) as a polynomial in (s, u)."""
    out: dict[tuple[int, int], Scalar] = {}
    wpow = [[ONE] for _ in w]
    for e, c in g.terms.items():
        coeff = c
        for k, ek in enumerate(e[:-1]):
            pw = wpow[k]
            while len(pw) <= ek:
                pw.append(pw[-1] * w[k])
            coeff = coeff * pw[ek]
            if coeff == ZERO:
                break
        if coeff == ZERO:
            continue
        key = (sum(e[:-1]), e[-1])
        out[key] = out.get(key, ZERO) + coeff
    return Polynomial(SLICE_VARIABLES, out)


@dataclass(frozen=True)
class SliceCertificate:
    polynomial: Polynomial
    frame: ProjectionFrame
    discriminant: Polynomial
    line_direction: tuple[Scalar, ...]
    admissibility_value: Scalar
    slice_polynomial: Polynomial
    slice_verdict: Verdict

    def lift(self) -> list[list[Scalar]]:
        """n x 2 matrix mapping slice coordinates (s, u) to ambient coordinates."""
        M = self.frame.change_of_coordinates
        n = self.frame.n
        w_ext = list(self.line_direction) + [ZERO]
        s_col = [sum((M[r][c] * w_ext[c] for c in range(n)), ZERO) for r in range(n)]
        u_col = [M[r][n - 1] for r in range(n)]
        return [[s_col[r], u_col[r]] for r in range(n)]

    def to_dict(self) -> dict:
        return {
            "polynomial": str(self.polynomial),
            "variables": list(self.polynomial.variables),
            "frame": self.frame.to_dict(),
            "discriminant": str(self.discriminant),
            "discriminant_variables": list(self.discriminant.variables),
            "line_direction": [scalar_to_pair(c) for c in self.line_direction],
            "admissibility_value": scalar_to_pair(self.admissibility_value),
            "slice_polynomial": str(self.slice_polynomial),
            "slice_verdict": self.slice_verdict.to_dict(),
        }


def build_certificate(f: Polynomial, frame: ProjectionFrame, w: Sequence,
                      g: Polynomial | None = None, delta: Polynomial | None = None
                      ) -> SliceCertificate | None:
    """Certificate data for (frame, w), or None if w is not admissible."""
    if g is None:
        g = transformed(f, frame)
    if delta is None:
        delta = discriminant(f, frame, g)
    vec = _parse_vector(w)
    value = is_admissible_line(delta, vec)
    if value is None:
        return None
    sl = slice_polynomial(g, vec)
    return SliceCertificate(f, frame, delta, vec, value, sl, plane_curve_ne(sl))


@dataclass(frozen=True)
class SliceConfig:
    seed: int = 0
    attempts: int = 32
    line_attempts: int = 32
    height: int = 5
    rounds: int = 2
    use_cone_shortcut: bool = True

    def __post_init__(self):
        if not 1 <= self.attempts <= 1024 or not 1 <= self.line_attempts <= 1024:
            raise DomainError("attempts must lie in [1, 1024]")
        if self.height < 1 or self.rounds < 0:
            raise DomainError("height must be positive and rounds non-negative")


@dataclass
class _Search:
    log: list = field(default_factory=list)

    def note(self, **entry) -> None:
        self.log.append(entry)


def _pair(v) -> list:
    return [scalar_to_pair(c) for c in v]


def sectional_test(f: Polynomial, config: SliceConfig | None = None) -> Verdict:
    """Smooth / cone-shortcut / slicing pipeline.  Never returns NE for a singular germ."""
    config = config or SliceConfig()
    n = f.nvars
    if n < 3:
        raise DomainError("the sectional test needs a hypersurface in at least 3 variables")
    echo = polynomial_input(f)
    f, warnings = reduce_with_warning(f)
    warnings = tuple(warnings)
    if any(c != ZERO for c in f.gradient_at_origin()):
        return Verdict(Status.NE, Reason("Smooth", {"gradient": gradient_data(f)}), warnings, echo)
    if config.use_cone_shortcut:
        witness = has_multiple_component(f)
        if witness is not None:
            return Verdict(Status.NON_NE, Reason("MultipleConeComponent", {
                "initial_form": str(f.initial_form()), "witness": str(witness)}), warnings, echo)
    search = _Search()
    tried_frames = set()
    for rnd in range(config.rounds + 1):
        height = config.height * 2 ** rnd
        for v in direction_candidates(n, config.seed, config.attempts, height, include_basis=rnd == 0):
            if v in tried_frames:
                continue
            tried_frames.add(v)
            frame = is_general(f, v)
            if frame is None:
                search.note(round=rnd, kernel=_pair(v), general=False)
                continue
            g = transformed(f, frame)
            try:
                delta = discriminant(f, frame, g)
            except DomainError as exc:
                search.note(round=rnd, kernel=_pair(v), general=True, error=str(exc))
                continue
            slopes = set()
            for w in direction_candidates(n - 1, config.seed + 1, config.line_attempts, height):
                key = _projective_key(w)
                if key in slopes:
                    continue
                slopes.add(key)
                cert = build_certificate(f, frame, w, g, delta)
                if cert is None:
                    search.note(round=rnd, kernel=_pair(v), discriminant=str(delta),
                                line=_pair(w), admissible=False)
                    continue
                if cert.slice_verdict.status is Status.NON_NE:
                    return Verdict(Status.NON_NE,
                                   Reason("SliceWitness", {"certificate": cert.to_dict()}),
                                   warnings, echo)
                search.note(round=rnd, kernel=_pair(v), discriminant=str(delta), line=_pair(w),
                            admissible=True, slice=str(cert.slice_polynomial),
                            slice_status=cert.slice_verdict.status.value)
    return Verdict(Status.INCONCLUSIVE, Reason("ExhaustedSearch", {
        "attempts": search.log,
        "note": "no admissible slice produced a non-NE curve; the criterion is one-sided",
    }), warnings, echo)


def _projective_key(w: tuple[Scalar, ...]) -> tuple:
    pivot = next(c for c in w if c != ZERO)
    return tuple(c / pivot for c in w)


def brieskorn_polynomial(exponents: Sequence[int], coefficients: Sequence | None = None
                         ) -> Polynomial:
    n = len(exponents)
    names = tuple(f"x{k + 1}" for k in range(n))
    coefficients = [1] * n if coefficients is None else list(coefficients)
    if len(coefficients) != n:
        raise DomainError("one coefficient per exponent is required")
    terms = {}
    for k, (e, c) in enumerate(zip(exponents, coefficients)):
        if int(e) < 1:
            raise DomainError(f"exponent {e} must be at least 1")
        c = to_scalar(c)
        if c == ZERO:
            raise DomainError("Brieskorn coefficients must be nonzero")
        exps = [0] * n
        exps[k] = int(e)
        terms[tuple(exps)] = c
    return Polynomial(names, terms)


def brieskorn_hypothesis(exponents: Sequence[int]) -> tuple[bool, list[int], list[int]]:
    perm = sorted(range(len(exponents)), key=lambda k: (exponents[k], k))
    ks = [int(exponents[k]) for k in perm]
    ok = len(ks) >= 2 and 1 < ks[0] < ks[1] and all(a <= b for a, b in zip(ks[1:], ks[2:]))
    return ok, ks, perm


def brieskorn_test(exponents: Sequence[int], coefficients: Sequence | None = None) -> Verdict:
    """Non-NE shortcut for a1*x1^k1 + ... + an*xn^kn."""
    if len(exponents) < 2:
        raise DomainError("need at least two exponents")
    f = brieskorn_polynomial(exponents, coefficients)
    if len(exponents) == 2:
        return plane_curve_ne(f)
    ok, ks, perm = brieskorn_hypothesis(exponents)
    echo = {"exponents": [int(k) for k in exponents],
            "coefficients": [scalar_to_pair(to_scalar(c)) for c in
                             (coefficients if coefficients is not None else [1] * len(exponents))],
            **polynomial_input(f)}
    if ok:
        return Verdict(Status.NON_NE, Reason("BrieskornExponents", {
            "sorted_exponents": ks, "permutation": perm}), (), echo)
    return Verdict(Status.INCONCLUSIVE, Reason("ExhaustedSearch", {
        "attempts": [],
        "note": f"sorted exponents {ks} do not satisfy 1 < k1 < k2 <= ... <= kn; no conclusion",
    }), (), echo)


def check_frame(f: Polynomial, data: dict) -> ProjectionFrame:
    """Rebuild a frame from JSON and check it against f."""
    from .poly import scalar_from_pair

    v = tuple(scalar_from_pair(p) for p in data["kernel_direction"])
    M = tuple(tuple(scalar_from_pair(p) for p in row) for row in data["matrix"])
    n = f.nvars
    if len(v) != n or len(M) != n or any(len(row) != n for row in M):
        raise DomainError("frame dimensions do not match the polynomial")
    if any(M[r][n - 1] != v[r] for r in range(n)):
        raise DomainError("last column of the frame matrix is not the kernel direction")
    if determinant(M) == ZERO:
        raise DomainError("frame matrix is singular")
    expected, pivot = frame_matrix(v)
    if M != expected or int(data["pivot"]) != pivot:
        raise DomainError("frame matrix is not the pivot completion of the kernel direction")
    value = f.initial_form().evaluate(v)
    if value == ZERO or value != scalar_from_pair(data["generality_value"]):
        raise DomainError("generality value does not re-verify")
    return ProjectionFrame(v, M, value, pivot)


def certificate_from_dict(data: dict) -> SliceCertificate:
    """Rebuild a certificate from its JSON form, re-deriving every computed field.

    Raises :class:`DomainError` if any stored field disagrees with the
    recomputation.
    """
    from .parser import parse_polynomial
    from .poly import scalar_from_pair

    f = parse_polynomial(data["polynomial"], data["variables"])
    frame = check_frame(f, data["frame"])
    w = tuple(scalar_from_pair(p) for p in data["line_direction"])
    cert = build_certificate(f, frame, w)
    if cert is None:
        raise DomainError("line direction is not admissible")
    if cert.to_dict() != data:
        diffs = [k for k in data if cert.to_dict().get(k) != data[k]]
        raise DomainError(f"certificate fields do not re-verify: {', '.join(diffs) or 'extra keys'}")
    return cert
