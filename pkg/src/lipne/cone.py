"""Tangent cones of hypersurface germs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import mpmath

from .errors import DomainError
from .poly import (
    Polynomial,
    ZERO,
    gcd,
    squarefree_part,
    to_scalar,
)
from .puiseux import DEFAULT_PRECISION, univariate_roots


@dataclass(frozen=True)
class BinaryFactor:
    """Linear factor of a binary form, given by the direction it vanishes on."""

    direction: tuple[mpmath.mpc, mpmath.mpc]
    multiplicity: int
    radius: mpmath.mpf = mpmath.mpf(0)

    def to_dict(self) -> dict:
        return {
            "direction": [[mpmath.nstr(z.real, 25), mpmath.nstr(z.imag, 25)] for z in self.direction],
            "multiplicity": self.multiplicity,
            "radius": mpmath.nstr(self.radius, 5),
        }


@dataclass(frozen=True)
class TangentCone:
    initial_form: Polynomial
    reduced_form: Polynomial
    repeated_factor: Polynomial | None
    binary_factorization: tuple[BinaryFactor, ...] | None = None

    @property
    def degree(self) -> int:
        return self.initial_form.total_degree

    @property
    def is_reduced(self) -> bool:
        return self.repeated_factor is None

    def to_dict(self) -> dict:
        return {
            "initial_form": str(self.initial_form),
            "reduced_form": str(self.reduced_form),
            "squarefree": self.is_reduced,
            "witness": None if self.repeated_factor is None else str(self.repeated_factor),
            "binary_factors": (None if self.binary_factorization is None
                               else [b.to_dict() for b in self.binary_factorization]),
        }


def _check_germ(f: Polynomial) -> None:
    if f.is_zero:
        raise DomainError("zero polynomial")
    if f.constant_coefficient() != ZERO:
        raise DomainError("not a germ through the origin")


def _binary_repeated_factor(fd: Polynomial) -> Polynomial | None:
    # dehomogenize at the first variable; the point at infinity is the second axis
    d = fd.total_degree
    dehom = Polynomial(("z",), {(e[1],): c for e, c in fd.terms.items()})
    m_inf = d - dehom.total_degree
    x = Polynomial.variable(fd.variables[0], fd.variables)
    witness = None
    if dehom.total_degree > 1:
        g = gcd(dehom, dehom.diff(0))
        if not g.is_constant():
            h = squarefree_part(g)
            k = h.total_degree
            witness = Polynomial(fd.variables, {(k - e[0], e[0]): c for e, c in h.terms.items()})
    if m_inf >= 2:
        witness = x if witness is None else witness * x
    return None if witness is None else witness.monic()


def _repeated_factor(fd: Polynomial) -> Polynomial | None:
    if fd.nvars == 2:
        return _binary_repeated_factor(fd)
    g = fd
    for k in range(fd.nvars):
        g = gcd(g, fd.diff(k))
    if g.is_constant():
        return None
    return squarefree_part(g)


def has_multiple_component(f: Polynomial) -> Polynomial | None:
    """A factor of the initial form occurring with multiplicity >= 2, if any."""
    _check_germ(f)
    return _repeated_factor(f.initial_form())


def binary_factors(fd: Polynomial, precision: int = DEFAULT_PRECISION) -> tuple[BinaryFactor, ...]:
    """Directions (1, z) and possibly (0, 1) on which a binary form vanishes."""
    if fd.nvars != 2 or not fd.is_homogeneous():
        raise DomainError("binary factorization needs a homogeneous form in two variables")
    d = fd.total_degree
    dehom = Polynomial(("z",), {(e[1],): c for e, c in fd.terms.items()})
    out = []
    with mpmath.workprec(precision):
        if not dehom.is_constant():
            for root, mult, rad in univariate_roots(dehom, precision):
                out.append(BinaryFactor((mpmath.mpc(1), root), mult, rad))
        at_infinity = d - dehom.total_degree
        if at_infinity:
            out.append(BinaryFactor((mpmath.mpc(0), mpmath.mpc(1)), at_infinity))
    return tuple(out)


def tangent_cone(f: Polynomial, precision: int = DEFAULT_PRECISION) -> TangentCone:
    _check_germ(f)
    fd = f.initial_form()
    reduced = squarefree_part(fd)
    factors = binary_factors(fd, precision) if f.nvars == 2 else None
    return TangentCone(fd, reduced, _repeated_factor(fd), factors)


def cone_contains_line(cone: TangentCone | Polynomial, v: Sequence) -> bool:
    """True iff the initial form vanishes on span(v)."""
    fd = cone.initial_form if isinstance(cone, TangentCone) else cone
    point = [to_scalar(c) for c in v]
    if len(point) != fd.nvars:
        raise DomainError(f"direction has {len(point)} entries, expected {fd.nvars}")
    if all(c == ZERO for c in point):
        raise DomainError("zero direction")
    return fd.evaluate(point) == ZERO
