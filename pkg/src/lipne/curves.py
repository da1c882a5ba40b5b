"""NE decisions for curve germs, and the verdict type shared by all deciders."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Sequence

import mpmath

from .cone import has_multiple_component
from .errors import DomainError, PrecisionError
from .poly import Polynomial, ZERO, is_squarefree, scalar_to_pair, squarefree_part
from .puiseux import PuiseuxBranch, SpaceBranch

SCHEMA_VERSION = "lipne-verdict/1"


class Status(str, Enum):
    NE = "NE"
    NON_NE = "NonNE"
    INCONCLUSIVE = "Inconclusive"


REASON_KINDS = (
    "Smooth",
    "ReducedCone",
    "NonReducedCone",
    "SingularBranch",
    "TangentBranchPair",
    "MultipleConeComponent",
    "SliceWitness",
    "BrieskornExponents",
    "ExhaustedSearch",
)


@dataclass(frozen=True)
class Reason:
    kind: str
    data: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in REASON_KINDS:
            raise ValueError(f"unknown reason kind {self.kind!r}")


@dataclass(frozen=True)
class Verdict:
    status: Status
    reason: Reason
    warnings: tuple[str, ...] = ()
    input: dict | None = None

    def to_dict(self) -> dict:
        out: dict[str, Any] = {
            "schema": SCHEMA_VERSION,
            "status": self.status.value,
            "reason": {"kind": self.reason.kind, **self.reason.data},
            "warnings": list(self.warnings),
        }
        if self.input is not None:
            out["input"] = self.input
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Verdict":
        reason = dict(data["reason"])
        kind = reason.pop("kind")
        return cls(Status(data["status"]), Reason(kind, reason),
                   tuple(data.get("warnings", ())), data.get("input"))


def polynomial_input(f: Polynomial) -> dict:
    return {"polynomial": str(f), "variables": list(f.variables)}


def reduce_with_warning(f: Polynomial) -> tuple[Polynomial, list[str]]:
    if f.is_zero:
        raise DomainError("zero polynomial")
    if f.constant_coefficient() != ZERO:
        raise DomainError("not a germ through the origin")
    if is_squarefree(f):
        return f, []
    g = squarefree_part(f)
    return g, [f"input is not reduced; replaced by its squarefree part {g}"]


def gradient_data(f: Polynomial) -> list:
    return [scalar_to_pair(c) for c in f.gradient_at_origin()]


def plane_curve_ne(f: Polynomial) -> Verdict:
    """Complete decision for a plane curve germ: NE iff the initial form is squarefree."""
    if f.nvars != 2:
        raise DomainError(f"plane curves need 2 variables, got {f.nvars}")
    echo = polynomial_input(f)
    if f.is_zero or f.constant_coefficient() != ZERO:
        raise DomainError("not a germ through the origin")
    # a squarefree initial form forces f itself to be reduced
    witness = has_multiple_component(f)
    g, warnings = (f, []) if witness is None else reduce_with_warning(f)
    if g is not f:
        witness = has_multiple_component(g)
    fd = g.initial_form()
    if fd.total_degree == 1:
        return Verdict(Status.NE, Reason("Smooth", {"gradient": gradient_data(g)}),
                       tuple(warnings), echo)
    if witness is None:
        return Verdict(Status.NE, Reason("ReducedCone", {"initial_form": str(fd)}),
                       tuple(warnings), echo)
    return Verdict(Status.NON_NE,
                   Reason("NonReducedCone", {"initial_form": str(fd), "witness": str(witness)}),
                   tuple(warnings), echo)


def _as_space(b) -> SpaceBranch:
    if isinstance(b, SpaceBranch):
        return b
    if isinstance(b, PuiseuxBranch):
        return SpaceBranch.from_plane(b)
    raise TypeError(f"expected a branch, got {type(b).__name__}")


def _ball_zero(val, rad) -> bool | None:
    """True if certainly zero, False if certainly nonzero, None otherwise."""
    a = abs(val)
    if a == 0 and rad == 0:
        return True
    if a > rad:
        return False
    return None


def tangents_equal(b1: SpaceBranch, b2: SpaceBranch) -> bool:
    """Projective equality of tangent lines, decided exactly or raised as retryable."""
    if b1.tangent_key is not None and b2.tangent_key is not None:
        if b1.tangent_key[0] == b2.tangent_key[0]:
            return b1.tangent_key == b2.tangent_key
    d1, d2 = b1.tangent(), b2.tangent()
    undecided = False
    for a, b in itertools.combinations(range(len(d1)), 2):
        (x1, r1), (y1, s1) = d1[a], d1[b]
        (x2, r2), (y2, s2) = d2[a], d2[b]
        minor = x1 * y2 - y1 * x2
        rad = (abs(x1) * s2 + abs(y2) * r1 + r1 * s2) + (abs(y1) * r2 + abs(x2) * s1 + s1 * r2)
        z = _ball_zero(minor, rad)
        if z is False:
            return False
        if z is None:
            undecided = True
    if undecided:
        raise PrecisionError("tangent directions overlap within their error radii; "
                             "supply more precise branches")
    return True


def _format_tangent(b: SpaceBranch) -> list:
    return [[mpmath.nstr(v.real, 20), mpmath.nstr(v.imag, 20)] for v, _ in b.tangent()]


def space_curve_ne(branches: Sequence, echo: dict | None = None) -> Verdict:
    """Complete decision for a curve given by its branches: NE iff all smooth and transversal."""
    if not branches:
        raise DomainError("empty branch list")
    bs = [_as_space(b) for b in branches]
    n = bs[0].dimension
    if any(b.dimension != n for b in bs):
        raise DomainError("branches live in different ambient dimensions")
    for i, j in itertools.combinations(range(len(bs)), 2):
        if bs[i] == bs[j] and bs[i].truncation_exponent is None:
            raise DomainError(f"branches {i} and {j} are identical")
    if echo is None:
        echo = {"branches": [b.to_dict() for b in bs]}
    evidence = {"ramification_indices": [b.ramification_index for b in bs]}
    for i, b in enumerate(bs):
        if not b.is_smooth():
            return Verdict(Status.NON_NE, Reason("SingularBranch", {
                "branch": i, "ramification_index": b.ramification_index, **evidence}), (), echo)
    evidence["tangents"] = [_format_tangent(b) for b in bs]
    for i, j in itertools.combinations(range(len(bs)), 2):
        if tangents_equal(bs[i], bs[j]):
            return Verdict(Status.NON_NE, Reason("TangentBranchPair", {
                "branches": [i, j], "tangent": _format_tangent(bs[i]), **evidence}), (), echo)
    return Verdict(Status.NE, Reason("Smooth" if len(bs) == 1 else "ReducedCone",
                                     {"branch_count": len(bs), **evidence}), (), echo)
