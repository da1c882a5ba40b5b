"""Independent re-checking of verdict files.

Every witness value in a verdict is recomputed from the recorded input,
and the stored document must then coincide field for field with the
re-derived one, so perturbing any single field makes the check fail.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .curves import Status, Verdict, plane_curve_ne, reduce_with_warning, space_curve_ne
from .errors import LipneError
from .parser import parse_polynomial
from .poly import ZERO, Polynomial, divides, gcd, scalar_from_pair
from .puiseux import SpaceBranch
from .slicer import brieskorn_hypothesis, brieskorn_polynomial, brieskorn_test, certificate_from_dict


@dataclass
class Revalidation:
    ok: bool | None
    checks: list[tuple[str, bool, str]] = field(default_factory=list)

    def record(self, name: str, passed: bool, detail: str = "") -> bool:
        self.checks.append((name, bool(passed), detail))
        return bool(passed)

    def to_dict(self) -> dict:
        return {
            "schema": "lipne-revalidation/1",
            "valid": self.ok,
            "checks": [{"check": n, "passed": p, "detail": d} for n, p, d in self.checks],
        }


def _poly(text: str, variables) -> Polynomial:
    return parse_polynomial(text, variables)


def _check_repeated(fd: Polynomial, witness_text: str, res: Revalidation) -> None:
    w = _poly(witness_text, fd.variables)
    res.record("witness is nonconstant", not w.is_constant())
    res.record("witness squared divides the initial form", divides(w * w, fd))


def _check_reduced(fd: Polynomial, res: Revalidation) -> None:
    g = fd
    for k in range(fd.nvars):
        g = gcd(g, fd.diff(k))
    res.record("initial form is squarefree", g.is_constant())


def _check_polynomial_verdict(data: dict, res: Revalidation) -> Verdict:
    echo = data["input"]
    f = _poly(echo["polynomial"], echo["variables"])
    res.record("input echo re-renders", str(f) == echo["polynomial"])
    reason = data["reason"]
    kind = reason["kind"]
    g, _ = reduce_with_warning(f)
    fd = g.initial_form()
    if kind == "Smooth":
        grad = [scalar_from_pair(p) for p in reason["gradient"]]
        res.record("gradient re-evaluates", grad == g.gradient_at_origin())
        res.record("gradient is nonzero", any(c != ZERO for c in grad))
    elif kind in ("ReducedCone", "NonReducedCone", "MultipleConeComponent"):
        res.record("initial form matches", _poly(reason["initial_form"], f.variables) == fd)
        if kind == "ReducedCone":
            _check_reduced(fd, res)
        else:
            _check_repeated(fd, reason["witness"], res)
    elif kind == "SliceWitness":
        cert = certificate_from_dict(reason["certificate"])
        res.record("certificate polynomial is the reduced input", cert.polynomial == g)
        res.record("generality value nonzero", cert.frame.generality_value != ZERO)
        res.record("admissibility value nonzero", cert.admissibility_value != ZERO)
        res.record("slice curve is non-NE", cert.slice_verdict.status is Status.NON_NE)
    else:
        res.record(f"reason {kind} applies to polynomial input", False)
    if f.nvars == 2:
        return plane_curve_ne(f)
    from .slicer import SliceConfig, sectional_test
    if kind == "SliceWitness":
        return _slice_verdict(f, data)
    return sectional_test(f, SliceConfig(attempts=1, line_attempts=1, rounds=0))


def _slice_verdict(f: Polynomial, data: dict) -> Verdict:
    from .curves import Reason, polynomial_input

    g, warnings = reduce_with_warning(f)
    cert = certificate_from_dict(data["reason"]["certificate"])
    return Verdict(Status.NON_NE, Reason("SliceWitness", {"certificate": cert.to_dict()}),
                   tuple(warnings), polynomial_input(f))


def _check_brieskorn(data: dict, res: Revalidation) -> Verdict:
    echo = data["input"]
    exps = [int(k) for k in echo["exponents"]]
    coeffs = [scalar_from_pair(p) for p in echo["coefficients"]]
    f = brieskorn_polynomial(exps, coeffs)
    res.record("polynomial matches exponents", str(f) == echo["polynomial"]
               and list(f.variables) == echo["variables"])
    ok, ks, perm = brieskorn_hypothesis(exps)
    if data["reason"]["kind"] == "BrieskornExponents":
        res.record("sorted exponents satisfy the hypothesis", ok)
        res.record("sorted exponents recorded", data["reason"].get("sorted_exponents") == ks)
        res.record("permutation recorded", data["reason"].get("permutation") == perm)
    return brieskorn_test(exps, coeffs)


def _check_branches(data: dict, res: Revalidation) -> Verdict:
    branches = [SpaceBranch.from_dict(b) for b in data["input"]["branches"]]
    verdict = space_curve_ne(branches, echo=data["input"])
    reason = data["reason"]
    if reason["kind"] == "SingularBranch":
        b = branches[reason["branch"]]
        res.record("branch is ramified", b.ramification_index > 1)
    elif reason["kind"] == "TangentBranchPair":
        from .curves import tangents_equal
        i, j = reason["branches"]
        res.record("tangents coincide", tangents_equal(branches[i], branches[j]))
    return verdict


def revalidate(data: dict) -> Revalidation:
    """Re-check a verdict document; ``ok`` is None for Inconclusive verdicts."""
    res = Revalidation(None)
    try:
        status = Status(data["status"])
        if status is Status.INCONCLUSIVE:
            res.record("verdict carries a certificate", False,
                       "Inconclusive verdicts certify nothing")
            return res
        echo = data["input"]
        if "exponents" in echo:
            rebuilt = _check_brieskorn(data, res)
        elif "branches" in echo:
            rebuilt = _check_branches(data, res)
        else:
            rebuilt = _check_polynomial_verdict(data, res)
        res.record("document matches re-derivation", rebuilt.to_dict() == data)
    except (LipneError, ValueError, KeyError, TypeError, IndexError, AttributeError) as exc:
        res.record("document parses and re-derives", False, f"{type(exc).__name__}: {exc}")
    res.ok = all(p for _, p, _ in res.checks)
    return res
