from fractions import Fraction

import mpmath
import pytest

from corpus import PLANE_CORPUS, random_squarefree_curves
from lipne.errors import DomainError, PreconditionError, TruncationError
from lipne.parser import parse_polynomial
from lipne.puiseux import (PuiseuxBranch, SpaceBranch, Term, branch_is_smooth, branch_tangent,
                           newton_polygon, puiseux_expand, residual_check, separation_exponent,
                           univariate_roots)

XY = ("x", "y")
DENSE = "y^3 - 2*x*y^2 + 3*x^2*y + x^4 - 5*x^3*y + 2*x^2*y^3 - x^5 + 4*x*y^4"


def f_(text):
    return parse_polynomial(text, XY)


def close(z, w, tol=1e-30):
    return abs(mpmath.mpc(z) - mpmath.mpc(w)) < tol


class TestNewtonPolygon:
    @pytest.mark.parametrize("text, start, end, slope", [
        ("y^2-x^3", (0, 2), (3, 0), Fraction(-2, 3)),
        ("y^2+x^4", (0, 2), (4, 0), Fraction(-1, 2)),
        ("x^2-y^2", (0, 2), (2, 0), Fraction(-1)),
    ])
    def test_single_edge(self, text, start, end, slope):
        (edge,) = newton_polygon(f_(text)).edges
        assert (edge.start, edge.end, edge.slope) == (start, end, slope)

    def test_not_a_germ(self):
        with pytest.raises(DomainError):
            newton_polygon(f_("1+x"))

    def test_monomial_factors(self):
        poly = newton_polygon(f_("x*y*(1+x)"))
        assert poly.edges == () and (poly.x_factor, poly.y_factor) == (1, 1)


class TestExpansion:
    def test_cusp(self):
        (b,) = puiseux_expand(f_("y^2-x^3"))
        assert b.p == 2 and b.conjugacy_size == 2 and b.exact
        assert [t.exponent for t in b.series] == [Fraction(3, 2)]
        assert close(b.series[0].coefficient ** 2, 1)

    def test_two_lines(self):
        bs = puiseux_expand(f_("x^2-y^2"))
        assert [b.p for b in bs] == [1, 1]
        assert sorted(float(b.series[0].coefficient.real) for b in bs) == [-1.0, 1.0]
        assert all(b.leading_exponent == 1 for b in bs)

    def test_tacnode_pair(self):
        bs = puiseux_expand(f_("y^2+x^4"))
        coeffs = sorted(complex(b.series[0].coefficient).imag for b in bs)
        assert coeffs == [-1.0, 1.0]
        assert all(b.leading_exponent == 2 and b.p == 1 for b in bs)

    def test_vertical_branch_uses_swapped_chart(self):
        (b,) = puiseux_expand(f_("x^2+y^3"))
        assert b.chart == "x" and b.p == 2
        assert [t.exponent for t in b.series] == [Fraction(3, 2)]

    def test_rejects_non_squarefree(self):
        with pytest.raises(PreconditionError, match="repeated factor x"):
            puiseux_expand(f_("x^2*y+x^5"))

    def test_rejects_non_germs(self):
        with pytest.raises(DomainError):
            puiseux_expand(f_("1+x*y"))
        with pytest.raises(DomainError):
            puiseux_expand(parse_polynomial("x+y+z"))

    def test_deterministic(self):
        a = [b.to_dict() for b in puiseux_expand(f_(DENSE))]
        b = [b.to_dict() for b in puiseux_expand(f_(DENSE))]
        assert a == b


class TestInvariants:
    @pytest.mark.parametrize("text", PLANE_CORPUS)
    def test_multiplicity_accounting(self, text):
        f = f_(text)
        bs = puiseux_expand(f)
        total = sum(b.p * min(Fraction(1), b.leading_exponent or 1) for b in bs)
        assert total == f.order_at_origin()

    def test_random_curves(self):
        for f in random_squarefree_curves(count=40, seed=7):
            bs = puiseux_expand(f)
            assert sum(b.p for b in bs) == f.order_at_origin()
            assert max(residual_check(f, b) for b in bs) < 1e-15

    @pytest.mark.parametrize("text", PLANE_CORPUS)
    def test_conjugacy_closure(self, text):
        f = f_(text)
        for b in puiseux_expand(f):
            for k in range(b.p):
                c = b.conjugate(k)
                assert c.tangent_key == b.tangent_key
                assert residual_check(f, c) < 1e-15
            assert b.conjugate(b.p).series == b.series

    def test_separation_bound_numerically(self):
        # same-tangent pairs: |y1(x) - y2(x)| ~ C x^q
        for text in ["y^2+x^4", "y^2-x^3", "(y^2-x^3)*(y^2+x^3)", "y^2-x^2*y-x^5"]:
            f = f_(text)
            bs = puiseux_expand(f)
            pairs = [(b, b.conjugate(1)) for b in bs if b.p > 1]
            pairs += [(a, b) for i, a in enumerate(bs) for b in bs[i + 1:]
                      if a.p == b.p == 1 and a.tangent_key == b.tangent_key]
            for a, b in pairs:
                q = separation_exponent(a, b)
                assert q > 1
                p = a.p
                d = [abs(a.evaluate_t(t) - b.evaluate_t(t)) for t in
                     (mpmath.mpf(10) ** (-4 / p), mpmath.mpf(10) ** (-6 / p))]
                slope = float(mpmath.log10(d[0] / d[1]) / 2)
                assert abs(slope - float(q)) < 0.05


class TestTangentsAndSmoothness:
    def test_tangents(self):
        (cusp,) = puiseux_expand(f_("y^2-x^3"))
        assert branch_tangent(cusp) == (1, 0)
        lines = puiseux_expand(f_("x^2-y^2"))
        neg = next(b for b in lines if b.series[0].coefficient.real < 0)
        assert close(branch_tangent(neg)[1], -1)
        tac = puiseux_expand(f_("y^2+x^4"))[0]
        assert branch_tangent(tac) == (1, 0)

    def test_smoothness(self):
        (cusp,) = puiseux_expand(f_("y^2-x^3"))
        assert not branch_is_smooth(cusp)
        assert all(branch_is_smooth(b) for b in puiseux_expand(f_("y^2+x^4")))
        assert all(branch_is_smooth(b) for b in puiseux_expand(f_("x^2-y^2")))

    def test_truncation_too_small(self):
        b = PuiseuxBranch(1, (Term(Fraction(1), mpmath.mpc(1)),), Fraction(1), 1)
        with pytest.raises(TruncationError):
            branch_is_smooth(b)


class TestSeparation:
    def test_frozen_values(self):
        (cusp,) = puiseux_expand(f_("y^2-x^3"))
        assert separation_exponent(cusp, cusp.conjugate(1)) == Fraction(3, 2)
        a, b = puiseux_expand(f_("y^2+x^4"))
        assert separation_exponent(a, b) == 2
        a, b = puiseux_expand(f_("x^2-y^2"))
        assert separation_exponent(a, b) == 1

    def test_identical_exact(self):
        (cusp,) = puiseux_expand(f_("y^2-x^3"))
        with pytest.raises(DomainError):
            separation_exponent(cusp, cusp)

    def test_truncated_before_separation(self):
        t = Term(Fraction(1), mpmath.mpc(1))
        a = PuiseuxBranch(1, (t,), Fraction(3), 1)
        with pytest.raises(TruncationError):
            separation_exponent(a, a)


class TestResidual:
    def test_exact_branch(self):
        f = f_("y^2-x^3")
        (b,) = puiseux_expand(f)
        assert residual_check(f, b) < 1e-30

    def test_truncated_dense(self):
        f = f_(DENSE)
        for b in puiseux_expand(f, truncation=6):
            assert b.truncation_exponent >= 6
            assert residual_check(f, b) < 1e-20

    def test_root_tracking_oracle(self):
        # independent check: nearest root of f(x0, y) from mpmath.polyroots at 80 digits
        f = f_(DENSE)
        bs = puiseux_expand(f, truncation=6)
        with mpmath.workdps(80):
            errs = {}
            for x0 in (mpmath.mpf("1e-3"), mpmath.mpf("1e-4")):
                coeffs = [sum(mpmath.mpf(int(c.x.numerator)) / int(c.x.denominator) * x0 ** e[0]
                              for e, c in f.terms.items() if e[1] == k) for k in range(5)]
                roots = mpmath.polyroots(coeffs[::-1], maxsteps=200, extraprec=300)
                errs[x0] = [min(abs(b.evaluate(x0) - r) for r in roots) for b in bs]
            lo, hi = errs.values()
            for e1, e2 in zip(lo, hi):
                # error term of order x^7 at truncation 6
                assert e1 < 1e-15 and e2 < e1 * 1e-6

    def test_corrupted_coefficient(self):
        f = f_("y^2-x^3")
        (b,) = puiseux_expand(f)
        bad = PuiseuxBranch(b.p, (Term(Fraction(3, 2), mpmath.mpc(1.001)),), None, 2)
        assert residual_check(f, bad) > 1e-6


class TestSerialization:
    def test_round_trip(self):
        for b in puiseux_expand(f_(DENSE)):
            back = PuiseuxBranch.from_dict(b.to_dict())
            assert back.p == b.p and back.truncation_exponent == b.truncation_exponent
            for s, t in zip(back.series, b.series):
                assert s.exponent == t.exponent and abs(s.coefficient - t.coefficient) < 1e-25

    def test_missing_radius_rejected(self):
        with pytest.raises(DomainError):
            PuiseuxBranch.from_dict({"terms": [[1, 1, "1", "0"]]})

    def test_space_branch_rejects_tangent_to_kernel(self):
        with pytest.raises(DomainError):
            SpaceBranch.build(0, [(), (Term(Fraction(1, 2), mpmath.mpc(1)),)])

    def test_space_branch_ramification(self):
        b = SpaceBranch.build(0, [(), (Term(Fraction(3, 2), mpmath.mpc(1)),),
                                  (Term(Fraction(4, 3), mpmath.mpc(2)),)])
        assert b.ramification_index == 6 and not b.is_smooth()


def test_univariate_roots_clusters_multiplicity():
    psi = parse_polynomial("(z-1)^2*(z+2)", ("z",))
    roots = univariate_roots(psi)
    assert sorted(m for _, m, _ in roots) == [1, 2]
    for r, m, rad in roots:
        assert abs(psi.evaluate_numeric((r,))) <= 1e-20 or m > 1
