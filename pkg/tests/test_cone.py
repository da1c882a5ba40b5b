import mpmath
import pytest
from hypothesis import assume, given, strategies as st

from conftest import polynomials
from corpus import PLANE_CORPUS, random_squarefree_curves
from lipne.cone import binary_factors, cone_contains_line, has_multiple_component, tangent_cone
from lipne.errors import DomainError
from lipne.parser import parse_polynomial
from lipne.poly import Polynomial, divides, gcd, is_squarefree, scalar_to_mpc, squarefree_part

XY = ("x", "y")
XYZ = ("x", "y", "z")
SURFACE = "x^3+x^2*y+y^3*z+z^5"


def P(text, variables=XYZ):
    return parse_polynomial(text, variables)


class TestTangentCone:
    def test_surface_example(self):
        cone = tangent_cone(P(SURFACE))
        assert cone.initial_form == P("x^3+x^2*y")
        assert cone.repeated_factor == P("x")
        assert cone.reduced_form == P("x^2+x*y")

    def test_nongeneral_example_is_reduced(self):
        cone = tangent_cone(P("x^2+y^2-z^3"))
        assert cone.initial_form == P("x^2+y^2") and cone.is_reduced

    def test_tacnode_binary_factor(self):
        cone = tangent_cone(P("y^2+x^4", XY))
        assert cone.initial_form == P("y^2", XY)
        (factor,) = cone.binary_factorization
        assert factor.multiplicity == 2
        assert factor.direction == (1, 0)

    def test_not_a_germ(self):
        with pytest.raises(DomainError):
            tangent_cone(P("x+1"))
        with pytest.raises(DomainError):
            tangent_cone(Polynomial.zero(XYZ))


class TestMultipleComponent:
    @pytest.mark.parametrize("text, witness", [
        (SURFACE, "x"),
        ("x^3+x^2*y+z^5", "x"),
        ("x^2+y^2-z^3", None),
        ("x^2+y^3+z^3", "x"),
        ("(x+y+z)^2*(x-z)+y^4", "x+y+z"),
    ])
    def test_witness(self, text, witness):
        w = has_multiple_component(P(text))
        assert (w is None) if witness is None else w.is_associate(P(witness))

    @given(polynomials(max_degree=4, max_terms=4, through_origin=True, min_terms=1))
    def test_coherence_with_gcd(self, f):
        fd = f.initial_form()
        w = has_multiple_component(f)
        g = fd
        for k in range(3):
            g = gcd(g, fd.diff(k))
        assert (w is not None) == (not g.is_constant())
        assert (w is not None) == (squarefree_part(fd).total_degree < fd.total_degree)
        if w is not None:
            assert divides(w * w, fd)

    def test_binary_point_at_infinity(self):
        assert has_multiple_component(P("x^2*y+x^4", XY)) == P("x", XY)
        assert has_multiple_component(P("y^2*x+y^4", XY)) == P("y", XY)


def _reconstruct(fd: Polynomial):
    """Numeric coefficients of lc * prod (y - z x)^m * x^m_inf, keyed like fd.terms."""
    factors = binary_factors(fd)
    d = fd.total_degree
    # coefficient of the top power of y in the dehomogenization
    top = max(e[1] for e in fd.terms)
    lc = scalar_to_mpc(fd.coefficient((d - top, top)))
    coeffs = [mpmath.mpc(1)]  # polynomial in y/x, index = power of y
    for f in factors:
        a, z = f.direction
        for _ in range(f.multiplicity):
            if a == 0:
                continue
            new = [mpmath.mpc(0)] * (len(coeffs) + 1)
            for k, c in enumerate(coeffs):
                new[k + 1] += c
                new[k] -= z * c
            coeffs = new
    return {(d - k, k): lc * c for k, c in enumerate(coeffs)}


@pytest.mark.parametrize("text", PLANE_CORPUS + ["3*x^4-2*x^3*y+x*y^3-7*y^4", "(1+i)*x^2+y^2"])
def test_binary_reconstruction(text):
    fd = parse_polynomial(text, XY).initial_form()
    with mpmath.workprec(128):
        rec = _reconstruct(fd)
        scale = max(abs(scalar_to_mpc(c)) for c in fd.terms.values())
        for e in set(rec) | set(fd.terms):
            exact = scalar_to_mpc(fd.terms[e]) if e in fd.terms else 0
            assert abs(rec.get(e, 0) - exact) < 1e-20 * scale


def test_planecurve_bridge():
    for f in random_squarefree_curves(count=60, seed=11):
        fd = f.initial_form()
        simple = all(b.multiplicity == 1 for b in binary_factors(fd))
        assert simple == is_squarefree(fd) == (has_multiple_component(f) is None)


@given(st.integers(-4, 4), st.integers(-4, 4), st.integers(-4, 4), st.integers(-3, 3))
def test_homogeneity(a, b, c, lam):
    assume(lam != 0)
    fd = P(SURFACE).initial_form()
    assert fd.evaluate((lam * a, lam * b, lam * c)) == fd.evaluate((a, b, c)) * lam ** fd.total_degree


class TestConeContainsLine:
    def test_examples(self):
        cone = tangent_cone(P("x^2+y^2-z^3"))
        assert cone_contains_line(cone, (0, 0, 1))
        assert not cone_contains_line(cone, (1, 0, 0))

    def test_repeated_factor_direction(self):
        for text in ["y^2+x^4", "y^2-x^3", "x^3-y^2*x"]:
            cone = tangent_cone(P(text, XY))
            for factor in cone.binary_factorization:
                if factor.multiplicity > 1:
                    a, z = factor.direction
                    assert abs(cone.initial_form.evaluate_numeric((a, z))) < 1e-30

    def test_errors(self):
        cone = tangent_cone(P("x^2+y^2-z^3"))
        with pytest.raises(DomainError):
            cone_contains_line(cone, (0, 0, 0))
        with pytest.raises(DomainError):
            cone_contains_line(cone, (1, 0))
