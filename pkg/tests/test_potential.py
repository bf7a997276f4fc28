import numpy as np
import pytest
from scipy.integrate import quad

from acplus.potential import check_alpha, make_cubic, make_polynomial, validate_bistable


def test_cubic_construction():
    nl = make_cubic()
    assert nl.value(0.0) == 0.0
    assert (nl.a_minus, nl.a_zero, nl.a_plus) == (-1.0, 0.0, 1.0)
    assert nl.lam == 1.0
    # balanced wells: the primitive takes equal values at the outer roots
    assert nl.primitive(1.0) - nl.primitive(-1.0) == pytest.approx(0.0, abs=1e-15)
    assert nl.primitive(-1.0) == 0.0


def test_cubic_calculus():
    nl = make_cubic()
    s = np.linspace(-2.0, 2.0, 41)
    assert np.allclose(nl.value(s), s**3 - s)
    assert np.allclose(nl.deriv(s), 3 * s**2 - 1)
    assert np.allclose(nl.deriv2(s), 6 * s)


def test_primitive_matches_quadrature():
    # W differences must agree with adaptive quadrature of f
    nl = make_cubic()
    rng = np.random.default_rng(7)
    for _ in range(20):
        s1, s2 = sorted(rng.uniform(-1.5, 1.5, 2))
        ref, _ = quad(nl.value, s1, s2, epsabs=1e-13)
        assert nl.primitive(s2) - nl.primitive(s1) == pytest.approx(ref, abs=1e-10)


def test_validate_cubic_passes():
    report = validate_bistable(make_cubic(), samples=1000)
    assert report.passed
    assert not report.failures()


def test_validate_rejects_bad_root():
    # declared middle root 0.5 is not a root of u^3 - u: residual 0.375
    nl = make_polynomial([0, -1, 0, 1], (-1.0, 0.5, 1.0), 1.0)
    report = validate_bistable(nl)
    assert not report.passed
    bad = {c.name: c for c in report.failures()}
    assert "root_a_zero" in bad
    assert bad["root_a_zero"].worst_value == pytest.approx(0.375, abs=1e-12)


def test_validate_rejects_inverted_sign():
    # f(u) = u - u^3 has the right roots but inverted well signs
    nl = make_polynomial([0, 1, 0, -1], (-1.0, 0.0, 1.0), 3.0)
    report = validate_bistable(nl)
    names = {c.name for c in report.failures()}
    assert "positive_on_left_well" in names
    assert "negative_on_right_well" in names
    assert "outer_slope_a_plus" in names


def test_validate_samples_floor():
    with pytest.raises(ValueError):
        validate_bistable(make_cubic(), samples=50)


def test_check_alpha_midlevel():
    nl = make_cubic()
    adm = check_alpha(nl, -0.5)
    # exact quartic antiderivative: W(1) - W(-0.5) = -0.140625
    assert adm.integral_to_aplus == pytest.approx(-0.140625, abs=1e-12)
    assert adm.satisfies_hyp and adm.satisfies_hyp2
    assert not adm.fprime_positive  # f'(-0.5) = -0.25
    assert adm.reason is None


def test_check_alpha_boundary_excluded():
    adm = check_alpha(make_cubic(), 0.0)
    assert not adm.satisfies_hyp
    assert adm.reason is not None


def test_check_alpha_steep_level():
    adm = check_alpha(make_cubic(), -0.9)
    assert adm.satisfies_hyp
    assert adm.fprime_positive  # f'(-0.9) = 1.43
    assert make_cubic().deriv(-0.9) == pytest.approx(1.43, abs=1e-12)


def test_hyp2_implies_hyp():
    # for the cubic, the full-range integral is 0 <= 0, so every in-range
    # alpha satisfying hyp2 must satisfy hyp as well
    nl = make_cubic()
    rng = np.random.default_rng(123)
    for alpha in rng.uniform(-1.0 + 1e-6, -1e-6, 100):
        adm = check_alpha(nl, alpha)
        if adm.satisfies_hyp2:
            assert adm.satisfies_hyp
