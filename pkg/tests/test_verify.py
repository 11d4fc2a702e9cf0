import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from gausslucas.multivariate import MultiPoly, MultivariateSpec, affine_product
from gausslucas.poly import ComplexPoly, poly_from_roots
from gausslucas.product import CanonicalProductSpec
from gausslucas.rearrange import rearrange_to_zero
from gausslucas.roots import RootSequenceFamily, paired
from gausslucas.verify import (FAIL, PASS, UNCERTAIN, StabilityCone, is_theta_stable,
                               verify_corollary_stability, verify_gl_entire, verify_gl_polynomial,
                               verify_gl_sections)


def test_z_squared_minus_one():
    rep = verify_gl_polynomial(ComplexPoly([-1, 0, 1]))
    assert rep.verdict == PASS
    c = rep.checks[0]
    assert c.stats["max_distance"] == 0.0
    assert abs(c.points["critical_points"][0]) <= 1e-15


def test_cubic_critical_points():
    rep = verify_gl_polynomial(poly_from_roots([1, 2, 3]))
    assert rep.verdict == PASS
    crit = np.sort_complex(rep.checks[0].points["critical_points"])
    np.testing.assert_allclose(crit, [2 - 1 / math.sqrt(3), 2 + 1 / math.sqrt(3)], atol=1e-12)


def test_degree_one_is_vacuous():
    rep = verify_gl_polynomial(ComplexPoly([1, 2]))
    assert rep.verdict == PASS and rep.checks[0].stats["critical_points"] == 0


def test_fail_carries_witness():
    # a hull that is too small on purpose: eps < 0 is never met
    rep = verify_gl_polynomial(poly_from_roots([0, 1, 1j]), eps=-1.0)
    c = rep.checks[0]
    assert c.verdict == FAIL and c.witness is not None
    assert c.witness[1] == c.stats["max_distance"]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.builds(complex, st.floats(-1, 1), st.floats(-1, 1)), min_size=2, max_size=12))
def test_polynomial_gl_never_fails(roots):
    rep = verify_gl_polynomial(poly_from_roots(roots))
    c = rep.checks[0]
    assert c.verdict != FAIL
    if c.verdict == PASS:
        assert c.stats["max_distance"] <= 1e-7


@settings(max_examples=60, deadline=None)
@given(st.lists(st.builds(complex, st.floats(-3, 3), st.floats(-3, 0)), min_size=2, max_size=12),
       st.floats(-math.pi, math.pi))
def test_half_plane_closure(lower, theta):
    # repeated roots make critical points sqrt(eps)-conditioned, so keep them apart
    pts = np.array(lower)
    assume((np.abs(pts[:, None] - pts[None, :]) + np.eye(len(pts))).min() >= 0.05)
    # rotate a closed lower half-plane set into {Im(e^{i theta} z) <= 0}
    roots = pts * np.exp(-1j * theta)
    rep = verify_gl_polynomial(poly_from_roots(roots))
    crit = rep.checks[0].points["critical_points"]
    assert ((np.exp(1j * theta) * crit).imag <= 1e-8).all()


def test_sin_family_entire():
    spec = CanonicalProductSpec(p=1, family=paired(200))
    rep = verify_gl_entire(spec, schedule=(20, 40, 80))
    c = rep.checks[0]
    assert rep.verdict == PASS
    assert c.stats["max_abs_imag_final"] <= 1e-6
    assert np.abs(c.points["critical_points"].real).max() <= 80
    d = c.stats["max_distance"]
    assert all(b <= a for a, b in zip(d, d[1:]))


def test_monomial_with_empty_family():
    spec = CanonicalProductSpec(q=3, p=0, family=RootSequenceFamily.explicit([]))
    rep = verify_gl_entire(spec, schedule=(1, 2))
    assert rep.verdict == PASS


def test_genus_two_with_greedy_plan():
    fam = RootSequenceFamily(alpha=0.5, phases=(1, 1j, -1, -1j), shell="index", count_limit=5000)
    plan = rearrange_to_zero(fam, 2, 400)
    spec = CanonicalProductSpec(p=2, family=fam)
    rep = verify_gl_entire(spec, plan=plan, schedule=(100, 200, 400), eps=1e-3)
    assert rep.verdict == PASS
    assert rep.checks[0].stats["max_distance"][-1] <= 1e-3


def test_schedule_must_increase():
    with pytest.raises(ValueError):
        verify_gl_entire(CanonicalProductSpec(family=paired(10)), schedule=(4, 2))


def test_degree_cap_warns():
    spec = CanonicalProductSpec(p=1, family=paired(100))
    with pytest.warns(RuntimeWarning, match="capped"):
        rep = verify_gl_entire(spec, schedule=(10, 60), degree_cap=30)
    assert rep.checks[0].stats["schedule"] == [10, 30]


def test_multipoly_evaluation_and_partial():
    f = MultiPoly({(2, 0): 1, (0, 2): 1})
    assert f((1j, 2)) == pytest.approx(3)
    assert f.partial(1)((3, 7)) == pytest.approx(6)
    assert f.partial(2)((3, 7)) == pytest.approx(14)
    g = f.section(1, [2.0])
    np.testing.assert_allclose(g.coef, [4, 0, 1])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.builds(complex, st.floats(-2, 2), st.floats(-2, 2)), min_size=3,
                         max_size=3), min_size=1, max_size=4),
       st.builds(complex, st.floats(-2, 2), st.floats(-2, 2)),
       st.builds(complex, st.floats(-2, 2), st.floats(-2, 2)))
def test_affine_product_matches_direct_evaluation(forms, z1, z2):
    f = affine_product(forms)
    direct = np.prod([a + b * z1 + c * z2 for a, b, c in forms])
    assert f((z1, z2)) == pytest.approx(direct, rel=1e-9, abs=1e-9)
    # section in z1 agrees with evaluation
    assert f.section(1, [z2])(z1) == pytest.approx(direct, rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("c", [0.5, 2.0, 1 + 1j, -3j])
def test_sections_sum_of_squares(c):
    mv = MultivariateSpec(M=2, poly=MultiPoly({(2, 0): 1, (0, 2): 1}))
    rep = verify_gl_sections(mv, 1, [[c]])
    assert rep.verdict == PASS
    roots = rep.checks[0].points["section_roots"][:, 0]
    np.testing.assert_allclose(np.sort_complex(roots), np.sort_complex([1j * c, -1j * c]),
                               atol=1e-12)


def test_sections_degree_one_vacuous():
    mv = MultivariateSpec(M=2, poly=MultiPoly({(1, 1): 1, (0, 0): -1}))
    rep = verify_gl_sections(mv, 1, [[2.0], [-1j]])
    assert rep.verdict == PASS
    assert rep.checks[0].stats["tested"] == 2


def test_sections_constant_counted():
    mv = MultivariateSpec(M=2, poly=MultiPoly({(1, 1): 1, (0, 0): -1}))
    rep = verify_gl_sections(mv, 1, [[0.0], [1.0]])
    assert rep.checks[0].stats["skipped_constant"] == 1


def test_sections_midpoint():
    f = affine_product([(0, 1, 1), (2, 1, -1)])  # (z1 + z2)(z1 - z2 + 2)
    mv = MultivariateSpec(M=2, poly=f)
    rng = np.random.default_rng(5)
    cs = rng.uniform(-3, 3, 20)
    rep = verify_gl_sections(mv, 1, [[c] for c in cs])
    assert rep.verdict == PASS
    pts = rep.checks[0].points
    crit = pts["section_critical_points"][:, 0]
    np.testing.assert_allclose(crit, -1.0, atol=1e-12)  # midpoint of -c and c - 2


def test_sections_grid_check_never_fails():
    f = affine_product([(0, 1, 1), (2, 1, -1), (1j, 1, 0.5)])
    mv = MultivariateSpec(M=2, poly=f)
    rep = verify_gl_sections(mv, 1, [[c] for c in (0.1, 0.5, 1 + 0.5j)], grid_check=True)
    assert [c.name for c in rep.checks] == ["gl-sections", "gl-sections-grid"]
    assert rep.checks[1].verdict in (PASS, UNCERTAIN)


def test_zero_partial_rejected():
    mv = MultivariateSpec(M=2, poly=MultiPoly({(0, 2): 1}))
    with pytest.raises(ValueError):
        verify_gl_sections(mv, 1, [[1.0]])


def test_m1_sections_match_univariate():
    p = poly_from_roots([1, -2, 1j])
    mv = MultivariateSpec(M=1, poly=MultiPoly({(k,): c for k, c in enumerate(p.coef)}))
    a = verify_gl_sections(mv, 1, [[]])
    b = verify_gl_polynomial(p)
    assert a.verdict == b.verdict
    assert a.checks[0].stats["max_distance"] == b.checks[0].stats["max_distance"]


def test_cone_normalisation():
    assert StabilityCone((3 * math.pi,)).theta == pytest.approx((math.pi,))
    assert StabilityCone((-math.pi,)).theta == pytest.approx((math.pi,))


def test_univariate_stability_examples():
    assert is_theta_stable([-1j, -2j], 0).stable
    r = is_theta_stable([1j], 0)
    assert not r.stable and r.witness == (1j,)
    # boundary roots are outside the open cone
    assert is_theta_stable([1.0, -3.0, 1e-12j], 0).stable


def test_bivariate_stability_example():
    f = MultiPoly({(1, 1): 1, (0, 0): -1})
    r = is_theta_stable(f, (0, 0), budget=100)
    assert r.stable and r.low_confidence


def test_bivariate_instability_found():
    # z1 - i vanishes at z1 = i for every z2
    f = MultiPoly({(1, 0): 1, (0, 0): -1j}, 2)
    r = is_theta_stable(f, (0, 0), budget=20)
    assert not r.stable
    assert abs(f(r.witness)) <= 1e-10
    assert (np.array(r.witness).imag > 0).all()


def test_corollary_examples():
    rep = verify_corollary_stability([-1j, -1 - 1j, 1 - 1j], 0)
    assert rep.verdict == PASS
    rep = verify_corollary_stability(MultiPoly({(1, 1): 1, (0, 0): -1}), (0, 0), m=1, budget=50)
    assert rep.verdict == PASS


def test_corollary_on_unstable_f_is_uncertain():
    assert verify_corollary_stability([1j, -1j], 0).verdict == UNCERTAIN


def test_rotated_cone():
    # theta = pi/2: Im(i z) = Re z, so A = {Re z > 0}
    assert is_theta_stable([-1, -2 + 5j, 3j], math.pi / 2).stable
    assert not is_theta_stable([1], math.pi / 2).stable
