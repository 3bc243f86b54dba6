import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arcwidom.checks import exterior_points
from arcwidom.conformal import map_arc
from arcwidom.geometry import ArcSpec
from arcwidom.potential import (
    AdmissibilityError,
    WeightSpec,
    equilibrium_data,
    extremal_norm,
    f_mu_boundary,
    f_mu_eval,
    green_eval,
    green_potential,
    nu,
    nu_checked,
    parse_weight,
    r_infinity,
    r_mu_eval,
    symm_oracle,
    symmetry_defect,
    szego_data,
    szego_integral,
    szego_integral_closed_form,
    trial_norm,
)

from oracles import arcsine_integral, circular_arc_nu, interval_density, interval_green

# -- equilibrium data ---------------------------------------------------------------


def test_interval_moments(interval_eq):
    assert abs(np.sum(interval_eq.weights * interval_eq.z)) < 1e-10
    second = arcsine_integral(lambda x: x * x)
    assert second == pytest.approx(0.5, abs=1e-12)
    assert np.sum(interval_eq.weights * interval_eq.z**2).real == pytest.approx(second, abs=1e-6)


@pytest.mark.parametrize("fixture", ["interval_eq", "quarter_eq", "parabola_eq"])
def test_mass_and_density(fixture, request):
    eq = request.getfixturevalue(fixture)
    assert np.sum(eq.weights) == 1.0
    assert np.all(eq.omega > 0)
    A, B = eq.endpoints
    scaled = eq.omega * np.sqrt(np.abs(eq.z - A) * np.abs(eq.z - B))
    assert 0 < np.min(scaled) and np.max(scaled) / np.min(scaled) < 10


def test_node_count_guard(interval_map):
    with pytest.raises(ValueError):
        equilibrium_data(interval_map, 100)


def test_density_matches_oracle(quarter, quarter_eq):
    res = symm_oracle(quarter)
    keep = np.abs(quarter_eq.t) < 0.99
    assert np.allclose(quarter_eq.omega[keep], res.density(quarter_eq.t[keep]), rtol=1e-8)


# -- Green function ------------------------------------------------------------------


def test_green_interval(interval_map):
    assert green_eval(interval_map, 2.0) == pytest.approx(np.log(2 + np.sqrt(3)), abs=1e-12)
    z = np.array([0.3 + 0.2j, -2 - 1j, 1.5, 4j])
    assert np.allclose(green_eval(interval_map, z), interval_green(z), atol=1e-12)


@pytest.mark.parametrize("fixture", ["interval_map", "quarter_map", "parabola_map"])
def test_green_at_infinity(fixture, request):
    emap = request.getfixturevalue(fixture)
    z = 1e6 * np.exp(1j * np.array([0.1, 2.0, 4.0]))
    assert np.max(np.abs(green_eval(emap, z) - (np.log(np.abs(z)) - np.log(emap.cap_original)))) < 1e-4


def test_green_cross_form(quarter, quarter_eq):
    z = exterior_points(quarter, 100, np.random.default_rng(7))
    g = green_eval(quarter_eq.emap, z)
    assert np.all(g > 0)
    assert np.max(np.abs(g - green_potential(quarter_eq, z))) < 1e-3
    # potential form built from the integral-equation oracle alone
    res = symm_oracle(quarter)
    pot = np.array([res.integrate(lambda p: np.log(np.abs(zz - p))) for zz in z]) - np.log(res.cap)
    assert np.max(np.abs(g - pot)) < 1e-8


# -- Szegő integral ----------------------------------------------------------------------


def test_szego_trivial(quarter_eq):
    assert szego_integral(quarter_eq, WeightSpec()) == 1.0
    assert szego_integral(quarter_eq, WeightSpec(3.5)) == pytest.approx(3.5, rel=1e-15)


def test_szego_interval_endpoint_weight(interval_eq):
    ref = np.exp(arcsine_integral(lambda x: np.log(np.abs(x - 1))))
    assert ref == pytest.approx(0.5, abs=1e-10)
    S = szego_integral(interval_eq, parse_weight("|z-(1,0)|^1"))
    assert S == pytest.approx(ref, abs=1e-10)


def test_szego_closed_form_agrees(quarter_eq, quarter):
    mid = complex(quarter.gamma(0.2))
    for w in (
        parse_weight("2 * |z-(0.3,-0.4)|^1.5"),
        parse_weight(f"|z-({mid.real},{mid.imag})|^0.7"),
        parse_weight("|z-(0.7071067811865476,0.7071067811865476)|^-0.3"),
    ):
        assert szego_integral(quarter_eq, w) == pytest.approx(szego_integral_closed_form(quarter_eq.emap, w), rel=1e-9)


def test_admissibility(quarter_eq, quarter):
    A, B = quarter.endpoints
    with pytest.raises(AdmissibilityError):
        szego_integral(quarter_eq, parse_weight(f"|z-({B.real},{B.imag})|^-0.5"))
    with pytest.raises(AdmissibilityError):
        szego_integral(quarter_eq, parse_weight(f"|z-({B.real},{B.imag})|^-0.2", sup_norm=True))
    # fine as an L2 density
    assert szego_integral(quarter_eq, parse_weight(f"|z-({B.real},{B.imag})|^-0.2")) > 0


# -- R(inf) and nu ------------------------------------------------------------------------


def test_interval_r_infinity(interval_eq):
    ref = np.exp(arcsine_integral(lambda x: np.log(interval_density(x))))
    assert ref == pytest.approx(2 / np.pi, abs=1e-10)
    assert r_infinity(interval_eq) == pytest.approx(ref, abs=1e-5)
    assert r_infinity(interval_eq, parse_weight("|z-(1,0)|^1")) == pytest.approx(ref * 0.5, abs=1e-5)


def test_interval_nu(interval_eq):
    assert nu(interval_eq) == pytest.approx(2, abs=1e-4)


def test_quarter_nu(quarter_eq):
    val = nu(quarter_eq)
    assert 1 + 1e-3 < val < 2 - 1e-3
    assert val == pytest.approx(circular_arc_nu(np.pi / 2), rel=1e-10)


def test_quarter_r_positive(quarter_eq):
    assert 0 < r_infinity(quarter_eq) < np.inf


@pytest.mark.parametrize(
    "spec",
    [
        "2.5",
        "|z-(0.3,0.1)|^2",
        "0.5 * |z-(1,0)|^0.25 * |z-(-1,0)|^0.25",
        "|z-(0.7071067811865476,-0.7071067811865476)|^-0.4",
        "3 * |z-(0,2)|^-1 * |z-(0.9,0.2)|^0.5",
    ],
)
def test_nu_factorization(quarter_eq, spec):
    w = parse_weight(spec)
    sz = szego_data(quarter_eq, w)
    assert abs(sz.nu - nu(quarter_eq) * sz.S) / sz.nu < 1e-6
    assert sz.R_inf == pytest.approx(sz.R_inf_equilibrium * sz.S, rel=1e-6)


def test_nu_resolution_check(quarter_map):
    rep = nu_checked(quarter_map, N=512)
    assert not rep.under_resolved and rep.discrepancy < 1e-4


@settings(max_examples=6, deadline=None)
@given(st.floats(0.3, 3.0))
def test_circular_arc_nu_property(alpha):
    eq = equilibrium_data(map_arc(ArcSpec("circular-arc", r=1.0, alpha=alpha)), 512)
    val = nu(eq)
    assert 1 < val < 2
    assert val == pytest.approx(circular_arc_nu(alpha), rel=1e-8)


# -- symmetry defect -------------------------------------------------------------------


def test_defect_interval(interval_eq):
    assert symmetry_defect(interval_eq) < 1e-8


def test_defect_rotated_segment():
    eq = equilibrium_data(map_arc(ArcSpec("segment", A=1 - 2j, B=-3 + 0.5j)), 512)
    assert symmetry_defect(eq) < 1e-8


def test_defect_quarter_stable(quarter_map, quarter_eq):
    d1 = symmetry_defect(quarter_eq)
    d2 = symmetry_defect(equilibrium_data(quarter_map, 512))
    assert d1 > 0.01 and d2 > 0.01
    assert d1 == pytest.approx(d2, rel=1e-3)


# -- Szegő function and extremal function -------------------------------------------------


def test_r_mu_at_infinity(quarter_sz, quarter_map):
    assert abs(r_mu_eval(quarter_sz, quarter_map, np.inf) - quarter_sz.R_inf) < 1e-8
    assert abs(r_mu_eval(quarter_sz, quarter_map, 1e9) - quarter_sz.R_inf) < 1e-8


def test_r_mu_boundary_limit(interval_sz, interval_map):
    val = abs(r_mu_eval(interval_sz, interval_map, 0.5 + 1e-4j))
    assert val == pytest.approx(interval_density(0.5), abs=1e-2)


def test_r_mu_nonvanishing(quarter, quarter_sz, quarter_map):
    z = exterior_points(quarter, 100, np.random.default_rng(3), clearance=0.02)
    assert np.all(np.abs(r_mu_eval(quarter_sz, quarter_map, z)) > 0)


@pytest.mark.parametrize("fixture", [("interval_sz", "interval_map"), ("quarter_sz", "quarter_map")])
def test_f_mu_normalized(fixture, request):
    sz, emap = (request.getfixturevalue(f) for f in fixture)
    assert abs(f_mu_eval(sz, emap, np.inf) - 1) < 1e-8
    assert abs(f_mu_eval(sz, emap, 1e9) - 1) < 1e-8


def test_f_mu_attains_nu(interval_sz, quarter_sz, quarter_eq):
    for sz in (interval_sz, quarter_sz, szego_data(quarter_eq, parse_weight("|z-(0.3,0.1)|^2"))):
        assert abs(extremal_norm(sz) - sz.nu) / sz.nu < 1e-3
    assert trial_norm(quarter_sz) == pytest.approx(2, abs=1e-6)
    assert trial_norm(quarter_sz) > quarter_sz.nu


def test_f_mu_interval_sides(interval_sz):
    F = np.abs(f_mu_boundary(interval_sz))
    # node j and node N-1-j are the two sides of the same interval point
    assert np.max(np.abs(F - F[::-1])) < 1e-6


# -- weight parsing -------------------------------------------------------------------------


def test_parse_weight_grammar():
    w = parse_weight("2 * |z-(1,0)|^0.5 * |z-(-1.5,2e-1)|^-0.25")
    assert w.c == 2
    assert w.anchors == ((1 + 0j, 0.5), (-1.5 + 0.2j, -0.25))
    assert parse_weight(None) == WeightSpec()
    with pytest.raises(AdmissibilityError):
        parse_weight("|z+1|^2")
    with pytest.raises(AdmissibilityError):
        parse_weight("-1")


@settings(max_examples=50, deadline=None)
@given(
    st.floats(0.1, 10),
    st.lists(st.tuples(st.floats(-3, 3), st.floats(-3, 3), st.floats(-2, 2)), max_size=3),
)
def test_weight_string_round_trip(c, anchors):
    w = WeightSpec(c, tuple((complex(a, b), s) for a, b, s in anchors))
    assert parse_weight(str(w)) == w


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 10), st.floats(-0.5, 0.5), st.floats(1.5, 3), st.floats(-1, 3))
def test_szego_homogeneity(quarter_eq, c, ar, ai, s):
    w = WeightSpec(1.0, ((complex(ar, ai), s),))
    assert szego_integral(quarter_eq, w.scaled(c)) == pytest.approx(c * szego_integral(quarter_eq, w), rel=1e-12)
