import json
import logging

import numpy as np
import pytest

from arcwidom.extremal import (
    ArnoldiBasis,
    ContourError,
    RankLossWarning,
    arc_grid,
    chebyshev_minimax,
    orthonormal_polys,
    sup_bounds,
    sup_norm,
    widom_qn,
    widom_report,
)
from arcwidom.potential import WeightSpec, parse_weight

from oracles import arcsine_integral, monic_chebyshev_norm


@pytest.fixture(scope="module")
def interval_grid(interval):
    return arc_grid(interval)


@pytest.fixture(scope="module")
def quarter_grid(quarter):
    return arc_grid(quarter)


# -- Arnoldi / orthogonal polynomials -----------------------------------------------


def test_arnoldi_orthonormal(quarter_eq):
    B = ArnoldiBasis(quarter_eq.z, quarter_eq.weights, 30)
    G = (B.values.conj() * B.masses) @ B.values.T
    assert np.max(np.abs(G - np.eye(31))) < 1e-12
    # recurrence evaluation reproduces the stored values
    assert np.allclose(B.evaluate(quarter_eq.z[:50]), B.values[:, :50], atol=1e-10)


def test_rank_loss_truncates():
    pts = np.exp(2j * np.pi * np.arange(5) / 5)
    with pytest.warns(RankLossWarning):
        B = ArnoldiBasis(pts, np.full(5, 0.2), 10)
    assert B.degree == 4


def test_interval_first_orthogonal(interval_eq):
    res = orthonormal_polys(interval_eq, None, 5)
    second = arcsine_integral(lambda x: x * x)
    assert res.norms[1] ** 2 == pytest.approx(second, abs=1e-12)
    assert res.W2sq[1] == pytest.approx(second / 0.25, abs=1e-12)
    P1 = res.monic(1)
    assert np.allclose(P1.coefficients(), [0, 1], atol=1e-12)


def test_interval_w2_limit(interval_eq):
    W = orthonormal_polys(interval_eq, None, 60).W2sq
    # monic Chebyshev polynomials are orthogonal for the arcsine measure
    assert np.allclose(W[1:], 2, atol=1e-9)


def test_quarter_w2_limit(quarter_eq, quarter_sz):
    W = orthonormal_polys(quarter_eq, None, 60).W2sq
    assert abs(W[60] - quarter_sz.nu_equilibrium) < 0.05
    assert abs(W[60] - W[50]) < 0.02


def test_degree_guard(quarter_eq):
    with pytest.raises(ValueError):
        orthonormal_polys(quarter_eq, None, quarter_eq.N // 8 + 1)


@pytest.mark.parametrize("n", [1, 4, 10])
def test_monic_representations_agree(quarter_eq, n):
    P = orthonormal_polys(quarter_eq, None, n).monic(n)
    c = P.coefficients()
    assert c[-1] == pytest.approx(1, abs=1e-12)
    assert P.leading_coefficient == pytest.approx(1, abs=1e-12)
    z = quarter_eq.z[::37]
    assert np.max(np.abs(np.polynomial.polynomial.polyval(z, c) - P(z))) < 1e-9


# -- sup norm ---------------------------------------------------------------------------


def test_sup_norm_chebyshev(interval_grid, interval):
    T3 = lambda z: z**3 - 0.75 * z  # noqa: E731
    assert sup_norm(T3, None, interval_grid, interval) == pytest.approx(monic_chebyshev_norm(3), abs=1e-6)
    assert sup_norm(lambda z: z, None, interval_grid) == pytest.approx(1)


def test_sup_norm_homogeneous(quarter_grid, quarter):
    P = lambda z: z**2 - 0.3  # noqa: E731
    rho = parse_weight("|z-(0.2,0.1)|^1.5", sup_norm=True)
    a = sup_norm(P, rho, quarter_grid, quarter)
    b = sup_norm(P, rho.scaled(3.0), quarter_grid, quarter)
    assert b == pytest.approx(3 * a, rel=1e-12)


# -- Lawson minimax -------------------------------------------------------------------


def test_minimax_interval_t3(interval_grid, interval):
    res = chebyshev_minimax(interval_grid, None, 3, 0.5, arc=interval)
    assert res.converged and res.spread <= 1e-3
    assert res.tn == pytest.approx(monic_chebyshev_norm(3), rel=1e-3)
    assert res.Winf == pytest.approx(2, abs=1e-3)
    assert res.poly.leading_coefficient == pytest.approx(1, abs=1e-12)


def test_minimax_bounds_bracket(quarter_grid, quarter, quarter_map):
    res = chebyshev_minimax(quarter_grid, None, 8, quarter_map.cap_original, arc=quarter)
    assert res.lower <= res.tn * (1 + 1e-12)
    # tn includes the off-grid refinement, so allow for grid discretization
    assert (res.tn - res.lower) / res.tn <= res.spread + 1e-6


def test_minimax_quarter_below_two(quarter_grid, quarter, quarter_map):
    res = chebyshev_minimax(quarter_grid, None, 40, quarter_map.cap_original, arc=quarter)
    assert res.Winf < 2 - 0.01


def test_minimax_grid_refinement(quarter, quarter_map):
    coarse = arc_grid(quarter, n_cheb=600, per_decade=8)
    fine = arc_grid(quarter)
    cap = quarter_map.cap_original
    a = chebyshev_minimax(coarse, None, 6, cap, arc=quarter)
    b = chebyshev_minimax(fine, None, 6, cap, arc=quarter)
    # the coarse certified lower bound cannot exceed any fine feasible value
    assert a.lower <= b.tn + 1e-6
    assert abs(a.tn - b.tn) / b.tn < 2e-3


def test_minimax_grid_guard(quarter, quarter_map):
    small = arc_grid(quarter, n_cheb=100, per_decade=1, smallest=1e-2)
    with pytest.raises(ValueError):
        chebyshev_minimax(small, None, 40, quarter_map.cap_original)


def test_minimax_stagnation_reported(quarter_grid, quarter_map, caplog):
    with caplog.at_level(logging.WARNING):
        res = chebyshev_minimax(quarter_grid, None, 10, quarter_map.cap_original, maxiter=3)
    assert not res.converged and res.spread > 1e-3 and res.iterations == 3
    assert "stagnation" in caplog.text


def test_minimax_weighted(interval_grid, interval):
    # rho = sqrt(1 - x^2): the weighted problem is solved by U_{n}-type polynomials,
    # whose weighted norm 2^{-n} is attained at equioscillation points
    rho = parse_weight("|z-(1,0)|^0.5 * |z-(-1,0)|^0.5", sup_norm=True)
    res = chebyshev_minimax(interval_grid, rho, 4, 0.5, arc=interval)
    assert res.tn == pytest.approx(2.0**-4, rel=2e-3)


# -- Widom polynomials ----------------------------------------------------------------


def test_qn_interval(interval_sz, interval_map, interval_grid, interval):
    q = widom_qn(interval_sz, interval_map, 4)
    val = sup_norm(q.poly, None, interval_grid, interval) / 0.5**4
    assert abs(val - 2) / 2 < 0.05
    assert q.poly.degree == 4
    assert q.poly.leading_coefficient == pytest.approx(1, abs=1e-12)
    assert abs(q.leading * 0.5**4 - 1) < 1e-6


def test_qn_feasible(quarter_sz, quarter_map, quarter_grid, quarter):
    cap = quarter_map.cap_original
    q = widom_qn(quarter_sz, quarter_map, 40)
    assert q.residual < 1e-8
    qn = sup_norm(q.poly, None, quarter_grid, quarter)
    mm = chebyshev_minimax(quarter_grid, None, 40, cap, arc=quarter)
    assert mm.tn * (1 - mm.spread) <= qn


def test_qn_contour_guard(quarter_sz, quarter_map):
    with pytest.raises(ContourError):
        widom_qn(quarter_sz, quarter_map, 10, r=1.005)


# -- bounds and reports ------------------------------------------------------------------


def test_bounds_interval(interval_eq):
    b = sup_bounds(interval_eq)
    assert b.upp == pytest.approx(2, abs=1e-8)
    assert b.sahi == pytest.approx(2, abs=1e-8)
    assert b.two_S == 2


def test_bounds_quarter(quarter_eq):
    b = sup_bounds(quarter_eq)
    assert b.upp < 2 - 1e-3
    assert b.sahi <= b.upp + 1e-12
    assert b.upp <= b.two_S


def test_bounds_scale_linearly(quarter_eq):
    b1 = sup_bounds(quarter_eq)
    b3 = sup_bounds(quarter_eq, WeightSpec(3.0))
    for k in ("upp", "sahi", "two_S"):
        assert getattr(b3, k) == pytest.approx(3 * getattr(b1, k), rel=1e-12)


def test_report_serialization(quarter_eq):
    rep = widom_report(quarter_eq, [3, 1, 2])
    assert [r.n for r in rep.records] == [1, 2, 3]
    text = rep.to_json()
    assert text == widom_report(quarter_eq, [1, 2, 3]).to_json()
    doc = json.loads(text)
    assert set(doc["bounds"]) == {"upp", "sahi", "two_S", "nu_limit"}
    csv = rep.to_csv().splitlines()
    assert csv[0] == "n,W2sq,Winf,qn_ratio" and len(csv) == 4
    for r in rep.records:
        assert r.Winf * (1 - r.spread) <= r.qn_ratio
