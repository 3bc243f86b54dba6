import numpy as np
import pytest

from arcwidom.geometry import ArcSpec, normalize_endpoints
from arcwidom.symm import IllConditioned, symm_oracle

from oracles import circular_arc_capacity, circular_arc_density, circular_arc_nu, interval_density


def test_interval(interval):
    res = symm_oracle(interval)
    assert res.cap == pytest.approx(0.5, abs=1e-8)
    x = np.linspace(-0.95, 0.95, 39)
    assert np.allclose(res.density(x), interval_density(x), atol=1e-6)


def test_accepts_normalized_arc(quarter):
    a = symm_oracle(normalize_endpoints(quarter)).cap
    b = symm_oracle(quarter).cap
    assert a == b


@pytest.mark.parametrize("alpha", [0.5, np.pi / 2, 2.5])
def test_circular_arc_against_closed_forms(alpha):
    arc = ArcSpec("circular-arc", r=1.0, alpha=alpha)
    res = symm_oracle(arc)
    assert res.cap == pytest.approx(circular_arc_capacity(1.0, alpha), rel=1e-10)
    t = np.linspace(-0.9, 0.9, 19)
    assert np.allclose(res.density(t), circular_arc_density(alpha * t / 2, alpha), rtol=1e-8)
    assert res.nu() == pytest.approx(circular_arc_nu(alpha), rel=1e-8)


def test_agrees_with_conformal_route(quarter_map, parabola_map, quarter, parabola):
    assert symm_oracle(quarter).cap == pytest.approx(quarter_map.cap_original, abs=1e-4)
    assert symm_oracle(parabola).cap == pytest.approx(parabola_map.cap_original, rel=1e-3)


def test_unit_mass(parabola):
    res = symm_oracle(parabola)
    assert res.integrate(lambda z: np.ones_like(z.real)) == pytest.approx(1, abs=1e-14)


def test_minimum_collocation(interval):
    with pytest.raises(ValueError):
        symm_oracle(interval, M=32)


def test_reports_ill_conditioning(interval):
    with pytest.raises(IllConditioned) as info:
        symm_oracle(interval, max_cond=1.0)
    assert info.value.cond > 1
