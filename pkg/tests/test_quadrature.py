import numpy as np
import pytest

from mengerlab.errors import ParameterError
from mengerlab.quadrature import QuadratureConfig, adaptive_rule, in_domain

# iint_D (a b (a+b))^e for e = -0.5, -0.6: 1-D reduction evaluated with mpmath at 30 digits
SINGULAR = {-0.5: 4.67266273341721362531, -0.6: 18.7216577704799118149}


def ones(a, b):
    return np.ones_like(a)


def test_area_and_polynomial_moment():
    cfg = QuadratureConfig()
    r0 = adaptive_rule(0.0, cfg, ones)
    assert r0.integrate(np.ones(len(r0))) == pytest.approx(1 / 6, rel=1e-14)
    r1 = adaptive_rule(1.0, cfg, ones)
    assert r1.integrate(np.ones(len(r1))) == pytest.approx(17 / 6480, rel=1e-13)


@pytest.mark.parametrize("e", sorted(SINGULAR))
def test_singular_weight(e):
    r = adaptive_rule(e, QuadratureConfig(), ones)
    assert r.integrate(np.ones(len(r))) == pytest.approx(SINGULAR[e], rel=1e-8)


def test_nodes_lie_in_domain():
    r = adaptive_rule(-0.5, QuadratureConfig(), lambda a, b: np.cos(7 * a) * b)
    assert np.all(in_domain(r.v, r.w))
    assert np.all(r.weights > 0)


def test_nonintegrable_exponent():
    with pytest.raises(ParameterError):
        adaptive_rule(-0.7, QuadratureConfig(), ones)


def test_oscillatory_integrand_converges():
    cfg = QuadratureConfig(relTol=1e-8, maxRefine=8)
    f = lambda a, b: np.cos(40 * a) ** 2 + np.sin(30 * b) ** 2
    r = adaptive_rule(-0.4, cfg, f)
    fine = adaptive_rule(-0.4, QuadratureConfig(baseCells=64, relTol=1e-10, maxRefine=8), f)
    assert r.integrate(f(r.a, r.b)) == pytest.approx(fine.integrate(f(fine.a, fine.b)), rel=1e-7)
