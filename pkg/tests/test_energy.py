import math

import numpy as np
import pytest

from conftest import random_curve
from mengerlab.curve import FourierCurve, circle, make_fixture
from mengerlab.energy import (
    EnergyParams,
    MengerEnergy,
    circumradius,
    decoupled_radius,
    energy,
    energy_integrand_stats,
    energy_report,
    menger_curvature,
)
from mengerlab.quadrature import QuadratureConfig
from mengerlab.errors import DegenerateTripleError, ParameterError, TopologyError

# intM^(p,2) of the unit-length circle from independent 2-D integrals
# (QUADPACK for p = 2.4, 2.5; mpmath tanh-sinh for p = 2.6)
CIRCLE_ORACLE = {2.4: 125.890317761, 2.5: 306.266315235, 2.6: 1173.50403318}


def test_circumradius():
    assert circumradius([0, 0], [1, 0], [0.5, math.sqrt(3) / 2]) == pytest.approx(1 / math.sqrt(3))
    assert circumradius([0, 0, 0], [1, 0, 0], [2, 0, 0]) == math.inf
    with pytest.raises(DegenerateTripleError):
        circumradius([0, 0], [0, 0], [1, 1])


def test_decoupled_radius_reduces_to_circumradius():
    x, y, z = np.array([0.1, 0.0, 0.3]), np.array([1.0, 0.2, 0.0]), np.array([0.4, 1.1, -0.2])
    R = circumradius(x, y, z)
    assert decoupled_radius(x, y, z, 2.0, 2.0) == pytest.approx((2 * R) ** 2, rel=1e-14)


@pytest.mark.parametrize("p", sorted(CIRCLE_ORACLE))
def test_circle_energy_oracle(p):
    assert energy(circle(3), EnergyParams(p)) == pytest.approx(CIRCLE_ORACLE[p], rel=1e-7)


def test_circle_menger_curvature_closed_form():
    assert menger_curvature(circle(2), 2.5) / 2**2.5 == pytest.approx(math.pi**2.5, rel=1e-12)


def test_error_estimate_is_reported():
    res = energy_report(circle(3), EnergyParams(2.5))
    assert 0 <= res.errorEstimate < 1e-4 * res.value
    assert res.nodes > 0


def test_divergent_parameters_rejected():
    with pytest.raises(ParameterError):
        MengerEnergy.for_curve(circle(3), EnergyParams(3.0))


def test_euclidean_and_shift_invariance():
    c = random_curve(5, seed=3)
    params = EnergyParams(2.5, quad=QuadratureConfig(uOversample=32))
    fn = MengerEnergy.for_curve(c, params)
    Q, _ = np.linalg.qr(np.random.default_rng(0).normal(size=(3, 3)))
    moved = c.transformed(Q, [0.3, -1.0, 2.0])
    # parameter shift u -> u + 0.1 multiplies mode k by exp(2 pi i k 0.1)
    shifted = FourierCurve(c.coeffs * np.exp(2j * np.pi * c.modes * 0.1)[:, None])
    e0 = fn(c)
    assert fn(moved) == pytest.approx(e0, rel=1e-12)
    assert fn(shifted) == pytest.approx(e0, rel=1e-9)


def test_coarse_u_grid_error_is_reported():
    c = random_curve(5, seed=3)
    fine = energy_report(c, EnergyParams(2.5, quad=QuadratureConfig(uOversample=32))).value
    coarse = energy_report(c, EnergyParams(2.5))
    assert abs(coarse.value - fine) <= coarse.errorEstimate


def test_gradient_matches_finite_differences():
    c = random_curve(4, seed=2)
    params = EnergyParams(2.5, quad=QuadratureConfig(uOversample=32))
    fn = MengerEnergy.for_curve(c, params)
    _, g = fn.value_and_gradient(c)
    rng = np.random.default_rng(4)
    z = rng.normal(size=c.coeffs.shape) + 1j * rng.normal(size=c.coeffs.shape)
    h = FourierCurve(0.5 * (z + np.conj(z[::-1])))
    cd = lambda eps: (fn(c + eps * h) - fn(c + (-eps) * h)) / (2 * eps)
    fd = (4 * cd(5e-6) - cd(1e-5)) / 3  # Richardson
    adj = float(np.sum(g.coeffs * np.conj(h.coeffs)).real)
    assert adj == pytest.approx(fd, rel=1e-6)


def test_self_intersecting_curve_rejected():
    # a circle traversed twice: gamma(u) = gamma(u + 1/2)
    c = np.zeros((5, 3), dtype=complex)
    c[4], c[0] = circle(3).mode(1), circle(3).mode(-1)
    bad = FourierCurve(c)
    with pytest.raises(TopologyError):
        energy(bad, EnergyParams(2.5))


def test_integrand_stats_concentrate_near_diagonal():
    stats = energy_integrand_stats(make_fixture("ellipse", bandwidth=16, strict=False), EnergyParams(2.5))
    assert stats["cells"] == len(stats["cellContribution"])
    near = stats["cellDistance"] < 0.1
    assert stats["cellDensity"][near].max() > stats["cellDensity"][~near].max()
