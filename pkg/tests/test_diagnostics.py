import math

import numpy as np
import pytest

from conftest import random_curve
from mengerlab.analysis.diagnostics import (
    CONTAINED,
    EXPONENTIAL,
    FLOOR_LIMITED,
    Plane,
    Sphere,
    analyticity_diagnostics,
    fourier_decay_fit,
    intersection_count,
    synthetic_decay_curve,
)
from mengerlab.curve import FourierCurve, circle, make_fixture
from mengerlab.errors import InsufficientDataError, ParameterError


@pytest.mark.parametrize("sigma", [0.3, 0.8, 1.5])
def test_synthetic_decay_rate_recovered(sigma):
    fit, usable, floor_limited = fourier_decay_fit(synthetic_decay_curve(sigma, 16, seed=1))
    assert fit.sigma == pytest.approx(sigma, rel=1e-10)
    assert fit.rSquared == pytest.approx(1.0)
    assert not floor_limited and usable == 16


def test_noisy_decay_verdict():
    rep = analyticity_diagnostics(synthetic_decay_curve(0.5, 24, seed=2, noise=0.1))
    assert rep.verdict == EXPONENTIAL
    assert rep.fourier.sigma == pytest.approx(0.5, rel=0.1)
    assert not rep.analyticToMachinePrecision


def test_fast_decay_hits_the_floor():
    fit, _, floor_limited = fourier_decay_fit(synthetic_decay_curve(3.0, 24))
    assert floor_limited
    assert fit.sigma == pytest.approx(3.0, rel=1e-6)


def test_circle_is_analytic_to_machine_precision():
    rep = analyticity_diagnostics(circle(3, 8))
    assert rep.verdict == FLOOR_LIMITED
    assert rep.analyticToMachinePrecision and math.isinf(rep.fourier.sigma)
    assert rep.outsideEnergyFraction == 0.0
    d = rep.to_dict()
    assert d["verdict"] == FLOOR_LIMITED


def test_too_few_modes():
    with pytest.raises(InsufficientDataError):
        analyticity_diagnostics(random_curve(3, seed=0))
    with pytest.raises(ParameterError):
        analyticity_diagnostics(circle(3, 4), lMax=1)


def test_plane_through_center_crosses_twice():
    res = intersection_count(circle(3, 4), Plane((0, 1, 0), 0.0))
    assert res.value == 2 and not res.ambiguous
    assert np.allclose(res.roots, [0.0, 0.5], atol=1e-12) or np.allclose(res.roots, [0.25, 0.75], atol=1e-12)


def test_plane_and_sphere_counts():
    c = make_fixture("ellipse", bandwidth=32, strict=False)
    assert intersection_count(c, Plane((1, 0, 0), 10.0)).value == 0
    assert intersection_count(c, Sphere((0, 0, 0), 1e-3)).value == 0
    assert intersection_count(c, Plane.through((1, 1, 0), (0, 0, 0))).value == 2


def test_contained_curve():
    assert intersection_count(circle(3, 2), Plane((0, 0, 1), 0.0)).value == CONTAINED


def test_tangent_plane_is_ambiguous():
    c = circle(3, 4)
    R = 1 / (2 * np.pi)
    for normal in ((1, 0, 0), (0, 1, 0)):
        res = intersection_count(c, Plane(normal, R))
        assert res.ambiguous and res.count == 0
    near = intersection_count(c, Plane((1, 0, 0), R * (1 - 1e-6)))
    assert near.count == 2 and not near.ambiguous


def test_dimension_mismatch():
    with pytest.raises(ParameterError):
        intersection_count(circle(2, 2), Plane((0, 0, 1), 0.0))
    with pytest.raises(ParameterError):
        Sphere((0, 0, 0), -1.0)
