import math

import numpy as np
import pytest

from mengerlab.errors import ParameterError, PreconditionError
from mengerlab.sobolev import (
    banach_algebra_check,
    bessel_norm,
    cosine,
    derivative_norm_inequality_check,
    gagliardo_seminorm,
    multiply,
    scalar_series,
)

# sqrt(4 int_0^{1/2} sin^2(pi w) / w^2 dw), 30-digit mpmath value
GAGLIARDO_COS = 3.90795692781732422


def test_bessel_norm_of_cosine():
    c = cosine(1)
    assert bessel_norm(c, 0) == pytest.approx(1 / math.sqrt(2), rel=1e-15)
    assert bessel_norm(c, 2) == pytest.approx(math.sqrt(2), rel=1e-15)


def test_negative_index_rejected():
    with pytest.raises(ParameterError):
        bessel_norm(cosine(1), -1)


def test_gagliardo_seminorm_matches_oracle():
    assert gagliardo_seminorm(cosine(1), 0, 0.5, 2.0) == pytest.approx(GAGLIARDO_COS, rel=1e-6)


def test_gagliardo_is_one_homogeneous():
    f = scalar_series([0.3, 0.1j, 0.05])
    assert gagliardo_seminorm(f * 3.0, 1, 0.4, 2.5) / gagliardo_seminorm(f, 1, 0.4, 2.5) == pytest.approx(3.0, rel=1e-12)


def test_gagliardo_of_constant_is_zero():
    assert gagliardo_seminorm(scalar_series([0.0], mean=2.0), 0, 0.5, 2) == 0.0


def test_product_of_cosines():
    prod = multiply(cosine(1), cosine(1))  # cos^2 = 1/2 + cos(4 pi x)/2
    np.testing.assert_allclose(prod.coeffs.ravel(), [0.25, 0, 0.5, 0, 0.25], atol=1e-15)


def test_banach_algebra_ratio():
    assert banach_algebra_check(cosine(1), cosine(1), 1.0) == pytest.approx(math.sqrt(7 / 8), rel=1e-14)
    with pytest.raises(ParameterError):
        banach_algebra_check(cosine(1), cosine(1), 0.5)


def test_derivative_norm_inequality_random():
    rng = np.random.default_rng(1)
    for _ in range(20):
        f = scalar_series(rng.normal(size=6) + 1j * rng.normal(size=6))
        lo, mid, hi = derivative_norm_inequality_check(f, 1.7)
        assert lo <= mid <= hi


def test_derivative_norm_inequality_needs_mean_zero():
    with pytest.raises(PreconditionError):
        derivative_norm_inequality_check(scalar_series([1.0], mean=0.5), 2.0)
