import numpy as np
import pytest

from mengerlab.analysis.leibniz import case_shifts, fractional_leibniz_check, leibniz_ratio
from mengerlab.errors import ParameterError
from mengerlab.sobolev import scalar_series

COS = scalar_series([0.5])  # cos(2 pi x)

# f = g = cos: ||product||_{H^1} = sqrt(14) sin^2(pi w), integrated by iterated 1-D quadrature
CASE2_LHS = 56.7642093892566


def test_cosine_case_against_oracle():
    res = fractional_leibniz_check(COS, COS, 1.0, 2.5, 2, 1.0, 0.0)
    assert res.lhs == pytest.approx(CASE2_LHS, rel=1e-8)
    assert res.rhsProduct == pytest.approx(0.5 * 2**1.75, rel=1e-14)


def test_cosine_regression_values():
    ratios = [leibniz_ratio(COS, COS, 1.0, 2.5, c, 1.0, 0.0) for c in (1, 2, 3, 4)]
    assert ratios[0] == 0.0
    assert ratios[1] == pytest.approx(33.75220080268565, rel=1e-9)
    assert ratios[2] == pytest.approx(ratios[1], rel=1e-9)  # D is symmetric under v <-> -w
    assert ratios[3] == pytest.approx(85.78383728120149, rel=1e-9)


def test_vanishing_integrands():
    g = scalar_series([0.3, 0.1j])
    assert fractional_leibniz_check(scalar_series([0.0]), g, 1.0, 2.5, 4, 1.0, 0.0).lhs == 0.0
    assert fractional_leibniz_check(g, g, 1.0, 2.5, 3, 0.5, 0.5).lhs == 0.0


def test_bilinear_scaling():
    rng = np.random.default_rng(2)
    f = scalar_series(rng.normal(size=3) + 1j * rng.normal(size=3))
    g = scalar_series(rng.normal(size=3) + 1j * rng.normal(size=3))
    a = fractional_leibniz_check(f, g, 1.0, 2.4, 1, 0.7, 0.2)
    b = fractional_leibniz_check(f * 2.0, g * 3.0, 1.0, 2.4, 1, 0.7, 0.2)
    assert b.lhs == pytest.approx(6 * a.lhs, rel=1e-12)
    assert b.ratio == pytest.approx(a.ratio, rel=1e-12)


def test_case_shift_patterns():
    v, w = -0.2, 0.3
    assert case_shifts(4, v, w, 1.0, 0.0) == (w, v, w, v)
    assert case_shifts(1, v, w, 0.5, 1.0) == (0.15, -0.1, 0.3, -0.2)


@pytest.mark.parametrize(
    "kw", [{"p": 2.0}, {"p": 8.0 / 3.0}, {"m": 0.5}, {"s1": 1.5}, {"case_id": 5}, {"refine": -1}]
)
def test_invalid_arguments(kw):
    args = dict(f=COS, g=COS, m=1.0, p=2.5, case_id=1, s1=1.0, s2=0.5)
    args.update(kw)
    with pytest.raises(ParameterError):
        fractional_leibniz_check(**args)


def test_vector_input_rejected():
    from mengerlab.curve import circle

    with pytest.raises(ParameterError):
        fractional_leibniz_check(circle(2), COS, 1.0, 2.5, 1, 1.0, 0.5)
