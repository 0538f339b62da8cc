import numpy as np
import pytest

from conftest import random_curve
from mengerlab.curve import FourierCurve, circle, evaluate
from mengerlab.energy import EnergyParams, MengerEnergy
from mengerlab.errors import ParameterError, PreconditionError
from mengerlab.variation import (
    corollary_ql_check,
    euler_lagrange_residual,
    first_variation_fd,
    l2_gradient,
    main_term_operator_direct,
    main_term_operator_fourier,
    multiplier_single_mode,
    rho,
)

# rho_k at p = 2.5 from iterated 1-D quadrature with algebraic endpoint weights
RHO_ORACLE = {1: 1635.695012123324, 2: 20937.528176731743}


@pytest.mark.parametrize("k", [1, 2])
def test_rho_against_oracle(k):
    assert rho(k, 2.5) == pytest.approx(RHO_ORACLE[k], rel=1e-7)


def test_table_matches_single_mode_probe(table25):
    for k in (1, 3, 7):
        assert multiplier_single_mode(k, EnergyParams(2.5)) == pytest.approx(table25.rho[k - 1], rel=1e-6)


def test_table_shape_and_scaling(table25):
    assert table25.kMax == 32
    assert table25.rho_at([0, -3])[0] == 0.0
    assert table25.rho_at([-3])[0] == table25.rho[2]
    assert np.all(np.diff(table25.rho) > 0)
    # q_k = k^(4-3p) rho_k levels off
    top = table25.q[-8:]
    assert np.ptp(top) / top.mean() < 0.05
    with pytest.raises(ParameterError):
        table25.rho_at([33])


def test_fourier_operator_matches_direct(table25):
    c = random_curve(6, seed=5)
    params = EnergyParams(2.5)
    M = 64
    direct = main_term_operator_direct(c, params, grid_size=M).samples
    fourier = evaluate(main_term_operator_fourier(c, table25), 0, M).samples
    assert np.max(np.abs(direct - fourier)) <= 1e-6 * np.max(np.abs(fourier))


def test_fourier_operator_rejects_short_table(table25):
    with pytest.raises(ParameterError):
        main_term_operator_fourier(random_curve(40, seed=0), table25)


def test_circle_is_stationary():
    c = circle(3, 8)
    res = euler_lagrange_residual(c, EnergyParams(2.5))
    assert res.relativeResidual < 1e-6
    assert res.lam > 0


def test_fd_variation_matches_gradient_pairing():
    c = random_curve(4, seed=7)
    params = EnergyParams(2.5)
    fn = MengerEnergy.for_curve(c, params)
    h = random_curve(4, seed=8) - circle(3, 4)
    g = l2_gradient(c, params, fn)
    fd = first_variation_fd(c, h, params, eps=1e-5, functional=fn)
    assert float(np.sum(g.coeffs * np.conj(h.coeffs)).real) == pytest.approx(fd.value, rel=1e-6)


def test_fd_variation_rejects_nonsimple_step():
    c = circle(3, 2)
    twice = np.zeros_like(c.coeffs)
    twice[4], twice[0] = c.coeffs[3], c.coeffs[1]
    # c + h traverses the circle twice
    with pytest.raises(PreconditionError):
        first_variation_fd(c, FourierCurve(twice) - c, EnergyParams(2.5), eps=1.0)


def test_derivative_ratio_is_uniformly_bounded(table25):
    for curve, m in ((random_curve(6, seed=1), 1.0), (random_curve(10, seed=2, decay=0.5), 1.5)):
        r = [corollary_ql_check(curve, table25, l, m) for l in range(7)]
        assert all(np.isfinite(r)) and min(r) > 0
        assert max(r) / min(r) < 1.01
    with pytest.raises(ParameterError):
        corollary_ql_check(circle(3, 4), table25, -1, 1.0)
