import json

import numpy as np
import pytest

from mengerlab.curve import (
    FourierCurve,
    circle,
    evaluate,
    evaluate_at,
    from_function,
    from_samples,
    length,
    load_curve,
    make_fixture,
    normalize_length,
    perturbed,
    quality_report,
    refined_min_separation,
    reparametrize_arclength,
    save_curve,
)
from mengerlab.errors import AccuracyError, ParameterError, UndersamplingError


def test_coefficients_are_conjugate_symmetric():
    c = np.zeros((5, 2), dtype=complex)
    c[3] = [1 + 2j, 0.5]
    cur = FourierCurve(c)
    np.testing.assert_allclose(cur.mode(-1), np.conj(cur.mode(1)))
    assert cur.imag_residual() < 1e-15


def test_circle_has_unit_length_and_two_modes():
    c = circle(3)
    assert c.bandwidth == 1
    assert abs(length(c) - 1) < 1e-14
    # |gamma_hat(+-1)| = 1/(4 pi) in each in-plane component
    np.testing.assert_allclose(np.abs(c.mode(1)[:2]), 1 / (4 * np.pi))


def test_derivative_matches_finite_difference():
    c = make_fixture("ellipse")
    u = np.array([0.1, 0.37])
    h = 1e-6
    fd = (evaluate_at(c, u + h) - evaluate_at(c, u - h)) / (2 * h)
    np.testing.assert_allclose(evaluate_at(c, u, 1), fd, atol=1e-7)
    np.testing.assert_allclose(evaluate_at(c.derivative(1), u), evaluate_at(c, u, 1), atol=1e-12)


def test_evaluate_rejects_undersampling():
    with pytest.raises(UndersamplingError):
        evaluate(circle(3, 8), 0, 10)


def test_samples_round_trip():
    c = perturbed(circle(3, 6), 4, 0.01)
    back = from_samples(evaluate(c, 0, 40).samples, 6)
    np.testing.assert_allclose(back.coeffs, c.coeffs, atol=1e-15)


def test_json_round_trip(tmp_path):
    c = make_fixture("torus-knot", bandwidth=16, strict=False)
    save_curve(c, tmp_path / "k.json")
    assert json.loads((tmp_path / "k.json").read_text())["bandwidth"] == 16
    np.testing.assert_array_equal(load_curve(tmp_path / "k.json").coeffs, c.coeffs)


def test_quality_of_circle():
    q = quality_report(circle(3))
    assert q.lengthDeviation < 1e-14
    assert abs(q.bilipschitzConstant - 2 / np.pi) < 1e-12
    assert q.simple


def test_ellipse_fixture_is_arc_length():
    q = quality_report(make_fixture("ellipse"))
    assert q.lengthDeviation < 1e-8
    assert abs(q.length - 1) < 1e-12


def test_torus_knot_fixture_is_simple():
    q = quality_report(make_fixture("torus-knot", bandwidth=64))
    assert q.minSeparation > 0.01


def test_reparametrization_removes_a_warp():
    # a circle traversed with non-uniform speed
    base = circle(2, 1)
    warped = from_function(lambda u: evaluate_at(base, u + 0.05 * np.sin(2 * np.pi * u)), 2, 24)
    assert quality_report(warped).lengthDeviation > 1e-2
    fixed = reparametrize_arclength(warped, tol=1e-10)
    assert quality_report(fixed).lengthDeviation < 1e-10


def test_reparametrization_reports_best_on_failure():
    cur = perturbed(circle(3, 16), 3, 1e-2)
    with pytest.raises(AccuracyError) as info:
        reparametrize_arclength(cur, tol=1e-15)
    assert isinstance(info.value.best, FourierCurve)


def test_normalize_length_keeps_centroid():
    c = circle(3, 1, radius=2.0).transformed(shift=[1.0, 2.0, 3.0])
    n = normalize_length(c)
    assert abs(length(n) - 1) < 1e-14
    np.testing.assert_allclose(n.centroid, c.centroid)


def test_refined_separation_sees_crossings():
    # with R = r the torus knot passes through its axis three times
    bad = make_fixture("torus-knot", bandwidth=32, strict=False, R=1.0, r=1.0)
    good = make_fixture("torus-knot", bandwidth=32, strict=False)
    assert refined_min_separation(bad) < 1e-5
    assert refined_min_separation(good) > 0.01


def test_unknown_fixture():
    with pytest.raises(ParameterError):
        make_fixture("trefoil")
