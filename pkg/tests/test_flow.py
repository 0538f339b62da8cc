import numpy as np
import pytest

from mengerlab.curve import circle, length, perturbed, quality_report
from mengerlab.energy import EnergyParams, MengerEnergy
from mengerlab.errors import ParameterError
from mengerlab.flow import FlowConfig, flow_step, initial_state, precondition, project

CIRCLE_ENERGY_25 = 306.266315235


@pytest.mark.parametrize(
    "kw", [{"step": 0}, {"maxIters": -1}, {"backtrackFactor": 1.0}, {"growFactor": 0.5}, {"projectEvery": 0}]
)
def test_config_validation(kw):
    with pytest.raises(ParameterError):
        FlowConfig(**kw)


def test_default_precondition_order():
    assert FlowConfig().order(2.5) == pytest.approx(1.75)
    assert FlowConfig(preconditionOrder=1.0).order(2.5) == 1.0


def test_precondition_damps_high_modes():
    c = perturbed(circle(3, 8), 6, 0.1)
    pc = precondition(c, 1.0)
    N = c.bandwidth
    assert np.allclose(pc.coeffs[N], c.coeffs[N])
    assert np.allclose(pc.coeffs[N + 6], c.coeffs[N + 6] / 37.0)


def test_projection_gives_unit_length_arclength_curve():
    c = project(2.0 * perturbed(circle(3, 16), 2, 0.02))
    assert length(c) == pytest.approx(1.0, abs=1e-12)
    assert quality_report(c).lengthDeviation < 1e-8


def test_single_step_decreases_energy():
    params = EnergyParams(2.5)
    c = project(perturbed(circle(3, 8), 2, 2e-2))
    fn = MengerEnergy.for_curve(c, params)
    cfg = FlowConfig()
    s0 = initial_state(c, cfg, fn)
    s1 = flow_step(s0, cfg, params, functional=fn)
    assert s1.iter == 1
    assert s1.energy < s0.energy
    assert length(s1.curve) == pytest.approx(1.0, abs=1e-12)


def test_flow_reaches_round_circle(flow_run):
    _, state, _ = flow_run
    assert state.converged
    assert state.energy == pytest.approx(CIRCLE_ENERGY_25, rel=1e-7)
    assert np.all(np.diff(state.energyHistory) <= 1e-9 * state.energyHistory[0])
