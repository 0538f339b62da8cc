"""Length-constrained preconditioned descent toward critical curves."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .curve import FourierCurve, normalize_length, reparametrize_arclength
from .energy import EnergyParams, MengerEnergy, check_simple
from .errors import AccuracyError, ParameterError, StagnationError, TopologyError
from .variation import MultiplierTable, euler_lagrange_residual

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlowConfig:
    """Descent settings.

    ``preconditionOrder=None`` selects (3p - 4) / 2, so mode k of the
    gradient is divided by roughly the size of the main-term symbol.
    """

    step: float = 2e-5
    preconditionOrder: float | None = None
    maxIters: int = 500
    residualTol: float = 1e-3
    backtrackFactor: float = 0.5
    projectEvery: int = 1
    growFactor: float = 2.0
    armijo: float = 1e-4
    minStep: float = 1e-12
    reparamTol: float = 1e-10

    def __post_init__(self):
        if self.step <= 0 or self.maxIters < 0 or self.residualTol <= 0 or self.projectEvery < 1:
            raise ParameterError("flow settings must be positive")
        if not 0 < self.backtrackFactor < 1:
            raise ParameterError("backtrackFactor must lie in (0, 1)")
        if self.growFactor < 1:
            raise ParameterError("growFactor must be >= 1")

    def order(self, p: float) -> float:
        return (3.0 * p - 4.0) / 2.0 if self.preconditionOrder is None else self.preconditionOrder


@dataclass(frozen=True)
class FlowState:
    curve: FourierCurve
    lam: float
    energyHistory: tuple = ()
    residualHistory: tuple = ()
    lambdaHistory: tuple = ()
    iter: int = 0
    step: float = 0.0
    converged: bool = False
    gradient: FourierCurve | None = field(default=None, repr=False)

    @property
    def energy(self) -> float:
        return self.energyHistory[-1]

    @property
    def residual(self) -> float:
        return self.residualHistory[-1]


def project(curve: FourierCurve, tol: float = 1e-10) -> FourierCurve:
    """Arc-length reparametrization followed by normalization to length 1.

    When the bandwidth cannot carry a constant-speed representative to
    ``tol`` the most uniform one found is used.
    """
    try:
        cur = reparametrize_arclength(curve, tol=tol)
    except AccuracyError as exc:
        log.debug("projection: %s", exc)
        cur = exc.best
    return normalize_length(cur)


def precondition(d: FourierCurve, order: float) -> FourierCurve:
    k = d.modes.astype(float)
    return FourierCurve(d.coeffs / ((1.0 + k**2) ** order)[:, None])


def _inner(f: FourierCurve, g: FourierCurve) -> float:
    N = max(f.bandwidth, g.bandwidth)
    return float(np.sum(f.resized(N).coeffs * np.conj(g.resized(N).coeffs)).real)


def initial_state(curve: FourierCurve, cfg: FlowConfig, functional: MengerEnergy) -> FlowState:
    value, grad = functional.value_and_gradient(curve)
    el = euler_lagrange_residual(curve, functional.params, gradient=grad)
    res = el.relativeResidual
    return FlowState(
        curve, el.lam, (value,), (res,), (el.lam,), 0, cfg.step, res <= cfg.residualTol, grad
    )


def flow_step(
    state: FlowState,
    cfg: FlowConfig,
    params: EnergyParams,
    table: MultiplierTable | None = None,
    functional: MengerEnergy | None = None,
) -> FlowState:
    """One projected, preconditioned, backtracking descent step.

    The search direction is P(g - lambda gamma'') with lambda fitted by
    least squares.  Trial curves are projected back to unit-length
    arc-length curves and accepted under the Armijo condition.
    """
    fn = functional or MengerEnergy.for_curve(state.curve, params)
    if state.gradient is None or not state.energyHistory:
        state = replace(initial_state(state.curve, cfg, fn), iter=state.iter)
    if state.converged or state.residual <= cfg.residualTol:
        return replace(state, converged=True)
    curve = state.curve
    d = state.gradient - state.lam * curve.derivative(2)
    pd = precondition(d, cfg.order(params.p))
    slope = _inner(d, pd)
    tau = state.step if state.step > 0 else cfg.step
    e0 = state.energy
    while True:
        trial = curve - tau * pd
        if (state.iter + 1) % cfg.projectEvery == 0:
            trial = project(trial, cfg.reparamTol)
        e1 = fn(trial)
        if np.isfinite(e1) and e1 <= e0 - cfg.armijo * tau * slope:
            break
        tau *= cfg.backtrackFactor
        if tau < cfg.minStep:
            raise StagnationError(f"step underflow at iteration {state.iter}", estimate=e0, best=state)
    value, grad = fn.value_and_gradient(trial)
    el = euler_lagrange_residual(trial, params, gradient=grad)
    res = el.relativeResidual
    log.info("iter %d energy %.12g residual %.3e step %.3e", state.iter + 1, value, res, tau)
    return FlowState(
        trial,
        el.lam,
        state.energyHistory + (value,),
        state.residualHistory + (res,),
        state.lambdaHistory + (el.lam,),
        state.iter + 1,
        tau * cfg.growFactor,
        res <= cfg.residualTol,
        grad,
    )


def find_critical_point(
    init: FourierCurve,
    cfg: FlowConfig,
    params: EnergyParams,
    table: MultiplierTable | None = None,
    functional: MengerEnergy | None = None,
    callback=None,
) -> FlowState:
    """Iterate :func:`flow_step` until the relative residual drops below tolerance."""
    check_simple(init)
    curve = project(init, cfg.reparamTol)
    fn = functional or MengerEnergy.for_curve(curve, params)
    state = initial_state(curve, cfg, fn)
    if callback is not None:
        callback(state)
    while not state.converged and state.iter < cfg.maxIters:
        state = flow_step(state, cfg, params, table, fn)
        try:
            check_simple(state.curve)
        except TopologyError as exc:
            raise TopologyError(f"simplicity lost at iteration {state.iter}: {exc}") from exc
        if callback is not None:
            callback(state)
    return state
