"""Circumradius quantities and the generalized integral Menger curvature.

The energy of a closed curve is evaluated as

    intM^(p,q)(gamma) = 6 int_0^1 iint_D |a b (a+b)|^(q-p) S(u, v, w) dv dw du,

where u is the point opposite the longest of the three arcs, so every
unordered triple is counted once per ordering.  The smooth density S is
described in :mod:`mengerlab._kernels_py`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .curve import SIMPLICITY_THRESHOLD, FourierCurve, quality_report
from .errors import DegenerateTripleError, ParameterError, TopologyError
from .quadrature import DomainRule, QuadratureConfig, adaptive_rule

log = logging.getLogger(__name__)

NONDEGENERATE_P = (7.0 / 3.0, 8.0 / 3.0)
_CHUNK_ENTRIES = 1_500_000


# -- pointwise geometry -----------------------------------------------------

def _wedge_norm(a, b):
    aa, bb, ab = np.dot(a, a), np.dot(b, b), np.dot(a, b)
    return float(np.sqrt(max(aa * bb - ab * ab, 0.0)))


def _triple(x, y, z):
    x, y, z = (np.asarray(t, dtype=float) for t in (x, y, z))
    dyz, dyx, dzx = np.linalg.norm(y - z), np.linalg.norm(y - x), np.linalg.norm(z - x)
    if min(dyz, dyx, dzx) == 0.0:
        raise DegenerateTripleError("two of the three points coincide")
    return dyz * dyx * dzx, _wedge_norm(y - x, z - x)


def circumradius(x, y, z) -> float:
    """Radius of the circle through three points, ``inf`` if collinear."""
    prod, wedge = _triple(x, y, z)
    if wedge == 0.0:
        return float("inf")
    return prod / (2.0 * wedge)


def decoupled_radius(x, y, z, p: float, q: float) -> float:
    """``(|y-z||y-x||z-x|)^p / |(y-x)^(z-x)|^q``; ``inf`` if collinear."""
    prod, wedge = _triple(x, y, z)
    if wedge == 0.0:
        return float("inf")
    return prod**p / wedge**q


# -- parameters ---------------------------------------------------------------

@dataclass(frozen=True)
class EnergyParams:
    p: float
    q: float = 2.0
    quad: QuadratureConfig = field(default_factory=QuadratureConfig)

    def __post_init__(self):
        if not (self.p > 0 and self.q > 0):
            raise ParameterError("p and q must be positive")

    @property
    def nondegenerate(self) -> bool:
        return self.q == 2.0 and NONDEGENERATE_P[0] < self.p < NONDEGENERATE_P[1]

    @property
    def exponent(self) -> float:
        """Power of |v w (w - v)| carried by the integrand."""
        return self.q - self.p

    @property
    def finite(self) -> bool:
        return self.p < self.q + 2.0 / 3.0


@dataclass(frozen=True)
class EnergyResult:
    value: float
    errorEstimate: float
    p: float
    q: float
    quadratureError: float
    uError: float
    nodes: int

    def __float__(self):
        return self.value

    def to_dict(self) -> dict:
        return {"value": self.value, "errorEstimate": self.errorEstimate, "p": self.p, "q": self.q}


# -- spectral fields ----------------------------------------------------------

def _quotient_symbol(k, x):
    """(exp(2 pi i k x) - 1) / x in a cancellation-free form."""
    x = x[:, None]
    return 2j * np.exp(1j * np.pi * k * x) * np.sin(np.pi * k * x) / x


def grid_size(curve: FourierCurve, cfg: QuadratureConfig) -> int:
    return cfg.uOversample * (curve.bandwidth + 1)


class _Spectral:
    """Half spectrum of a curve plus reusable per-grid quantities."""

    def __init__(self, curve: FourierCurve, M: int):
        self.curve = curve
        self.M = M
        self.n = curve.dim
        self.half = curve.half_spectrum()  # (n, N+1)
        self.k = np.arange(curve.bandwidth + 1)
        self.dk = 2j * np.pi * self.k
        self.P1 = self.irfft(self.half * self.dk)  # (n, M)
        self.sp1 = np.sqrt(np.einsum("im,im->m", self.P1, self.P1))

    def irfft(self, spec):
        return np.fft.irfft(spec, n=self.M, axis=-1) * self.M

    def multipliers(self, a, b):
        v, w = -a, b
        return {
            "A": _quotient_symbol(self.k, v),
            "B": _quotient_symbol(self.k, w),
            "P2": self.dk * np.exp(2j * np.pi * self.k * v[:, None]),
            "P3": self.dk * np.exp(2j * np.pi * self.k * w[:, None]),
        }

    def fields(self, mult):
        out = {}
        for key, m in mult.items():
            out[key] = np.ascontiguousarray(self.irfft(self.half[None, :, :] * m[:, None, :]))
        return out


def _chunks(count, per_node):
    step = max(1, _CHUNK_ENTRIES // max(per_node, 1))
    for start in range(0, count, step):
        yield slice(start, min(count, start + step))


def density_samples(spec: _Spectral, a, b, params: EnergyParams):
    """Smooth density S on the u-grid for every node, shape (nodes, M)."""
    out = np.empty((len(a), spec.M))
    for sl in _chunks(len(a), spec.n * spec.M * 4):
        f = spec.fields(spec.multipliers(a[sl], b[sl]))
        out[sl] = kernels.menger_density(
            f["A"], f["B"], f["P2"], f["P3"], spec.sp1, np.ascontiguousarray(a[sl]), np.ascontiguousarray(b[sl]),
            float(params.p), float(params.q),
        )
    return out


# -- functional with a frozen rule -----------------------------------------

class MengerEnergy:
    """intM^(p,q) with a domain rule frozen at construction.

    Freezing the rule makes the discrete energy a smooth function of the
    Fourier coefficients, so finite differences and the adjoint gradient
    describe the same object.

    Parameters
    ----------
    params : EnergyParams
    rule : DomainRule
        Quadrature over D for the exponent ``params.q - params.p``.
    """

    def __init__(self, params: EnergyParams, rule: DomainRule):
        if not np.isclose(rule.exponent, params.exponent):
            raise ParameterError("rule exponent does not match q - p")
        self.params = params
        self.rule = rule

    @classmethod
    def for_curve(cls, curve: FourierCurve, params: EnergyParams) -> "MengerEnergy":
        """Build the rule adaptively on ``curve``."""
        if not params.finite:
            raise ParameterError(f"energy is infinite for p >= q + 2/3 (p={params.p}, q={params.q})")
        spec = _Spectral(curve, grid_size(curve, params.quad))

        def node_mean(a, b):
            return density_samples(spec, a, b, params).mean(axis=1)

        rule = adaptive_rule(params.exponent, params.quad, node_mean)
        log.debug("energy rule: %d nodes, error %.3e", len(rule), rule.errorEstimate)
        return cls(params, rule)

    def _grid(self, curve):
        return grid_size(curve, self.params.quad)

    def evaluate(self, curve: FourierCurve) -> EnergyResult:
        spec = _Spectral(curve, self._grid(curve))
        S = density_samples(spec, self.rule.a, self.rule.b, self.params)
        per_u = 6.0 * (self.rule.weights @ S)
        value = float(per_u.mean())
        u_err = abs(value - float(per_u[::2].mean()))
        q_err = 6.0 * self.rule.errorEstimate if np.isfinite(self.rule.errorEstimate) else 0.0
        return EnergyResult(value, q_err + u_err, self.params.p, self.params.q, q_err, u_err, len(self.rule))

    def __call__(self, curve: FourierCurve) -> float:
        return self.evaluate(curve).value

    def value_and_gradient(self, curve: FourierCurve):
        """Energy and its L2 gradient restricted to modes |k| <= N.

        The gradient g satisfies ``dE(gamma)[h] = int <g, h> du`` for every
        band-limited h, exactly for the discretized energy.
        """
        spec = _Spectral(curve, self._grid(curve))
        rule, prm = self.rule, self.params
        N, n, M = curve.bandwidth, curve.dim, spec.M
        ghat = np.zeros((n, N + 1), dtype=complex)
        gP1 = np.zeros((n, M))
        total = 0.0
        for sl in _chunks(len(rule), n * M * 12):
            a = np.ascontiguousarray(rule.a[sl])
            b = np.ascontiguousarray(rule.b[sl])
            wts = rule.weights[sl]
            mult = spec.multipliers(a, b)
            f = spec.fields(mult)
            S, gA, gB, gp1, gp2, gp3 = kernels.menger_density_grad(
                f["A"], f["B"], np.ascontiguousarray(spec.P1), f["P2"], f["P3"], spec.sp1, a, b,
                float(prm.p), float(prm.q),
            )
            total += float(wts @ S.mean(axis=1))
            gP1 += np.einsum("k,kim->im", wts, gp1)
            for key, X in (("A", gA), ("B", gB), ("P2", gp2), ("P3", gp3)):
                Xh = np.fft.rfft(X, axis=-1)[:, :, : N + 1] / M
                ghat += np.einsum("k,kj,kij->ij", wts, np.conj(mult[key]), Xh)
        ghat += np.conj(spec.dk) * (np.fft.rfft(gP1, axis=-1)[:, : N + 1] / M)
        ghat *= 6.0
        coeffs = np.zeros((2 * N + 1, n), dtype=complex)
        coeffs[N:] = ghat.T
        coeffs[:N] = np.conj(ghat[:, 1:][:, ::-1]).T
        return 6.0 * total, FourierCurve(coeffs)

    def gradient(self, curve: FourierCurve) -> FourierCurve:
        return self.value_and_gradient(curve)[1]


def check_simple(curve: FourierCurve, threshold: float = SIMPLICITY_THRESHOLD):
    qr = quality_report(curve)
    if not qr.minSeparation > threshold or not qr.bilipschitzConstant > 0:
        raise TopologyError(f"curve is not simple on the sampling grid (minSeparation={qr.minSeparation:.3e})")
    return qr


def energy_report(curve: FourierCurve, params: EnergyParams) -> EnergyResult:
    """Energy with error estimate; validates simplicity first."""
    check_simple(curve)
    return MengerEnergy.for_curve(curve, params).evaluate(curve)


def energy(curve: FourierCurve, params: EnergyParams) -> float:
    """intM^(p,q) of a simple closed curve."""
    return energy_report(curve, params).value


def menger_curvature(curve: FourierCurve, p: float, quad: QuadratureConfig | None = None) -> float:
    """Classical integral Menger curvature M^p = 2^p intM^(p,p)."""
    params = EnergyParams(p, p, quad or QuadratureConfig())
    return 2.0**p * energy(curve, params)


def energy_integrand_stats(curve: FourierCurve, params: EnergyParams) -> dict:
    """Where the quadrature spends effort and where the integrand mass sits.

    Returns the cell count, a histogram of refinement depths, the largest
    single-cell contribution, and the contribution density (per unit area
    of D) of every cell together with the cell's distance to the diagonal
    point v = w = 0.
    """
    check_simple(curve)
    fn = MengerEnergy.for_curve(curve, params)
    rule = fn.rule
    spec = _Spectral(curve, grid_size(curve, params.quad))
    S = density_samples(spec, rule.a, rule.b, params).mean(axis=1)
    contrib = np.bincount(rule.cellIndex, weights=6.0 * rule.weights * S, minlength=len(rule.cells))
    cells = rule.cells
    t = 0.5 * (cells.t0 + cells.t1)
    smax = np.where(t <= 0.5, 1.0 / (2.0 - t), 1.0 / (1.0 + t))
    # area in (a, b): |d(a,b)/d(t,sigma)| = s * smax
    sc = 0.5 * (cells.s0 + cells.s1) * smax
    area = sc * smax * (cells.t1 - cells.t0) * (cells.s1 - cells.s0)
    depth_hist = np.bincount(cells.depth)
    return {
        "cells": int(len(cells)),
        "nodes": int(len(rule)),
        "depthHistogram": depth_hist.tolist(),
        "maxCellContribution": float(contrib.max()),
        "errorEstimate": float(6.0 * rule.errorEstimate),
        "cellDistance": sc,
        "cellDensity": contrib / area,
        "cellContribution": contrib,
    }
