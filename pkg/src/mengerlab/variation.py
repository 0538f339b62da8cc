"""First variation, main term and its Fourier multiplier.

With A = (gamma(u+v) - gamma(u)) / v and B = (gamma(u+w) - gamma(u)) / w the
main term is the bilinear form

    Q(gamma, h) = int_u iint_D <B_gamma - A_gamma, B_h - A_h> K(v, w),
    K = |v - w|^(-p) |v|^(2-p) |w|^(2-p),

which is diagonal in Fourier space with nonnegative entries rho_k:

    Q(gamma, h) = sum_k rho_k <gamma_hat(k), h_hat(k)>,
    rho_k = iint_D |phi_k|^2 K,  phi_k = E_k(w) - E_k(v),
    E_k(x) = (exp(2 pi i k x) - 1) / x.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .curve import FourierCurve, SampledCurve
from .energy import EnergyParams, MengerEnergy, check_simple
from .errors import (
    DegenerateCurveError,
    InternalConsistencyError,
    ParameterError,
    PreconditionError,
    TopologyError,
)
from .quadrature import DomainRule, QuadratureConfig, adaptive_rule, in_domain
from .sobolev import bessel_norm

log = logging.getLogger(__name__)

VARIATION_FACTOR = 12.0


class DomainD:
    """The relative-offset domain and its graded quadrature."""

    @staticmethod
    def contains(v, w):
        return in_domain(v, w)

    @staticmethod
    def rule(exponent: float, cfg: QuadratureConfig, func, scale: int = 1) -> DomainRule:
        return adaptive_rule(exponent, cfg, func, scale)


@dataclass(frozen=True)
class FDResult:
    value: float
    errorEstimate: float


@dataclass(frozen=True)
class VariationResult:
    value: float
    qPart: float
    rPart: float


@dataclass(frozen=True)
class MultiplierTable:
    p: float
    k: np.ndarray
    rho: np.ndarray
    q: np.ndarray
    cEstimate: float

    @property
    def kMax(self) -> int:
        return int(self.k[-1])

    def rho_at(self, k) -> np.ndarray:
        """rho_|k| with rho_0 = 0."""
        k = np.abs(np.asarray(k))
        if k.max(initial=0) > self.kMax:
            raise ParameterError(f"table covers |k| <= {self.kMax}")
        full = np.concatenate([[0.0], self.rho])
        return full[k]

    def entries(self):
        return list(zip(self.k.tolist(), self.rho.tolist(), self.q.tolist()))


@dataclass(frozen=True)
class ELResult:
    residualNorm: float
    lam: float
    gradientNorm: float

    @property
    def relativeResidual(self) -> float:
        return self.residualNorm / self.gradientNorm if self.gradientNorm > 0 else 0.0


# -- symbols ------------------------------------------------------------------

def quotient_symbol(k, x):
    """E_k(x) = (exp(2 pi i k x) - 1) / x for node arrays x, shape (nodes, modes)."""
    x = np.asarray(x)[:, None]
    return 2j * np.exp(1j * np.pi * k * x) * np.sin(np.pi * k * x) / x


def main_symbol(k, a, b):
    """phi_k / s for nodes (a, b) = (-v, w)."""
    return (quotient_symbol(k, b) - quotient_symbol(k, -a)) / (a + b)[:, None]


def remark_symbol(k, a, b):
    """Symbol of the four second-difference terms of the explicit formula, over s^2.

    The terms are, with Dq(x) = (gamma(u+x) - gamma(u)) / x,
      (Dq(-w) - Dq(w)) / w,  (Dq(-v) - Dq(v)) / v,
      (Dq(v) - (gamma(u+v-w) - gamma(u-w)) / v) / w,
      (Dq(w) - (gamma(u+w-v) - gamma(u-v)) / w) / v.
    Each is a Fourier multiplier; they are evaluated in product form to
    avoid cancellation.
    """
    v, w = -np.asarray(a), np.asarray(b)
    kk = np.asarray(k)
    sw = np.sin(np.pi * kk * w[:, None]) / w[:, None]
    sv = np.sin(np.pi * kk * v[:, None]) / v[:, None]
    t1 = 4.0 * sw**2
    t2 = 4.0 * sv**2
    Ev, Ew = quotient_symbol(kk, v), quotient_symbol(kk, w)
    Emw, Emv = quotient_symbol(kk, -w), quotient_symbol(kk, -v)
    t3 = Ev * Emw
    t4 = Ew * Emv
    s = (w - v)[:, None]
    return (t1 + t2 + (t3 + t4).real) / s**2


def _fields(curve: FourierCurve, symbol, M):
    """irfft of symbol(k) * gamma_hat(k) for every node: (nodes, n, M)."""
    half = curve.half_spectrum()
    return np.fft.irfft(half[None, :, :] * symbol[:, None, :], n=M, axis=-1) * M


def _grid(N, cfg):
    return cfg.uOversample * (N + 1)


# -- first variation ------------------------------------------------------------

def first_variation_fd(
    curve: FourierCurve, h: FourierCurve, params: EnergyParams, eps: float = 1e-4, functional: MengerEnergy | None = None
) -> FDResult:
    """Central difference of the energy along h with one Richardson step."""
    for sgn in (1.0, -1.0):
        try:
            check_simple(curve + (sgn * eps) * h)
        except TopologyError as exc:
            raise PreconditionError(f"eps={eps} breaks simplicity: {exc}") from exc
    fn = functional or MengerEnergy.for_curve(curve, params)

    def central(e):
        return (fn(curve + e * h) - fn(curve + (-e) * h)) / (2 * e)

    d1, d2 = central(eps), central(eps / 2)
    rich = (4 * d2 - d1) / 3
    return FDResult(float(rich), float(abs(rich - d2)))


def l2_gradient(curve: FourierCurve, params: EnergyParams, functional: MengerEnergy | None = None) -> FourierCurve:
    """L2 representative of the first variation (exact for the discrete energy)."""
    fn = functional or MengerEnergy.for_curve(curve, params)
    return fn.gradient(curve)


def _bilinear_rule(curve, h, params):
    e = 2.0 - params.p
    N = max(curve.bandwidth, h.bandwidth)
    g, hh = curve.resized(N), h.resized(N)
    k = np.arange(N + 1)
    wk = np.where(k == 0, 1.0, 2.0)
    mass = wk * (np.sum(np.abs(g.half_spectrum()) ** 2, axis=0) + np.sum(np.abs(hh.half_spectrum()) ** 2, axis=0))

    def func(a, b):
        return (np.abs(main_symbol(k, a, b)) ** 2) @ mass

    return adaptive_rule(e, params.quad, func)


def main_term_bilinear(curve: FourierCurve, h: FourierCurve, params: EnergyParams, rule: DomainRule | None = None) -> float:
    """Q(gamma, h) by quadrature over u and D."""
    N = max(curve.bandwidth, h.bandwidth)
    g, hh = curve.resized(N), h.resized(N)
    rule = rule or _bilinear_rule(g, hh, params)
    M = _grid(N, params.quad)
    k = np.arange(N + 1)
    total = 0.0
    step = max(1, 400_000 // (g.dim * M))
    for start in range(0, len(rule), step):
        sl = slice(start, start + step)
        sym = main_symbol(k, rule.a[sl], rule.b[sl])
        Yg = _fields(g, sym, M)
        Yh = _fields(hh, sym, M)
        total += float(rule.weights[sl] @ np.einsum("kim,kim->k", Yg, Yh)) / M
    return total


def variation_decomposition(
    curve: FourierCurve, h: FourierCurve, params: EnergyParams, eps: float = 1e-4, functional: MengerEnergy | None = None
) -> VariationResult:
    """delta E = 12 Q + remainder, with the remainder defined as the difference."""
    value = first_variation_fd(curve, h, params, eps, functional).value
    q_part = VARIATION_FACTOR * main_term_bilinear(curve, h, params)
    return VariationResult(value, q_part, value - q_part)


# -- multiplier --------------------------------------------------------------

def rho(k: int, p: float, quad: QuadratureConfig | None = None) -> float:
    """Single multiplier entry rho_k by adaptive quadrature over D."""
    quad = quad or QuadratureConfig()
    if k == 0:
        return 0.0
    kk = np.array([abs(k)])

    def func(a, b):
        return np.abs(main_symbol(kk, a, b)[:, 0]) ** 2

    scale = max(1, math.ceil(abs(k) / 8))
    rule = adaptive_rule(2.0 - p, quad, func, scale=scale)
    return rule.integrate(func(rule.a, rule.b))


def multiplier_table(p: float, kMax: int, quad: QuadratureConfig | None = None, tol: float = 1e-9) -> MultiplierTable:
    """rho_k and q_k = k^(4 - 3p) rho_k for k = 1..kMax.

    The base mesh is refined in proportion to k so that panels resolve the
    oscillation of phi_k.
    """
    if kMax < 1:
        raise ParameterError("kMax must be >= 1")
    if not 0 < 2.0 - p + 2.0 / 3.0:
        raise ParameterError("p must be < 8/3 for finite multipliers")
    quad = quad or QuadratureConfig(relTol=1e-8, maxRefine=8)
    ks = np.arange(1, kMax + 1)
    rhos = np.array([rho(int(k), p, quad) for k in ks])
    scale_ref = max(abs(rhos).max(), 1.0)
    if np.any(rhos < -tol * scale_ref):
        raise InternalConsistencyError("negative multiplier entry; quadrature failed")
    qs = rhos * ks ** (4.0 - 3.0 * p)
    top = qs[int(np.floor(0.75 * len(qs))) :] if len(qs) >= 4 else qs[-1:]
    return MultiplierTable(float(p), ks, rhos, qs, float(np.mean(top)))


def multiplier_single_mode(k: int, params: EnergyParams, amplitude: float = 1.0) -> float:
    """rho_k read off Q(e_k, e_k) for the real probe e_k = a cos(2 pi k u) e_1."""
    N = k
    c = np.zeros((2 * N + 1, 2), dtype=complex)
    c[N + k, 0] = c[N - k, 0] = amplitude / 2
    e = FourierCurve(c)
    # u-trapezoid with 8k+16 points integrates the trigonometric integrand exactly
    quad = params.quad
    over = max(quad.uOversample, math.ceil((8 * k + 16) / (N + 1)))
    prm = EnergyParams(params.p, params.q, QuadratureConfig(**{**quad.__dict__, "uOversample": over}))
    return main_term_bilinear(e, e, prm) / (amplitude**2 / 2)


def main_term_operator_fourier(curve: FourierCurve, table: MultiplierTable) -> FourierCurve:
    """Q~(gamma) with coefficients rho_k gamma_hat(k); mode 0 maps to 0."""
    if curve.bandwidth > table.kMax:
        raise ParameterError(f"table covers |k| <= {table.kMax}, curve has N = {curve.bandwidth}")
    r = table.rho_at(curve.modes)
    return FourierCurve(curve.coeffs * r[:, None])


def main_term_operator_direct(
    curve: FourierCurve, params: EnergyParams, grid_size: int | None = None, rule: DomainRule | None = None
) -> SampledCurve:
    """Q~(gamma)(u_j) from the explicit double-integral formula.

    The integrand at each node is the sum of the four second difference
    quotients, evaluated pointwise on the u-grid and integrated over D.
    """
    N = curve.bandwidth
    M = grid_size or _grid(N, params.quad)
    k = np.arange(N + 1)
    wk = np.where(k == 0, 1.0, 2.0)
    power = wk * np.sum(np.abs(curve.half_spectrum()) ** 2, axis=0)
    if rule is None:
        rule = adaptive_rule(2.0 - params.p, params.quad, lambda a, b: remark_symbol(k, a, b) @ power)
    out = np.zeros((curve.dim, M))
    step = max(1, 400_000 // (curve.dim * M))
    for start in range(0, len(rule), step):
        sl = slice(start, start + step)
        vals = _fields(curve, remark_symbol(k, rule.a[sl], rule.b[sl]), M)
        out += np.einsum("k,kim->im", rule.weights[sl], vals)
    return SampledCurve(out.T)


# -- stationarity ---------------------------------------------------------------

def euler_lagrange_residual(
    curve: FourierCurve,
    params: EnergyParams,
    table: MultiplierTable | None = None,
    functional: MengerEnergy | None = None,
    n_test: int | None = None,
    gradient: FourierCurve | None = None,
) -> ELResult:
    """Least-squares multiplier and residual of g - lambda gamma''.

    g is the L2 gradient tested against modes |k| <= n_test.  lambda is the
    minimizer of ||g - lambda gamma''||, so that g = lambda gamma'' at a
    length-constrained critical point.  ``table`` is accepted for interface
    symmetry; the gradient already contains the main term.
    """
    g = gradient if gradient is not None else l2_gradient(curve, params, functional)
    N = curve.bandwidth
    nt = N if n_test is None else min(n_test, N)
    mask = (np.abs(curve.modes) <= nt)[:, None]
    G = np.where(mask, g.resized(N).coeffs, 0)
    D2 = np.where(mask, curve.derivative(2).coeffs, 0)
    dd = float(np.sum(np.abs(D2) ** 2))
    if dd == 0:
        raise DegenerateCurveError("gamma'' vanishes")
    lam = float(np.sum(G * np.conj(D2)).real / dd)
    res = float(np.sqrt(np.sum(np.abs(G - lam * D2) ** 2)))
    return ELResult(res, lam, float(np.sqrt(np.sum(np.abs(G) ** 2))))


def corollary_ql_check(curve: FourierCurve, table: MultiplierTable, l: int, m: float) -> float:
    """||gamma^(l+3)||_{H^(m+3p-7)} / ||d^l Q~(gamma)||_{H^m}."""
    if l < 0 or m < 0:
        raise ParameterError("l and m must be nonnegative")
    p = table.p
    num = bessel_norm(curve.derivative(l + 3), max(m + 3 * p - 7, 0.0)) if m + 3 * p - 7 >= 0 else None
    if num is None:
        raise ParameterError("m + 3p - 7 must be >= 0")
    qt = main_term_operator_fourier(curve, table)
    den = bessel_norm(qt.derivative(l) if l else qt, m)
    if den == 0:
        raise DegenerateCurveError("main term vanishes (constant curve)")
    return num / den
