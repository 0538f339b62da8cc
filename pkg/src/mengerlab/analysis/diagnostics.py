"""Analyticity and intersection diagnostics for Fourier curves."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from ..curve import FourierCurve, evaluate, evaluate_at
from ..errors import InsufficientDataError, ParameterError
from ..sobolev import bessel_norm
from .majorant import GrowthFit, factorial_growth_fit

NOISE_FLOOR = 1e-13
MIN_FIT_MODES = 4
MIN_R_SQUARED = 0.9

EXPONENTIAL = "exponential-decay"
FLOOR_LIMITED = "floor-limited"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class DecayFit:
    """log |gamma_hat(k)| ~ log(amplitude) - sigma k over ``kRange``."""

    sigma: float
    amplitude: float
    rSquared: float
    kRange: tuple

    def to_dict(self) -> dict:
        return {"sigma": self.sigma, "amplitude": self.amplitude, "rSquared": self.rSquared, "kRange": list(self.kRange)}


@dataclass(frozen=True)
class AnalyticityReport:
    fourier: DecayFit
    factorial: GrowthFit
    verdict: str
    floorLimited: bool
    analyticToMachinePrecision: bool
    usableModes: int
    outsideEnergyFraction: float

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "floorLimited": self.floorLimited,
            "analyticToMachinePrecision": self.analyticToMachinePrecision,
            "usableModes": self.usableModes,
            "outsideEnergyFraction": self.outsideEnergyFraction,
            "fourier": self.fourier.to_dict(),
            "factorial": self.factorial.to_dict(),
        }


def mode_amplitudes(curve: FourierCurve) -> np.ndarray:
    """|gamma_hat(k)| (Euclidean over components) for k = 0..N."""
    N = curve.bandwidth
    return np.linalg.norm(curve.coeffs[N:], axis=1)


def _linfit(x, y):
    slope, icpt = np.polyfit(x, y, 1)
    pred = slope * x + icpt
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum((y - pred) ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(icpt), min(1.0, max(0.0, r2))


def fourier_decay_fit(curve: FourierCurve, floor: float = NOISE_FLOOR):
    """Exponential fit over the upper half of the modes above the noise floor.

    Returns (fit, usable, floor_limited).  ``floor_limited`` is set when
    the highest modes fall below ``floor`` times the largest amplitude, which
    is what an exactly band-limited (or numerically entire) curve produces.
    """
    amp = mode_amplitudes(curve)[1:]
    if not np.any(amp > 0):
        raise ParameterError("constant curve")
    ks = np.arange(1, len(amp) + 1)
    thresh = floor * amp.max()
    above = amp > thresh
    usable = int(above.sum())
    # modes that vanish by symmetry are skipped; a tail below the floor is noise
    floor_limited = not above[-1]
    resolved = ks[above]
    if len(resolved) < MIN_FIT_MODES:
        if floor_limited:
            return DecayFit(math.inf, float(amp.max()), 1.0, (1, int(resolved[-1]))), usable, True
        raise InsufficientDataError(f"only {len(resolved)} modes above the noise floor")
    window = resolved[max(0, min(len(resolved) // 2, len(resolved) - MIN_FIT_MODES)) :]
    slope, icpt, r2 = _linfit(window.astype(float), np.log(amp[window - 1]))
    return DecayFit(-slope, math.exp(icpt), r2, (int(window[0]), int(window[-1]))), usable, floor_limited


def derivative_norms(curve: FourierCurve, lMax: int, s: float = 2.5) -> list:
    """b_l = ||gamma^(l)||_{H^s} for l = 0..lMax (exact for band-limited curves)."""
    return [bessel_norm(curve.derivative(l) if l else curve, s) for l in range(lMax + 1)]


def analyticity_diagnostics(curve: FourierCurve, lMax: int = 12, floor: float = NOISE_FLOOR) -> AnalyticityReport:
    """Fourier-decay and factorial-growth evidence for analyticity.

    The curve counts as analytic to machine precision when the spectral
    energy outside modes {0, +-1}, relative to the total, is below
    ``floor``; the verdict is then ``floor-limited`` with sigma = inf.
    Otherwise the amplitude fit decides: ``exponential-decay`` when the
    rate is positive and rSquared >= 0.9, ``floor-limited`` when fewer than
    four modes are resolved before the noise floor, ``inconclusive`` else.
    """
    if lMax < 2:
        raise ParameterError("lMax must be >= 2")
    amp = mode_amplitudes(curve)
    total = float(np.sum(amp[1:] ** 2))
    if total == 0:
        raise ParameterError("constant curve")
    outside = float(np.sum(amp[2:] ** 2)) / total
    machine = outside < floor
    if machine:
        fit = DecayFit(math.inf, float(amp[1]), 1.0, (1, curve.bandwidth))
        usable = int(np.sum(amp[1:] > floor * amp[1:].max()))
        floor_limited = True
    else:
        fit, usable, floor_limited = fourier_decay_fit(curve, floor)
    if math.isinf(fit.sigma):
        verdict = FLOOR_LIMITED
    elif fit.sigma > 0 and fit.rSquared >= MIN_R_SQUARED:
        verdict = EXPONENTIAL
    else:
        verdict = INCONCLUSIVE
    growth = factorial_growth_fit(derivative_norms(curve, lMax))
    return AnalyticityReport(fit, growth, verdict, floor_limited, machine, usable, outside)


def synthetic_decay_curve(sigma: float, bandwidth: int, dim: int = 3, seed: int = 0, noise: float = 0.0) -> FourierCurve:
    """gamma_hat(k) = exp(-sigma |k|) u_k with random unit vectors u_k.

    ``noise`` adds a relative log-normal perturbation to each amplitude.
    """
    rng = np.random.default_rng(seed)
    N = bandwidth
    c = np.zeros((2 * N + 1, dim), dtype=complex)
    for k in range(1, N + 1):
        u = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        u /= np.linalg.norm(u)
        amp = math.exp(-sigma * k) * math.exp(noise * rng.normal()) if noise else math.exp(-sigma * k)
        c[N + k] = amp * u
        c[N - k] = np.conj(amp * u)
    return FourierCurve(c)


# ---------------------------------------------------------------- intersections


@dataclass(frozen=True)
class Plane:
    """{x : <n, x> = offset} with n normalized."""

    normal: tuple
    offset: float = 0.0

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float)
        nn = np.linalg.norm(n)
        if nn == 0:
            raise ParameterError("plane normal must be nonzero")
        object.__setattr__(self, "normal", tuple(n / nn))
        object.__setattr__(self, "offset", float(self.offset) / nn)

    @classmethod
    def through(cls, normal, point) -> "Plane":
        return cls(normal, float(np.dot(normal, point)))

    def __call__(self, x):
        return np.asarray(x) @ np.asarray(self.normal) - self.offset


@dataclass(frozen=True)
class Sphere:
    """{x : |x - center|^2 = radius^2}."""

    center: tuple
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ParameterError("sphere radius must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    def __call__(self, x):
        d = np.asarray(x) - np.asarray(self.center)
        return np.sum(d * d, axis=-1) - self.radius**2


CONTAINED = "CONTAINED"


@dataclass(frozen=True)
class IntersectionResult:
    count: int | None
    contained: bool
    ambiguous: bool
    roots: tuple

    @property
    def value(self):
        return CONTAINED if self.contained else self.count

    def to_dict(self) -> dict:
        return {
            "count": CONTAINED if self.contained else self.count,
            "ambiguous": self.ambiguous,
            "roots": list(self.roots),
        }


def intersection_count(curve: FourierCurve, surface, tol: float = 1e-10, grid_size: int | None = None) -> IntersectionResult:
    """Count transversal crossings of ``surface`` by sign changes of F o gamma.

    Sign changes between grid samples are located by bracketing root
    search.  Runs of samples with |F| <= tol are crossings when the sign
    differs on both sides and tangential touches otherwise; touches, and
    local minima of |F| that dip below tol between samples, mark the count
    as ambiguous.
    """
    if len(np.atleast_1d(getattr(surface, "normal", getattr(surface, "center", ())))) != curve.dim:
        raise ParameterError("surface dimension does not match the curve")
    N = curve.bandwidth
    M = grid_size or max(2048, 64 * N)
    F = surface(evaluate(curve, 0, M).samples)
    if np.max(np.abs(F)) < tol:
        return IntersectionResult(None, True, False, ())
    fu = lambda u: float(surface(evaluate_at(curve, u)[0]))
    u = np.arange(M) / M
    zero = np.abs(F) <= tol
    sgn = np.where(zero, 0, np.sign(F)).astype(int)
    # start the sweep at a sample that is clearly off the surface
    start = int(np.argmax(~zero))
    order = (start + np.arange(M)) % M
    roots, ambiguous = [], False
    i = 0
    while i < M:
        j = order[i]
        nxt = order[(i + 1) % M]
        if sgn[nxt] == 0:
            # collect the run of near-zero samples
            run = []
            t = i + 1
            while sgn[order[t % M]] == 0:
                run.append(order[t % M])
                t += 1
            after = order[t % M]
            if sgn[after] != sgn[j]:
                mid = run[int(np.argmin(np.abs(F[run])))]
                roots.append(float(u[mid]))
            else:
                ambiguous = True
            i = t
            continue
        if sgn[j] * sgn[nxt] < 0:
            a = u[j]
            b = u[nxt] if nxt > j else 1.0
            roots.append(float(brentq(fu, a, b, xtol=1e-15)) % 1.0)
        elif 0 < abs(F[nxt]) < abs(F[j]) and abs(F[nxt]) <= abs(F[order[(i + 2) % M]]):
            # local minimum of |F| without sign change: probe between samples
            lo, hi = u[j], u[j] + 2.0 / M
            res = minimize_scalar(lambda x: sgn[nxt] * fu(x % 1.0), bounds=(lo, hi), method="bounded", options={"xatol": 1e-14})
            if res.fun <= tol:
                ambiguous = True
        i += 1
    return IntersectionResult(len(roots), False, ambiguous, tuple(sorted(roots)))
