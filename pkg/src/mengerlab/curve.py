"""Closed curves R/Z -> R^n stored as truncated Fourier series.

Coefficients are indexed k = -N..N along axis 0, so ``coeffs[N + k]`` is the
vector gamma_hat(k) in C^n and

    gamma(u) = sum_k gamma_hat(k) exp(2 pi i k u).
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import minimize

from .errors import (
    AccuracyError,
    DegenerateCurveError,
    ParameterError,
    UndersamplingError,
)

log = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
SIMPLICITY_THRESHOLD = 1e-6
# crossings of a truncated series are only resolved to the truncation error
CROSSING_TOL = 1e-5
# even default grid so that antipodal pairs are sampled
MIN_QUALITY_GRID = 128


def _symmetrize(coeffs):
    # project onto real-valued curves: c(-k) = conj(c(k))
    return 0.5 * (coeffs + np.conj(coeffs[::-1]))


@dataclass(frozen=True, eq=False)
class FourierCurve:
    """Band-limited closed curve.

    Parameters
    ----------
    coeffs : array_like, shape (2N+1, n)
        Complex Fourier coefficients for k = -N..N.  The array is projected
        onto the conjugate-symmetric subspace on construction.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim == 1:
            c = c[:, None]
        if c.ndim != 2 or c.shape[0] % 2 != 1:
            raise ParameterError("coeffs must have shape (2N+1, n)")
        if c.shape[0] < 3:
            raise ParameterError("bandwidth must be at least 1")
        c = _symmetrize(c)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def dim(self) -> int:
        return self.coeffs.shape[1]

    @property
    def bandwidth(self) -> int:
        return (self.coeffs.shape[0] - 1) // 2

    @property
    def modes(self) -> np.ndarray:
        N = self.bandwidth
        return np.arange(-N, N + 1)

    def mode(self, k: int) -> np.ndarray:
        return self.coeffs[self.bandwidth + k]

    @property
    def centroid(self) -> np.ndarray:
        return self.coeffs[self.bandwidth].real.copy()

    def half_spectrum(self, size: int | None = None) -> np.ndarray:
        """Coefficients for k = 0..N as a (n, size) array (for ``irfft``)."""
        N = self.bandwidth
        size = N + 1 if size is None else size
        out = np.zeros((self.dim, size), dtype=complex)
        out[:, : N + 1] = self.coeffs[N:].T
        return out

    def derivative(self, order: int = 1) -> "FourierCurve":
        factor = (2j * np.pi * self.modes) ** order
        return FourierCurve(self.coeffs * factor[:, None])

    def resized(self, bandwidth: int) -> "FourierCurve":
        """Zero-pad or truncate to a new bandwidth."""
        N = self.bandwidth
        out = np.zeros((2 * bandwidth + 1, self.dim), dtype=complex)
        m = min(N, bandwidth)
        out[bandwidth - m : bandwidth + m + 1] = self.coeffs[N - m : N + m + 1]
        return FourierCurve(out)

    def __add__(self, other):
        if not isinstance(other, FourierCurve):
            return NotImplemented
        N = max(self.bandwidth, other.bandwidth)
        return FourierCurve(self.resized(N).coeffs + other.resized(N).coeffs)

    def __sub__(self, other):
        if not isinstance(other, FourierCurve):
            return NotImplemented
        return self + (-1.0) * other

    def __mul__(self, scalar):
        return FourierCurve(self.coeffs * float(scalar))

    __rmul__ = __mul__

    def transformed(self, matrix=None, shift=None) -> "FourierCurve":
        """Apply x -> matrix @ x + shift pointwise."""
        c = np.array(self.coeffs)
        if matrix is not None:
            c = c @ np.asarray(matrix, dtype=float).T
        if shift is not None:
            c[self.bandwidth] += np.asarray(shift, dtype=float)
        return FourierCurve(c)

    def imag_residual(self, grid_size: int | None = None) -> float:
        """Max imaginary part of the pointwise evaluation (should be ~0)."""
        M = grid_size or 2 * self.bandwidth + 1
        u = np.arange(M) / M
        vals = np.exp(2j * np.pi * np.outer(u, self.modes)) @ self.coeffs
        return float(np.abs(vals.imag).max())

    # -- serialization -------------------------------------------------
    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "bandwidth": self.bandwidth,
            "coeffs": [[[float(z.real), float(z.imag)] for z in row] for row in self.coeffs],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "FourierCurve":
        arr = np.asarray(data["coeffs"], dtype=float)
        if arr.ndim != 3 or arr.shape[2] != 2:
            raise ParameterError("coeffs must be a (2N+1, n, 2) nested list")
        if arr.shape[0] != 2 * int(data["bandwidth"]) + 1 or arr.shape[1] != int(data["dim"]):
            raise ParameterError("coeffs shape does not match dim/bandwidth")
        return cls(arr[..., 0] + 1j * arr[..., 1])


def save_curve(curve: FourierCurve, path) -> None:
    with open(path, "w") as fh:
        json.dump(curve.to_json_dict(), fh)
        fh.write("\n")


def load_curve(path) -> FourierCurve:
    with open(path) as fh:
        return FourierCurve.from_json_dict(json.load(fh))


@dataclass(frozen=True, eq=False)
class SampledCurve:
    """Values on the uniform grid u_j = j/M, shape (M, n)."""

    samples: np.ndarray

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    @property
    def grid(self) -> np.ndarray:
        return np.arange(len(self.samples)) / len(self.samples)


@dataclass(frozen=True)
class CurveQuality:
    lengthDeviation: float
    bilipschitzConstant: float
    minSeparation: float
    length: float = field(default=float("nan"))

    @property
    def simple(self) -> bool:
        return self.minSeparation > SIMPLICITY_THRESHOLD and self.bilipschitzConstant > 0


def from_samples(samples, bandwidth: int) -> FourierCurve:
    """Project uniform samples (M, n) onto bandwidth N (requires M >= 2N+1)."""
    x = np.asarray(samples, dtype=float)
    M = x.shape[0]
    if M < 2 * bandwidth + 1:
        raise UndersamplingError(f"{M} samples cannot resolve bandwidth {bandwidth}")
    half = np.fft.rfft(x, axis=0) / M
    coeffs = np.zeros((2 * bandwidth + 1, x.shape[1]), dtype=complex)
    coeffs[bandwidth:] = half[: bandwidth + 1]
    if M % 2 == 0 and bandwidth == M // 2:
        coeffs[-1] *= 0.5
    coeffs[:bandwidth] = np.conj(coeffs[bandwidth + 1 :][::-1])
    return FourierCurve(coeffs)


def evaluate(curve: FourierCurve, deriv_order: int = 0, grid_size: int | None = None) -> SampledCurve:
    """Samples of the ``deriv_order``-th derivative on the grid j/M."""
    N = curve.bandwidth
    M = 4 * N + 1 if grid_size is None else int(grid_size)
    if M < 2 * N + 1:
        raise UndersamplingError(f"grid size {M} < 2N+1 = {2 * N + 1}")
    half = curve.half_spectrum(M // 2 + 1)
    if deriv_order:
        half = half * (2j * np.pi * np.arange(M // 2 + 1)) ** deriv_order
    if M % 2 == 0 and N == M // 2:
        half[:, -1] *= 2.0
    vals = np.fft.irfft(half, n=M, axis=1) * M
    return SampledCurve(vals.T)


def evaluate_at(curve: FourierCurve, u, deriv_order: int = 0) -> np.ndarray:
    """Direct trigonometric sum at arbitrary parameters, shape (len(u), n)."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    k = curve.modes
    c = curve.coeffs
    if deriv_order:
        c = c * ((2j * np.pi * k) ** deriv_order)[:, None]
    N = curve.bandwidth
    # real part of c0 + 2 Re sum_{k>0}
    ph = np.exp(2j * np.pi * np.outer(u, k[N + 1 :]))
    return c[N].real + 2.0 * (ph @ c[N + 1 :]).real


def speed_samples(curve: FourierCurve, grid_size: int) -> np.ndarray:
    return np.linalg.norm(evaluate(curve, 1, grid_size).samples, axis=1)


def length(curve: FourierCurve, grid_size: int | None = None) -> float:
    """Total length by the periodic trapezoid rule (spectrally accurate)."""
    M = grid_size or max(8 * curve.bandwidth + 1, 65)
    return float(speed_samples(curve, M).mean())


def normalize_length(curve: FourierCurve, target_length: float = 1.0) -> FourierCurve:
    """Scale about the centroid so that the total length equals ``target_length``."""
    L = length(curve)
    if not np.isfinite(L) or L <= 1e-300:
        raise DegenerateCurveError("curve has zero length")
    scale = target_length / L
    c = curve.coeffs * scale
    c[curve.bandwidth] = curve.coeffs[curve.bandwidth]
    return FourierCurve(c)


class _ArcLengthMap:
    """Cumulative arc length s(u) as a spectral series of the speed."""

    def __init__(self, curve: FourierCurve, grid_size: int):
        sp = speed_samples(curve, grid_size)
        self.min_speed = float(sp.min())
        self.M = grid_size
        half = np.fft.rfft(sp) / grid_size
        K = (grid_size - 1) // 2
        self.L = float(half[0].real)
        self.k = np.arange(1, K + 1)
        self.c = half[1 : K + 1]
        self.grid = np.arange(grid_size) / grid_size
        self.speed = sp

    def __call__(self, u):
        ph = np.exp(2j * np.pi * np.outer(u, self.k))
        integ = ((ph - 1.0) @ (self.c / (2j * np.pi * self.k))) * 2.0
        return self.L * u + integ.real

    def speed_at(self, u):
        ph = np.exp(2j * np.pi * np.outer(u, self.k))
        return self.L + 2.0 * (ph @ self.c).real


def reparametrize_arclength(curve: FourierCurve, tol: float = 1e-10, max_iter: int = 50) -> FourierCurve:
    """Return a constant-speed representative of the same closed curve.

    Cumulative arc length is inverted by monotone cubic interpolation and
    polished by Newton steps; the resampled curve is projected back to the
    input bandwidth.  The start point gamma(0) is preserved.
    """
    N = curve.bandwidth
    M = 8 * N + 1
    best, best_dev = curve, np.inf
    cur = curve
    for _ in range(max_iter):
        amap = _ArcLengthMap(cur, M)
        if amap.min_speed <= 1e-12 * max(amap.L, 1e-300):
            raise DegenerateCurveError("speed vanishes on the sampling grid")
        dev = float(np.abs(amap.speed - amap.L).max())
        if dev > 0.99 * best_dev:
            # no further progress: the bandwidth cannot represent the
            # constant-speed curve more accurately
            break
        if dev < best_dev:
            best, best_dev = cur, dev
        if dev <= tol * amap.L:
            return cur
        s_grid = np.append(amap(amap.grid) / amap.L, 1.0)
        u_grid = np.append(amap.grid, 1.0)
        target = np.arange(M) / M
        u = PchipInterpolator(s_grid, u_grid)(target)
        for _newton in range(8):
            step = (amap(u) / amap.L - target) / (amap.speed_at(u) / amap.L)
            u = u - step
            if np.abs(step).max() < 1e-15:
                break
        nxt = from_samples(evaluate_at(cur, u), N)
        if np.array_equal(nxt.coeffs, cur.coeffs):
            break
        cur = nxt
    amap = _ArcLengthMap(cur, M)
    dev = float(np.abs(amap.speed - amap.L).max())
    if dev < best_dev:
        best, best_dev = cur, dev
    if best_dev <= tol * amap.L:
        return best
    raise AccuracyError(
        f"arc-length deviation {best_dev / amap.L:.3e} above tolerance {tol:.1e}",
        estimate=best_dev / amap.L,
        best=best,
    )


def quality_report(curve: FourierCurve, grid_size: int | None = None, separation_window: float = 0.125) -> CurveQuality:
    """Sampled regularity/simplicity diagnostics.

    ``minSeparation`` only considers pairs whose parameter distance is at
    least ``separation_window``; nearby pairs are controlled by the
    bilipschitz constant instead.
    """
    N = curve.bandwidth
    M = max(4 * N + 1, MIN_QUALITY_GRID) if grid_size is None else int(grid_size)
    if M < 2 * N + 1:
        raise UndersamplingError(f"grid size {M} < 2N+1")
    pts = evaluate(curve, 0, M).samples
    sp = np.linalg.norm(evaluate(curve, 1, M).samples, axis=1)
    L = float(sp.mean())
    idx = np.arange(M)
    dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
    gap = np.abs(idx[:, None] - idx[None, :])
    gap = np.minimum(gap, M - gap) / M
    off = gap > 0
    bilip = float((dist[off] / gap[off]).min())
    far = gap >= separation_window
    min_sep = float(dist[far].min()) if far.any() else float("inf")
    return CurveQuality(
        lengthDeviation=float(np.abs(sp - L).max()),
        bilipschitzConstant=bilip,
        minSeparation=min_sep,
        length=L,
    )


def refined_min_separation(curve: FourierCurve, grid_size: int | None = None, separation_window: float = 0.125) -> float:
    """Closest approach of parameter-distant pairs, polished off the grid.

    The best few grid pairs are refined by a local minimization of
    |gamma(s) - gamma(t)|, so that genuine crossings between grid points
    come out near zero instead of near the grid spacing.
    """
    N = curve.bandwidth
    M = max(4 * N + 1, MIN_QUALITY_GRID) if grid_size is None else int(grid_size)
    pts = evaluate(curve, 0, M).samples
    idx = np.arange(M)
    gap = np.abs(idx[:, None] - idx[None, :])
    gap = np.minimum(gap, M - gap) / M
    dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
    dist[gap < separation_window] = np.inf
    flat = np.argsort(dist, axis=None)[:16]
    best = float(dist.flat[flat[0]])

    def sep(x):
        d = evaluate_at(curve, x % 1.0)
        return float(np.sum((d[0] - d[1]) ** 2))

    for f in flat:
        i, j = divmod(int(f), M)
        res = minimize(sep, [i / M, j / M], method="Nelder-Mead", options={"xatol": 1e-13, "fatol": 1e-30, "maxiter": 2000})
        s, t = res.x % 1.0
        g = min(abs(s - t), 1 - abs(s - t))
        if g >= 0.5 * separation_window:
            best = min(best, float(np.sqrt(res.fun)))
    return best


# -- fixtures ------------------------------------------------------------

def circle(dim: int = 3, bandwidth: int = 1, radius: float | None = None) -> FourierCurve:
    """Round circle in the first coordinate plane; unit length by default."""
    if dim < 2:
        raise ParameterError("dim must be >= 2")
    r = 1.0 / TWO_PI if radius is None else radius
    c = np.zeros((2 * bandwidth + 1, dim), dtype=complex)
    c[bandwidth + 1, 0] = r / 2
    c[bandwidth + 1, 1] = -0.5j * r
    c[bandwidth - 1] = np.conj(c[bandwidth + 1])
    return FourierCurve(c)


def from_function(func, dim: int, bandwidth: int, grid_size: int | None = None) -> FourierCurve:
    """Project ``func(u) -> (len(u), k)`` samples onto a Fourier curve."""
    M = grid_size or 8 * bandwidth + 8
    u = np.arange(M) / M
    vals = np.asarray(func(u), dtype=float)
    out = np.zeros((M, dim))
    out[:, : vals.shape[1]] = vals
    return from_samples(out, bandwidth)


def ellipse(a: float, b: float, dim: int = 3, bandwidth: int = 64) -> FourierCurve:
    return from_function(
        lambda u: np.stack([a * np.cos(TWO_PI * u), b * np.sin(TWO_PI * u)], axis=1), dim, bandwidth
    )


def torus_knot(p: int = 2, q: int = 3, R: float = 1.0, r: float = 0.4, bandwidth: int = 64) -> FourierCurve:
    def f(u):
        rho = R + r * np.cos(TWO_PI * q * u)
        return np.stack(
            [rho * np.cos(TWO_PI * p * u), rho * np.sin(TWO_PI * p * u), r * np.sin(TWO_PI * q * u)], axis=1
        )

    return from_function(f, 3, bandwidth)


def perturbed(base: FourierCurve, mode: int, amplitude: float, direction=None) -> FourierCurve:
    """Add ``amplitude * cos(2 pi mode u) * direction`` to ``base``.

    The default direction is the last coordinate axis (out of plane for the
    standard circle in R^3, the second axis in R^2).
    """
    n = base.dim
    if direction is None:
        direction = np.zeros(n)
        direction[-1] = 1.0
    direction = np.asarray(direction, dtype=float)
    N = max(base.bandwidth, abs(mode))
    c = base.resized(N).coeffs.copy()
    c[N + mode] += 0.5 * amplitude * direction
    c[N - mode] += 0.5 * amplitude * direction
    return FourierCurve(c)


def make_fixture(shape: str, dim: int = 3, bandwidth: int = 64, tol: float = 1e-10, strict: bool = True, **kw) -> FourierCurve:
    """Arc-length, unit-length fixture curve by name.

    With ``strict=False`` a reparametrization that misses ``tol`` (the
    bandwidth cannot carry a constant-speed representative) is accepted.
    """
    if shape == "circle":
        return circle(dim, bandwidth)
    if shape == "ellipse":
        cur = ellipse(kw.get("a", 0.2), kw.get("b", 0.1), dim, bandwidth)
    elif shape == "torus-knot":
        if dim != 3:
            raise ParameterError("torus knots live in R^3")
        cur = torus_knot(kw.get("p", 2), kw.get("q", 3), kw.get("R", 1.0), kw.get("r", 0.4), bandwidth)
    elif shape == "perturbed":
        base = kw.get("base") or circle(dim, bandwidth)
        cur = perturbed(base.resized(bandwidth), kw.get("mode", 3), kw.get("amplitude", 1e-2))
    else:
        raise ParameterError(f"unknown shape {shape!r}")
    try:
        cur = reparametrize_arclength(cur, tol=tol)
    except AccuracyError as exc:
        if strict:
            raise
        cur = exc.best
    return normalize_length(cur)
