"""Majorant recursion for derivative norms and its comparison ODE.

Notation: with rho = r / (2 pi),

    G(c) = (Chat / rho) (1 + 3n (a0 - c) / rho)^-2 c^(K-2) + mu c
    F(g) = (C / r)      (1 + 3n (g0 - g) / r)^-2   g^(K-2)

and the scalar comparison problem

    c'' = Cbar (F(g) + mu c'),   g = d/dt G(c),   c(0) = a0, c'(0) = a1.

Its Taylor data at t = 0 are the majorant sequence.  The sequence is built
from the combinatorial functional ``phi``; the ODE coefficients come from
an independent truncated power-series solver, so the two cross-check each
other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import mpmath
import numpy as np

from ..errors import DomainError, ParameterError
from .faadibruno import faa_di_bruno_symmetric

BIGFLOAT_ABOVE = 8
BIGFLOAT_BITS = 256


@dataclass(frozen=True)
class MajorantConfig:
    """Constants and seeds of the majorant recursion.

    ``Cbar`` is a lower bound; the effective value is raised to
    a2 / F1 when needed so that the majorant dominates the seed a2.
    """

    C: float = 1.0
    Chat: float = 1.0
    Cbar: float = 1.0
    mu: float = 1.0
    r: float = 1.0
    K: int = 3
    n: int = 1
    a0: float = 1.0
    a1: float = 1.0
    a2: float = 1.0

    def __post_init__(self):
        if self.r <= 0:
            raise ParameterError("r must be positive")
        if int(self.K) != self.K or self.K < 3:
            raise ParameterError("K must be an integer >= 3")
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError("n must be a positive integer")
        if min(self.C, self.Chat, self.Cbar, self.mu) <= 0:
            raise ParameterError("constants must be positive")
        if min(self.a0, self.a1, self.a2) <= 0:
            raise ParameterError("seeds must be positive")

    @property
    def rho(self) -> float:
        return self.r / (2.0 * math.pi)

    @property
    def seeds(self) -> tuple:
        return (self.a0, self.a1, self.a2)

    def with_seeds(self, a0, a1, a2) -> "MajorantConfig":
        return replace(self, a0=float(a0), a1=float(a1), a2=float(a2))

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("C", "Chat", "Cbar", "mu", "r", "K", "n", "a0", "a1", "a2")}

    @classmethod
    def from_dict(cls, d: dict) -> "MajorantConfig":
        d = dict(d)
        if "K" in d:
            d["K"] = int(d["K"])
        if "n" in d:
            d["n"] = int(d["n"])
        return cls(**d)


def _egf_product(a, b, L, zero):
    """Coefficients of the EGF product: out[l] = sum_j C(l, j) a[j] b[l-j]."""
    out = []
    for l in range(L + 1):
        s = zero
        for j in range(l + 1):
            s = s + math.comb(l, j) * a[j] * b[l - j]
        out.append(s)
    return out


def _phi_all(L: int, n: int, r, K: int, x):
    """phi(l, n, r, K; x_0..x_l) for l = 0..L in one pass."""
    zero = x[0] * 0
    one = zero + 1
    y = lambda m: math.factorial(m + 1) * (one / r) ** (m + 1)
    ps = [faa_di_bruno_symmetric(j, 3 * n, y, x) for j in range(L + 1)]
    acc = ps
    for _ in range(K - 2):
        acc = _egf_product(acc, x, L, zero)
    return acc


def phi(l: int, n: int, r, K: int, x) -> float:
    """Sum over compositions j_1 + ... + j_{K-1} = l of

        multinomial(l; j) p_{j_1}^{(3n)}({(|alpha|+1)! / r^(|alpha|+1)}, {x_j}) prod_{i>=2} x_{j_i}

    where every inner component carries the same derivative values x_j.
    Evaluated as an exponential-generating-function product.
    """
    if l < 0 or len(x) < l + 1:
        raise ParameterError("phi needs x_0..x_l")
    if K < 3:
        raise ParameterError("K must be >= 3")
    if r <= 0:
        raise ParameterError("r must be positive")
    return _phi_all(l, n, r, K, list(x[: l + 1]))[l]


def _num(big: bool):
    if big:
        return lambda v: mpmath.mpf(v)
    return float


def effective_cbar(cfg: MajorantConfig, big: bool = False):
    """max(Cbar, a2 / F1) with F1 = (C / r) Ghat_1^(K-2)."""
    num = _num(big)
    g1 = _ghat(cfg, [num(cfg.a0), num(cfg.a1)], 1, num)[1]
    F1 = num(cfg.C) / num(cfg.r) * g1 ** (cfg.K - 2)
    return max(num(cfg.Cbar), num(cfg.a2) / F1)


def _ghat(cfg, a, upto, num):
    """Ghat_j = Chat phi(j, n, rho, K; a_0..a_j) + mu a_j for j <= upto."""
    rho = num(cfg.r) / (2 * mpmath.pi if num is not float else 2 * math.pi)
    ph = _phi_all(upto, cfg.n, rho, cfg.K, a[: upto + 1])
    return [num(cfg.Chat) * ph[j] + num(cfg.mu) * a[j] for j in range(upto + 1)]


def recursion_rhs(cfg: MajorantConfig, a, l: int, cbar=1.0, big: bool = False):
    """Right-hand side for index l + 3 given a_0..a_{l+2}:

        cbar * (C phi(l+1, n, r, K; Ghat_1..Ghat_{l+2}) + mu a_{l+2}).
    """
    num = _num(big)
    a = [num(v) for v in a[: l + 3]]
    G = _ghat(cfg, a, l + 2, num)
    outer = _phi_all(l + 1, cfg.n, num(cfg.r), cfg.K, G[1 : l + 3])[l + 1]
    return num(cbar) * (num(cfg.C) * outer + num(cfg.mu) * a[l + 2])


def majorant_sequence(cfg: MajorantConfig, L: int, big: bool | None = None) -> list:
    """The majorant terms a~_0..a~_L.

    a~_0 = a0, a~_1 = a1, a~_2 = Cbar_eff (F1 + mu a1) >= a2, and each later
    term is the recursion taken with equality.  Values are mpmath numbers
    (256 bits) when L > 8, floats otherwise.
    """
    if L < 2:
        raise ParameterError("L must be >= 2")
    big = L > BIGFLOAT_ABOVE if big is None else big
    with mpmath.workprec(BIGFLOAT_BITS):
        num = _num(big)
        cb = effective_cbar(cfg, big)
        a = [num(cfg.a0), num(cfg.a1)]
        g1 = _ghat(cfg, a, 1, num)[1]
        a.append(cb * (num(cfg.C) / num(cfg.r) * g1 ** (cfg.K - 2) + num(cfg.mu) * a[1]))
        for l in range(L - 2):
            a.append(recursion_rhs(cfg, a, l, cb, big))
        return [+v for v in a] if big else a


# ---------------------------------------------------------------- series ODE


def _ser_mul(a, b, m):
    return [sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(m)]


def _ser_pow(u, alpha, m):
    """Taylor coefficients of u^alpha for u_0 != 0."""
    if u[0] <= 0:
        raise DomainError("series base left the analyticity domain")
    w = [u[0] ** alpha]
    for k in range(1, m):
        s = 0
        for j in range(1, k + 1):
            s += ((alpha + 1) * j - k) * u[j] * w[k - j]
        w.append(s / (k * u[0]))
    return w


def _ser_deriv(a):
    return [(k + 1) * a[k + 1] for k in range(len(a) - 1)]


def _G_series(cfg, c, m, rho):
    u = [1 + 3 * cfg.n * (cfg.a0 - c[0]) / rho] + [-3 * cfg.n * ck / rho for ck in c[1:m]]
    core = _ser_mul(_ser_pow(u, -2, m), _ser_pow(c, cfg.K - 2, m), m)
    return [mpmath.mpf(cfg.Chat) / rho * core[k] + cfg.mu * c[k] for k in range(m)]


def _F_series(cfg, g, m):
    g0 = g[0]
    u = [1 + 3 * cfg.n * (g0 - g[0]) / cfg.r] + [-3 * cfg.n * gk / cfg.r for gk in g[1:m]]
    core = _ser_mul(_ser_pow(u, -2, m), _ser_pow(g, cfg.K - 2, m), m)
    return [mpmath.mpf(cfg.C) / cfg.r * v for v in core]


def majorant_ode(cfg: MajorantConfig, L: int, prec: int = BIGFLOAT_BITS) -> list:
    """Derivatives c^(l)(0), l = 0..L, of the comparison ODE solution.

    The ODE is solved as a truncated Taylor series in ``prec``-bit
    arithmetic: knowing c up to order m + 1 fixes G(c) and g up to order m,
    hence F(g) and c'' up to order m, hence c up to order m + 2.
    """
    if L < 0:
        raise ParameterError("L must be >= 0")
    with mpmath.workprec(prec):
        rho = mpmath.mpf(cfg.r) / (2 * mpmath.pi)
        cb = effective_cbar(cfg, big=True)
        c = [mpmath.mpf(cfg.a0), mpmath.mpf(cfg.a1)]
        while len(c) < L + 1:
            m = len(c) - 1  # c'' known up to order m - 1 after this step
            G = _G_series(cfg, c, m + 1, rho)
            g = _ser_deriv(G)
            F = _F_series(cfg, g, m)
            k = m - 1
            cp = (k + 1) * c[k + 1]
            c.append(cb * (F[k] + cfg.mu * cp) / ((k + 2) * (k + 1)))
        return [+(c[l] * mpmath.factorial(l)) for l in range(L + 1)]


def majorant_ode_solve(cfg: MajorantConfig, t_end: float, steps: int = 2000):
    """Integrate the comparison ODE on [0, t_end] with classical RK4.

    Returns (t, c, c').  Raises DomainError when a denominator
    1 + 3n(...)/r reaches zero, where the right-hand side stops being analytic.
    """
    rho = cfg.rho
    cb = float(effective_cbar(cfg))
    n3 = 3 * cfg.n
    K = cfg.K
    g1 = float(_ghat(cfg, [float(cfg.a0), float(cfg.a1)], 1, float)[1])

    def rhs(y):
        c, cp = y
        u = 1 + n3 * (cfg.a0 - c) / rho
        if u <= 0 or c <= 0:
            raise DomainError("solution left the analyticity domain of G")
        dG = cfg.Chat / rho * (2 * n3 / rho * u**-3 * c ** (K - 2) + (K - 2) * u**-2 * c ** (K - 3)) + cfg.mu
        g = dG * cp
        v = 1 + n3 * (g1 - g) / cfg.r
        if v <= 0 or g <= 0:
            raise DomainError("solution left the analyticity domain of F")
        F = cfg.C / cfg.r * v**-2 * g ** (K - 2)
        return np.array([cp, cb * (F + cfg.mu * cp)])

    h = t_end / steps
    y = np.array([cfg.a0, cfg.a1], dtype=float)
    ts, ys = [0.0], [y.copy()]
    for i in range(steps):
        k1 = rhs(y)
        k2 = rhs(y + h / 2 * k1)
        k3 = rhs(y + h / 2 * k2)
        k4 = rhs(y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        ts.append((i + 1) * h)
        ys.append(y.copy())
    ys = np.array(ys)
    return np.array(ts), ys[:, 0], ys[:, 1]


# ---------------------------------------------------------------- helpers


def dominates(cfg: MajorantConfig, b, L: int | None = None) -> bool:
    """True when a~_l >= b_l for every l <= L (default len(b) - 1)."""
    L = len(b) - 1 if L is None else L
    a = majorant_sequence(cfg, L)
    return all(a[l] >= b[l] for l in range(L + 1))


def random_admissible_sequence(cfg: MajorantConfig, L: int, rng: np.random.Generator) -> list:
    """A sequence below the seeds that satisfies the recursion as an inequality.

    b_l = u_l a_l for l <= 2 with u_l uniform in (0, 1], then
    b_{l+3} = u_{l+3} * RHS(b) with the bare recursion (Cbar = 1).
    """
    big = L > BIGFLOAT_ABOVE
    num = _num(big)
    with mpmath.workprec(BIGFLOAT_BITS):
        head = majorant_sequence(cfg, 2, big=big)
        b = [num(1.0 - rng.random()) * head[l] for l in range(3)]
        for l in range(L - 2):
            b.append(num(1.0 - rng.random()) * recursion_rhs(cfg, b, l, 1.0, big))
        return b


def recursion_holds(cfg: MajorantConfig, a, cbar=1.0) -> bool:
    """Check a_{l+3} <= RHS(a_0..a_{l+2}) for every available l."""
    return all(a[l + 3] <= recursion_rhs(cfg, a, l, cbar, big=True) for l in range(len(a) - 3))


def search_constants(a, base: MajorantConfig | None = None, factor: float = 2.0, max_steps: int = 200):
    """Scale C, Chat and mu by a common factor until ``a`` obeys the recursion.

    ``a`` is a measured sequence (for instance H^{5/2} norms of derivatives
    of a curve).  Returns the first configuration, seeded with a_0..a_2, for
    which the recursive inequality holds at every available index.
    """
    a = [float(v) for v in a]
    if len(a) < 4:
        raise ParameterError("need at least four terms")
    cfg = (base or MajorantConfig()).with_seeds(*a[:3])
    for _ in range(max_steps):
        if recursion_holds(cfg, a):
            return cfg
        cfg = replace(cfg, C=cfg.C * factor, Chat=cfg.Chat * factor, mu=cfg.mu * factor)
    raise ParameterError("no admissible constants found")


@dataclass(frozen=True)
class GrowthFit:
    """log(a_l / l!) ~ log(amplitude) - l log(radius)."""

    radius: float
    amplitude: float
    rSquared: float
    supBound: float
    lRange: tuple

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "amplitude": self.amplitude,
            "rSquared": self.rSquared,
            "supBound": self.supBound,
            "lRange": list(self.lRange),
        }


def factorial_growth_fit(seq, l_min: int = 0) -> GrowthFit:
    """Fit a factorial bound a_l <= A l! / R^l.

    ``supBound`` is sup_l a_l R^l / l! for the fitted R, which is finite
    and close to A when the sequence has factorial growth.
    """
    ls = np.arange(l_min, len(seq))
    if len(ls) < 3:
        raise ParameterError("need at least three terms to fit")
    y = np.array([float(mpmath.log(seq[l]) - mpmath.log(mpmath.factorial(l))) for l in ls])
    slope, icpt = np.polyfit(ls, y, 1)
    pred = slope * ls + icpt
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum((y - pred) ** 2)) / ss_tot if ss_tot > 0 else 1.0
    R = float(np.exp(-slope))
    sup = max(float(mpmath.exp(y[i] + ls[i] * math.log(R))) for i in range(len(ls)))
    return GrowthFit(R, float(np.exp(icpt)), max(0.0, min(1.0, r2)), sup, (int(ls[0]), int(ls[-1])))
