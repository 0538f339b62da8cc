"""Singular quadrature over the relative-offset domain D.

D is the set of offsets (v, w) in (-1/2, 0) x (0, 1/2) with w <= 1 + 2v and
v >= -1 + 2w.  Writing a = -v, b = w, the integrals of interest have the form

    I = iint_D (a b (a + b))^e S(a, b) da db

with S smooth and e > -2/3.  The substitution a = s t, b = s (1 - t),
s = smax(t) sigma turns the point singularity at the origin and the two
edge singularities into product weights

    t^e (1 - t)^e  smax(t)^(3e + 2)  sigma^(3e + 1),

which are handled by Gauss-Jacobi rules on cells touching t = 0, t = 1 or
sigma = 0 and by Gauss-Legendre rules elsewhere.  The t-axis is split at
t = 1/2 where smax has a kink.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .errors import AccuracyError, ParameterError

_LEG, _JAC_LEFT, _JAC_RIGHT = 0, 1, 2


@dataclass(frozen=True)
class QuadratureConfig:
    """Settings for the graded adaptive rule over D.

    Parameters
    ----------
    baseCells : int
        Number of base panels along the radial axis; the angular axis gets
        ``baseCells // 2`` panels on each side of t = 1/2.
    gradingExponent : float
        Panel breakpoints are ``(i / n) ** gradingExponent`` toward singular faces.
    gaussOrder : int
        Points per axis and cell.
    relTol : float
        Target relative error of the adaptive pass.
    maxRefine : int
        Maximum number of refinement sweeps.
    uOversample : int
        Trapezoid points in u per retained Fourier mode, ``uOversample * (N + 1)``.
    """

    baseCells: int = 16
    gradingExponent: float = 3.0
    gaussOrder: int = 8
    relTol: float = 1e-5
    maxRefine: int = 6
    uOversample: int = 4

    def __post_init__(self):
        if self.baseCells < 2 or self.gaussOrder < 1 or self.maxRefine < 0 or self.uOversample < 2:
            raise ParameterError("quadrature sizes must be positive")
        if self.gradingExponent < 1:
            raise ParameterError("gradingExponent must be >= 1")
        if not 0 < self.relTol < 1:
            raise ParameterError("relTol must lie in (0, 1)")


def in_domain(v, w):
    """Membership in D (closed inequalities, open box)."""
    v = np.asarray(v)
    w = np.asarray(w)
    return (v > -0.5) & (v < 0) & (w > 0) & (w < 0.5) & (w <= 1 + 2 * v) & (v >= -1 + 2 * w)


@lru_cache(maxsize=64)
def _ref_rule(kind: int, order: int, expo: float):
    if kind == _LEG:
        x, w = roots_legendre(order)
    elif kind == _JAC_LEFT:
        # weight (1 + x)^expo
        x, w = roots_jacobi(order, 0.0, expo)
    else:
        x, w = roots_jacobi(order, expo, 0.0)
    return x, w


def _smax(t):
    return np.where(t <= 0.5, 1.0 / (2.0 - t), 1.0 / (1.0 + t))


@dataclass
class Cells:
    """Rectangles in (t, sigma) with flags for the singular faces."""

    t0: np.ndarray
    t1: np.ndarray
    s0: np.ndarray
    s1: np.ndarray
    tkind: np.ndarray
    sjac: np.ndarray
    depth: np.ndarray

    def __len__(self):
        return len(self.t0)

    def take(self, idx) -> "Cells":
        return Cells(*(getattr(self, f)[idx] for f in self.__dataclass_fields__))

    @staticmethod
    def concat(parts) -> "Cells":
        names = Cells.__dataclass_fields__
        return Cells(*(np.concatenate([getattr(c, f) for c in parts]) for f in names))

    def children(self) -> "Cells":
        tm = 0.5 * (self.t0 + self.t1)
        sm = 0.5 * (self.s0 + self.s1)
        t0 = np.concatenate([self.t0, tm, self.t0, tm])
        t1 = np.concatenate([tm, self.t1, tm, self.t1])
        s0 = np.concatenate([self.s0, self.s0, sm, sm])
        s1 = np.concatenate([sm, sm, self.s1, self.s1])
        tk = self.tkind
        left = np.where(tk == _JAC_LEFT, _JAC_LEFT, _LEG)
        right = np.where(tk == _JAC_RIGHT, _JAC_RIGHT, _LEG)
        tkind = np.concatenate([left, right, left, right])
        sj = np.concatenate([self.sjac, self.sjac, np.zeros_like(self.sjac), np.zeros_like(self.sjac)])
        depth = np.tile(self.depth + 1, 4)
        return Cells(t0, t1, s0, s1, tkind, sj, depth)


def base_cells(cfg: QuadratureConfig, scale: int = 1) -> Cells:
    """Graded base mesh; ``scale`` multiplies the panel counts (oscillatory integrands)."""
    ns = cfg.baseCells * scale
    nt = max(cfg.baseCells // 2, 1) * scale
    g = cfg.gradingExponent
    sb = (np.arange(ns + 1) / ns) ** g
    tl = 0.5 * (np.arange(nt + 1) / nt) ** g
    tr = 1.0 - tl[::-1]
    tb = [(tl[i], tl[i + 1], _JAC_LEFT if i == 0 else _LEG) for i in range(nt)]
    tb += [(tr[i], tr[i + 1], _JAC_RIGHT if i == nt - 1 else _LEG) for i in range(nt)]
    rows = [(ta, tb_, kind, sb[j], sb[j + 1], j == 0) for (ta, tb_, kind) in tb for j in range(ns)]
    arr = list(zip(*rows))
    return Cells(
        t0=np.array(arr[0]),
        t1=np.array(arr[1]),
        s0=np.array(arr[3]),
        s1=np.array(arr[4]),
        tkind=np.array(arr[2], dtype=int),
        sjac=np.array(arr[5], dtype=bool),
        depth=np.zeros(len(rows), dtype=int),
    )


@dataclass(frozen=True)
class DomainRule:
    """Nodes (a, b) = (-v, w) in D and weights including the singular factor.

    ``sum(weights * S(a, b))`` approximates ``iint_D (a b (a+b))^e S``.
    """

    a: np.ndarray
    b: np.ndarray
    weights: np.ndarray
    exponent: float
    errorEstimate: float = float("nan")
    cells: Cells | None = field(default=None, repr=False)
    cellIndex: np.ndarray | None = field(default=None, repr=False)

    @property
    def v(self):
        return -self.a

    @property
    def w(self):
        return self.b

    @property
    def s(self):
        return self.a + self.b

    def __len__(self):
        return len(self.a)

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


def cell_nodes(cells: Cells, e: float, order: int):
    """Nodes and weights for every cell; returns (a, b, weights, cell_id)."""
    nc = len(cells)
    beta_s = 3 * e + 1
    xs_l, ws_l = _ref_rule(_LEG, order, 0.0)
    xs_j, ws_j = _ref_rule(_JAC_LEFT, order, beta_s)
    xt_jl, wt_jl = _ref_rule(_JAC_LEFT, order, e)
    xt_jr, wt_jr = _ref_rule(_JAC_RIGHT, order, e)

    ht = (cells.t1 - cells.t0)[:, None]
    hs = (cells.s1 - cells.s0)[:, None]

    # t-direction
    xt = np.where((cells.tkind == _JAC_LEFT)[:, None], xt_jl, np.where((cells.tkind == _JAC_RIGHT)[:, None], xt_jr, xs_l))
    t = cells.t0[:, None] + ht * (1 + xt) / 2
    wt = np.empty((nc, order))
    leg = cells.tkind == _LEG
    jl = cells.tkind == _JAC_LEFT
    jr = cells.tkind == _JAC_RIGHT
    tt = t
    wt[leg] = ws_l * (ht[leg] / 2) * (tt[leg] * (1 - tt[leg])) ** e
    wt[jl] = wt_jl * (ht[jl] / 2) ** (e + 1) * (1 - tt[jl]) ** e
    wt[jr] = wt_jr * (ht[jr] / 2) ** (e + 1) * tt[jr] ** e
    wt *= _smax(t) ** (3 * e + 2)

    # sigma-direction
    xs = np.where(cells.sjac[:, None], xs_j, xs_l)
    sg = cells.s0[:, None] + hs * (1 + xs) / 2
    wsg = np.where(
        cells.sjac[:, None],
        ws_j * (hs / 2) ** (3 * e + 2),
        ws_l * (hs / 2) * np.abs(sg) ** (3 * e + 1),
    )

    T = np.repeat(t, order, axis=1)
    WT = np.repeat(wt, order, axis=1)
    SG = np.tile(sg, (1, order))
    WS = np.tile(wsg, (1, order))
    s = _smax(T) * SG
    a = (s * T).ravel()
    b = (s * (1 - T)).ravel()
    wts = (WT * WS).ravel()
    cid = np.repeat(np.arange(nc), order * order)
    return a, b, wts, cid


def rule_from_cells(cells: Cells, e: float, order: int, error: float = float("nan")) -> DomainRule:
    a, b, w, cid = cell_nodes(cells, e, order)
    return DomainRule(a, b, w, e, error, cells, cid)


def _cell_sums(cells, e, order, func):
    a, b, w, cid = cell_nodes(cells, e, order)
    vals = np.asarray(func(a, b), dtype=float)
    return np.bincount(cid, weights=w * vals, minlength=len(cells))


def adaptive_rule(e: float, cfg: QuadratureConfig, func, scale: int = 1, atol: float = 0.0) -> DomainRule:
    """Build a rule for ``iint_D (ab(a+b))^e func`` by local 4-way refinement.

    Each leaf is compared with the sum over its four children.  Leaves whose
    discrepancy exceeds their share of the tolerance are split, for at most
    ``cfg.maxRefine`` sweeps.  The returned rule consists of the children of
    the final leaves, and ``errorEstimate`` is the summed discrepancy.
    """
    if e <= -2.0 / 3.0:
        raise ParameterError(f"singular exponent {e} is not integrable over D")
    order = cfg.gaussOrder
    leaves = base_cells(cfg, scale)
    parent = _cell_sums(leaves, e, order, func)
    for sweep in range(cfg.maxRefine + 1):
        kids = leaves.children()
        ksum = _cell_sums(kids, e, order, func)
        n = len(leaves)
        child_total = ksum.reshape(4, n).sum(axis=0)
        err = np.abs(child_total - parent)
        total = float(child_total.sum())
        tol = max(cfg.relTol * abs(total), atol)
        if err.sum() <= tol:
            return rule_from_cells(kids, e, order, float(err.sum()))
        if sweep == cfg.maxRefine:
            break
        bad = err > tol / n
        keep = ~bad
        # refine offenders: their children become leaves
        bad4 = np.tile(bad, 4)
        leaves = Cells.concat([leaves.take(keep), kids.take(bad4)])
        parent = np.concatenate([parent[keep], ksum[bad4]])
    best = rule_from_cells(kids, e, order, float(err.sum()))
    raise AccuracyError(
        f"domain quadrature not converged after {cfg.maxRefine} sweeps "
        f"(error {err.sum():.3e}, value {total:.6e})",
        estimate=total,
        error_bound=float(err.sum()),
        best=best,
    )
