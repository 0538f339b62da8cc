"""Multivariate Faa di Bruno polynomials.

For f: R -> R^n and g: R^n -> R,

    (d/dx)^k g(f(x)) = sum  k! / (prod_i (i!)^{r_i} prod_{ij} q_ij!)
                            (d^alpha g)(f(x)) prod_{i,j} (f_j^(i)(x))^{q_ij},

summed over r_1 + 2 r_2 + ... + k r_k = k and q_i1 + ... + q_in = r_i, with
alpha_j = sum_i q_ij.  The combinatorial coefficients are exact integers;
the combination uses whatever number type the inputs carry (float,
Fraction or mpmath.mpf).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from ..errors import ParameterError


@lru_cache(maxsize=None)
def partitions(k: int) -> tuple:
    """All (r_1, ..., r_k) with sum_i i r_i = k, as tuples of length k."""
    if k == 0:
        return ((),)
    out = []

    def rec(i, remaining, acc):
        if i == 0:
            if remaining == 0:
                out.append(tuple(reversed(acc)))
            return
        for r in range(remaining // i, -1, -1):
            rec(i - 1, remaining - r * i, acc + [r])

    rec(k, k, [])
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def distributions(total: int, parts: int) -> tuple:
    """All (q_1, ..., q_parts) of nonnegative integers summing to ``total``."""
    if parts == 1:
        return ((total,),)
    return tuple((q,) + rest for q in range(total, -1, -1) for rest in distributions(total - q, parts - 1))


@lru_cache(maxsize=None)
def terms(k: int, n: int) -> tuple:
    """(coefficient, alpha, q-matrix) for every monomial of p_k^(n)."""
    out = []
    for r in partitions(k):
        base = math.factorial(k)
        for i, ri in enumerate(r, start=1):
            base //= math.factorial(i) ** ri
        for qs in product(*(distributions(ri, n) for ri in r)):
            denom = 1
            for row in qs:
                for qij in row:
                    denom *= math.factorial(qij)
            alpha = tuple(sum(row[j] for row in qs) for j in range(n))
            out.append((base // denom if base % denom == 0 else _frac(base, denom), alpha, qs))
    return tuple(out)


def _frac(a, b):
    from fractions import Fraction

    return Fraction(a, b)


def coefficient_sum(k: int, n: int) -> int:
    return sum(c for c, _, _ in terms(k, n))


@dataclass(frozen=True)
class UniversalPolyInput:
    """Arguments of p_k^(n).

    Parameters
    ----------
    k, n : int
    yValues : dict
        Maps multi-indices alpha (tuples of length n, |alpha| <= k) to values.
    xValues : sequence
        ``xValues[i-1][j-1]`` is the i-th derivative of the j-th inner component.
    """

    k: int
    n: int
    yValues: dict
    xValues: tuple

    def validate(self):
        if self.k < 0 or self.n < 1:
            raise ParameterError("need k >= 0 and n >= 1")
        if len(self.xValues) < self.k or any(len(row) < self.n for row in self.xValues[: self.k]):
            raise ParameterError("xValues must be a k x n matrix")
        for _, alpha, _ in terms(self.k, self.n):
            if alpha not in self.yValues:
                raise ParameterError(f"missing y value for alpha={alpha}")


def faa_di_bruno(inp: UniversalPolyInput):
    """Evaluate p_k^(n)({y_alpha}, {x_j^(i)})."""
    inp.validate()
    total = 0
    for coef, alpha, qs in terms(inp.k, inp.n):
        term = coef * inp.yValues[alpha]
        for i, row in enumerate(qs):
            for j, qij in enumerate(row):
                if qij:
                    term = term * inp.xValues[i][j] ** qij
        total = total + term
    return total


def multi_indices(n: int, max_order: int):
    """All alpha in N_0^n with |alpha| <= max_order."""
    out = []
    for order in range(max_order + 1):
        out.extend(distributions(order, n))
    return out


@lru_cache(maxsize=None)
def symmetric_terms(k: int):
    """(partition r, integer coefficient k!/prod((i!)^r_i r_i!), |r|) for p_k in symmetric form."""
    out = []
    for r in partitions(k):
        c = math.factorial(k)
        for i, ri in enumerate(r, start=1):
            c //= math.factorial(i) ** ri * math.factorial(ri)
        out.append((r, c, sum(r)))
    return tuple(out)


def faa_di_bruno_symmetric(k: int, n: int, y_of_order, x):
    """p_k^(n) when y_alpha depends only on |alpha| and x_j^(i) = x[i] for all j.

    Summing the q-distributions gives n^{|r|} / prod r_i!, so only the
    partitions of k are enumerated.  ``y_of_order(m)`` returns y for
    |alpha| = m; ``x[i]`` is used for i = 1..k (``x[0]`` is ignored).
    """
    if k == 0:
        return y_of_order(0)
    total = 0
    for r, c, m in symmetric_terms(k):
        term = c * n**m * y_of_order(m)
        for i, ri in enumerate(r, start=1):
            if ri:
                term = term * x[i] ** ri
        total = total + term
    return total


def majorant_bound_check(k: int, n: int, y: dict, x, Cy, Cx, r):
    """Both sides of the analytic-majorant estimate for p_k^(n).

    Returns (lhs, rhs) with lhs = p_k(y, Cx * x) and
    rhs = Cy * p_k({(|alpha|+1)! / (r/C)^(|alpha|+1)}, x), C = max(1, Cx).
    """
    C = max(1, Cx)
    xs = tuple(tuple(Cx * v for v in row) for row in x)
    lhs = faa_di_bruno(UniversalPolyInput(k, n, y, xs))
    ymaj = {a: math.factorial(sum(a) + 1) / (r / C) ** (sum(a) + 1) for a in multi_indices(n, k)}
    rhs = Cy * faa_di_bruno(UniversalPolyInput(k, n, ymaj, tuple(tuple(row) for row in x)))
    return lhs, rhs
