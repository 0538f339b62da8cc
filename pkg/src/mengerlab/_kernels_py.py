"""Pure numpy implementation of the pointwise Menger density kernels.

Field arrays have shape (nodes, dim, M): difference quotients A, B and the
tangents P2 = gamma'(u+v), P3 = gamma'(u+w).  ``sp1`` holds |gamma'(u)| on
the u-grid.  The smooth density is

    S = |P1||P2||P3| (|A^B| / s)^q / (|A||B||C|)^p,   C = (bB + aA) / s.
"""

import numpy as np

BACKEND = "python"


def _wedge2(A, B):
    n = A.shape[1]
    out = np.zeros((A.shape[0], A.shape[2]))
    for i in range(n):
        for j in range(i + 1, n):
            d = A[:, i] * B[:, j] - A[:, j] * B[:, i]
            out += d * d
    return out


def _parts(A, B, P2, P3, sp1, a, b, p, q):
    s = (a + b)[:, None]
    a_ = a[:, None, None]
    b_ = b[:, None, None]
    C = (b_ * B + a_ * A) / s[:, :, None]
    AA = np.einsum("kim,kim->km", A, A)
    BB = np.einsum("kim,kim->km", B, B)
    CC = np.einsum("kim,kim->km", C, C)
    AB = np.einsum("kim,kim->km", A, B)
    W2 = _wedge2(A, B)
    sp2 = np.sqrt(np.einsum("kim,kim->km", P2, P2))
    sp3 = np.sqrt(np.einsum("kim,kim->km", P3, P3))
    with np.errstate(divide="ignore", invalid="ignore"):
        # T = S / |A^B|^2, finite for q >= 2 even when the wedge vanishes
        T = sp1[None, :] * sp2 * sp3 * W2 ** (0.5 * q - 1.0) / s**q / (AA * BB * CC) ** (0.5 * p)
    T = np.where(np.isfinite(T), T, 0.0)
    return s, C, AA, BB, CC, AB, W2, sp2, sp3, T


def menger_density(A, B, P2, P3, sp1, a, b, p, q):
    parts = _parts(A, B, P2, P3, sp1, a, b, p, q)
    return parts[-1] * parts[6]


def menger_density_grad(A, B, P1, P2, P3, sp1, a, b, p, q):
    """Density and its partial derivatives with respect to every field.

    Returns ``S, gA, gB, gP1, gP2, gP3`` where ``gP1`` has shape (nodes, dim, M).
    """
    s, C, AA, BB, CC, AB, W2, sp2, sp3, T = _parts(A, B, P2, P3, sp1, a, b, p, q)
    S = T * W2
    with np.errstate(divide="ignore", invalid="ignore"):
        rA = np.where(AA > 0, S / AA, 0.0)
        rB = np.where(BB > 0, S / BB, 0.0)
        rC = np.where(CC > 0, S / CC, 0.0)
    Tq = (q * T)[:, None, :]
    Cterm = (p * rC)[:, None, :] * C
    ta = (a / (a + b))[:, None, None]
    tb = (b / (a + b))[:, None, None]
    gA = Tq * (BB[:, None, :] * A - AB[:, None, :] * B) - (p * rA)[:, None, :] * A - ta * Cterm
    gB = Tq * (AA[:, None, :] * B - AB[:, None, :] * A) - (p * rB)[:, None, :] * B - tb * Cterm
    gP1 = (S / sp1[None, :] ** 2)[:, None, :] * P1[None, :, :]
    gP2 = (S / sp2**2)[:, None, :] * P2
    gP3 = (S / sp3**2)[:, None, :] * P3
    return S, gA, gB, gP1, gP2, gP3
