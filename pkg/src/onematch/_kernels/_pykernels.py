"""Pure-numpy residual kernels.

These mirror the compiled kernels in ``_ckernels.pyx`` operation for
operation: every arithmetic expression keeps the same association order so
both backends produce bit-identical IEEE-754 results. Degenerate inputs map
to ``inf`` instead of raising, so the batch form can be used inside scoring
loops; the scalar wrappers in :mod:`onematch.geometry` translate ``inf``
back into the documented exceptions.
"""

import numpy as np

BACKEND = "python"


def sampson(E, u1, v1, u2, v2):
    """First-order epipolar distance per correspondence.

    E      - 3x3 essential (or fundamental) matrix
    u1, v1 - source point coordinates, shape (n,)
    u2, v2 - destination point coordinates, shape (n,)
    returns distances, shape (n,); inf where the denominator vanishes
    """
    e00, e01, e02 = E[0, 0], E[0, 1], E[0, 2]
    e10, e11, e12 = E[1, 0], E[1, 1], E[1, 2]
    e20, e21, e22 = E[2, 0], E[2, 1], E[2, 2]
    a2 = (e00 * u1 + e01 * v1) + e02
    b2 = (e10 * u1 + e11 * v1) + e12
    c2 = (e20 * u1 + e21 * v1) + e22
    a1 = (e00 * u2 + e10 * v2) + e20
    b1 = (e01 * u2 + e11 * v2) + e21
    e = (u2 * a2 + v2 * b2) + c2
    den = ((a2 * a2 + b2 * b2) + a1 * a1) + b1 * b1
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.abs(e) / np.sqrt(den)
    return np.where(den < 1e-15, np.inf, r)


def symmetric_epipolar(E, u1, v1, u2, v2):
    """RMS of the two point-to-epipolar-line distances per correspondence."""
    e00, e01, e02 = E[0, 0], E[0, 1], E[0, 2]
    e10, e11, e12 = E[1, 0], E[1, 1], E[1, 2]
    e20, e21, e22 = E[2, 0], E[2, 1], E[2, 2]
    a2 = (e00 * u1 + e01 * v1) + e02
    b2 = (e10 * u1 + e11 * v1) + e12
    c2 = (e20 * u1 + e21 * v1) + e22
    a1 = (e00 * u2 + e10 * v2) + e20
    b1 = (e01 * u2 + e11 * v2) + e21
    e = (u2 * a2 + v2 * b2) + c2
    n2sq = a2 * a2 + b2 * b2
    n1sq = a1 * a1 + b1 * b1
    with np.errstate(divide="ignore", invalid="ignore"):
        d2 = np.abs(e) / np.sqrt(n2sq)
        d1 = np.abs(e) / np.sqrt(n1sq)
        r = np.sqrt((d1 * d1 + d2 * d2) * 0.5)
    bad = (n2sq < 1e-15) | (n1sq < 1e-15)
    return np.where(bad, np.inf, r)


def homography_transfer(H, Hinv, u1, v1, u2, v2):
    """Symmetric transfer distance per correspondence.

    Hinv must be the inverse of H computed once by the caller so both
    backends consume the same matrix.
    """
    h00, h01, h02 = H[0, 0], H[0, 1], H[0, 2]
    h10, h11, h12 = H[1, 0], H[1, 1], H[1, 2]
    h20, h21, h22 = H[2, 0], H[2, 1], H[2, 2]
    g00, g01, g02 = Hinv[0, 0], Hinv[0, 1], Hinv[0, 2]
    g10, g11, g12 = Hinv[1, 0], Hinv[1, 1], Hinv[1, 2]
    g20, g21, g22 = Hinv[2, 0], Hinv[2, 1], Hinv[2, 2]
    w = (h20 * u1 + h21 * v1) + h22
    wb = (g20 * u2 + g21 * v2) + g22
    with np.errstate(divide="ignore", invalid="ignore"):
        fx = ((h00 * u1 + h01 * v1) + h02) / w - u2
        fy = ((h10 * u1 + h11 * v1) + h12) / w - v2
        bx = ((g00 * u2 + g01 * v2) + g02) / wb - u1
        by = ((g10 * u2 + g11 * v2) + g12) / wb - v1
        r = np.sqrt((((fx * fx + fy * fy) + bx * bx) + by * by) * 0.5)
    bad = (np.abs(w) < 1e-12) | (np.abs(wb) < 1e-12)
    return np.where(bad, np.inf, r)
