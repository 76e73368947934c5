"""Minimal and refit solvers.

* relative pose / homography from a single affine correspondence plus known
  vertical directions (hidden-variable elimination, degree-6 polynomial),
* 4-point DLT homography with Hartley normalization,
* 8-point least-squares essential refit with manifold projection,
* Levenberg-Marquardt pose/homography polishing with analytic Jacobians.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CheiralityFailure,
    DegenerateConfiguration,
    NoRealRoots,
    RankDeficientSystem,
    SingularAffine,
)
from .geometry import (
    AffineCorrespondence,
    ModelHypothesis,
    ModelKind,
    RelativePose,
    compose_essential,
    decompose_essential,
    hom,
    rodrigues,
    skew,
)

__all__ = [
    "GravityAlignedProblem",
    "SolverOutput",
    "align_to_gravity",
    "build_gravity_problem",
    "hidden_variable_matrix",
    "determinant_polynomial",
    "real_roots",
    "solve_pose_1ac_gravity",
    "solve_homography_1ac_gravity",
    "solve_homography_4pc",
    "refit_essential_8pt",
    "refine_pose_nonlinear",
]

_Y_AXIS = np.array([0.0, 1.0, 0.0])

# rotation about y by angle phi with x = tan(phi/2):
# (1 + x^2) R_y(x) = _G0 + x _G1 + x^2 _G2
_G0 = np.eye(3)
_G1 = np.array([[0.0, 0.0, -2.0], [0.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
_G2 = np.diag([-1.0, 1.0, -1.0])

# fixed Chebyshev nodes and the exact interpolation matrix taking the 7
# sampled determinant values to ascending polynomial coefficients
_NODES = np.cos((2.0 * np.arange(7) + 1.0) * np.pi / 14.0)
_VANDER_INV = np.linalg.inv(np.vander(_NODES, 7, increasing=True))


def _check_gravity(v):
    v = np.asarray(v, dtype=float).reshape(3)
    if abs(np.linalg.norm(v) - 1.0) > 1e-9:
        raise ValueError("gravity direction must be a unit vector")
    return v


def align_to_gravity(v):
    """Rotation taking the gravity direction v to the +y axis.

    Antipodal input (v ~ -y) maps to the fixed convention of a half turn
    about x; v ~ +y maps to the identity.
    """
    v = _check_gravity(v)
    x, y, z = v
    s = np.hypot(x, z)
    if s < 1e-9:
        return np.eye(3) if y > 0.0 else np.diag([1.0, -1.0, -1.0])
    axis = np.array([-z, 0.0, x]) / s
    return rodrigues(axis, np.arccos(np.clip(y, -1.0, 1.0)))


@dataclass(frozen=True, eq=False)
class GravityAlignedProblem:
    """Single-correspondence pose problem rotated into gravity frames.

    R1, R2 align the per-camera vertical directions with +y; q1, q2 are the
    rotated homogeneous points. B = A^-T [r1^1 r1^2]^T and C = [r2^1 r2^2]^T
    (r_i^j the j-th column of R_i) carry the affine constraint; m0/m1/m2 are
    the quadratic coefficient matrices of the hidden-variable system
    M(x) = m0 + x m1 + x^2 m2.
    """

    R1: np.ndarray
    R2: np.ndarray
    q1: np.ndarray
    q2: np.ndarray
    B: np.ndarray
    C: np.ndarray
    m0: np.ndarray = field(repr=False)
    m1: np.ndarray = field(repr=False)
    m2: np.ndarray = field(repr=False)


def build_gravity_problem(ac, v1, v2):
    """Set up the gravity-aligned constraint system for one correspondence."""
    R1 = align_to_gravity(v1)
    R2 = align_to_gravity(v2)
    q1 = R1 @ hom(ac.p1)
    q2 = R2 @ hom(ac.p2)
    det = ac.A[0, 0] * ac.A[1, 1] - ac.A[0, 1] * ac.A[1, 0]
    if abs(det) < 1e-12:
        raise SingularAffine("affine transform is not invertible")
    B = np.linalg.inv(ac.A).T @ R1[:, :2].T
    C = R2[:, :2].T
    # constraints, each multiplied by (1 + x^2) so entries are quadratic in x:
    #   epipolar:  q2^T [t']x R_y q1           -> row 1
    #   affine:    B R_y^T [t']x^T q2 + C [t']x R_y q1 = 0  -> rows 2-3
    # written as M(x) t' = 0 with
    #   row 1  = cross(G q1, q2)
    #   rows23 = B G^T [q2]x - C [G q1]x ,  G = (1+x^2) R_y
    sq2 = skew(q2)
    ms = []
    for G in (_G0, _G1, _G2):
        w = G @ q1
        ms.append(np.vstack([np.cross(w, q2), B @ G.T @ sq2 - C @ skew(w)]))
    return GravityAlignedProblem(R1, R2, q1, q2, B, C, ms[0], ms[1], ms[2])


def hidden_variable_matrix(prob, x):
    """3x3 matrix M(x) with M(x) t' = 0 at solutions of the constraint set."""
    return prob.m0 + x * prob.m1 + (x * x) * prob.m2


def determinant_polynomial(prob):
    """Ascending coefficients c0..c6 of det M(x).

    Built by evaluating the determinant at 7 fixed Chebyshev nodes and
    interpolating exactly, which sidesteps the symbolic expansion.
    """
    ys = np.array([np.linalg.det(hidden_variable_matrix(prob, x))
                   for x in _NODES])
    return _VANDER_INV @ ys


def real_roots(coeffs):
    """Real roots of a degree <= 6 polynomial via its companion matrix.

    Coefficients are normalized by the largest magnitude before root
    finding; roots with |imaginary part| >= 1e-8 are discarded, survivors
    must actually satisfy the polynomial and are deduplicated within 1e-10.
    Raises NoRealRoots when nothing survives (a valid reject outcome).
    """
    c = np.asarray(coeffs, dtype=float).reshape(-1)
    m = np.max(np.abs(c)) if c.size else 0.0
    if m == 0.0 or not np.isfinite(m):
        raise NoRealRoots("degenerate (identically zero) polynomial")
    c = c / m
    # trim leading coefficients that are numerically zero
    deg = c.size - 1
    while deg > 0 and abs(c[deg]) <= 1e-14:
        deg -= 1
    if deg == 0:
        raise NoRealRoots("polynomial is a nonzero constant")
    rs = np.roots(c[deg::-1])  # companion + balanced eigensolve
    rs = rs[np.abs(rs.imag) < 1e-8].real
    if rs.size == 0:
        raise NoRealRoots("no real roots")
    rs = rs[np.abs(np.polynomial.polynomial.polyval(rs, c)) < 1e-6]
    rs = np.sort(rs)
    keep = []
    for r in rs:
        if not keep or r - keep[-1] > 1e-10:
            keep.append(float(r))
    if not keep:
        raise NoRealRoots("no real roots satisfy the polynomial")
    return keep


@dataclass(frozen=True, eq=False)
class SolverOutput:
    """Pose candidates (and homographies, for the planar variant)."""

    poses: list
    homographies: list = field(default_factory=list)


def _rotation_about_y(x):
    return (_G0 + x * _G1 + (x * x) * _G2) / (1.0 + x * x)


def _canonical_sign(v):
    i = int(np.argmax(np.abs(v)))
    return -v if v[i] < 0.0 else v


def _pose_candidates(prob, ac):
    """(root, sign, pose) triples sorted by root then sign, filtered so every
    pose reproduces its generating correspondence."""
    coeffs = determinant_polynomial(prob)
    roots = real_roots(coeffs)
    p1h = hom(ac.p1)
    p2h = hom(ac.p2)
    Ainv_T = np.linalg.inv(ac.A).T
    out = []
    for x in roots:
        M = hidden_variable_matrix(prob, x)
        _, s, Vt = np.linalg.svd(M)
        if s[0] < 1e-300 or (s[1] - s[2]) / s[0] < 1e-10:
            continue  # kernel not one-dimensional; reject this root
        tprime = _canonical_sign(Vt[2])
        R = prob.R2.T @ _rotation_about_y(x) @ prob.R1
        for sign in (1.0, -1.0):
            t = prob.R2.T @ (sign * tprime)
            pose = RelativePose(R, t)
            E = compose_essential(pose)
            n1 = (E.T @ p2h)[:2]
            n2 = (E @ p1h)[:2]
            if abs(p2h @ E @ p1h) < 1e-6 and \
                    np.linalg.norm(Ainv_T @ n1 + n2) < 1e-5:
                out.append((x, sign, pose))
    return out


def solve_pose_1ac_gravity(ac, v1, v2):
    """Relative pose from one affine correspondence and known verticals.

    Points and affine must be in normalized image coordinates. Both
    translation signs are emitted per polynomial root; cheirality is the
    caller's job. Raises NoRealRoots / SingularAffine on rejection.
    """
    prob = build_gravity_problem(ac, v1, v2)
    cands = _pose_candidates(prob, ac)
    return SolverOutput(poses=[p for _, _, p in cands])


def _plane_normal_for_pose(ac, pose):
    """Least-squares scaled plane normal n' with H = R - t n'^T fitting ac.

    Six linear equations: two rows of the point transfer p2 x (H p1) = 0
    (the cross-product row with the smallest coefficient magnitude is
    dropped) and the four compatibility equations between the local affine
    transform and the homography Jacobian.
    """
    R, t = pose.R, pose.t
    u1, v1 = ac.p1
    u2, v2 = ac.p2
    p1h = hom(ac.p1)
    rows = []
    rhs = []
    # point rows: (p2 x t)_i (p1 . n') = (p2 x R p1)_i, linear in n'
    ct = np.cross(hom(ac.p2), t)
    cr = np.cross(hom(ac.p2), R @ p1h)
    keep = np.argsort(np.abs(ct))[1:]  # drop the weakest of the three rows
    for i in sorted(keep):
        rows.append(ct[i] * p1h)
        rhs.append(cr[i])
    # affine rows: h_ij - c h_3j = a_ij * (h31 u1 + h32 v1 + h33)
    r3p1 = R[2, 0] * u1 + R[2, 1] * v1 + R[2, 2]
    for i, c in ((0, u2), (1, v2)):
        for j in (0, 1):
            a = ac.A[i, j]
            g = a * t[2] * p1h
            g[j] += c * t[2] - t[i]
            rows.append(g)
            rhs.append(c * R[2, j] + a * r3p1 - R[i, j])
    G = np.array(rows)
    b = np.array(rhs)
    nprime, _, rank, _ = np.linalg.lstsq(G, b, rcond=None)
    if rank < 3:
        raise RankDeficientSystem("plane-normal system is rank deficient")
    return nprime


def solve_homography_1ac_gravity(ac, v1, v2):
    """Homography from one affine correspondence and known verticals.

    For each pose candidate the scaled plane normal is recovered by least
    squares and H = R - t n'^T assembled; the +-t pair of a root yields the
    same H, so one homography is kept per root.
    """
    prob = build_gravity_problem(ac, v1, v2)
    cands = _pose_candidates(prob, ac)
    poses = []
    homographies = []
    done_roots = set()
    for x, _, pose in cands:
        if x in done_roots:
            continue
        try:
            nprime = _plane_normal_for_pose(ac, pose)
        except RankDeficientSystem:
            continue
        H = pose.R - np.outer(pose.t, nprime)
        try:
            model = ModelHypothesis(ModelKind.HOMOGRAPHY, H, pose=pose,
                                    plane_normal=nprime)
        except ValueError:
            continue  # singular H, reject candidate
        done_roots.add(x)
        poses.append(pose)
        homographies.append(model)
    return SolverOutput(poses=poses, homographies=homographies)


# ---------------------------------------------------------------------------
# point-based fits used by local optimization
# ---------------------------------------------------------------------------

def _hartley(points):
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    centroid = pts.mean(axis=0)
    centered = pts - centroid
    mean_dist = np.mean(np.linalg.norm(centered, axis=1))
    if mean_dist < 1e-12:
        raise DegenerateConfiguration("points are coincident")
    s = np.sqrt(2.0) / mean_dist
    T = np.array([[s, 0.0, -s * centroid[0]],
                  [0.0, s, -s * centroid[1]],
                  [0.0, 0.0, 1.0]])
    return T, centered * s


def solve_homography_4pc(pairs):
    """DLT homography from four point pairs (Hartley-normalized).

    Raises DegenerateConfiguration when the null space of the 8x9 design
    matrix is not isolated (collinear triples, duplicate points).
    """
    pts1 = np.asarray([p[0] for p in pairs], dtype=float)
    pts2 = np.asarray([p[1] for p in pairs], dtype=float)
    if pts1.shape != (4, 2) or pts2.shape != (4, 2):
        raise DegenerateConfiguration("exactly four point pairs required")
    T1, x1 = _hartley(pts1)
    T2, x2 = _hartley(pts2)
    rows = []
    for (a, b), (c, d) in zip(x1, x2):
        p = (a, b, 1.0)
        rows.append([0.0, 0.0, 0.0,
                     -p[0], -p[1], -p[2],
                     d * p[0], d * p[1], d * p[2]])
        rows.append([p[0], p[1], p[2],
                     0.0, 0.0, 0.0,
                     -c * p[0], -c * p[1], -c * p[2]])
    D = np.array(rows)
    _, s, Vt = np.linalg.svd(D)
    if s[0] <= 0.0 or s[7] < 1e-8 * s[0]:
        raise DegenerateConfiguration("DLT null space is not isolated")
    Hn = Vt[8].reshape(3, 3)
    H = np.linalg.inv(T2) @ Hn @ T1
    return ModelHypothesis(ModelKind.HOMOGRAPHY, H)


def refit_essential_8pt(pairs):
    """Least-squares essential matrix from >= 8 normalized point pairs.

    Hartley-normalized stacked epipolar constraints; the minimizer is
    projected onto the essential manifold (singular values (1, 1, 0)).
    """
    pts1 = np.asarray([p[0] for p in pairs], dtype=float).reshape(-1, 2)
    pts2 = np.asarray([p[1] for p in pairs], dtype=float).reshape(-1, 2)
    if len(pts1) < 8:
        raise DegenerateConfiguration("need at least eight point pairs")
    T1, x1 = _hartley(pts1)
    T2, x2 = _hartley(pts2)
    u1, v1 = x1[:, 0], x1[:, 1]
    u2, v2 = x2[:, 0], x2[:, 1]
    D = np.column_stack([u2 * u1, u2 * v1, u2,
                         v2 * u1, v2 * v1, v2,
                         u1, v1, np.ones(len(u1))])
    _, s, Vt = np.linalg.svd(D, full_matrices=True)
    if s[0] <= 0.0 or s[7] < 1e-10 * s[0]:
        raise DegenerateConfiguration("epipolar stack is rank deficient")
    F = T2.T @ Vt[8].reshape(3, 3) @ T1
    U, _, Vt2 = np.linalg.svd(F)
    E = U @ np.diag([1.0, 1.0, 0.0]) @ Vt2
    return ModelHypothesis(ModelKind.ESSENTIAL, E)


# ---------------------------------------------------------------------------
# nonlinear refinement (Levenberg-Marquardt, analytic Jacobians)
# ---------------------------------------------------------------------------

_MAX_LM_ITERATIONS = 50
_GRADIENT_STOP = 1e-10


def _t_from_azel(az, el):
    ce = np.cos(el)
    return np.array([ce * np.cos(az), np.sin(el), ce * np.sin(az)])


def _essential_residuals(R0, az, el, delta, P1, P2):
    """Signed Sampson residuals at a local perturbation of (R0, az, el).

    delta - 5-vector: rotation increment (left-applied axis-angle) and
    azimuth/elevation offsets of the translation direction.
    """
    d = np.asarray(delta, dtype=float)
    ang = np.linalg.norm(d[:3])
    R = R0 if ang < 1e-300 else rodrigues(d[:3] / ang, ang) @ R0
    t = _t_from_azel(az + d[3], el + d[4])
    E = skew(t) @ R
    l2 = P1 @ E.T
    l1 = P2 @ E
    e = np.einsum("ni,ni->n", P2, l2)
    D = l2[:, 0] ** 2 + l2[:, 1] ** 2 + l1[:, 0] ** 2 + l1[:, 1] ** 2
    return e / np.sqrt(D)

def _essential_jacobian(R0, az, el, P1, P2):
    """Analytic Jacobian of :func:`_essential_residuals` at delta = 0."""
    t = _t_from_azel(az, el)
    E = skew(t) @ R0
    l2 = P1 @ E.T
    l1 = P2 @ E
    e = np.einsum("ni,ni->n", P2, l2)
    D = l2[:, 0] ** 2 + l2[:, 1] ** 2 + l1[:, 0] ** 2 + l1[:, 1] ** 2
    de_dE = P2[:, :, None] * P1[:, None, :]
    l2m = l2.copy()
    l2m[:, 2] = 0.0
    l1m = l1.copy()
    l1m[:, 2] = 0.0
    dD_dE = 2.0 * l2m[:, :, None] * P1[:, None, :] \
        + 2.0 * P2[:, :, None] * l1m[:, None, :]
    sqD = np.sqrt(D)
    dr_dE = de_dE / sqD[:, None, None] \
        - (0.5 * e / (D * sqD))[:, None, None] * dD_dE
    ce, se = np.cos(el), np.sin(el)
    ca, sa = np.cos(az), np.sin(az)
    dt_daz = np.array([-ce * sa, 0.0, ce * ca])
    dt_del = np.array([-se * ca, ce, -se * sa])
    basis = [skew(t) @ skew(ek) @ R0 for ek in np.eye(3)]
    basis.append(skew(dt_daz) @ R0)
    basis.append(skew(dt_del) @ R0)
    return np.einsum("nij,pij->np", dr_dE, np.array(basis))


def _homography_residuals(h8, h33, P1, P2):
    """Stacked symmetric-transfer residual components (scaled by 1/sqrt(2))."""
    H = np.append(np.asarray(h8, dtype=float), h33).reshape(3, 3)
    Hi = np.linalg.inv(H)
    wf = P1 @ H[2]
    wb = P2 @ Hi[2]
    fx = (P1 @ H[0]) / wf - P2[:, 0]
    fy = (P1 @ H[1]) / wf - P2[:, 1]
    bx = (P2 @ Hi[0]) / wb - P1[:, 0]
    by = (P2 @ Hi[1]) / wb - P1[:, 1]
    return np.concatenate([fx, fy, bx, by]) / np.sqrt(2.0)


def _homography_jacobian(h8, h33, P1, P2):
    """Analytic Jacobian of :func:`_homography_residuals` w.r.t. h8."""
    n = len(P1)
    H = np.append(np.asarray(h8, dtype=float), h33).reshape(3, 3)
    Hi = np.linalg.inv(H)
    wf = P1 @ H[2]
    wb = P2 @ Hi[2]
    nf = np.column_stack([P1 @ H[0], P1 @ H[1]])
    nb = np.column_stack([P2 @ Hi[0], P2 @ Hi[1]])
    J = np.zeros((4 * n, 8))
    # dHinv/dh_kl = -Hi[:,k] (outer) Hi[l,:]
    for p in range(8):
        k, l = divmod(p, 3)
        dfx = np.zeros(n)
        dfy = np.zeros(n)
        if k == 0:
            dfx = P1[:, l] / wf
        elif k == 1:
            dfy = P1[:, l] / wf
        else:
            dfx = -nf[:, 0] * P1[:, l] / wf ** 2
            dfy = -nf[:, 1] * P1[:, l] / wf ** 2
        dHi = -np.outer(Hi[:, k], Hi[l, :])
        dn0 = P2 @ dHi[0]
        dn1 = P2 @ dHi[1]
        dw = P2 @ dHi[2]
        dbx = dn0 / wb - nb[:, 0] * dw / wb ** 2
        dby = dn1 / wb - nb[:, 1] * dw / wb ** 2
        J[:, p] = np.concatenate([dfx, dfy, dbx, dby]) / np.sqrt(2.0)
    return J


def _lm_minimize(residual_fn, jacobian_fn, x0):
    """Damped Gauss-Newton descent; only improving steps are accepted."""
    x = np.asarray(x0, dtype=float)
    r = residual_fn(x)
    cost = float(r @ r)
    lam = 1e-3
    for _ in range(_MAX_LM_ITERATIONS):
        J = jacobian_fn(x)
        g = J.T @ r
        if np.max(np.abs(g)) < _GRADIENT_STOP:
            break
        JtJ = J.T @ J
        stepped = False
        while lam < 1e12:
            Aug = JtJ + lam * np.diag(np.diag(JtJ)) + 1e-15 * np.eye(len(x))
            try:
                step = np.linalg.solve(Aug, -g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            x_new = x + step
            r_new = residual_fn(x_new)
            cost_new = float(r_new @ r_new)
            if np.isfinite(cost_new) and cost_new < cost:
                x, r, cost = x_new, r_new, cost_new
                lam = max(lam * 0.3, 1e-12)
                stepped = True
                break
            lam *= 10.0
        if not stepped:
            break
    return x, cost


def refine_pose_nonlinear(model, inliers):
    """Polish a hypothesis on its inliers by damped least squares.

    Essential models minimize squared Sampson distances over a local
    rotation increment plus azimuth/elevation of the translation;
    homographies minimize squared symmetric transfer errors over the eight
    entries with h33 pinned to sign(h33). Returns the input unchanged when
    there are fewer inliers than the refit sample size or the gradient is
    already below the stopping tolerance; the objective never increases.
    """
    pairs = list(inliers)
    if model.kind is ModelKind.ESSENTIAL:
        if len(pairs) < 8:
            return model
        P1 = np.array([hom(p1) for p1, _ in pairs])
        P2 = np.array([hom(p2) for _, p2 in pairs])
        pose = model.pose
        if pose is None:
            pose = _pose_from_matches(model.M, pairs)
            if pose is None:
                return model
        # keep residuals well-defined: drop points at the epipoles
        r0 = _essential_residuals_denominator(pose, P1, P2)
        keep = r0 > 1e-15
        if keep.sum() < 8:
            return model
        P1, P2 = P1[keep], P2[keep]
        az = np.arctan2(pose.t[2], pose.t[0])
        el = np.arcsin(np.clip(pose.t[1], -1.0, 1.0))
        r0 = _essential_residuals(pose.R, az, el, np.zeros(5), P1, P2)
        J0 = _essential_jacobian(pose.R, az, el, P1, P2)
        if np.max(np.abs(J0.T @ r0)) < _GRADIENT_STOP:
            return model
        pose_f = _refine_essential(pose.R, az, el, r0, P1, P2)
        return ModelHypothesis(ModelKind.ESSENTIAL, compose_essential(pose_f),
                               pose=pose_f)

    if len(pairs) < 4:
        return model
    H0 = model.M
    if abs(H0[2, 2]) < 1e-9 * np.linalg.norm(H0):
        return model  # gauge choice unavailable; keep input
    Hw = H0 / abs(H0[2, 2])
    h33 = Hw[2, 2]
    P1 = np.array([hom(p1) for p1, _ in pairs])
    P2 = np.array([hom(p2) for _, p2 in pairs])

    def res(h8):
        return _homography_residuals(h8, h33, P1, P2)

    def jac(h8):
        return _homography_jacobian(h8, h33, P1, P2)

    h0 = Hw.ravel()[:8]
    r_init = res(h0)
    if not np.all(np.isfinite(r_init)):
        return model
    if np.max(np.abs(jac(h0).T @ r_init)) < _GRADIENT_STOP:
        return model
    h, _ = _lm_minimize(res, jac, h0)
    H = np.append(h, h33).reshape(3, 3)
    try:
        return ModelHypothesis(ModelKind.HOMOGRAPHY, H)
    except ValueError:
        return model


def _refine_essential(R0, az, el, r0, P1, P2):
    """LM descent on Sampson residuals, re-centering the rotation chart after
    every accepted step so the analytic Jacobian is always exact."""
    r = r0
    cost = float(r @ r)
    lam = 1e-3
    for _ in range(_MAX_LM_ITERATIONS):
        J = _essential_jacobian(R0, az, el, P1, P2)
        g = J.T @ r
        if np.max(np.abs(g)) < _GRADIENT_STOP:
            break
        JtJ = J.T @ J
        improved = False
        while lam < 1e12:
            Aug = JtJ + lam * np.diag(np.diag(JtJ)) + 1e-15 * np.eye(5)
            try:
                step = np.linalg.solve(Aug, -g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            ang = np.linalg.norm(step[:3])
            Rc = R0 if ang < 1e-300 else rodrigues(step[:3] / ang, ang) @ R0
            azc, elc = az + step[3], el + step[4]
            rc = _essential_residuals(Rc, azc, elc, np.zeros(5), P1, P2)
            costc = float(rc @ rc)
            if np.isfinite(costc) and costc < cost:
                R0, az, el, r, cost = Rc, azc, elc, rc, costc
                lam = max(lam * 0.3, 1e-12)
                improved = True
                break
            lam *= 10.0
        if not improved:
            break
    return RelativePose(R0, _t_from_azel(az, el))


def _essential_residuals_denominator(pose, P1, P2):
    E = skew(pose.t) @ pose.R
    l2 = P1 @ E.T
    l1 = P2 @ E
    return l2[:, 0] ** 2 + l2[:, 1] ** 2 + l1[:, 0] ** 2 + l1[:, 1] ** 2


def _pose_from_matches(E, pairs):
    """Cheirality-resolved pose of E using the first workable inlier."""
    for p1, p2 in pairs:
        try:
            return decompose_essential(E, (np.asarray(p1), np.asarray(p2)))
        except CheiralityFailure:
            continue
    return None
