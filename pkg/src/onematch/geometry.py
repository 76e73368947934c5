"""Core two-view geometry: domain types, constraint residuals, decompositions.

Conventions used throughout the package:

* points are length-2 float arrays (u, v); ``hom`` appends the unit third
  coordinate,
* the relative pose (R, t) maps camera-1 coordinates to camera-2 as
  ``X2 = R @ X1 - t`` with ``|t| = 1``,
* the essential matrix is ``E = [t]x R`` (Frobenius norm sqrt(2)),
* a plane ``n . X1 = d`` induces the homography ``H = R - t (n/d)^T`` with
  ``x2 ~ H x1``,
* estimation runs in normalized (calibrated) image coordinates; pixel
  thresholds are divided by the mean focal length before use.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .errors import (
    CheiralityFailure,
    DegenerateResidual,
    PointAtInfinity,
    SingularAffine,
)

__all__ = [
    "ModelKind",
    "CameraIntrinsics",
    "AffineCorrespondence",
    "RelativePose",
    "ModelHypothesis",
    "hom",
    "skew",
    "rodrigues",
    "normalize_point",
    "denormalize_point",
    "normalize_affine",
    "epipolar_normals",
    "affine_epipolar_residual",
    "sampson_distance",
    "symmetric_epipolar_error",
    "homography_transfer_error",
    "compose_essential",
    "decompose_essential",
    "decompose_homography",
    "triangulate_midpoint",
]


class ModelKind(Enum):
    ESSENTIAL = "essential"
    HOMOGRAPHY = "homography"


def hom(p):
    """Homogeneous 3-vector of an image point."""
    return np.array([p[0], p[1], 1.0])


def skew(v):
    """Cross-product matrix: skew(v) @ w == cross(v, w)."""
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def rodrigues(axis, angle):
    """Rotation about a unit axis by ``angle`` radians."""
    K = skew(axis)
    return np.eye(3) + np.sin(angle) * K + (1.0 - np.cos(angle)) * (K @ K)


def unit(v):
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0.0 or not np.isfinite(n):
        raise ValueError("cannot normalize a zero or non-finite vector")
    return v / n


@dataclass(frozen=True, eq=False)
class CameraIntrinsics:
    """Upper-triangular calibration matrix with K[2,2] = 1."""

    K: np.ndarray

    def __post_init__(self):
        K = np.asarray(self.K, dtype=float)
        if K.shape != (3, 3):
            raise ValueError("K must be 3x3")
        if not np.all(np.isfinite(K)):
            raise ValueError("K must be finite")
        if K[2, 2] != 1.0 or K[0, 0] <= 0.0 or K[1, 1] <= 0.0:
            raise ValueError("K must have positive focal lengths and K[2,2] = 1")
        if K[1, 0] != 0.0 or K[2, 0] != 0.0 or K[2, 1] != 0.0:
            raise ValueError("K must be upper triangular")
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "K_inv", np.linalg.inv(K))

    @property
    def mean_focal(self):
        return 0.5 * (self.K[0, 0] + self.K[1, 1])


@dataclass(frozen=True, eq=False)
class AffineCorrespondence:
    """Point pair plus the 2x2 local affine transform mapping patch 1 -> 2."""

    p1: np.ndarray
    p2: np.ndarray
    A: np.ndarray

    def __post_init__(self):
        p1 = np.asarray(self.p1, dtype=float).reshape(2)
        p2 = np.asarray(self.p2, dtype=float).reshape(2)
        A = np.asarray(self.A, dtype=float).reshape(2, 2)
        if not (np.all(np.isfinite(p1)) and np.all(np.isfinite(p2))
                and np.all(np.isfinite(A))):
            raise ValueError("correspondence entries must be finite")
        if abs(A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]) < 1e-12:
            raise SingularAffine("local affine transform is not invertible")
        object.__setattr__(self, "p1", p1)
        object.__setattr__(self, "p2", p2)
        object.__setattr__(self, "A", A)


@dataclass(frozen=True, eq=False)
class RelativePose:
    """Rotation plus unit-norm translation direction (X2 = R X1 - t)."""

    R: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.R, dtype=float).reshape(3, 3)
        t = np.asarray(self.t, dtype=float).reshape(3)
        if np.abs(R.T @ R - np.eye(3)).max() > 1e-9:
            raise ValueError("R is not orthonormal")
        if abs(np.linalg.det(R) - 1.0) > 1e-9:
            raise ValueError("R is not a proper rotation")
        n = np.linalg.norm(t)
        if n == 0.0 or not np.isfinite(n):
            raise ValueError("translation must be a nonzero finite vector")
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "t", t / n)


@dataclass(frozen=True, eq=False)
class ModelHypothesis:
    """An essential matrix or homography, normalized deterministically.

    Essential matrices are scaled to Frobenius norm sqrt(2) (singular values
    (1, 1, 0)); homographies to Frobenius norm 1 with the largest-magnitude
    entry positive. ``pose`` and ``plane_normal`` reproduce the *unnormalized*
    matrix: ``[t]x R`` resp. ``R - t n'^T`` equal ``M`` up to a positive
    scale.
    """

    kind: ModelKind
    M: np.ndarray
    pose: RelativePose | None = None
    plane_normal: np.ndarray | None = None

    def __post_init__(self):
        M = np.asarray(self.M, dtype=float).reshape(3, 3)
        if not np.all(np.isfinite(M)):
            raise ValueError("model matrix must be finite")
        f = np.linalg.norm(M)
        if f == 0.0:
            raise ValueError("model matrix must be nonzero")
        if self.kind is ModelKind.ESSENTIAL:
            M = M * (np.sqrt(2.0) / f)
        else:
            if abs(np.linalg.det(M)) < 1e-15:
                raise ValueError("homography must be invertible")
            M = M / f
            flat = np.abs(M).ravel()
            if M.ravel()[int(np.argmax(flat))] < 0.0:
                M = -M
        object.__setattr__(self, "M", M)


# ---------------------------------------------------------------------------
# coordinate normalization
# ---------------------------------------------------------------------------

def normalize_point(p, K):
    """Map a pixel point to normalized (calibrated) coordinates via K^-1."""
    q = K.K_inv @ hom(p)
    return q[:2] / q[2]


def denormalize_point(p, K):
    """Inverse of :func:`normalize_point`."""
    q = K.K @ hom(p)
    return q[:2] / q[2]


def normalize_affine(A, K1, K2):
    """Express a pixel-space local affine transform in normalized coordinates.

    The normalization map is affine, so its 2x2 Jacobian is the upper-left
    block of K^-1 and the transformed matrix is J2 @ A @ J1^-1.
    """
    J1 = K1.K_inv[:2, :2]
    J2 = K2.K_inv[:2, :2]
    out = J2 @ np.asarray(A, dtype=float) @ np.linalg.inv(J1)
    if abs(out[0, 0] * out[1, 1] - out[0, 1] * out[1, 0]) < 1e-12:
        raise SingularAffine("normalized affine transform is singular")
    return out


# ---------------------------------------------------------------------------
# constraint residuals
# ---------------------------------------------------------------------------

def epipolar_normals(E, p1, p2):
    """Normals of the two epipolar lines: ((E^T p2)[:2], (E p1)[:2])."""
    return (E.T @ hom(p2))[:2], (E @ hom(p1))[:2]


def affine_epipolar_residual(ac, E):
    """A^-T n1 + n2; the zero 2-vector iff the AC is consistent with E."""
    n1, n2 = epipolar_normals(E, ac.p1, ac.p2)
    det = ac.A[0, 0] * ac.A[1, 1] - ac.A[0, 1] * ac.A[1, 0]
    if abs(det) < 1e-12:
        raise SingularAffine("affine transform is not invertible")
    return np.linalg.inv(ac.A).T @ n1 + n2


def sampson_distance(p1, p2, E):
    """First-order geometric epipolar error of a single correspondence."""
    r = _kernels.sampson(E, np.atleast_1d(float(p1[0])), np.atleast_1d(float(p1[1])),
                         np.atleast_1d(float(p2[0])), np.atleast_1d(float(p2[1])))[0]
    if not np.isfinite(r):
        raise DegenerateResidual("both points sit at the epipoles")
    return float(r)


def symmetric_epipolar_error(p1, p2, E):
    """RMS point-to-epipolar-line distance over both images."""
    r = _kernels.symmetric_epipolar(
        E, np.atleast_1d(float(p1[0])), np.atleast_1d(float(p1[1])),
        np.atleast_1d(float(p2[0])), np.atleast_1d(float(p2[1])))[0]
    if not np.isfinite(r):
        raise DegenerateResidual("a point sits at an epipole")
    return float(r)


def homography_transfer_error(p1, p2, H):
    """Symmetric transfer distance of a single correspondence under H."""
    Hinv = np.linalg.inv(H)
    r = _kernels.homography_transfer(
        H, Hinv, np.atleast_1d(float(p1[0])), np.atleast_1d(float(p1[1])),
        np.atleast_1d(float(p2[0])), np.atleast_1d(float(p2[1])))[0]
    if not np.isfinite(r):
        raise PointAtInfinity("mapped point lies at infinity")
    return float(r)


# ---------------------------------------------------------------------------
# essential matrix composition / decomposition
# ---------------------------------------------------------------------------

def compose_essential(pose):
    """E = [t]x R, scaled to Frobenius norm sqrt(2)."""
    E = skew(pose.t) @ pose.R
    return E * (np.sqrt(2.0) / np.linalg.norm(E))


def triangulate_midpoint(R, t, p1, p2):
    """Midpoint triangulation; returns (X, depth1, depth2) in camera-1 frame.

    Rays: camera 1 from the origin along hom(p1); camera 2 from center
    R^T t along R^T hom(p2). Used only for cheirality decisions.
    """
    d1 = hom(p1)
    c2 = R.T @ t
    e2 = R.T @ hom(p2)
    a = d1 @ d1
    b = d1 @ e2
    c = e2 @ e2
    f = d1 @ c2
    g = e2 @ c2
    den = b * b - a * c
    if abs(den) < 1e-15:
        raise CheiralityFailure("parallel viewing rays")
    s1 = (c * f - b * g) / den
    s2 = (b * f - a * g) / den
    X = 0.5 * (s1 * d1 + c2 + s2 * e2)
    depth1 = X[2]
    depth2 = (R @ X - t)[2]
    return X, depth1, depth2


def decompose_essential(E, sample):
    """Recover (R, t) from E, resolving the 4-fold ambiguity by cheirality.

    sample - one (p1, p2) correspondence used for the front-of-camera test
    Raises CheiralityFailure when no candidate sees the point in front of
    both cameras (the sample is then an outlier of E).
    """
    U, _, Vt = np.linalg.svd(E)
    if np.linalg.det(U) < 0.0:
        U = -U
    if np.linalg.det(Vt) < 0.0:
        Vt = -Vt
    W = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    t = U[:, 2]
    p1, p2 = sample
    for R in (U @ W @ Vt, U @ W.T @ Vt):
        for tc in (t, -t):
            try:
                _, z1, z2 = triangulate_midpoint(R, tc, p1, p2)
            except CheiralityFailure:
                continue
            if z1 > 0.0 and z2 > 0.0:
                return RelativePose(R, tc)
    raise CheiralityFailure("sample point is behind a camera for every pose")


# ---------------------------------------------------------------------------
# homography decomposition
# ---------------------------------------------------------------------------

def _homography_pose_candidates(H):
    """All (R, t, n') with R - t n'^T proportional to H (t unit or n' = 0)."""
    sv = np.linalg.svd(H, compute_uv=False)
    Hn = H / sv[1]
    S = Hn.T @ Hn
    w, V = np.linalg.eigh(S)  # ascending eigenvalues
    s3sq, _, s1sq = w
    if np.linalg.det(V) < 0.0:
        V = -V
    if s1sq - s3sq < 1e-9:
        # pure rotation: n' = 0, translation direction unobservable
        Ur, _, Vtr = np.linalg.svd(Hn)
        R = Ur @ np.diag([1.0, 1.0, np.linalg.det(Ur @ Vtr)]) @ Vtr
        return [(R, np.array([0.0, 0.0, 1.0]), np.zeros(3))]
    v1, v2, v3 = V[:, 2], V[:, 1], V[:, 0]
    a = np.sqrt(max(1.0 - s3sq, 0.0))
    b = np.sqrt(max(s1sq - 1.0, 0.0))
    nrm = np.sqrt(s1sq - s3sq)
    out = []
    for u in ((a * v1 + b * v3) / nrm, (a * v1 - b * v3) / nrm):
        Uc = np.column_stack([v2, u, np.cross(v2, u)])
        Wc = np.column_stack([Hn @ v2, Hn @ u, np.cross(Hn @ v2, Hn @ u)])
        R = Wc @ Uc.T
        n = np.cross(v2, u)
        ta = (Hn - R) @ n  # Hn = R + ta n^T
        scale = np.linalg.norm(ta)
        if scale < 1e-12:
            out.append((R, np.array([0.0, 0.0, 1.0]), np.zeros(3)))
            continue
        # ours: H = R - t n'^T  =>  t = -ta/|ta|, n' = |ta| n
        for sgn in (1.0, -1.0):
            out.append((R, -sgn * ta / scale, sgn * scale * n))
    return out


def decompose_homography(H, matches):
    """Pick the physically valid (R, t, n') for H using inlier matches.

    matches - iterable of (p1, p2) pairs in normalized coordinates
    Candidates are ranked by how many matches they place in front of both
    cameras and on the visible side of the plane; deterministic tie-break
    keeps the first candidate.
    """
    matches = list(matches)
    if matches:
        s = sum(float(hom(p2) @ (H @ hom(p1))) for p1, p2 in matches)
        if s < 0.0:
            H = -H
    best = None
    for cand_idx, (R, t, nprime) in enumerate(_homography_pose_candidates(H)):
        good = 0
        for p1, p2 in matches:
            denom = nprime @ hom(p1)
            if abs(denom) < 1e-15:
                continue
            lam = 1.0 / denom
            if np.linalg.norm(nprime) == 0.0:
                lam = 1.0  # pure rotation: any positive depth
            if lam <= 0.0:
                continue
            X2 = R @ (lam * hom(p1)) - t
            if X2[2] > 0.0:
                good += 1
        key = (good, -cand_idx)
        if best is None or key > best[0]:
            best = (key, (R, t, nprime))
    R, t, nprime = best[1]
    return RelativePose(R, t), nprime
