"""
Rank-one eigen-update through the secular equation.

For D = diag(d) with d ascending and a vector z, the eigenvalues of
D + z z^T are the roots of

    f(lam) = 1 + sum_j z_j^2 / (d_j - lam)

with exactly one root in every gap (d_i, d_{i+1}) and one in
(d_k, d_k + |z|^2]. Roots are solved in coordinates shifted to the
nearest pole, and z is recomputed from the roots (Loewner) so that the
eigenvectors stay orthogonal.
"""

import numpy as np
from numpy.typing import NDArray

FloatArray = NDArray[np.float64]

DEFLATION_TOL = 1e-12
CLUSTER_TOL = 1e-12
MAX_ITER = 200

_EPS = float(np.finfo(np.float64).eps)


def secular_update(
    eigenvalues: FloatArray,
    eigenvectors: FloatArray,
    z: FloatArray,
    *,
    deflation_tol: float = DEFLATION_TOL,
) -> tuple[FloatArray, FloatArray]:
    """
    Spectrum of V diag(eigenvalues) V^T + x x^T given z = V^T x.

    Args:
        eigenvalues: Current eigenvalues, descending
        eigenvectors: Current eigenvectors as columns of V
        z: Projections of the update vector on the eigenvectors
        deflation_tol: Components with |z_i| <= deflation_tol * |z| are treated as zero

    Returns:
        Updated (eigenvalues descending, eigenvectors as columns)
    """
    d = eigenvalues[::-1].astype(np.float64, copy=True)
    q = eigenvectors[:, ::-1].astype(np.float64, copy=True)
    w = z[::-1].astype(np.float64, copy=True)

    norm_sq = float(w @ w)
    if norm_sq == 0.0:
        return eigenvalues.copy(), eigenvectors.copy()

    scale = max(float(np.max(np.abs(d))), norm_sq)
    _merge_clusters(d, q, w, CLUSTER_TOL * scale)

    active = np.abs(w) > deflation_tol * np.sqrt(norm_sq)
    if not active.any():
        return eigenvalues.copy(), eigenvectors.copy()

    d_active = d[active]
    w_active = w[active]
    roots, gaps = _secular_roots(d_active, w_active)
    z_hat = _loewner_vector(d_active, w_active, gaps)

    # row i holds the coordinates of eigenvector i in the active sub-basis
    coords = z_hat[None, :] / gaps
    coords /= np.linalg.norm(coords, axis=1, keepdims=True)

    values = np.concatenate([d[~active], roots])
    vectors = np.concatenate([q[:, ~active], q[:, active] @ coords.T], axis=1)

    order = np.argsort(-values, kind="stable")
    return values[order], vectors[:, order]


def _merge_clusters(d: FloatArray, q: FloatArray, w: FloatArray, tol: float) -> None:
    """
    Collapse runs of numerically equal poles in place.

    Within a run the basis is reflected so that the whole update weight
    sits on the first vector; the remaining ones then deflate.
    """
    size = d.size
    start = 0
    while start < size:
        stop = start + 1
        while stop < size and d[stop] - d[stop - 1] <= tol:
            stop += 1
        if stop - start > 1:
            block = slice(start, stop)
            d[block] = d[block].mean()
            _concentrate(q[:, block], w[block])
        start = stop


def _concentrate(basis: FloatArray, weights: FloatArray) -> None:
    norm = float(np.linalg.norm(weights))
    if norm == 0.0:
        return

    alpha = -norm if weights[0] > 0 else norm
    v = weights.copy()
    v[0] -= alpha
    vv = float(v @ v)
    if vv == 0.0:
        return

    reflector = np.eye(weights.size) - 2.0 * np.outer(v, v) / vv
    basis[:] = basis @ reflector
    weights[:] = 0.0
    weights[0] = alpha


def _secular_roots(d: FloatArray, w: FloatArray) -> tuple[FloatArray, FloatArray]:
    """
    All roots of the secular equation for strictly increasing poles d.

    Returns:
        roots, and gaps[i, j] = d_j - root_i computed without cancellation
    """
    k = d.size
    z2 = w * w
    origin = np.arange(k)
    lo = np.zeros(k)
    hi = np.empty(k)

    if k > 1:
        gap = np.diff(d)
        mid = d[:-1] + gap / 2.0
        f_mid = 1.0 + (z2[None, :] / (d[None, :] - mid[:, None])).sum(axis=1)
        left = f_mid >= 0.0
        origin[:-1] = np.where(left, np.arange(k - 1), np.arange(1, k))
        lo[:-1] = np.where(left, 0.0, -gap / 2.0)
        hi[:-1] = np.where(left, gap / 2.0, 0.0)
    hi[-1] = float(z2.sum())

    # delta[i, j] = d_j - d_origin(i)
    delta = d[None, :] - d[origin][:, None]
    mu = (lo + hi) / 2.0

    for _ in range(MAX_ITER):
        diff = delta - mu[:, None]
        ratio = z2[None, :] / diff
        g = 1.0 + ratio.sum(axis=1)
        slope = (ratio / diff).sum(axis=1)

        below = g < 0.0
        lo = np.where(below, mu, lo)
        hi = np.where(below, hi, mu)

        newton = mu - g / slope
        inside = (newton > lo) & (newton < hi)
        step = np.where(inside, newton, (lo + hi) / 2.0)
        step = np.where(g == 0.0, mu, step)

        width = hi - lo
        done = (np.abs(step - mu) <= 4.0 * _EPS * np.abs(step)) | (
            width <= 4.0 * _EPS * np.maximum(np.abs(lo), np.abs(hi))
        )
        mu = step
        if done.all():
            break

    roots = d[origin] + mu
    gaps = delta - mu[:, None]
    return roots, gaps


def _loewner_vector(d: FloatArray, w: FloatArray, gaps: FloatArray) -> FloatArray:
    """
    Recompute the update vector whose exact secular roots are the computed ones.

    z_j^2 = prod_i (root_i - d_j) / prod_{i != j} (d_i - d_j)
    """
    numerator = -gaps
    denominator = d[:, None] - d[None, :]
    np.fill_diagonal(denominator, 1.0)
    log_magnitude = np.log(np.abs(numerator / denominator)).sum(axis=0)
    return np.sign(w) * np.exp(0.5 * log_magnitude)
