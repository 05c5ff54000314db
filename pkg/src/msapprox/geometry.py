"""Linear algebra for symmetric matrices and the Riemannian geometry of SPD matrices.

The manifold of symmetric positive definite (SPD) matrices carries the
affine-invariant metric, under which it is a Hadamard manifold: geodesics
between any two points exist and are unique, the geodesic distance is

    rho(A, B) = || log(A^{-1/2} B A^{-1/2}) ||_F,

and the weighted Karcher (Frechet) mean exists and is unique for nonnegative
weights.  All functions accept stacked arrays with shape ``(..., d, d)`` and
broadcast over the leading axes; the matrix dimension is arbitrary even though
the experiments only exercise 3x3.

The :class:`ScalarLine` and :class:`SpdManifold` value spaces expose distance,
exp/log maps, and weighted means behind one interface so that scalar-valued
and manifold-valued approximation share code paths.
"""

import warnings

import numpy as np

from .errors import BadWeightsError, NotSpdError

# Smallest eigenvalue a matrix may have and still count as a valid data point.
SPD_EIG_FLOOR = 1e-12

# Relative eigenvalue floor used to repair representation-level rounding: an
# eigenvalue below lam_max * REL_EIG_FLOOR carries no information in float64
# (products with condition beyond 1/eps round it arbitrarily, possibly below
# zero), so it is clipped to that floor instead of aborting.  Genuinely
# negative spectra still raise.
REL_EIG_FLOOR = 1e-15

# Karcher mean stopping rule: tangent-update Frobenius norm, iteration cap.
KARCHER_TOL = 1e-10
KARCHER_MAX_ITER = 100


def symmetrize(m):
    """Return ``(m + m^T) / 2``; idempotent and exact on symmetric input."""
    m = np.asarray(m, dtype=float)
    return (m + np.swapaxes(m, -1, -2)) / 2


def _check_square(m, name):
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise ValueError(f"{name} must have shape (..., d, d), got {m.shape}")


def _check_symmetric(m, name="matrix"):
    _check_square(m, name)
    skew = np.abs(m - np.swapaxes(m, -1, -2)).max() if m.size else 0.0
    if skew > 1e-12 * (1.0 + np.abs(m).max(initial=0.0)):
        raise ValueError(f"{name} is not symmetric (max asymmetry {skew:.3e})")


def _assemble(vecs, eigvals):
    """Rebuild ``V diag(w) V^T`` from stacked eigenvectors and eigenvalues.

    Symmetrized so the result is exactly symmetric regardless of how the
    contraction is scheduled.
    """
    return symmetrize(np.einsum("...ik,...k,...jk->...ij", vecs, eigvals, vecs))


def sym_eig(m):
    """Eigendecomposition of a symmetric matrix, eigenvalues descending.

    Parameters
    ----------
    m : ndarray, shape (..., d, d)
        Symmetric matrix or stack of symmetric matrices.

    Returns
    -------
    eigvals : ndarray, shape (..., d)
        Eigenvalues in descending order.
    eigvecs : ndarray, shape (..., d, d)
        Orthonormal eigenvectors as columns, matching ``eigvals``.
    """
    m = np.asarray(m, dtype=float)
    _check_symmetric(m, "m")
    w, v = np.linalg.eigh(m)
    return np.ascontiguousarray(w[..., ::-1]), np.ascontiguousarray(v[..., ::-1])


def is_spd(m, floor=SPD_EIG_FLOOR):
    """True when ``m`` is symmetric with all eigenvalues above ``floor``."""
    m = np.asarray(m, dtype=float)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        return False
    skew = np.abs(m - np.swapaxes(m, -1, -2)).max() if m.size else 0.0
    if skew > 1e-12 * (1.0 + np.abs(m).max(initial=0.0)):
        return False
    return bool(np.linalg.eigvalsh(m).min() > floor)


def _spd_eig(p, name, floor=SPD_EIG_FLOOR):
    """Eigendecomposition of an SPD matrix.

    With a positive ``floor`` (data validation), any eigenvalue at or below
    the floor raises :class:`NotSpdError`.  With ``floor=None`` (internal
    pipeline values), eigenvalues more negative than rounding noise raise,
    while eigenvalues inside the noise band are clipped up to
    ``lam_max * REL_EIG_FLOOR`` so downstream logs and inverse roots stay
    finite.
    """
    p = np.asarray(p, dtype=float)
    _check_symmetric(p, name)
    w, v = np.linalg.eigh(p)
    if not w.size:
        return w, v
    if floor is not None:
        lam_min = w[..., 0].min()
        if lam_min <= floor:
            raise NotSpdError(
                f"{name} is not positive definite (min eigenvalue {lam_min:.3e})"
            )
        return w, v
    return _repair_eigvals(w, name), v


def _repair_eigvals(w, context):
    """Clip rounding-level eigenvalues of a nominally SPD spectrum."""
    lam_max = w[..., -1]
    if lam_max.size and (
        lam_max.min() <= 0.0 or (w[..., 0] < -1e-12 * lam_max).any()
    ):
        raise NotSpdError(f"{context}: matrix has genuinely negative spectrum")
    return np.maximum(w, lam_max[..., None] * REL_EIG_FLOOR)


def mat_exp_sym(v):
    """Matrix exponential of a symmetric matrix; the result is SPD."""
    v = np.asarray(v, dtype=float)
    _check_symmetric(v, "v")
    w, q = np.linalg.eigh(v)
    return _assemble(q, np.exp(w))


def mat_log_spd(p):
    """Matrix logarithm of an SPD matrix (inverse of :func:`mat_exp_sym`).

    Raises
    ------
    NotSpdError
        If any eigenvalue of ``p`` is at or below ``SPD_EIG_FLOOR``.
    """
    w, q = _spd_eig(p, "p")
    return _assemble(q, np.log(w))


def _sqrt_pair(base, name="base"):
    """Return ``(base^{1/2}, base^{-1/2})`` for a nominally SPD matrix."""
    w, v = _spd_eig(base, name, floor=None)
    s = np.sqrt(w)
    return _assemble(v, s), _assemble(v, 1.0 / s)


def _whiten_log(white, context):
    """Eigen-log of a congruence-whitened matrix.

    ``white`` is SPD in exact arithmetic; rounding-level eigenvalues are
    repaired, genuinely negative ones raise.
    """
    w, v = np.linalg.eigh(symmetrize(white))
    return _assemble(v, np.log(_repair_eigvals(w, context)))


def spd_exp(base, v):
    """Riemannian exponential map on the SPD manifold.

    Computes ``base^{1/2} expm(base^{-1/2} v base^{-1/2}) base^{1/2}`` for a
    symmetric tangent ``v`` at ``base``.  Broadcasts over leading axes.
    """
    v = np.asarray(v, dtype=float)
    _check_symmetric(v, "v")
    r, r_inv = _sqrt_pair(base)
    inner = symmetrize(r_inv @ v @ r_inv)
    w, q = np.linalg.eigh(inner)
    return symmetrize(r @ _assemble(q, np.exp(w)) @ r)


def spd_log(base, target):
    """Riemannian logarithm map on the SPD manifold (inverse of :func:`spd_exp`).

    Returns the symmetric tangent at ``base`` pointing to ``target``:
    ``base^{1/2} logm(base^{-1/2} target base^{-1/2}) base^{1/2}``.
    """
    target = np.asarray(target, dtype=float)
    _spd_eig(target, "target", floor=None)
    r, r_inv = _sqrt_pair(base)
    inner = _whiten_log(r_inv @ target @ r_inv, "spd_log")
    return symmetrize(r @ inner @ r)


def spd_dist(a, b):
    """Affine-invariant geodesic distance between SPD matrices.

    ``rho(a, b) = sqrt(sum_k log^2 lambda_k)`` where ``lambda_k`` are the
    eigenvalues of ``a^{-1/2} b a^{-1/2}``.  Symmetric in its arguments and
    invariant under congruence ``(a, b) -> (G a G^T, G b G^T)``.
    """
    b = np.asarray(b, dtype=float)
    _spd_eig(b, "b", floor=None)
    _, r_inv = _sqrt_pair(a, "a")
    white = symmetrize(r_inv @ b @ r_inv)
    w = _repair_eigvals(np.linalg.eigvalsh(white), "spd_dist")
    return np.sqrt((np.log(w) ** 2).sum(axis=-1))


def validate_weights(weights, count, tol=1e-9):
    """Check nonnegativity and normalization; return weights as a float array.

    Weights must be nonnegative and sum to 1 within ``tol`` (they are then
    renormalized exactly).  ``None`` means uniform weights.
    """
    if weights is None:
        return np.full(count, 1.0 / count)
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (count,):
        raise BadWeightsError(f"expected {count} weights, got shape {weights.shape}")
    if (weights < 0).any():
        raise BadWeightsError("weights must be nonnegative")
    total = weights.sum()
    if total <= 0:
        raise BadWeightsError("weights sum to zero")
    if abs(total - 1.0) > tol:
        raise BadWeightsError(f"weights sum to {total!r}, expected 1 within {tol}")
    return weights / total


# Sectional curvature of the affine-invariant SPD metric lies in [-1/2, 0];
# the Hessian of the squared-distance objective along a unit geodesic at
# distance rho is then bounded by h*coth(h) with h = rho/sqrt(2).  The damped
# step 2/(1 + H) below keeps the fixed-point iteration contractive for any
# point spread (the undamped unit step is expansive once tangents grow past
# the curvature scale).
_CURVATURE_SCALE = np.sqrt(0.5)


def _coth_gain(h):
    """``h * coth(h)`` evaluated stably near zero."""
    h = np.asarray(h, dtype=float)
    small = h < 1e-4
    safe = np.where(small, 1.0, h)
    return np.where(small, 1.0 + h * h / 3.0, safe / np.tanh(safe))


def karcher_mean(points, weights=None, tol=KARCHER_TOL, max_iter=KARCHER_MAX_ITER):
    """Weighted Karcher mean of SPD matrices.

    Seeks the fixed point of ``mu <- spd_exp(mu, sum_i w_i spd_log(mu, p_i))``,
    returning once the tangent update has Frobenius norm at most ``tol`` or
    after ``max_iter`` iterations.  Iteration starts from the weighted
    log-Euclidean mean and applies a curvature-damped step so the map stays
    contractive for widely spread points; on a Hadamard manifold the fixed
    point is the unique minimizer of the weighted squared geodesic distances.

    Parameters
    ----------
    points : ndarray, shape (k, d, d)
        SPD matrices to average.
    weights : ndarray, shape (k,), optional
        Nonnegative weights summing to 1 (within 1e-9); uniform if omitted.

    Returns
    -------
    ndarray, shape (d, d)
        The weighted Karcher mean.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 3:
        raise ValueError(f"points must have shape (k, d, d), got {points.shape}")
    if points.shape[0] == 0:
        raise ValueError("karcher_mean needs at least one point")
    weights = validate_weights(weights, points.shape[0])

    w0, v0 = _spd_eig(points, "points", floor=None)
    mu = mat_exp_sym(np.einsum("k,kij->ij", weights, _assemble(v0, np.log(w0))))
    residual = np.inf
    for _ in range(max_iter):
        tangent = np.einsum("k,kij->ij", weights, spd_log(mu, points))
        residual = float(np.linalg.norm(tangent))
        if residual <= tol:
            return mu
        # The weighted objective is 2-strongly convex with smoothness
        # 2 * sum_i w_i gain_i, so this step keeps the map contractive.
        rho = spd_dist(mu, points)
        gain = float(weights @ _coth_gain(_CURVATURE_SCALE * rho))
        mu = spd_exp(mu, (2.0 / (1.0 + gain)) * tangent)
    warnings.warn(
        "Karcher mean did not reach tolerance within the iteration cap",
        stacklevel=2,
    )
    return mu


def karcher_mean_batch(
    points, weights, tol=KARCHER_TOL, max_iter=KARCHER_MAX_ITER
):
    """Karcher means for many weight vectors over shared or per-row points.

    Runs the same fixed-point iteration as :func:`karcher_mean` for every row
    in lockstep; converged rows are frozen, so each row follows exactly the
    iteration it would follow alone.  Zero-weight points contribute nothing
    and are skipped.

    Parameters
    ----------
    points : ndarray, shape (k, d, d) or (q, k, d, d)
        Candidate SPD matrices, shared across rows or given per row.
    weights : ndarray, shape (q, k)
        One weight vector per row, each nonnegative and summing to 1.

    Returns
    -------
    ndarray, shape (q, d, d)
    """
    points = np.asarray(points, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if weights.ndim != 2:
        raise ValueError(f"weights must have shape (q, k), got {weights.shape}")
    q_rows, k = weights.shape
    if q_rows == 0 or k == 0:
        raise ValueError("karcher_mean_batch needs at least one row and one point")
    shared = points.ndim == 3
    if shared and points.shape[0] != k:
        raise ValueError("points and weights disagree on k")
    if not shared and points.shape[:2] != (q_rows, k):
        raise ValueError("points and weights disagree on (q, k)")
    if (weights < 0).any():
        raise BadWeightsError("weights must be nonnegative")
    totals = weights.sum(axis=1)
    if (totals <= 0).any():
        raise BadWeightsError("every weight row must have positive sum")
    if np.abs(totals - 1.0).max() > 1e-9:
        raise BadWeightsError("every weight row must sum to 1 within 1e-9")
    weights = weights / totals[:, None]

    d = points.shape[-1]
    w0, v0 = _spd_eig(points, "points", floor=None)
    logs = _assemble(v0, np.log(w0))
    if shared:
        mu = mat_exp_sym(np.einsum("qk,kij->qij", weights, logs))
    else:
        mu = mat_exp_sym(np.einsum("qk,qkij->qij", weights, logs))

    active = np.arange(q_rows)
    residual = np.zeros(q_rows)
    for _ in range(max_iter):
        w_act = weights[active]
        rows, cols = np.nonzero(w_act > 0)
        w_pairs = w_act[rows, cols]

        w_mu, v_mu = np.linalg.eigh(mu[active])
        w_mu = _repair_eigvals(w_mu, "karcher_mean_batch")
        s = np.sqrt(w_mu)
        r = _assemble(v_mu, s)
        r_inv = _assemble(v_mu, 1.0 / s)

        if shared:
            p_pairs = points[cols]
        else:
            p_pairs = points[active[rows], cols]
        r_inv_pairs = r_inv[rows]
        log_pairs = _whiten_log(
            r_inv_pairs @ p_pairs @ r_inv_pairs, "karcher_mean_batch"
        )

        # Segment reductions per active row; rows is sorted, so reduceat
        # boundaries are the first occurrence of each row index.
        boundaries = np.searchsorted(rows, np.arange(active.size))
        mean_log = np.zeros((active.size, d, d))
        flat = (w_pairs[:, None, None] * log_pairs).reshape(rows.size, d * d)
        mean_log.reshape(active.size, d * d)[:] = np.add.reduceat(
            flat, boundaries, axis=0
        )

        step = symmetrize(r @ mean_log @ r)
        res_act = np.linalg.norm(step.reshape(active.size, -1), axis=1)
        residual[active] = res_act

        moving = res_act > tol
        if moving.any():
            idx = active[moving]
            # Whitened log norms are the geodesic distances to the points.
            rho_pairs = np.linalg.norm(log_pairs.reshape(rows.size, -1), axis=1)
            gains = np.add.reduceat(
                w_pairs * _coth_gain(_CURVATURE_SCALE * rho_pairs), boundaries
            )
            alpha = 2.0 / (1.0 + gains[moving])
            w_s, v_s = np.linalg.eigh(
                symmetrize(alpha[:, None, None] * mean_log[moving])
            )
            stepped = r[moving] @ _assemble(v_s, np.exp(w_s)) @ r[moving]
            mu[idx] = symmetrize(stepped)
        active = active[moving]
        if active.size == 0:
            break
    if active.size:
        warnings.warn(
            "Karcher mean did not reach tolerance within the iteration cap",
            stacklevel=2,
        )
    return mu


class ScalarLine:
    """The real line as a value space: ordinary arithmetic."""

    def dist(self, a, b):
        return np.abs(np.asarray(b, dtype=float) - np.asarray(a, dtype=float))

    def log_at(self, base, target):
        return np.asarray(target, dtype=float) - np.asarray(base, dtype=float)

    def exp_at(self, base, v):
        return np.asarray(base, dtype=float) + np.asarray(v, dtype=float)

    def weighted_mean(self, values, weights=None):
        values = np.asarray(values, dtype=float)
        weights = validate_weights(weights, values.shape[0])
        return float(weights @ values)


class SpdManifold:
    """SPD matrices with the affine-invariant metric as a value space."""

    def dist(self, a, b):
        return spd_dist(a, b)

    def log_at(self, base, target):
        return spd_log(base, target)

    def exp_at(self, base, v):
        return spd_exp(base, v)

    def weighted_mean(self, values, weights=None):
        return karcher_mean(values, weights)


scalar_line = ScalarLine()
spd_manifold = SpdManifold()
