"""Single-scale quasi-interpolation operators over scattered data.

Three operators share the kernel-weight machinery:

* scalar Shepard: the kernel-weighted average ``sum_i f_i K(r_i) / sum_i K(r_i)``
  with ``r_i = ||x_i - s|| / delta``,
* manifold Shepard: the Karcher mean of SPD samples under the normalized
  Shepard weights,
* linear moving least squares (MLS): the value at ``s`` of the degree-<=1
  polynomial minimizing the kernel-weighted squared residuals, solved through
  the 3x3 normal equations in the shifted basis ``{1, x - s_x, y - s_y}``.

Wherever the kernel support at a query contains no site (possible with the
compactly supported Wendland kernel on coarse subsets), the operators fall
back to the value at the nearest data site, keeping every evaluation total.
"""

from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .errors import EmptyDatasetError
from .geometry import ScalarLine, SpdManifold, scalar_line
from .kernels import KernelSpec, kernel_eval

# Normal matrices with a condition estimate beyond this are treated as rank
# deficient and the MLS falls back to the Shepard-weighted mean.
MLS_COND_LIMIT = 1e12
MLS_RIDGE = 1e-12

SHEPARD = "shepard"
MLS = "mls"


@dataclass
class ScatteredDataset:
    """Data sites paired with codomain samples (scalars or SPD matrices).

    ``sites`` has shape (n, d); ``values`` has shape (n,) for the scalar line
    or (n, m, m) for the SPD manifold.  The intended domain is the unit cube,
    although the operators themselves only ever use pairwise distances.
    """

    sites: np.ndarray
    values: np.ndarray
    space: object = field(default=scalar_line)

    def __post_init__(self):
        self.sites = np.atleast_2d(np.asarray(self.sites, dtype=float))
        self.values = np.asarray(self.values, dtype=float)
        if self.sites.shape[0] == 0:
            raise EmptyDatasetError("dataset needs at least one site")
        if self.values.shape[0] != self.sites.shape[0]:
            raise ValueError(
                f"{self.sites.shape[0]} sites but {self.values.shape[0]} values"
            )
        if isinstance(self.space, SpdManifold):
            if self.values.ndim != 3:
                raise ValueError("SPD values must have shape (n, m, m)")
            geometry._spd_eig(self.values, "values")
        elif self.values.ndim != 1:
            raise ValueError("scalar values must have shape (n,)")

    @property
    def n_sites(self):
        return self.sites.shape[0]

    def subset(self, indices):
        return ScatteredDataset(self.sites[indices], self.values[indices], self.space)


def _as_queries(queries, dim):
    queries = np.asarray(queries, dtype=float)
    single = queries.ndim == 1
    queries = np.atleast_2d(queries)
    if queries.shape[1] != dim:
        raise ValueError(f"query dimension {queries.shape[1]} != site dimension {dim}")
    return queries, single


def _weights(sites, kernel, queries):
    """Kernel weights and distances for each (query, site) pair."""
    diff = queries[:, None, :] - sites[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=-1))
    return kernel_eval(kernel, dist / kernel.delta), dist


def shepard_eval(data, kernel, queries):
    """Shepard approximation of a scalar dataset at one or many query points."""
    if not isinstance(data.space, ScalarLine):
        raise ValueError("shepard_eval expects a scalar-valued dataset")
    queries, single = _as_queries(queries, data.sites.shape[1])
    w, dist = _weights(data.sites, kernel, queries)
    total = w.sum(axis=1)
    covered = total > 0
    out = np.empty(queries.shape[0])
    out[covered] = (w[covered] @ data.values) / total[covered]
    if not covered.all():
        nearest = np.argmin(dist[~covered], axis=1)
        out[~covered] = data.values[nearest]
    return float(out[0]) if single else out


def shepard_eval_manifold(data, kernel, queries):
    """Karcher mean of SPD samples under normalized Shepard weights."""
    if not isinstance(data.space, SpdManifold):
        raise ValueError("shepard_eval_manifold expects an SPD-valued dataset")
    queries, single = _as_queries(queries, data.sites.shape[1])
    w, dist = _weights(data.sites, kernel, queries)
    total = w.sum(axis=1)
    covered = total > 0
    out = np.empty((queries.shape[0],) + data.values.shape[1:])
    if covered.any():
        out[covered] = geometry.karcher_mean_batch(
            data.values, w[covered] / total[covered, None]
        )
    if not covered.all():
        nearest = np.argmin(dist[~covered], axis=1)
        out[~covered] = data.values[nearest]
    return out[0] if single else out


def shepard_eval_entrywise(sites, matrices, kernel, queries):
    """Entrywise scalar Shepard on matrix-valued samples (tangent fields)."""
    sites = np.atleast_2d(np.asarray(sites, dtype=float))
    matrices = np.asarray(matrices, dtype=float)
    queries, single = _as_queries(queries, sites.shape[1])
    w, dist = _weights(sites, kernel, queries)
    total = w.sum(axis=1)
    covered = total > 0
    out = np.empty((queries.shape[0],) + matrices.shape[1:])
    out[covered] = (
        np.einsum("qn,nij->qij", w[covered], matrices) / total[covered, None, None]
    )
    if not covered.all():
        nearest = np.argmin(dist[~covered], axis=1)
        out[~covered] = matrices[nearest]
    return out[0] if single else out


def mls_eval(data, kernel, queries):
    """Linear moving least squares on a scalar 2-d dataset.

    Solves the kernel-weighted normal equations in the query-shifted basis
    ``{1, x - s_x, y - s_y}`` (so the constant coefficient is the value at
    the query).  Weights are normalized to a partition of unity before
    forming the normal matrix, which keeps its scale O(1); a ridge of
    ``MLS_RIDGE`` is added and queries whose regularized normal matrix still
    has a condition estimate above ``MLS_COND_LIMIT`` (fewer than three
    sites, collinear sites) fall back to the Shepard-weighted mean.
    """
    if not isinstance(data.space, ScalarLine):
        raise ValueError("mls_eval expects a scalar-valued dataset")
    if data.sites.shape[1] != 2:
        raise ValueError("mls_eval is implemented for 2-d sites")
    queries, single = _as_queries(queries, 2)
    w, dist = _weights(data.sites, kernel, queries)
    total = w.sum(axis=1)
    covered = total > 0
    out = np.empty(queries.shape[0])

    if covered.any():
        wn = w[covered] / total[covered, None]
        diff = data.sites[None, :, :] - queries[covered, None, :]
        basis = np.concatenate([np.ones(diff.shape[:2] + (1,)), diff], axis=2)
        normal = np.einsum("qni,qn,qnj->qij", basis, wn, basis)
        normal += MLS_RIDGE * np.eye(3)
        rhs = np.einsum("qni,qn,n->qi", basis, wn, data.values)
        coeff = np.linalg.solve(normal, rhs[..., None])[..., 0]
        value = coeff[:, 0]
        degenerate = (np.linalg.cond(normal) > MLS_COND_LIMIT) | ~np.isfinite(value)
        if degenerate.any():
            value[degenerate] = wn[degenerate] @ data.values
        out[covered] = value
    if not covered.all():
        nearest = np.argmin(dist[~covered], axis=1)
        out[~covered] = data.values[nearest]
    return float(out[0]) if single else out


@dataclass
class Approximant:
    """A single-scale operator bound to a dataset and kernel.

    ``method`` is ``"shepard"`` or ``"mls"``; SPD-valued datasets use the
    manifold Shepard operator.  Immutable after construction; evaluation is
    pure, so instances may be shared across workers.
    """

    data: ScatteredDataset
    kernel: KernelSpec
    method: str = SHEPARD

    def __post_init__(self):
        if self.method not in (SHEPARD, MLS):
            raise ValueError(f"unknown method {self.method!r}")
        if self.method == MLS and isinstance(self.data.space, SpdManifold):
            raise ValueError("MLS is only defined for scalar-valued data")

    def evaluate(self, queries):
        if isinstance(self.data.space, SpdManifold):
            return shepard_eval_manifold(self.data, self.kernel, queries)
        if self.method == MLS:
            return mls_eval(self.data, self.kernel, queries)
        return shepard_eval(self.data, self.kernel, queries)
