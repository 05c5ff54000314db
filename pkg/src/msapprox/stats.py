"""Monte-Carlo estimation of MSE, bias, variance, and the bias ratio.

Per evaluation point, over ``T`` trial approximations ``v_1..v_T`` of a
noiseless target value ``t``:

    mse      = mean_j dist(t, v_j)^2
    bias     = dist(mean(v), t)^2
    variance = mean_j dist(mean(v), v_j)^2
    bias_ratio = bias / mse        (0 when mse == 0)

``dist`` and ``mean`` come from the value space: absolute difference and the
arithmetic mean on the scalar line, geodesic distance and the Karcher mean on
the SPD manifold.  On the scalar line the decomposition
``mse = bias + variance`` is an algebraic identity, so the bias ratio lies in
[0, 1]; on a Hadamard manifold the Karcher-mean variance inequality gives
``bias + variance <= mse``, so the ratio still cannot exceed 1 beyond solver
tolerance.  Point metrics are summarized across evaluation points through
their 25th/50th/75th percentiles.
"""

from dataclasses import dataclass

import numpy as np

from . import geometry
from .geometry import ScalarLine

METRIC_NAMES = ("mse", "bias", "variance", "bias_ratio")


@dataclass
class TrialEvaluations:
    """Approximations from repeated trials on a fixed evaluation grid.

    ``per_trial_values`` has shape (trials, points) for scalar values or
    (trials, points, m, m) for SPD values; ``truth`` holds the noiseless
    target per point.
    """

    eval_points: np.ndarray
    per_trial_values: np.ndarray
    truth: np.ndarray
    space: object

    def __post_init__(self):
        self.eval_points = np.atleast_2d(np.asarray(self.eval_points, dtype=float))
        self.per_trial_values = np.asarray(self.per_trial_values, dtype=float)
        self.truth = np.asarray(self.truth, dtype=float)
        n_points = self.eval_points.shape[0]
        if self.per_trial_values.shape[1:2] != (n_points,):
            raise ValueError("per_trial_values must be rectangular (trials, points, ...)")
        if self.truth.shape[0] != n_points:
            raise ValueError("truth must hold one value per evaluation point")

    @property
    def n_trials(self):
        return self.per_trial_values.shape[0]

    @property
    def n_points(self):
        return self.eval_points.shape[0]


@dataclass
class PointMetrics:
    """MSE/bias/variance (squared codomain units) and the dimensionless ratio."""

    mse: float
    bias: float
    variance: float
    bias_ratio: float


@dataclass(frozen=True)
class PercentileSummary:
    """25th/50th/75th percentiles of one metric across evaluation points."""

    p25: float
    p50: float
    p75: float

    def __post_init__(self):
        if not self.p25 <= self.p50 <= self.p75:
            raise ValueError(f"percentiles out of order: {self}")


def mean_estimate(values, space):
    """Trial-average estimate of the expected value in the given space.

    Arithmetic mean on the scalar line; uniform-weight Karcher mean on the
    SPD manifold.
    """
    values = np.asarray(values, dtype=float)
    if values.shape[0] == 0:
        raise ValueError("mean_estimate needs at least one value")
    return space.weighted_mean(values, np.full(values.shape[0], 1.0 / values.shape[0]))


def _metrics_from(mse, bias, variance):
    ratio = bias / mse if mse > 0 else 0.0
    return PointMetrics(float(mse), float(bias), float(variance), float(ratio))


def point_metrics(trials, point_index):
    """Monte-Carlo metrics at one evaluation point (reference route)."""
    if trials.n_trials < 2:
        raise ValueError("point metrics need at least 2 trials")
    values = trials.per_trial_values[:, point_index]
    truth = trials.truth[point_index]
    center = mean_estimate(values, trials.space)
    mse = float(np.mean(trials.space.dist(truth, values) ** 2))
    bias = float(trials.space.dist(center, truth) ** 2)
    variance = float(np.mean(trials.space.dist(center, values) ** 2))
    return _metrics_from(mse, bias, variance)


def trial_metrics(trials):
    """Monte-Carlo metrics at every evaluation point, vectorized.

    Equivalent to ``[point_metrics(trials, k) for k in range(n_points)]`` up
    to rounding; the manifold case batches the per-point Karcher means.
    """
    if trials.n_trials < 2:
        raise ValueError("point metrics need at least 2 trials")
    v = trials.per_trial_values
    t = trials.truth
    if isinstance(trials.space, ScalarLine):
        center = v.mean(axis=0)
        mse = ((v - t[None, :]) ** 2).mean(axis=0)
        bias = (center - t) ** 2
        variance = ((v - center[None, :]) ** 2).mean(axis=0)
    else:
        by_point = np.swapaxes(v, 0, 1)  # (points, trials, m, m)
        uniform = np.full((trials.n_points, trials.n_trials), 1.0 / trials.n_trials)
        center = geometry.karcher_mean_batch(by_point, uniform)
        mse = (geometry.spd_dist(t[:, None], by_point) ** 2).mean(axis=1)
        bias = geometry.spd_dist(center, t) ** 2
        variance = (geometry.spd_dist(center[:, None], by_point) ** 2).mean(axis=1)
    return [_metrics_from(m, b, s) for m, b, s in zip(mse, bias, variance)]


def summarize(metrics):
    """Percentile summaries (linear interpolation) for every metric name."""
    if len(metrics) == 0:
        raise ValueError("summarize needs at least one point")
    out = {}
    for name in METRIC_NAMES:
        data = np.array([getattr(pm, name) for pm in metrics])
        p25, p50, p75 = np.percentile(data, [25.0, 50.0, 75.0])
        out[name] = PercentileSummary(float(p25), float(p50), float(p75))
    return out
