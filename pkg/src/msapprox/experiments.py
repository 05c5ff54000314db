"""Target functions, noise models, and the Monte-Carlo experiment driver.

Three experiments compare a single-scale quasi-interpolation operator against
its multiscale version on the unit square:

* ``mls-size``: linear MLS with a Gaussian kernel on the smooth, noiseless
  target ``exp(x^2 + y^2) + 3``, swept over dataset sizes.
* ``shepard-snr``: Shepard with a Wendland kernel on the wave target
  ``sin(2 pi x) cos(4 pi y) (1 + nu p)`` with multiplicative Gaussian noise,
  196 sites, swept over the signal-to-noise ratio ``SNR = 1 / p^2``.
* ``spd-snr``: manifold Shepard on an SPD-valued target built by exponentiating
  a symmetric design matrix contaminated in the tangent space, 121 sites,
  same SNR sweep (the sweep value fixes ``p = 1 / sqrt(SNR)``; the
  Frobenius-ratio SNR of the SPD model is estimated separately by
  :func:`snr_numeric_spd`).

Every trial redraws sites, noise, and the hierarchy from streams derived from
``(seed, sweep index, trial index, purpose)``, so results are independent of
scheduling and worker count, and the single-scale and multiscale fits inside
one trial consume identical data.
"""

import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    ScalarLine,
    mat_exp_sym,
    scalar_line,
    spd_manifold,
    symmetrize,
)
from .kernels import GAUSSIAN, WENDLAND, scaled_fill_distance_rule
from .multiscale import (
    HierarchySpec,
    build_hierarchy,
    fit_multiscale_manifold,
    fit_multiscale_scalar,
)
from .operators import MLS, SHEPARD, Approximant, ScatteredDataset
from .stats import TrialEvaluations, summarize, trial_metrics

MLS_SIZE = "mls-size"
SHEPARD_SNR = "shepard-snr"
SPD_SNR = "spd-snr"
EXPERIMENTS = (MLS_SIZE, SHEPARD_SNR, SPD_SNR)

DEFAULT_SWEEPS = {
    MLS_SIZE: (100.0, 200.0, 400.0, 800.0),
    SHEPARD_SNR: (0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0),
    SPD_SNR: (0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0),
}

_SETUP = {
    MLS_SIZE: dict(param="size", family=GAUSSIAN, method=MLS, manifold=False, count=0),
    SHEPARD_SNR: dict(
        param="snr", family=WENDLAND, method=SHEPARD, manifold=False, count=196
    ),
    SPD_SNR: dict(
        param="snr", family=WENDLAND, method=SHEPARD, manifold=True, count=121
    ),
}

# Purpose tags for derived RNG streams.
_TAG_SITES = 0
_TAG_NOISE = 1
_TAG_HIERARCHY = 2


@dataclass(frozen=True)
class NoiseSpec:
    """Noise scale ``p``; the scalar model has ``SNR = 1 / p^2``."""

    p: float

    def __post_init__(self):
        if self.p < 0:
            raise ValueError(f"noise scale must be >= 0, got {self.p!r}")

    @classmethod
    def from_snr(cls, snr):
        if snr <= 0:
            raise ValueError(f"SNR must be positive, got {snr!r}")
        return cls(1.0 / np.sqrt(snr))


def target_smooth(x, y):
    """Smooth scalar target ``exp(x^2 + y^2) + 3``; used without noise."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.exp(x * x + y * y) + 3.0


def target_wave(x, y, noise_draw, p):
    """Wave target ``sin(2 pi x) cos(4 pi y) (1 + nu p)``.

    ``noise_draw`` is a standard-normal draw per evaluation; the noiseless
    truth uses ``noise_draw = 0``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    clean = np.sin(2 * np.pi * x) * np.cos(4 * np.pi * y)
    return clean * (1.0 + np.asarray(noise_draw, dtype=float) * p)


def spd_design(x, y):
    """Symmetric 3x3 design matrix field of the SPD target.

    ``A(x, y) = [[sin(2 pi y) cos(2 pi x), y^2, x y],
                 [y^2,                     1,   0  ],
                 [x y,                     0,   cos(pi x)]]``
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    shape = np.broadcast_shapes(x.shape, y.shape)
    x = np.broadcast_to(x, shape)
    y = np.broadcast_to(y, shape)
    a = np.zeros(shape + (3, 3))
    a[..., 0, 0] = np.sin(2 * np.pi * y) * np.cos(2 * np.pi * x)
    a[..., 0, 1] = a[..., 1, 0] = y * y
    a[..., 0, 2] = a[..., 2, 0] = x * y
    a[..., 1, 1] = 1.0
    a[..., 2, 2] = np.cos(np.pi * x)
    return a


def sym_from_upper(entries, dim=3):
    """Build symmetric matrices from upper-triangle entries (row-major)."""
    entries = np.asarray(entries, dtype=float)
    n_upper = dim * (dim + 1) // 2
    if entries.shape[-1] != n_upper:
        raise ValueError(f"expected {n_upper} entries for dim {dim}")
    out = np.zeros(entries.shape[:-1] + (dim, dim))
    rows, cols = np.triu_indices(dim)
    out[..., rows, cols] = entries
    out[..., cols, rows] = entries
    return out


def target_spd(x, y, sigma_draw, p):
    """SPD target: exponentiate the design matrix contaminated in the tangent.

    Computes ``B = A(x, y) (I + p Sigma)`` with a symmetric standard-normal
    ``Sigma`` per sample; ``B`` is generally not symmetric, so it is
    symmetrized before applying the matrix exponential.  The noiseless truth
    uses ``p = 0`` (then ``B = A`` is already symmetric).
    """
    a = spd_design(x, y)
    sigma = np.asarray(sigma_draw, dtype=float)
    b = a @ (np.eye(3) + p * sigma)
    return mat_exp_sym(symmetrize(b))


def sample_sites(count, rng):
    """Draw ``count`` i.i.d. uniform sites on the unit square."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    return rng.random((count, 2))


def snr_numeric_spd(p, rng, grid_n=50, draws=1000, design=None, dim=3):
    """Monte-Carlo mean of the Frobenius SNR ratio of the SPD model.

    Averages ``||A||_F^2 / ||A Sigma||_F^2`` over a ``grid_n x grid_n``
    uniform grid on the unit square and ``draws`` fresh symmetric
    standard-normal ``Sigma``.  The ratio itself does not involve ``p``; the
    effective noise level of the SPD target enters through ``p`` separately,
    so callers should report both.
    """
    if not p > 0:
        raise ValueError(f"p must be positive, got {p!r}")
    design = spd_design if design is None else design
    axis = np.linspace(0.0, 1.0, grid_n)
    gx, gy = np.meshgrid(axis, axis, indexing="ij")
    a = design(gx.ravel(), gy.ravel())
    a_norm2 = (a * a).sum(axis=(-2, -1))
    n_upper = dim * (dim + 1) // 2
    total = 0.0
    for _ in range(draws):
        sigma = sym_from_upper(rng.standard_normal(n_upper), dim)
        noise = a @ sigma
        total += float((a_norm2 / (noise * noise).sum(axis=(-2, -1))).mean())
    return total / draws


def eval_grid(n, low=0.05, high=0.95):
    """Uniform n x n evaluation grid, inset from the boundary."""
    axis = np.linspace(low, high, n)
    gx, gy = np.meshgrid(axis, axis, indexing="ij")
    return np.stack([gx.ravel(), gy.ravel()], axis=1)


@dataclass(frozen=True)
class ExperimentConfig:
    """Configuration of one experiment run; defaults follow the experiments'
    standard setup (100 trials, 3 levels, growth 0.8)."""

    experiment: str
    trials: int = 100
    levels: int = 3
    growth: float = 0.8
    seed: int = 42
    sweep: tuple = None
    grid_n: int = 21
    workers: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.trials < 2:
            raise ValueError(f"trials must be >= 2, got {self.trials}")
        if self.levels < 1:
            raise ValueError(f"levels must be >= 1, got {self.levels}")
        if not 0 < self.growth <= 1:
            raise ValueError(f"growth must be in (0, 1], got {self.growth!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a nonnegative 64-bit integer")
        if self.grid_n < 2:
            raise ValueError(f"grid_n must be >= 2, got {self.grid_n}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        sweep = self.sweep if self.sweep is not None else DEFAULT_SWEEPS[self.experiment]
        sweep = tuple(float(v) for v in sweep)
        if len(sweep) == 0:
            raise ValueError("sweep must not be empty")
        if self.experiment == MLS_SIZE:
            if any(v < 1 or v != int(v) for v in sweep):
                raise ValueError("mls-size sweep values must be positive integers")
        elif any(v <= 0 for v in sweep):
            raise ValueError("SNR sweep values must be positive")
        object.__setattr__(self, "sweep", sweep)

    @property
    def param_name(self):
        return _SETUP[self.experiment]["param"]

    @property
    def space(self):
        return spd_manifold if _SETUP[self.experiment]["manifold"] else scalar_line


@dataclass
class SweepEntry:
    """Per-point metrics and their percentile summaries for one
    (sweep value, method) cell."""

    param_value: float
    method: str
    metrics: list
    summaries: dict


@dataclass
class MetricsTable:
    """All metric cells of one experiment run."""

    experiment: str
    param_name: str
    entries: list = field(default_factory=list)

    def entry(self, param_value, method):
        for e in self.entries:
            if e.param_value == param_value and e.method == method:
                return e
        raise KeyError((param_value, method))

    def summary_rows(self):
        """Flat (experiment, method, param_name, param_value, metric, p25, p50, p75)
        rows for the MSE and bias-ratio metrics, in deterministic order."""
        rows = []
        for e in self.entries:
            for metric in ("mse", "bias_ratio"):
                s = e.summaries[metric]
                rows.append(
                    (
                        self.experiment,
                        e.method,
                        self.param_name,
                        e.param_value,
                        metric,
                        s.p25,
                        s.p50,
                        s.p75,
                    )
                )
        rows.sort(key=lambda r: (r[0], r[3], r[1], r[4]))
        return rows


def _streams(cfg, sweep_index, trial_index):
    def stream(tag):
        return np.random.default_rng(
            np.random.SeedSequence([cfg.seed, sweep_index, trial_index, tag])
        )

    return stream(_TAG_SITES), stream(_TAG_NOISE), stream(_TAG_HIERARCHY)


def _draw_dataset(cfg, sweep_index, trial_index):
    setup = _SETUP[cfg.experiment]
    value = cfg.sweep[sweep_index]
    rng_sites, rng_noise, rng_hier = _streams(cfg, sweep_index, trial_index)
    count = int(value) if cfg.experiment == MLS_SIZE else setup["count"]
    sites = sample_sites(count, rng_sites)
    if cfg.experiment == MLS_SIZE:
        values = target_smooth(sites[:, 0], sites[:, 1])
    elif cfg.experiment == SHEPARD_SNR:
        p = NoiseSpec.from_snr(value).p
        nu = rng_noise.standard_normal(count)
        values = target_wave(sites[:, 0], sites[:, 1], nu, p)
    else:
        p = NoiseSpec.from_snr(value).p
        sigma = sym_from_upper(rng_noise.standard_normal((count, 6)))
        values = target_spd(sites[:, 0], sites[:, 1], sigma, p)
    data = ScatteredDataset(sites, values, cfg.space)
    hierarchy = build_hierarchy(
        count, HierarchySpec(cfg.levels, cfg.growth), rng_hier
    )
    return data, hierarchy


def _run_trial(cfg, sweep_index, trial_index):
    """One trial: same dataset feeds the single-scale and multiscale fits."""
    setup = _SETUP[cfg.experiment]
    data, hierarchy = _draw_dataset(cfg, sweep_index, trial_index)
    rule = scaled_fill_distance_rule(setup["family"])
    grid = eval_grid(cfg.grid_n)

    single = Approximant(data, rule(data.sites), setup["method"]).evaluate(grid)
    if setup["manifold"]:
        fitted = fit_multiscale_manifold(data, hierarchy, rule)
    else:
        fitted = fit_multiscale_scalar(data, hierarchy, rule, setup["method"])
    multi = fitted.evaluate(grid)
    return single, multi


def _run_trial_star(args):
    return _run_trial(*args)


def truth_values(cfg, grid):
    """Noiseless target on the evaluation grid."""
    x, y = grid[:, 0], grid[:, 1]
    if cfg.experiment == MLS_SIZE:
        return target_smooth(x, y)
    if cfg.experiment == SHEPARD_SNR:
        return target_wave(x, y, 0.0, 0.0)
    return target_spd(x, y, np.zeros((grid.shape[0], 3, 3)), 0.0)


def run_experiment(cfg, progress=False):
    """Run all sweep values and trials of one experiment.

    For each sweep value every trial draws a dataset, fits single-scale and
    multiscale approximants on it, and evaluates both on the grid; per-point
    metrics and percentile summaries are then computed over the trials.
    Deterministic for a fixed config, independent of ``workers``.
    """
    grid = eval_grid(cfg.grid_n)
    truth = truth_values(cfg, grid)
    table = MetricsTable(cfg.experiment, cfg.param_name)
    for sweep_index, value in enumerate(cfg.sweep):
        jobs = [(cfg, sweep_index, trial) for trial in range(cfg.trials)]
        if cfg.workers > 1:
            chunk = max(1, cfg.trials // (4 * cfg.workers))
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                results = list(pool.map(_run_trial_star, jobs, chunksize=chunk))
        else:
            results = [_run_trial(*job) for job in jobs]
        for method, stack in (
            ("single", np.stack([r[0] for r in results])),
            ("multi", np.stack([r[1] for r in results])),
        ):
            trials = TrialEvaluations(grid, stack, truth, cfg.space)
            metrics = trial_metrics(trials)
            table.entries.append(
                SweepEntry(value, method, metrics, summarize(metrics))
            )
        if progress:
            print(
                f"[{cfg.experiment}] {cfg.param_name}={value:g} done "
                f"({cfg.trials} trials)",
                file=sys.stderr,
                flush=True,
            )
    return table
