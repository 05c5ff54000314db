"""Nested hierarchies and the iterative multiscale error-correction scheme.

A hierarchy is a nested chain of index subsets, the last one covering the
whole dataset.  Fitting proceeds coarse to fine: level 1 approximates the
data on the coarsest subset; every later level approximates the residual
left by the levels before it, sampled on its own subset, and the residuals
are maintained at every data site because finer subsets contain new sites.
Evaluating the fitted approximant sums the per-level corrections (scalar
case) or composes them through the manifold exponential map (SPD case,
where residuals are logarithm-map tangents at the running approximation and
tangents are interpolated entrywise in the ambient space of symmetric
matrices).
"""

from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .geometry import ScalarLine, scalar_line, spd_manifold
from .kernels import KernelSpec
from .operators import SHEPARD, Approximant, ScatteredDataset, shepard_eval_entrywise


@dataclass(frozen=True)
class HierarchySpec:
    """Number of levels and the per-level size ratio in (0, 1]."""

    levels: int
    growth: float

    def __post_init__(self):
        if self.levels < 1:
            raise ValueError(f"levels must be >= 1, got {self.levels}")
        if not 0 < self.growth <= 1:
            raise ValueError(f"growth must be in (0, 1], got {self.growth!r}")


@dataclass
class Hierarchy:
    """Nested index subsets, coarsest first; the last covers all indices."""

    subsets: list

    def __post_init__(self):
        self.subsets = [np.asarray(s, dtype=np.intp) for s in self.subsets]

    @property
    def levels(self):
        return len(self.subsets)

    @property
    def sizes(self):
        return tuple(s.size for s in self.subsets)


def build_hierarchy(dataset_size, spec, rng):
    """Draw a nested hierarchy of index subsets for a dataset.

    The finest subset is all ``dataset_size`` indices; each coarser one is a
    uniform random subset of the previous, of size ``round(growth * size)``
    floored at 1 (ties round half to even).  Deterministic for a fixed
    generator state.
    """
    if dataset_size < 1:
        raise ValueError("dataset_size must be >= 1")
    sizes = [dataset_size]
    for _ in range(spec.levels - 1):
        sizes.append(max(1, int(round(spec.growth * sizes[-1]))))
    subsets = [np.arange(dataset_size)]
    for size in sizes[1:]:
        subsets.append(np.sort(rng.choice(subsets[-1], size=size, replace=False)))
    subsets.reverse()
    return Hierarchy(subsets)


@dataclass
class _TangentField:
    """Entrywise-Shepard interpolant of symmetric residual tangents."""

    sites: np.ndarray
    tangents: np.ndarray
    kernel: KernelSpec

    def evaluate(self, queries):
        return shepard_eval_entrywise(self.sites, self.tangents, self.kernel, queries)


@dataclass
class MultiscaleApproximant:
    """A fitted multiscale approximant.

    ``stages`` holds one approximant per level: all scalar operators for a
    scalar fit; a manifold Shepard followed by tangent-field interpolants for
    a manifold fit.  ``residual_peaks[i]`` records the largest residual
    magnitude (absolute value, or geodesic distance on the manifold) over the
    level-``i`` subset after that level's correction; tracked for diagnosis,
    monotone decrease is not guaranteed.
    """

    space: object
    stages: list
    residual_peaks: list = field(default_factory=list)

    @property
    def levels(self):
        return len(self.stages)

    def evaluate(self, queries):
        out = self.stages[0].evaluate(queries)
        for stage in self.stages[1:]:
            correction = stage.evaluate(queries)
            if isinstance(self.space, ScalarLine):
                out = out + correction
            else:
                out = geometry.spd_exp(out, correction)
        return out


def fit_multiscale_scalar(data, hierarchy, kernel_rule, method=SHEPARD):
    """Fit the multiscale scheme to a scalar dataset.

    Level ``i`` fits the operator on the residuals ``f_j - M_{i-1}(x_j)``
    over its subset, then residuals at all sites are advanced.  After the
    last level the maintained residual at site ``j`` equals
    ``f_j - evaluate(x_j)`` up to rounding.

    ``kernel_rule`` maps a level's sites to its :class:`KernelSpec`, so the
    support radius adapts to each level's fill distance.
    """
    if not isinstance(data.space, ScalarLine):
        raise ValueError("fit_multiscale_scalar expects a scalar-valued dataset")
    residual = data.values.copy()
    stages = []
    peaks = []
    for idx in hierarchy.subsets:
        level = ScatteredDataset(data.sites[idx], residual[idx], scalar_line)
        stage = Approximant(level, kernel_rule(data.sites[idx]), method)
        stages.append(stage)
        residual = residual - stage.evaluate(data.sites)
        peaks.append(float(np.abs(residual[idx]).max()))
    return MultiscaleApproximant(scalar_line, stages, peaks)


def fit_multiscale_manifold(data, hierarchy, kernel_rule):
    """Fit the multiscale scheme to an SPD-valued dataset.

    Level 1 is a manifold Shepard on the coarsest subset.  Each later level
    takes the logarithm-map tangents from the running approximation to the
    samples on its subset, interpolates them entrywise with scalar Shepard,
    and advances the running approximation through the exponential map.
    """
    if isinstance(data.space, ScalarLine):
        raise ValueError("fit_multiscale_manifold expects an SPD-valued dataset")
    idx = hierarchy.subsets[0]
    base = Approximant(data.subset(idx), kernel_rule(data.sites[idx]), SHEPARD)
    current = base.evaluate(data.sites)
    stages = [base]
    peaks = [float(geometry.spd_dist(current[idx], data.values[idx]).max())]
    for idx in hierarchy.subsets[1:]:
        tangents = geometry.spd_log(current[idx], data.values[idx])
        stage = _TangentField(data.sites[idx], tangents, kernel_rule(data.sites[idx]))
        stages.append(stage)
        current = geometry.spd_exp(current, stage.evaluate(data.sites))
        peaks.append(float(geometry.spd_dist(current[idx], data.values[idx]).max()))
    return MultiscaleApproximant(spd_manifold, stages, peaks)
