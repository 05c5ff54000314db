"""Exception types raised across the package."""


class NotSpdError(ValueError):
    """A matrix expected to be symmetric positive definite is not."""


class BadWeightsError(ValueError):
    """A weight vector is negative, zero-sum, or not normalized."""


class EmptyDatasetError(ValueError):
    """An operation requires at least one data site."""


class NegativeRadiusError(ValueError):
    """Radial kernels are only defined for nonnegative radii."""
