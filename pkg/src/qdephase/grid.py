"""Uniform time grids and sampled traces."""

from dataclasses import dataclass

import numpy as np

from qdephase.errors import DomainError

DEFAULT_POINTS = 2001


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid on ``[0, t_max]`` [ms] with ``n_points`` samples."""

    t_max: float
    n_points: int = DEFAULT_POINTS

    def __post_init__(self):
        if not self.t_max > 0:
            raise DomainError(f"t_max must be > 0, got {self.t_max}")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise DomainError(f"n_points must be an integer >= 2, got {self.n_points}")

    @property
    def dt(self):
        return self.t_max / (self.n_points - 1)

    @property
    def times(self):
        return np.linspace(0.0, self.t_max, int(self.n_points))

    def __len__(self):
        return int(self.n_points)


@dataclass(frozen=True)
class Trace:
    """Real samples of a scalar quantity on a :class:`TimeGrid`."""

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (len(self.grid),):
            raise DomainError(
                f"trace has {values.size} samples, grid has {len(self.grid)}")
        if not np.all(np.isfinite(values)):
            raise DomainError("trace values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def times(self):
        return self.grid.times

    @classmethod
    def sample(cls, func, grid):
        """Evaluate a vectorised ``func(times)`` on ``grid``."""
        return cls(grid, func(grid.times))


def as_times(grid):
    """Accept a :class:`TimeGrid` or an array of times."""
    if isinstance(grid, TimeGrid):
        return grid.times
    times = np.asarray(grid, dtype=float)
    if np.any(times < 0):
        raise DomainError("times must be >= 0")
    return times
