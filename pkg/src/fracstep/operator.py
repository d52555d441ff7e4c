"""Uniform grids, sampled trajectories, and application of the discrete Caputo operator."""

import math
from dataclasses import dataclass, field

import numpy as np

from .weights import WeightTable

__all__ = ["GridSpec", "Trajectory", "apply_discrete_caputo", "compensated_cdot"]


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid t_n = n * T / M on [0, T]."""

    T: float
    M: int

    def __post_init__(self):
        if not (isinstance(self.T, (int, float)) and math.isfinite(self.T) and self.T > 0.0):
            raise ValueError(f"horizon T must be positive and finite, got {self.T!r}")
        if not (isinstance(self.M, int) and self.M >= 1):
            raise ValueError(f"step count M must be a positive integer, got {self.M!r}")

    @property
    def dt(self) -> float:
        return self.T / self.M

    def times(self) -> np.ndarray:
        return np.arange(self.M + 1) * self.dt

    def node(self, n: int) -> float:
        if not 0 <= n <= self.M:
            raise ValueError(f"node index out of range: {n} not in [0, {self.M}]")
        return n * self.dt


@dataclass(frozen=True)
class Trajectory:
    """Complex samples u_0..u_M on a grid."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)
    validate: bool = True

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.M + 1,):
            raise ValueError(
                f"trajectory needs {self.grid.M + 1} samples for M={self.grid.M}, got shape {v.shape}"
            )
        if self.validate and not np.all(np.isfinite(v.real) & np.isfinite(v.imag)):
            raise ValueError("trajectory samples must be finite")
        if v is not self.values or v.flags.writeable:
            v = v.copy()
            v.flags.writeable = False
            object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, grid: GridSpec, fn) -> "Trajectory":
        vals = np.array([complex(fn(t)) for t in grid.times()])
        return cls(grid=grid, values=vals)


def compensated_cdot(w, u) -> complex:
    """Exactly rounded complex dot sum_j w_j u_j (fsum over the product array).

    Products carry one rounding each; their accumulation is exact, which keeps
    long-history convolutions reproducible and off the naive O(sqrt(n)) noise
    growth.
    """
    p = np.multiply(w, u)
    if np.iscomplexobj(p):
        return complex(math.fsum(p.real.tolist()), math.fsum(p.imag.tolist()))
    return complex(math.fsum(p.tolist()), 0.0)


def apply_discrete_caputo(table: WeightTable, traj: Trajectory, n: int) -> complex:
    """D u_n = dt^(-alpha) [ sum_{j<k} w_{n,j} u_j + sum_{j<=n} omega_{n-j} u_j ].

    Direct O(n) evaluation; all weighted samples go through one compensated sum.
    """
    k = table.scheme.k
    if not (isinstance(n, (int, np.integer)) and k <= n <= traj.grid.M):
        raise ValueError(f"operator defined for k={k} <= n <= M={traj.grid.M}, got n={n!r}")
    n = int(n)
    if table.n_max < n:
        raise ValueError(f"weight table covers n <= {table.n_max}, needs {n}")
    u = traj.values
    buf = np.empty(n + 1 + k, dtype=complex)
    np.multiply(table.omega[n::-1], u[: n + 1], out=buf[: n + 1])
    np.multiply(np.asarray(table.starting[n]), u[:k], out=buf[n + 1 :])
    acc = complex(math.fsum(buf.real.tolist()), math.fsum(buf.imag.tolist()))
    return acc * traj.grid.dt ** (-table.alpha)
