"""Convolution and starting weights of the discrete Caputo schemes.

Each scheme is labelled (k, i) with 1 <= i <= k <= 3: degree-k interpolation
pieces, offset i.  The discrete operator at step n is

    D u_n = dt^(-alpha) [ sum_{j<k} w_{n,j} u_j  +  sum_{j<=n} omega_{n-j} u_j ],

and this module produces the omega sequence and the starting rows w_{n,.}
from kernel-integral tables.  Weight tables are cached per (scheme, alpha
bit pattern, length) and validated at construction: the weights of every
step must sum to zero (exactness on constants).
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .kernel import backward_diff, kernel_table

__all__ = [
    "SchemeId",
    "ALL_SCHEMES",
    "WeightTable",
    "WeightConsistencyError",
    "weight_table",
    "convolution_weights",
    "starting_weights",
]

_CONSISTENCY_TOL = 1e-10


class WeightConsistencyError(RuntimeError):
    """Weight rows failed the sum-to-zero consistency check at construction."""


@dataclass(frozen=True, order=True)
class SchemeId:
    """Scheme label (k, i): interpolation degree k, offset i, 1 <= i <= k <= 3."""

    k: int
    i: int

    def __post_init__(self):
        if not (isinstance(self.k, int) and isinstance(self.i, int)):
            raise ValueError(f"scheme indices must be integers, got ({self.k!r}, {self.i!r})")
        if not 1 <= self.i <= self.k <= 3:
            raise ValueError(f"scheme requires 1 <= i <= k <= 3, got (k={self.k}, i={self.i})")

    @property
    def label(self) -> str:
        return f"({self.k},{self.i})"


ALL_SCHEMES = tuple(SchemeId(k, i) for k in (1, 2, 3) for i in range(1, k + 1))


def _as_scheme(scheme) -> SchemeId:
    if isinstance(scheme, SchemeId):
        return scheme
    try:
        k, i = scheme
    except (TypeError, ValueError):
        raise ValueError(f"not a scheme label: {scheme!r}") from None
    return SchemeId(int(k), int(i))


@dataclass(frozen=True)
class WeightTable:
    """omega[0..n_max] plus starting rows w_{n,0..k-1} for k <= n <= n_max."""

    scheme: SchemeId
    alpha: float
    omega: np.ndarray      # shape (n_max+1,)
    starting: np.ndarray   # shape (n_max+1, k); rows below k are zero filler

    @property
    def n_max(self) -> int:
        return self.omega.size - 1

    @property
    def abs_sum(self) -> float:
        """sum_n |omega_n|, monitored for stability diagnostics."""
        return float(np.abs(self.omega).sum())

    def starting_row(self, n: int) -> tuple:
        if not self.scheme.k <= n <= self.n_max:
            raise ValueError(
                f"starting row defined for {self.scheme.k} <= n <= {self.n_max}, got {n}"
            )
        return tuple(float(v) for v in self.starting[n])


def _assemble(k: int, i: int, alpha: float, n_max: int):
    """Raw (omega, starting) arrays from the kernel tables."""
    kn = max(n_max, 4) + 2
    tab = {}
    for (q, r) in ((1, 1), (1, 2), (2, 2), (3, 2), (1, 3), (2, 3), (3, 3)):
        tab[q, r] = kernel_table(alpha, q, r, kn).values
    I = tab[1, 1]
    N = n_max
    ns = np.arange(N + 1)
    m = np.arange(k, N + 1) if N >= k else np.arange(0)
    starting = np.zeros((N + 1, k))

    if (k, i) == (1, 1):
        omega = backward_diff(I, 1)[: N + 1]
        if m.size:
            starting[k:, 0] = -I[m]

    elif (k, i) == (2, 1):
        I21 = tab[1, 2]
        omega = (backward_diff(I, 1) + backward_diff(I21, 2))[: N + 1]
        if m.size:
            starting[k:, 0] = 2.0 * I21[m - 1] - I21[m] - I[m]
            starting[k:, 1] = -I21[m - 1]

    elif (k, i) == (2, 2):
        I21, I22 = tab[1, 2], tab[2, 2]
        d1I = backward_diff(I, 1)
        d2I22 = backward_diff(I22, 2)
        omega = np.empty(N + 1)
        omega[0] = I[0] + I[1] + I21[0] + I22[1]
        if N >= 1:
            omega[1] = (I[2] - I[1]) - I[0] + I22[2] - 2.0 * I21[0] - 2.0 * I22[1]
        if N >= 2:
            omega[2] = (I[3] - I[2]) + (I22[3] - 2.0 * I22[2] + I22[1]) + I21[0]
        if N >= 3:
            omega[3:] = d1I[ns[3:] + 1] + d2I22[ns[3:] + 1]
        if m.size:
            starting[k:, 0] = -(I21[m + 1] - I21[m]) + I22[m]
            starting[k:, 1] = -I21[m]

    elif (k, i) == (3, 1):
        I21, I22, I31 = tab[1, 2], tab[2, 2], tab[1, 3]
        omega = (backward_diff(I, 1) + backward_diff(I21, 2) + backward_diff(I31, 3))[: N + 1]
        if m.size:
            starting[k:, 0] = (
                -(I[m] - I[m - 1]) - I21[m] + 2.0 * I21[m - 1] + I22[m - 1]
                - I31[m] + 3.0 * I31[m - 1] - 3.0 * I31[m - 2]
            )
            starting[k:, 1] = (
                -2.0 * I[m - 1] - 2.0 * I22[m - 1] - I21[m - 1]
                - I31[m - 1] + 3.0 * I31[m - 2]
            )
            starting[k:, 2] = I[m - 1] + I22[m - 1] - I31[m - 2]

    elif (k, i) == (3, 2):
        I21, I22, I31, I32 = tab[1, 2], tab[2, 2], tab[1, 3], tab[2, 3]
        d1I = backward_diff(I, 1)
        d2I22 = backward_diff(I22, 2)
        d3I32 = backward_diff(I32, 3)
        omega = np.empty(N + 1)
        omega[0] = I[0] + I[1] + I22[1] + I21[0] + I32[1] + I31[0]
        if N >= 1:
            omega[1] = (
                (I[2] - I[1]) - I[0] + I22[2] - 2.0 * I22[1] - 2.0 * I21[0]
                + I32[2] - 3.0 * I32[1] - 3.0 * I31[0]
            )
        if N >= 2:
            omega[2] = (
                (I[3] - I[2]) + (I22[3] - 2.0 * I22[2] + I22[1]) + I21[0]
                + I32[3] - 3.0 * I32[2] + 3.0 * I32[1] + 3.0 * I31[0]
            )
        if N >= 3:
            omega[3] = (
                (I[4] - I[3]) + (I22[4] - 2.0 * I22[3] + I22[2])
                + (I32[4] - 3.0 * I32[3] + 3.0 * I32[2] - I32[1]) - I31[0]
            )
        if N >= 4:
            omega[4:] = d1I[ns[4:] + 1] + d2I22[ns[4:] + 1] + d3I32[ns[4:] + 1]
        if m.size:
            starting[k:, 0] = (
                -(I[m + 1] - I[m]) - I22[m + 1] + 2.0 * I22[m]
                - I32[m + 1] + 3.0 * I32[m] - 3.0 * I32[m - 1]
            )
            starting[k:, 1] = -I[m] - I22[m] - I32[m] + 3.0 * I32[m - 1]
            starting[k:, 2] = -I32[m - 1]

    elif (k, i) == (3, 3):
        I21, I22, I23 = tab[1, 2], tab[2, 2], tab[3, 2]
        I31, I32, I33 = tab[1, 3], tab[2, 3], tab[3, 3]
        d1I = backward_diff(I, 1)
        d2I23 = backward_diff(I23, 2)
        d3I33 = backward_diff(I33, 3)
        omega = np.empty(N + 1)
        omega[0] = I[0] + I[1] + I[2] + I21[0] + I22[1] + I23[2] + I31[0] + I32[1] + I33[2]
        if N >= 1:
            omega[1] = (
                (I[3] - I[2]) - I[0] - I[1]
                + I23[3] - 2.0 * I23[2] - 2.0 * I22[1] - 2.0 * I21[0]
                + I33[3] - 3.0 * I33[2] - 3.0 * I32[1] - 3.0 * I31[0]
            )
        if N >= 2:
            omega[2] = (
                (I[4] - I[3]) + (I23[4] - 2.0 * I23[3] + I23[2]) + I22[1] + I21[0]
                + I33[4] - 3.0 * I33[3] + 3.0 * I33[2] + 3.0 * I31[0] + 3.0 * I32[1]
            )
        if N >= 3:
            omega[3] = (
                (I[5] - I[4]) + (I23[5] - 2.0 * I23[4] + I23[3])
                + (I33[5] - 3.0 * I33[4] + 3.0 * I33[3] - I33[2])
                - I32[1] - I31[0]
            )
        if N >= 4:
            omega[4:] = d1I[ns[4:] + 2] + d2I23[ns[4:] + 2] + d3I33[ns[4:] + 2]
        if m.size:
            starting[k:, 0] = (
                -(I[m + 2] - I[m + 1]) - (I23[m + 2] - 2.0 * I23[m + 1] + I23[m])
                - I33[m + 2] + 3.0 * I33[m + 1] - 3.0 * I33[m]
            )
            starting[k:, 1] = (
                -(I[m + 1] - I[m]) - I23[m + 1] + 2.0 * I23[m]
                - I33[m + 1] + 3.0 * I33[m]
            )
            starting[k:, 2] = -I[m] - I23[m] - I33[m]

    else:  # pragma: no cover - SchemeId already rejects these
        raise ValueError(f"unknown scheme (k={k}, i={i})")

    return omega, starting


@lru_cache(maxsize=48)
def _build(k: int, i: int, alpha: float, n_max: int) -> WeightTable:
    omega, starting = _assemble(k, i, alpha, n_max)
    if not omega[0] > 0.0:
        raise WeightConsistencyError(
            f"omega_0 must be positive for scheme ({k},{i}), alpha={alpha}, got {omega[0]}"
        )
    if n_max >= k:
        residual = np.cumsum(omega)[k:] + starting[k:].sum(axis=1)
        worst = float(np.abs(residual).max())
        if worst > _CONSISTENCY_TOL:
            raise WeightConsistencyError(
                f"weights of scheme ({k},{i}), alpha={alpha} do not sum to zero: "
                f"max residual {worst:.3e} over n <= {n_max}"
            )
    omega.flags.writeable = False
    starting.flags.writeable = False
    return WeightTable(scheme=SchemeId(k, i), alpha=alpha, omega=omega, starting=starting)


def weight_table(scheme, alpha: float, n_max: int) -> WeightTable:
    """Cached weight table for n = 0..n_max.

    The cache key uses the exact bit pattern of alpha; lru_cache keeps the
    lookup thread-safe.
    """
    s = _as_scheme(scheme)
    if not (isinstance(alpha, (int, float)) and 0.0 < alpha < 1.0):
        raise ValueError(f"fractional order must lie in (0, 1), got {alpha!r}")
    if not (isinstance(n_max, (int, np.integer)) and n_max >= 0):
        raise ValueError(f"n_max must be a nonnegative integer, got {n_max!r}")
    return _build(s.k, s.i, float(alpha), int(n_max))


def convolution_weights(scheme, alpha: float, n_max: int) -> np.ndarray:
    """omega_0..omega_n_max of the scheme (read-only view of the cached table)."""
    return weight_table(scheme, alpha, n_max).omega


def starting_weights(scheme, alpha: float, n: int) -> tuple:
    """(w_{n,0}, ..., w_{n,k-1}) for step n >= k."""
    s = _as_scheme(scheme)
    if not (isinstance(n, (int, np.integer)) and n >= s.k):
        raise ValueError(f"starting weights exist for n >= k = {s.k}, got {n!r}")
    return weight_table(s, alpha, int(n)).starting_row(int(n))
