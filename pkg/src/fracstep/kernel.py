"""Fractional kernel integrals behind the scheme weights.

The building block is

    I_{n,q}^r = 1/Gamma(1-alpha) * int_0^1 (n+1-s)^(-alpha) d/ds C(s-q+r-1, r) ds,

with C the generalized binomial coefficient, q the interpolation offset and r the
polynomial degree.  Everything the weight lists need reduces to power moments
J_m(n) = int_0^1 (n+1-s)^(-alpha) s^m ds for m <= 2: a Beta-function closed form
at n = 0 (endpoint singularity) and Gauss-Legendre quadrature for n >= 1.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "dbinom_poly",
    "kernel_integral",
    "kernel_table",
    "backward_diff",
    "KernelTable",
]

_GL_X, _GL_W = np.polynomial.legendre.leggauss(32)
_GL_S = 0.5 * (_GL_X + 1.0)   # nodes on [0, 1]
_GL_WS = 0.5 * _GL_W


def _check_alpha(alpha):
    if not (isinstance(alpha, (int, float)) and 0.0 < alpha < 1.0):
        raise ValueError(f"fractional order must lie in (0, 1), got {alpha!r}")
    return float(alpha)


def _check_qr(q, r):
    if not (isinstance(r, (int, np.integer)) and 1 <= r <= 3):
        raise ValueError(f"degree index r must be 1, 2 or 3, got {r!r}")
    if not (isinstance(q, (int, np.integer)) and 1 <= q <= 3):
        raise ValueError(f"offset index q must be 1, 2 or 3, got {q!r}")
    return int(q), int(r)


def dbinom_poly(q: int, r: int) -> list:
    """Coefficients (ascending powers of s) of d/ds C(s - q + r - 1, r).

    Exact rational arithmetic, returned as floats.  The result has r
    coefficients, i.e. degree r - 1.
    """
    q, r = _check_qr(q, r)
    # C(x, r) with x = s - q + r - 1 is prod_{l=0}^{r-1} (s - (q - r + 1 + l)) / r!
    poly = [Fraction(1)]
    for l in range(r):
        root = q - r + 1 + l
        poly = [Fraction(0)] + poly  # multiply by s
        for m in range(len(poly) - 1):
            poly[m] -= root * poly[m + 1]
    fact = Fraction(math.factorial(r))
    deriv = [m * poly[m] / fact for m in range(1, len(poly))]
    return [float(c) for c in deriv]


def _moments_closed_zero(alpha):
    """J_m(0) = Beta(m+1, 1-alpha) for m = 0, 1, 2."""
    g1a = math.gamma(1.0 - alpha)
    return np.array([math.gamma(m + 1.0) * g1a / math.gamma(m + 2.0 - alpha) for m in range(3)])


def _moments_gauss(alpha, ns):
    """32-point Gauss-Legendre J_m(n) for n >= 1.

    The integrand (n+1-s)^(-alpha) s^m is analytic on [0, 1] with its
    singularity at s = n+1, a distance >= 1 away, so the rule converges
    geometrically and is exact to machine precision already at n = 1.
    (An antiderivative expansion is exact on paper but loses ~5 digits to
    cancellation; quadrature is the accurate route here.)
    """
    ns = np.asarray(ns, dtype=float)
    base = (ns[:, None] + 1.0 - _GL_S[None, :]) ** (-alpha)    # (len(ns), 32)
    out = np.empty((3, ns.size))
    sm = np.ones_like(_GL_S)
    for m in range(3):
        out[m] = base @ (_GL_WS * sm)
        sm = sm * _GL_S
    return out


def _power_moments(alpha, n_max):
    """J[m, n] for 0 <= m <= 2, 0 <= n <= n_max."""
    J = np.empty((3, n_max + 1))
    J[:, 0] = _moments_closed_zero(alpha)
    if n_max >= 1:
        J[:, 1:] = _moments_gauss(alpha, np.arange(1, n_max + 1))
    return J


def _moments_at(alpha, n):
    if n == 0:
        return _moments_closed_zero(alpha)
    return _moments_gauss(alpha, [n])[:, 0]


def kernel_integral(n: int, q: int, r: int, alpha: float) -> float:
    """I_{n,q}^r, with the accessor convention I = 0 for n < 0."""
    alpha = _check_alpha(alpha)
    q, r = _check_qr(q, r)
    if not isinstance(n, (int, np.integer)):
        raise ValueError(f"kernel index n must be an integer, got {n!r}")
    if n < 0:
        return 0.0
    c = dbinom_poly(q, r)
    J = _moments_at(alpha, int(n))
    return float(np.dot(c, J[: len(c)])) / math.gamma(1.0 - alpha)


@dataclass(frozen=True)
class KernelTable:
    """I_{n,q}^r for n = 0..n_max at fixed (alpha, q, r)."""

    alpha: float
    q: int
    r: int
    values: np.ndarray

    @property
    def n_max(self) -> int:
        return self.values.size - 1

    def value(self, n: int) -> float:
        if n < 0:
            return 0.0
        return float(self.values[n])


def kernel_table(alpha: float, q: int, r: int, n_max: int) -> KernelTable:
    alpha = _check_alpha(alpha)
    q, r = _check_qr(q, r)
    if not (isinstance(n_max, (int, np.integer)) and n_max >= 0):
        raise ValueError(f"n_max must be a nonnegative integer, got {n_max!r}")
    c = dbinom_poly(q, r)
    J = _power_moments(alpha, int(n_max))
    vals = np.zeros(int(n_max) + 1)
    for m, cm in enumerate(c):
        if cm != 0.0:
            vals += cm * J[m]
    vals /= math.gamma(1.0 - alpha)
    vals.flags.writeable = False
    return KernelTable(alpha=alpha, q=q, r=r, values=vals)


def backward_diff(seq, order: int) -> np.ndarray:
    """order-th backward difference with zero padding on the left.

    out[n] = sum_j (-1)^j C(order, j) seq[n-j], reading seq[m] = 0 for m < 0,
    so e.g. backward_diff([1, 1, 1], 1) == [1, 0, 0].
    """
    if not (isinstance(order, (int, np.integer)) and order >= 1):
        raise ValueError(f"difference order must be a positive integer, got {order!r}")
    a = np.asarray(seq)
    if a.ndim != 1 or a.size == 0:
        raise ValueError("backward_diff expects a nonempty 1-d sequence")
    if not np.issubdtype(a.dtype, np.number):
        raise ValueError(f"backward_diff expects numeric entries, got dtype {a.dtype}")
    out = a.astype(np.result_type(a.dtype, float), copy=True)
    for _ in range(int(order)):
        out[1:] = out[1:] - out[:-1]
    return out
