"""Quadrature oracle: the discrete Caputo operator evaluated without weights.

The schemes are definitionally dt^(-alpha)/Gamma(1-alpha) * int_0^{t_n}
(t_n - xi)^(-alpha) P'(xi) dxi for a continuous piecewise-polynomial
interpolant P of the samples.  This module builds that interpolant piece by
piece and integrates panel-wise: Gauss-Legendre away from the endpoint
singularity, Gauss-Jacobi (weight (1-s)^(-alpha)) on the final panel.  It is
deliberately independent of the weight tables so the two routes can be
checked against each other.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .operator import GridSpec
from .special import gamma_real

__all__ = [
    "caputo_monomial",
    "lagrange_piece_eval",
    "newton_piece_eval",
    "piece_layout",
    "PiecewiseInterpolant",
    "build_interpolant",
    "oracle_discrete_caputo",
]

_PANEL_POINTS = 30
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_PANEL_POINTS)
_GL_S = 0.5 * (_GL_X + 1.0)
_GL_WS = 0.5 * _GL_W


def caputo_monomial(m: int, alpha: float, t: float) -> float:
    """Caputo derivative of t^m: Gamma(m+1)/Gamma(m+1-alpha) * t^(m-alpha)."""
    if not (isinstance(m, (int, np.integer)) and m >= 0):
        raise ValueError(f"monomial degree must be a nonnegative integer, got {m!r}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"fractional order must lie in (0, 1), got {alpha!r}")
    if t < 0.0:
        raise ValueError(f"time must be nonnegative, got {t!r}")
    if m == 0:
        return 0.0
    if t == 0.0:
        return 0.0 if m - alpha > 0 else math.inf
    return gamma_real(m + 1.0) / gamma_real(m + 1.0 - alpha) * t ** (m - alpha)


def _piece_nodes(j: int, q: int, deg: int) -> range:
    """Global node indices of the piece p_{j,q} of degree deg: j+q-deg-1 .. j+q-1."""
    return range(j + q - deg - 1, j + q)


def _check_piece(samples, j, q, deg):
    nodes = _piece_nodes(j, q, deg)
    if nodes.start < 0 or nodes.stop > len(samples):
        raise ValueError(
            f"piece (j={j}, q={q}, degree={deg}) needs samples {nodes.start}..{nodes.stop - 1}, "
            f"have 0..{len(samples) - 1}"
        )
    return nodes


def lagrange_piece_eval(samples, j: int, q: int, k: int, s: float) -> complex:
    """Value of the degree-k piece p_{j,q} at t_{j-1} + s*dt, in Lagrange form.

    samples is indexable by global node; s is the local coordinate (s in [0,1]
    covers the piece's own subinterval, but the polynomial extends beyond).
    """
    nodes = _check_piece(samples, j, q, k)
    x = j - 1.0 + s
    total = 0.0 + 0.0j
    for node in nodes:
        basis = 1.0
        for mm in nodes:
            if mm != node:
                basis *= (x - mm) / (node - mm)
        total += basis * complex(samples[node])
    return total


def newton_piece_eval(samples, j: int, q: int, k: int, s: float) -> complex:
    """Same piece in Newton form: sum_r C(s-q+r-1, r) nabla^r u_{j+q-1}."""
    _check_piece(samples, j, q, k)
    top = j + q - 1
    total = 0.0 + 0.0j
    for r in range(k + 1):
        diff = 0.0 + 0.0j
        for l in range(r + 1):
            diff += (-1.0) ** l * math.comb(r, l) * complex(samples[top - l])
        x = s - q + r - 1.0
        basis = 1.0
        for l in range(r):
            basis *= (x - l) / (r - l)
        total += basis * diff
    return total


def _lagrange_derivative(samples, nodes, xs):
    """d/dx of the Lagrange interpolant at points xs (grid units)."""
    xs = np.asarray(xs, dtype=float)
    out = np.zeros(xs.shape, dtype=complex)
    nodes = list(nodes)
    for node in nodes:
        denom = 1.0
        for mm in nodes:
            if mm != node:
                denom *= node - mm
        dbasis = np.zeros(xs.shape)
        for l in nodes:
            if l == node:
                continue
            prod = np.ones(xs.shape)
            for mm in nodes:
                if mm != node and mm != l:
                    prod *= xs - mm
            dbasis += prod
        out += (dbasis / denom) * complex(samples[node])
    return out


def piece_layout(k: int, i: int, n: int):
    """Piece (q, degree) on each subinterval I_1..I_n of the step-n interpolant.

    Head pieces (degree k-1, interpolating t_0..t_{k-1}) cover I_1..I_{k-i};
    interior pieces use offset i; tail pieces narrow the offset so the last k+1
    samples close the composite.  (k, i) = (2, 3) is accepted as the auxiliary
    interpolant with a single wide head piece; it has no weight list.
    """
    if (k, i) == (2, 3):
        if n < 2:
            raise ValueError("auxiliary interpolant (2,3) needs n >= 2")
        return [(2, 2)] + [(1, 2)] * (n - 1)
    if not 1 <= i <= k <= 3:
        raise ValueError(f"scheme requires 1 <= i <= k <= 3, got (k={k}, i={i})")
    if n < k:
        raise ValueError(f"interpolant at step n requires n >= k, got n={n}, k={k}")
    layout = []
    for j in range(1, n + 1):
        if j <= k - i:
            layout.append((k - j, k - 1))
        elif j <= n - i + 1:
            layout.append((i, k))
        else:
            layout.append((n + 1 - j, k))
    return layout


@dataclass(frozen=True)
class PiecewiseInterpolant:
    """Composite interpolant of samples u_0..u_n for a scheme, one piece per subinterval."""

    k: int
    i: int
    grid: GridSpec
    samples: np.ndarray
    n: int

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=complex))
        if self.samples.ndim != 1 or self.samples.size < self.n + 1:
            raise ValueError(f"need at least n+1 = {self.n + 1} samples")

    @property
    def layout(self):
        return piece_layout(self.k, self.i, self.n)

    def value(self, j: int, s: float) -> complex:
        """P on subinterval I_j at local coordinate s in [0, 1]."""
        q, deg = self.layout[j - 1]
        if deg == self.k:
            return lagrange_piece_eval(self.samples, j, q, deg, s)
        nodes = _check_piece(self.samples, j, q, deg)
        x = j - 1.0 + s
        total = 0.0 + 0.0j
        for node in nodes:
            basis = 1.0
            for mm in nodes:
                if mm != node:
                    basis *= (x - mm) / (node - mm)
            total += basis * complex(self.samples[node])
        return total

    def derivative(self, j: int, s) -> np.ndarray:
        """dP/ds on subinterval I_j at local coordinates s (array ok)."""
        q, deg = self.layout[j - 1]
        nodes = _check_piece(self.samples, j, q, deg)
        return _lagrange_derivative(self.samples, nodes, j - 1.0 + np.asarray(s, dtype=float))


def build_interpolant(scheme, grid: GridSpec, samples, n: int) -> PiecewiseInterpolant:
    try:
        k, i = scheme.k, scheme.i
    except AttributeError:
        k, i = (int(scheme[0]), int(scheme[1]))
    return PiecewiseInterpolant(k=k, i=i, grid=grid, samples=np.asarray(samples), n=int(n))


@lru_cache(maxsize=16)
def _jacobi_rule(alpha: float):
    x, w = roots_jacobi(_PANEL_POINTS, -alpha, 0.0)
    return 0.5 * (x + 1.0), w


def oracle_discrete_caputo(interp: PiecewiseInterpolant, alpha: float, n: int | None = None) -> complex:
    """Quadrature evaluation of D u_n through the composite interpolant.

    Panels j < n use Gauss-Legendre (the kernel is analytic there); the final
    panel extracts the (1-s)^(-alpha) singularity with a Gauss-Jacobi rule.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"fractional order must lie in (0, 1), got {alpha!r}")
    if n is None:
        n = interp.n
    if n != interp.n:
        raise ValueError(f"interpolant was built for step {interp.n}, asked for {n}")
    gj_s, gj_w = _jacobi_rule(float(alpha))
    parts_re = []
    parts_im = []
    for j in range(1, n + 1):
        if j < n:
            kern = (n - j + 1.0 - _GL_S) ** (-alpha)
            vals = interp.derivative(j, _GL_S) * kern * _GL_WS
        else:
            vals = interp.derivative(j, gj_s) * gj_w * 2.0 ** (alpha - 1.0)
        parts_re.extend(vals.real.tolist())
        parts_im.extend(vals.imag.tolist())
    acc = complex(math.fsum(parts_re), math.fsum(parts_im))
    return acc * interp.grid.dt ** (-alpha) / gamma_real(1.0 - alpha)
