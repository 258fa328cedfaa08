"""Trace corrections T_j(n) of the resolvent series around level n.

T_j(n) = (1/2 pi i) tr of the contour integral of (z - z_n)(R0 W)^j R0 over the
boundary of the square around z_n = 2n + 1, with R0 = diag(1/(z - z_k)).
Orders one to three are evaluated as explicit residue sums; the contour
integral itself is computed by quadrature as an independent check.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bounds import m_alpha, n_star
from .hermite import _check_index
from .operator import PointPotential, amplitudes, decay_constant, matrix_element


def default_kmax(n: int) -> int:
    return max(16 * n, 4096)


@lru_cache(maxsize=128)
def _decay(w: PointPotential) -> float:
    return decay_constant(w)


@dataclass(frozen=True)
class TraceSum:
    """A truncated lattice sum together with a bound on the omitted tail."""

    value: complex
    tail_bound: float
    k_max: int

    def __complex__(self) -> complex:
        return complex(self.value)


def _tail_integral(K: float, n: int) -> float:
    """Integral of x^{-1/2} / (x - n) over [K, inf), K > n."""
    if n == 0:
        return 2.0 / math.sqrt(K)
    rk, rn = math.sqrt(K), math.sqrt(n)
    return math.log((rk + rn) / (rk - rn)) / rn


def _check_cutoff(n: int, k_max: int | None) -> int:
    n = _check_index(n)
    k_max = default_kmax(n) if k_max is None else int(k_max)
    if k_max < 4 * n:
        raise ValueError(f"k_max={k_max} below 4n={4 * n}; tail not controlled")
    return k_max


def _row(w: PointPotential, n: int, size: int):
    phi = amplitudes(w, max(size, n + 1))[:, :size]
    c = w.couplings
    # elementwise products and a plain reduction (no BLAS/FMA) keep parity zeros exact
    return phi, c, np.sum((c * phi[:, n])[:, None] * phi, axis=0)


def t1(n: int, w: PointPotential) -> complex:
    """First-order correction, the diagonal element w_nn."""
    n = _check_index(n)
    return complex(matrix_element(w, n, n))


def t2_bilinear(n: int, wa: PointPotential, wb: PointPotential, k_max: int | None = None) -> TraceSum:
    """sum over k != n of a_nk b_kn / (2(n - k)); t2 is the diagonal case."""
    k_max = _check_cutoff(n, k_max)
    size = k_max + 1
    _, _, ra = _row(wa, n, size)
    _, _, rb = _row(wb, n, size)
    den = 2.0 * (n - np.arange(size))
    den[n] = np.inf
    value = np.sum(ra * rb / den)
    tail = (_decay(wa) * _decay(wb) * (1.0 + n) ** -0.5 * 0.5 * _tail_integral(k_max, n))
    return TraceSum(complex(value), float(tail), k_max)


def t2(n: int, w: PointPotential, k_max: int | None = None) -> TraceSum:
    """Second-order correction sum over k != n of w_nk w_kn / (2(n - k))."""
    return t2_bilinear(n, w, w, k_max)


def t3(n: int, w: PointPotential, k_max: int | None = None) -> TraceSum:
    """Third-order correction.

    sum over k, l != n of w_nk w_kl w_ln / (4 (n-k)(n-l))
      - w_nn * sum over m != n of w_nm w_mn / (4 (n-m)^2).
    The second term comes from the double pole at z_n when an intermediate
    index equals n; its contribution carries a minus sign.
    """
    k_max = _check_cutoff(n, k_max)
    size = k_max + 1
    phi, c, row = _row(w, n, size)
    diff = n - np.arange(size, dtype=float)
    diff[n] = np.inf
    u = row / (2.0 * diff)
    proj = np.sum(phi * u, axis=1)
    first = np.sum(c * proj * proj)
    second = row[n] * np.sum(row * row / (4.0 * diff * diff))
    value = first - second
    C0 = _decay(w)
    head = np.sum(np.abs(u) * (1.0 + np.arange(size)) ** -0.25)
    q = C0 * (1.0 + n) ** -0.25 * 0.5 * _tail_integral(k_max, n)
    tail = C0 * (2.0 * head * q + q * q)
    tail += (abs(row[n]) * C0 ** 2 * (1.0 + n) ** -0.5 * 0.25
             * (k_max / (k_max - n)) ** 2 * (2.0 / 3.0) * k_max ** -1.5)
    return TraceSum(complex(value), float(tail), k_max)


@dataclass(frozen=True)
class ContourSpec:
    """Quadrature on the boundary of the square |Re z - z_n| <= 1/2, |Im z| <= 1/2."""

    n: int
    points_per_side: int = 64
    truncation: int | None = None
    rule: str = "gauss"
    tol: float = 1e-9
    max_points: int = 1 << 15

    def __post_init__(self):
        N = default_kmax(self.n) + 1 if self.truncation is None else int(self.truncation)
        object.__setattr__(self, "truncation", N)
        if N < 4 * self.n:
            raise ValueError(f"truncation {N} below 4n")
        if self.rule not in ("gauss", "trapezoid"):
            raise ValueError(f"unknown quadrature rule {self.rule!r}")
        if self.points_per_side < 2:
            raise ValueError("need at least two points per side")


# corners of the unit square around z_n, counterclockwise from the lower left
_CORNERS = np.array([-0.5 - 0.5j, 0.5 - 0.5j, 0.5 + 0.5j, -0.5 + 0.5j])
_OFFSET = (math.sqrt(2.0) - 1.0) / 10.0


def contour_nodes(n: int, m: int, rule: str = "gauss"):
    """Nodes z and weights dz for the counterclockwise boundary of the square."""
    zn = 2 * n + 1
    if rule == "gauss":
        s, wts = np.polynomial.legendre.leggauss(m)
        zs, ws = [], []
        for i in range(4):
            a, b = _CORNERS[i], _CORNERS[(i + 1) % 4]
            zs.append(a + (b - a) * (s + 1.0) / 2.0)
            ws.append((b - a) / 2.0 * wts)
        return zn + np.concatenate(zs), np.concatenate(ws)
    # periodic trapezoid in arclength, start shifted off the corners
    total = 4 * m
    s = (_OFFSET + 4.0 * np.arange(total) / total) % 4.0
    side = np.floor(s).astype(int)
    frac = s - side
    a = _CORNERS[side]
    d = _CORNERS[(side + 1) % 4] - a
    return zn + a + d * frac, d * (4.0 / total)


def _integrand(w: PointPotential, n: int, j: int, z: np.ndarray, N: int) -> np.ndarray:
    phi = amplitudes(w, N)
    c = w.couplings
    r = 1.0 / (z[:, None] - (2.0 * np.arange(N) + 1.0)[None, :])
    # tr[(R0 W)^j R0] = tr[(C G)^{j-1} C G2] with G = phi R0 phi^T, G2 = phi R0^2 phi^T
    g = np.einsum("mk,zk,lk->zml", phi, r, phi)
    g2 = np.einsum("mk,zk,lk->zml", phi, r * r, phi)
    cg = c[None, :, None] * g
    acc = c[None, :, None] * g2
    for _ in range(j - 1):
        acc = cg @ acc
    tr = np.trace(acc, axis1=1, axis2=2)
    return (z - (2 * n + 1)) * tr


@dataclass(frozen=True)
class ContourResult:
    value: complex
    points_per_side: int
    change: float
    converged: bool

    def __complex__(self) -> complex:
        return complex(self.value)


def tj_contour(n: int, w: PointPotential, j: int, spec: ContourSpec | None = None) -> ContourResult:
    """T_j(n) by quadrature of the resolvent-series integrand over the square boundary.

    The point count per side doubles until two successive values differ by
    less than spec.tol.
    """
    n = _check_index(n)
    if j not in (1, 2, 3, 4):
        raise ValueError(f"order j must be in 1..4, got {j}")
    spec = ContourSpec(n) if spec is None else spec
    if spec.n != n:
        raise ValueError("contour spec is for a different level")
    N = spec.truncation
    m = spec.points_per_side
    prev = None
    while True:
        z, dz = contour_nodes(n, m, spec.rule)
        value = np.sum(_integrand(w, n, j, z, N) * dz) / (2j * math.pi)
        if prev is not None:
            change = abs(value - prev)
            if change < spec.tol:
                return ContourResult(complex(value), m, float(change), True)
            if 2 * m > spec.max_points:
                return ContourResult(complex(value), m, float(change), False)
        prev = value
        m *= 2


@dataclass(frozen=True)
class TraceSeries:
    """Partial sum (2n+1) + t1 + t2 + t3 with the remainder bound for order q."""

    n: int
    t1: complex
    t2: complex
    t3: complex
    remainder_bound: float
    lambda_estimate: complex
    q: int
    below_threshold: bool = False


def remainder_bound(n: int, q: int, alpha: float = 0.25, C0: float = 1.0) -> float:
    """2 (C0 M(alpha) log(en) / n^{2 alpha})^{q+1}."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 2.0 * (C0 * m_alpha(alpha) * (1.0 + math.log(n)) / n ** (2 * alpha)) ** (q + 1)


def lambda_series(n: int, w: PointPotential, q: int = 3, alpha: float = 0.25,
                  C0: float | None = None, k_max: int | None = None) -> TraceSeries:
    """Eigenvalue estimate from the first q trace corrections.

    Warns when n lies below the threshold where the series is known to
    converge; the estimate is still returned.
    """
    n = _check_index(n)
    if q not in (1, 2, 3):
        raise ValueError(f"q must be 1, 2 or 3, got {q}")
    if n < 1:
        raise ValueError("n must be >= 1")
    C0 = _decay(w) if C0 is None else float(C0)
    a = t1(n, w)
    b = complex(t2(n, w, k_max)) if q >= 2 else 0j
    c = complex(t3(n, w, k_max)) if q >= 3 else 0j
    below = False
    if C0 > 0:
        below = n < n_star(C0, alpha)
        if below:
            warnings.warn(f"level {n} is below the convergence threshold for C0={C0:.3g}",
                          stacklevel=2)
    bound = remainder_bound(n, q, alpha, C0) if C0 > 0 else 0.0
    return TraceSeries(n, a, b, c, bound, (2 * n + 1) + a + b + c, q, below)
