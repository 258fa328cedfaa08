"""Quantitative bounds behind the perturbation series.

Matrix decay |w_jk| <= C0 (1+j)^{-alpha} (1+k)^{-alpha} controls the
Hilbert-Schmidt norm of K W K, K = diag((z - z_j)^{-1/2}), on the boundary
of the square around z_n; that in turn fixes the level N* beyond which the
series converges, and bounds on the number of non-real eigenvalues.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hermite import _check_index
from .operator import PointPotential, amplitudes, perturbation_matrix

# absolute constant of the closed-form threshold bound, fitted so that the
# bound holds for beta in [1/4, 1] and t in [10, 1e6]
DEFAULT_A = 128.0


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 0.5:
        raise ValueError(f"alpha must lie in (0, 1/2), got {alpha}")
    return alpha


def m_alpha(alpha: float) -> float:
    """M(alpha) = 6 + (4/3)/(1 - 2 alpha) + 1/(3 alpha)."""
    alpha = _check_alpha(alpha)
    return 6.0 + (4.0 / 3.0) / (1.0 - 2.0 * alpha) + 1.0 / (3.0 * alpha)


@dataclass(frozen=True)
class BoundContext:
    alpha: float
    C0: float
    n: int

    def __post_init__(self):
        _check_alpha(self.alpha)
        if self.C0 < 0:
            raise ValueError("C0 must be nonnegative")
        _check_index(self.n)

    @property
    def hs_bound(self) -> float:
        """C0 M(alpha) log(en) / n^{2 alpha}."""
        return self.C0 * m_alpha(self.alpha) * (1.0 + math.log(self.n)) / self.n ** (2 * self.alpha)


def on_square_boundary(n: int, z: complex, tol: float = 1e-12) -> bool:
    d = complex(z) - (2 * n + 1)
    inside = abs(d.real) <= 0.5 + tol and abs(d.imag) <= 0.5 + tol
    edge = min(abs(abs(d.real) - 0.5), abs(abs(d.imag) - 0.5)) <= tol
    return inside and edge


def square_corners(n: int) -> list[complex]:
    zn = 2 * n + 1
    return [zn + 0.5 * (sx + 1j * sy) for sx in (-1, 1) for sy in (-1, 1)]


def _tail_integral(K: float, n: int, power: float = 0.5) -> float:
    """Integral of x^{-power} / (x - n) over [K, inf), K > n, for power in (0, 1]."""
    if power == 0.5 and n > 0:
        rk, rn = math.sqrt(K), math.sqrt(n)
        return math.log((rk + rn) / (rk - rn)) / rn
    # 1/(x - n) <= (K/(K - n)) / x on [K, inf)
    return K / (K - n) * K ** -power / power


@dataclass(frozen=True)
class HSNorm:
    value: float
    tail_bound: float
    k_max: int


def _distances(n_terms: int, z: complex) -> np.ndarray:
    return np.abs(z - (2.0 * np.arange(n_terms) + 1.0))


def hs_norm(w: PointPotential, n: int, z: complex, k_max: int | None = None,
            C0: float | None = None) -> HSNorm:
    """Hilbert-Schmidt norm of K W K at z on the boundary of the square around z_n.

    ell^2 = sum_{j,k} |w_jk|^2 / (|z - z_j| |z - z_k|), evaluated through the
    rank structure of w; tail_bound bounds the omitted j or k > k_max part.
    """
    n = _check_index(n)
    z = complex(z)
    k_max = max(16 * n, 64) if k_max is None else int(k_max)
    if k_max < 16 * n:
        raise ValueError(f"k_max={k_max} below 16n")
    if not on_square_boundary(n, z):
        raise ValueError(f"z={z} is not on the boundary of the square around {2 * n + 1}")
    size = k_max + 1
    dist = _distances(size, z)
    if np.any(dist == 0.0):
        raise ValueError("z coincides with a lattice point")
    phi = amplitudes(w, size)
    c = w.couplings
    q = (phi / dist) @ phi.T
    ell2 = float(np.real(np.sum(c[:, None] * np.conj(c)[None, :] * q * q)))
    ell2 = max(ell2, 0.0)
    if C0 is None:
        from .operator import decay_constant
        C0 = decay_constant(w)
    mu_head = float(np.sum((1.0 + np.arange(size)) ** -0.5 / dist))
    # |z - z_j| >= (3/2)(j - n) beyond the square
    mu_tail = _tail_integral(k_max, n) * 2.0 / 3.0
    extra = C0 * C0 * (2.0 * mu_head * mu_tail + mu_tail * mu_tail)
    value = math.sqrt(ell2)
    return HSNorm(value, math.sqrt(ell2 + extra) - value, k_max)


def hs_norm_dense(w: PointPotential, n: int, z: complex, size: int) -> float:
    """Same double sum from an explicitly assembled matrix; O(size^2) oracle."""
    # |(KWK)_jk|^2 = |w_jk|^2 / (|z - z_j| |z - z_k|)
    d = 1.0 / _distances(size, complex(z))
    mat = perturbation_matrix(w, size)
    return float(np.sqrt(np.sum(np.abs(mat) ** 2 * np.outer(d, d))))


def mu_sum(n: int, z: complex, alpha: float = 0.25, k_max: int | None = None) -> tuple[float, float]:
    """mu = sum_j (1+j)^{-2 alpha} / |z - z_j|; returns (partial sum, tail bound)."""
    n = _check_index(n)
    alpha = _check_alpha(alpha)
    k_max = max(64 * n, 4096) if k_max is None else int(k_max)
    size = k_max + 1
    head = float(np.sum((1.0 + np.arange(size)) ** (-2 * alpha) / _distances(size, complex(z))))
    tail = _tail_integral(k_max, n, 2 * alpha) * 2.0 / 3.0
    return head, tail


def mu_bound(n: int, alpha: float = 0.25) -> float:
    """(M(alpha) + 2 log n) / n^{2 alpha}; at alpha = 1/4 this is (2/sqrt n)(5 + log n)."""
    return (m_alpha(alpha) + 2.0 * math.log(n)) / n ** (2 * alpha)


def k_operator_norm(n: int, z: complex, size: int | None = None) -> float:
    """max_j |z - z_j|^{-1/2}."""
    size = max(4 * n + 8, 64) if size is None else size
    return float(np.max(_distances(size, complex(z)) ** -0.5))


def k_fourth_power_sum(n: int, z: complex, k_max: int | None = None) -> float:
    """sum_j |z - z_j|^{-2}, with the tail beyond k_max added by the integral test."""
    k_max = max(64 * n, 4096) if k_max is None else k_max
    d = _distances(k_max + 1, complex(z))
    tail = 1.0 / (2.0 * (k_max - n) - 1.0) / 2.0 if k_max > n else 0.0
    return float(np.sum(d ** -2.0)) + tail


def distance_violations(n: int, z: complex, j_max: int) -> list[int]:
    """Indices j with |n - j| >= 2 breaking (3/2)|n-j| <= |z - z_j| <= (5/2)|n-j|."""
    j = np.arange(j_max + 1)
    gap = np.abs(n - j)
    d = _distances(j_max + 1, complex(z))
    mask = gap >= 2
    bad = mask & ((d < 1.5 * gap) | (d > 2.5 * gap))
    return [int(k) for k in j[bad]]


def neumann_tail_norm(w: PointPotential, n: int, z: complex, m: int, size: int) -> float:
    """Trace norm of sum_{j >= m} (R0 W)^j R0 for the size x size truncation.

    Computed as the full resolvent minus the first m terms, then summed
    singular values.
    """
    z = complex(z)
    W = perturbation_matrix(w, size).astype(complex)
    r0 = 1.0 / (z - (2.0 * np.arange(size) + 1.0))
    full = np.linalg.inv(np.diag(1.0 / r0) - W)
    head = np.zeros_like(full)
    term = np.diag(r0).astype(complex)
    for _ in range(m):
        head += term
        term = (r0[:, None] * W) @ term
    return float(np.sum(np.linalg.svd(full - head, compute_uv=False)))


def neumann_tail_bound(n: int, m: int, alpha: float = 0.25, C0: float = 1.0) -> float:
    """4 (C0 M(alpha) log(en) / n^{2 alpha})^m."""
    return 4.0 * BoundContext(alpha, C0, n).hs_bound ** m


@dataclass(frozen=True)
class ThresholdResult:
    """Large root X of t log(eX) / X^beta = 1/2 with closed-form upper bounds.

    upper = ((2/beta) t log(A t / beta))^{1/beta}; upper_two replaces the
    2/beta prefactor by 2, which agrees at beta = 1 and is too small below.
    """

    t: float
    beta: float
    X: float
    upper: float
    upper_two: float
    residual: float
    A: float

    @property
    def tau(self) -> float:
        return 2.0 / self.beta * math.exp(self.beta) * self.t

    @property
    def Y(self) -> float:
        """(eX)^beta, which solves Y = tau log Y."""
        return (math.e * self.X) ** self.beta

    @property
    def bound_holds(self) -> bool:
        return self.X <= self.upper


def _threshold_residual(t: float, beta: float, log_x: float) -> float:
    return t * (1.0 + log_x) * math.exp(-beta * log_x) - 0.5


def x_beta_solve(t: float, beta: float, A: float = DEFAULT_A) -> ThresholdResult:
    """Solve t log(eX) / X^beta = 1/2 for the large root.

    The left side rises until log X = 1/beta - 1 and then decreases, so the
    large root is bracketed to the right of that peak, found by bisection in
    log X and polished with Newton steps.
    """
    t = float(t)
    beta = float(beta)
    if not t > 0:
        raise ValueError("t must be positive")
    if not 0 < beta <= 1:
        raise ValueError("beta must lie in (0, 1]")
    peak = 1.0 / beta - 1.0
    if _threshold_residual(t, beta, peak) < 0:
        raise ValueError(f"no large root: t={t} is below e^(1-beta) beta / 2")
    lo, hi = peak, peak + 1.0
    while _threshold_residual(t, beta, hi) > 0:
        lo, hi = hi, 2.0 * hi + 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _threshold_residual(t, beta, mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, hi):
            break
    # Newton on g(L) = log t + log(1 + L) - beta L + log 2, monotone past the peak
    L = 0.5 * (lo + hi)
    for _ in range(4):
        g = math.log(t) + math.log1p(L) - beta * L + math.log(2.0)
        dg = 1.0 / (1.0 + L) - beta
        if dg == 0.0:
            break
        L -= g / dg
    X = math.exp(L)
    resid = abs(t * math.log(math.e * X) / X ** beta - 0.5)
    core = t * math.log(A * t / beta)
    upper = (2.0 / beta * core) ** (1.0 / beta) if core > 0 else float("nan")
    two = 2.0 ** (1.0 / beta) * core ** (1.0 / beta) if core > 0 else float("nan")
    return ThresholdResult(t, beta, X, upper, two, resid, A)


def y_of_tau(tau: float) -> float:
    """Large solution of Y = tau log Y (tau > e)."""
    if not tau > math.e:
        raise ValueError("tau must exceed e")
    y = tau * math.log(tau)
    for _ in range(100):
        nxt = tau * math.log(y)
        if abs(nxt - y) <= 1e-15 * y:
            return nxt
        y = nxt
    return y


def threshold_condition(n: int, C0: float, alpha: float) -> float:
    """C0 M(alpha) log(en) / n^{2 alpha}; the series converges where this is <= 1/2."""
    return BoundContext(alpha, C0, n).hs_bound


def n_star(C0: float, alpha: float, A: float = DEFAULT_A, form: str = "corrected") -> int:
    """Level beyond which C0 M(alpha) log(en) / n^{2 alpha} <= 1/2.

    form="corrected": [(1/alpha) C0 M log((A/(2 alpha)) C0 M)]^{1/(2 alpha)},
    the closed-form bound on the exact root.  form="two_prefactor":
    [2 C0 M log((A/(2 alpha)) 2 C0 M)]^{1/(2 alpha)}.  form="exact": the
    smallest integer at or past the large root itself.
    """
    alpha = _check_alpha(alpha)
    C0 = float(C0)
    if not C0 > 0:
        raise ValueError("C0 must be positive")
    t = C0 * m_alpha(alpha)
    beta = 2.0 * alpha
    if form == "exact":
        try:
            return max(1, math.ceil(x_beta_solve(t, beta).X))
        except ValueError:
            return 1
    if form == "corrected":
        core = t * math.log(A * t / beta)
        val = (2.0 / beta * core) ** (1.0 / beta) if core > 0 else 1.0
    elif form == "two_prefactor":
        core = 2.0 * t * math.log(A / beta * 2.0 * t)
        val = core ** (1.0 / beta) if core > 0 else 1.0
    else:
        raise ValueError(f"unknown form {form!r}")
    return max(1, math.ceil(val))


NONREAL_CASES = ("p_gt_2", "p_eq_2", "p_lt_2", "point", "abstract")


def nonreal_bound(gamma: float, case: str, nu: float | None = None, C: float = 1.0,
                  p: float | None = None) -> float:
    """Ceiling on the number of non-real eigenvalues of L0 + i W.

    nu is the size of the real odd w (an L^p norm or the total point mass);
    the "abstract" case uses only gamma: (C (1 + |gamma|) log(e + |gamma|))^2.
    """
    if case not in NONREAL_CASES:
        raise ValueError(f"unknown case {case!r}; expected one of {NONREAL_CASES}")
    if not C > 0:
        raise ValueError("C must be positive")
    if case == "abstract":
        g = abs(float(gamma))
        return (C * (1.0 + g) * math.log(math.e + g)) ** 2
    if nu is None or nu < 0:
        raise ValueError("nu must be given and nonnegative")
    base = nu * math.log1p(nu)
    if case == "point":
        return C * base ** 6
    if case == "p_eq_2":
        return C * (nu * math.log1p(nu) ** 2) ** 4
    if p is None:
        raise ValueError(f"case {case} needs the exponent p")
    if case == "p_gt_2":
        if not p > 2:
            raise ValueError("p_gt_2 requires p > 2")
        return C * base ** (2 * p)
    if not 1 <= p < 2:
        raise ValueError("p_lt_2 requires 1 <= p < 2")
    return C * base ** (3.0 / (1.0 - 1.0 / (2.0 * p)))
