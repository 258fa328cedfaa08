"""Normalized Hermite functions and their large-index approximations.

The functions are h_n(x) = (2^n n! sqrt(pi))^{-1/2} H_n(x) exp(-x^2/2) with
the classical physicists' polynomials H_n, so that the h_n form an
orthonormal basis of L^2(R) and satisfy (-d^2/dx^2 + x^2) h_n = (2n+1) h_n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

PI_M14 = math.pi ** -0.25

# rescale the running pair once it leaves this window; keeps the recurrence
# usable when the Gaussian seed alone would underflow (|x| > ~38)
_BIG = 2.0 ** 500
_LOG_BIG = 500.0 * math.log(2.0)


def _check_index(n) -> int:
    if isinstance(n, bool) or int(n) != n:
        raise TypeError(f"index must be an integer, got {n!r}")
    n = int(n)
    if n < 0:
        raise ValueError(f"index must be nonnegative, got {n}")
    return n


def _check_point(x) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"x must be finite, got {x}")
    return x


def _row(n_max: int, x: float) -> np.ndarray:
    out = np.empty(n_max + 1)
    # h_k = mantissa * exp(log_scale); the seed carries exp(-x^2/2) in log_scale
    log_scale = -0.5 * x * x
    prev = 0.0
    cur = PI_M14
    out[0] = cur * math.exp(log_scale)
    for k in range(n_max):
        nxt = x * math.sqrt(2.0 / (k + 1)) * cur - math.sqrt(k / (k + 1)) * prev
        prev, cur = cur, nxt
        if abs(cur) > _BIG:
            prev /= _BIG
            cur /= _BIG
            log_scale += _LOG_BIG
        out[k + 1] = cur * math.exp(log_scale)
    return out


def hermite_row(n_max: int, x: float) -> np.ndarray:
    """Return [h_0(x), ..., h_{n_max}(x)] by the normalized three-term recurrence."""
    n_max = _check_index(n_max)
    x = _check_point(x)
    return _row(n_max, x)


def hermite_eval(n: int, x: float) -> float:
    """Evaluate h_n(x).

    Uses h_{k+1} = x sqrt(2/(k+1)) h_k - sqrt(k/(k+1)) h_{k-1} seeded with
    h_0 = pi^{-1/4} exp(-x^2/2), so H_n and n! never appear explicitly.
    """
    n = _check_index(n)
    x = _check_point(x)
    return float(_row(n, x)[n])


def hermite_table(n_max: int, xs) -> np.ndarray:
    """Rows of h_0..h_{n_max} for several points, shape (len(xs), n_max + 1)."""
    n_max = _check_index(n_max)
    xs = [_check_point(x) for x in np.atleast_1d(xs)]
    return np.array([_row(n_max, x) for x in xs]).reshape(len(xs), n_max + 1)


@lru_cache(maxsize=64)
def _cached_row(n_max: int, x: float) -> np.ndarray:
    row = _row(n_max, x)
    row.setflags(write=False)
    return row


def amplitude_row(n_max: int, x: float) -> np.ndarray:
    """Read-only [h_0(x), ..., h_{n_max}(x)], memoized for repeated lattice sums."""
    n_max = _check_index(n_max)
    x = _check_point(x)
    # round the length up so nearby cutoffs share one cached row
    size = 1 << max(n_max, 1).bit_length()
    return _cached_row(size, x)[: n_max + 1]


def hermite_asymptotic(m: int, x: float) -> float:
    """Two-term large-m approximation of h_m(x), O(m^{-5/4}) accurate for fixed x."""
    m = _check_index(m)
    if m == 0:
        raise ValueError("asymptotic form requires m >= 1")
    x = _check_point(x)
    root = math.sqrt(2 * m + 1)
    # reduce m*pi/2 exactly by m mod 4 before adding the x-dependent phase
    c, s = math.cos(x * root), math.sin(x * root)
    cos_t, sin_t = ((c, s), (s, -c), (-c, -s), (-s, c))[m % 4]
    pref = 2.0 ** 0.25 / math.sqrt(math.pi) * m ** -0.25
    return pref * (cos_t + x ** 3 / 6.0 / root * sin_t)


@dataclass(frozen=True)
class AsymptoticAmplitude:
    """Two leading terms of h_k(b)^2 for large k.

    leading is the k^{-1/2} term, correction the k^{-1} term.
    """

    k: int
    b: float
    leading: float
    correction: float

    @property
    def total(self) -> float:
        return self.leading + self.correction


def a_squared_expansion(k: int, b: float) -> AsymptoticAmplitude:
    """Expand h_k(b)^2 to order 1/k.

    leading    = (1/pi)(2k)^{-1/2} [1 + (-1)^k cos(2b sqrt(2k))]
    correction = ((-1)^{k+1} / (2 pi k)) b (1 - b^2/3) sin(2b sqrt(2k))
    """
    k = _check_index(k)
    if k == 0:
        raise ValueError("expansion requires k >= 1")
    b = _check_point(b)
    sign = 1.0 if k % 2 == 0 else -1.0
    phase = 2.0 * b * math.sqrt(2 * k)
    leading = (1.0 + sign * math.cos(phase)) / (math.pi * math.sqrt(2 * k))
    correction = -sign * b * (1.0 - b * b / 3.0) * math.sin(phase) / (2.0 * math.pi * k)
    return AsymptoticAmplitude(k=k, b=b, leading=leading, correction=correction)


def a0_squared(b: float) -> float:
    """h_0(b)^2 = pi^{-1/2} exp(-b^2)."""
    b = _check_point(b)
    return math.exp(-b * b) / math.sqrt(math.pi)
