"""Point-interaction potentials and their truncated Hermite-basis matrices.

A potential w(x) = sum_m c_m delta(x - b_m) acts in the Hermite basis as the
matrix w_jk = sum_m c_m h_j(b_m) h_k(b_m); the truncated operator is
diag(1, 3, ..., 2N-1) plus the N x N block of that matrix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hermite import _check_index, amplitude_row


@dataclass(frozen=True)
class PointPotential:
    """w(x) = sum of c * delta(x - b) over the (c, b) terms."""

    terms: tuple[tuple[complex, float], ...]

    def __post_init__(self):
        terms = tuple((complex(c), float(b)) for c, b in self.terms)
        if not terms:
            raise ValueError("a point potential needs at least one term")
        for c, b in terms:
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise ValueError(f"coupling must be finite, got {c}")
            if not math.isfinite(b):
                raise ValueError(f"location must be finite, got {b}")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def zero(cls) -> "PointPotential":
        return cls(((0.0, 0.0),))

    @property
    def couplings(self) -> np.ndarray:
        return np.array([c for c, _ in self.terms], dtype=complex)

    @property
    def locations(self) -> np.ndarray:
        return np.array([b for _, b in self.terms], dtype=float)

    @property
    def nu(self) -> float:
        """Total mass sum |c_m|."""
        return float(sum(abs(c) for c, _ in self.terms))

    @property
    def is_real(self) -> bool:
        return all(c.imag == 0.0 for c, _ in self.terms)

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c, _ in self.terms)

    def scaled(self, factor: complex) -> "PointPotential":
        return PointPotential(tuple((factor * c, b) for c, b in self.terms))

    def __add__(self, other: "PointPotential") -> "PointPotential":
        return PointPotential(self.terms + other.terms)

    def describe(self) -> str:
        return ";".join(f"{_fmt_c(c)}@{b!r}" for c, b in self.terms)


def _fmt_c(c: complex) -> str:
    if c.imag == 0:
        return repr(c.real)
    return f"{c.real!r}{c.imag:+}j"


@dataclass(frozen=True)
class TwoPointForm:
    """w = t * (delta(x-b) + delta(x+b)) + s * (delta(x-b) - delta(x+b))."""

    t: complex
    s: complex
    b: float

    def __post_init__(self):
        if not float(self.b) > 0:
            raise ValueError(f"b must be positive, got {self.b}")

    def to_potential(self) -> PointPotential:
        return PointPotential(((self.t + self.s, self.b), (self.t - self.s, -self.b)))


def odd_pair(b: float, s: complex = 1.0) -> PointPotential:
    """s * (delta(x-b) - delta(x+b))."""
    return TwoPointForm(0.0, s, b).to_potential()


def even_pair(b: float, t: complex = 1.0) -> PointPotential:
    """t * (delta(x-b) + delta(x+b))."""
    return TwoPointForm(t, 0.0, b).to_potential()


def delta(b: float, c: complex = 1.0) -> PointPotential:
    """c * delta(x - b)."""
    return PointPotential(((c, b),))


def amplitudes(w: PointPotential, size: int) -> np.ndarray:
    """Array phi[m, k] = h_k(b_m) for k < size."""
    return np.array([amplitude_row(size - 1, b) for b in w.locations])


def _dtype(w: PointPotential):
    return float if w.is_real else complex


def perturbation_row(w: PointPotential, n: int, size: int) -> np.ndarray:
    """Row w_{n,k}, k < size; real dtype for real couplings."""
    n = _check_index(n)
    phi = amplitudes(w, max(size, n + 1))
    c = w.couplings if not w.is_real else w.couplings.real
    return np.sum((c * phi[:, n])[:, None] * phi[:, :size], axis=0)


def matrix_element(w: PointPotential, j: int, k: int) -> complex:
    """w_jk = sum_m c_m h_j(b_m) h_k(b_m)."""
    j = _check_index(j)
    k = _check_index(k)
    top = max(j, k)
    total = 0j
    for c, b in w.terms:
        row = amplitude_row(top, b)
        total += c * (row[j] * row[k])
    return total


def perturbation_matrix(w: PointPotential, size: int) -> np.ndarray:
    """Dense w_jk for j, k < size, accumulated one location at a time."""
    phi = amplitudes(w, size)
    out = np.zeros((size, size), dtype=_dtype(w))
    for c, row in zip(w.terms, phi):
        coupling = c[0].real if w.is_real else c[0]
        out += coupling * np.outer(row, row)
    return out


@dataclass(frozen=True)
class TruncatedOperator:
    """N x N section of L0 + W in the Hermite basis."""

    dim: int
    entries: np.ndarray = field(repr=False)
    potential: PointPotential

    @property
    def diagonal(self) -> np.ndarray:
        return 2.0 * np.arange(self.dim) + 1.0

    @property
    def perturbation(self) -> np.ndarray:
        return self.entries - np.diag(self.diagonal)


def build_truncated(w: PointPotential, N: int) -> TruncatedOperator:
    """Assemble diag(2k+1) + w_jk for j, k < N as a complex matrix."""
    if isinstance(N, bool) or int(N) != N or int(N) < 1:
        raise ValueError(f"truncation size must be a positive integer, got {N!r}")
    N = int(N)
    for c, _ in w.terms:
        if math.isnan(c.real) or math.isnan(c.imag):
            raise ValueError("coupling is NaN")
    # the perturbation is formed first so structural zeros stay exact
    entries = perturbation_matrix(w, N).astype(complex)
    entries[np.diag_indices(N)] += 2.0 * np.arange(N) + 1.0
    entries.setflags(write=False)
    return TruncatedOperator(dim=N, entries=entries, potential=w)


def decay_constant(w: PointPotential, k_max: int = 512) -> float:
    """Empirical C0 = max |w_jk| (1+j)^{1/4} (1+k)^{1/4} over j, k <= k_max."""
    size = _check_index(k_max) + 1
    phi = amplitudes(w, size)
    weight = (1.0 + np.arange(size)) ** 0.25
    scaled = phi * weight
    mat = np.zeros((size, size), dtype=complex)
    for (c, _), row in zip(w.terms, scaled):
        mat += c * np.outer(row, row)
    return float(np.max(np.abs(mat)))
