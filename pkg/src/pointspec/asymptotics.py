"""Closed-form large-n eigenvalue formulas and the lattice sums behind them.

Notation: z_n = 2n + 1, a_k = h_k(b), phase(n) = 2b sqrt(2n).
The two-point potentials are t (delta(x-b) + delta(x+b)) + s (delta(x-b) - delta(x+b)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .hermite import _check_index, a0_squared, amplitude_row


def _sign(n: int) -> float:
    return 1.0 if n % 2 == 0 else -1.0


def _phase(n: int, b: float) -> float:
    return 2.0 * b * math.sqrt(2 * n)


def kappa(n: int, b: float) -> float:
    """(1/2pi) [(-1)^{n+1} sin(2b sqrt(2n)) - (1/2) sin(4b sqrt(2n))]."""
    n = _check_index(n)
    if n < 1:
        raise ValueError("kappa requires n >= 1")
    p = _phase(n, b)
    return (-_sign(n) * math.sin(p) - 0.5 * math.sin(2.0 * p)) / (2.0 * math.pi)


ZETA_VARIANTS = ("b2", "b3")


def zeta_coefficient(b: float, variant: str = "b2") -> float:
    """(b/pi)(1 - b^2/3) or, for variant "b3", (b/pi)(1 - b^3/3)."""
    if variant == "b2":
        return b / math.pi * (1.0 - b * b / 3.0)
    if variant == "b3":
        return b / math.pi * (1.0 - b ** 3 / 3.0)
    raise ValueError(f"unknown zeta variant {variant!r}")


def chi_zeta_omega(n: int, b: float, zeta_variant: str = "b2") -> tuple[float, float, float]:
    """Coefficient functions of the even-pair expansion in their unit normalization.

    chi   = (4/pi) [1 + (-1)^n cos(2b sqrt(2n))]
    zeta  = zeta_coefficient(b) sin(2b sqrt(2n))
    omega = 1/8 + (-1)^n (1/2) sin(4b sqrt(2n))
    """
    n = _check_index(n)
    if n < 1:
        raise ValueError("requires n >= 1")
    p = _phase(n, b)
    chi = 4.0 / math.pi * (1.0 + _sign(n) * math.cos(p))
    zeta = zeta_coefficient(b, zeta_variant) * math.sin(p)
    omega = 0.125 + _sign(n) * 0.5 * math.sin(2.0 * p)
    return chi, zeta, omega


KINDS = ("odd_pair", "even_pair", "mixed_pair", "single_offcenter", "single_center")
FORMS = ("trace", "omega", "omega_signed")


@dataclass(frozen=True)
class AsymptoticModel:
    """Which closed form to evaluate.

    kind selects the potential family; t, s, b its parameters.  form picks
    between the expansion derived from the trace corrections ("trace")
    and two arrangements built on the omega coefficient: "omega"
    (t chi / sqrt(2n) + [t zeta + t^2 omega]/n, with (t^2 + s^2) omega for the
    mixed pair) and "omega_signed" (the same 1/n bracket multiplied by
    (-1)^{n+1}).  band_constant scales the reported C log n / n^{3/2} band.
    """

    kind: str
    t: complex = 0.0
    s: complex = 0.0
    b: float = 0.0
    form: str = "trace"
    zeta_variant: str = "b2"
    band_constant: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if self.form not in FORMS:
            raise ValueError(f"unknown form {self.form!r}")
        if self.zeta_variant not in ZETA_VARIANTS:
            raise ValueError(f"unknown zeta variant {self.zeta_variant!r}")
        if self.kind in ("odd_pair", "even_pair", "mixed_pair") and not self.b > 0:
            raise ValueError(f"{self.kind} needs b > 0")
        if self.kind == "odd_pair" and self.t != 0:
            raise ValueError("odd_pair has no even coupling; use mixed_pair")
        if self.kind == "even_pair" and self.s != 0:
            raise ValueError("even_pair has no odd coupling; use mixed_pair")
        if self.kind == "single_center" and self.b != 0:
            raise ValueError("single_center sits at b = 0")
        if self.kind in ("single_center", "single_offcenter") and self.s != 0:
            raise ValueError("single-point models take only the coupling t")

    def potential(self):
        """The point potential this model describes."""
        from .operator import PointPotential, TwoPointForm, delta
        if self.kind == "single_center":
            return delta(0.0, 2 * self.t)
        if self.kind == "single_offcenter":
            return delta(self.b, self.t)
        return TwoPointForm(self.t, self.s, self.b).to_potential()


def _even_terms(m: AsymptoticModel, n: int):
    """Leading 1/sqrt(2n) term and the t-linear 1/n term of the even coupling."""
    chi, _, _ = chi_zeta_omega(n, m.b, m.zeta_variant)
    zeta = zeta_coefficient(m.b, m.zeta_variant) * math.sin(_phase(n, m.b))
    return chi, zeta


def lambda_asymptotic(model: AsymptoticModel, n: int) -> tuple[complex, float]:
    """Formula value for lambda_n and the band C log n / n^{3/2}."""
    n = _check_index(n)
    if n < 1:
        raise ValueError("requires n >= 1")
    m = model
    zn = 2 * n + 1
    rt = math.sqrt(2 * n)
    band = m.band_constant * math.log(n) / n ** 1.5 if n > 1 else m.band_constant
    t, s, b = m.t, m.s, m.b
    k = m.kind
    if k == "odd_pair":
        value = zn + s * s * kappa(n, b) / n
    elif k in ("even_pair", "mixed_pair"):
        chi, zeta = _even_terms(m, n)
        _, _, omega = chi_zeta_omega(n, b)
        if m.form == "trace":
            value = (zn + t * chi / (2.0 * rt) - _sign(n) * t * zeta / n
                     + (s * s - t * t) * kappa(n, b) / n)
        else:
            quad = (t * t + s * s) if k == "mixed_pair" else t * t
            bracket = (t * zeta + quad * omega) / n
            if m.form == "omega_signed":
                bracket *= -_sign(n)
            value = zn + t * chi / rt + bracket
    elif k == "single_offcenter":
        p = _phase(n, b)
        value = (zn + t * (1.0 + _sign(n) * math.cos(p)) / (math.pi * rt)
                 - t / math.pi * _sign(n) / (2 * n) * b * (1.0 - b * b / 3.0) * math.sin(p))
    else:
        value = zn + (4.0 * t / math.pi / rt if n % 2 == 0 else 0.0)
    if isinstance(value, complex) and value.imag == 0.0:
        value = value.real
    return value, band


# lattice sums -------------------------------------------------------------

AUX_KINDS = ("sigma_tilde", "sigma_prime", "tau_prime", "xi", "eta")


@dataclass(frozen=True)
class AuxSumValue:
    """A lattice sum over k <= k_max plus a model estimate of the rest.

    value = partial + estimated tail; tail_bound bounds the size of the
    omitted part by the integral test.
    """

    n: int
    value: float
    tail_bound: float
    k_max: int
    partial: float = 0.0


def _inv_sqrt_tail(K: float, n: int) -> float:
    """Integral of x^{-1/2} / (n - x) over [K, inf) for K > n (negative)."""
    if n == 0:
        return -2.0 / math.sqrt(K)
    rk, rn = math.sqrt(K), math.sqrt(n)
    return -math.log((rk + rn) / (rk - rn)) / rn


def _osc_tail(U: float, freq: float, g) -> float:
    """Integral of cos(freq u) g(u) over [U, inf)."""
    if freq == 0.0:
        return integrate.quad(g, U, np.inf, limit=200)[0]
    return integrate.quad(g, U, np.inf, weight="cos", wvar=freq, limlst=200)[0]


def _parity_indices(n: int, k_max: int, same: bool, start: int = 0) -> np.ndarray:
    first = n % 2 if same else (n + 1) % 2
    while first < start:
        first += 2
    return np.arange(first, k_max + 1, 2)


def aux_sum(kind: str, n: int, b: float = 0.0, k_max: int | None = None,
            amplitudes: str = "exact") -> AuxSumValue:
    """Direct evaluation of one of the lattice sums.

    sigma_tilde = sum over n-k odd of a_k^2 / (n - k)
    sigma_prime = sum over k != n, n-k even of a_k^2 / (n - k)
    tau_prime   = sum over k != n, n-k even of a_k^2 / (n - k)^2
    xi          = sum over k >= 1, n-k odd of k^{-1/2} / (n - k)
    eta         = sum over k >= 1, n-k odd of k^{-1/2} cos(2b sqrt(2k+1)) / (n - k)

    amplitudes="leading" replaces a_k^2 (k >= 1) by its k^{-1/2} asymptotic
    term in the three sigma/tau sums.  The tail beyond k_max is estimated by
    integrating the leading amplitude model (a midpoint rule for the
    step-two parity lattice).
    """
    if kind not in AUX_KINDS:
        raise ValueError(f"unknown sum {kind!r}; expected one of {AUX_KINDS}")
    n = _check_index(n)
    k_max = 16 * max(n, 1) if k_max is None else int(k_max)
    if k_max < 16 * n:
        raise ValueError(f"k_max={k_max} below 16n={16 * n}")
    if amplitudes not in ("exact", "leading"):
        raise ValueError("amplitudes must be 'exact' or 'leading'")
    b = float(b)

    if kind in ("xi", "eta"):
        k = _parity_indices(n, k_max, same=False, start=1).astype(float)
        d = n - k
        terms = k ** -0.5 / d
        if kind == "eta":
            terms = terms * np.cos(2.0 * b * np.sqrt(2.0 * k + 1.0))
        partial = float(np.sum(terms))
        K = k[-1] + 1.0  # midpoint edge of the first omitted cell
        bound = 0.5 * abs(_inv_sqrt_tail(K, n))
        if kind == "xi":
            tail = 0.5 * _inv_sqrt_tail(K, n)
        else:
            # u = sqrt(2x + 1): x^{-1/2} dx / (n - x) = sqrt2 u du / (sqrt(u^2-1)(n - (u^2-1)/2))
            g = lambda u: math.sqrt(2.0) * u / (math.sqrt(u * u - 1.0) * (n - (u * u - 1.0) / 2.0))
            tail = 0.5 * _osc_tail(math.sqrt(2.0 * K + 1.0), 2.0 * b, g)
        return AuxSumValue(n, partial + tail, bound, k_max, partial)

    same = kind != "sigma_tilde"
    k = _parity_indices(n, k_max, same=same)
    if same:
        k = k[k != n]
    if amplitudes == "exact":
        a2 = amplitude_row(k_max, b)[k] ** 2
    else:
        kk = k.astype(float)
        safe = np.maximum(kk, 1.0)
        a2 = (1.0 + np.where(k % 2 == 0, 1.0, -1.0) * np.cos(2.0 * b * np.sqrt(2.0 * safe))) / (
            math.pi * np.sqrt(2.0 * safe))
        a2 = np.where(k == 0, a0_squared(b), a2)
    d = (n - k).astype(float)
    if kind == "tau_prime":
        terms = a2 / (d * d)
    else:
        terms = a2 / d
    partial = float(np.sum(terms))
    K = float(k[-1]) + 1.0
    # tail parity (-1)^k is fixed on the lattice
    par = _sign(int(k[-1]))
    pref = 1.0 / (math.pi * math.sqrt(2.0))
    if kind == "tau_prime":
        # x^{-1/2} / (x - n)^2 <= (K/(K-n))^2 x^{-5/2}
        bound = 2.0 * pref * 0.5 * (K / (K - n)) ** 2 * (2.0 / 3.0) * K ** -1.5
        tail = 0.5 * bound
        return AuxSumValue(n, partial + tail, bound, k_max, partial)
    smooth = pref * 0.5 * _inv_sqrt_tail(K, n)
    # u = sqrt(2x): x^{-1/2} dx / (n - x) = sqrt2 du / (n - u^2/2)
    g = lambda u: math.sqrt(2.0) / (n - u * u / 2.0)
    osc = par * pref * 0.5 * _osc_tail(math.sqrt(2.0 * K), 2.0 * b, g)
    bound = 2.0 * abs(smooth)
    return AuxSumValue(n, partial + smooth + osc, bound, k_max, partial)


def sigma_tilde_closed_form(n: int, b: float) -> float:
    """(-1)^{n+1} sin(2b sqrt(2n)) / (2 sqrt(2n))."""
    return -_sign(n) * math.sin(_phase(n, b)) / (2.0 * math.sqrt(2 * n))


# constant A = B ------------------------------------------------------------

AB_CLOSED_FORM = 2.0 * math.log(1.0 + math.sqrt(2.0))


@dataclass(frozen=True)
class ConstantCheck:
    closed_form: float
    first_integral: float
    second_integral: float
    first_error: float
    second_error: float


def constant_AB() -> ConstantCheck:
    """2 log(1 + sqrt 2) and the two integrals that must reproduce it.

    first:  integral over [0, 1] of sqrt2 / (w (1 + w)^{1/2}), w = sqrt(1 - t^2)
    second: integral over [1, inf) of dt / (t (1 + t)^{1/2})
    """
    # t = 1 - u^2 removes the inverse square-root singularity at t = 1:
    # 1 - t^2 = u^2 (2 - u^2) and dt = -2u du leave a smooth integrand
    def first(u):
        w = u * math.sqrt(2.0 - u * u)
        return 2.0 * math.sqrt(2.0) / (math.sqrt(2.0 - u * u) * math.sqrt(1.0 + w))

    i1, e1 = integrate.quad(first, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13)
    i2, e2 = integrate.quad(lambda t: 1.0 / (t * math.sqrt(1.0 + t)), 1.0, np.inf,
                            epsabs=1e-14, epsrel=1e-13)
    if e1 > 1e-9 or e2 > 1e-9:
        raise RuntimeError(f"quadrature did not converge (error estimates {e1:.2e}, {e2:.2e})")
    return ConstantCheck(AB_CLOSED_FORM, i1, i2, e1, e2)
