"""Exact eigenvalues of L0 + sum c_m delta(x - b_m) from a finite secular equation.

With g(x, y; lam) the kernel of (L0 - lam)^{-1}, a point-interaction
eigenvalue solves det(I + G(lam) C) = 0 where G_lm = g(b_l, b_m; lam) and
C = diag(c).  The kernel has the closed form

    g(x, y; lam) = Gamma(-nu) D_nu(-sqrt2 min(x,y)) D_nu(sqrt2 max(x,y)) / (2 sqrt(pi))

with nu = (lam - 1)/2 and D_nu the parabolic cylinder function, so no basis
truncation enters.  Used to remove the slow O(N^{-1/2}) truncation error of
the matrix spectrum.
"""
from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp

from .hermite import amplitude_row
from .operator import PointPotential


def green_function(x: float, y: float, lam: complex, dps: int = 25) -> complex:
    """Kernel of (L0 - lam)^{-1} at (x, y); lam must avoid 1, 3, 5, ..."""
    with mp.workdps(dps):
        return complex(_green(mp.mpf(x), mp.mpf(y), mp.mpmathify(lam)))


def _green(x, y, lam):
    nu = (lam - 1) / 2
    lo, hi = (x, y) if x <= y else (y, x)
    r2 = mp.sqrt(2)
    return mp.gamma(-nu) * mp.pcfd(nu, -r2 * lo) * mp.pcfd(nu, r2 * hi) / (2 * mp.sqrt(mp.pi))


def _secular(w: PointPotential, lam):
    nu = (lam - 1) / 2
    r2 = mp.sqrt(2)
    pts = [mp.mpf(b) for b in w.locations]
    left = [mp.pcfd(nu, -r2 * b) for b in pts]
    right = [mp.pcfd(nu, r2 * b) for b in pts]
    pref = mp.gamma(-nu) / (2 * mp.sqrt(mp.pi))
    cs = [mp.mpc(c) for c in w.couplings]
    J = len(pts)
    m = mp.matrix(J, J)
    for l in range(J):
        for k in range(J):
            # the smaller location takes the decaying-left factor
            lo, hi = (l, k) if pts[l] <= pts[k] else (k, l)
            m[l, k] = (1 if l == k else 0) + pref * left[lo] * right[hi] * cs[k]
    return mp.det(m)


def secular_determinant(w: PointPotential, lam: complex, dps: int = 25) -> complex:
    """det(I + G(lam) C) for the point potential w."""
    with mp.workdps(dps):
        return complex(_secular(w, mp.mpmathify(lam)))


@dataclass(frozen=True)
class SecularRoot:
    n: int
    seed: complex
    value: complex
    step: float
    converged: bool


def exact_eigenvalue(w: PointPotential, n: int, seed: complex, dps: int = 25,
                     tol: float = 1e-13) -> SecularRoot:
    """Refine the eigenvalue attached to level n, starting from seed.

    The level's own pole is divided out by solving
    det(I + G C) (lam - (2n+1)) = 0 with the secant method.  When every
    h_n(b_m) vanishes the level decouples and 2n+1 is returned exactly.
    """
    zn = 2 * n + 1
    amps = [amplitude_row(n, b)[n] for b in w.locations]
    if all(a == 0.0 for a in amps) or w.is_zero:
        return SecularRoot(n, complex(seed), complex(zn), 0.0, True)
    with mp.workdps(dps):
        f = lambda lam: _secular(w, lam) * (lam - zn)
        seed = complex(seed)
        x0 = mp.mpf(seed.real) if seed.imag == 0.0 else mp.mpc(seed)
        x1 = x0 + mp.mpf(1e-7) * (1 + abs(x0 - zn))
        try:
            root = mp.findroot(f, (x0, x1), solver="secant", tol=(tol * zn) ** 2,
                                maxsteps=60, verify=False)
        except (ValueError, ZeroDivisionError):
            return SecularRoot(n, complex(seed), complex(seed), float("inf"), False)
        value = complex(root)
        # one extra secant step measures how settled the root is
        fa, fb = f(root), f(root + mp.mpf(1e-9))
        step = float(abs(fa * mp.mpf(1e-9) / (fb - fa))) if fb != fa else 0.0
    converged = step <= 1e-10 * abs(value) and abs(value - seed) < 1.0
    return SecularRoot(n, complex(seed), value, step, converged)
