"""Compiled kernels for the dense nonsymmetric eigenvalue problem.

Eigenvalues only: balancing, Householder reduction to upper Hessenberg form,
then either the Francis double-shift QR iteration (real input) or a complex
single-shift QR iteration with Wilkinson shifts (complex input).  Both work
on the active unreduced window only, which is all that eigenvalues need.
"""
from __future__ import annotations

import numpy as np
from numba import njit

EPS = np.finfo(np.float64).eps


@njit(cache=True)
def _cabs1(z):
    return abs(z.real) + abs(z.imag)


@njit(cache=True)
def balance(a):
    """Diagonal similarity by powers of two that equalizes row/column 1-norms."""
    n = a.shape[0]
    radix = 2.0
    sqrdx = radix * radix
    done = False
    while not done:
        done = True
        for i in range(n):
            r = 0.0
            c = 0.0
            for j in range(n):
                if j != i:
                    c += abs(a[j, i])
                    r += abs(a[i, j])
            if c != 0.0 and r != 0.0:
                g = r / radix
                f = 1.0
                s = c + r
                while c < g:
                    f *= radix
                    c *= sqrdx
                g = r * radix
                while c > g:
                    f /= radix
                    c /= sqrdx
                if (c + r) / f < 0.95 * s:
                    done = False
                    g = 1.0 / f
                    for j in range(n):
                        a[i, j] *= g
                    for j in range(n):
                        a[j, i] *= f
    return a


@njit(cache=True)
def hessenberg(a):
    """In-place Householder reduction to upper Hessenberg form."""
    n = a.shape[0]
    v = np.zeros(n, dtype=a.dtype)
    w = np.zeros(n, dtype=a.dtype)
    for k in range(n - 2):
        alpha = 0.0
        for i in range(k + 1, n):
            alpha += abs(a[i, k]) ** 2
        alpha = np.sqrt(alpha)
        if alpha == 0.0:
            continue
        x0 = a[k + 1, k]
        if abs(x0) == 0.0:
            phase = x0 * 0.0 + 1.0
        else:
            phase = x0 / abs(x0)
        # v = x + phase*|x| e1 avoids cancellation in the first component
        for i in range(k + 1, n):
            v[i] = a[i, k]
        v[k + 1] = x0 + phase * alpha
        vnorm2 = 0.0
        for i in range(k + 1, n):
            vnorm2 += abs(v[i]) ** 2
        if vnorm2 == 0.0:
            continue
        beta = 2.0 / vnorm2
        # left: A[k+1:, k:] -= beta v (v^H A), row-major traversal
        for j in range(k, n):
            w[j] = 0.0
        for i in range(k + 1, n):
            vc = np.conj(v[i])
            for j in range(k, n):
                w[j] += vc * a[i, j]
        for i in range(k + 1, n):
            f = beta * v[i]
            for j in range(k, n):
                a[i, j] -= f * w[j]
        # right: A[:, k+1:] -= beta (A v) v^H
        for i in range(n):
            s = a[i, k + 1] * 0.0
            for j in range(k + 1, n):
                s += a[i, j] * v[j]
            s *= beta
            for j in range(k + 1, n):
                a[i, j] -= s * np.conj(v[j])
        for i in range(k + 2, n):
            a[i, k] = 0.0
    return a


@njit(cache=True)
def hqr_real(a, max_iter):
    """Francis double-shift QR on a real upper Hessenberg matrix (destroyed).

    Returns (wr, wi, status, lo, hi, neglected).  status 0 is success; 1
    means the total iteration budget ran out while [lo, hi] was unreduced.
    neglected is the largest subdiagonal entry set to zero by deflation.
    """
    n = a.shape[0]
    wr = np.zeros(n)
    wi = np.zeros(n)
    neglected = 0.0
    anorm = 0.0
    for i in range(n):
        for j in range(max(i - 1, 0), n):
            anorm += abs(a[i, j])
    nn = n - 1
    t = 0.0
    total = 0
    p = 0.0
    q = 0.0
    r = 0.0
    x = 0.0
    y = 0.0
    z = 0.0
    w = 0.0
    while nn >= 0:
        its = 0
        while True:
            l = nn
            while l >= 1:
                s = abs(a[l - 1, l - 1]) + abs(a[l, l])
                if s == 0.0:
                    s = anorm
                if abs(a[l, l - 1]) + s == s:
                    neglected = max(neglected, abs(a[l, l - 1]))
                    a[l, l - 1] = 0.0
                    break
                l -= 1
            x = a[nn, nn]
            if l == nn:
                wr[nn] = x + t
                wi[nn] = 0.0
                nn -= 1
                break
            y = a[nn - 1, nn - 1]
            w = a[nn, nn - 1] * a[nn - 1, nn]
            if l == nn - 1:
                p = 0.5 * (y - x)
                q = p * p + w
                z = np.sqrt(abs(q))
                x += t
                if q >= 0.0:
                    z = p + (z if p >= 0.0 else -z)
                    wr[nn - 1] = x + z
                    wr[nn] = x + z
                    if z != 0.0:
                        wr[nn] = x - w / z
                    wi[nn - 1] = 0.0
                    wi[nn] = 0.0
                else:
                    wr[nn - 1] = x + p
                    wr[nn] = x + p
                    wi[nn - 1] = -z
                    wi[nn] = z
                nn -= 2
                break
            if total >= max_iter:
                return wr, wi, 1, l, nn, neglected
            if its > 0 and its % 10 == 0:
                # exceptional shift to break cycling
                t += x
                for i in range(nn + 1):
                    a[i, i] -= x
                s = abs(a[nn, nn - 1]) + abs(a[nn - 1, nn - 2])
                x = 0.75 * s
                y = x
                w = -0.4375 * s * s
            its += 1
            total += 1
            m = nn - 2
            while m >= l:
                z = a[m, m]
                r = x - z
                s = y - z
                p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
                q = a[m + 1, m + 1] - z - r - s
                r = a[m + 2, m + 1]
                s = abs(p) + abs(q) + abs(r)
                p /= s
                q /= s
                r /= s
                if m == l:
                    break
                u = abs(a[m, m - 1]) * (abs(q) + abs(r))
                v = abs(p) * (abs(a[m - 1, m - 1]) + abs(z) + abs(a[m + 1, m + 1]))
                if u + v == v:
                    break
                m -= 1
            for i in range(m + 2, nn + 1):
                a[i, i - 2] = 0.0
                if i != m + 2:
                    a[i, i - 3] = 0.0
            k = m
            while k <= nn - 1:
                if k != m:
                    p = a[k, k - 1]
                    q = a[k + 1, k - 1]
                    r = 0.0
                    if k != nn - 1:
                        r = a[k + 2, k - 1]
                    x = abs(p) + abs(q) + abs(r)
                    if x != 0.0:
                        p /= x
                        q /= x
                        r /= x
                s = np.sqrt(p * p + q * q + r * r)
                if p < 0.0:
                    s = -s
                if s != 0.0:
                    if k == m:
                        if l != m:
                            a[k, k - 1] = -a[k, k - 1]
                    else:
                        a[k, k - 1] = -s * x
                    p += s
                    x = p / s
                    y = q / s
                    z = r / s
                    q /= p
                    r /= p
                    for j in range(k, nn + 1):
                        p = a[k, j] + q * a[k + 1, j]
                        if k != nn - 1:
                            p += r * a[k + 2, j]
                            a[k + 2, j] -= p * z
                        a[k + 1, j] -= p * y
                        a[k, j] -= p * x
                    mmin = nn if nn < k + 3 else k + 3
                    for i in range(l, mmin + 1):
                        p = x * a[i, k] + y * a[i, k + 1]
                        if k != nn - 1:
                            p += z * a[i, k + 2]
                            a[i, k + 2] -= p * r
                        a[i, k + 1] -= p * q
                        a[i, k] -= p
                k += 1
    return wr, wi, 0, 0, 0, neglected


@njit(cache=True)
def hqr_complex(h, max_iter):
    """Single-shift QR on a complex upper Hessenberg matrix (destroyed).

    Returns (eig, status, lo, hi, neglected) with the same status convention
    as hqr_real.
    """
    n = h.shape[0]
    eig = np.zeros(n, dtype=np.complex128)
    cs = np.zeros(n, dtype=np.complex128)
    sn = np.zeros(n, dtype=np.complex128)
    neglected = 0.0
    anorm = 0.0
    for i in range(n):
        for j in range(max(i - 1, 0), n):
            anorm += _cabs1(h[i, j])
    hi = n - 1
    total = 0
    while hi >= 0:
        its = 0
        while True:
            l = hi
            while l >= 1:
                s = _cabs1(h[l - 1, l - 1]) + _cabs1(h[l, l])
                if s == 0.0:
                    s = anorm
                if _cabs1(h[l, l - 1]) <= EPS * s:
                    neglected = max(neglected, abs(h[l, l - 1]))
                    h[l, l - 1] = 0.0
                    break
                l -= 1
            if l == hi:
                eig[hi] = h[hi, hi]
                hi -= 1
                break
            if total >= max_iter:
                return eig, 1, l, hi, neglected
            if its > 0 and its % 10 == 0:
                mu = h[hi, hi] + abs(h[hi, hi - 1].real)
                if hi - 2 >= l:
                    mu += abs(h[hi - 1, hi - 2].real)
            else:
                a11 = h[hi - 1, hi - 1]
                a12 = h[hi - 1, hi]
                a21 = h[hi, hi - 1]
                a22 = h[hi, hi]
                half = 0.5 * (a11 - a22)
                disc = np.sqrt(half * half + a12 * a21)
                # root of the trailing 2x2 nearest a22
                r1 = a22 + half + disc
                r2 = a22 + half - disc
                mu = r1 if abs(r1 - a22) < abs(r2 - a22) else r2
            its += 1
            total += 1
            for k in range(l, hi + 1):
                h[k, k] -= mu
            for k in range(l, hi):
                fa = h[k, k]
                fb = h[k + 1, k]
                rr = np.sqrt(abs(fa) ** 2 + abs(fb) ** 2)
                if rr == 0.0:
                    c = 1.0 + 0.0j
                    s = 0.0 + 0.0j
                else:
                    c = fa / rr
                    s = fb / rr
                cs[k] = c
                sn[k] = s
                for j in range(k, hi + 1):
                    u = h[k, j]
                    v = h[k + 1, j]
                    h[k, j] = np.conj(c) * u + np.conj(s) * v
                    h[k + 1, j] = -s * u + c * v
            for k in range(l, hi):
                c = cs[k]
                s = sn[k]
                top = k + 1 if k + 1 <= hi else hi
                for i in range(l, top + 1):
                    u = h[i, k]
                    v = h[i, k + 1]
                    h[i, k] = u * c + v * s
                    h[i, k + 1] = -u * np.conj(s) + v * np.conj(c)
            for k in range(l, hi + 1):
                h[k, k] += mu
    return eig, 0, 0, 0, neglected


@njit(cache=True)
def hessenberg_residual(h, lam, steps):
    """Residual ||(H - lam I) v|| / ||v|| after inverse iteration on Hessenberg H.

    Each step is an O(n^2) Gaussian elimination with partial pivoting that
    exploits the single subdiagonal.
    """
    n = h.shape[0]
    v = np.ones(n, dtype=np.complex128) / np.sqrt(n)
    tiny = EPS * (1.0 + abs(lam))
    for _ in range(steps):
        m = h.astype(np.complex128)
        for i in range(n):
            m[i, i] -= lam
        rhs = v.copy()
        for k in range(n - 1):
            if abs(m[k + 1, k]) > abs(m[k, k]):
                for j in range(k, n):
                    tmp = m[k, j]
                    m[k, j] = m[k + 1, j]
                    m[k + 1, j] = tmp
                tmp = rhs[k]
                rhs[k] = rhs[k + 1]
                rhs[k + 1] = tmp
            piv = m[k, k]
            if abs(piv) < tiny:
                piv = tiny
                m[k, k] = piv
            f = m[k + 1, k] / piv
            if f != 0.0:
                for j in range(k, n):
                    m[k + 1, j] -= f * m[k, j]
                rhs[k + 1] -= f * rhs[k]
        if abs(m[n - 1, n - 1]) < tiny:
            m[n - 1, n - 1] = tiny
        for i in range(n - 1, -1, -1):
            s = rhs[i]
            for j in range(i + 1, n):
                s -= m[i, j] * rhs[j]
            rhs[i] = s / m[i, i]
        nrm = np.sqrt(np.sum(np.abs(rhs) ** 2))
        v = rhs / nrm
    res = np.zeros(n, dtype=np.complex128)
    for i in range(n):
        s = -lam * v[i]
        for j in range(max(i - 1, 0), n):
            s += h[i, j] * v[j]
        res[i] = s
    return np.sqrt(np.sum(np.abs(res) ** 2))
