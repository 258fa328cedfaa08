"""Spectra of truncated operators and their assignment to unperturbed levels.

Level n of the unperturbed ladder sits at z_n = 2n + 1.  An eigenvalue is
attributed to n when it lies in the strip |Re z - z_n| <= 1; the square
|Re z - z_n| <= 1/2, |Im z| <= 1/2 breaks ties.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import _qr
from .operator import PointPotential, TruncatedOperator, build_truncated
from .secular import exact_eigenvalue

BACKENDS = ("qr", "lapack")


class EigenSolveError(RuntimeError):
    """The QR iteration exhausted its budget."""


@dataclass(frozen=True)
class SpectrumResult:
    """All eigenvalues of one truncation, sorted by real then imaginary part.

    residual_norm is the largest eigenpair residual when residuals were
    requested, otherwise a backward-error proxy: the larger of the biggest
    subdiagonal entry dropped by deflation and eps * ||H||_F.
    """

    eigenvalues: np.ndarray
    truncation: int
    residual_norm: float
    backend: str = "qr"
    hessenberg: np.ndarray | None = field(default=None, repr=False, compare=False)

    def residual(self, lam: complex, steps: int = 2) -> float:
        """||(H - lam) v|| / ||v|| for v from inverse iteration on the stored Hessenberg form."""
        if self.hessenberg is None:
            raise ValueError("no Hessenberg form stored for this spectrum")
        return float(_qr.hessenberg_residual(self.hessenberg, complex(lam), steps))


_UNITS = np.array([1.0, 1.0j, -1.0, -1.0j])


def _real_form(a: np.ndarray) -> np.ndarray | None:
    """A real matrix similar to a, if a or S^{-1} a S with S = diag(i^k) is real."""
    if not np.any(a.imag):
        return np.ascontiguousarray(a.real)
    k = np.arange(a.shape[0])
    b = a * _UNITS[(k[None, :] - k[:, None]) % 4]
    if not np.any(b.imag):
        return np.ascontiguousarray(b.real)
    return None


def _hessenberg(a: np.ndarray) -> np.ndarray:
    return _qr.hessenberg(_qr.balance(a.copy()))


def eigenvalues(op: TruncatedOperator, backend: str = "qr", residuals: bool = False) -> SpectrumResult:
    """All N eigenvalues of the truncated operator.

    The default backend balances, reduces to Hessenberg form and runs shifted
    QR with deflation.  Matrices that are real, or real after conjugation by
    diag(i^k) (purely imaginary couplings on an odd-parity checkerboard), use
    the real double-shift iteration, so conjugate pairs come out exact.
    backend="lapack" delegates to numpy for cross-checks.
    """
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    a = np.asarray(op.entries)
    n = a.shape[0]
    if n < 1:
        raise ValueError("empty operator")
    real = _real_form(a)
    work = real if real is not None else np.ascontiguousarray(a, dtype=complex)
    if backend == "lapack":
        ev = np.linalg.eigvals(work)
        if real is not None:
            # numpy returns conjugate pairs exactly for real input; drop the
            # imaginary dtype noise of purely real results
            ev = ev.astype(complex)
        h = None
        proxy = float(np.finfo(float).eps * np.linalg.norm(work))
    else:
        h = _hessenberg(work)
        budget = 30 * n
        if real is not None:
            wr, wi, status, lo, hi, dropped = _qr.hqr_real(h.copy(), budget)
            ev = wr + 1j * wi
        else:
            ev, status, lo, hi, dropped = _qr.hqr_complex(h.copy(), budget)
        if status != 0:
            raise EigenSolveError(
                f"QR iteration did not converge within {budget} iterations; "
                f"unreduced block rows {lo}..{hi} of {n}")
        proxy = max(float(dropped), float(np.finfo(float).eps * np.linalg.norm(h)))
    ev = np.sort_complex(np.asarray(ev, dtype=complex))
    result = SpectrumResult(ev, n, proxy, backend, h)
    if residuals:
        if result.hessenberg is None:
            result = replace(result, hessenberg=_hessenberg(work))
        worst = max(result.residual(lam) for lam in ev)
        result = replace(result, residual_norm=worst)
    return result


MATCHED, AMBIGUOUS, MISSING = "matched", "ambiguous", "missing"


@dataclass(frozen=True)
class LadderEntry:
    n: int
    lam: complex
    status: str
    in_square: bool
    candidates: tuple[complex, ...] = ()


@dataclass(frozen=True)
class EigenLadder:
    entries: dict[int, LadderEntry]
    n_lo: int
    n_hi: int
    truncation: int

    def __getitem__(self, n: int) -> LadderEntry:
        return self.entries[n]

    def values(self, status: str | None = MATCHED) -> np.ndarray:
        return np.array([e.lam for e in self.entries.values() if status is None or e.status == status])

    def indices(self, status: str | None = MATCHED) -> np.ndarray:
        return np.array([e.n for e in self.entries.values() if status is None or e.status == status])

    @property
    def all_matched(self) -> bool:
        return all(e.status == MATCHED for e in self.entries.values())


def _in_square(lam: complex, n: int) -> bool:
    return abs(lam.real - (2 * n + 1)) <= 0.5 and abs(lam.imag) <= 0.5


def ladder_match(spec: SpectrumResult, n_lo: int, n_hi: int) -> EigenLadder:
    """Attribute eigenvalues to levels n_lo..n_hi through the strips H_n."""
    if n_lo < 0 or n_hi < n_lo:
        raise ValueError(f"bad level range [{n_lo}, {n_hi}]")
    if 2 * n_hi > spec.truncation:
        raise ValueError(f"n_hi={n_hi} too close to the truncation edge N={spec.truncation}")
    ev = spec.eigenvalues
    re = ev.real
    entries = {}
    for n in range(n_lo, n_hi + 1):
        zn = 2 * n + 1
        # strips share their boundary lines; the spacing is tiny relative to 1
        cand = ev[np.abs(re - zn) <= 1.0]
        if len(cand) == 0:
            entries[n] = LadderEntry(n, complex(zn), MISSING, False)
            continue
        if len(cand) == 1:
            lam = complex(cand[0])
            entries[n] = LadderEntry(n, lam, MATCHED, _in_square(lam, n), (lam,))
            continue
        inside = [complex(c) for c in cand if _in_square(complex(c), n)]
        if len(inside) == 1:
            entries[n] = LadderEntry(n, inside[0], MATCHED, True, tuple(complex(c) for c in cand))
        else:
            best = min((complex(c) for c in cand), key=lambda c: abs(c - zn))
            entries[n] = LadderEntry(n, best, AMBIGUOUS, _in_square(best, n),
                                     tuple(complex(c) for c in cand))
    return EigenLadder(entries, n_lo, n_hi, spec.truncation)


@dataclass(frozen=True)
class NonrealCount:
    count: int
    values: np.ndarray
    tol: float


def count_nonreal(spec: SpectrumResult, tol: float = 1e-8) -> NonrealCount:
    """Eigenvalues with |Im lam| > tol."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    mask = np.abs(spec.eigenvalues.imag) > tol
    return NonrealCount(int(mask.sum()), spec.eigenvalues[mask], tol)


def nonreal_sensitivity(spec: SpectrumResult, tol: float = 1e-8) -> dict[float, int]:
    """Non-real counts at tol/10, tol and 10*tol."""
    return {t: count_nonreal(spec, t).count for t in (tol / 10, tol, tol * 10)}


def conjugate_mismatch(spec: SpectrumResult) -> float:
    """Distance between the spectrum and its complex conjugate as multisets."""
    ev = spec.eigenvalues
    conj = np.sort_complex(np.conj(ev))
    return float(np.max(np.abs(ev - conj))) if len(ev) else 0.0


def refine_ladder(ladder: EigenLadder, w: PointPotential, dps: int = 25) -> EigenLadder:
    """Replace matched truncated eigenvalues by roots of the exact secular equation."""
    entries = {}
    for n, e in ladder.entries.items():
        if e.status != MATCHED:
            entries[n] = e
            continue
        root = exact_eigenvalue(w, n, e.lam, dps=dps)
        status = MATCHED if root.converged and abs(root.value.real - (2 * n + 1)) <= 1.0 else AMBIGUOUS
        entries[n] = LadderEntry(n, root.value, status, _in_square(root.value, n), e.candidates)
    return EigenLadder(entries, ladder.n_lo, ladder.n_hi, ladder.truncation)


def solve_ladder(w: PointPotential, n_lo: int, n_hi: int, N: int | None = None,
                 backend: str = "qr", refine: bool = False) -> EigenLadder:
    """Build, solve and match in one call; N defaults to max(4 n_hi, 512)."""
    N = max(4 * n_hi, 512) if N is None else N
    ladder = ladder_match(eigenvalues(build_truncated(w, N), backend=backend), n_lo, n_hi)
    return refine_ladder(ladder, w) if refine else ladder


@dataclass(frozen=True)
class TruncationStudy:
    """lambda_n(N) across truncation sizes with successive differences."""

    n: int
    sizes: tuple[int, ...]
    values: tuple[complex, ...]
    diffs: tuple[float, ...]
    cauchy: bool
    monotone: bool
    exact: complex | None = None

    @property
    def errors(self) -> tuple[float, ...]:
        if self.exact is None:
            raise ValueError("no exact reference attached")
        return tuple(abs(v - self.exact) for v in self.values)


def truncation_study(w: PointPotential, n: int, sizes, backend: str = "qr",
                     exact: bool = False) -> TruncationStudy:
    """Follow lambda_n as the truncation grows.

    cauchy flags strictly shrinking successive differences; monotone flags
    real parts moving in one direction.  With exact=True the secular-equation
    root is attached for comparison.
    """
    sizes = tuple(int(N) for N in sizes)
    for N in sizes:
        if N < 4 * n:
            raise ValueError(f"truncation {N} below 4n = {4 * n}")
    values = []
    for N in sizes:
        entry = ladder_match(eigenvalues(build_truncated(w, N), backend=backend), n, n)[n]
        values.append(entry.lam)
    diffs = tuple(abs(b - a) for a, b in zip(values, values[1:]))
    cauchy = all(d2 < d1 or d1 == 0.0 for d1, d2 in zip(diffs, diffs[1:]))
    steps = [b.real - a.real for a, b in zip(values, values[1:])]
    monotone = all(s >= 0 for s in steps) or all(s <= 0 for s in steps)
    ref = exact_eigenvalue(w, n, values[-1]).value if exact else None
    return TruncationStudy(n, sizes, tuple(values), diffs, cauchy, monotone, ref)
