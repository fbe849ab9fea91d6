"""Hermitian eigen-machinery under an explicit tolerance policy.

All rank/PSD/zero decisions are made relative to the spectral norm of the
matrix involved.  A decision whose margin falls inside the band
``[zero_rel/esc, zero_rel*esc] * scale`` is recomputed with mpmath at high
precision; if it is still inside the band an :class:`IndeterminateError` is
raised instead of silently guessing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import mpmath
import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, IndeterminateError, NoEtaError, ValidationError

HIGH_PRECISION_DPS = 50


@dataclass(frozen=True)
class ToleranceConfig:
    eig_cluster_rel: float = 1e-6
    zero_rel: float = 1e-8
    margin_escalation: float = 10.0

    def __post_init__(self):
        if min(self.eig_cluster_rel, self.zero_rel, self.margin_escalation) <= 0:
            raise ValidationError("tolerances must be strictly positive")
        if self.eig_cluster_rel <= self.zero_rel:
            raise ValidationError("eig_cluster_rel must exceed zero_rel")

    @property
    def main_angle_min(self) -> float:
        # main angles enter squared, hence the square root
        return self.zero_rel ** 0.5

    def as_dict(self) -> dict:
        return {
            "eig_cluster_rel": self.eig_cluster_rel,
            "zero_rel": self.zero_rel,
            "margin_escalation": self.margin_escalation,
        }


DEFAULT_TOL = ToleranceConfig()


@dataclass(frozen=True)
class SpectralDecomposition:
    n: int
    taus: np.ndarray
    mults: tuple
    projectors: tuple = field(repr=False)
    bases: tuple = field(repr=False)
    main_angles: np.ndarray = field(default=None)

    def main(self, tol: ToleranceConfig = DEFAULT_TOL) -> list[tuple[float, float]]:
        """``(tau, beta)`` for the main eigenvalues, ascending."""
        return [
            (float(t), float(b))
            for t, b in zip(self.taus, self.main_angles)
            if b >= tol.main_angle_min
        ]

    def is_main(self, i: int, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
        return self.main_angles[i] >= tol.main_angle_min


@dataclass(frozen=True)
class ShiftThreshold:
    satisfiable: bool
    a_star: Optional[float]
    reason: str = ""


def as_hermitian(H, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    h = np.asarray(H)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValidationError(f"matrix must be square, got shape {h.shape}")
    if not np.iscomplexobj(h):
        h = h.astype(float)
    scale = max(np.abs(h).max(initial=0.0), 1.0)
    if np.abs(h - h.conj().T).max(initial=0.0) > tol.zero_rel * scale:
        raise ValidationError("matrix is not Hermitian within tolerance")
    h = (h + h.conj().T) / 2
    if np.iscomplexobj(h) and not np.abs(h.imag).any():
        h = h.real.copy()
    return h


def _eigvalsh_hp(h: np.ndarray) -> np.ndarray:
    with mpmath.workdps(HIGH_PRECISION_DPS):
        if np.iscomplexobj(h):
            m = mpmath.matrix([[mpmath.mpc(complex(x)) for x in row] for row in h])
            w = mpmath.eighe(m, eigvals_only=True)
        else:
            m = mpmath.matrix([[mpmath.mpf(float(x)) for x in row] for row in h])
            w = mpmath.eigsy(m, eigvals_only=True)
        return np.array(sorted(float(x) for x in w))


def _scale(w: np.ndarray) -> float:
    return float(np.abs(w).max(initial=0.0))


def _in_band(x: float, thr: float, tol: ToleranceConfig) -> bool:
    return thr / tol.margin_escalation < abs(x) < thr * tol.margin_escalation


def _escalated_eigvals(h, w, tol, ambiguous):
    """Recompute eigenvalues at high precision when ``ambiguous(w)`` is true."""
    if not ambiguous(w):
        return w
    w = _eigvalsh_hp(h)
    if ambiguous(w):
        raise IndeterminateError("eigenvalue decision inside the tolerance band even at high precision")
    return w


def rank_of(H, tol: ToleranceConfig = DEFAULT_TOL) -> int:
    h = as_hermitian(H, tol)
    w = np.linalg.eigvalsh(h)
    s = _scale(w)
    if s == 0.0:
        return 0
    thr = tol.zero_rel * s
    w = _escalated_eigvals(h, w, tol, lambda v: any(_in_band(x, thr, tol) for x in v))
    return int(np.count_nonzero(np.abs(w) > thr))


def min_eig_decision(H, tol: ToleranceConfig = DEFAULT_TOL) -> tuple[float, float]:
    """Smallest eigenvalue and the scale it is judged against."""
    h = as_hermitian(H, tol)
    w = np.linalg.eigvalsh(h)
    s = _scale(w)
    if s == 0.0:
        return 0.0, 0.0
    thr = tol.zero_rel * s
    w = _escalated_eigvals(h, w, tol, lambda v: v[0] < 0 and _in_band(v[0], thr, tol))
    return float(w[0]), s


def is_psd(H, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    lam, s = min_eig_decision(H, tol)
    return lam >= -tol.zero_rel * s


def decompose(H, tol: ToleranceConfig = DEFAULT_TOL) -> SpectralDecomposition:
    h = as_hermitian(H, tol)
    n = h.shape[0]
    w, v = np.linalg.eigh(h)
    s = max(_scale(w), np.finfo(float).tiny)
    groups = [[0]]
    for i in range(1, n):
        if w[i] - w[i - 1] > tol.eig_cluster_rel * s:
            groups.append([i])
        else:
            groups[-1].append(i)
    ones = np.ones(n)
    taus, mults, projs, bases, betas = [], [], [], [], []
    for g in groups:
        basis = v[:, g]
        p = basis @ basis.conj().T
        taus.append(float(np.mean(w[g])))
        mults.append(len(g))
        projs.append(p)
        bases.append(basis)
        pj = p @ ones
        betas.append(float(np.sqrt(max(np.vdot(pj, pj).real, 0.0) / n)))
    return SpectralDecomposition(
        n=n,
        taus=np.array(taus),
        mults=tuple(mults),
        projectors=tuple(projs),
        bases=tuple(bases),
        main_angles=np.array(betas),
    )


def project_P(n: int) -> np.ndarray:
    """Orthogonal projection onto the complement of the all-ones vector."""
    return np.eye(n) - np.ones((n, n)) / n


def _secular(taus, weights, a):
    def f(x):
        return 1.0 + a * np.sum(weights / (taus - x))

    return f


def _root_in(f, lo, hi, increasing):
    """Root of ``f`` strictly between two poles (or a pole and a finite bound)."""
    span = hi - lo
    sign = 1.0 if increasing else -1.0
    for k in range(4, 53):
        d = span * 2.0 ** -k
        a, b = lo + d, hi - d
        if sign * f(a) < 0 < sign * f(b):
            return brentq(f, a, b, xtol=4 * np.finfo(float).eps * max(1.0, abs(a), abs(b)), maxiter=500)
    raise IndeterminateError("secular equation root could not be bracketed")


def shifted_main_spectrum(dec: SpectralDecomposition, a: float, tol: ToleranceConfig = DEFAULT_TOL) -> list[float]:
    """Distinct main eigenvalues of ``H + aJ`` from the main data of ``H``.

    They are the roots of ``1 + a * sum_j n beta_j^2 / (tau_j - x)``, one in
    each gap between consecutive main eigenvalues of ``H`` plus one beyond the
    end (above the last for ``a > 0``, below the first for ``a < 0``).
    """
    if a == 0:
        raise ValidationError("shift a must be nonzero")
    main = dec.main(tol)
    taus = np.array([t for t, _ in main])
    weights = np.array([dec.n * b * b for _, b in main])
    f = _secular(taus, weights, a)
    r = len(taus)
    total = float(weights.sum())
    roots = []
    if a > 0:
        for i in range(r):
            lo = taus[i]
            hi = taus[i + 1] if i + 1 < r else taus[i] + a * total + 1.0
            roots.append(_root_in(f, lo, hi, increasing=True))
    else:
        for i in range(r):
            hi = taus[i]
            lo = taus[i - 1] if i > 0 else taus[0] + a * total - 1.0
            roots.append(_root_in(f, lo, hi, increasing=False))
    return [float(x) for x in roots]


def _sign(x: float, scale: float, tol: ToleranceConfig, what: str) -> int:
    thr = tol.zero_rel * scale
    if _in_band(x, thr, tol):
        raise IndeterminateError(f"sign of {what} is indeterminate at tolerance ({x:.3e})")
    if abs(x) <= thr:
        return 0
    return 1 if x > 0 else -1


def _threshold_from(main, n, scale, php_psd, tol) -> ShiftThreshold:
    if len(main) >= 2 and _sign(main[1][0], scale, tol, "second main eigenvalue") <= 0:
        return ShiftThreshold(False, None, "second main eigenvalue is not positive")
    if not php_psd:
        return ShiftThreshold(False, None, "PHP is not positive semidefinite")
    if any(_sign(t, scale, tol, "main eigenvalue") == 0 for t, _ in main):
        return ShiftThreshold(False, None, "zero main eigenvalue")
    terms = [b * b / t for t, b in main]
    total = float(sum(terms))
    mag = float(sum(abs(x) for x in terms))
    if _sign(total, mag, tol, "main-angle sum") >= 0:
        return ShiftThreshold(False, None, "main-angle sum is not negative")
    return ShiftThreshold(True, -1.0 / (n * total))


def _same_threshold(x: ShiftThreshold, y: ShiftThreshold, tol: ToleranceConfig) -> bool:
    if x.satisfiable != y.satisfiable:
        return False
    return not x.satisfiable or abs(x.a_star - y.a_star) <= tol.eig_cluster_rel * max(1.0, abs(x.a_star))


def psd_shift_threshold(H, tol: ToleranceConfig = DEFAULT_TOL) -> ShiftThreshold:
    """Decide whether some ``a > 0`` makes ``H + aJ`` PSD, and the least such ``a``.

    The criterion: the second main eigenvalue is positive, the sum of
    ``beta_i^2 / tau_i`` over main eigenvalues is negative, and ``PHP`` is
    PSD.  Then ``a_star = -1 / sum(n beta_i^2 / tau_i)``.  When a main angle
    sits inside the escalation band, the answer is computed with and without
    those eigenvalues and must agree.
    """
    h = as_hermitian(H, tol)
    n = h.shape[0]
    if is_psd(h, tol):
        return ShiftThreshold(True, 0.0, "already positive semidefinite")
    dec = decompose(h, tol)
    scale = max(float(np.abs(dec.taus).max(initial=0.0)), np.finfo(float).tiny)
    p = project_P(n)
    php_psd = is_psd(p @ h @ p, tol)
    main = dec.main(tol)
    out = _threshold_from(main, n, scale, php_psd, tol)
    # the margin applies to beta^2, so the band on beta is its square root
    widen = tol.margin_escalation ** 0.5
    lo, hi = tol.main_angle_min / widen, tol.main_angle_min * widen
    borderline = [lo < b < hi for b in dec.main_angles]
    if any(borderline):
        pairs = list(zip(dec.taus, dec.main_angles))
        strict = [(float(t), float(b)) for t, b in pairs if b >= hi]
        loose = [(float(t), float(b)) for t, b in pairs if b > lo]
        for alt in (strict, loose):
            if alt != main and not _same_threshold(out, _threshold_from(alt, n, scale, php_psd, tol), tol):
                raise IndeterminateError("least shift depends on a main angle inside the tolerance band")
    return out


def null_space(H, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the zero-eigenvalue cluster; real for real input."""
    h = as_hermitian(H, tol)
    w, v = np.linalg.eigh(h)
    s = _scale(w)
    if s == 0.0:
        return np.eye(h.shape[0], dtype=h.dtype)
    thr = tol.zero_rel * s
    w = _escalated_eigvals(h, w, tol, lambda x: any(_in_band(y, thr, tol) for y in x))
    idx = np.flatnonzero(np.abs(w) <= thr)
    return v[:, idx]


def residual_threshold(K, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    k = np.asarray(K)
    return tol.margin_escalation * tol.zero_rel * max(1.0, float(np.abs(k).max(initial=0.0))) * max(1, k.shape[0])


def annihilates(K, basis, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    if basis.shape[1] == 0:
        return True
    return float(np.abs(np.asarray(K) @ basis).max()) <= residual_threshold(K, tol)


def check_null_inclusion(M, K, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """True iff every null vector of ``M`` is annihilated by ``K``."""
    return annihilates(as_hermitian(K, tol), null_space(M, tol), tol)


def range_basis(M, tol: ToleranceConfig = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvectors and eigenvalues of ``M`` outside its zero cluster."""
    h = as_hermitian(M, tol)
    w, v = np.linalg.eigh(h)
    s = _scale(w)
    if s == 0.0:
        return v[:, :0], w[:0]
    idx = np.flatnonzero(np.abs(w) > tol.zero_rel * s)
    return v[:, idx], w[idx]


def restricted_min_eig(M, K, c: float, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Smallest eigenvalue of ``M + cK`` compressed to the range of ``M``."""
    u, _ = range_basis(M, tol)
    if u.shape[1] == 0:
        return 0.0
    h = u.conj().T @ (np.asarray(M) + c * np.asarray(K)) @ u
    return float(np.linalg.eigvalsh((h + h.conj().T) / 2)[0])


def find_eta(M, K, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """The unique ``eta > 0`` at which the PSD family ``M + cK`` first drops rank.

    Closed form: with ``W = U diag(lambda)^(-1/2)`` whitening the range of
    ``M``, ``eta = -1 / lambda_min(W* K W)``.
    """
    m = as_hermitian(M, tol)
    k = as_hermitian(K, tol)
    if m.shape != k.shape:
        raise ValidationError("M and K must have the same shape")
    if not is_psd(m, tol):
        raise ValidationError("M must be positive semidefinite")
    if not check_null_inclusion(m, k, tol):
        raise ValidationError("null space of M is not contained in that of K")
    u, lam = range_basis(m, tol)
    if u.shape[1] == 0:
        raise NoEtaError("M is zero")
    w = u / np.sqrt(lam)
    g = w.conj().T @ k @ w
    mu = np.linalg.eigvalsh((g + g.conj().T) / 2)
    scale = max(float(np.abs(mu).max(initial=0.0)), 1.0)
    if mu[0] >= -tol.zero_rel * scale:
        raise NoEtaError("K is never negative on the range of M")
    return float(-1.0 / mu[0])


__all__ = [
    "DEFAULT_TOL",
    "DomainError",
    "ShiftThreshold",
    "SpectralDecomposition",
    "ToleranceConfig",
    "annihilates",
    "as_hermitian",
    "check_null_inclusion",
    "decompose",
    "find_eta",
    "is_psd",
    "min_eig_decision",
    "null_space",
    "project_P",
    "psd_shift_threshold",
    "range_basis",
    "rank_of",
    "residual_threshold",
    "restricted_min_eig",
    "shifted_main_spectrum",
]
