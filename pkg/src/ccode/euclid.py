"""Euclidean two-distance representations of simple graphs.

A graph is represented by a point set whose squared distances are ``c`` on
edges and ``1`` on non-edges.  Matrices below hold those values directly
(half the squared distances up to a global scale), so a Gram matrix of a
spherical representation takes the form ``-(xi*B + Bbar) + a*J``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import mpmath
import numpy as np

from .errors import DomainError, IndeterminateError, ValidationError
from .graphcore import SimpleGraph, complement
from .spectral import (
    DEFAULT_TOL,
    HIGH_PRECISION_DPS,
    ToleranceConfig,
    decompose,
    null_space,
    project_P,
    psd_shift_threshold,
    rank_of,
)

SPHERICAL_TYPES = (1, 2, 4)
TYPE_EQUALITY_REL = 1e-10


@dataclass(frozen=True)
class EuclideanRepInfo:
    graph_type: int
    xi: float
    rep_dim: int
    spherical_minimal: bool
    a_star: Optional[float]
    n: int

    def as_dict(self) -> dict:
        return {
            "type": self.graph_type,
            "xi": self.xi,
            "rep_dim": self.rep_dim,
            "spherical": self.spherical_minimal,
            "a_star": self.a_star,
            "n": self.n,
        }


@dataclass(frozen=True)
class DissimilarityMatrix:
    n: int
    entries: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.entries, dtype=float)
        if d.shape != (self.n, self.n):
            raise ValidationError(f"dissimilarity matrix must be {self.n}x{self.n}")
        if np.abs(d - d.T).max(initial=0.0) > 0 or np.abs(np.diag(d)).max(initial=0.0) > 0:
            raise ValidationError("dissimilarity matrix must be symmetric with zero diagonal")
        if (d < 0).any():
            raise ValidationError("dissimilarity matrix must be nonnegative")
        object.__setattr__(self, "entries", d)

    @classmethod
    def of(cls, entries) -> "DissimilarityMatrix":
        d = np.asarray(entries, dtype=float)
        return cls(d.shape[0], d)


@dataclass(frozen=True)
class SphericalEmbedding:
    a: float
    gram: np.ndarray
    dim: int


def _require_proper(g: SimpleGraph):
    if g.is_complete() or g.is_edgeless():
        raise ValidationError("graph must be neither complete nor edgeless")


def _angle_comparison_hp(adj: np.ndarray, tau2: float) -> tuple[float, float]:
    """Both sides of the type 3/4 comparison recomputed at high precision."""
    n = adj.shape[0]
    with mpmath.workdps(HIGH_PRECISION_DPS):
        m = mpmath.matrix([[mpmath.mpf(int(x)) for x in row] for row in adj])
        w, v = mpmath.eigsy(m)
        vals = [w[i] for i in range(n)]
        order = sorted(range(n), key=lambda i: vals[i])
        gap = mpmath.mpf(10) ** (-HIGH_PRECISION_DPS // 2)
        groups = [[order[0]]]
        for a, b in zip(order, order[1:]):
            if vals[b] - vals[a] > gap:
                groups.append([b])
            else:
                groups[-1].append(b)
        taus, betas2 = [], []
        for g in groups:
            s = sum(sum(v[r, i] for r in range(n)) ** 2 for i in g)
            taus.append(sum(vals[i] for i in g) / len(g))
            betas2.append(s / n)
        left = betas2[0] / (taus[1] - taus[0])
        right = sum(b / (t - taus[1]) for t, b in zip(taus[2:], betas2[2:]))
        return float(left), float(right)


def _compare(left: float, right: float, tol: ToleranceConfig, rerun) -> int:
    def decide(lv, rv):
        scale = max(abs(lv), abs(rv), np.finfo(float).tiny)
        rel = abs(lv - rv) / scale
        band = TYPE_EQUALITY_REL / tol.margin_escalation < rel < TYPE_EQUALITY_REL * tol.margin_escalation
        return rel, band

    rel, band = decide(left, right)
    if band:
        left, right = rerun()
        rel, band = decide(left, right)
        if band:
            raise IndeterminateError("type 3/4 equality undecidable at tolerance")
    if rel <= TYPE_EQUALITY_REL:
        return 0
    return 1 if left > right else -1


def schoenberg_xi_rep(g: SimpleGraph) -> tuple[float, int]:
    """``xi`` and ``Rep`` from the centred Gram matrix of ``c*A + Abar``.

    Independent of the spectral case analysis: with ``theta`` the least
    eigenvalue of ``A`` compressed to the complement of the all-ones vector,
    ``xi = (theta + 1) / theta`` and ``Rep`` is the rank of the compressed
    ``I + (1 - xi) A``.
    """
    n = g.n
    a = g.adj.astype(float)
    q, _ = np.linalg.qr(np.column_stack([np.ones(n), np.eye(n)[:, : n - 1]]))
    basis = q[:, 1:]
    comp = basis.T @ a @ basis
    theta = float(np.linalg.eigvalsh(comp)[0])
    xi = max(0.0, (theta + 1.0) / theta) if theta < 0 else 0.0
    gram = np.eye(n - 1) + (1.0 - xi) * comp
    w = np.linalg.eigvalsh(gram)
    rep = int(np.count_nonzero(w > 1e-8 * max(1.0, np.abs(w).max())))
    return xi, rep


def rep_dim_plus(g: SimpleGraph) -> int:
    """Representation dimension with a strictly positive short distance.

    Complete graphs, edgeless graphs and disjoint unions of cliques (where the
    critical ratio is zero and adjacent points would coincide) need ``n - 1``.
    The value never decreases when a vertex is added, so it drives pruning.
    """
    if g.n == 1:
        return 0
    if g.is_complete() or g.is_edgeless():
        return g.n - 1
    xi, rep = schoenberg_xi_rep(g)
    if xi <= 1e-9:
        return g.n - 1
    return rep


def classify_type(g: SimpleGraph, tol: ToleranceConfig = DEFAULT_TOL) -> EuclideanRepInfo:
    """Type, critical ratio and minimal dimension from the adjacency spectrum."""
    _require_proper(g)
    n = g.n
    adj = g.adj
    dec = decompose(adj.astype(float), tol)
    taus, mults = dec.taus, dec.mults
    main = [dec.is_main(i, tol) for i in range(len(taus))]
    tau1, m1 = float(taus[0]), mults[0]
    if not main[0]:
        gtype, xi, rep = 1, (tau1 + 1) / tau1, n - m1 - 1
    elif m1 > 1:
        gtype, xi, rep = 2, (tau1 + 1) / tau1, n - m1
    else:
        gtype = 5
        tau2 = float(taus[1])
        if not main[1] and tau2 < -1 - tol.eig_cluster_rel:
            betas = dec.main_angles
            left = betas[0] ** 2 / (tau2 - tau1)
            right = float(sum(b * b / (t - tau2) for t, b in zip(taus[2:], betas[2:])))
            cmp = _compare(left, right, tol, lambda: _angle_comparison_hp(adj, tau2))
            m2 = mults[1]
            if cmp == 0:
                gtype, xi, rep = 3, (tau2 + 1) / tau2, n - m2 - 2
            elif cmp > 0:
                gtype, xi, rep = 4, (tau2 + 1) / tau2, n - m2 - 1
        if gtype == 5:
            xi, _ = schoenberg_xi_rep(g)
            rep = n - 2
    xi = float(max(0.0, xi))
    spherical = gtype in SPHERICAL_TYPES
    a_star = None
    if spherical:
        th = psd_shift_threshold(-min_rep_distance_matrix_values(g, xi), tol)
        a_star = th.a_star if th.satisfiable else None
    return EuclideanRepInfo(gtype, xi, int(rep), spherical, a_star, n)


def min_rep_distance_matrix_values(g: SimpleGraph, xi: float) -> np.ndarray:
    b = g.adj.astype(float)
    return xi * b + complement(g).adj.astype(float)


def min_rep_distance_matrix(info: EuclideanRepInfo, g: SimpleGraph) -> DissimilarityMatrix:
    """``xi*B + Bbar``: squared distances of the minimal representation."""
    return DissimilarityMatrix.of(min_rep_distance_matrix_values(g, info.xi))


def spherical_embedding(
    d: DissimilarityMatrix, tol: ToleranceConfig = DEFAULT_TOL, a: Optional[float] = None
) -> SphericalEmbedding:
    """Gram matrix ``-D + a*J`` on a sphere.

    By default ``a`` is the unique least shift, giving the embedding
    dimension.  A larger ``a`` may be passed to get a non-minimal spherical
    representation of one dimension more.
    """
    h = -d.entries
    th = psd_shift_threshold(h, tol)
    if not th.satisfiable:
        raise DomainError(f"not spherically embeddable: {th.reason}")
    if a is None:
        a = th.a_star
    elif a < th.a_star - tol.zero_rel * max(1.0, abs(th.a_star)):
        raise DomainError(f"shift {a} is below the least admissible shift {th.a_star}")
    gram = h + a * np.ones_like(h)
    return SphericalEmbedding(float(a), gram, rank_of(gram, tol))


def _require_spherical(info: EuclideanRepInfo):
    if info.graph_type not in SPHERICAL_TYPES:
        raise DomainError(f"type {info.graph_type} has no spherical minimal representation")


def e0_prime(g: SimpleGraph, info: EuclideanRepInfo, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Null space of ``-(xi*B + Bbar)``; orthonormal columns, all orthogonal to j."""
    _require_spherical(info)
    return null_space(-min_rep_distance_matrix_values(g, info.xi), tol)


def _orth_to_ones(basis: np.ndarray) -> np.ndarray:
    if basis.shape[1] == 0:
        return basis
    row = basis.sum(axis=0, keepdims=True)
    _, s, vt = np.linalg.svd(row)
    rank = int(s[0] > 1e-8 * np.sqrt(basis.shape[0]))
    return basis @ vt[rank:].T


def e0_prime_by_type(g: SimpleGraph, info: EuclideanRepInfo, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """The same space from the adjacency eigenspaces, by type."""
    _require_spherical(info)
    dec = decompose(g.adj.astype(float), tol)
    if info.graph_type == 1:
        return dec.bases[0]
    if info.graph_type == 2:
        return _orth_to_ones(dec.bases[0])
    return dec.bases[1]


def minimal_gram(g: SimpleGraph, info: EuclideanRepInfo) -> np.ndarray:
    """``-(xi*B + Bbar) + a_star*J``, the Gram matrix of the minimal representation."""
    _require_spherical(info)
    h = -min_rep_distance_matrix_values(g, info.xi)
    return h + info.a_star * np.ones_like(h)


def e0_doubleprime(g: SimpleGraph, info: EuclideanRepInfo, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Null space of the minimal spherical Gram matrix; one dimension above ``e0_prime``."""
    return null_space(minimal_gram(g, info), tol)


def e0_doubleprime_swapped(
    g: SimpleGraph, info: EuclideanRepInfo, tol: ToleranceConfig = DEFAULT_TOL
) -> Optional[np.ndarray]:
    """Null space of ``-(B + xi*Bbar) + a*J`` at its least PSD shift, or None.

    The weights are swapped relative to :func:`e0_doubleprime`; kept only to
    show the two disagree.
    """
    _require_spherical(info)
    h = -(g.adj.astype(float) + info.xi * complement(g).adj.astype(float))
    th = psd_shift_threshold(h, tol)
    if not th.satisfiable:
        return None
    return null_space(h + th.a_star * np.ones_like(h), tol)


def embedding_dim_at(g: SimpleGraph, c: float, tol: ToleranceConfig = DEFAULT_TOL) -> int:
    """Embedding dimension of the two-distance matrix ``c*B + Bbar``."""
    d = c * g.adj.astype(float) + complement(g).adj.astype(float)
    p = project_P(g.n)
    gram = -p @ d @ p
    return rank_of(gram, tol)
