"""Complex spherical representations of oriented graphs.

For an oriented graph whose arcs sit on the edges (or on the non-edges) of a
simple graph with a spherical minimal representation, the Hermitian family

    H(a, c) = -(xi*B + Bbar) + a*J + c*i*(A - A^T)

is searched for the PSD member of least rank.  Its rank is the dimension of
the complex representation; normalizing the diagonal gives the Gram matrix
of unit vectors whose inner products are the code's angles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import DomainError, IndeterminateError, NoEtaError, ValidationError
from .euclid import (
    EuclideanRepInfo,
    classify_type,
    e0_prime,
    min_rep_distance_matrix_values,
    minimal_gram,
)
from .graphcore import OrientedGraph, SimpleGraph, complement, underlying
from .spectral import (
    DEFAULT_TOL,
    ToleranceConfig,
    annihilates,
    find_eta,
    is_psd,
    null_space,
    project_P,
    psd_shift_threshold,
    rank_of,
)

MAX_HALVINGS = 40
UNIT_NORM_TOL = 1e-10
ANGLE_LINK = 1e-8
ANGLE_AMBIGUOUS = 1e-6
IMAG_TOL = 1e-8
PIVOT_TIE = 1e-8

PATHWAYS = ("minimal", "minimal-gram", "identity")


@dataclass(frozen=True)
class ComplexRepResult:
    eta: Optional[float]
    a_opt: float
    c_opt: float
    rep_dim: int
    gram: np.ndarray = field(repr=False)
    reduced: bool
    pathway: str = "minimal"
    complement: bool = False
    base_rep_dim: Optional[int] = None

    @property
    def raw_gram(self) -> np.ndarray:
        """``H(a_opt, c_opt)`` before normalizing the diagonal."""
        return self.gram * self.a_opt


@dataclass(frozen=True)
class Code:
    dim: int
    points: np.ndarray = field(repr=False)
    angle_set: tuple = ()

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def gram(self) -> np.ndarray:
        p = self.points
        return p.conj() @ p.T

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "points": [[[float(z.real), float(z.imag)] for z in row] for row in self.points],
            "angles": [[float(z.real), float(z.imag)] for z in self.angle_set],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Code":
        try:
            dim = int(obj["dim"])
            pts = np.array([[complex(re, im) for re, im in row] for row in obj["points"]], dtype=complex)
            angles = tuple(complex(re, im) for re, im in obj.get("angles", []))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed code JSON: {exc}") from exc
        if pts.ndim != 2 or pts.shape[1] != dim:
            raise ValidationError("point coordinates do not match dim")
        return cls(dim, pts, angles)


def base_graph(g: OrientedGraph, complement_arm: bool = False) -> SimpleGraph:
    """The simple graph whose edges carry the short distance."""
    u = underlying(g)
    return complement(u) if complement_arm else u


def build_H(
    g: OrientedGraph,
    info: Union[EuclideanRepInfo, float],
    a: float,
    c: float,
    complement: bool = False,
) -> np.ndarray:
    """``-(xi*B + Bbar) + a*J + c*i*(A - A^T)``; ``info`` may be a bare ``xi``."""
    xi = info.xi if isinstance(info, EuclideanRepInfo) else float(info)
    base = base_graph(g, complement)
    h = -min_rep_distance_matrix_values(base, xi) + a * np.ones((g.n, g.n))
    s = g.skew()
    if c == 0 or not s.any():
        return h
    return h + 1j * c * s


def _spherical_info(g: OrientedGraph, complement_arm: bool, tol: ToleranceConfig):
    if g.num_arcs() == 0:
        raise DomainError("oriented graph has no arcs, so no imaginary angle")
    base = base_graph(g, complement_arm)
    if base.is_complete() or base.is_edgeless():
        raise DomainError("underlying simple graph is complete or edgeless")
    info = classify_type(base, tol)
    if not info.spherical_minimal:
        raise DomainError(f"underlying graph is of type {info.graph_type}, not spherical")
    if info.xi <= tol.zero_rel:
        raise DomainError("critical ratio is zero: adjacent points would coincide")
    return base, info


def null_inclusion_holds(g: OrientedGraph, info: EuclideanRepInfo, complement_arm: bool = False,
                         tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    base = base_graph(g, complement_arm)
    return annihilates(1j * g.skew(), e0_prime(base, info, tol), tol)


def _normalized(h: np.ndarray, a: float) -> np.ndarray:
    return h / a


def rep_dim_oriented(
    g: OrientedGraph, tol: ToleranceConfig = DEFAULT_TOL, complement: bool = False
) -> ComplexRepResult:
    """Least-rank PSD member of ``H(a, c)`` built on the minimal representation.

    ``eta`` is the rank-drop point of ``P H(0, c) P``.  If ``H(0, eta)`` admits
    a PSD shift, the dimension is ``rank H(0, eta) - 1`` (reduced).  Otherwise
    ``c`` is halved from ``eta`` until a PSD shift exists and the dimension is
    that of the underlying Euclidean representation.
    """
    base, info = _spherical_info(g, complement, tol)
    n = g.n
    k = 1j * g.skew()
    if not annihilates(k, e0_prime(base, info, tol), tol):
        raise DomainError("null space of the Euclidean Gram matrix is not annihilated by the skew part")
    p = project_P(n)
    m_real = -min_rep_distance_matrix_values(base, info.xi)
    try:
        eta = find_eta(p @ m_real @ p, p @ k @ p, tol)
    except NoEtaError:
        eta = None

    def h0(c):
        return m_real + c * k

    if eta is not None:
        h = h0(eta)
        th = psd_shift_threshold(h, tol)
        if th.satisfiable and th.a_star > 0:
            rep = rank_of(h, tol) - 1
            raw = h + th.a_star * np.ones((n, n))
            return ComplexRepResult(eta, th.a_star, eta, rep, _normalized(raw, th.a_star), True,
                                    "minimal", complement, info.rep_dim)
    c = eta if eta is not None else 1.0
    for _ in range(MAX_HALVINGS):
        c /= 2
        h = h0(c)
        th = psd_shift_threshold(h, tol)
        if th.satisfiable and th.a_star > 0:
            rep = rank_of(h, tol) - 1
            raw = h + th.a_star * np.ones((n, n))
            return ComplexRepResult(eta, th.a_star, c, rep, _normalized(raw, th.a_star), False,
                                    "minimal", complement, info.rep_dim)
    raise IndeterminateError("no skew coefficient admitting a PSD shift was found")


def rep_dim_fixed_base(
    g: OrientedGraph,
    base_gram: np.ndarray,
    tol: ToleranceConfig = DEFAULT_TOL,
    pathway: str = "fixed",
    a: Optional[float] = None,
) -> ComplexRepResult:
    """Rank drop of ``M + c*i*(A - A^T)`` for a fixed real spherical Gram matrix ``M``.

    ``a`` records the ``J`` coefficient of ``M`` for reporting.
    """
    m = np.asarray(base_gram, dtype=float)
    diag = np.diag(m)
    if np.ptp(diag) > tol.zero_rel * max(1.0, abs(diag).max()) or diag[0] <= 0:
        raise DomainError("base Gram matrix must have a constant positive diagonal")
    k = 1j * g.skew()
    if not is_psd(m, tol):
        raise DomainError("base Gram matrix is not positive semidefinite")
    if not annihilates(k, null_space(m, tol), tol):
        raise DomainError("null space of the base Gram matrix is not annihilated by the skew part")
    eta = find_eta(m, k, tol)
    h = m + eta * k
    rep = rank_of(h, tol)
    scale = float(diag[0])
    return ComplexRepResult(eta, a if a is not None else scale, eta, rep, h / scale, True, pathway, False,
                            rank_of(m, tol))


def rep_dim_identity_base(g: OrientedGraph, tol: ToleranceConfig = DEFAULT_TOL) -> ComplexRepResult:
    """Start from the regular simplex ``-(B + Bbar) + J = I`` (every distance equal)."""
    return rep_dim_fixed_base(g, np.eye(g.n), tol, "identity", a=1.0)


def rep_dim_minimal_gram(
    g: OrientedGraph, tol: ToleranceConfig = DEFAULT_TOL, complement: bool = False
) -> ComplexRepResult:
    """Start from the minimal spherical Gram matrix ``-(xi*B + Bbar) + a_star*J``."""
    base, info = _spherical_info(g, complement, tol)
    r = rep_dim_fixed_base(g, minimal_gram(base, info), tol, "minimal-gram", a=info.a_star)
    return ComplexRepResult(r.eta, r.a_opt, r.c_opt, r.rep_dim, r.gram, r.reduced, r.pathway, complement,
                            info.rep_dim)


def representation(g: OrientedGraph, pathway: str = "minimal", tol: ToleranceConfig = DEFAULT_TOL,
                   complement: bool = False) -> ComplexRepResult:
    if pathway == "minimal":
        return rep_dim_oriented(g, tol, complement)
    if pathway == "minimal-gram":
        return rep_dim_minimal_gram(g, tol, complement)
    if pathway == "identity":
        return rep_dim_identity_base(g, tol)
    raise ValidationError(f"unknown pathway {pathway!r}; expected one of {PATHWAYS}")


def extract_vectors(gram: np.ndarray, rep_dim: int, tol: ToleranceConfig = DEFAULT_TOL) -> Code:
    """Unit vectors in C^rep_dim whose Gram matrix is ``gram``.

    Coordinates come from a pivoted Cholesky factorization with a positive
    real pivot entry, so equal Gram matrices give equal points.
    """
    g = np.asarray(gram, dtype=complex)
    g = (g + g.conj().T) / 2
    r = rank_of(g, tol)
    if r != rep_dim:
        raise ValidationError(f"Gram matrix has rank {r}, expected {rep_dim}")
    if np.abs(np.diag(g) - 1).max() > UNIT_NORM_TOL * 100:
        raise ValidationError("Gram matrix must have unit diagonal")
    n = g.shape[0]
    resid = np.real(np.diag(g)).copy()
    cols = np.zeros((n, rep_dim), dtype=complex)
    used = np.zeros(n, dtype=bool)
    for k in range(rep_dim):
        # lowest index among near-maximal residuals, so ties do not depend on rounding
        top = resid[~used].max()
        p = int(np.flatnonzero(~used & (resid >= top * (1 - PIVOT_TIE)))[0])
        col = g[:, p] - cols[:, :k] @ cols[p, :k].conj()
        cols[:, k] = col / np.sqrt(resid[p])
        used[p] = True
        resid = resid - np.abs(cols[:, k]) ** 2
    pts = cols.conj()
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    code = Code(rep_dim, pts, ())
    return Code(rep_dim, pts, tuple(angle_set(code, tol)))


def phi_embed(code: Code) -> np.ndarray:
    """Real coordinates (Re z1, Im z1, Re z2, ...) on the sphere in R^(2d)."""
    p = code.points
    out = np.empty((p.shape[0], 2 * p.shape[1]))
    out[:, 0::2] = p.real
    out[:, 1::2] = p.imag
    return out


def cluster_values(values: np.ndarray) -> list[complex]:
    """Single-linkage clusters of complex values; one mean per cluster, sorted."""
    vals = np.asarray(values, dtype=complex).ravel()
    if vals.size == 0:
        return []
    dist = np.abs(vals[:, None] - vals[None, :])
    parent = np.arange(vals.size)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in zip(*np.nonzero(np.triu(dist <= ANGLE_LINK, 1))):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    roots = np.array([find(i) for i in range(vals.size)])
    cross = (roots[:, None] != roots[None, :]) & (dist < ANGLE_AMBIGUOUS)
    if cross.any():
        raise IndeterminateError("inner products cannot be clustered unambiguously")
    means = [complex(vals[roots == r].mean()) for r in np.unique(roots)]
    return sorted(means, key=lambda z: (round(z.real, 9), round(z.imag, 9)))


def angles_of_gram(gram: np.ndarray) -> list[complex]:
    g = np.asarray(gram)
    off = ~np.eye(g.shape[0], dtype=bool)
    return cluster_values(g[off])


def angle_set(code: Code, tol: ToleranceConfig = DEFAULT_TOL) -> list[complex]:
    """Distinct values of ``x^* y`` over ordered pairs of distinct points."""
    return angles_of_gram(code.gram())


def is_three_code_angles(angles) -> bool:
    return len(angles) == 3 and any(abs(z.imag) > IMAG_TOL for z in angles)


def validate_code(code: Code, tol: ToleranceConfig = DEFAULT_TOL) -> dict:
    """Independent checks on a stored code: norms, angle set, degree, rank."""
    norms = np.linalg.norm(code.points, axis=1)
    unit = bool(np.abs(norms - 1).max(initial=0.0) <= UNIT_NORM_TOL)
    angles = angle_set(code, tol)
    stored = list(code.angle_set)
    match = len(stored) == len(angles) and all(
        min(abs(z - w) for w in angles) <= ANGLE_LINK * 100 for z in stored
    )
    rank = rank_of(code.gram(), tol)
    return {
        "unit_norm": unit,
        "angles_match": bool(match),
        "degree": len(angles),
        "is_3code": is_three_code_angles(angles),
        "rank": int(rank),
        "size": code.size,
        "dim": code.dim,
        "valid": bool(unit and match and rank <= code.dim),
    }
