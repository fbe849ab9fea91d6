"""Tight complex spherical 3-codes.

Covers the size bound, the association scheme carried by a code whose
pairwise inner products take few values, Krein parameters, the two closed
form solutions of the Krein system for a tight 3-code, and the exact
arithmetic showing that only d = 1, 2 survive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, isqrt

import numpy as np

from .crep import Code, angle_set, extract_vectors
from .errors import DomainError, NotASchemeError, ValidationError
from .exact import QuadSurd, Rational, is_square
from .spectral import DEFAULT_TOL, ToleranceConfig

SCHEME_TOL = 1e-10
RELATION_TOL = 1e-6
IDEMPOTENT_SEED = 20240
IDEMPOTENT_RETRIES = 8

REASON_TRIVIAL = "exists"
REASON_T_IRRATIONAL = "former-branch-negative-Krein; latter: t non-integer"
REASON_NO_DIVISOR = "former-branch-negative-Krein; latter: 3t+5 does not divide 16"


def upper_bound(d: int) -> int:
    """Largest possible size of a 3-code in the unit sphere of C^d."""
    if d < 1:
        raise DomainError("dimension must be at least 1")
    return 4 if d == 1 else d * d + 2 * d


def harm_dim(k: int, l: int, d: int) -> int:
    """Dimension of the harmonic polynomials of bidegree (k, l) on C^d."""
    if k < 0 or l < 0 or d < 1:
        raise DomainError("bidegree must be nonnegative and d positive")

    def c(a, b):
        return comb(a, b) if a >= 0 and a >= b else 0

    return c(d + k - 1, d - 1) * c(d + l - 1, d - 1) - c(d + k - 2, d - 1) * c(d + l - 2, d - 1)


# -- association schemes from codes ---------------------------------------------------------


@dataclass(frozen=True)
class SchemeParameters:
    s: int
    angles: tuple
    adjacency: tuple = field(repr=False)
    idempotents: tuple = field(repr=False)
    P: np.ndarray = field(repr=False)
    Q: np.ndarray = field(repr=False)
    krein: np.ndarray = field(repr=False)
    valencies: tuple = ()
    multiplicities: tuple = ()
    hat: tuple = ()

    @property
    def size(self) -> int:
        return self.adjacency[0].shape[0]


def _order_angles(angles: list[complex]) -> list[complex]:
    cplx = sorted((z for z in angles if z.imag > RELATION_TOL), key=lambda z: (round(z.real, 9), round(z.imag, 9)))
    reals = sorted((z for z in angles if abs(z.imag) <= RELATION_TOL), key=lambda z: round(z.real, 9))
    out = []
    for z in cplx:
        out.append(z)
        out.append(z.conjugate())
    return out + reals


def _relations(gram: np.ndarray, angles: list[complex]) -> list[np.ndarray]:
    n = gram.shape[0]
    mats = [np.eye(n, dtype=np.int64)]
    off = ~np.eye(n, dtype=bool)
    for z in angles:
        mats.append((off & (np.abs(gram - z) <= RELATION_TOL)).astype(np.int64))
    return mats


def check_axioms(mats: list[np.ndarray]) -> None:
    """Raise :class:`NotASchemeError` naming the first violated axiom."""
    n = mats[0].shape[0]
    if not (mats[0] == np.eye(n, dtype=np.int64)).all():
        raise NotASchemeError(1, "first relation is not the identity")
    total = sum(mats)
    if not (total == 1).all():
        raise NotASchemeError(2, "relations do not partition all pairs")
    keys = [m.tobytes() for m in mats]
    for i, m in enumerate(mats):
        if m.T.tobytes() not in keys:
            raise NotASchemeError(3, f"transpose of relation {i} is not a relation")
    for i, a in enumerate(mats):
        for j, b in enumerate(mats):
            prod = a @ b
            for k, c in enumerate(mats):
                vals = prod[c == 1]
                if vals.size and (vals != vals[0]).any():
                    raise NotASchemeError(4, f"A_{i} A_{j} is not constant on relation {k}")
            if not (prod == b @ a).all():
                raise NotASchemeError(5, f"A_{i} and A_{j} do not commute")


def _project_to_algebra(x: np.ndarray, mats) -> np.ndarray:
    out = np.zeros_like(x, dtype=complex)
    for m in mats:
        mask = m == 1
        out[mask] = x[mask].mean()
    return out


def primitive_idempotents(mats, seed: int = IDEMPOTENT_SEED) -> list[np.ndarray]:
    """Primitive idempotents of the Bose-Mesner algebra spanned by ``mats``.

    A random Hermitian element of the algebra has, with probability one, a
    distinct eigenvalue on each primitive idempotent; its spectral projectors
    are then projected back onto the algebra to remove rounding.
    """
    n = mats[0].shape[0]
    want = len(mats)
    rng = np.random.default_rng(seed)
    for _ in range(IDEMPOTENT_RETRIES):
        r = rng.standard_normal(want)
        s = rng.standard_normal(want)
        h = sum(ri * (a + a.T) + 1j * si * (a - a.T) for ri, si, a in zip(r, s, mats))
        w, v = np.linalg.eigh(h)
        scale = max(1.0, np.abs(w).max())
        groups = [[0]]
        for i in range(1, n):
            if w[i] - w[i - 1] > 1e-6 * scale:
                groups.append([i])
            else:
                groups[-1].append(i)
        if len(groups) != want:
            continue
        idem = []
        for g in groups:
            e = v[:, g] @ v[:, g].conj().T
            idem.append(_project_to_algebra(e, mats))
        return idem
    raise NotASchemeError(4, "could not separate the primitive idempotents")


def _order_idempotents(idem, gram):
    n = gram.shape[0]
    j = np.ones((n, n)) / n
    first = min(range(len(idem)), key=lambda i: np.abs(idem[i] - j).max())
    rest = [i for i in range(len(idem)) if i != first]
    order = [first]
    # the idempotent proportional to the Gram matrix, then its transpose
    g1 = None
    for i in rest:
        e = idem[i]
        coef = np.vdot(gram, e) / np.vdot(gram, gram)
        if np.abs(e - coef * gram).max() <= 1e-8:
            g1 = i
            break
    if g1 is not None:
        order.append(g1)
        rest.remove(g1)
        t = min(rest, key=lambda i: np.abs(idem[i] - idem[g1].T).max())
        if np.abs(idem[t] - idem[g1].T).max() <= 1e-8 and t != g1:
            order.append(t)
            rest.remove(t)

    def key(i):
        e = idem[i]
        return (round(np.trace(e).real), -round(float(np.abs(e.imag).max()), 9), tuple(np.round(e[0].real, 9)))

    order.extend(sorted(rest, key=key))
    return [idem[i] for i in order]


def build_scheme_from_code(code: Code, tol: ToleranceConfig = DEFAULT_TOL) -> SchemeParameters:
    """Association scheme on the points, with relations given by inner products."""
    gram = code.gram()
    angles = _order_angles(list(angle_set(code, tol)))
    mats = _relations(gram, angles)
    check_axioms(mats)
    n = gram.shape[0]
    idem = _order_idempotents(primitive_idempotents(mats), gram)
    s = len(angles)
    for i, e in enumerate(idem):
        if np.abs(e @ e - e).max() > SCHEME_TOL or np.abs(e - e.conj().T).max() > SCHEME_TOL:
            raise NotASchemeError(4, f"E_{i} is not a Hermitian idempotent")
    mults = tuple(int(round(np.trace(e).real)) for e in idem)
    vals = tuple(int(m[0].sum()) for m in mats)
    q = np.zeros((s + 1, s + 1), dtype=complex)
    p = np.zeros((s + 1, s + 1), dtype=complex)
    for i, a in enumerate(mats):
        mask = a == 1
        for j, e in enumerate(idem):
            q[i, j] = n * e[mask].mean()
            p[j, i] = np.trace(a @ e) / mults[j]
    krein = np.zeros((s + 1, s + 1, s + 1), dtype=complex)
    for i in range(s + 1):
        for j in range(s + 1):
            had = idem[i] * idem[j]
            for k in range(s + 1):
                krein[i, j, k] = n * np.trace(had @ idem[k]) / mults[k]
    hat = tuple(
        min(range(s + 1), key=lambda j: np.abs(idem[j] - idem[i].T).max()) for i in range(s + 1)
    )
    if np.abs(p @ q - n * np.eye(s + 1)).max() > 1e-8 * n:
        raise NotASchemeError(4, "eigenmatrices are not mutually inverse")
    return SchemeParameters(s, tuple(angles), tuple(mats), tuple(idem), _clean(p), _clean(q), _clean(krein),
                            vals, mults, hat)


def _clean(x: np.ndarray) -> np.ndarray:
    out = x.copy()
    out.real[np.abs(out.real) < 1e-12] = 0.0
    out.imag[np.abs(out.imag) < 1e-12] = 0.0
    return out


def krein_reconstruction_error(sp: SchemeParameters) -> float:
    """Max deviation of ``E_i o E_j`` from ``(1/N) sum_k q_ij^k E_k``."""
    n = sp.size
    worst = 0.0
    for i, ei in enumerate(sp.idempotents):
        for j, ej in enumerate(sp.idempotents):
            rhs = sum(sp.krein[i, j, k] * ek for k, ek in enumerate(sp.idempotents)) / n
            worst = max(worst, float(np.abs(ei * ej - rhs).max()))
    return worst


# -- Krein system for tight 3-codes ---------------------------------------------------------


@dataclass(frozen=True)
class KreinBranch:
    d: int
    branch: str
    q11_2: QuadSurd
    q11_3: QuadSurd
    q13_2: QuadSurd
    q13_3: QuadSurd

    @property
    def values(self) -> tuple:
        return (self.q11_2, self.q11_3, self.q13_2, self.q13_3)

    def as_strings(self) -> dict:
        names = ("q11^2", "q11^3", "q13^2", "q13^3")
        return {k: str(v) for k, v in zip(names, self.values)}


def krein_solve(d: int) -> tuple[KreinBranch, KreinBranch]:
    """Both solutions of the Krein system, exact in Q(sqrt(d+2))."""
    if d < 2:
        raise DomainError("the Krein system applies for d >= 2")
    t = QuadSurd.sqrt(d + 2)
    den = Fraction(d * d + d - 1)
    out = []
    for name, s in (("former", 1), ("latter", -1)):
        q112 = d * (d - s * (d - 1) * t) / den
        q113 = d * d * (d + 1 + s * t) / ((d + 1) * den)
        q132 = d * (d - 1) * (d + 1 + s * t) / den
        q133 = d * d * (d * d - 2 - s * t) / ((d + 1) * den)
        out.append(KreinBranch(d, name, q112, q113, q132, q133))
    return out[0], out[1]


def krein_residuals(values, d: int) -> tuple:
    """Residuals of the four equations the Krein parameters must satisfy.

    The third uses the product ``q11^3 * q13^2`` with unit coefficient, which
    follows from the associativity identity together with
    ``q22^1 = q11^2`` and ``q23^1 = q13^2``.
    """
    q112, q113, q132, q133 = values
    d2 = Fraction(d * d)
    return (
        q112 + q132 - d,
        q113 + q133 - d2 / (d + 1),
        q112 * q112 + q113 * q132 - 2 * d2 / (d + 1),
        (d2 - 1) * q113 - d * q132,
    )


def krein_residual_third_scaled(values, d: int):
    """The third equation with an extra ``(d^2-1)/d`` on the product term."""
    q112, q113, q132, _ = values
    d2 = Fraction(d * d)
    return q112 * q112 + (d2 - 1) / d * q113 * q132 - 2 * d2 / (d + 1)


def valency_k1(t: Rational) -> Fraction:
    """``(t+1)^3 (t^2-3) / (3t+5)`` for rational ``t``."""
    t = Fraction(t)
    den = 3 * t + 5
    if den == 0:
        raise DomainError("3t + 5 vanishes")
    return (t + 1) ** 3 * (t * t - 3) / den


def k1_polynomial_part(t: Rational) -> Fraction:
    t = Fraction(t)
    return 81 * t ** 4 + 108 * t ** 3 - 180 * t ** 2 - 348 * t - 149


def k1_remainder(t: Rational) -> Fraction:
    """``16 / (3t+5)``; together with the polynomial part it gives ``243*k1``."""
    return Fraction(16) / (3 * Fraction(t) + 5)


def valency_k1_surd(d: int) -> QuadSurd:
    """The same valency with ``t = sqrt(d+2)`` kept exact."""
    t = QuadSurd.sqrt(d + 2)
    return (t + 1) ** 3 * (t * t - 3) / (3 * t + 5)


def valency_from_q_row(row, mults) -> float:
    """``N / sum_j |Q_ij|^2 / m_j`` with ``N = sum_j m_j``; the orthogonality relation."""
    n = sum(mults)
    return n / sum(abs(complex(z)) ** 2 / m for z, m in zip(row, mults))



@dataclass(frozen=True)
class NonexistenceResult:
    d: int
    exists: bool
    reason: str


def former_q11_2(d: int) -> QuadSurd:
    """``q11^2`` on the former branch; only its sign matters for existence."""
    t = QuadSurd.sqrt(d + 2)
    return d * (d - (d - 1) * t) / Fraction(d * d + d - 1)


def nonexistence(d: int) -> NonexistenceResult:
    """Whether a 3-code of size ``upper_bound(d)`` can exist, with the certificate."""
    if d < 1:
        raise DomainError("dimension must be at least 1")
    if d == 1:
        return NonexistenceResult(1, True, REASON_TRIVIAL)
    if former_q11_2(d).sign() >= 0:
        if d != 2:
            raise AssertionError(f"former branch nonnegative at d={d}")
        return NonexistenceResult(d, True, REASON_TRIVIAL)
    if not is_square(d + 2):
        # the valency has a nonzero irrational part, so it cannot be an integer
        if valency_k1_surd(d).is_rational():
            raise AssertionError(f"valency unexpectedly rational at d={d}")
        return NonexistenceResult(d, False, REASON_T_IRRATIONAL)
    t = isqrt(d + 2)
    if 16 % (3 * t + 5) == 0:
        raise AssertionError(f"3t+5 divides 16 at t={t}")
    if valency_k1(t).denominator == 1:
        raise AssertionError(f"valency integral at t={t}")
    return NonexistenceResult(d, False, REASON_NO_DIVISOR)


# -- the tight codes ------------------------------------------------------------------------


def tight_code_points(d: int) -> np.ndarray:
    if d == 1:
        return np.array([[1], [1j], [-1], [-1j]], dtype=complex)
    if d == 2:
        r2, r3, r6 = np.sqrt(2), np.sqrt(3), np.sqrt(6)
        half = np.array(
            [
                [1, 0],
                [1j * r2 / r6, (1 + 1j * r3) / r6],
                [1j * r2 / r6, (1 - 1j * r3) / r6],
                [1j * r2 / r6, -2 / r6],
            ],
            dtype=complex,
        )
        return np.vstack([half, -half])
    raise DomainError("tight 3-codes exist only for d = 1, 2")


def tight_code(d: int, tol: ToleranceConfig = DEFAULT_TOL) -> Code:
    pts = tight_code_points(d)
    code = Code(d, pts, ())
    return Code(d, pts, tuple(angle_set(code, tol)))


def exact_tight_gram(d: int):
    """Exact Gram matrix ``x^* y`` of the tight code as a sympy matrix."""
    import sympy as sp

    if d == 1:
        pts = [sp.Integer(1), sp.I, sp.Integer(-1), -sp.I]
        rows = [[sp.conjugate(x) * y for y in pts] for x in pts]
        return sp.Matrix(rows)
    if d != 2:
        raise DomainError("tight 3-codes exist only for d = 1, 2")
    s6 = sp.sqrt(6)
    half = [
        (sp.Integer(1), sp.Integer(0)),
        (sp.sqrt(-2) / s6, (1 + sp.sqrt(-3)) / s6),
        (sp.sqrt(-2) / s6, (1 - sp.sqrt(-3)) / s6),
        (sp.sqrt(-2) / s6, -2 / s6),
    ]
    pts = half + [(-a, -b) for a, b in half]
    rows = [
        [sp.nsimplify(sp.expand(sp.conjugate(x[0]) * y[0] + sp.conjugate(x[1]) * y[1])) for y in pts]
        for x in pts
    ]
    return sp.Matrix(rows)


def exact_second_eigenmatrix(d: int = 2):
    """Second eigenmatrix of the tight code's scheme in exact arithmetic.

    ``E_1`` is ``(d/N)`` times the Gram matrix, ``E_2`` its transpose,
    ``E_0 = J/N`` and ``E_3`` the remainder of the identity.  Relations are
    ordered alpha (positive imaginary part), conj(alpha), then the real angle.
    """
    import sympy as sp

    g = exact_tight_gram(d)
    n = g.shape[0]
    e0 = sp.ones(n, n) / n
    e1 = g * sp.Rational(d, n)
    e2 = e1.T
    e3 = sp.eye(n) - e0 - e1 - e2
    idem = [e0, e1, e2, e3]
    angles = {sp.simplify(g[0, j]) for j in range(1, n)}
    alpha = next(z for z in angles if sp.im(z).is_positive)
    beta = next(z for z in angles if sp.im(z).is_zero)
    reps = [(0, 0)]
    for target in (alpha, sp.conjugate(alpha), beta):
        j = next(j for j in range(n) if sp.simplify(g[0, j] - target) == 0)
        reps.append((0, j))
    q = sp.zeros(4, 4)
    for i, (x, y) in enumerate(reps):
        for j, e in enumerate(idem):
            q[i, j] = sp.nsimplify(sp.simplify(n * e[x, y]))
    return q


def reference_q_matrix_d2():
    """The second eigenmatrix of the 8-point tight code as sympy values."""
    import sympy as sp

    a = 2 * sp.I / sp.sqrt(3)
    return sp.Matrix([[1, 2, 2, 3], [1, a, -a, -1], [1, -a, a, -1], [1, -2, -2, 3]])


def tight_code_via_representation(d: int, tol: ToleranceConfig = DEFAULT_TOL) -> Code:
    """Re-extract the tight code from its own Gram matrix (coordinate-free check)."""
    pts = tight_code_points(d)
    gram = pts.conj() @ pts.T
    return extract_vectors(gram, d, tol)


def verify_tight(d: int, tol: ToleranceConfig = DEFAULT_TOL) -> dict:
    code = tight_code(d, tol)
    sp_ = build_scheme_from_code(code, tol)
    min_krein = float(sp_.krein.real.min())
    return {
        "d": d,
        "size": code.size,
        "upper_bound": upper_bound(d),
        "angles": [[z.real, z.imag] for z in code.angle_set],
        "multiplicities": list(sp_.multiplicities),
        "valencies": list(sp_.valencies),
        "hat": list(sp_.hat),
        "krein_min": min_krein,
        "krein_nonnegative": min_krein >= -SCHEME_TOL,
        "krein_reconstruction_error": krein_reconstruction_error(sp_),
    }


def check_d(d: int) -> None:
    if not isinstance(d, int) or d < 1:
        raise ValidationError("dimension must be a positive integer")
