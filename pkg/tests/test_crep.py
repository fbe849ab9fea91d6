import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ccode.crep import (
    Code,
    angle_set,
    build_H,
    cluster_values,
    extract_vectors,
    is_three_code_angles,
    phi_embed,
    rep_dim_identity_base,
    rep_dim_minimal_gram,
    rep_dim_oriented,
    representation,
    validate_code,
)
from ccode.errors import DomainError, IndeterminateError, ValidationError
from ccode.euclid import classify_type
from ccode.graphcore import OrientedGraph, complement, enumerate_orientations, enumerate_simple_graphs
from ccode.spectral import is_psd, rank_of
from conftest import A1, A2, H1, H2, equal_up_to_perm_conj

seeds = st.integers(0, 2**32 - 1)


def random_unit_gram(rng, n, r):
    x = rng.normal(size=(r, n)) + 1j * rng.normal(size=(r, n))
    x /= np.linalg.norm(x, axis=0)
    return x.conj().T @ x


def spherical_orientations(n_max=5):
    """Every orientation of every admissible arm on up to ``n_max`` vertices."""
    for n in range(3, n_max + 1):
        for g in enumerate_simple_graphs(n):
            info = classify_type(g)
            if not info.spherical_minimal or info.xi <= 1e-9:
                continue
            for arm in (False, True):
                target = complement(g) if arm else g
                if target.is_edgeless():
                    continue
                for o in enumerate_orientations(target):
                    yield g, info, arm, o


# -- build_H -------------------------------------------------------------------------------


def test_build_H_examples(g1, g2):
    assert np.allclose(build_H(g1, 0.5, 0.5, 0.5), H1)
    assert np.allclose(build_H(g2, 1.0, 1.0, 1 / np.sqrt(2)), H2)
    h = build_H(g1, 0.5, 0.3, 0.0)
    assert not np.iscomplexobj(h)
    b = np.array(g1.adj + g1.adj.T, dtype=float)
    bbar = 1 - b - np.eye(4)
    assert np.allclose(h, -(0.5 * b + bbar) + 0.3)


def test_build_H_entry_pattern(g1):
    h = build_H(g1, 0.4, 0.7, 0.2)
    for u in range(4):
        assert h[u, u] == pytest.approx(0.7)
        for v in range(4):
            if A1[u, v]:
                assert h[u, v] == pytest.approx(-0.4 + 0.7 + 0.2j)
                assert h[v, u] == pytest.approx(-0.4 + 0.7 - 0.2j)


# -- representations -----------------------------------------------------------------------


def test_g1_reduced_rank_one(g1):
    r = rep_dim_oriented(g1)
    assert r.rep_dim == 1 and r.reduced and r.base_rep_dim == 2
    assert np.isclose(r.eta, 0.5) and np.isclose(r.c_opt, 0.5) and np.isclose(r.a_opt, 0.5)
    assert equal_up_to_perm_conj(r.raw_gram, H1)
    assert np.allclose(np.diag(r.gram), 1)


def test_g2_minimal_route_rejects(g2):
    with pytest.raises(DomainError):
        rep_dim_oriented(g2)


def test_g2_identity_base(g2):
    r = rep_dim_identity_base(g2)
    assert r.rep_dim == 2 and np.isclose(r.eta, 1 / np.sqrt(2))
    assert equal_up_to_perm_conj(r.gram, H2)


def test_minimal_gram_pathway_agrees_on_g1(g1):
    assert rep_dim_minimal_gram(g1).rep_dim == 1


def test_no_arcs_rejected():
    with pytest.raises(DomainError):
        rep_dim_oriented(OrientedGraph.from_arcs(4, []))


def test_unknown_pathway(g1):
    with pytest.raises(ValidationError):
        representation(g1, "nope")


def test_representation_invariants_small():
    seen = 0
    for g, info, arm, o in spherical_orientations(5):
        try:
            r = rep_dim_oriented(o, complement=arm)
        except DomainError:
            continue
        seen += 1
        assert is_psd(r.gram) and rank_of(r.gram) == r.rep_dim
        assert np.allclose(np.diag(r.gram), 1)
        if r.reduced:
            assert r.rep_dim < info.rep_dim
        else:
            assert r.rep_dim == info.rep_dim
        code = extract_vectors(r.gram, r.rep_dim)
        assert len(code.angle_set) <= 3
        assert any(abs(z.imag) > 1e-8 for z in code.angle_set)
    assert seen == 20


@given(seeds)
def test_half_floor(seed):
    """A complex representation is at least half as large as its real part's rank."""
    rng = np.random.default_rng(seed)
    g = random_unit_gram(rng, int(rng.integers(3, 9)), int(rng.integers(1, 4)))
    assert 2 * rank_of(g) >= rank_of(g.real)


# -- vectors and angles --------------------------------------------------------------------


def test_extract_h1_is_rotated_square():
    code = extract_vectors(2 * H1, 1)
    pts = code.points[:, 0]
    rot = pts / pts[0]
    assert np.allclose(sorted(np.angle(rot) % (2 * np.pi)), [0, np.pi / 2, np.pi, 3 * np.pi / 2])


def test_extract_identity():
    code = extract_vectors(np.eye(3), 3)
    assert np.allclose(code.gram(), np.eye(3))
    assert len(code.angle_set) == 1 and abs(code.angle_set[0]) < 1e-12


def test_extract_rank_mismatch():
    with pytest.raises(ValidationError):
        extract_vectors(np.eye(3), 2)


@given(seeds)
def test_extract_round_trip(seed):
    rng = np.random.default_rng(seed)
    n, r = int(rng.integers(2, 8)), int(rng.integers(1, 4))
    g = random_unit_gram(rng, n, min(r, n))
    code = extract_vectors(g, rank_of(g))
    assert np.allclose(code.gram(), g, atol=1e-9)
    again = extract_vectors(code.gram(), code.dim)
    assert np.allclose(again.points, code.points, atol=1e-9)


def test_phi_examples():
    code = Code(1, np.array([[1.0 + 0j], [1j]]))
    assert np.allclose(phi_embed(code), [[1, 0], [0, 1]])


@given(seeds)
def test_phi_preserves_real_part(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 5))
    x = rng.normal(size=(2, d)) + 1j * rng.normal(size=(2, d))
    phi = phi_embed(Code(d, x))
    assert np.isclose(phi[0] @ phi[1], np.vdot(x[0], x[1]).real)


def test_angle_set_square():
    code = Code(1, np.array([[1], [1j], [-1], [-1j]], dtype=complex))
    angles = angle_set(code)
    assert len(angles) == 3 and is_three_code_angles(angles)
    assert all(min(abs(z - w) for w in angles) < 1e-12 for z in (1j, -1j, -1))


def test_angle_set_pentagon():
    pts = np.exp(2j * np.pi * np.arange(5) / 5)[:, None]
    angles = angle_set(Code(1, pts))
    assert len(angles) == 4
    assert not is_three_code_angles(angles)


def test_cluster_ambiguous():
    with pytest.raises(IndeterminateError):
        cluster_values(np.array([0.0, 5e-7]))


def test_code_json_round_trip():
    code = extract_vectors(2 * H1, 1)
    back = Code.from_json(json.loads(json.dumps(code.to_json())))
    assert np.allclose(back.points, code.points)
    assert validate_code(back)["valid"]


def test_code_json_malformed():
    with pytest.raises(ValidationError):
        Code.from_json({"dim": 2, "points": [[[1, 0]]]})
    with pytest.raises(ValidationError):
        Code.from_json({"points": []})


def test_validate_flags_bad_norm():
    code = Code(1, np.array([[2.0 + 0j], [1j]]), ())
    rep = validate_code(code)
    assert not rep["unit_norm"] and not rep["valid"]
