"""End-to-end acceptance checks, one test per criterion.

Each test records a one-line verdict in ``RESULTS``; conftest prints them at
the end of the session.
"""

import os
import time
from collections import Counter

import numpy as np
import pytest
import sympy as sp

from ccode.classify import Interrupted, classify_largest
from ccode.crep import Code, phi_embed, rep_dim_identity_base, rep_dim_oriented
from ccode.errors import DomainError
from ccode.euclid import SPHERICAL_TYPES, classify_type, min_rep_distance_matrix_values
from ccode.graphcore import complement, enumerate_orientations, enumerate_simple_graphs
from ccode.tight import (
    REASON_NO_DIVISOR,
    REASON_T_IRRATIONAL,
    build_scheme_from_code,
    exact_second_eigenmatrix,
    krein_solve,
    nonexistence,
    reference_q_matrix_d2,
    tight_code,
)
from conftest import H1, H2, equal_up_to_perm_conj
from oracles import infeasible_at_resolvable_c, min_rank_over_grid, null_killed
from test_spectral import e0_half_holds, eta_error, interlacing_error, rank_drop_holds

RESULTS = {}
LONG_RUNNING = os.environ.get("CCODE_LONG_RUNNING") == "1"


def record(n, ok, detail, status=None):
    status = status or ("PASS" if ok else "FAIL")
    RESULTS[n] = f"criterion {n}: {status}  {detail}"
    print(RESULTS[n])
    return ok


def angle_multiset(points):
    g = points.conj() @ points.T
    n = g.shape[0]
    vals = [g[i, j] for i in range(n) for j in range(n) if i != j]
    return Counter((round(v.real, 9) + 0.0, round(v.imag, 9) + 0.0) for v in vals)


def two_distance_lift(points):
    """``phi(X u wX u w^2X)``: point count and distinct nonzero distances in R^{2d}."""
    w = np.exp(2j * np.pi / 3)
    big = np.vstack([points, w * points, w * w * points])
    real = phi_embed(Code(points.shape[1], big))
    dist = np.linalg.norm(real[:, None, :] - real[None, :, :], axis=2)
    iu = np.triu_indices(len(real), 1)
    vals = np.sort(dist[iu])
    if vals[0] < 1e-9:
        return len(real), None
    groups = 1 + int(np.count_nonzero(np.diff(vals) > 1e-7))
    return len(real), groups


# -- 1 -------------------------------------------------------------------------------------


def test_criterion_1_worked_examples(g1, g2):
    t0 = time.perf_counter()
    r1 = rep_dim_oriented(g1)
    r2 = rep_dim_identity_base(g2)
    elapsed = time.perf_counter() - t0
    ok1 = r1.rep_dim == 1 and equal_up_to_perm_conj(r1.raw_gram, H1, atol=1e-9)
    ok2 = r2.rep_dim == 2 and equal_up_to_perm_conj(r2.gram, H2, atol=1e-9)
    ok = ok1 and ok2 and elapsed < 1.0
    assert record(1, ok, f"G1 rep={r1.rep_dim} G2 rep={r2.rep_dim} grams match={ok1 and ok2} in {elapsed:.3f}s")


# -- 2 -------------------------------------------------------------------------------------


def test_criterion_2_d1():
    t0 = time.perf_counter()
    rep = classify_largest(1)
    elapsed = time.perf_counter() - t0
    angles = [complex(*a) for a in rep.candidates[0]["angles"]] if rep.candidates else []
    want = [1j, -1j, -1]
    match = len(angles) == 3 and all(min(abs(z - w) for z in angles) < 1e-9 for w in want)
    ok = rep.m == 4 and rep.count == 1 and match and elapsed < 10
    assert record(2, ok, f"m={rep.m} classes={rep.count} angles={{+-i,-1}}:{match} in {elapsed:.1f}s")


# -- 3 -------------------------------------------------------------------------------------


def test_criterion_3_d2():
    t0 = time.perf_counter()
    rep = classify_largest(2)
    elapsed = time.perf_counter() - t0
    cand = rep.candidates[0] if rep.candidates else None
    ok = rep.m == 8 and rep.count == 1 and cand is not None
    same = False
    if cand is not None:
        angles = [complex(*a) for a in cand["angles"]]
        want = [1j / np.sqrt(3), -1j / np.sqrt(3), -1]
        ok = ok and len(angles) == 3 and all(min(abs(z - w) for z in angles) < 1e-9 for w in want)
        pts = np.array([[complex(*z) for z in row] for row in cand["points"]])
        same = angle_multiset(pts) == angle_multiset(tight_code(2).points)
        ok = ok and same
    ok = ok and elapsed < 1800
    assert record(3, ok, f"m={rep.m} classes={rep.count} angle multiset matches construction:{same} in {elapsed:.1f}s")


# -- 4 -------------------------------------------------------------------------------------


def test_criterion_4_partial_budget_flag():
    rep = classify_largest(3, n_max=6)
    ok = not rep.complete and rep.m < 9
    assert ok
    if not LONG_RUNNING:
        status = "SKIP" if ok else "FAIL"
        record(4, ok, f"full d=3 run gated (set CCODE_LONG_RUNNING=1); partial n_max=6 report has complete={rep.complete}", status)


@pytest.mark.long_running
@pytest.mark.skipif(not LONG_RUNNING, reason="d=3 classification is gated by CCODE_LONG_RUNNING=1")
def test_criterion_4_d3_full():
    t0 = time.perf_counter()
    rep = classify_largest(3, threads=os.cpu_count() or 1)
    elapsed = time.perf_counter() - t0
    lifted = []
    for cand in rep.candidates:
        pts = np.array([[complex(*z) for z in row] for row in cand["points"]])
        lifted.append(two_distance_lift(pts))
    schlafli = any(n == 27 and groups == 2 for n, groups in lifted)
    ok = rep.m == 9 and rep.count == 35 and rep.complete and schlafli
    assert record(4, ok, f"m={rep.m} classes={rep.count} complete={rep.complete} 27-point two-distance lift:{schlafli} in {elapsed:.0f}s")


# -- 5 -------------------------------------------------------------------------------------


def test_criterion_5_tight_nonexistence():
    t0 = time.perf_counter()
    reasons = Counter()
    ok = True
    for d in range(3, 10001):
        res = nonexistence(d)
        ok = ok and not res.exists and res.reason in (REASON_T_IRRATIONAL, REASON_NO_DIVISOR)
        reasons[res.reason] += 1
    former = krein_solve(2)[0]
    ok = ok and all(v.sign() >= 0 for v in former.values)
    exact_q = sp.simplify(exact_second_eigenmatrix(2) - reference_q_matrix_d2()) == sp.zeros(4, 4)
    numeric_q = build_scheme_from_code(tight_code(2)).Q
    want = np.array(reference_q_matrix_d2().evalf(30), dtype=complex)
    q_err = float(np.abs(numeric_q - want).max())
    elapsed = time.perf_counter() - t0
    ok = ok and exact_q and q_err <= 1e-12 and elapsed < 10
    assert record(
        5, ok,
        f"d=3..10000 nonexistent ({dict(reasons)}); d=2 Q exact={exact_q} numeric err={q_err:.1e} in {elapsed:.1f}s",
    )


# -- 6 -------------------------------------------------------------------------------------


def test_criterion_6_spectral_suite():
    inter = max(interlacing_error(s) for s in range(200))
    half = all(e0_half_holds(s) for s in range(200))
    drop = all(rank_drop_holds(s) for s in range(100))
    eta = max(eta_error(s) for s in range(100))
    ok = inter < 1e-8 and half and drop and eta < 1e-9
    assert record(6, ok, f"interlacing err={inter:.1e} E0/half={half} rank drop={drop} eta err={eta:.1e}")


# -- 7 -------------------------------------------------------------------------------------


def test_criterion_7_oracle_equivalence():
    tally = Counter()
    mismatches = []
    for n in range(3, 6):
        for g in enumerate_simple_graphs(n):
            info = classify_type(g)
            if info.graph_type not in SPHERICAL_TYPES:
                continue
            m = -min_rep_distance_matrix_values(g, info.xi)
            for arm in (False, True):
                target = complement(g) if arm else g
                if target.is_edgeless():
                    continue
                for o in enumerate_orientations(target):
                    k = 1j * o.skew()
                    try:
                        rep = rep_dim_oriented(o, complement=arm).rep_dim
                    except DomainError as exc:
                        rep, why = None, str(exc)
                    if info.xi <= 1e-9:
                        # adjacent vertices coincide, so there is no code to compare
                        tally["zero-ratio"] += 1
                        if rep is not None or "critical ratio is zero" not in why:
                            mismatches.append((g, arm, o, rep))
                    elif not null_killed(m, k):
                        tally["precondition fails"] += 1
                        if rep is not None or not infeasible_at_resolvable_c(m, k):
                            mismatches.append((g, arm, o, rep))
                    else:
                        best, _ = min_rank_over_grid(m, k)
                        tally[f"rank {best}"] += 1
                        if rep != best:
                            mismatches.append((g, arm, o, rep, best))
    ok = not mismatches and sum(v for key, v in tally.items() if key.startswith("rank")) > 0
    assert record(7, ok, f"{dict(sorted(tally.items()))} mismatches={len(mismatches)}")


# -- 8 -------------------------------------------------------------------------------------


def test_criterion_8_determinism(tmp_path):
    single = classify_largest(2, threads=1).dumps()
    many = classify_largest(2, threads=max(2, os.cpu_count() or 1)).dumps()
    cache = str(tmp_path / "d2.jsonl")
    interrupted = False
    try:
        classify_largest(2, threads=1, cache=cache, max_units=10)
    except Interrupted:
        interrupted = True
    resumed = classify_largest(2, threads=1, cache=cache).dumps()
    ok = interrupted and single == many == resumed
    assert record(8, ok, f"1 thread == pool:{single == many} interrupted:{interrupted} resumed identical:{single == resumed}")
