"""Exhaustive search for the largest complex spherical 3-codes in C^d.

Simple graphs whose positive-ratio representation dimension is at most 2d
are generated vertex by vertex (the dimension never drops when a vertex is
added, so the search is pruned hereditarily).  For each graph with a
spherical minimal representation, orientations of its edges or of its
non-edges are kept when the skew matrix annihilates the relevant null space:
the Euclidean null space when the dimension is below 2d, the null space of
the minimal Gram matrix when it equals 2d.  Each surviving oriented graph
gets its complex representation dimension, and those of dimension d are the
codes.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Optional

import numpy as np

from . import __version__
from .crep import extract_vectors, rep_dim_oriented, validate_code
from .errors import DomainError, IndeterminateError, IntegrityError, ResourceLimitError, ValidationError
from .euclid import classify_type, e0_doubleprime, e0_prime, rep_dim_plus
from .graphcore import (
    OrientedGraph,
    SimpleGraph,
    canonical_label,
    complement,
    enumerate_orientations,
    graph_levels,
    parse_digraph6,
    parse_graph6,
    emit_graph6,
)
from .spectral import DEFAULT_TOL, ToleranceConfig
from .tight import upper_bound

log = logging.getLogger(__name__)

DEFAULT_NMAX = {1: 6, 2: 9, 3: 10}
ROW_ZERO = 1e-8
ROW_AMBIGUOUS = 1e-6
CACHE_FORMAT = 1


@dataclass
class ClassificationReport:
    d: int
    m: int
    count: int
    count_unmerged: int
    candidates: list
    complete: bool
    config_hash: str
    f1_counts: dict = field(default_factory=dict)
    f2_counts: dict = field(default_factory=dict)
    n_max: int = 0
    version: str = __version__

    @property
    def valid(self) -> bool:
        return self.m > 2 * self.d + 1

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "m": self.m,
            "count": self.count,
            "count_unmerged": self.count_unmerged,
            "candidates": self.candidates,
            "complete": self.complete,
            "valid": self.valid,
            "config_hash": self.config_hash,
            "version": self.version,
            "n_max": self.n_max,
            "f1_counts": {str(k): v for k, v in sorted(self.f1_counts.items())},
            "f2_counts": {str(k): v for k, v in sorted(self.f2_counts.items())},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1) + "\n"


# -- orientation filter ---------------------------------------------------------------------


def _sign_patterns(m: int) -> np.ndarray:
    if m == 0:
        return np.zeros((1, 0))
    return np.array(list(product((1.0, -1.0), repeat=m)))


def filter_orientations(
    g: SimpleGraph, nullbasis: np.ndarray, complement_arm: bool = False
) -> Iterator[OrientedGraph]:
    """Orientations ``A`` of the edges (or non-edges) of ``g`` with ``(A - A^T) Z = 0``.

    Vertices are decided in order; at vertex ``r`` every sign pattern of its
    edges to later vertices is tested at once, and only patterns making row
    ``r`` of ``(A - A^T) Z`` vanish are extended.
    """
    target = complement(g) if complement_arm else g
    z = np.asarray(nullbasis, dtype=float)
    n = target.n
    if z.ndim != 2 or z.shape[0] != n:
        raise ValidationError("null basis must have one row per vertex")
    if z.shape[1] == 0:
        yield from enumerate_orientations(target)
        return
    later = [[v for v in range(r + 1, n) if target.rows[r] >> v & 1] for r in range(n)]
    patterns = [_sign_patterns(len(vs)) for vs in later]
    # skew[r][v] = +1 when r -> v
    skew = np.zeros((n, n))

    def rec(r):
        if r == n:
            out = [0] * n
            for u in range(n):
                for v in range(n):
                    if skew[u, v] > 0:
                        out[u] |= 1 << v
            yield OrientedGraph._trusted(n, tuple(out))
            return
        fixed = skew[r, :r] @ z[:r]
        vs = later[r]
        rows = fixed[None, :] + patterns[r] @ z[vs] if vs else fixed[None, :]
        mag = np.abs(rows).max(axis=1) if rows.shape[1] else np.zeros(rows.shape[0])
        if ((mag > ROW_ZERO) & (mag < ROW_AMBIGUOUS)).any():
            raise IndeterminateError(f"row {r} residual inside the tolerance band")
        for k in np.flatnonzero(mag <= ROW_ZERO):
            signs = patterns[r][k]
            for s, v in zip(signs, vs):
                skew[r, v] = s
                skew[v, r] = -s
            yield from rec(r + 1)
        for v in vs:
            skew[r, v] = skew[v, r] = 0.0

    yield from rec(0)


# -- per graph-class work unit ---------------------------------------------------------------


def _orientation_records(g, d, info, tol):
    basis_kind = "F2" if info.rep_dim == 2 * d else "F1"
    basis = e0_doubleprime(g, info, tol) if basis_kind == "F2" else e0_prime(g, info, tol)
    records = []
    for arm in (False, True):
        target = complement(g) if arm else g
        if target.is_edgeless():
            continue
        seen = {}
        for o in filter_orientations(g, basis, arm):
            lab = str(canonical_label(o))
            if lab not in seen:
                seen[lab] = o
        for lab in sorted(seen):
            o = parse_digraph6(lab)
            try:
                r = rep_dim_oriented(o, tol, complement=arm)
                rep = r.rep_dim
            except DomainError as exc:
                log.debug("%s rejected: %s", lab, exc)
                rep = None
            records.append({"digraph6": lab, "arm": "Bbar" if arm else "B", "set": basis_kind, "rep_dim": rep})
    return records


def process_unit(args) -> dict:
    """Work for one simple graph class; returns a JSON-serializable record."""
    g6, d, tol_dict = args
    tol = ToleranceConfig(**tol_dict)
    g = parse_graph6(g6)
    if g.is_complete() or g.is_edgeless():
        return {"skip": "complete or edgeless"}
    info = classify_type(g, tol)
    if not info.spherical_minimal:
        return {"skip": f"type {info.graph_type}"}
    if info.xi <= tol.zero_rel:
        return {"skip": "zero critical ratio"}
    if not d <= info.rep_dim <= 2 * d:
        return {"skip": f"rep_dim {info.rep_dim} outside [{d}, {2 * d}]"}
    return {"type": info.graph_type, "rep_dim": info.rep_dim, "orientations": _orientation_records(g, d, info, tol)}


# -- checkpointing ---------------------------------------------------------------------------


def config_hash(d: int, n_max: int, tol: ToleranceConfig) -> str:
    blob = json.dumps({"d": d, "n_max": n_max, "tol": tol.as_dict(), "version": __version__,
                       "format": CACHE_FORMAT}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _line_hash(key: str, value) -> str:
    return hashlib.sha256(json.dumps([key, value], sort_keys=True).encode()).hexdigest()


def load_cache(path: str, chash: str) -> dict:
    """Completed units from a checkpoint, verified line by line."""
    if not path or not os.path.exists(path):
        return {}
    done = {}
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        return {}
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise IntegrityError(f"checkpoint header unreadable: {exc}") from exc
    if header.get("config_hash") != chash:
        raise IntegrityError("checkpoint was written under a different configuration")
    for no, line in enumerate(lines[1:], start=2):
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise IntegrityError(f"checkpoint line {no} unreadable: {exc}") from exc
        if _line_hash(rec.get("key"), rec.get("value")) != rec.get("sha256"):
            raise IntegrityError(f"checkpoint line {no} fails its content hash")
        done[rec["key"]] = rec["value"]
    return done


def persist_cache(path: str, chash: str, key: str, value) -> None:
    """Append one completed unit to the checkpoint (creating it with a header)."""
    new = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", encoding="utf-8") as fh:
        if new:
            fh.write(json.dumps({"config_hash": chash, "format": CACHE_FORMAT}, sort_keys=True) + "\n")
        fh.write(json.dumps({"key": key, "value": value, "sha256": _line_hash(key, value)}, sort_keys=True) + "\n")
        fh.flush()
        os.fsync(fh.fileno())


class Interrupted(ResourceLimitError):
    """Raised when ``max_units`` stops a run early; the checkpoint holds the progress."""


# -- driver ----------------------------------------------------------------------------------


def _levels(d: int, n_max: int):
    bound = 2 * d
    frontier_empty = False
    out = []
    for k, graphs in graph_levels(n_max, accept=lambda g: rep_dim_plus(g) <= bound):
        if not graphs:
            frontier_empty = True
            break
        out.append((k, graphs))
    return out, frontier_empty


def _candidate_entry(lab: str, arm: str, tol: ToleranceConfig) -> dict:
    o = parse_digraph6(lab)
    r = rep_dim_oriented(o, tol, complement=(arm == "Bbar"))
    code = extract_vectors(r.gram, r.rep_dim, tol)
    check = validate_code(code, tol)
    js = code.to_json()
    return {
        "digraph6": lab,
        "arm": arm,
        "rep_dim": r.rep_dim,
        "eta": r.eta,
        "a": r.a_opt,
        "c": r.c_opt,
        "reduced": r.reduced,
        "angles": js["angles"],
        "points": js["points"],
        "validation": check,
    }


def classify_largest(
    d: int,
    n_max: Optional[int] = None,
    tol: ToleranceConfig = DEFAULT_TOL,
    threads: int = 1,
    cache: Optional[str] = None,
    max_units: Optional[int] = None,
) -> ClassificationReport:
    """Classify the largest 3-codes in C^d found from graphs on at most ``n_max`` vertices."""
    if d not in (1, 2, 3):
        raise ValidationError("classification is supported for d in {1, 2, 3}")
    n_max = DEFAULT_NMAX[d] if n_max is None else int(n_max)
    if not 1 <= n_max <= 10:
        raise ValidationError("n_max must lie in 1..10")
    chash = config_hash(d, n_max, tol)
    done = load_cache(cache, chash) if cache else {}
    levels, frontier_empty = _levels(d, n_max)
    units = [(f"{k}:{emit_graph6(g)}", emit_graph6(g)) for k, graphs in levels if k >= 3 for g in graphs]
    todo = [(key, g6) for key, g6 in units if key not in done]
    if max_units is not None and len(todo) > max_units:
        todo, stop = todo[:max_units], True
    else:
        stop = False
    args = [(g6, d, tol.as_dict()) for _, g6 in todo]
    if threads > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = pool.map(process_unit, args, chunksize=max(1, len(args) // (8 * threads)))
            for (key, _), res in zip(todo, results):
                done[key] = res
                if cache:
                    persist_cache(cache, chash, key, res)
    else:
        for (key, _), a in zip(todo, args):
            res = process_unit(a)
            done[key] = res
            if cache:
                persist_cache(cache, chash, key, res)
    if stop:
        raise Interrupted(f"stopped after {max_units} units")
    return _reduce(d, n_max, tol, chash, units, done, frontier_empty)


def _reduce(d, n_max, tol, chash, units, done, frontier_empty) -> ClassificationReport:
    f_counts = {"F1": defaultdict(set), "F2": defaultdict(set)}
    best = {}
    for key, _ in sorted(units, key=lambda u: (int(u[0].split(":")[0]), u[0])):
        res = done[key]
        for rec in res.get("orientations", ()):
            lab = rec["digraph6"]
            n = parse_digraph6(lab).n
            f_counts[rec["set"]][n].add(lab)
            if rec["rep_dim"] is None:
                continue
            cur = best.get(lab)
            cand = (rec["rep_dim"], rec["arm"])
            if cur is None or cand < cur:
                best[lab] = cand
    found = {lab: arm for lab, (rep, arm) in best.items() if rep == d}
    m = max((parse_digraph6(lab).n for lab in found), default=0)
    top = sorted(lab for lab in found if parse_digraph6(lab).n == m)
    merged = {}
    for lab in top:
        o = parse_digraph6(lab)
        rev = str(canonical_label(o.reverse()))
        key = min(lab, rev)
        merged.setdefault(key, lab)
    candidates = [_candidate_entry(merged[k], found[merged[k]], tol) for k in sorted(merged)]
    complete = frontier_empty or m == upper_bound(d)
    return ClassificationReport(
        d=d,
        m=m,
        count=len(merged),
        count_unmerged=len(top),
        candidates=candidates,
        complete=bool(complete),
        config_hash=chash,
        f1_counts={k: len(v) for k, v in f_counts["F1"].items()},
        f2_counts={k: len(v) for k, v in f_counts["F2"].items()},
        n_max=n_max,
    )
