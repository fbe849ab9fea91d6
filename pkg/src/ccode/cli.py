"""Command-line front end.

Exit codes: 0 success, 2 invalid input or domain error, 3 numerically
indeterminate result, 4 resource limit (including an interrupted run).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from typing import Iterable, Optional

from . import __version__
from .classify import DEFAULT_NMAX, classify_largest, config_hash
from .crep import PATHWAYS, Code, extract_vectors, representation, validate_code
from .errors import CCodeError, ValidationError
from .euclid import classify_type
from .graphcore import (
    canonical_label,
    emit_digraph6,
    emit_graph6,
    enumerate_orientations,
    enumerate_simple_graphs,
    parse_digraph6,
    parse_graph6,
)
from .spectral import DEFAULT_TOL, ToleranceConfig
from .tight import (
    build_scheme_from_code,
    exact_second_eigenmatrix,
    krein_solve,
    nonexistence,
    tight_code,
    upper_bound,
)

CACHE_ENV = "CCODE_CACHE_DIR"
COMMANDS = ("rep-simple", "rep-oriented", "classify", "tight", "verify", "enumerate")


@dataclass(frozen=True)
class RunConfig:
    command: str
    d: Optional[int] = None
    n_max: Optional[int] = None
    tol: ToleranceConfig = DEFAULT_TOL
    cache_path: Optional[str] = None
    output_path: Optional[str] = None
    threads: int = 1
    long_running: bool = False
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}")
        if self.threads < 1:
            raise ValidationError("--threads must be at least 1")
        if self.d is not None and self.d < 1:
            raise ValidationError("--dim must be at least 1")

    def hash(self) -> str:
        blob = json.dumps(
            {"command": self.command, "d": self.d, "n_max": self.n_max, "tol": self.tol.as_dict(),
             "extra": self.extra, "version": __version__},
            sort_keys=True,
        )
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def _emit(lines: Iterable[str], out_path: Optional[str]):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            for line in lines:
                fh.write(line + "\n")
    else:
        for line in lines:
            sys.stdout.write(line + "\n")
        sys.stdout.flush()


def _inputs(args) -> list[str]:
    items = list(args.graphs or [])
    if args.input:
        with open(args.input, encoding="utf-8") as fh:
            items += [ln.strip() for ln in fh if ln.strip()]
    if not items:
        items = [ln.strip() for ln in sys.stdin if ln.strip()]
    return items


def _stamp(obj: dict, cfg: RunConfig) -> dict:
    obj["config_hash"] = cfg.hash()
    obj["version"] = __version__
    return obj


def _complex_pairs(values) -> list:
    return [[float(complex(z).real), float(complex(z).imag)] for z in values]


def cmd_rep_simple(args, cfg: RunConfig) -> int:
    lines = []
    for text in _inputs(args):
        g = parse_graph6(text)
        info = classify_type(g, cfg.tol)
        rec = info.as_dict()
        rec["graph6"] = text
        lines.append(_dump(_stamp(rec, cfg)))
    _emit(lines, cfg.output_path)
    return 0


def cmd_rep_oriented(args, cfg: RunConfig) -> int:
    lines = []
    for text in _inputs(args):
        g = parse_digraph6(text)
        r = representation(g, args.pathway, cfg.tol, args.complement)
        code = extract_vectors(r.gram, r.rep_dim, cfg.tol)
        rec = {
            "digraph6": text,
            "pathway": r.pathway,
            "complement": r.complement,
            "rep_dim": r.rep_dim,
            "base_rep_dim": r.base_rep_dim,
            "eta": r.eta,
            "a": r.a_opt,
            "c": r.c_opt,
            "reduced": r.reduced,
        }
        rec.update(code.to_json())
        lines.append(_dump(_stamp(rec, cfg)))
    _emit(lines, cfg.output_path)
    return 0


def _cache_path(args, cfg: RunConfig) -> Optional[str]:
    if args.cache:
        return args.cache
    root = os.environ.get(CACHE_ENV)
    if root:
        os.makedirs(root, exist_ok=True)
        n_max = cfg.n_max or DEFAULT_NMAX[cfg.d]
        return os.path.join(root, f"classify-d{cfg.d}-{config_hash(cfg.d, n_max, cfg.tol)}.jsonl")
    return None


def cmd_classify(args, cfg: RunConfig) -> int:
    if cfg.d is None:
        raise ValidationError("classify needs --dim")
    if cfg.d == 3 and not cfg.long_running:
        raise ValidationError("d = 3 is long running; pass --long-running to proceed")
    report = classify_largest(
        cfg.d, cfg.n_max, cfg.tol, threads=cfg.threads, cache=_cache_path(args, cfg), max_units=args.max_units
    )
    text = report.dumps()
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _sympy_str(x) -> str:
    return str(x).replace("I", "i")


def cmd_tight(args, cfg: RunConfig) -> int:
    if cfg.d is None:
        raise ValidationError("tight needs --dim")
    d = cfg.d
    res = nonexistence(d)
    out = {"d": d, "exists": res.exists, "reason": res.reason, "upper_bound": upper_bound(d)}
    if d >= 2:
        out["branch_values"] = {b.branch: b.as_strings() for b in krein_solve(d)}
    if d == 2:
        q = exact_second_eigenmatrix(2)
        out["Q"] = [[_sympy_str(q[i, j]) for j in range(4)] for i in range(4)]
    if res.exists:
        code = tight_code(d, cfg.tol)
        sp_ = build_scheme_from_code(code, cfg.tol)
        out["code"] = code.to_json()
        out["multiplicities"] = list(sp_.multiplicities)
        out["valencies"] = list(sp_.valencies)
        out["hat"] = list(sp_.hat)
    text = json.dumps(_stamp(out, cfg), sort_keys=True, indent=1) + "\n"
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.code_out and res.exists:
        with open(args.code_out, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(out["code"], sort_keys=True) + "\n")
    return 0


def _verify_one(obj: dict, cfg: RunConfig) -> dict:
    code = Code.from_json(obj)
    rep = validate_code(code, cfg.tol)
    if rep["degree"] >= 1:
        try:
            sp_ = build_scheme_from_code(code, cfg.tol)
            rep["scheme"] = True
            rep["krein_nonnegative"] = bool(sp_.krein.real.min() >= -1e-10)
        except CCodeError as exc:
            rep["scheme"] = False
            rep["scheme_error"] = str(exc)
    return rep


def cmd_verify(args, cfg: RunConfig) -> int:
    path = args.file
    with (open(path, encoding="utf-8") if path and path != "-" else sys.stdin) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"input is not JSON: {exc}") from exc
    if "candidates" in obj:
        items = [dict(c, dim=c["rep_dim"]) for c in obj["candidates"]]
    else:
        items = [obj]
    reports = [_verify_one(it, cfg) for it in items]
    ok = all(r["valid"] for r in reports)
    out = _stamp({"checks": reports, "all_valid": ok}, cfg)
    _emit([json.dumps(out, sort_keys=True, indent=1)], cfg.output_path)
    return 0 if ok else 2


def cmd_enumerate(args, cfg: RunConfig) -> int:
    if args.oriented:
        g = parse_graph6(args.oriented)
        seen = {}
        for o in enumerate_orientations(g):
            lab = str(canonical_label(o))
            seen.setdefault(lab, emit_digraph6(o))
        _emit(sorted(seen), cfg.output_path)
        return 0
    if cfg.n_max is None:
        raise ValidationError("enumerate needs --nmax or --oriented")
    _emit((emit_graph6(g) for g in enumerate_simple_graphs(cfg.n_max)), cfg.output_path)
    return 0


HANDLERS = {
    "rep-simple": cmd_rep_simple,
    "rep-oriented": cmd_rep_oriented,
    "classify": cmd_classify,
    "tight": cmd_tight,
    "verify": cmd_verify,
    "enumerate": cmd_enumerate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", type=int, default=None, help="Target complex dimension d.")
    common.add_argument("--nmax", type=int, default=None, help="Largest vertex count to enumerate.")
    common.add_argument("--tol", type=float, default=None, help="Relative zero threshold for rank/PSD decisions.")
    common.add_argument("--cache", default=None, help=f"Checkpoint file (default: under ${CACHE_ENV} if set).")
    common.add_argument("--out", default=None, help="Write output here instead of stdout.")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="Worker processes.")
    common.add_argument("--long-running", action="store_true", help="Allow the d = 3 classification.")
    common.add_argument("-v", "--verbose", action="store_true", help="Log progress to stderr.")

    p = argparse.ArgumentParser(prog="ccode", description="Complex spherical 3-codes from oriented graphs.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("rep-simple", parents=[common], help="Euclidean representation data of simple graphs.")
    s.add_argument("graphs", nargs="*", help="graph6 strings (default: read stdin).")
    s.add_argument("--input", help="File with one graph6 string per line.")

    s = sub.add_parser("rep-oriented", parents=[common], help="Complex representation of oriented graphs.")
    s.add_argument("graphs", nargs="*", help="digraph6 strings (default: read stdin).")
    s.add_argument("--input", help="File with one digraph6 string per line.")
    s.add_argument("--complement", action="store_true", help="Arcs sit on the long-distance pairs.")
    s.add_argument("--pathway", choices=PATHWAYS, default="minimal", help="Base Euclidean representation.")

    s = sub.add_parser("classify", parents=[common], help="Classify the largest 3-codes in C^d.")
    s.add_argument("--max-units", type=int, default=None, help=argparse.SUPPRESS)

    s = sub.add_parser("tight", parents=[common], help="Existence of tight 3-codes in C^d.")
    s.add_argument("--code-out", default=None, help="Also write the tight code as JSON.")

    s = sub.add_parser("verify", parents=[common], help="Validate a code or classification report.")
    s.add_argument("file", nargs="?", default="-", help="Code JSON (default: stdin).")

    s = sub.add_parser("enumerate", parents=[common], help="List graph classes.")
    s.add_argument("--oriented", default=None, help="List orientation classes of this graph6 graph.")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        tol = DEFAULT_TOL if args.tol is None else ToleranceConfig(zero_rel=args.tol)
        extra = {"pathway": getattr(args, "pathway", None), "complement": getattr(args, "complement", None)}
        cfg = RunConfig(args.command, args.dim, args.nmax, tol, args.cache, args.out, args.threads,
                        args.long_running, {k: v for k, v in extra.items() if v is not None})
        return HANDLERS[args.command](args, cfg)
    except CCodeError as exc:
        sys.stderr.write(_dump({"error": str(exc), "kind": type(exc).__name__}) + "\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
