"""Command-line interface: ``k3carpets <command> --a A --b B [options]``."""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys
from dataclasses import asdict, dataclass

from .budget import Budget
from .carpets import CarpetParams, carpet_generators, expected_generator_count
from .errors import BudgetExceeded, CarpetError, InvariantViolation
from .groebner import artinian_hilbert, buchberger_certify, initial_ideal
from .linalg import SparseIntMatrix, factor_invariants, smith_normal_form
from .pipeline import conjecture_scan, green_report, resolution_for
from .schreyer import (
    betti_table,
    check_d_squared,
    closed_form_table,
    minimality_check,
    resolve_monomial,
)
from .strands import constant_strand, minimal_betti_table, strand_homology_dim

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BUDGET = 3
EXIT_INVARIANT = 4

COMMANDS = ("ideal", "certify", "resolve", "strand", "green", "betti", "scan", "snf")


@dataclass
class RunConfig:
    command: str
    a: int
    b: int
    e1: int = 2
    e2: int = 1
    characteristic: int = 0
    strand_degree: int | None = None
    output_format: str = "text"
    budget_seconds: int | None = None
    matrix_out: str | None = None
    matrix_in: str | None = None
    tables: bool = False

    @property
    def params(self):
        return CarpetParams(self.a, self.b, self.e1, self.e2)


def _parse_e(text):
    try:
        e1, e2 = (int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"--e expects two integers 'e1,e2', got {text!r}")
    return e1, e2


def build_parser():
    p = argparse.ArgumentParser(prog="k3carpets", description="Syzygies of K3 carpets over Z.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("matrix", nargs="?", help="matrix file (snf only)")
    p.add_argument("--a", type=int, default=None)
    p.add_argument("--b", type=int, default=None)
    p.add_argument("--e", type=_parse_e, default=(2, 1), help="e1,e2 (use --e=-1,1 for negatives)")
    p.add_argument("--char", type=int, default=0, dest="characteristic")
    p.add_argument("--degree", type=int, default=None)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--budget", type=int, default=None, help="wall-clock seconds")
    p.add_argument("--matrix-out", default=None, help="directory for strand matrix files")
    p.add_argument("--tables", action="store_true", help="green: add per-prime Betti tables")
    return p


def config_from_args(ns) -> RunConfig:
    if ns.command != "snf" or ns.matrix is None:
        if ns.a is None:
            raise CarpetError("--a is required")
    a = ns.a if ns.a is not None else 0
    b = ns.b if ns.b is not None else a
    cfg = RunConfig(
        command=ns.command,
        a=a,
        b=b,
        e1=ns.e[0],
        e2=ns.e[1],
        characteristic=ns.characteristic,
        strand_degree=ns.degree,
        output_format=ns.format,
        budget_seconds=ns.budget,
        matrix_out=ns.matrix_out,
        matrix_in=ns.matrix,
        tables=ns.tables,
    )
    if cfg.matrix_in is None or cfg.command != "snf":
        cfg.params  # validates a >= b >= 1
    if cfg.budget_seconds is not None and cfg.budget_seconds <= 0:
        raise CarpetError("--budget must be positive")
    if cfg.command == "scan" and cfg.a < 2:
        raise CarpetError("scan needs --a >= 2")
    return cfg


# ---------------------------------------------------------------------------
# commands; each returns (text, json payload)


def cmd_ideal(cfg, budget):
    B = carpet_generators(cfg.params)
    lines = [str(g) for g in B]
    payload = {
        "count": len(B),
        "generators": lines,
        "lead_terms": [B.ring.format_monomial(m) for m in B.lead_terms],
    }
    return "\n".join(lines) + "\n", payload


def cmd_certify(cfg, budget):
    params = cfg.params
    a, b = params.a, params.b
    B = carpet_generators(params)
    checks = []
    checks.append(("generator_count", len(B) == expected_generator_count(a, b)))
    checks.append(("buchberger", buchberger_certify(B)))
    h = artinian_hilbert(B)
    if b >= 2:
        checks.append(("artinian_hilbert", h.values == (1, a + b - 1, a + b - 1, 1)))
    else:
        checks.append(("artinian_length", h.length_total == 2 * (a + b)))
    budget.check()
    mono = resolve_monomial(initial_ideal(B), B.ring, budget=budget)
    if params.is_carpet and b >= 2:
        checks.append(("initial_ideal_resolution_minimal", minimality_check(mono)))
    F = resolution_for(params, budget)
    checks.append(("d_squared_zero", check_d_squared(F)))
    checks.append(("lead_term_betti_agreement", betti_table(F) == betti_table(mono)))
    if params.is_carpet and b >= 2:
        checks.append(("closed_form_betti", betti_table(F) == closed_form_table(a, b)))
    text = "".join(f"{name}: {'pass' if ok else 'FAIL'}\n" for name, ok in checks)
    payload = {"checks": {name: ok for name, ok in checks}, "all_pass": all(ok for _, ok in checks)}
    if not payload["all_pass"]:
        raise _Failed(text, payload)
    return text, payload


def _write_strand(cfg, S):
    os.makedirs(cfg.matrix_out, exist_ok=True)
    written = []
    for i in sorted(S.maps):
        path = os.path.join(cfg.matrix_out, f"strand{S.degree}_D{i}.txt")
        with open(path, "w") as fh:
            fh.write(S.map(i).to_text())
        written.append(path)
    return written


def cmd_resolve(cfg, budget):
    F = resolution_for(cfg.params, budget)
    if not check_d_squared(F):
        raise InvariantViolation("d o d != 0")
    T = betti_table(F)
    payload = {"betti": T.to_json(), "ranks": F.ranks()}
    text = T.to_text()
    if cfg.matrix_out:
        if cfg.strand_degree is None:
            raise CarpetError("--matrix-out needs --degree")
        payload["matrix_files"] = _write_strand(cfg, constant_strand(F, cfg.strand_degree))
    return text, payload


def cmd_strand(cfg, budget):
    params = cfg.params
    k = cfg.strand_degree if cfg.strand_degree is not None else params.a + 1
    F = resolution_for(params, budget)
    S = constant_strand(F, k)
    p = cfg.characteristic
    rows = []
    for i in S.positions():
        rows.append({"i": i, "rank": S.beta(i), "homology": strand_homology_dim(S, i, p)})
    maps = [
        {"i": i, "shape": list(S.map(i).shape), "nnz": S.map(i).nnz, "rank": S.rank(i, p)}
        for i in sorted(S.maps)
    ]
    payload = {"degree": k, "characteristic": p, "terms": rows, "maps": maps, "blocks": len(S.blocks())}
    lines = [f"strand degree {k}, characteristic {p}, {payload['blocks']} blocks"]
    lines += [f"F_{r['i']}: rank {r['rank']}, homology {r['homology']}" for r in rows]
    lines += [f"D_{m['i']}: {m['shape'][0]} x {m['shape'][1]}, nnz {m['nnz']}, rank {m['rank']}" for m in maps]
    if cfg.matrix_out:
        payload["matrix_files"] = _write_strand(cfg, S)
    return "\n".join(lines) + "\n", payload


def cmd_green(cfg, budget):
    rep = green_report(cfg.params, tables=cfg.tables, budget=budget)
    return rep.to_text(), rep.to_json()


def cmd_betti(cfg, budget):
    p = cfg.params
    resolution_for(p, budget)
    T = minimal_betti_table(p.a, p.b, p.e, cfg.characteristic)
    return T.to_text(), {"characteristic": cfg.characteristic, "betti": T.to_json()}


def cmd_scan(cfg, budget):
    grid = [CarpetParams(a, a, cfg.e1, cfg.e2) for a in range(2, cfg.a + 1)]
    res = conjecture_scan(grid=grid, budget=budget)
    if res.truncated:
        raise _Partial(res.to_text(), res.to_json())
    return res.to_text(), res.to_json()


def _compress(factors):
    runs = []
    for d in factors:
        if runs and runs[-1][0] == d:
            runs[-1][1] += 1
        else:
            runs.append([d, 1])
    return " ".join(f"{d}^{n}" if n > 1 else str(d) for d, n in runs)


def cmd_snf(cfg, budget):
    if cfg.matrix_in:
        with open(cfg.matrix_in) as fh:
            M = SparseIntMatrix.from_text(fh.read())
        snf = smith_normal_form(M)
        factors = list(snf.invariant_factors)
        shape = M.shape
    else:
        params = cfg.params
        k = cfg.strand_degree if cfg.strand_degree is not None else params.a + 1
        S = constant_strand(resolution_for(params, budget), k)
        i = k - 1
        factors = []
        for blk in S.blocks().values():
            budget.check()
            Mb = blk.map(i)
            if Mb.entries:
                factors.extend(smith_normal_form(Mb).invariant_factors)
        factors.sort()
        shape = S.map(i).shape
    prod = factor_invariants(factors)
    payload = {
        "shape": list(shape),
        "rank": len(factors),
        "invariant_factors": [str(d) for d in factors],
        "product": str(prod),
    }
    text = (
        f"shape: {shape[0]} x {shape[1]}\nrank: {len(factors)}\n"
        f"invariant_factors: {_compress(factors)}\nproduct: {prod}\n"
    )
    return text, payload


HANDLERS = {
    "ideal": cmd_ideal,
    "certify": cmd_certify,
    "resolve": cmd_resolve,
    "strand": cmd_strand,
    "green": cmd_green,
    "betti": cmd_betti,
    "scan": cmd_scan,
    "snf": cmd_snf,
}


class _Failed(Exception):
    def __init__(self, text, payload):
        self.text, self.payload = text, payload


class _Partial(Exception):
    def __init__(self, text, payload):
        self.text, self.payload = text, payload


def _emit(cfg, text, payload, out):
    if cfg.output_format == "json":
        doc = {"config": asdict(cfg), **payload}
        out.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    else:
        out.write(text)


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stderr(err), contextlib.redirect_stdout(out):
            ns = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INVALID
    try:
        cfg = config_from_args(ns)
    except CarpetError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INVALID
    budget = Budget(cfg.budget_seconds)
    try:
        text, payload = HANDLERS[cfg.command](cfg, budget)
    except _Failed as exc:
        _emit(cfg, exc.text, exc.payload, out)
        err.write("error: certificate failed\n")
        return EXIT_INVARIANT
    except _Partial as exc:
        _emit(cfg, exc.text, {**exc.payload, "partial": True}, out)
        err.write("error: budget exceeded, output truncated\n")
        return EXIT_BUDGET
    except BudgetExceeded as exc:
        if cfg.output_format == "json":
            _emit(cfg, "", {"partial": True, "error": str(exc)}, out)
        err.write(f"error: {exc}\n")
        return EXIT_BUDGET
    except InvariantViolation as exc:
        err.write(f"error: invariant violated: {exc}\n")
        return EXIT_INVARIANT
    except (CarpetError, OSError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INVALID
    _emit(cfg, text, payload, out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
