"""Command line front end: ``regrich <command> ...``.

Positions are printed 1-based; the Python API is 0-based.
Exit codes: 0 success, 2 input error, 3 inconclusive verdict under --strict.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from .errors import RegrichError
from .linalg import DEFAULT_CFG, matrix_from_json, matrix_to_json, span_basis
from .transitivity import INCONCLUSIVE, NOT_TRANSITIVE, TRANSITIVE

EXIT_OK, EXIT_INPUT, EXIT_INCONCLUSIVE = 0, 2, 3


def _load(path):
    with open(path) as fh:
        return json.load(fh)


def _cfg(args):
    return DEFAULT_CFG if args.tol is None else replace(DEFAULT_CFG, rank_tol_rel=args.tol)


def _c(z):
    return [float(np.real(z)), float(np.imag(z))]


def _fmt(z):
    z = complex(z)
    if abs(z.imag) <= 1e-12 * max(1.0, abs(z)):
        return f"{z.real:.6g}"
    return f"{z.real:.6g}{z.imag:+.6g}i"


def _parse_ints(s):
    s = s.strip()
    return tuple(int(x) for x in s.split(",")) if s else ()


def _parse_vec(s):
    """Vector from a JSON file or an inline comma list of (complex) numbers."""
    try:
        obj = _load(s)
    except (OSError, ValueError):
        return np.array([complex(x.replace("i", "j")) for x in s.split(",")])
    return np.array([complex(*x) if isinstance(x, list) else complex(x) for x in obj])


def _verdict_word(v):
    return {TRANSITIVE: "RICH", NOT_TRANSITIVE: "POOR", INCONCLUSIVE: "INCONCLUSIVE"}[v.kind]


# ---------------------------------------------------------------- commands

def cmd_rich(args, cfg):
    from .richness import Datum, regularity_report
    datum = Datum.from_json(_load(args.datum))
    rep = regularity_report(datum, cfg, args.seed, exact=True if args.exact else None)
    v = rep.rich
    if v.kind == NOT_TRANSITIVE and rep.conspicuous is not None:
        P, i0, j0 = rep.conspicuous
        pname = "Id" if np.allclose(P, np.eye(datum.d)) else "eigenbasis"
        line = f"POOR (conspicuous: P={pname}, zero at ({i0 + 1},{j0 + 1}))"
    elif v.kind == INCONCLUSIVE:
        line = f"INCONCLUSIVE (certificate: {v.certificate}, margin {v.margin:.3g})"
    else:
        line = f"{_verdict_word(v)} (certificate: {v.certificate})"
    if rep.real_status:
        line += f"\n  real data: {rep.real_status}"
    return line, rep.to_json(), v.kind


def cmd_rank(args, cfg):
    from .richness import Datum, regularity_rank, stabilization_index
    datum = Datum.from_json(_load(args.datum))
    x0 = _parse_vec(args.x0)
    N = args.N if args.N is not None else stabilization_index(datum, cfg)
    r = regularity_rank(datum, x0, N, cfg)
    return f"rank {r} (d-1 = {datum.d - 1}, N = {N})", {"rank": r, "N": N, "d": datum.d}, None


def _matrix_arg(args):
    obj = _load(args.matrix)
    if isinstance(obj, dict) and "A" in obj:
        obj = obj["A"]
    return matrix_from_json(obj)


def cmd_rigidity(args, cfg):
    from .rigidity import construct_witness, rigidity_upper_bound
    from .spectral import normal_order, rectangle_decomposition
    A = _matrix_arg(args)
    rep = rigidity_upper_bound(A, cfg)
    jt = rep.jordan
    ojt, classes = normal_order(jt, cfg)
    rd = rectangle_decomposition(ojt, classes)
    lines = ["Jordan type: " + ", ".join(f"{_fmt(l)}: {bs}" for l, bs in zip(ojt.eigenvalues, ojt.block_sizes)),
             f"c = {rep.c}, acyc = pop1 = {rep.acyc}, rigidity bound = {rep.upper_bound}",
             f"rectangles: {len(rd.c_rectangles)} c, {len(rd.e_rectangles)} e, {len(rd.j_rectangles)} j"]
    for J in rd.j_rectangles:
        lines.append(f"  j rows {J.row_block[0] + 1}-{J.row_block[1]} cols {J.col_block[0] + 1}-{J.col_block[1]}:"
                     f" banner {_fmt(J.banner)}, weight {J.weight}, latitude {J.latitude}")
    out = rep.to_json()
    out["rectangles"] = rd.to_json()
    if args.witness:
        W = construct_witness(A, cfg, args.seed)
        lines.append(f"verified witness of length {len(W)}")
        out["witness"] = [matrix_to_json(X) for X in W]
    return "\n".join(lines), out, None


def cmd_classify(args, cfg):
    from .constraints import ICONSTRAINED, MULTICONSTRAINED, classify, good_match
    A = _matrix_arg(args)
    cl = classify(A, cfg)
    out = {"class": cl.label(), "derogatory": cl.derogatory,
           "constraints": [{"type": c.ctype, "indices": [i + 1 for i in c.indices]} for c in cl.constraints],
           "eigenvalues": [_c(z) for z in cl.jt.eigen_list()]}
    line = cl.label()
    if args.with_B:
        B = matrix_from_json(_load(args.with_B))
        if cl.kind == MULTICONSTRAINED:
            out["good_match"] = None
            line += "; good match undefined for multiconstrained A"
        else:
            gm = good_match(A, B, cfg, cl)
            out["good_match"] = gm
            line += f"; good match: {'yes' if gm else 'no'}"
            if gm:
                line += " (the pair is rich)"
    elif cl.kind == ICONSTRAINED:
        ev = cl.jt.eigen_list()
        line += " at eigenvalues " + ", ".join(_fmt(ev[i]) for i in cl.constraints[0].indices)
    return line, out, None


def cmd_transitive(args, cfg):
    from .exact import exact_matrix_from_json
    from .linalg import is_exact_entries
    from .transitivity import is_transitive
    obj = _load(args.space)
    mats = obj.get("basis") if isinstance(obj, dict) else obj
    if not isinstance(mats, list):
        raise RegrichError("space JSON needs a 'basis' list of matrices")
    M = [matrix_from_json(m) for m in mats]
    shape = (int(obj["rows"]), int(obj["cols"])) if isinstance(obj, dict) and "rows" in obj else None
    sp = span_basis(M, cfg, shape)
    exact = None
    if args.exact:
        if not all(is_exact_entries(m) for m in mats):
            raise RegrichError("--exact needs rational entries [[num, den], [num, den]]")
        exact = [exact_matrix_from_json(m) for m in mats]
    v = is_transitive(sp, cfg, seed=args.seed, exact_basis=exact)
    word = {TRANSITIVE: "TRANSITIVE", NOT_TRANSITIVE: "NOT TRANSITIVE", INCONCLUSIVE: "INCONCLUSIVE"}[v.kind]
    line = f"{word} (certificate: {v.certificate}, dim {sp.dim}, margin {v.margin:.3g})"
    if v.witness is not None:
        vv, ww = v.witness
        line += f"\n  v = [{', '.join(_fmt(z) for z in vv)}]\n  w = [{', '.join(_fmt(z) for z in ww)}]"
    out = v.to_json()
    out["dim"] = sp.dim
    return line, out, v.kind


def cmd_scan(args, cfg):
    from .scanner import ParamSystem, scan
    system = ParamSystem.load(args.system)
    grid = _parse_ints(args.grid)
    grid = grid[0] if len(grid) == 1 and system.m == 1 else (list(grid) if len(grid) > 1 else [grid[0]] * system.m)
    rep = scan(system, grid, cfg, args.seed, threads=args.threads)
    lines = [f"{rep.grid_points} grid points, {len(rep.poor_candidates)} poor, "
             f"{len(rep.refined_roots)} refined root(s)"]
    for r in rep.refined_roots:
        lines.append(f"  u* = {r['u']}, corank {r['corank']}, direction {r['failing_direction']}")
    lines += [f"  note: {f}" for f in rep.flags + system.warnings]
    return "\n".join(lines), json.loads(rep.dumps()), None


def cmd_schubert(args, cfg):
    from .schubert import (RankTable, YoungDiagram, cup_nonzero, diagram_from_jumps,
                           min_area_partner)
    if args.op == "jumps":
        lam = diagram_from_jumps(RankTable(args.k, args.n, _parse_ints(args.jumps)))
        return "(" + ",".join(map(str, lam.rows)) + ")", lam.to_json(), None
    lam = YoungDiagram(args.k, args.n, _parse_ints(args.l))
    if args.op == "cup":
        mu = YoungDiagram(args.k, args.n, _parse_ints(args.m))
        nz = cup_nonzero(lam, mu)
        return ("NONZERO" if nz else "ZERO"), {"nonzero": nz}, None
    mu, area = min_area_partner(lam)
    if mu is None:
        return "NONE (no diagram overlaps the empty diagram)", {"partner": None, "area": None}, None
    return f"({','.join(map(str, mu.rows))}) area {area}", {"partner": list(mu.rows), "area": area}, None


COMMANDS = {"rich": cmd_rich, "rank": cmd_rank, "rigidity": cmd_rigidity, "classify": cmd_classify,
            "transitive": cmd_transitive, "scan": cmd_scan, "schubert": cmd_schubert}


def _globals(p, suppress):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--tol", type=float, default=d(None), help="relative rank tolerance")
    p.add_argument("--seed", type=int, default=d(0))
    p.add_argument("--exact", action="store_true", default=d(False), help="use rational arithmetic where possible")
    p.add_argument("--json-out", default=d(None), metavar="PATH", help="write the JSON report here")
    p.add_argument("--strict", action="store_true", default=d(False), help="exit 3 on inconclusive verdicts")


def build_parser():
    p = argparse.ArgumentParser(prog="regrich", description="Richness and rigidity of matrix data.")
    _globals(p, False)
    common = argparse.ArgumentParser(add_help=False)
    _globals(common, True)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("rich", parents=[common], help="decide richness of a datum")
    s.add_argument("--datum", required=True)
    s = sub.add_parser("rank", parents=[common], help="regularity rank at x0")
    s.add_argument("--datum", required=True)
    s.add_argument("--x0", required=True, help="JSON file or comma list")
    s.add_argument("--N", type=int, default=None)
    s = sub.add_parser("rigidity", parents=[common], help="Jordan data and rigidity bound")
    s.add_argument("--matrix", required=True)
    s.add_argument("--witness", action="store_true")
    s = sub.add_parser("classify", parents=[common], help="eigenvalue constraints of A")
    s.add_argument("--matrix", required=True)
    s.add_argument("--with-B", dest="with_B", default=None)
    s = sub.add_parser("transitive", parents=[common], help="transitivity of a matrix space")
    s.add_argument("--space", required=True)
    s = sub.add_parser("scan", parents=[common], help="scan a polynomial system")
    s.add_argument("--system", required=True)
    s.add_argument("--grid", default="101", help="points per axis, e.g. 101 or 21,21")
    s.add_argument("--threads", type=int, default=None)
    s = sub.add_parser("schubert", parents=[common], help="Young diagram utilities")
    s.add_argument("op", choices=["jumps", "cup", "minpartner"])
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--jumps", default="")
    s.add_argument("--l", default="")
    s.add_argument("--m", default="")
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        cfg = _cfg(args)
        line, payload, kind = COMMANDS[args.command](args, cfg)
    except (RegrichError, OSError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(line)
    if args.json_out:
        with open(args.json_out, "w") as fh:
            json.dump(payload, fh, sort_keys=True, indent=2)
            fh.write("\n")
    if args.strict and kind == INCONCLUSIVE:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
