"""Command-line front end.

Exit codes: 0 pass, 1 mathematical failure (with witness), 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import algebra as alg_mod
from .algebra import AlgebraFormatError, NaryAlgebra, check_anticommutative, check_filippov
from .derivations import (
    DEFAULT_DELTAS,
    chain_report,
    head_span,
    resolve_deltas,
    solve_centroid,
    solve_delta_der,
    solve_der,
    solve_gder,
    solve_nary_derivations,
    solve_qder,
    space_to_json,
    tuple_from_json,
    OperatorSpace,
)
from .exact import format_rational
from .lie import blockwise_delta, delta_pipeline
from .theorems import NotADerivation, DecompositionError, check_block_invariance, decompose

SPACES = ("der", "delta-der", "centroid", "qder", "gder", "nary-der")


class UsageError(Exception):
    pass


def parse_algebra_source(src: str) -> NaryAlgebra:
    """``simple:n``, ``semisimple:n:t`` or a path to an algebra JSON file."""
    parts = src.split(":")
    try:
        if parts[0] == "simple" and len(parts) == 2:
            return alg_mod.make_simple(int(parts[1]))
        if parts[0] == "semisimple" and len(parts) == 3:
            n, t = int(parts[1]), int(parts[2])
            if t < 1:
                raise UsageError("semisimple needs at least one summand")
            return alg_mod.make_semisimple(n, t)
    except ValueError as exc:
        raise UsageError(f"bad builtin algebra {src!r}: {exc}") from None
    if parts[0] in ("simple", "semisimple"):
        raise UsageError(f"bad builtin algebra {src!r}")
    path = Path(src)
    if not path.is_file():
        raise UsageError(f"no such algebra file: {src}")
    try:
        return alg_mod.load(path)
    except AlgebraFormatError as exc:
        raise UsageError(f"{src}: {type(exc).__name__}: {exc}") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"{src}: {exc}") from None


def _emit(args, payload: dict, tsv_rows: list[list[str]], summary: str | None = None):
    if args.format == "json":
        text = json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
    else:
        text = "".join("\t".join(str(c) for c in row) + "\n" for row in tsv_rows)
    if args.out:
        try:
            Path(args.out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc}") from None
        if summary:
            print(summary)
    else:
        sys.stdout.write(text)


def _rational_map(d: dict) -> dict:
    return {str(k): format_rational(v) for k, v in d.items()}


# -- commands ---------------------------------------------------------------


def cmd_verify(args) -> int:
    alg = parse_algebra_source(args.algebra)
    anti = check_anticommutative(alg)
    fil = check_filippov(alg)
    payload = {
        "algebra_hash": alg.fingerprint(),
        "anticommutative": anti.ok,
        "filippov": fil.ok,
        "witness": None,
    }
    if not anti.ok:
        payload["witness"] = {"identity": "anticommutativity", "args": list(anti.witness)}
    elif not fil.ok:
        xs, ys = fil.witness
        payload["witness"] = {
            "identity": "filippov",
            "x": list(xs),
            "y": list(ys),
            "lhs": _rational_map(fil.lhs),
            "rhs": _rational_map(fil.rhs),
        }
    rows = [["anticommutative", "pass" if anti.ok else "fail"], ["filippov", "pass" if fil.ok else "fail"]]
    if payload["witness"]:
        rows.append(["witness", json.dumps(payload["witness"])])
    _emit(args, payload, rows, "pass" if anti.ok and fil.ok else "fail")
    return 0 if anti.ok and fil.ok else 1


def cmd_solve(args) -> int:
    alg = parse_algebra_source(args.algebra)
    space: OperatorSpace
    if args.space == "der":
        space = solve_der(alg)
    elif args.space == "delta-der":
        if not args.delta:
            raise UsageError("--space delta-der requires --delta")
        if len(args.delta) > 1:
            raise UsageError("solve takes a single --delta")
        space = solve_delta_der(alg, resolve_deltas(args.delta, alg.arity)[0])
    elif args.space == "centroid":
        space = solve_centroid(alg)
    elif args.space == "qder":
        space = solve_qder(alg)
    elif args.space == "gder":
        space = solve_gder(alg)
    else:
        space = solve_nary_derivations(alg)
    payload = space_to_json(space)
    if args.space == "qder":
        payload["head_dimension"] = len(head_span(space, alg.dim))
    delta = payload["delta"] or ""
    _emit(args, payload, [["kind", "delta", "dimension"], [space.kind, delta, space.dimension]],
          f"{space.kind} dimension {space.dimension}")
    return 0


def cmd_chain(args) -> int:
    alg = parse_algebra_source(args.algebra)
    deltas = args.delta or list(DEFAULT_DELTAS)
    try:
        rep = chain_report(alg, deltas)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    chains = []
    for q, rels in rep.chains.items():
        chains.append({
            "delta": format_rational(q),
            "delta_der_dim": rep.delta_dims[q],
            "der_plus_delta_der_dim": rep.delta_entry_dims[q],
            "relations": [{"left": a, "right": b, "relation": r} for a, b, r in rels],
            "chain": rep.chain_string(q),
        })
    payload = {
        "algebra_hash": rep.algebra_hash,
        "arity": rep.arity,
        "dim": rep.dim,
        "dims": dict(rep.dims),
        "chains": chains,
    }
    rows = [["delta", "Der", "Der_delta", "Der+Der_delta", "QDer", "GDer", "End", "chain"]]
    for q in rep.chains:
        rows.append([format_rational(q), rep.dims["Der"], rep.delta_dims[q], rep.delta_entry_dims[q],
                     rep.dims["QDer"], rep.dims["GDer"], rep.dims["End"], rep.chain_string(q)])
    _emit(args, payload, rows, rep.chain_string())
    broken = any(r == "⊄" for rels in rep.chains.values() for _, _, r in rels)
    return 1 if broken else 0


def cmd_delta_report(args) -> int:
    alg = parse_algebra_source(args.algebra)
    if alg.blocks is not None and len(alg.blocks) > 1:
        rep = blockwise_delta(alg)
        payload = rep.to_json_obj()
        reports = rep.blocks + [rep.combined]
        ok = all(r.sl_compatible for r in reports)
    else:
        r = delta_pipeline(alg, label="simple")
        payload = r.to_json_obj()
        reports = [r]
        ok = r.sl_compatible
    payload = {"algebra_hash": alg.fingerprint(), **payload}
    rows = [["label", "gder_dim", "ann_dim", "quotient_dim", "killing_rank", "sl_compatible"]]
    rows += [[r.label, r.subalgebra_dim, r.annihilator_dim, r.quotient_dim, r.killing_rank,
              str(r.sl_compatible).lower()] for r in reports]
    _emit(args, payload, rows, f"quotient dim {reports[-1].quotient_dim}, "
          f"{'sl-compatible' if ok else 'not sl-compatible'}")
    return 0 if ok else 1


def cmd_decompose(args) -> int:
    alg = parse_algebra_source(args.algebra)
    try:
        obj = json.loads(Path(args.tuple).read_text(encoding="utf-8"))
        t = tuple_from_json(obj)
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        raise UsageError(f"cannot read tuple {args.tuple}: {exc}") from None
    if t.arity != alg.arity or t.head.rows != alg.dim:
        raise UsageError("tuple shape does not match the algebra")
    try:
        if alg.blocks is not None and len(alg.blocks) > 1:
            rep = check_block_invariance(alg, t)
            payload = {"algebra_hash": alg.fingerprint(), **rep.to_json_obj()}
            ok = rep.ok
            rows = [["block", "h", "residual"]] + [
                [i + 1, ",".join(b["h"]), b["residual"]] for i, b in enumerate(payload["blocks"])]
        else:
            dec = decompose(alg, t)
            payload = {"algebra_hash": alg.fingerprint(), **dec.to_json_obj()}
            ok = dec.residual_zero
            rows = [["h", "residual"], [",".join(payload["h"]), payload["residual"]]]
    except NotADerivation as exc:
        payload = {
            "error": "not a derivation",
            "witness": list(exc.witness),
            "lhs": [format_rational(x) for x in exc.lhs],
            "rhs": [format_rational(x) for x in exc.rhs],
        }
        _emit(args, payload, [["error", "witness"], ["not a derivation", ",".join(map(str, exc.witness))]],
              f"not a derivation at {exc.witness}")
        return 1
    except DecompositionError as exc:
        _emit(args, {"error": str(exc)}, [["error"], [str(exc)]], str(exc))
        return 1
    _emit(args, payload, rows, "decomposed" if ok else "decomposition failed")
    return 0 if ok else 1


def cmd_probe_conjecture(args) -> int:
    alg = parse_algebra_source(args.algebra)
    n, d = alg.arity, alg.dim
    gder = solve_gder(alg)
    full = gder.dimension == d * d
    if d <= n:
        shape = "dim<=n"
    elif d == n + 1 and check_filippov(alg).ok and alg.derived_dimension() == d:
        # an (n+1)-dimensional Filippov algebra with [A,...,A] = A is simple
        shape = "simple (n+1)-dim"
    else:
        shape = "other"
    payload = {
        "algebra_hash": alg.fingerprint(),
        "arity": n,
        "dim": d,
        "gder_dim": gder.dimension,
        "end_dim": d * d,
        "gder_equals_end": full,
        "shape": shape,
        "consistent_with_conjecture": (not full) or shape != "other",
    }
    rows = [[k, v if not isinstance(v, bool) else str(v).lower()] for k, v in payload.items()]
    _emit(args, payload, rows, f"GDer=End: {'yes' if full else 'no'}; shape: {shape}")
    return 0


# -- wiring -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="filippov", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--algebra", required=True, help="simple:n, semisimple:n:t, or an algebra JSON file")
        p.add_argument("--format", choices=("json", "tsv"), default="json")
        p.add_argument("--out", help="output path (default stdout)")
        return p

    common(sub.add_parser("verify", help="check anticommutativity and the Filippov identity")).set_defaults(
        func=cmd_verify)
    p = common(sub.add_parser("solve", help="compute a derivation-type operator space"))
    p.add_argument("--space", required=True, choices=SPACES)
    p.add_argument("--delta", action="append", help="δ as p/q (or 1/n) for delta-der")
    p.set_defaults(func=cmd_solve)
    p = common(sub.add_parser("chain", help="dimensions of Der ⊆ Der_δ ⊆ QDer ⊆ GDer ⊆ End"))
    p.add_argument("--delta", action="append", help="δ values to sweep (repeatable); default 1, 1/n, -1, 1/2, 2")
    p.set_defaults(func=cmd_chain)
    common(sub.add_parser("delta-report", help="GDer / Ann(GDer) with Killing-form verdicts")).set_defaults(
        func=cmd_delta_report)
    p = common(sub.add_parser("decompose", help="normal form of an (n+1)-ary derivation tuple"))
    p.add_argument("--tuple", required=True, help="JSON list of n+1 matrices of rational strings")
    p.set_defaults(func=cmd_decompose)
    common(sub.add_parser("probe-conjecture", help="does GDer(A) = End(A), and what shape is A")).set_defaults(
        func=cmd_probe_conjecture)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
