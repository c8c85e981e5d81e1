"""Command-line front end: ``aol <verb> ...``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from .core import class_to_dict, dump_class, format_labelset, load_class, trace_from_json
from .dimensions import al_dimension, game_value, partial_littlestone
from .exceptions import AOLError, ParseError, UnrealizableHistory
from .game import DEFAULT_BUDGET, run_trace, tree_adversary_run, worst_case_search
from .lattice import (dump_lattice, gen_box, lattice_closure, lattice_length, pivot_dimension,
                      vc_dimension)
from .learners import LEARNERS, WAALearner, make_learner
from .reductions import apple_game_value, build_HN, to_apple_ambiguous
from .trees import (arity, classical_from_dict, depth, dump_tree, from_classical, gen_fin_deltas,
                    gen_many_labels, gen_small_al, load_tree, rank, reduce_arity, trim_frugal,
                    trim_uniform_rank, validate, compact, tree_from_dict)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc


def _json(path: str):
    text = _read(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    elif args.csv:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["key", "value"])
        for k, v in payload.items():
            if isinstance(v, dict):
                writer.writerows([f"{k}[{kk}]", vv] for kk, vv in v.items())
            elif not isinstance(v, list):
                writer.writerow([k, v])
        sys.stdout.write(out.getvalue())
    else:
        print("\n".join(lines))


# -- verbs ----------------------------------------------------------------------------------

def cmd_invariants(args) -> None:
    H = load_class(_read(args.class_file))
    lat = lattice_closure(H)
    report = {
        "instances": H.num_instances,
        "labels": H.num_labels,
        "hypotheses": len(H),
        "lattice_size": len(lat),
        "pivot_dimension": pivot_dimension(lat),
        "vc_dimension": vc_dimension(lat),
        "lattice_length": lattice_length(lat),
        "partial_littlestone": partial_littlestone(H),
        "al": {str(n): al_dimension(H, n) for n in args.al},
    }
    lines = [f"{k}: {v}" for k, v in report.items() if k != "al"]
    lines += [f"AL(H,{n}): {v}" for n, v in report["al"].items()]
    _emit(args, report, lines)


def _load_adversary(source: str):
    if source == "exhaustive":
        return "exhaustive", None
    doc = _json(source)
    if isinstance(doc, dict) and "parents" in doc:
        return "tree", tree_from_dict(doc)
    return "trace", trace_from_json(doc)


def cmd_simulate(args) -> None:
    H = load_class(_read(args.class_file))
    learner = make_learner(args.learner, H, horizon=args.horizon, mu=args.mu)
    kind, obj = _load_adversary(args.adversary)
    if kind == "exhaustive":
        if args.horizon is None:
            raise ParseError("--horizon is required with the exhaustive adversary")
        wc = worst_case_search(learner, H, args.horizon, args.budget_nodes)
        trace, worst = wc.trace, wc.mistakes
    elif kind == "tree":
        run = tree_adversary_run(obj, H, learner)
        trace, worst = run.trace, run.mistakes
    else:
        trace = obj
        if not H.alive_after(trace):
            raise UnrealizableHistory("the trace is incompatible with every hypothesis")
        worst = None
    records = run_trace(learner, H, trace)
    preds = learner.predict_trace(trace)
    if worst is None:
        worst = max((len(r) for r in records.values()), default=0)
    hyps = sorted(records)
    header = ["round", "instance", "prediction", "label"] + [f"h{h}" for h in hyps]
    waa = isinstance(learner, WAALearner)
    if waa:
        header.append("potential_ok")
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for k, ((x, y), alpha) in enumerate(zip(trace, preds)):
        row = [k, x, format_labelset(alpha), y]
        row += [len(records[h].restrict(k + 1)) for h in hyps]
        if waa:
            ok = learner.check_potential_step(trace[:k + 1])
            if not ok:
                raise AssertionError(f"potential step failed at round {k}")
            row.append(ok)
        writer.writerow(row)
    if args.learner == "aoa":
        bound = al_dimension(H, args.horizon)
    elif waa:
        bound = learner.mistake_bound(len(trace) if args.horizon is None else args.horizon)
    else:
        bound = ""
    writer.writerow(["summary", "worst_case", worst, "bound", bound])
    sys.stdout.write(out.getvalue())


def cmd_minimax(args) -> None:
    H = load_class(_read(args.class_file))
    v = game_value(H, args.horizon)
    _emit(args, {"horizon": args.horizon, "game_value": v}, [str(v)])


def _write(outdir: Path | None, name: str, text: str, bundle: dict) -> None:
    if outdir is None:
        bundle[name] = json.loads(text)
    else:
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / f"{name}.json").write_text(text + "\n")


def cmd_gen(args) -> None:
    outdir = Path(args.out) if args.out else None
    bundle: dict = {}
    p = args.params
    generators = {"fin-deltas": (gen_fin_deltas, 1), "small-al": (gen_small_al, 1),
                  "many-labels": (gen_many_labels, 2), "box": (gen_box, 2)}
    fn, arity_ = generators[args.name]
    if len(p) != arity_:
        raise ParseError(f"{args.name} takes {arity_} integer parameter(s)")
    if args.name == "box":
        _write(outdir, "lattice", dump_lattice(fn(*p)), bundle)
    else:
        H, T = fn(*p)
        _write(outdir, "class", dump_class(H), bundle)
        _write(outdir, "tree", dump_tree(T), bundle)
    if outdir is None:
        print(json.dumps(bundle, indent=2))


def cmd_apple_reduce(args) -> None:
    H = load_class(_read(args.class_file))
    Ham = to_apple_ambiguous(H)
    payload = {"class": class_to_dict(Ham)}
    lines = [dump_class(Ham)]
    if args.horizon is not None:
        payload["apple_minimax"] = apple_game_value(H, args.horizon)
        payload["ambiguous_minimax"] = game_value(Ham, args.horizon)
        lines.append(f"apple minimax: {payload['apple_minimax']}")
        lines.append(f"ambiguous minimax: {payload['ambiguous_minimax']}")
    _emit(args, payload, lines)


def cmd_build_hn(args) -> None:
    H = load_class(_read(args.class_file))
    lifted = build_HN(H, args.horizon, args.budget_nodes)
    payload = {
        "horizon": lifted.horizon,
        "words": [list(w) for w in lifted.words],
        "hypotheses": len(lifted.cls),
        "before_dedup": lifted.raw_count,
        "provenance": [[{"S": list(S), "f": list(f)} for S, f in p] for p in lifted.provenance],
        "class": class_to_dict(lifted.cls),
    }
    lines = [f"words: {len(lifted.words)}", f"hypotheses: {len(lifted.cls)}",
             f"before dedup: {lifted.raw_count}"]
    _emit(args, payload, lines)


def _tree_summary(T, H) -> dict:
    return {"rank": rank(T, H), "depth": depth(T), "arity": arity(T), "vertices": len(T)}


def cmd_tree(args) -> None:
    H = load_class(_read(args.class_file))
    if args.action == "from-classical":
        T = from_classical(classical_from_dict(_json(args.tree_file)), H)
        print(dump_tree(T))
        return
    T = load_tree(_read(args.tree_file))
    if args.action == "validate":
        bad = validate(T, H)
        payload = {"valid": not bad,
                   "violations": [{"rule": v.rule, "vertex": v.vertex, "detail": v.detail}
                                  for v in bad]}
        lines = ["valid"] if not bad else [f"{v.rule} at {v.vertex}: {v.detail}" for v in bad]
        _emit(args, payload, lines)
        if bad:
            raise SystemExit(1)
    elif args.action == "rank":
        s = _tree_summary(T, H)
        _emit(args, s, [f"{k}: {v}" for k, v in s.items()])
    elif args.action == "trim":
        fn = {"frugal": trim_frugal, "uniform": trim_uniform_rank, "arity": reduce_arity}[args.mode]
        print(dump_tree(fn(T, H)))
    elif args.action == "compact":
        if args.horizon is None:
            raise ParseError("--horizon is required for compact")
        print(dump_tree(compact(T, H, args.horizon)))


# -- parser -----------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--csv", action="store_true", help="CSV output where tabular")
    common.add_argument("--budget-nodes", type=int, default=DEFAULT_BUDGET)
    common.add_argument("--horizon", type=int, default=None)
    common.add_argument("--mu", type=Fraction, default=Fraction(2))

    p = argparse.ArgumentParser(prog="aol", description="Ambiguous online learning toolkit")
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("invariants", parents=[common], help="lattice and dimension invariants")
    s.add_argument("class_file")
    s.add_argument("--al", type=int, nargs="*", default=[], metavar="N",
                   help="horizons at which to report AL(H,N)")
    s.set_defaults(func=cmd_invariants)

    s = sub.add_parser("simulate", parents=[common], help="run a learner against an adversary")
    s.add_argument("class_file")
    s.add_argument("--learner", choices=sorted(LEARNERS), required=True)
    s.add_argument("--adversary", default="exhaustive",
                   help='"exhaustive", a tree JSON file, or a trace JSON file')
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("minimax", parents=[common], help="exact game value")
    s.add_argument("class_file")
    s.set_defaults(func=cmd_minimax)

    s = sub.add_parser("gen", parents=[common], help="write a generated example")
    s.add_argument("name", choices=["fin-deltas", "small-al", "box", "many-labels"])
    s.add_argument("params", type=int, nargs="*")
    s.add_argument("--out", help="directory for the JSON files (default: stdout)")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("apple-reduce", parents=[common], help="ambiguous image of an apple class")
    s.add_argument("class_file")
    s.set_defaults(func=cmd_apple_reduce)

    s = sub.add_parser("build-hn", parents=[common], help="finite class over instance words")
    s.add_argument("class_file")
    s.set_defaults(func=cmd_build_hn)

    s = sub.add_parser("tree", parents=[common], help="tree utilities")
    s.add_argument("action", choices=["validate", "rank", "trim", "compact", "from-classical"])
    s.add_argument("class_file")
    s.add_argument("tree_file")
    s.add_argument("--mode", choices=["frugal", "uniform", "arity"], default="frugal")
    s.set_defaults(func=cmd_tree)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.verb == "build-hn" and args.horizon is None:
        args.horizon = 3
    if args.verb == "minimax" and args.horizon is None:
        print("error: --horizon is required", file=sys.stderr)
        return 2
    try:
        args.func(args)
    except AOLError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
