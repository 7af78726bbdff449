"""Command-line entry point ``rcf``.

Exit status: 0 on success, 1 when a check fails, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

import numpy as np

from . import io
from .amalgam import AmalgamError, TreeAmalgamationSpec, tree_amalgamation_pda
from .conjugacy import conjugacy_class_recognizer, twisted_class_recognizer
from .free import FreeAutomorphism, format_word, parse_word
from .fsa import Fsa
from .geometry import (
    LabelledGraph,
    TriangulationCertificate,
    certificate_to_dot,
    coset_fsa,
    graph_to_dot,
    m_triangulate_dp,
    stallings_graph,
)
from .grammar import Cfg, accepted_words
from .harness import ORACLES, MODES, enumerate_and_check, make_oracle
from .pda import Pda
from .vfgroup import ExtendedAutomorphism, build_cowp_pda, build_wp_pda, free_presentation, recognizer_multiply


class UsageError(Exception):
    pass


def _verdict(rec, word: Optional[str]) -> int:
    if word is not None:
        w = parse_word(word)
        ok = rec.accepts_word(w) if isinstance(rec, (Pda, Fsa)) else rec.accepts(w)
        print("accept" if ok else "reject")
    return 0


def _json_or_str(s: str):
    try:
        return json.loads(s)
    except json.JSONDecodeError:
        return s


def _emit(obj, out: Optional[str]) -> None:
    if out:
        io.dump(obj, out)
        print(f"wrote {out}", file=sys.stderr)


def cmd_wp(args) -> int:
    p = io.load_group(args.group)
    m = build_wp_pda(p) if args.cmd == "wp" else build_cowp_pda(p)
    _emit(m, args.out)
    return _verdict(m, args.word)


def cmd_conj(args) -> int:
    p = io.load_group(args.group)
    g = conjugacy_class_recognizer(p, p.nf(parse_word(args.element)), radius_bound=args.radius)
    _emit(g, args.out)
    return _verdict(g, args.word)


def cmd_twisted(args) -> int:
    data = json.loads(open(args.automorphism, encoding="utf-8").read())
    base = FreeAutomorphism.from_json(data)
    p = io.load_group(args.group) if args.group else free_presentation(base.rank, base.basis)
    ext = {t: parse_word(w) for t, w in data.get("extension", {}).items()}
    for t in p.transversal_letters:
        ext.setdefault(t, (t,))
    g = twisted_class_recognizer(p, ExtendedAutomorphism(base, ext), parse_word(args.element), args.kernel_only)
    _emit(g, args.out)
    return _verdict(g, args.word)


def cmd_coset(args) -> int:
    graph = io.load(args.graph)
    if not isinstance(graph, LabelledGraph):
        raise UsageError("--graph must hold a graph")
    accept = [_json_or_str(a) for a in args.accept]
    a = coset_fsa(graph, accept)
    _emit(a, args.out)
    return _verdict(a, args.word)


def cmd_quotient(args) -> int:
    rec = io.load(args.recognizer)
    if isinstance(rec, Pda):
        rec = rec.grammar
    if not isinstance(rec, Cfg):
        raise UsageError("--recognizer must hold a grammar or a machine")
    p = io.load_group(args.group)
    g = recognizer_multiply(rec, parse_word(args.by), args.side, p)
    _emit(g, args.out)
    return _verdict(g, args.word)


def cmd_triangulate(args) -> int:
    D = np.asarray(json.loads(open(args.distances, encoding="utf-8").read()), dtype=np.int64)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise UsageError("distance matrix must be square")
    cert = m_triangulate_dp(D, args.m)
    if cert is None:
        print(f"no {args.m}-triangulation")
        return 1
    _emit(cert, args.out)
    print(json.dumps(cert.to_json()))
    return 0


def cmd_amalgamate(args) -> int:
    spec = io.load(args.spec)
    if not isinstance(spec, TreeAmalgamationSpec):
        raise UsageError("--spec must hold an amalgamation spec")
    origin = json.loads(args.origin)
    target = json.loads(args.target) if args.target else origin
    pda = tree_amalgamation_pda(spec, origin, (tuple(args.target_address), target))
    _emit(pda, args.out)
    if args.list is not None:
        for w in sorted(accepted_words(pda.grammar, args.list, spec.alphabet()), key=lambda w: (len(w), w)):
            print(format_word(w) or "ε")
    return _verdict(pda, args.word)


def cmd_stallings(args) -> int:
    gens = [parse_word(g) for g in args.gens]
    s = stallings_graph(args.rank, gens)
    _emit(s.graph, args.out)
    print(f"vertices={len(s.graph.vertices)} complete={s.complete} index={s.index}")
    if args.word is not None:
        print("accept" if s.accepts(parse_word(args.word)) else "reject")
    return 0


def cmd_check(args) -> int:
    rec = io.load(args.recognizer)
    if not isinstance(rec, (Cfg, Pda)):
        raise UsageError("--recognizer must hold a grammar or a machine")
    params = {}
    if args.oracle in ("vf-nf", "conj-search"):
        if not args.group:
            raise UsageError(f"oracle {args.oracle} needs --group")
        params["group"] = io.load_group(args.group)
    if args.oracle == "conj-search":
        params["bound"] = args.bound
    if args.oracle == "graph-walk":
        params["graph"] = io.load(args.graph)
    for kv in args.param:
        k, _, v = kv.partition("=")
        params[k] = _json_or_str(v)
    oracle = make_oracle(args.oracle, **params)
    alphabet = rec.alphabet if isinstance(rec, Pda) else rec.terminals
    rep = enumerate_and_check(
        rec, oracle, args.max_len, args.mode, alphabet, args.recognizer, sample=args.sample, seed=args.seed
    )
    print(rep.summary())
    for w, r, o in rep.counterexamples:
        print(f"  {format_word(w) or 'ε'}: recognizer={r} oracle={o}")
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(rep.to_json(), fh, indent=2, ensure_ascii=False)
    return 0 if rep.ok else 1


def cmd_export_dot(args) -> int:
    obj = io.load(args.input)
    if isinstance(obj, LabelledGraph):
        text = graph_to_dot(obj)
    elif isinstance(obj, TriangulationCertificate):
        text = certificate_to_dot(obj, obj.core[-1] if obj.core else 0)
    elif isinstance(obj, Fsa):
        a = obj.remove_epsilon() if obj.has_epsilon() else obj
        text = graph_to_dot(LabelledGraph(a.states, a.alphabet, a.edges, a.start))
    else:
        raise UsageError("export-dot handles graphs, automata and certificates")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rcf", description="Context-free recognizers for virtually free groups.")
    ap.add_argument("--seed", type=int, default=0, help="seed for sampled batteries")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(sp, group=True):
        if group:
            sp.add_argument("--group", required=True, help="bundled name (F1, F2, Dinf, Z3Z2) or group JSON file")
        sp.add_argument("--word", help="word to test, letters separated by spaces")
        sp.add_argument("--out", "--emit", dest="out", help="write the recognizer as JSON")

    for name in ("wp", "cowp"):
        sp = sub.add_parser(name, help=f"{'co-' if name == 'cowp' else ''}word-problem machine")
        common(sp)
        sp.set_defaults(fn=cmd_wp)

    sp = sub.add_parser("conj", help="conjugacy class recognizer")
    common(sp)
    sp.add_argument("--element", required=True)
    sp.add_argument("--radius", type=int, default=20_000, help="search budget for minimal representatives")
    sp.set_defaults(fn=cmd_conj)

    sp = sub.add_parser("twisted", help="twisted conjugacy class recognizer")
    common(sp, group=False)
    sp.add_argument("--group", help="defaults to the free group on the automorphism's basis")
    sp.add_argument("--automorphism", "--phi", dest="automorphism", required=True, help="automorphism JSON, optional 'extension' map")
    sp.add_argument("--element", "--base", dest="element", required=True, help="kernel word")
    sp.add_argument("--kernel-only", action="store_true")
    sp.set_defaults(fn=cmd_twisted)

    sp = sub.add_parser("coset", help="automaton for a union of cosets of a finite Schreier graph")
    common(sp, group=False)
    sp.add_argument("--graph", required=True)
    sp.add_argument("--accept", nargs="*", default=[])
    sp.set_defaults(fn=cmd_coset)

    sp = sub.add_parser("quotient", help="multiply a recognizer by a word on one side")
    common(sp)
    sp.add_argument("--recognizer", required=True)
    sp.add_argument("--by", required=True)
    sp.add_argument("--side", choices=("left", "right"), default="right")
    sp.set_defaults(fn=cmd_quotient)

    sp = sub.add_parser("triangulate", help="m-triangulation of a circuit from its distance matrix")
    sp.add_argument("--distances", required=True, help="JSON square matrix of circuit distances")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_triangulate)

    sp = sub.add_parser("amalgamate", help="machine for paths in a tree amalgamation")
    common(sp, group=False)
    sp.add_argument("--spec", required=True)
    sp.add_argument("--origin", required=True, help="origin vertex as JSON")
    sp.add_argument("--target", help="target vertex as JSON (default: origin)")
    sp.add_argument("--target-address", nargs="*", default=[], help="tree address items k>l")
    sp.add_argument("--list", type=int, metavar="N", help="print accepted words up to length N")
    sp.set_defaults(fn=cmd_amalgamate)

    sp = sub.add_parser("stallings", help="fold subgroup generators into a core graph")
    sp.add_argument("--rank", type=int, required=True)
    sp.add_argument("--gens", nargs="+", required=True)
    sp.add_argument("--word")
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_stallings)

    sp = sub.add_parser("check", help="enumerate words and compare with an oracle")
    sp.add_argument("--recognizer", required=True)
    sp.add_argument("--oracle", required=True, choices=sorted(ORACLES))
    sp.add_argument("--max-len", type=int, default=6)
    sp.add_argument("--mode", choices=MODES, default="exact")
    sp.add_argument("--group")
    sp.add_argument("--graph")
    sp.add_argument("--bound", type=int, default=8, help="conjugator search bound")
    sp.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    sp.add_argument("--sample", type=int, help="words drawn per length instead of all")
    sp.add_argument("--report", help="write the report as JSON")
    sp.set_defaults(fn=cmd_check)

    sp = sub.add_parser("export-dot", help="DOT rendering of a graph, automaton or certificate")
    sp.add_argument("--input", required=True)
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_export_dot)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.fn(args)
    except (OSError, UsageError, ValueError, KeyError, AmalgamError) as e:
        print(f"rcf: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
