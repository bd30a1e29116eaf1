"""Command-line front end.

Exit status: 0 on success, 1 on a negative verdict or a failed check, 2 on
malformed input.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from typing import Any, Sequence

from . import gspace as gs
from .chamber import generate_quasi_building
from .coxgraph import ColourGraph, graph_invariants
from .errors import CoxflagError, InvalidLetter, ParseError
from .mtinvariants import ample_bounds, morley_rank
from .verify import SIZES, SUITES, run_verify_suite
from .words import (
    divide,
    equiv,
    format_word,
    normal_form,
    parse_word,
    rank,
    reduce_concat,
    sr,
    symmetric_decomposition,
    triangle_decompose,
    wobbling,
)

_SHORTHAND = re.compile(r"^([PKCD])(\d+)$")


class Negative(Exception):
    """Carries output for a negative verdict (exit status 1)."""

    def __init__(self, payload: Any, text: str) -> None:
        super().__init__(text)
        self.payload = payload
        self.text = text


def load_graph(source: str) -> ColourGraph:
    """A graph JSON file, or shorthand ``P<n>``, ``K<n>``, ``C<n>``, ``D<n>`` (path, complete, cycle, discrete)."""
    m = _SHORTHAND.match(source)
    if m and not os.path.exists(source):
        kind, n = m.group(1), int(m.group(2))
        return {"P": ColourGraph.path, "K": ColourGraph.complete, "C": ColourGraph.cycle, "D": ColourGraph.discrete}[kind](n)
    try:
        with open(source) as fh:
            return ColourGraph.from_json(fh.read())
    except OSError as exc:
        raise ParseError(f"cannot read graph {source!r}: {exc.strerror}") from None


def load_space(g: ColourGraph, path: str) -> gs.GammaSpace:
    try:
        with open(path) as fh:
            return gs.GammaSpace.from_json(g, fh.read())
    except OSError as exc:
        raise ParseError(f"cannot read space {path!r}: {exc.strerror}") from None


def parse_ids(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise ParseError(f"expected comma-separated vertex ids, got {text!r}") from None


def _internal(M: gs.GammaSpace, ids: Sequence[int]) -> list[int]:
    where = {v: i for i, v in enumerate(M.ids)}
    try:
        return [where[v] for v in ids]
    except KeyError as exc:
        raise ParseError(f"unknown vertex id {exc.args[0]}") from None


def _flag(M: gs.GammaSpace, text: str) -> gs.Flag:
    F = tuple(_internal(M, parse_ids(text)))
    if not M.is_flag(F):
        raise gs.NotAFlag(f"{text} is not a flag")
    return F


def _words(args: argparse.Namespace, g: ColourGraph, count: int) -> list:
    texts = list(args.w or []) + list(args.words or [])
    if len(texts) != count:
        raise ParseError(f"expected {count} word(s), got {len(texts)}")
    return [parse_word(g, t) for t in texts]


def _path_json(M: gs.GammaSpace, P: gs.FlagPath) -> dict:
    return {
        "word": format_word(M.graph, P.word),
        "flags": [[M.ids[v] for v in F] for F in P.flags],
    }


# ---------------------------------------------------------------------------
# subcommands; each returns (payload for --json, human text)


def cmd_nf(args, g):
    (u,) = _words(args, g, 1)
    out = format_word(g, normal_form(g, u))
    return out, out


def cmd_reduce(args, g):
    texts = list(args.w or []) + list(args.words or [])
    if not texts:
        raise ParseError("expected at least one word")
    whole = tuple(s for t in texts for s in parse_word(g, t))
    out = format_word(g, reduce_concat(g, whole))
    return out, out


def cmd_equiv(args, g):
    u, v = _words(args, g, 2)
    same = equiv(g, u, v)
    if not same:
        raise Negative(False, "false")
    return True, "true"


def cmd_decompose(args, g):
    u, v = _words(args, g, 2)
    d = symmetric_decomposition(g, u, v)
    parts = {"u1": d.u1, "u'": d.uPrime, "w": d.w, "v'": d.vPrime, "v1": d.v1}
    payload = {k: format_word(g, p) for k, p in parts.items()}
    return payload, "\n".join(f"{k} = {v}" for k, v in payload.items())


def cmd_divide(args, g):
    v, u = _words(args, g, 2)
    out = format_word(g, divide(g, v, u))
    return out, out


def cmd_sr(args, g):
    (u,) = _words(args, g, 1)
    out = format_word(g, sr(g, u))
    return out, out


def cmd_wob(args, g):
    u, v = _words(args, g, 2)
    mask = wobbling(g, u, v)
    return g.colour_names(mask), g.format_set(mask)


def cmd_rank(args, g):
    (u,) = _words(args, g, 1)
    out = str(rank(g, u, args.kind))
    return out, out


def cmd_triangle(args, g):
    u, v, w = _words(args, g, 3)
    d = triangle_decompose(g, u, v, w)
    payload = {k: format_word(g, getattr(d, k)) for k in ("u1", "v1", "c", "x", "alpha", "beta")}
    return payload, "\n".join(f"{k} = {v}" for k, v in payload.items())


def cmd_graph_invariants(args, g):
    inv = graph_invariants(g, args.budget)
    payload = {"r": inv.r, "n": inv.n, "K": inv.K, "components": [g.colour_names(c) for c in inv.components]}
    return payload, f"r = {inv.r}\nn = {inv.n}\nK = {inv.K}"


def cmd_ample(args, g):
    payload = ample_bounds(g).to_json()
    return payload, json.dumps(payload, separators=(",", ":"))


def cmd_morley(args, g):
    out = str(morley_rank(g))
    return out, out


def cmd_gen_building(args, g):
    X = generate_quasi_building(g, radius=args.radius, fanout=args.fanout, seed=args.seed)
    payload = X.to_json()
    return payload, json.dumps(payload, sort_keys=True)


def cmd_gen_space(args, g):
    if args.steps is None:
        M = gs.space_from_building(g, args.radius, args.fanout, seed=args.seed)
    else:
        M = gs.generate_space(g, args.steps, seed=args.seed)
    payload = M.to_json()
    return payload, json.dumps(payload, sort_keys=True)


def cmd_sc_check(args, g):
    M = load_space(g, args.s)
    res = gs.is_simply_connected(M, budget=args.budget, elementary=args.elementary)
    payload = {
        "simply_connected": res.simply_connected,
        "explored": res.explored,
        "certificate": _path_json(M, res.certificate) if res.certificate else None,
    }
    if args.elementary:
        payload["elementary"] = res.elementary
    if res.simply_connected:
        return payload, "simply connected"
    text = "not simply connected: " + payload["certificate"]["word"]
    raise Negative(payload, text)


def cmd_path(args, g):
    M = load_space(g, args.s)
    P = gs.find_reduced_path(M, _flag(M, args.source), _flag(M, args.target))
    payload = _path_json(M, P)
    return payload, payload["word"]


def cmd_basepoint(args, g):
    M = load_space(g, args.s)
    G, u = gs.base_point(M, _flag(M, args.flag), _internal(M, parse_ids(args.set)))
    payload = {"flag": [M.ids[v] for v in G], "word": format_word(g, u)}
    return payload, f"{','.join(map(str, payload['flag']))} {payload['word']}"


def cmd_nicehull(args, g):
    M = load_space(g, args.s)
    N = gs.nice_hull(M, _internal(M, parse_ids(args.set)))
    ids = sorted(M.ids[v] for v in N)
    return ids, ",".join(map(str, ids))


def cmd_cb(args, g):
    (u,) = _words(args, g, 1)
    if args.s and args.flag:
        M = load_space(g, args.s)
        ids = [M.ids[v] for v in gs.canonical_base(g, _flag(M, args.flag), u)]
        return ids, ",".join(map(str, ids))
    names = [g.colours[c] for c in gs.canonical_base(g, tuple(range(g.size)), u)]
    return names, "{" + ",".join(names) + "}"


def cmd_verify(args, g):
    rep = run_verify_suite(args.suite, args.seed, args.size)
    payload = rep.to_json()
    text = f"{rep.suite}: {rep.cases} cases, {len(rep.failures)} failures"
    for f in rep.failures[:20]:
        text += f"\n  case {f.case}: {f.message} {json.dumps(f.counterexample, sort_keys=True)}"
    if rep.failures:
        raise Negative(payload, text)
    return payload, text


COMMANDS = {
    "nf": (cmd_nf, "normal form of a word"),
    "reduce": (cmd_reduce, "non-splitting reduct of a concatenation"),
    "equiv": (cmd_equiv, "whether two words are equivalent"),
    "decompose": (cmd_decompose, "symmetric decomposition of a pair"),
    "divide": (cmd_divide, "quotient v/u"),
    "sr": (cmd_sr, "largest word right-absorbed by u"),
    "wob": (cmd_wob, "wobbling colours of u.v"),
    "rank": (cmd_rank, "foundation rank of a word"),
    "triangle": (cmd_triangle, "triangle decomposition of u, v and a reduct w"),
    "graph-invariants": (cmd_graph_invariants, "valency, path length and component size"),
    "ample": (cmd_ample, "ampleness bounds"),
    "morley": (cmd_morley, "Morley rank"),
    "gen-building": (cmd_gen_building, "generate a quasi-building truncation"),
    "gen-space": (cmd_gen_space, "generate a space"),
    "sc-check": (cmd_sc_check, "simple connectedness with certificate"),
    "path": (cmd_path, "reduced flag path between two flags"),
    "basepoint": (cmd_basepoint, "base-point of a flag over a nice set"),
    "nicehull": (cmd_nicehull, "nice hull of a vertex set"),
    "cb": (cmd_cb, "canonical base of a type"),
    "verify": (cmd_verify, "run a property suite"),
}

_NEEDS_GRAPH = set(COMMANDS) - {"verify"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-g", metavar="GRAPH", help="graph JSON file or P<n>/K<n>/C<n>/D<n>")
    common.add_argument("-w", metavar="WORD", action="append", help="word (repeatable)")
    common.add_argument("-s", metavar="SPACE", help="space JSON file")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--budget", type=int, default=None)

    parser = argparse.ArgumentParser(prog="coxflag", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("words", nargs="*", help=argparse.SUPPRESS)
        if name == "rank":
            p.add_argument("--kind", choices=["Rd", "Rkl"], default="Rd")
        if name in ("gen-building", "gen-space"):
            p.add_argument("--radius", type=int, default=2)
            p.add_argument("--fanout", type=int, default=2)
        if name == "gen-space":
            p.add_argument("--steps", type=int, default=None, help="random extension tower instead of a building")
        if name == "sc-check":
            p.add_argument("--elementary", type=int, default=0, metavar="N")
        if name == "path":
            p.add_argument("--from", dest="source", required=True, metavar="IDS")
            p.add_argument("--to", dest="target", required=True, metavar="IDS")
        if name in ("basepoint", "cb"):
            p.add_argument("--flag", metavar="IDS")
        if name in ("basepoint", "nicehull"):
            p.add_argument("--set", required=True, metavar="IDS")
        if name == "verify":
            p.add_argument("--suite", choices=[*SUITES, "all"], default="all")
            p.add_argument("--size", choices=list(SIZES), default="small")
    return parser


def _emit(args, payload: Any, text: str, stream) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True), file=stream)
    else:
        print(text, file=stream)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    fn = COMMANDS[args.command][0]
    try:
        g = None
        if args.command in _NEEDS_GRAPH:
            if not args.g:
                raise ParseError("missing -g GRAPH")
            g = load_graph(args.g)
        payload, text = fn(args, g)
    except Negative as neg:
        _emit(args, neg.payload, neg.text, sys.stdout)
        return 1
    except (ParseError, InvalidLetter, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CoxflagError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    _emit(args, payload, text, sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
