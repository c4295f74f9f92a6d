"""Command line front end: check, derive, gen, table1, qverify.

Exit codes: 0 yes/pass, 1 no/fail, 2 unknown (budget), 64 usage, 65 bad input file.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .derivation import DerivationSequence, find_derivation, immersion_to_derivation, verify_derivation
from .hypergraph import (Hypergraph, HypergraphError, ParseError, complete_uniform, find_isomorphism,
                         format_hypergraph, load_hypergraph)
from .immersion import NO, UNKNOWN, YES, ImmersionMap, SearchResult, find_immersion_bruteforce, verify_immersion
from .lattices import FAMILIES, LatticeSpec
from .quantum import QuantumError, simulate_derivation
from .table1 import SUPPORTED, check_knr, family_size

EXIT = {YES: 0, NO: 1, UNKNOWN: 2}
EX_USAGE, EX_DATAERR = 64, 65
AUTO_FAMILY_LIMIT = 100_000


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EX_USAGE)


def _load(path: str) -> Hypergraph:
    try:
        return load_hypergraph(path)
    except ParseError as exc:
        raise InputError(str(exc)) from None
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _as_complete(h: Hypergraph) -> tuple[int, int, dict] | None:
    """(n, r, vertex map from K_n^r names to h) when h is a supported K_n^r."""
    n = len(h.vertices)
    sizes = {len(m) for m in h.edges.values()}
    if len(sizes) != 1 or h.cross:
        return None
    r = sizes.pop()
    if (n, r) not in SUPPORTED:
        return None
    iso = find_isomorphism(complete_uniform(n, r), h)
    return None if iso is None else (n, r, iso)


def _rename_witness(h: Hypergraph, iso: dict, a: ImmersionMap) -> ImmersionMap:
    vm = {iso[k]: v for k, v in a.vertex_map.items()}
    em = {}
    k = complete_uniform(len(iso), len(next(iter(h.edges.values()))))
    for kid, img in a.edge_map.items():
        target = frozenset(iso[v] for v in k.edges[kid])
        hid = next(e for e, m in h.edges.items() if m == target and e not in em)
        em[hid] = img
    return ImmersionMap(vm, em)


def _document(res: SearchResult, witness) -> dict:
    return {"status": res.status, "witness": witness, "stats": res.stats, "version": __version__}


def _emit(args, doc: dict, human: str):
    if args.json:
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(human)


def _witness_doc(h: Hypergraph, g: Hypergraph, a: ImmersionMap) -> dict:
    doc = a.to_json()
    if verify_immersion(h, g, a, strict_singletons=True):
        doc["derivation"] = immersion_to_derivation(h, g, a).to_json()
    return doc


def _decide(h: Hypergraph, g: Hypergraph, method: str, budget, jobs: int, restricted: bool) -> tuple[SearchResult, str]:
    complete = None if restricted else _as_complete(h)
    if method == "table1" and complete is None:
        raise UsageError("--method table1 needs H to be a complete uniform hypergraph K_n^r with n <= 4")
    if method == "auto":
        method = "brute"
        if complete is not None:
            n, r, _ = complete
            proper = g.replace(edges={e: m for e, m in g.edges.items() if len(m) >= 2})
            mode = "2,3'" if r == 3 else "2"
            if (n, r) not in ((4, 2), (4, 3)) or family_size(proper, mode) <= AUTO_FAMILY_LIMIT:
                method = "table1"
    if method == "table1":
        n, r, iso = complete
        res = check_knr(g, n, r, budget=budget, jobs=jobs)
        if res.witness is not None:
            res.witness = _rename_witness(h, iso, res.witness)
    else:
        res = find_immersion_bruteforce(h, g, budget=budget, restricted=restricted)
    return res, method


def cmd_check(args) -> int:
    h, g = _load(args.h), _load(args.g)
    start = time.perf_counter()
    res, method = _decide(h, g, args.method, args.budget, args.jobs, args.restricted)
    res.stats.update({"nodes": res.nodes, "method": method, "seconds": round(time.perf_counter() - start, 3)})
    witness = _witness_doc(h, g, res.witness) if res.witness is not None else None
    if witness is not None and args.output:
        Path(args.output).write_text(json.dumps(witness, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    human = f"{res.status} ({method}, {res.nodes} nodes)"
    if witness is not None:
        human += "\n" + "\n".join(f"  {v} -> {w}" for v, w in witness["vertex_map"].items())
        human += "\n" + "\n".join(f"  {e}: {' '.join(img) or '(vertex only)'}" for e, img in witness["edge_map"].items())
    _emit(args, _document(res, witness), human)
    return EXIT[res.status]


def cmd_table1(args) -> int:
    if (args.n, args.r) not in SUPPORTED:
        raise UsageError(f"no row for K_{args.n}^{args.r}; supported: {sorted(SUPPORTED)}")
    g = _load(args.g)
    res = check_knr(g, args.n, args.r, budget=args.budget, jobs=args.jobs)
    res.stats["nodes"] = res.nodes
    witness = res.witness.to_json() if res.witness is not None else None
    if witness is not None and args.output:
        Path(args.output).write_text(json.dumps(witness, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    human = f"K_{args.n}^{args.r}: {res.status}"
    if witness is not None:
        human += "\n" + json.dumps(witness, sort_keys=True)
    _emit(args, _document(res, witness), human)
    return EXIT[res.status]


def _read_derivation(path: str, h: Hypergraph | None, g: Hypergraph) -> DerivationSequence:
    doc = _load_json(path)
    if isinstance(doc, dict) and isinstance(doc.get("witness"), dict):
        doc = doc["witness"]
    if not isinstance(doc, dict):
        raise InputError(f"{path}: expected a JSON object")
    if "derivation" in doc:
        doc = doc["derivation"]
    if "steps" in doc:
        try:
            return DerivationSequence.from_json(doc)
        except HypergraphError as exc:
            raise InputError(f"{path}: {exc}") from None
    if "vertex_map" in doc and h is not None:
        try:
            return immersion_to_derivation(h, g, ImmersionMap.from_json(doc))
        except (HypergraphError, KeyError) as exc:
            raise InputError(f"{path}: {exc}") from None
    raise InputError(f"{path}: no derivation found")


def cmd_derive(args) -> int:
    h, g = _load(args.h), _load(args.g)
    if args.replay:
        seq = _read_derivation(args.replay, h, g)
        ok = verify_derivation(h, g, seq)
        res = SearchResult(YES if ok else NO, seq if ok else None, 0, {"replayed_steps": len(seq.steps)})
    else:
        res = find_derivation(h, g, budget=args.budget)
        res.stats["nodes"] = res.nodes
    witness = res.witness.to_json() if res.witness is not None else None
    if witness is not None and args.output:
        Path(args.output).write_text(json.dumps(witness, indent=2) + "\n", encoding="utf-8")
    human = f"{'replay' if args.replay else 'derivation'}: {res.status}"
    if witness is not None:
        human += "\n" + "\n".join(f"  {' '.join(s)}" for s in witness["steps"])
    _emit(args, _document(res, witness), human)
    return EXIT[res.status]


def cmd_gen(args) -> int:
    try:
        g = LatticeSpec(args.family, args.size).build()
    except HypergraphError as exc:
        raise UsageError(str(exc)) from None
    text = format_hypergraph(g, comment=f"{args.family} {args.size}")
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_qverify(args) -> int:
    g = _load(args.g)
    seq = _read_derivation(args.seq, None, g)
    try:
        report = simulate_derivation(g, seq)
    except HypergraphError as exc:
        raise InputError(f"{args.seq}: {exc}") from None
    except QuantumError as exc:
        raise UsageError(str(exc)) from None
    status = YES if report.ok else NO
    doc = {
        "status": status,
        "witness": None,
        "stats": {
            "initial": report.initial_ok,
            "steps": [{"op": r.op, "args": list(r.args), "weights": r.weights, "factorizes": r.factorizes}
                      for r in report.steps],
            "final_qubits": report.n_qubits,
        },
        "version": __version__,
    }
    _emit(args, doc, report.table())
    return EXIT[status]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hyperimmerse", description="Immersion of hypergraph topologies.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def common(p, budget=True):
        p.add_argument("--json", action="store_true", help="print a JSON document")
        if budget:
            p.add_argument("--budget", type=int, default=None, help="node budget (default: env or 10^7)")

    p = sub.add_parser("check", help="decide whether H immerses in G")
    p.add_argument("h", metavar="H.hg")
    p.add_argument("g", metavar="G.hg")
    p.add_argument("--method", choices=["brute", "table1", "auto"], default="auto")
    p.add_argument("--restricted", action="store_true", help="keep normal vertices off cross vertices")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--output", help="write the witness JSON here")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("derive", help="find or replay a coalesce/dewet derivation")
    p.add_argument("h", metavar="H.hg")
    p.add_argument("g", metavar="G.hg")
    p.add_argument("--replay", metavar="SEQ.json")
    p.add_argument("-o", "--output")
    common(p)
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("gen", help="write a lattice patch")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("size", type=int, help="rings, cycle length or cuboid length")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("table1", help="decide K_n^r by its row condition")
    p.add_argument("g", metavar="G.hg")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--output")
    common(p)
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("qverify", help="simulate a derivation on GHZ states")
    p.add_argument("g", metavar="G.hg")
    p.add_argument("seq", metavar="SEQ.json")
    common(p, budget=False)
    p.set_defaults(func=cmd_qverify)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # --help, --version and usage errors
        return exc.code if isinstance(exc.code, int) else EX_USAGE
    if getattr(args, "jobs", 1) < 1:
        print("hyperimmerse: error: --jobs must be >= 1", file=sys.stderr)
        return EX_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"hyperimmerse: error: {exc}", file=sys.stderr)
        return EX_USAGE
    except InputError as exc:
        print(f"hyperimmerse: {exc}", file=sys.stderr)
        return EX_DATAERR
    except HypergraphError as exc:
        print(f"hyperimmerse: error: {exc}", file=sys.stderr)
        return EX_USAGE


if __name__ == "__main__":
    sys.exit(main())
