"""Command-line front end.

Every subcommand prints a JSON report to stdout and exits 0, or prints a
machine-readable error object and exits non-zero.  Reports carry the tool
version and a sha256 hash of the canonical instance serialization so a
saved report can always be matched to its input.  Nothing in a report
depends on wall-clock time: the same argv (including --seed) reproduces
the same bytes.

Randomized subcommands refuse to run without an explicit --seed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import random
import sys

from . import __version__
from .canonical import (
    _identity_pairing,
    hinge_canonical_path,
    js_canonical_path,
    path_transitions,
    sample_pairing,
    switch_path,
)
from .chains import _EXACT_SPACE, ChainSpec, resolve_kind, run
from .graphcore import (
    BipartiteInstance,
    DegreeSequence,
    GraphInputError,
    Membership,
    PamInstance,
    classify_membership,
    instance_json,
    load_instance,
    read_graph,
    symmetric_difference,
    write_graph,
)
from .realize import realize_bipartite, realize_degree, realize_pam
from .stability import NotFound, PreconditionViolated, jdm_repair, stability_report
from .statespace import TooLarge, enumerate_states, mixing_time, spectral_gap, transition_matrix

_CHAIN_TOKENS = ("switch", "js", "hinge", "rswitch")

# Failures a subcommand is allowed to report; anything else is a bug and
# escapes as a traceback.
_REPORTABLE = (
    GraphInputError,
    PreconditionViolated,
    NotFound,
    TooLarge,
    ValueError,
    OSError,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # keep usage failures on the JSON channel
        raise _UsageError(message)


def _instance_hash(inst) -> str:
    return hashlib.sha256(instance_json(inst).encode("ascii")).hexdigest()

def _head(inst) -> dict:
    return {"tool_version": __version__, "instance_hash": _instance_hash(inst)}


def _emit(text: str, out: str | None) -> None:
    sys.stdout.write(text)
    if out is not None:
        with open(out, "w", encoding="ascii") as fh:
            fh.write(text)


def _emit_report(report: dict, out: str | None) -> int:
    _emit(json.dumps(report, indent=2) + "\n", out)
    return 0


def _realize(inst):
    if isinstance(inst, DegreeSequence):
        return realize_degree(inst.d)
    if isinstance(inst, BipartiteInstance):
        return realize_bipartite(inst)
    return realize_pam(inst)


def _edge_list(G) -> list[list[int]]:
    return [list(e) for e in G.edges()]


# -- subcommands ---------------------------------------------------------------


def _cmd_realize(args) -> int:
    inst = load_instance(args.instance)
    G = _realize(inst)
    if args.out is not None:
        write_graph(G, args.out)
    report = _head(inst) | {"n": G.n, "m": G.edge_count, "edges": _edge_list(G)}
    sys.stdout.write(json.dumps(report, indent=2) + "\n")
    return 0


def _cmd_sample(args) -> int:
    inst = load_instance(args.instance)
    kind = resolve_kind(args.chain, inst)
    chain = ChainSpec(kind, inst, seed=args.seed)
    trace: list[str] = []
    collect = None
    if args.trace is not None:
        def collect(t, G, rec):
            trace.append(json.dumps({
                "step": t,
                "accepted": rec.accepted,
                "removed": sorted(map(list, rec.removed)),
                "added": sorted(map(list, rec.added)),
            }))
    final = run(chain, _realize(inst), args.steps, collect)
    if args.trace is not None:
        with open(args.trace, "w", encoding="ascii") as fh:
            fh.writelines(line + "\n" for line in trace)
    if args.out is not None:
        write_graph(final, args.out)
    report = _head(inst) | {
        "chain": kind.value,
        "steps": args.steps,
        "seed": args.seed,
        "n": final.n,
        "m": final.edge_count,
        "edges": _edge_list(final),
    }
    sys.stdout.write(json.dumps(report, indent=2) + "\n")
    return 0


def _cmd_enumerate(args) -> int:
    inst = load_instance(args.instance)
    space = enumerate_states(inst, perturbed=args.perturbed)
    report = _head(inst) | {"count": len(space), "perturbed": args.perturbed}
    return _emit_report(report, args.out)


def _cmd_diagnose(args) -> int:
    """Exact spectral and mixing diagnostics over the enumerated space."""
    inst = load_instance(args.instance)
    kind = resolve_kind(args.chain, inst)
    space = enumerate_states(inst, perturbed=kind not in _EXACT_SPACE)
    P = transition_matrix(ChainSpec(kind, inst), space)
    lam, gap = spectral_gap(P)
    tau = mixing_time(P, args.eps)
    report = _head(inst) | {
        "chain": kind.value,
        "states": len(space),
        "eps": args.eps,
        "lambda1": lam,
        "spectral_gap": gap,
        "mixing_time": tau,
        "sinclair_bound": math.log(len(space) / args.eps) / gap,
    }
    return _emit_report(report, args.out)


def _cmd_stability(args) -> int:
    inst = load_instance(args.instance)
    rep = stability_report(inst, exact_k=args.exact_k)
    report = _head(inst) | {"delta": rep.delta, "Delta": rep.Delta, "m": rep.m}
    report.update(rep.verdicts)
    report["k_exact"] = rep.k_exact
    report["ratio"] = None if rep.ratio is None else str(rep.ratio)
    return _emit_report(report, args.out)


def _cmd_repair(args) -> int:
    inst = load_instance(args.instance)
    G = read_graph(args.graph)
    flips = jdm_repair(G, inst)
    report = _head(inst) | {
        "length": len(flips),
        "flips": [[list(rm), list(ad)] for rm, ad in flips],
    }
    return _emit_report(report, args.out)


def _cmd_path(args) -> int:
    """Move list between two exact realizations, one JSON object per line."""
    inst = load_instance(args.instance)
    A = read_graph(args.src)
    B = read_graph(args.dst)
    for flag, G in (("--from", A), ("--to", B)):
        tag, _ = classify_membership(G, inst)
        if tag is not Membership.EXACT:
            raise GraphInputError(f"{flag} graph is not an exact realization of the instance")
    if args.chain == "switch":
        moves = switch_path(A, B)
    else:
        diff = symmetric_difference(A, B)
        if args.pairing is None:
            pairing = _identity_pairing(diff)
        else:
            pairing = sample_pairing(diff, random.Random(args.pairing))
        if args.chain == "js":
            states = js_canonical_path(A, B, pairing)
        else:
            if not isinstance(inst, PamInstance):
                raise GraphInputError("hinge paths need a two-class instance")
            states = hinge_canonical_path(A, B, pairing, inst)
        moves = path_transitions(states)
    lines = [json.dumps(_head(inst) | {"chain": args.chain, "moves": len(moves)})]
    for i, t in enumerate(moves):
        lines.append(json.dumps({
            "index": i,
            "removed": sorted(map(list, t.removed)),
            "added": sorted(map(list, t.added)),
        }))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


# -- wiring --------------------------------------------------------------------


def _build_parser() -> _Parser:
    top = _Parser(prog="graphchains", description="Chains, realizations, and diagnostics for degree-constrained graph spaces.")
    sub = top.add_subparsers(dest="command", required=True)

    def cmd(name, fn, help):
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=fn)
        p.add_argument("--instance", required=True, help="instance JSON file")
        p.add_argument("--out", help="also write the command's output to this file")
        return p

    p = cmd("realize", _cmd_realize, "deterministically realize an instance")

    p = cmd("sample", _cmd_sample, "run a chain from the deterministic realization")
    p.add_argument("--chain", required=True, choices=_CHAIN_TOKENS)
    p.add_argument("--steps", required=True, type=int)
    # randomized: the seed is deliberately not defaulted
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--trace", help="write one JSON line per step to this file")

    p = cmd("enumerate", _cmd_enumerate, "count the exact or perturbed realization space")
    p.add_argument("--perturbed", action="store_true")

    p = cmd("diagnose", _cmd_diagnose, "exact spectral gap and mixing time")
    p.add_argument("--chain", required=True, choices=_CHAIN_TOKENS)
    p.add_argument("--eps", type=float, default=0.01)

    p = cmd("stability", _cmd_stability, "stability inequalities and distance parameters")
    p.add_argument("--exact-k", action="store_true", dest="exact_k")

    p = cmd("repair", _cmd_repair, "constructive hinge-flip repair of a perturbed two-class state")
    p.add_argument("--graph", required=True, help="graph file to repair")

    p = cmd("path", _cmd_path, "canonical move list between two realizations, as NDJSON")
    p.add_argument("--from", required=True, dest="src", help="start graph file")
    p.add_argument("--to", required=True, dest="dst", help="target graph file")
    p.add_argument("--chain", required=True, choices=("js", "hinge", "switch"))
    p.add_argument("--pairing", type=int, help="seed for a sampled pairing (default: identity pairing)")

    return top


def dispatch(argv=None) -> int:
    """Parse argv, run the subcommand, and return the process exit code."""
    try:
        args = _build_parser().parse_args(argv)
    except _UsageError as exc:
        sys.stdout.write(json.dumps({"error": "usage", "message": str(exc), "tool_version": __version__}) + "\n")
        return 2
    try:
        return args.func(args)
    except _REPORTABLE as exc:
        sys.stdout.write(json.dumps({"error": type(exc).__name__, "message": str(exc), "tool_version": __version__}) + "\n")
        return 1


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
