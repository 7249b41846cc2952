"""Transition kernels for the lazy graph chains.

Six chain kinds share four step functions: the switch and Jerrum-Sinclair
kernels dispatch on the instance type to their bipartite variants.  Step
functions mutate the graph in place and return it together with a
TransitionRecord describing the draws; ``run`` copies its start state once
and is deterministic given the chain seed.

Every kernel is lazy (self-loop probability at least one half) and
symmetric; accepted moves stay inside the chain's state space by
construction, except for the hinge flip and restricted switch whose
acceptance test is the membership classifier itself.

Conventions fixed here and relied on by the exact probability evaluator:

* Laziness is a fair coin drawn first; a degenerate proposal after a
  non-lazy coin is a rejected no-op.
* Switch: an unordered pair of distinct edge slots, drawn as index i
  uniform over m, then index j uniform over the remaining m-1; then one of
  the three perfect matchings on the four endpoints, ordered so that
  matching t pairs the smallest endpoint with the (t+1)-smallest.
* Jerrum-Sinclair: an ordered vertex pair, i then j (the diagonal is a
  no-op).  The compensating deletion of a Type 1 move removes {j,k} with k
  uniform over the sorted neighbors of j other than i.
* Bipartite Jerrum-Sinclair: i is drawn from the second block, j from the
  first, so additions and compensating deletions always touch the sides the
  way the bipartite space requires.
* Hinge flip: an ordered triple (i,j,k), each uniform over the vertices.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import comb
from typing import Callable, Mapping

from .graphcore import (
    BipartiteInstance,
    DegreeSequence,
    Instance,
    LabeledGraph,
    Membership,
    PamInstance,
    _as_instance,
    classify_membership,
    edge,
)

__all__ = [
    "ChainKind",
    "ChainSpec",
    "TransitionRecord",
    "switch_step",
    "js_step",
    "hinge_flip_step",
    "restricted_switch_step",
    "step",
    "resolve_kind",
    "transition_probability",
    "neighbors",
    "run",
]

Edge = tuple  # (u, v) with u < v


class ChainKind(Enum):
    SWITCH = "switch"
    JERRUM_SINCLAIR = "js"
    HINGE_FLIP = "hinge"
    RESTRICTED_SWITCH = "rswitch"
    BIPARTITE_JS = "bipartite-js"
    BIPARTITE_SWITCH = "bipartite-switch"


_EXPECTED_INSTANCE: dict[ChainKind, type] = {
    ChainKind.SWITCH: DegreeSequence,
    ChainKind.JERRUM_SINCLAIR: DegreeSequence,
    ChainKind.HINGE_FLIP: PamInstance,
    ChainKind.RESTRICTED_SWITCH: PamInstance,
    ChainKind.BIPARTITE_JS: BipartiteInstance,
    ChainKind.BIPARTITE_SWITCH: BipartiteInstance,
}

# Chains whose state space is the exact space rather than the perturbed one.
_EXACT_SPACE = {
    ChainKind.SWITCH,
    ChainKind.RESTRICTED_SWITCH,
    ChainKind.BIPARTITE_SWITCH,
}


def resolve_kind(token: str, inst: Instance) -> ChainKind:
    """Map a CLI chain token to a kind, honoring the instance type.

    "switch" and "js" select the bipartite variants when the instance is
    bipartite.
    """
    inst = _as_instance(inst)
    bip = isinstance(inst, BipartiteInstance)
    table = {
        "switch": ChainKind.BIPARTITE_SWITCH if bip else ChainKind.SWITCH,
        "js": ChainKind.BIPARTITE_JS if bip else ChainKind.JERRUM_SINCLAIR,
        "hinge": ChainKind.HINGE_FLIP,
        "rswitch": ChainKind.RESTRICTED_SWITCH,
    }
    if token not in table:
        raise ValueError(f"unknown chain token: {token!r}")
    kind = table[token]
    if not isinstance(inst, _EXPECTED_INSTANCE[kind]):
        raise ValueError(f"chain {token!r} is incompatible with {type(inst).__name__}")
    return kind


@dataclass(frozen=True)
class ChainSpec:
    """A chain kind bound to an instance and a seed."""

    kind: ChainKind
    instance: Instance
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "instance", _as_instance(self.instance))
        expected = _EXPECTED_INSTANCE[self.kind]
        if not isinstance(self.instance, expected):
            raise ValueError(
                f"{self.kind.value} requires {expected.__name__}, "
                f"got {type(self.instance).__name__}"
            )


@dataclass(frozen=True)
class TransitionRecord:
    """What a single step did.

    ``proposal`` holds the random choices that were drawn ("lazy" steps
    record only that).  Rejected proposals have accepted=False and empty
    edge tuples.  Accepted moves carry up to two removed and two added
    edges; the two counts differ for Jerrum-Sinclair Type 0 and Type 2
    moves, which touch a single edge.
    """

    removed: tuple[Edge, ...]
    added: tuple[Edge, ...]
    proposal: Mapping[str, object]
    accepted: bool


def _noop(proposal: Mapping[str, object]) -> TransitionRecord:
    return TransitionRecord((), (), proposal, False)


# -- switch ------------------------------------------------------------------


def _matching(points: list[int], t: int) -> tuple[Edge, Edge]:
    """Matching t on four sorted points: smallest pairs with points[t+1]."""
    partner = points[t + 1]
    rest = [x for x in points[1:] if x != partner]
    return (points[0], partner), (rest[0], rest[1])


def _switch_apply_ok(
    G: LabeledGraph, f1: Edge, f2: Edge, inst: Instance
) -> bool:
    if G.has_edge(*f1) or G.has_edge(*f2):
        return False
    if isinstance(inst, BipartiteInstance):
        if inst.side_of(f1[0]) == inst.side_of(f1[1]):
            return False
        if inst.side_of(f2[0]) == inst.side_of(f2[1]):
            return False
    return True


def switch_step(
    G: LabeledGraph, inst, rng: random.Random
) -> tuple[LabeledGraph, TransitionRecord]:
    """One lazy switch step on the exact space (bipartite-aware)."""
    inst = _as_instance(inst)
    if rng.randrange(2) == 0:
        return G, _noop({"lazy": True})
    m = G.edge_count
    if m < 2:
        return G, _noop({"move": "switch", "degenerate": "fewer than two edges"})
    i = rng.randrange(m)
    j = rng.randrange(m - 1)
    if j >= i:
        j += 1
    e1, e2 = G.edge_at(i), G.edge_at(j)
    t = rng.randrange(3)
    proposal = {"move": "switch", "edges": (e1, e2), "matching": t}
    points = sorted((*e1, *e2))
    if len(set(points)) != 4:
        return G, _noop(proposal)
    f1, f2 = _matching(points, t)
    if not _switch_apply_ok(G, f1, f2, inst):
        return G, _noop(proposal)
    G.remove_edge(*e1)
    G.remove_edge(*e2)
    G.add_edge(*f1)
    G.add_edge(*f2)
    return G, TransitionRecord((e1, e2), (f1, f2), proposal, True)


def restricted_switch_step(
    G: LabeledGraph, inst: PamInstance, rng: random.Random
) -> tuple[LabeledGraph, TransitionRecord]:
    """Switch step that additionally preserves the two-class edge counts."""
    if rng.randrange(2) == 0:
        return G, _noop({"lazy": True})
    m = G.edge_count
    if m < 2:
        return G, _noop({"move": "rswitch", "degenerate": "fewer than two edges"})
    i = rng.randrange(m)
    j = rng.randrange(m - 1)
    if j >= i:
        j += 1
    e1, e2 = G.edge_at(i), G.edge_at(j)
    t = rng.randrange(3)
    proposal = {"move": "rswitch", "edges": (e1, e2), "matching": t}
    points = sorted((*e1, *e2))
    if len(set(points)) != 4:
        return G, _noop(proposal)
    f1, f2 = _matching(points, t)
    if G.has_edge(*f1) or G.has_edge(*f2):
        return G, _noop(proposal)

    def cross(e: Edge) -> int:
        return int(inst.class_of(e[0]) != inst.class_of(e[1]))

    # Degrees are always preserved, so preserving the cut count pins all
    # three class-pair edge counts.
    if cross(e1) + cross(e2) != cross(f1) + cross(f2):
        return G, _noop(proposal)
    G.remove_edge(*e1)
    G.remove_edge(*e2)
    G.add_edge(*f1)
    G.add_edge(*f2)
    return G, TransitionRecord((e1, e2), (f1, f2), proposal, True)


# -- Jerrum-Sinclair ---------------------------------------------------------


def _targets_total(inst) -> int:
    if isinstance(inst, BipartiteInstance):
        return sum(inst.r) + sum(inst.c)
    return sum(inst.d)


def _target(inst, v: int) -> int:
    if isinstance(inst, BipartiteInstance):
        return inst.target_degree(v)
    return inst.d[v]


def js_step(
    G: LabeledGraph, inst, rng: random.Random
) -> tuple[LabeledGraph, TransitionRecord]:
    """One lazy Jerrum-Sinclair step on the perturbed space."""
    inst = _as_instance(inst)
    if rng.randrange(2) == 0:
        return G, _noop({"lazy": True})
    if isinstance(inst, BipartiteInstance):
        i = inst.m_side + rng.randrange(inst.n_side)
        j = rng.randrange(inst.m_side)
    else:
        i = rng.randrange(G.n)
        j = rng.randrange(G.n)
    proposal = {"move": "js", "i": i, "j": j}
    if i == j:
        return G, _noop(proposal)
    # Inside the space degrees never exceed their targets, so exactness is
    # a single edge-count comparison.
    exact = 2 * G.edge_count == _targets_total(inst)
    if exact:
        if G.has_edge(i, j):
            e = edge(i, j)
            G.remove_edge(i, j)
            proposal["move"] = "js-type0"
            return G, TransitionRecord((e,), (), proposal, True)
        return G, _noop(proposal)
    if G.degree(i) < _target(inst, i) and not G.has_edge(i, j):
        G.add_edge(i, j)
        if G.degree(j) > _target(inst, j):
            others = sorted(G.neighbors(j) - {i})
            k = others[rng.randrange(len(others))]
            G.remove_edge(j, k)
            proposal["move"] = "js-type1"
            proposal["k"] = k
            return G, TransitionRecord((edge(j, k),), (edge(i, j),), proposal, True)
        proposal["move"] = "js-type2"
        return G, TransitionRecord((), (edge(i, j),), proposal, True)
    return G, _noop(proposal)


# -- hinge flip ----------------------------------------------------------------


def hinge_flip_step(
    G: LabeledGraph, inst: PamInstance, rng: random.Random
) -> tuple[LabeledGraph, TransitionRecord]:
    """One lazy hinge-flip step on the perturbed two-class space."""
    if rng.randrange(2) == 0:
        return G, _noop({"lazy": True})
    n = G.n
    i = rng.randrange(n)
    j = rng.randrange(n)
    k = rng.randrange(n)
    proposal = {"move": "hinge", "i": i, "j": j, "k": k}
    if i == j or k == j or not G.has_edge(i, j) or G.has_edge(j, k):
        return G, _noop(proposal)
    G.remove_edge(i, j)
    G.add_edge(j, k)
    tag, _ = classify_membership(G, inst)
    if tag is Membership.OUTSIDE:
        G.remove_edge(j, k)
        G.add_edge(i, j)
        return G, _noop(proposal)
    return G, TransitionRecord((edge(i, j),), (edge(j, k),), proposal, True)


# -- dispatch ------------------------------------------------------------------

_STEP: dict[ChainKind, Callable] = {
    ChainKind.SWITCH: switch_step,
    ChainKind.BIPARTITE_SWITCH: switch_step,
    ChainKind.JERRUM_SINCLAIR: js_step,
    ChainKind.BIPARTITE_JS: js_step,
    ChainKind.HINGE_FLIP: hinge_flip_step,
    ChainKind.RESTRICTED_SWITCH: restricted_switch_step,
}


def step(
    chain: ChainSpec, G: LabeledGraph, rng: random.Random
) -> tuple[LabeledGraph, TransitionRecord]:
    """One step of the chain's kernel (mutates G)."""
    return _STEP[chain.kind](G, chain.instance, rng)


def run(
    chain: ChainSpec,
    G0: LabeledGraph,
    steps: int,
    collect: Callable[[int, LabeledGraph, TransitionRecord], None] | None = None,
) -> LabeledGraph:
    """Run `steps` transitions from G0; deterministic given chain.seed.

    G0 is copied, never mutated.  `collect`, if given, is called after each
    step with (step index, current graph, record); the graph passed is the
    live working copy, so collectors must not mutate it.
    """
    if steps < 0:
        raise ValueError("steps must be non-negative")
    tag, _ = classify_membership(G0, chain.instance)
    if tag is Membership.OUTSIDE or (
        chain.kind in _EXACT_SPACE and tag is not Membership.EXACT
    ):
        raise ValueError(f"start state is not in the {chain.kind.value} state space")
    rng = random.Random(chain.seed)
    G = G0.copy()
    fn = _STEP[chain.kind]
    inst = chain.instance
    for t in range(steps):
        _, record = fn(G, inst, rng)
        if collect is not None:
            collect(t, G, record)
    return G


# -- exact probabilities -------------------------------------------------------


def neighbors(chain: ChainSpec, G: LabeledGraph) -> list[tuple[LabeledGraph, Fraction]]:
    """All states reachable from G in one step, with exact probabilities.

    The self-loop is excluded; its probability is one minus the returned
    total (always at least one half).  Ordering is canonical (by state key).
    """
    kind = chain.kind
    inst = chain.instance
    acc: dict[bytes, list] = {}

    def put(H: LabeledGraph, p: Fraction) -> None:
        key = H.key()
        if key in acc:
            acc[key][1] += p
        else:
            acc[key] = [H, p]

    if kind in (ChainKind.SWITCH, ChainKind.BIPARTITE_SWITCH, ChainKind.RESTRICTED_SWITCH):
        m = G.edge_count
        if m >= 2:
            p = Fraction(1, 6 * comb(m, 2))
            restricted = kind is ChainKind.RESTRICTED_SWITCH

            def cross(e: Edge) -> int:
                return int(inst.class_of(e[0]) != inst.class_of(e[1]))

            for a in range(m):
                for b in range(a + 1, m):
                    e1, e2 = G.edge_at(a), G.edge_at(b)
                    points = sorted((*e1, *e2))
                    if len(set(points)) != 4:
                        continue
                    for t in range(3):
                        f1, f2 = _matching(points, t)
                        if restricted:
                            if G.has_edge(*f1) or G.has_edge(*f2):
                                continue
                            if cross(e1) + cross(e2) != cross(f1) + cross(f2):
                                continue
                        elif not _switch_apply_ok(G, f1, f2, inst):
                            continue
                        H = G.copy()
                        H.remove_edge(*e1)
                        H.remove_edge(*e2)
                        H.add_edge(*f1)
                        H.add_edge(*f2)
                        put(H, p)
    elif kind in (ChainKind.JERRUM_SINCLAIR, ChainKind.BIPARTITE_JS):
        if kind is ChainKind.BIPARTITE_JS:
            pairs = [
                (inst.m_side + u, v)
                for u in range(inst.n_side)
                for v in range(inst.m_side)
            ]
            p_pair = Fraction(1, 2 * inst.m_side * inst.n_side)
        else:
            n = G.n
            pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
            p_pair = Fraction(1, 2 * n * n)
        exact = 2 * G.edge_count == _targets_total(inst)
        for i, j in pairs:
            if exact:
                if G.has_edge(i, j):
                    H = G.copy()
                    H.remove_edge(i, j)
                    put(H, p_pair)
            elif G.degree(i) < _target(inst, i) and not G.has_edge(i, j):
                if G.degree(j) == _target(inst, j):
                    dj = G.degree(j)
                    for k in sorted(G.neighbors(j)):
                        H = G.copy()
                        H.add_edge(i, j)
                        H.remove_edge(j, k)
                        put(H, p_pair / dj)
                else:
                    H = G.copy()
                    H.add_edge(i, j)
                    put(H, p_pair)
    elif kind is ChainKind.HINGE_FLIP:
        n = G.n
        p = Fraction(1, 2 * n**3)
        for j in range(n):
            for i in sorted(G.neighbors(j)):
                for k in range(n):
                    if k == j or G.has_edge(j, k):
                        continue
                    G.remove_edge(i, j)
                    G.add_edge(j, k)
                    tag, _ = classify_membership(G, inst)
                    H = G.copy() if tag is not Membership.OUTSIDE else None
                    G.remove_edge(j, k)
                    G.add_edge(i, j)
                    if H is not None:
                        put(H, p)
    else:  # pragma: no cover
        raise AssertionError(kind)
    out = sorted(acc.values(), key=lambda pair: pair[0].key())
    return [(H, p) for H, p in out]


def transition_probability(
    chain: ChainSpec, G: LabeledGraph, H: LabeledGraph
) -> Fraction:
    """Exact one-step probability from G to H (0 when not adjacent).

    Both states must lie in the chain's state space; the diagonal entry is
    computed as the complement of the off-diagonal row mass.
    """
    if G.n != H.n:
        raise ValueError("states live on different vertex sets")
    if G == H:
        total = sum((p for _, p in neighbors(chain, G)), Fraction(0))
        return 1 - total
    inst = chain.instance
    removed = sorted(G.edge_set() - H.edge_set())
    added = sorted(H.edge_set() - G.edge_set())
    kind = chain.kind

    if kind in (ChainKind.SWITCH, ChainKind.BIPARTITE_SWITCH, ChainKind.RESTRICTED_SWITCH):
        if len(removed) != 2 or len(added) != 2:
            return Fraction(0)
        pts = {*removed[0], *removed[1]}
        if len(pts) != 4 or {*added[0], *added[1]} != pts:
            return Fraction(0)
        # The drawn pair and matching recovering H are unique.
        return Fraction(1, 6 * comb(G.edge_count, 2))

    if kind in (ChainKind.JERRUM_SINCLAIR, ChainKind.BIPARTITE_JS):
        bip = kind is ChainKind.BIPARTITE_JS
        if bip:
            p_pair = Fraction(1, 2 * inst.m_side * inst.n_side)
            orders = 1
        else:
            p_pair = Fraction(1, 2 * G.n * G.n)
            orders = 2
        exact = 2 * G.edge_count == _targets_total(inst)
        if len(removed) == 1 and not added:
            return orders * p_pair if exact else Fraction(0)
        if len(added) == 1 and not removed:
            u, v = added[0]
            if bip:
                # the drawn pair is (second-block, first-block)
                ok = G.degree(u) < _target(inst, u) and G.degree(v) < _target(inst, v)
                return p_pair if ok and not exact else Fraction(0)
            if (
                not exact
                and G.degree(u) < _target(inst, u)
                and G.degree(v) < _target(inst, v)
            ):
                return orders * p_pair
            return Fraction(0)
        if len(removed) == 1 and len(added) == 1:
            shared = set(removed[0]) & set(added[0])
            if len(shared) != 1:
                return Fraction(0)
            j = shared.pop()
            i = added[0][0] if added[0][1] == j else added[0][1]
            if exact or G.degree(i) >= _target(inst, i):
                return Fraction(0)
            if G.degree(j) != _target(inst, j):
                return Fraction(0)
            if bip and not (j < inst.m_side <= i):
                return Fraction(0)
            return p_pair / G.degree(j)
        return Fraction(0)

    if kind is ChainKind.HINGE_FLIP:
        if len(removed) != 1 or len(added) != 1:
            return Fraction(0)
        shared = set(removed[0]) & set(added[0])
        if len(shared) != 1:
            return Fraction(0)
        return Fraction(1, 2 * G.n**3)

    raise AssertionError(kind)  # pragma: no cover
