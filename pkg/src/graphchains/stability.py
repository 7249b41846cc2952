"""Stability diagnostics for degree families and two-class instances.

Three groups of tools.  Closed-form inequality checks decide membership in
the known rapidly-mixing families from the degree extremes alone; they use
exact integer arithmetic because the inequalities are tight at the boundary.
Exact distance parameters (`k_js`, `k_pam`) measure how far a perturbed
state can be from the exact space, by breadth-first search over the fully
enumerated state space.  Finally, `jdm_repair` is the constructive procedure
for joint-degree instances with regular classes: it walks any perturbed
state back to an exact realization with a short sequence of hinge flips,
never leaving the perturbed space.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable, Optional

from .canonical import InvariantViolation
from .chains import ChainKind, ChainSpec, neighbors
from .graphcore import (
    BipartiteInstance,
    DegreeSequence,
    GraphInputError,
    LabeledGraph,
    Membership,
    PamInstance,
    _as_instance,
    classify_membership,
    cut_internal_counts,
    edge,
)
from .realize import is_graphical_bipartite, is_graphical_degree
from .statespace import TooLarge, enumerate_states

Edge = tuple[int, int]
Flip = tuple[Edge, Edge]  # (removed, added)


class PreconditionViolated(Exception):
    """The input does not satisfy the repair procedure's contract."""


class NotFound(Exception):
    """No exact state lies within the requested search depth."""


# -- inequality checks -------------------------------------------------------


def _degree_extremes(d: tuple[int, ...]) -> tuple[int, int, int, int]:
    return len(d), sum(d), min(d), max(d)


def _checked_degrees(d) -> tuple[int, ...]:
    inst = _as_instance(d)
    if not isinstance(inst, DegreeSequence):
        raise GraphInputError("a plain degree sequence is required")
    if not is_graphical_degree(inst):
        raise GraphInputError("degree sequence is not graphical")
    return inst.d


def check_stable1(d) -> bool:
    """Mixed bound relating edge count to the degree extremes.

    With n vertices, 2m total degree, minimum degree lo and maximum degree
    hi, the verdict is

        (2m - n*lo)(n*hi - 2m) <= (hi - lo)[(2m - n*lo)(n - hi - 1) + (n*hi - 2m)*lo]

    evaluated exactly.  Regular sequences make the left side zero.
    """
    n, m2, lo, hi = _degree_extremes(_checked_degrees(d))
    lhs = (m2 - n * lo) * (n * hi - m2)
    rhs = (hi - lo) * ((m2 - n * lo) * (n - hi - 1) + (n * hi - m2) * lo)
    return lhs <= rhs


def check_stable2(d) -> bool:
    """Spread bound: (hi - lo + 1)^2 <= 4*lo*(n - hi - 1)."""
    n, _, lo, hi = _degree_extremes(_checked_degrees(d))
    return (hi - lo + 1) ** 2 <= 4 * lo * (n - hi - 1)


def _bipartite_extremes(inst: BipartiteInstance) -> tuple[int, int, int, int, int, int]:
    if not is_graphical_bipartite(inst):
        raise GraphInputError("bipartite sequence is not graphical")
    return (
        len(inst.r),
        len(inst.c),
        min(inst.r),
        max(inst.r),
        min(inst.c),
        max(inst.c),
    )


def check_bipartite_stable(inst: BipartiteInstance) -> bool:
    """Two-sided spread bound for bipartite degree lists.

    Both (hi_r - lo_c)^2 <= 4*lo_c*(n - hi_r) and its mirror with the sides
    swapped must hold, where m and n are the side sizes.
    """
    m, n, lo_r, hi_r, lo_c, hi_c = _bipartite_extremes(inst)
    return (hi_r - lo_c) ** 2 <= 4 * lo_c * (n - hi_r) and (
        hi_c - lo_r
    ) ** 2 <= 4 * lo_r * (m - hi_c)


def check_bipartite_emms(inst: BipartiteInstance) -> bool:
    """Product-form bipartite bound; strict inequality by definition."""
    m, n, lo_r, hi_r, lo_c, hi_c = _bipartite_extremes(inst)
    lhs = (hi_c - lo_c - 1) * (hi_r - lo_r - 1)
    return lhs < 1 + max(lo_c * (n - hi_r), lo_r * (m - hi_c))


# -- exact distance parameters -----------------------------------------------


def _distance_to_exact(inst, kind: ChainKind, max_states: int = 20000) -> list[int]:
    """BFS distance from every enumerated state to the nearest exact state.

    Edges are taken from the chain's one-step neighborhoods and traversed
    backwards, so the result is a forward walking distance even though the
    moves happen to be reversible.
    """
    space = enumerate_states(inst, perturbed=True, max_states=max_states)
    states = space.states
    index = {G.key(): i for i, G in enumerate(states)}
    exact = [
        i
        for i, G in enumerate(states)
        if classify_membership(G, inst)[0] is Membership.EXACT
    ]
    if not exact:
        raise GraphInputError("instance has no exact realization")
    chain = ChainSpec(kind, inst)
    pred: list[list[int]] = [[] for _ in states]
    for i, G in enumerate(states):
        for H, _ in neighbors(chain, G):
            j = index.get(H.key())
            if j is None:
                raise InvariantViolation("chain step leaves the enumerated space")
            pred[j].append(i)
    dist: list[Optional[int]] = [None] * len(states)
    queue = deque(exact)
    for i in exact:
        dist[i] = 0
    while queue:
        i = queue.popleft()
        for j in pred[i]:
            if dist[j] is None:
                dist[j] = dist[i] + 1
                queue.append(j)
    if any(v is None for v in dist):
        raise InvariantViolation("a perturbed state cannot reach the exact space")
    return dist  # type: ignore[return-value]


def k_js(inst, max_states: int = 20000) -> int:
    """Largest distance from a perturbed state to the exact space.

    Works on plain degree sequences and bipartite instances (using the
    matching insertion/deletion chain); zero exactly when no perturbed
    states exist.  Raises TooLarge when the space cannot be enumerated
    within `max_states` states.
    """
    inst = _as_instance(inst)
    if isinstance(inst, PamInstance):
        raise GraphInputError("two-class instances use k_pam")
    kind = (
        ChainKind.BIPARTITE_JS
        if isinstance(inst, BipartiteInstance)
        else ChainKind.JERRUM_SINCLAIR
    )
    return max(_distance_to_exact(inst, kind, max_states))


def k_pam(inst: PamInstance, max_states: int = 20000) -> int:
    """Largest hinge-flip distance from a perturbed state to the exact space."""
    if not isinstance(inst, PamInstance):
        raise GraphInputError("a two-class instance is required")
    return max(_distance_to_exact(inst, ChainKind.HINGE_FLIP, max_states))


def p_stability_ratio(inst, max_states: int = 20000) -> Fraction:
    """|perturbed space| / |exact space|, as an exact rational."""
    inst = _as_instance(inst)
    exact = enumerate_states(inst, perturbed=False, max_states=max_states)
    if not exact.states:
        raise GraphInputError("instance has no exact realization")
    full = enumerate_states(inst, perturbed=True, max_states=max_states)
    return Fraction(len(full.states), len(exact.states))


# -- bounded search repair ---------------------------------------------------


def bounded_repair(
    G: LabeledGraph, inst, depth: int, max_states: int = 20000
) -> list[LabeledGraph]:
    """Shortest move sequence from G to an exact state, up to `depth` moves.

    Returns the visited states after each move (empty when G is already
    exact).  The chain is picked from the instance type: insertion/deletion
    for degree sequences and bipartite lists, hinge flips for two-class
    instances.  Raises NotFound past the depth limit and TooLarge when the
    search frontier grows beyond `max_states` states.
    """
    inst = _as_instance(inst)
    if depth < 0:
        raise GraphInputError("depth must be non-negative")
    tag, _ = classify_membership(G, inst)
    if tag is Membership.OUTSIDE:
        raise GraphInputError("start state lies outside the perturbed space")
    if tag is Membership.EXACT:
        return []
    if isinstance(inst, PamInstance):
        kind = ChainKind.HINGE_FLIP
    elif isinstance(inst, BipartiteInstance):
        kind = ChainKind.BIPARTITE_JS
    else:
        kind = ChainKind.JERRUM_SINCLAIR
    chain = ChainSpec(kind, inst)
    start = G.copy()
    parent: dict[bytes, Optional[tuple[bytes, LabeledGraph]]] = {start.key(): None}
    frontier = [start]
    for _ in range(depth):
        nxt: list[LabeledGraph] = []
        for state in frontier:
            skey = state.key()
            for H, _ in neighbors(chain, state):
                hkey = H.key()
                if hkey in parent:
                    continue
                parent[hkey] = (skey, H)
                if len(parent) > max_states:
                    raise TooLarge(f"more than {max_states} states visited")
                if classify_membership(H, inst)[0] is Membership.EXACT:
                    path = []
                    entry: Optional[tuple[bytes, LabeledGraph]] = (skey, H)
                    # walk the parent links back to the start state, which
                    # carries no link and is deliberately left off the path
                    while entry is not None:
                        path.append(entry[1])
                        entry = parent[entry[0]]
                    path.reverse()
                    return path
                nxt.append(H)
        frontier = nxt
        if not frontier:
            break
    raise NotFound(f"no exact state within {depth} moves")


# -- constructive repair for regular-class instances ---------------------------


_REPAIR_CAP = 24  # loop guard only; the procedure is expected to stay within 6


def _lowest(items: Iterable[int], what: str) -> int:
    best = min(items, default=-1)
    if best < 0:
        raise InvariantViolation(f"no candidate {what}; repair step impossible")
    return best


def _do(H: LabeledGraph, inst: PamInstance, flip: Flip) -> Flip:
    rm, add = flip
    H.remove_edge(*rm)
    H.add_edge(*add)
    if classify_membership(H, inst)[0] is Membership.OUTSIDE:
        raise InvariantViolation(f"flip {flip} left the perturbed space")
    return flip


def _cancellation(H: LabeledGraph, inst: PamInstance, v: int, w: int) -> Flip:
    """Move one unit of surplus at w onto the deficit at v (same class).

    The pivot is w's lowest neighbor that is not adjacent to v; one exists
    because w's degree exceeds v's by at least two.
    """
    z = _lowest(
        (u for u in H.neighbors(w) if u != v and not H.has_edge(u, v)),
        "pivot for a cancellation",
    )
    return _do(H, inst, (edge(z, w), edge(z, v)))


def _class_vertices(inst: PamInstance, cls: int) -> range:
    return range(inst.n1) if cls == 0 else range(inst.n1, inst.n)


def _rebalance_extra_cut(
    H: LabeledGraph, inst: PamInstance, alpha: list[int]
) -> list[Flip]:
    """One step toward edge balance when the cut holds one extra edge.

    The class that lost an internal edge carries a net deficit of one; the
    other class carries a net surplus of one.  A single flip closes the gap
    whenever some surplus vertex touches an endpoint of an internal
    non-edge on the deficit side; otherwise we route the surplus along a
    short alternating path, spending at most one cancellation on the way.
    """
    c11p, _, _ = cut_internal_counts(H, inst)
    low = 0 if c11p == inst.c11 - 1 else 1
    low_side = _class_vertices(inst, low)
    high_side = _class_vertices(inst, 1 - low)
    surplus_high = [v for v in high_side if alpha[v] < 0]
    if not surplus_high:
        raise InvariantViolation("cut surplus without a degree surplus")
    non_edges = [
        (a, b)
        for a in low_side
        for b in low_side
        if a < b and not H.has_edge(a, b)
    ]
    if not non_edges:
        raise InvariantViolation("no internal room on the deficit side")

    for v2 in surplus_high:
        for a, b in non_edges:
            if H.has_edge(v2, a):
                return [_do(H, inst, (edge(a, v2), (a, b)))]
            if H.has_edge(v2, b):
                return [_do(H, inst, (edge(b, v2), (a, b)))]

    a, b = non_edges[0]
    if alpha[a] + alpha[b] >= 2:
        # both endpoints short: clear one deficit first (a surplus inside
        # the deficit side must exist, or the class total would not add up)
        v = a if alpha[a] > 0 else b
        w = _lowest(
            (u for u in low_side if alpha[u] < 0), "surplus on the deficit side"
        )
        return [_cancellation(H, inst, v, w)]
    if alpha[a] > 0:
        a, b = b, a  # keep the full-degree endpoint first

    in_low = set(low_side)
    with_neighbor = [
        v2 for v2 in surplus_high if any(u in in_low for u in H.neighbors(v2))
    ]
    if with_neighbor:
        v2 = with_neighbor[0]
        across = sorted(u for u in H.neighbors(v2) if u in in_low)
        calm = [u for u in across if alpha[u] >= 0]
        if not calm:
            # the only attachments carry surplus; cancel one against a
            # deficit vertex before routing through it
            v = _lowest(
                (u for u in low_side if alpha[u] > 0), "deficit vertex"
            )
            return [_cancellation(H, inst, v, across[0])]
        v1 = calm[0]
        p = _lowest(
            (u for u in H.neighbors(a) if u != v1 and not H.has_edge(u, v1)),
            "detour vertex",
        )
        return [
            _do(H, inst, (edge(v2, v1), edge(v1, p))),
            _do(H, inst, (edge(p, a), (a, b))),
        ]

    # no surplus vertex reaches the deficit side; hand the surplus to a
    # vertex that does (the cut is nonempty, and its endpoint on the
    # surplus side cannot itself carry surplus here)
    v2 = surplus_high[0]
    cut_edge = next(
        (
            e
            for e in H.edges()
            if (e[0] in in_low) != (e[1] in in_low)
        ),
        None,
    )
    if cut_edge is None:
        raise InvariantViolation("extra cut edge reported but no cut edge found")
    q = cut_edge[0] if cut_edge[0] not in in_low else cut_edge[1]
    u = _lowest(
        (w for w in H.neighbors(v2) if w != q and not H.has_edge(w, q)),
        "handoff vertex",
    )
    return [_do(H, inst, (edge(v2, u), edge(u, q)))]


def _shift_internal_excess(
    H: LabeledGraph, inst: PamInstance, alpha: list[int]
) -> list[Flip]:
    """One step toward edge balance when the cut is right but one class
    holds an extra internal edge (and the other is one short).

    Trades the extra internal edge for a cut edge, reducing to the
    extra-cut case.  The heavy class carries a net surplus of two and no
    deficits, so the arguments below always find a surplus to spend.
    """
    c11p, _, _ = cut_internal_counts(H, inst)
    heavy = 0 if c11p == inst.c11 + 1 else 1
    heavy_side = set(_class_vertices(inst, heavy))
    other_side = _class_vertices(inst, 1 - heavy)
    internal = [e for e in H.edges() if e[0] in heavy_side and e[1] in heavy_side]
    if not internal:
        raise InvariantViolation("internal excess without an internal edge")

    pick = None
    for x, y in internal:
        if alpha[x] < 0:
            pick = (x, y)
            break
        if alpha[y] < 0:
            pick = (y, x)
            break
    if pick is None:
        # no internal edge touches a surplus vertex; shift one unit of
        # surplus onto an internal edge's endpoint first
        a, b = internal[0]
        u = _lowest(
            (v for v in sorted(heavy_side) if alpha[v] < 0), "surplus vertex"
        )
        z = _lowest(
            (w for w in H.neighbors(u) if w != a and not H.has_edge(w, a)),
            "pivot for a surplus shift",
        )
        return [_do(H, inst, (edge(z, u), edge(z, a)))]

    a, b = pick  # a carries surplus
    v2 = next((v for v in other_side if not H.has_edge(b, v)), None)
    if v2 is not None:
        return [_do(H, inst, (edge(a, b), edge(b, v2)))]

    # b is saturated across; open the cut somewhere else
    pq = next(
        (
            (p, q)
            for p in sorted(heavy_side)
            for q in other_side
            if not H.has_edge(p, q)
        ),
        None,
    )
    if pq is None:
        raise InvariantViolation("no room in the cut despite the count bound")
    p, q = pq
    attached = sorted(u for u in H.neighbors(p) if u in heavy_side)
    if not attached:
        raise InvariantViolation("cross non-edge endpoint has no internal edge")
    spare = [u for u in attached if alpha[u] < 0]
    if spare:
        return [_do(H, inst, (edge(p, spare[0]), edge(p, q)))]
    r = attached[0]
    w = _lowest(
        (x for x in H.neighbors(a) if x != r and not H.has_edge(x, r)),
        "relay vertex",
    )
    return [
        _do(H, inst, (edge(a, w), edge(w, r))),
        _do(H, inst, (edge(r, p), edge(p, q))),
    ]


def _complement_instance(inst: PamInstance) -> PamInstance:
    n = inst.n
    return PamInstance(
        inst.n1,
        inst.n2,
        comb(inst.n1, 2) - inst.c11,
        inst.n1 * inst.n2 - inst.c12,
        comb(inst.n2, 2) - inst.c22,
        tuple(n - 1 - x for x in inst.d),
    )


def _complement_graph(H: LabeledGraph) -> LabeledGraph:
    return LabeledGraph(
        H.n,
        [
            (u, v)
            for u in range(H.n)
            for v in range(u + 1, H.n)
            if not H.has_edge(u, v)
        ],
    )


def jdm_repair(G: LabeledGraph, inst: PamInstance) -> list[Flip]:
    """Hinge-flip sequence taking a perturbed state to an exact one.

    Requires regular classes with degrees in [1, n-1].  Phase one restores
    the three edge counts (at most two flips per step, dispatching on which
    count is off; a deficient cut is handled on the complement, where it
    turns into the surplus case).  Phase two cancels the remaining degree
    deviations pairwise inside each class.  Ties always break toward the
    lowest vertex index.  Each emitted flip is a legal chain transition and
    every intermediate state stays inside the perturbed space.
    """
    if not isinstance(inst, PamInstance):
        raise PreconditionViolated("a two-class instance is required")
    if not inst.jdm_flag:
        raise PreconditionViolated("classes must have uniform degrees")
    b1, b2 = inst.d[0], inst.d[inst.n1]
    if not (1 <= b1 <= inst.n - 1 and 1 <= b2 <= inst.n - 1):
        raise PreconditionViolated("class degrees must lie in [1, n-1]")
    tag, _ = classify_membership(G, inst)
    if tag is Membership.OUTSIDE:
        raise PreconditionViolated("graph lies outside the perturbed space")

    H = G.copy()
    flips: list[Flip] = []
    while True:
        tag, pert = classify_membership(H, inst)
        if tag is Membership.EXACT:
            return flips
        if len(flips) >= _REPAIR_CAP:
            raise InvariantViolation("repair exceeded its move budget")
        alpha = list(pert.alpha)
        counts = cut_internal_counts(H, inst)
        if counts == (inst.c11, inst.c12, inst.c22):
            w = _lowest((v for v in range(inst.n) if alpha[v] < 0), "surplus vertex")
            cls = inst.class_of(w)
            v = _lowest(
                (u for u in _class_vertices(inst, cls) if alpha[u] > 0),
                "deficit partner",
            )
            flips.append(_cancellation(H, inst, v, w))
        elif counts[1] == inst.c12 + 1:
            flips.extend(_rebalance_extra_cut(H, inst, alpha))
        elif counts[1] == inst.c12 - 1:
            comp_inst = _complement_instance(inst)
            comp = _complement_graph(H)
            alpha_c = [-x for x in alpha]
            for rm, add in _rebalance_extra_cut(comp, comp_inst, alpha_c):
                flips.append(_do(H, inst, (add, rm)))
        else:
            flips.extend(_shift_internal_excess(H, inst, alpha))


# -- report ------------------------------------------------------------------


@dataclass(frozen=True)
class StabilityReport:
    """Inequality verdicts plus optional exact parameters for one instance.

    `k_exact` and `ratio` are filled only when the state space was small
    enough to enumerate.
    """

    delta: int
    Delta: int
    m: int
    verdicts: dict[str, bool] = field(default_factory=dict)
    k_exact: Optional[int] = None
    ratio: Optional[Fraction] = None


def stability_report(inst, exact_k: bool = False) -> StabilityReport:
    """Evaluate every applicable inequality; optionally add exact parameters.

    Degree sequences get the two single-class checks, bipartite lists the
    two two-sided checks, and two-class instances carry no closed-form
    check (their verdict comes from `k_pam` alone).  With exact_k set, the
    exact distance parameter and space-size ratio are computed when the
    space is enumerable and quietly omitted when it is not.
    """
    inst = _as_instance(inst)
    if isinstance(inst, BipartiteInstance):
        degrees = inst.r + inst.c
        m = sum(inst.r)
        verdicts = {
            "bipartite_stable": check_bipartite_stable(inst),
            "emms": check_bipartite_emms(inst),
        }
    elif isinstance(inst, PamInstance):
        degrees = inst.d
        m = inst.c11 + inst.c12 + inst.c22
        verdicts = {}
    else:
        degrees = _checked_degrees(inst)
        m = sum(degrees) // 2
        verdicts = {
            "stable1": check_stable1(inst),
            "stable2": check_stable2(inst),
        }
    k_exact = None
    ratio = None
    if exact_k:
        try:
            k_exact = k_pam(inst) if isinstance(inst, PamInstance) else k_js(inst)
            ratio = p_stability_ratio(inst)
        except TooLarge:
            k_exact = None
            ratio = None
    return StabilityReport(
        delta=min(degrees),
        Delta=max(degrees),
        m=m,
        verdicts=verdicts,
        k_exact=k_exact,
        ratio=ratio,
    )
