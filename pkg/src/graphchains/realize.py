"""Graphicality tests and initial realizations for every instance kind.

Every chain needs a starting state; these constructions provide one
deterministically.  The degree-sequence test is Erdos-Gallai, the bipartite
test Gale-Ryser, and realizations come from the matching greedy
constructions.  Two-class instances are realized by splitting each vertex's
degree into an internal and a cut portion and realizing the three parts
independently (their edge sets cannot collide), searching splits
exhaustively; any realization induces a valid split, so an exhausted search
is a proof of infeasibility.
"""

from __future__ import annotations

from typing import Iterator, Sequence

from .graphcore import (
    BipartiteInstance,
    DegreeSequence,
    LabeledGraph,
    Membership,
    PamInstance,
    classify_membership,
)

__all__ = [
    "NotGraphical",
    "NotRealizable",
    "is_graphical_degree",
    "is_graphical_bipartite",
    "realize_degree",
    "realize_bipartite",
    "realize_pam",
]


class NotGraphical(ValueError):
    """The requested degree data admits no simple graph."""


class NotRealizable(ValueError):
    """Two-class instance admits no realization; carries the failing stage."""

    def __init__(self, stage: str, message: str) -> None:
        super().__init__(f"{stage}: {message}")
        self.stage = stage


def _degrees(d) -> tuple[int, ...]:
    if isinstance(d, DegreeSequence):
        return d.d
    return tuple(d)


def is_graphical_degree(d) -> bool:
    """Erdos-Gallai test.  Accepts raw sequences (zeros allowed)."""
    seq = _degrees(d)
    if any(x < 0 for x in seq):
        return False
    n = len(seq)
    if any(x > n - 1 for x in seq):
        return False
    if sum(seq) % 2:
        return False
    s = sorted(seq, reverse=True)
    prefix = 0
    for k in range(1, n + 1):
        prefix += s[k - 1]
        tail = sum(min(x, k) for x in s[k:])
        if prefix > k * (k - 1) + tail:
            return False
    return True


def is_graphical_bipartite(inst: BipartiteInstance) -> bool:
    """Gale-Ryser test; a side-sum mismatch is caught first."""
    return _gale_ryser(inst.r, inst.c)


def _gale_ryser(r: Sequence[int], c: Sequence[int]) -> bool:
    if any(x < 0 for x in r) or any(x < 0 for x in c):
        return False
    if any(x > len(c) for x in r) or any(x > len(r) for x in c):
        return False
    if sum(r) != sum(c):
        return False
    rs = sorted(r, reverse=True)
    prefix = 0
    for k in range(1, len(rs) + 1):
        prefix += rs[k - 1]
        if prefix > sum(min(x, k) for x in c):
            return False
    return True


def realize_degree(d) -> LabeledGraph:
    """Havel-Hakimi construction; raises NotGraphical otherwise."""
    seq = _degrees(d)
    if not is_graphical_degree(seq):
        raise NotGraphical(f"not a graphical degree sequence: {seq}")
    n = len(seq)
    residual = list(seq)
    g = LabeledGraph(n)
    for _ in range(n):
        # highest residual first, lowest label on ties
        order = sorted(range(n), key=lambda v: (-residual[v], v))
        v = order[0]
        k = residual[v]
        if k == 0:
            break
        for u in order[1 : k + 1]:
            if residual[u] == 0:
                raise NotGraphical("construction ran out of capacity")
            g.add_edge(v, u)
            residual[u] -= 1
        residual[v] = 0
    return g


def _realize_bipartite_edges(r: Sequence[int], c: Sequence[int]) -> list[tuple[int, int]]:
    """Greedy Gale-Ryser construction; caller guarantees feasibility.

    Returns edges as (v_index, u_index) with sides indexed from 0.
    """
    m = len(r)
    res_r = list(r)
    res_c = list(c)
    edges = []
    for _ in range(m):
        order = sorted(range(m), key=lambda v: (-res_r[v], v))
        v = order[0]
        k = res_r[v]
        if k == 0:
            break
        targets = sorted(range(len(c)), key=lambda u: (-res_c[u], u))[:k]
        for u in targets:
            if res_c[u] == 0:
                raise NotGraphical("bipartite construction ran out of capacity")
            edges.append((v, u))
            res_c[u] -= 1
        res_r[v] = 0
    return edges


def realize_bipartite(inst: BipartiteInstance) -> LabeledGraph:
    """Realize (r, c) with side V on 0..m-1 and side U on m..m+n-1."""
    if not is_graphical_bipartite(inst):
        raise NotGraphical(f"not a graphical bipartite pair: {inst.r}, {inst.c}")
    m = inst.m_side
    g = LabeledGraph(inst.n)
    for v, u in _realize_bipartite_edges(inst.r, inst.c):
        g.add_edge(v, m + u)
    return g


# -- two-class realization ---------------------------------------------------


def _bounded_compositions(total: int, bounds: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """All ways to write total as a sum with 0 <= part_i <= bounds[i]."""
    n = len(bounds)
    suffix_max = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix_max[i] = suffix_max[i + 1] + bounds[i]

    def rec(i: int, rest: int, acc: list[int]) -> Iterator[tuple[int, ...]]:
        if i == n:
            if rest == 0:
                yield tuple(acc)
            return
        lo = max(0, rest - suffix_max[i + 1])
        hi = min(bounds[i], rest)
        for x in range(lo, hi + 1):
            acc.append(x)
            yield from rec(i + 1, rest - x, acc)
            acc.pop()

    yield from rec(0, total, [])


def realize_pam(inst: PamInstance) -> LabeledGraph:
    """Construct a member of the two-class space, or raise NotRealizable.

    The error's ``stage`` names the feasibility stage that failed:
    "parity" for capacity/counting impossibilities, "gale_ryser" when some
    degree split had graphical internal sides but no bipartite cut part, and
    "split_search_exhausted" when no split got that far.
    """
    n1, n2 = inst.n1, inst.n2
    d1, d2 = inst.d[:n1], inst.d[n1:]
    if inst.c11 > n1 * (n1 - 1) // 2 or inst.c22 > n2 * (n2 - 1) // 2:
        raise NotRealizable("parity", "internal edge count exceeds class capacity")
    if inst.c12 > n1 * n2:
        raise NotRealizable("parity", "cut edge count exceeds cut capacity")
    if any(d > (n1 - 1) + n2 for d in d1) or any(d > (n2 - 1) + n1 for d in d2):
        raise NotRealizable("parity", "degree exceeds vertex capacity")

    # Split search: cut-degree vectors x over class one and y over class two,
    # each summing to c12; internal residues must be graphical and (x, y)
    # must admit a bipartite realization.
    bounds1 = [min(d, n2) for d in d1]
    bounds2 = [min(d, n1) for d in d2]
    reached_bipartite_stage = False
    for x in _bounded_compositions(inst.c12, bounds1):
        internal1 = [d - xi for d, xi in zip(d1, x)]
        if any(v > n1 - 1 for v in internal1):
            continue
        if not is_graphical_degree(internal1):
            continue
        for y in _bounded_compositions(inst.c12, bounds2):
            internal2 = [d - yi for d, yi in zip(d2, y)]
            if any(v > n2 - 1 for v in internal2):
                continue
            if not is_graphical_degree(internal2):
                continue
            reached_bipartite_stage = True
            if not _gale_ryser(x, y):
                continue
            g = LabeledGraph(inst.n)
            for u, v in realize_degree(internal1).edges():
                g.add_edge(u, v)
            for u, v in realize_degree(internal2).edges():
                g.add_edge(n1 + u, n1 + v)
            for v, u in _realize_bipartite_edges(x, y):
                g.add_edge(v, n1 + u)
            tag, _ = classify_membership(g, inst)
            assert tag is Membership.EXACT
            return g
    if reached_bipartite_stage:
        raise NotRealizable("gale_ryser", "no degree split admits a bipartite cut part")
    raise NotRealizable("split_search_exhausted", "no degree split has graphical internal sides")
