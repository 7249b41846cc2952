"""Canonical paths between realizations, their encodings, and distance
certificates.

Everything here is driven by one object: a pairing of the red and blue
edges of a symmetric difference.  The pairing decomposes the difference
into alternating circuits; circuits are scheduled into chain moves (delete,
repair, add for the edge-count-changing chain; hinge flips ordered by a
landscape traversal for the two-class chain); each transition of a schedule
gets a complementary encoding from which the endpoint pair can be rebuilt.
The constructions are exact and deterministic: given the same endpoints and
pairing they always emit the same path, which is what makes the encodings
invertible and the bound checks replayable.

Vertex walks are stored closed (first vertex repeated at the end), so a
circuit with 2k edges has a walk of 2k+1 vertices.  Edge positions are
0-based: the edge at position i joins walk[i] and walk[i+1], and positions
of even index carry the first graph's color.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .chains import ChainKind, ChainSpec, neighbors
from .graphcore import (
    ColoredDifference,
    Edge,
    GraphInputError,
    LabeledGraph,
    Membership,
    PamInstance,
    classify_membership,
    edge,
    symmetric_difference,
)
from .statespace import TooLarge

__all__ = [
    "Unbalanced",
    "TransitionNotOnPath",
    "NotAnEncoding",
    "InvariantViolation",
    "Disconnected",
    "Pairing",
    "Circuit",
    "Transition",
    "Section",
    "Segment",
    "Piece",
    "Landscape",
    "DistanceCertificate",
    "enumerate_pairings",
    "sample_pairing",
    "circuit_decomposition",
    "path_transitions",
    "js_canonical_path",
    "js_encoding",
    "js_recover",
    "section_segment_decomposition",
    "landscape",
    "traverse",
    "hinge_canonical_path",
    "pam_encoding",
    "pam_recover_count",
    "switch_path",
    "restricted_switch_distance_check",
]


class Unbalanced(Exception):
    """Red and blue degrees disagree at some vertex; no pairing exists."""


class TransitionNotOnPath(Exception):
    """The queried transition does not occur on the canonical path."""


class NotAnEncoding(Exception):
    """The given value does not decode to any endpoint pair."""


class InvariantViolation(Exception):
    """A structural invariant of the construction failed."""


class Disconnected(Exception):
    """No chain path joins the two states."""


# -- pairings ----------------------------------------------------------------


@dataclass(frozen=True)
class Pairing:
    """Per-vertex matching between the two edge colors of a difference.

    Each entry (v, e, f) matches edge e with edge f at their shared vertex
    v.  The slots are nominally (red, blue) but lookups are colorless:
    partner(v, e) answers no matter which slot e occupies.  Recovery relies
    on this, because there the colors are exactly what is unknown.
    """

    n: int
    entries: tuple[tuple[int, Edge, Edge], ...]
    _lut: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        lut: dict[tuple[int, Edge], Edge] = {}
        for v, a, b in self.entries:
            if v not in a or v not in b or a == b:
                raise GraphInputError(f"bad pairing entry {(v, a, b)}")
            if (v, a) in lut or (v, b) in lut:
                raise GraphInputError(f"edge paired twice at vertex {v}")
            lut[(v, a)] = b
            lut[(v, b)] = a
        object.__setattr__(self, "_lut", lut)

    def partner(self, v: int, e: Edge) -> Edge:
        try:
            return self._lut[(v, e)]
        except KeyError:
            raise GraphInputError(f"edge {e} not paired at vertex {v}") from None

    def edges(self) -> frozenset:
        return frozenset(e for _, a, b in self.entries for e in (a, b))

    def edges_at(self, v: int) -> list[Edge]:
        out = []
        for w, a, b in self.entries:
            if w == v:
                out.extend((a, b))
        return sorted(out)


def _vertex_slots(diff: ColoredDifference) -> list[tuple[int, list[Edge], list[Edge]]]:
    slots = []
    for v in range(diff.n):
        reds, blues = diff.red_at(v), diff.blue_at(v)
        if len(reds) != len(blues):
            raise Unbalanced(
                f"vertex {v} has {len(reds)} red but {len(blues)} blue edges"
            )
        if reds:
            slots.append((v, reds, blues))
    return slots


def enumerate_pairings(diff: ColoredDifference) -> Iterator[Pairing]:
    """All pairings of a balanced difference, lexicographic per vertex.

    The number yielded is the product over vertices of theta_v! where
    theta_v is the red degree at v.
    """
    slots = _vertex_slots(diff)
    pools = [list(itertools.permutations(blues)) for _, _, blues in slots]
    for choice in itertools.product(*pools):
        entries: list[tuple[int, Edge, Edge]] = []
        for (v, reds, _), perm in zip(slots, choice):
            entries.extend((v, r, b) for r, b in zip(reds, perm))
        yield Pairing(diff.n, tuple(entries))


def sample_pairing(diff: ColoredDifference, rng: random.Random) -> Pairing:
    """One uniform pairing: an independent uniform matching at each vertex."""
    entries: list[tuple[int, Edge, Edge]] = []
    for v, reds, blues in _vertex_slots(diff):
        perm = rng.sample(blues, len(blues))
        entries.extend((v, r, b) for r, b in zip(reds, perm))
    return Pairing(diff.n, tuple(entries))


# -- circuits ----------------------------------------------------------------


@dataclass(frozen=True)
class Circuit:
    """Closed alternating walk; walk[0] == walk[-1], even edge count."""

    walk: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.walk) - 1

    def edge_at(self, i: int) -> Edge:
        return edge(self.walk[i], self.walk[i + 1])

    def edges(self) -> list[Edge]:
        return [self.edge_at(i) for i in range(self.length)]

    def edge_set(self) -> frozenset:
        return frozenset(self.edges())

    def min_edge(self) -> Edge:
        return min(self.edges())


def _trace(pairing: Pairing, v0: int, e0: Edge) -> tuple[int, ...]:
    """Follow the pairing from the dart (leave v0 along e0) until it closes."""
    walk = [v0]
    v, e = v0, e0
    while True:
        u = e[0] + e[1] - v
        walk.append(u)
        e = pairing.partner(u, e)
        v = u
        if v == v0 and e == e0:
            return tuple(walk)


def _walk_edges(walk: Sequence[int]) -> set[Edge]:
    return {edge(walk[i], walk[i + 1]) for i in range(len(walk) - 1)}


def _legal_start(walk: Sequence[int]) -> bool:
    """A walk can be scheduled iff its start vertex reappears only at odd
    positions.  The deletion schedule keeps the start vertex one edge short
    until the closing addition; a revisit at an even position would ask the
    repair move to pivot on that deficient vertex, which the chain forbids
    (odd revisits instead produce the legal deficit-two intermediate)."""
    v = walk[0]
    return all(walk[p] != v or p % 2 for p in range(1, len(walk) - 1))


def _canonical_walk(
    edges_of: frozenset, pairing: Pairing, blue: frozenset
) -> tuple[int, ...]:
    """The scheduled walk of one orbit: starts along a blue edge at its
    smaller endpoint, preferring the lexicographically smallest blue edge,
    falling back to the first rotation/direction with a legal start."""
    candidates = []
    for e in sorted(e for e in edges_of if e in blue):
        candidates.append((e[0], e))
        candidates.append((e[1], e))
    for v, e in candidates:
        walk = _trace(pairing, v, e)
        if _legal_start(walk):
            return walk
    raise InvariantViolation("orbit admits no schedulable start vertex")


def _colorless_orbits(edges_in: frozenset, pairing: Pairing) -> list[Circuit]:
    """Orbit decomposition of an uncolored edge set, in discovery order.

    Discovery order: repeatedly trace from the smallest unused edge.  Raises
    NotAnEncoding when the pairing does not cover the edge set exactly.
    """
    if pairing.edges() != edges_in:
        raise NotAnEncoding("pairing does not cover the edge set")
    incident: dict[int, list[Edge]] = {}
    for e in edges_in:
        for v in e:
            incident.setdefault(v, []).append(e)
    for v, es in incident.items():
        if sorted(es) != pairing.edges_at(v):
            raise NotAnEncoding(f"pairing mismatches incidence at vertex {v}")
    remaining = set(edges_in)
    out: list[Circuit] = []
    while remaining:
        seed = min(remaining)
        walk = _trace(pairing, seed[0], seed)
        orbit = _walk_edges(walk)
        if not orbit <= remaining or 2 * len(orbit) != len(walk) * 2 - 2:
            raise NotAnEncoding("pairing orbit reuses an edge")
        out.append(Circuit(walk))
        remaining -= orbit
    return out


def circuit_decomposition(diff: ColoredDifference, pairing: Pairing) -> list[Circuit]:
    """Canonical circuits of a colored difference under a pairing.

    Circuits come in lexicographic order of their smallest edge (their
    discovery order); each walk starts at the smaller endpoint of its
    smallest blue edge, so the walk's even edge positions are blue.
    """
    all_edges = frozenset(diff.blue | diff.red)
    for v, a, b in pairing.entries:
        same = (a in diff.blue) == (b in diff.blue)
        if same:
            raise GraphInputError(f"entry at vertex {v} pairs two same-color edges")
    try:
        orbits = _colorless_orbits(all_edges, pairing)
    except NotAnEncoding as exc:
        raise GraphInputError(str(exc)) from None
    circuits = []
    for orbit in orbits:
        blues = frozenset(e for e in orbit.edges() if e in diff.blue)
        circuits.append(Circuit(_canonical_walk(orbit.edge_set(), pairing, blues)))
    return circuits


# -- transitions -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Transition:
    """One chain move between two explicit states."""

    before: LabeledGraph
    after: LabeledGraph

    @property
    def removed(self) -> frozenset:
        return frozenset(self.before.edge_set() - self.after.edge_set())

    @property
    def added(self) -> frozenset:
        return frozenset(self.after.edge_set() - self.before.edge_set())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Transition):
            return NotImplemented
        return self.before == other.before and self.after == other.after

    def __repr__(self) -> str:
        return f"Transition(-{sorted(self.removed)}, +{sorted(self.added)})"


def path_transitions(states: Sequence[LabeledGraph]) -> list[Transition]:
    """Consecutive state pairs of a path as Transition objects."""
    return [Transition(a, b) for a, b in zip(states, states[1:])]


def _locate(states: Sequence[LabeledGraph], t: Transition) -> int:
    for i in range(len(states) - 1):
        if states[i] == t.before and states[i + 1] == t.after:
            return i
    raise TransitionNotOnPath(f"{t!r} not on the canonical path")


# -- the deficit-repair schedule ---------------------------------------------


def _circuit_schedule(c: Circuit) -> list[tuple[Edge | None, Edge | None]]:
    """(removed, added) steps for one circuit: delete its first blue edge,
    repair along the walk (add one color, delete the next), close with the
    final addition.  A circuit of 2k edges yields k+1 steps."""
    q = c.length - 1
    steps: list[tuple[Edge | None, Edge | None]] = [(c.edge_at(0), None)]
    for i in range(1, q - 1, 2):
        steps.append((c.edge_at(i + 1), c.edge_at(i)))
    steps.append((None, c.edge_at(q)))
    return steps


def js_canonical_path(
    G: LabeledGraph, Gp: LabeledGraph, pairing: Pairing
) -> list[LabeledGraph]:
    """States of the edge-count-changing schedule from G to Gp.

    Circuits are processed in their canonical order, each contributing one
    deletion, a run of add/delete repairs, and one closing addition.  The
    states before and after each circuit realize the degrees exactly;
    interior states carry a bounded deficit.  Equal endpoints give the
    length-zero path [G].
    """
    diff = symmetric_difference(G, Gp)
    if not diff.size:
        return [G.copy()]
    circuits = circuit_decomposition(diff, pairing)
    cur = G.copy()
    states = [cur.copy()]
    for c in circuits:
        for removed, added in _circuit_schedule(c):
            if removed is not None:
                cur.remove_edge(*removed)
            if added is not None:
                cur.add_edge(*added)
            states.append(cur.copy())
    if cur != Gp:
        raise InvariantViolation("schedule did not terminate at the target")
    return states


def _owning_circuit(circuits: Sequence[Circuit], index: int) -> Circuit:
    """Circuit whose schedule covers the transition at the given path index."""
    at = 0
    for c in circuits:
        steps = c.length // 2 + 1
        if index < at + steps:
            return c
        at += steps
    raise InvariantViolation("transition index beyond the schedule")


def js_encoding(
    t: Transition, G: LabeledGraph, Gp: LabeledGraph, pairing: Pairing
) -> LabeledGraph:
    """Complementary encoding of a path transition.

    L is the symmetric difference of the endpoints XORed with the union of
    the transition's two states; for a repair transition the first blue
    edge of the circuit being processed is dropped on top.
    """
    states = js_canonical_path(G, Gp, pairing)
    idx = _locate(states, t)
    diff_edges = G.edge_set() ^ Gp.edge_set()
    value = diff_edges ^ (states[idx].edge_set() | states[idx + 1].edge_set())
    if len(t.removed) == 1 and len(t.added) == 1:
        circuits = circuit_decomposition(symmetric_difference(G, Gp), pairing)
        first_blue = _owning_circuit(circuits, idx).edge_at(0)
        if first_blue not in value:
            raise InvariantViolation("first blue edge missing from the encoding")
        value.discard(first_blue)
    return LabeledGraph(G.n, value)


def _alternation_classes(c: Circuit) -> tuple[frozenset, frozenset]:
    es = c.edges()
    return frozenset(es[0::2]), frozenset(es[1::2])


def js_recover(
    t: Transition, L: LabeledGraph, pairing: Pairing
) -> tuple[LabeledGraph, LabeledGraph]:
    """Invert js_encoding: rebuild the unique endpoint pair from (t, L).

    The XOR of L with the transition states exposes the difference (for a
    repair transition, short one edge, found as the unique pair of
    odd-degree vertices).  The pairing then gives the circuits; the circuit
    owning the transition is colored by matching its schedule against the
    transition, earlier circuits must already show their target color in
    the transition state, later ones their source color.
    """
    Z, Zp = t.before, t.after
    if L.n != Z.n:
        raise NotAnEncoding("encoding and transition disagree on vertex count")
    union = Z.edge_set() | Zp.edge_set()
    rebuilt = L.edge_set() ^ union
    repair = len(t.removed) == 1 and len(t.added) == 1
    parity = [0] * L.n
    for u, v in rebuilt:
        parity[u] ^= 1
        parity[v] ^= 1
    odd = [v for v, p in enumerate(parity) if p]
    if repair:
        if len(odd) != 2:
            raise NotAnEncoding("repair encoding needs exactly two odd vertices")
        missing = edge(odd[0], odd[1])
        if missing in rebuilt:
            raise NotAnEncoding("reconstructed edge already present")
        rebuilt.add(missing)
    elif odd:
        raise NotAnEncoding("difference has odd-degree vertices")
    orbits = _colorless_orbits(frozenset(rebuilt), pairing)

    moved = set(t.removed | t.added)
    owners = [k for k, c in enumerate(orbits) if moved <= c.edge_set()]
    if len(owners) != 1:
        raise NotAnEncoding("transition edges do not sit in a single circuit")
    current = owners[0]

    z_edges = Z.edge_set()
    blue_all: set[Edge] = set()
    red_all: set[Edge] = set()
    for k, c in enumerate(orbits):
        cls = _alternation_classes(c)
        if k == current:
            continue
        seen = frozenset(z_edges & c.edge_set())
        if seen not in cls:
            raise NotAnEncoding(f"circuit {k} is neither processed nor untouched")
        other = cls[1] if seen == cls[0] else cls[0]
        if k < current:
            red_all |= seen  # already processed: its target color is present
            blue_all |= other
        else:
            blue_all |= seen  # not reached yet: still shows the source color
            red_all |= other

    gamma = orbits[current]
    z_in = frozenset(z_edges & gamma.edge_set())
    zp_in = frozenset(Zp.edge_set() & gamma.edge_set())
    matches = []
    for blue_guess in _alternation_classes(gamma):
        try:
            walk = _canonical_walk(gamma.edge_set(), pairing, blue_guess)
        except InvariantViolation:
            continue  # coloring admits no schedule, so it cannot match
        snaps = [set(blue_guess)]
        for removed, added in _circuit_schedule(Circuit(walk)):
            nxt = set(snaps[-1])
            if removed is not None:
                nxt.discard(removed)
            if added is not None:
                nxt.add(added)
            snaps.append(nxt)
        if any(a == z_in and b == zp_in for a, b in zip(snaps, snaps[1:])):
            matches.append(blue_guess)
    if len(matches) != 1:
        raise NotAnEncoding("transition matches no unique circuit coloring")
    blue_all |= matches[0]
    red_all |= gamma.edge_set() - matches[0]

    common = z_edges - rebuilt
    G = LabeledGraph(L.n, blue_all | common)
    Gp = LabeledGraph(L.n, red_all | common)
    try:
        _locate(js_canonical_path(G, Gp, pairing), t)
    except (TransitionNotOnPath, GraphInputError, Unbalanced, InvariantViolation):
        raise NotAnEncoding("decoded pair does not reproduce the transition")
    return G, Gp


# -- sections, segments, landscapes ------------------------------------------


@dataclass(frozen=True)
class Section:
    """Subwalk of a circuit delimited by changes of the cut-edge count.

    cut_change is the effect of unwinding this section: -1, 0 or +1 on the
    number of cut edges of the current state.
    """

    walk: tuple[int, ...]
    cut_change: int

    def flips(self, rewind: bool = False) -> list[tuple[Edge, Edge]]:
        """(removed, added) hinge flips that unwind (or rewind) the section."""
        w = self.walk
        steps = [
            (edge(w[r - 2], w[r - 1]), edge(w[r - 1], w[r]))
            for r in range(2, len(w), 2)
        ]
        if rewind:
            return [(added, removed) for removed, added in reversed(steps)]
        return steps


@dataclass(frozen=True)
class Segment:
    """Run of sections unwound as a unit; net cut change is +-1, except for
    the single all-zero segment of a difference that never moves the cut."""

    sections: tuple[Section, ...]

    @property
    def cut_change(self) -> int:
        return sum(s.cut_change for s in self.sections)

    def flips(self, rewind: bool = False) -> list[tuple[Edge, Edge]]:
        order = reversed(self.sections) if rewind else self.sections
        out: list[tuple[Edge, Edge]] = []
        for s in order:
            out.extend(s.flips(rewind))
        return out


def _circuit_sections(c: Circuit, inst: PamInstance) -> list[Section]:
    def is_cut(e: Edge) -> bool:
        return inst.class_of(e[0]) != inst.class_of(e[1])

    total = c.length
    marks: list[tuple[int, int]] = []
    for r in range(2, total + 1, 2):
        before, here = is_cut(c.edge_at(r - 2)), is_cut(c.edge_at(r - 1))
        if before and not here:
            marks.append((r, -1))
        elif here and not before:
            marks.append((r, 1))
    if not marks:
        return [Section(c.walk, 0)]
    out = []
    prev = 0
    for r, val in marks:
        out.append(Section(c.walk[prev : r + 1], val))
        prev = r
    if prev < total:
        out.append(Section(c.walk[prev:], 0))
    return out


def section_segment_decomposition(
    circuits: Sequence[Circuit], inst: PamInstance
) -> tuple[tuple[Section, ...], tuple[Segment, ...]]:
    """Split circuits at cut-count changes and group the parts.

    Sections are the maximal subwalks whose unwinding moves the cut count
    at most once, listed across all circuits in circuit order.  Segments
    pack consecutive sections so every segment nets a single +-1 change;
    trailing zero-change sections fold into the last segment, and a
    difference that never moves the cut count is one zero segment.
    """
    sections: list[Section] = []
    for c in circuits:
        sections.extend(_circuit_sections(c, inst))
    nonzero = [k for k, s in enumerate(sections) if s.cut_change]
    if not nonzero:
        return tuple(sections), (Segment(tuple(sections)),)
    bounds = list(nonzero)
    bounds[-1] = len(sections) - 1
    segments = []
    prev = 0
    for k in bounds:
        segments.append(Segment(tuple(sections[prev : k + 1])))
        prev = k + 1
    return tuple(sections), tuple(segments)


@dataclass(frozen=True)
class Piece:
    """Sign-constant stretch of the profile between two zero crossings."""

    start: int
    end: int
    heights: tuple[int, ...]

    @property
    def kind(self) -> str:
        return "mountain" if self.heights[1] > 0 else "valley"

    @property
    def top(self) -> int:
        """Absolute index of the first extreme point."""
        vals = self.heights if self.kind == "mountain" else tuple(-h for h in self.heights)
        return self.start + vals.index(max(vals))

    def height(self, i: int) -> int:
        return self.heights[i - self.start]


@dataclass(frozen=True)
class Landscape:
    """Cumulative cut-change profile of the segments and its pieces."""

    profile: tuple[int, ...]
    pieces: tuple[Piece, ...]


def landscape(segments: Sequence[Segment]) -> Landscape:
    """Profile P(i) = sum of the first i segment changes, cut into pieces.

    P must start and end at zero and move by unit steps; the only non-unit
    step allowed is the single zero segment of the warm-up case, which maps
    to the flat profile with no pieces.
    """
    heights = [0]
    for s in segments:
        heights.append(heights[-1] + s.cut_change)
    if len(segments) == 1 and segments[0].cut_change == 0:
        return Landscape((0, 0), ())
    if any(s.cut_change not in (-1, 1) for s in segments):
        raise InvariantViolation("segment cut change must be +1 or -1")
    if heights[-1] != 0:
        raise InvariantViolation("cut profile must return to zero")
    pieces = []
    start = 0
    for j in range(1, len(heights)):
        if heights[j] == 0:
            pieces.append(Piece(start, j, tuple(heights[start : j + 1])))
            start = j
    return Landscape(tuple(heights), tuple(pieces))


def traverse(piece: Piece) -> tuple[tuple[int, int], ...]:
    """Shortest two-pointer walk over a mountain or valley.

    Pairs (i, j) run from (start, top) to (top, end); both pointers move by
    one each step and their heights always sum to the top height.  Found by
    breadth-first search on the pair graph, so the result is minimal: no
    proper subsequence with the same endpoints is itself such a walk.
    """
    t = piece.top
    target = piece.height(t)
    lo, hi = piece.start, piece.end
    start, goal = (lo, t), (t, hi)
    if start == goal:
        return (start,)
    ok = (
        lambda i, j: lo <= i <= t <= j <= hi
        and piece.height(i) + piece.height(j) == target
    )
    parent: dict[tuple[int, int], tuple[int, int]] = {start: start}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        if node == goal:
            break
        i, j = node
        for di, dj in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            nxt = (i + di, j + dj)
            if nxt not in parent and ok(*nxt):
                parent[nxt] = node
                queue.append(nxt)
    if goal not in parent:
        raise InvariantViolation("piece admits no traversal")
    path = [goal]
    while path[-1] != start:
        path.append(parent[path[-1]])
    return tuple(reversed(path))


# -- the two-class hinge schedule --------------------------------------------


def _segment_ops(land: Landscape) -> list[tuple[str, int]]:
    """(op, segment index) list realizing the landscape, 1-based segments.

    Flat landscape: unwind everything left to right.  Otherwise every piece
    is traversed; a pointer moving up unwinds the segment it enters, one
    moving down rewinds the segment it leaves, left pointer first.
    """
    if not land.pieces:
        return [("unwind", k) for k in range(1, len(land.profile))]
    ops: list[tuple[str, int]] = []
    for piece in land.pieces:
        pairs = traverse(piece)
        for (i0, j0), (i1, j1) in zip(pairs, pairs[1:]):
            ops.append(("unwind", i1) if i1 == i0 + 1 else ("rewind", i0))
            ops.append(("unwind", j1) if j1 == j0 + 1 else ("rewind", j0))
    return ops


def hinge_canonical_path(
    G: LabeledGraph, Gp: LabeledGraph, pairing: Pairing, inst: PamInstance
) -> list[LabeledGraph]:
    """States of the hinge-flip schedule between two-class realizations.

    The difference is cut into sections and segments; the landscape of the
    segments dictates, via piece traversals, the order in which segments
    are unwound (and temporarily rewound), which is what keeps every
    intermediate's cut count within one of the target.  Equal endpoints
    give the length-zero path [G].
    """
    diff = symmetric_difference(G, Gp)
    if not diff.size:
        return [G.copy()]
    circuits = circuit_decomposition(diff, pairing)
    _, segments = section_segment_decomposition(circuits, inst)
    land = landscape(segments)
    cur = G.copy()
    states = [cur.copy()]
    for op, k in _segment_ops(land):
        for removed, added in segments[k - 1].flips(rewind=op == "rewind"):
            cur.remove_edge(*removed)
            cur.add_edge(*added)
            states.append(cur.copy())
    if cur != Gp:
        raise InvariantViolation("schedule did not terminate at the target")
    return states


def pam_encoding(
    t: Transition,
    G: LabeledGraph,
    Gp: LabeledGraph,
    pairing: Pairing,
    inst: PamInstance,
) -> LabeledGraph:
    """Complementary encoding of a hinge-path transition: the endpoint
    difference XORed with the transition's source state."""
    states = hinge_canonical_path(G, Gp, pairing, inst)
    idx = _locate(states, t)
    return LabeledGraph(G.n, (G.edge_set() ^ Gp.edge_set()) ^ states[idx].edge_set())


def pam_recover_count(
    t: Transition, L: LabeledGraph, pairing: Pairing, inst: PamInstance
) -> list[tuple[LabeledGraph, LabeledGraph]]:
    """All exact endpoint pairs whose hinge path explains (t, L).

    XORing L with the transition's source state exposes the difference;
    the pairing splits it into circuits, and every choice of circuit
    colors is tried.  The bound to check downstream is n^4/8.
    """
    Z = t.before
    if L.n != Z.n:
        raise NotAnEncoding("encoding and transition disagree on vertex count")
    diff_edges = L.edge_set() ^ Z.edge_set()
    common = Z.edge_set() - diff_edges
    orbits = _colorless_orbits(frozenset(diff_edges), pairing)
    out: list[tuple[LabeledGraph, LabeledGraph]] = []
    for flips in itertools.product((0, 1), repeat=len(orbits)):
        blue: set[Edge] = set()
        red: set[Edge] = set()
        for c, flip in zip(orbits, flips):
            cls = _alternation_classes(c)
            blue |= cls[flip]
            red |= cls[1 - flip]
        G = LabeledGraph(L.n, blue | common)
        Gp = LabeledGraph(L.n, red | common)
        if classify_membership(G, inst)[0] is not Membership.EXACT:
            continue
        if classify_membership(Gp, inst)[0] is not Membership.EXACT:
            continue
        try:
            _locate(hinge_canonical_path(G, Gp, pairing, inst), t)
        except (TransitionNotOnPath, GraphInputError, Unbalanced, InvariantViolation):
            continue
        out.append((G, Gp))
    if not out:
        raise NotAnEncoding("no endpoint pair explains the transition")
    return out


# -- constructive switch paths -----------------------------------------------


def _identity_pairing(diff: ColoredDifference) -> Pairing:
    entries: list[tuple[int, Edge, Edge]] = []
    for v, reds, blues in _vertex_slots(diff):
        entries.extend((v, r, b) for r, b in zip(reds, blues))
    return Pairing(diff.n, tuple(entries))


def _switch_candidates(
    cur: LabeledGraph, target: LabeledGraph, diff: ColoredDifference
) -> Iterator[tuple[tuple[Edge, Edge], tuple[Edge, Edge]]]:
    """Circuit-walk switches: drop two consecutive blue edges, add the red
    edge between them plus the chord closing the four vertices."""
    for c in circuit_decomposition(diff, _identity_pairing(diff)):
        total = c.length
        for s in range(0, total, 2):
            quad = [c.walk[(s + k) % total] for k in range(4)]
            if len(set(quad)) != 4:
                continue
            x0, x1, x2, x3 = quad
            chord = edge(x0, x3)
            if cur.has_edge(*chord) or cur.has_edge(x1, x2):
                continue
            yield (edge(x0, x1), edge(x2, x3)), (edge(x1, x2), chord)


def _all_switches(
    cur: LabeledGraph,
) -> Iterator[tuple[tuple[Edge, Edge], tuple[Edge, Edge]]]:
    es = cur.edges()
    for a, b in itertools.combinations(es, 2):
        if len({*a, *b}) != 4:
            continue
        (p, q), (r, s) = a, b
        for add in ((edge(p, r), edge(q, s)), (edge(p, s), edge(q, r))):
            if not cur.has_edge(*add[0]) and not cur.has_edge(*add[1]):
                yield (a, b), add


def switch_path(H: LabeledGraph, Hp: LabeledGraph) -> list[Transition]:
    """Switch moves from H to Hp, at most half the difference size.

    Each applied switch shrinks the difference by at least two (usually by
    exactly two, by four when it closes a four-edge circuit), which yields
    the length bound by construction.  Candidates come from the circuit
    walks of the identity pairing; if every walk position collides with an
    existing chord, the best difference-reducing switch overall is taken.
    """
    if H.degrees() != Hp.degrees():
        raise GraphInputError("endpoints realize different degree sequences")
    cur = H.copy()
    moves: list[Transition] = []
    while True:
        diff = symmetric_difference(cur, Hp)
        if not diff.size:
            return moves

        def reduction(step: tuple[tuple[Edge, Edge], tuple[Edge, Edge]]) -> int:
            (r1, r2), (a1, a2) = step
            gain = 0
            for e in (r1, r2):
                gain += 1 if e in diff.blue else -1
            for e in (a1, a2):
                gain += 1 if e in diff.red else -1
            return gain

        best = None
        for step in _switch_candidates(cur, Hp, diff):
            gain = reduction(step)
            if best is None or gain > best[0] or (gain == best[0] and step < best[1]):
                best = (gain, step)
            if best[0] == 4:
                break
        if best is None or best[0] < 2:
            for step in _all_switches(cur):
                gain = reduction(step)
                if best is None or gain > best[0] or (gain == best[0] and step < best[1]):
                    best = (gain, step)
        if best is None or best[0] < 2:
            raise InvariantViolation("no difference-reducing switch available")
        (r1, r2), (a1, a2) = best[1]
        before = cur.copy()
        cur.remove_edge(*r1)
        cur.remove_edge(*r2)
        cur.add_edge(*a1)
        cur.add_edge(*a2)
        moves.append(Transition(before, cur.copy()))


# -- restricted-switch distance certificates ---------------------------------


@dataclass(frozen=True)
class DistanceCertificate:
    """Exact chain distance between two states with the 3/2 bound verdict."""

    distance: int
    difference: int

    @property
    def within_bound(self) -> bool:
        return 2 * self.distance <= 3 * self.difference


def restricted_switch_distance_check(
    H: LabeledGraph,
    Hp: LabeledGraph,
    inst: PamInstance,
    max_states: int = 20000,
) -> DistanceCertificate:
    """Breadth-first distance under the restricted switch chain.

    Explores from H until Hp is found; raises Disconnected when the
    reachable component is exhausted first (that would falsify the chain's
    irreducibility on the instance, so it is surfaced loudly), TooLarge
    when the component exceeds the state cap.
    """
    difference = len(H.edge_set() ^ Hp.edge_set())
    if H == Hp:
        return DistanceCertificate(0, 0)
    chain = ChainSpec(ChainKind.RESTRICTED_SWITCH, inst)
    target = Hp.key()
    seen = {H.key()}
    frontier = [H]
    dist = 0
    while frontier:
        dist += 1
        nxt = []
        for g in frontier:
            for h, _ in neighbors(chain, g):
                k = h.key()
                if k in seen:
                    continue
                if k == target:
                    return DistanceCertificate(dist, difference)
                seen.add(k)
                nxt.append(h)
        if len(seen) > max_states:
            raise TooLarge(f"restricted-switch component exceeds {max_states} states")
        frontier = nxt
    raise Disconnected("target state is not reachable by restricted switches")
