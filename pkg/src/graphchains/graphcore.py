"""Core graph and instance types shared by every other module.

Vertices are 0-indexed integers.  An edge is an unordered pair of distinct
vertices stored as a sorted tuple; lexicographic order on sorted tuples is the
total edge order used whenever a "smallest edge" is needed.

Three instance kinds describe target spaces:

* ``DegreeSequence`` -- plain degree sequence d over n vertices.
* ``BipartiteInstance`` -- degree lists (r, c) for the two sides; side V is
  the index range 0..m-1, side U is m..m+n-1.
* ``PamInstance`` -- two vertex classes with prescribed internal/cut edge
  counts (c11, c12, c22) and a degree list; class membership is positional
  (the first n1 indices form class one).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence, Union

__all__ = [
    "Edge",
    "edge",
    "GraphInputError",
    "LabeledGraph",
    "DegreeSequence",
    "BipartiteInstance",
    "PamInstance",
    "Instance",
    "Membership",
    "Perturbation",
    "ColoredDifference",
    "degree_sequence_of",
    "symmetric_difference",
    "classify_membership",
    "cut_internal_counts",
    "parse_graph",
    "format_graph",
    "read_graph",
    "write_graph",
    "parse_instance",
    "instance_to_dict",
    "load_instance",
    "instance_json",
]

Edge = tuple  # sorted pair (u, v) with u < v


class GraphInputError(ValueError):
    """Malformed graph/instance data or mismatched vertex sets."""


def edge(u: int, v: int) -> tuple[int, int]:
    """Normalize an unordered vertex pair to a sorted tuple."""
    if u == v:
        raise GraphInputError(f"self-loop at vertex {u}")
    return (u, v) if u < v else (v, u)


class LabeledGraph:
    """Simple undirected labeled graph on vertices 0..n-1.

    Storage keeps three synchronized views: per-vertex adjacency sets, an
    indexable edge list (so drawing an edge uniformly at random is O(1)) and
    the position of each edge inside that list (so removal is O(1) via
    swap-with-last).  Values are immutable after construction except through
    add_edge/remove_edge, which the chain engine uses to apply transitions in
    place.
    """

    __slots__ = ("n", "_adj", "_edge_list", "_edge_pos")

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()) -> None:
        if n < 0:
            raise GraphInputError("vertex count must be non-negative")
        self.n = n
        self._adj: list[set[int]] = [set() for _ in range(n)]
        self._edge_list: list[tuple[int, int]] = []
        self._edge_pos: dict[tuple[int, int], int] = {}
        for u, v in edges:
            self.add_edge(u, v)

    # -- queries ---------------------------------------------------------

    @property
    def edge_count(self) -> int:
        return len(self._edge_list)

    def has_edge(self, u: int, v: int) -> bool:
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise GraphInputError(f"vertex out of range: {(u, v)}")
        return v in self._adj[u]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self._adj)

    def neighbors(self, v: int) -> set[int]:
        """Live adjacency set of v.  Treat as read-only."""
        return self._adj[v]

    def edges(self) -> list[tuple[int, int]]:
        """Edges in lexicographic order."""
        return sorted(self._edge_list)

    def edge_at(self, i: int) -> tuple[int, int]:
        """Edge at position i of the (arbitrary-order) internal list."""
        return self._edge_list[i]

    def edge_set(self) -> set[tuple[int, int]]:
        return set(self._edge_list)

    # -- mutation --------------------------------------------------------

    def add_edge(self, u: int, v: int) -> None:
        e = edge(u, v)
        if not (0 <= e[0] and e[1] < self.n):
            raise GraphInputError(f"vertex out of range: {e}")
        if e in self._edge_pos:
            raise GraphInputError(f"duplicate edge {e}")
        self._edge_pos[e] = len(self._edge_list)
        self._edge_list.append(e)
        self._adj[e[0]].add(e[1])
        self._adj[e[1]].add(e[0])

    def remove_edge(self, u: int, v: int) -> None:
        e = edge(u, v)
        pos = self._edge_pos.pop(e, None)
        if pos is None:
            raise GraphInputError(f"no such edge {e}")
        last = self._edge_list.pop()
        if pos < len(self._edge_list):
            self._edge_list[pos] = last
            self._edge_pos[last] = pos
        self._adj[e[0]].discard(e[1])
        self._adj[e[1]].discard(e[0])

    # -- value semantics ---------------------------------------------------

    def copy(self) -> "LabeledGraph":
        g = LabeledGraph.__new__(LabeledGraph)
        g.n = self.n
        g._adj = [set(a) for a in self._adj]
        g._edge_list = list(self._edge_list)
        g._edge_pos = dict(self._edge_pos)
        return g

    def key(self) -> bytes:
        """Canonical encoding: vertex count plus the sorted edge list."""
        body = " ".join(f"{u},{v}" for u, v in self.edges())
        return f"{self.n}|{body}".encode("ascii")

    @classmethod
    def from_key(cls, key: bytes) -> "LabeledGraph":
        head, _, body = key.decode("ascii").partition("|")
        pairs = []
        if body:
            for tok in body.split(" "):
                u, _, v = tok.partition(",")
                pairs.append((int(u), int(v)))
        return cls(int(head), pairs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabeledGraph):
            return NotImplemented
        return self.n == other.n and self._edge_pos.keys() == other._edge_pos.keys()

    __hash__ = None  # mutable; use key() for dict/set membership

    def __repr__(self) -> str:
        return f"LabeledGraph(n={self.n}, m={self.edge_count})"


def degree_sequence_of(G: LabeledGraph) -> tuple[int, ...]:
    return G.degrees()


# -- instances -------------------------------------------------------------


def _int_tuple(values: Iterable[int], what: str, minimum: int) -> tuple[int, ...]:
    out = []
    for x in values:
        if not isinstance(x, int) or isinstance(x, bool) or x < minimum:
            raise GraphInputError(f"{what} must be integers >= {minimum}, got {x!r}")
        out.append(x)
    return tuple(out)


@dataclass(frozen=True)
class DegreeSequence:
    """Target degree sequence with positive components."""

    d: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "d", _int_tuple(self.d, "degrees", 1))
        if not self.d:
            raise GraphInputError("empty degree sequence")

    @property
    def n(self) -> int:
        return len(self.d)


@dataclass(frozen=True)
class BipartiteInstance:
    """Bipartite degree lists: r over side V (first m vertices), c over side U.

    sum(r) == sum(c) is required for a realization to exist but is deliberately
    not a constructor invariant; is_graphical_bipartite reports the mismatch.
    """

    r: tuple[int, ...]
    c: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "r", _int_tuple(self.r, "degrees", 0))
        object.__setattr__(self, "c", _int_tuple(self.c, "degrees", 0))
        if not self.r or not self.c:
            raise GraphInputError("both sides need at least one vertex")

    @property
    def m_side(self) -> int:
        return len(self.r)

    @property
    def n_side(self) -> int:
        return len(self.c)

    @property
    def n(self) -> int:
        return len(self.r) + len(self.c)

    def side_of(self, v: int) -> int:
        return 0 if v < len(self.r) else 1

    def target_degree(self, v: int) -> int:
        m = len(self.r)
        return self.r[v] if v < m else self.c[v - m]


@dataclass(frozen=True)
class PamInstance:
    """Two-class instance: class sizes, edge-count matrix and degree list.

    Invariants: degree/edge-count conservation per class
    (sum of class-one degrees = 2*c11 + c12, likewise for class two) and the
    standing assumption 1 <= c12 <= n1*n2 - 1.
    """

    n1: int
    n2: int
    c11: int
    c12: int
    c22: int
    d: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n1 < 1 or self.n2 < 1:
            raise GraphInputError("both classes need at least one vertex")
        for name in ("c11", "c12", "c22"):
            if getattr(self, name) < 0:
                raise GraphInputError(f"{name} must be non-negative")
        object.__setattr__(self, "d", _int_tuple(self.d, "degrees", 0))
        if len(self.d) != self.n1 + self.n2:
            raise GraphInputError("degree list length must equal n1 + n2")
        if sum(self.d[: self.n1]) != 2 * self.c11 + self.c12:
            raise GraphInputError("class-one degrees inconsistent with (c11, c12)")
        if sum(self.d[self.n1 :]) != 2 * self.c22 + self.c12:
            raise GraphInputError("class-two degrees inconsistent with (c22, c12)")
        if not (1 <= self.c12 <= self.n1 * self.n2 - 1):
            raise GraphInputError("c12 must satisfy 1 <= c12 <= n1*n2 - 1")

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    @property
    def matrix(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((self.c11, self.c12), (self.c12, self.c22))

    @property
    def jdm_flag(self) -> bool:
        """True when degrees are constant within each class."""
        return (
            len(set(self.d[: self.n1])) == 1 and len(set(self.d[self.n1 :])) == 1
        )

    def class_of(self, v: int) -> int:
        return 0 if v < self.n1 else 1


Instance = Union[DegreeSequence, BipartiteInstance, PamInstance]


def _as_instance(inst) -> Instance:
    if isinstance(inst, (DegreeSequence, BipartiteInstance, PamInstance)):
        return inst
    if isinstance(inst, (tuple, list)):
        return DegreeSequence(tuple(inst))
    raise GraphInputError(f"not an instance: {inst!r}")


# -- membership ------------------------------------------------------------


class Membership(Enum):
    EXACT = "exact"
    PERTURBED_WITHIN = "perturbed_within"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class Perturbation:
    """Per-vertex degree deviations (target minus actual) and, for two-class
    instances, the cut-edge-count deviation c12 - c12'."""

    alpha: tuple[int, ...]
    cut_delta: int | None = None


@dataclass(frozen=True)
class ColoredDifference:
    """Symmetric difference of two graphs: blue = E(G) \\ E(G2), red = E(G2) \\ E(G)."""

    n: int
    blue: frozenset
    red: frozenset

    @property
    def size(self) -> int:
        return len(self.blue) + len(self.red)

    def edges(self) -> list[tuple[int, int]]:
        return sorted(self.blue | self.red)

    def blue_at(self, v: int) -> list[tuple[int, int]]:
        return sorted(e for e in self.blue if v in e)

    def red_at(self, v: int) -> list[tuple[int, int]]:
        return sorted(e for e in self.red if v in e)


def symmetric_difference(G: LabeledGraph, G2: LabeledGraph) -> ColoredDifference:
    if G.n != G2.n:
        raise GraphInputError("graphs live on different vertex sets")
    a, b = G.edge_set(), G2.edge_set()
    return ColoredDifference(G.n, frozenset(a - b), frozenset(b - a))


def _classify_degree(G: LabeledGraph, d: tuple[int, ...]) -> tuple[Membership, Perturbation]:
    alpha = tuple(t - g for t, g in zip(d, G.degrees()))
    pert = Perturbation(alpha)
    if any(a < 0 for a in alpha):
        return Membership.OUTSIDE, pert
    nz = sorted(a for a in alpha if a)
    if not nz:
        return Membership.EXACT, pert
    # Perturbed states: two deficit-1 vertices or a single deficit-2 vertex.
    if nz == [1, 1] or nz == [2]:
        return Membership.PERTURBED_WITHIN, pert
    return Membership.OUTSIDE, pert


def _classify_bipartite(G: LabeledGraph, inst: BipartiteInstance) -> tuple[Membership, Perturbation]:
    m = inst.m_side
    target = inst.r + inst.c
    alpha = tuple(t - g for t, g in zip(target, G.degrees()))
    pert = Perturbation(alpha)
    for u, v in G.edge_set():
        if (u < m) == (v < m):
            return Membership.OUTSIDE, pert
    if any(a < 0 for a in alpha):
        return Membership.OUTSIDE, pert
    nz_v = [a for a in alpha[:m] if a]
    nz_u = [a for a in alpha[m:] if a]
    if not nz_v and not nz_u:
        return Membership.EXACT, pert
    # Exactly one deficit-1 vertex per side; deficit two cannot occur here.
    if nz_v == [1] and nz_u == [1]:
        return Membership.PERTURBED_WITHIN, pert
    return Membership.OUTSIDE, pert


def _classify_pam(G: LabeledGraph, inst: PamInstance) -> tuple[Membership, Perturbation]:
    alpha = tuple(t - g for t, g in zip(inst.d, G.degrees()))
    _, c12p, _ = cut_internal_counts(G, inst)
    pert = Perturbation(alpha, cut_delta=inst.c12 - c12p)
    # Perturbed space: total degree preserved, total deviation at most 4,
    # cut count off by at most one.
    if sum(alpha) != 0:
        return Membership.OUTSIDE, pert
    if sum(abs(a) for a in alpha) > 4:
        return Membership.OUTSIDE, pert
    if abs(pert.cut_delta) > 1:
        return Membership.OUTSIDE, pert
    if all(a == 0 for a in alpha) and pert.cut_delta == 0:
        return Membership.EXACT, pert
    return Membership.PERTURBED_WITHIN, pert


def classify_membership(G: LabeledGraph, inst) -> tuple[Membership, Perturbation]:
    """Tag G as Exact / PerturbedWithin / Outside for the given instance.

    Total function: any graph on the right vertex count gets a tag; the
    perturbation carries the per-vertex deviations that justified it.
    """
    inst = _as_instance(inst)
    if isinstance(inst, DegreeSequence):
        if G.n != inst.n:
            raise GraphInputError("graph/instance vertex count mismatch")
        return _classify_degree(G, inst.d)
    if isinstance(inst, BipartiteInstance):
        if G.n != inst.n:
            raise GraphInputError("graph/instance vertex count mismatch")
        return _classify_bipartite(G, inst)
    if G.n != inst.n:
        raise GraphInputError("graph/instance vertex count mismatch")
    return _classify_pam(G, inst)


def cut_internal_counts(G: LabeledGraph, inst: PamInstance) -> tuple[int, int, int]:
    """Edge counts (internal class one, cut, internal class two)."""
    if G.n != inst.n:
        raise GraphInputError("graph/instance vertex count mismatch")
    n1 = inst.n1
    c11 = c12 = c22 = 0
    for u, v in G.edge_set():
        if v < n1:
            c11 += 1
        elif u >= n1:
            c22 += 1
        else:
            c12 += 1
    return c11, c12, c22


# -- I/O ---------------------------------------------------------------------


def format_graph(G: LabeledGraph) -> str:
    lines = [f"{G.n} {G.edge_count}"]
    lines.extend(f"{u} {v}" for u, v in G.edges())
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> LabeledGraph:
    tokens = text.split()
    if len(tokens) < 2:
        raise GraphInputError("missing 'n m' header")
    n, m = int(tokens[0]), int(tokens[1])
    body = tokens[2:]
    if len(body) != 2 * m:
        raise GraphInputError(f"expected {m} edges, found {len(body) // 2}")
    pairs = [(int(body[2 * i]), int(body[2 * i + 1])) for i in range(m)]
    return LabeledGraph(n, pairs)


def read_graph(path) -> LabeledGraph:
    with open(path, "r", encoding="ascii") as fh:
        return parse_graph(fh.read())


def write_graph(G: LabeledGraph, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_graph(G))


def parse_instance(obj: dict) -> Instance:
    """Decode the documented JSON instance format."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise GraphInputError("instance JSON needs a 'kind' field")
    kind = obj["kind"]
    try:
        if kind == "degree":
            return DegreeSequence(tuple(obj["d"]))
        if kind == "bipartite":
            return BipartiteInstance(tuple(obj["r"]), tuple(obj["c"]))
        if kind == "pam":
            n1, n2 = obj["classes"]
            matrix = obj["matrix"]
            if matrix[0][1] != matrix[1][0]:
                raise GraphInputError("matrix must be symmetric")
            return PamInstance(
                n1=n1,
                n2=n2,
                c11=matrix[0][0],
                c12=matrix[0][1],
                c22=matrix[1][1],
                d=tuple(obj["d"]),
            )
    except KeyError as missing:
        raise GraphInputError(f"instance JSON missing field {missing}") from None
    raise GraphInputError(f"unknown instance kind {kind!r}")


def instance_to_dict(inst) -> dict:
    inst = _as_instance(inst)
    if isinstance(inst, DegreeSequence):
        return {"kind": "degree", "d": list(inst.d)}
    if isinstance(inst, BipartiteInstance):
        return {"kind": "bipartite", "r": list(inst.r), "c": list(inst.c)}
    return {
        "kind": "pam",
        "classes": [inst.n1, inst.n2],
        "matrix": [[inst.c11, inst.c12], [inst.c12, inst.c22]],
        "d": list(inst.d),
    }


def instance_json(inst) -> str:
    """Canonical serialization, stable across runs (used for hashing)."""
    return json.dumps(instance_to_dict(inst), sort_keys=True, separators=(",", ":"))


def load_instance(path) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance(json.load(fh))
