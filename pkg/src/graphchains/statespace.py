"""Exact enumeration of realization spaces and mixing diagnostics.

This is the oracle layer: everything here is exhaustive or exact, sized for
desk-scale instances (vertex guard, dense matrices, a hard state cap).  The
transition matrix is assembled from the chains module's exact rational
neighbor probabilities and only then rounded to floats.

numpy is used for the linear algebra throughout; the second eigenvalue is
computed by an explicitly deflated power iteration (the matrices are tiny,
symmetric, and, by laziness, positive semidefinite), which the tests check
against a direct eigendecomposition.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, log, sqrt
from typing import Iterable, Mapping, Sequence

import numpy as np

from .chains import ChainSpec, neighbors
from .graphcore import (
    BipartiteInstance,
    DegreeSequence,
    Instance,
    LabeledGraph,
    Membership,
    PamInstance,
    _as_instance,
    classify_membership,
)

__all__ = [
    "TooLarge",
    "NonConvergence",
    "InvalidFlow",
    "StateSpace",
    "FlowAssignment",
    "enumerate_states",
    "transition_matrix",
    "spectral_gap",
    "tv_distance",
    "mixing_time",
    "flow_congestion",
]


class TooLarge(Exception):
    """Instance exceeds the enumeration guards."""


class NonConvergence(Exception):
    """Iterative eigenvalue computation did not reach tolerance."""


class InvalidFlow(Exception):
    """A flow assignment violates a demand or structural requirement."""


@dataclass(frozen=True)
class StateSpace:
    """An enumerated realization space with a canonical state order."""

    instance: Instance
    perturbed: bool
    states: tuple[LabeledGraph, ...]
    index: Mapping[bytes, int]

    @property
    def kind(self) -> str:
        return "perturbed" if self.perturbed else "exact"

    def __len__(self) -> int:
        return len(self.states)

    def id_of(self, G: LabeledGraph) -> int:
        return self.index[G.key()]


def _degree_windows(inst: Instance, perturbed: bool) -> tuple[list[int], list[int]]:
    """Allowed final-degree interval per vertex (a superset of the space)."""
    if isinstance(inst, DegreeSequence):
        targets = list(inst.d)
        slack_down, slack_up = (2, 0) if perturbed else (0, 0)
    elif isinstance(inst, BipartiteInstance):
        targets = [inst.target_degree(v) for v in range(inst.n)]
        slack_down, slack_up = (1, 0) if perturbed else (0, 0)
    else:
        targets = list(inst.d)
        slack_down, slack_up = (2, 2) if perturbed else (0, 0)
    lo = [max(0, t - slack_down) for t in targets]
    hi = [t + slack_up for t in targets]
    return lo, hi


def enumerate_states(
    inst: Instance,
    perturbed: bool = False,
    max_vertices: int = 10,
    max_states: int = 20000,
) -> StateSpace:
    """Enumerate the exact or perturbed realization space of an instance.

    Generation assigns each vertex its set of higher-indexed neighbors with
    degree-window pruning, then filters through classify_membership, so the
    classifier is the single source of truth for membership.  Raises
    TooLarge beyond `max_vertices` vertices or `max_states` states.
    """
    inst = _as_instance(inst)
    n = inst.n
    if n > max_vertices:
        raise TooLarge(f"{n} vertices exceeds the enumeration guard ({max_vertices})")
    lo, hi = _degree_windows(inst, perturbed)
    pam = isinstance(inst, PamInstance)
    if pam:
        # running (c11, cut, c22) caps; the cut window is exactly +-1 in the
        # perturbed space, internal counts get a loose slack (pruning only)
        caps = (
            inst.c11 + (3 if perturbed else 0),
            inst.c12 + (1 if perturbed else 0),
            inst.c22 + (3 if perturbed else 0),
        )

        def slot(v: int, u: int) -> int:
            a, b = inst.class_of(v), inst.class_of(u)
            if a != b:
                return 1
            return 0 if a == 0 else 2

    def candidates(v: int) -> list[int]:
        if isinstance(inst, BipartiteInstance):
            if v < inst.m_side:
                return list(range(max(v + 1, inst.m_side), inst.n))
            return []
        return list(range(v + 1, n))

    G = LabeledGraph(n)
    found: list[LabeledGraph] = []
    counts = [0, 0, 0]  # PAM running (c11, c12, c22); index 1 is the cut

    def feasible_after(v: int) -> bool:
        # each later vertex must still be able to reach its minimum degree
        for u in range(v + 1, n):
            if lo[u] - G.degree(u) > n - v - 2:
                return False
        return True

    def assign(v: int) -> None:
        if v == n:
            tag, _ = classify_membership(G, inst)
            if tag is Membership.EXACT or (
                perturbed and tag is Membership.PERTURBED_WITHIN
            ):
                if len(found) >= max_states:
                    raise TooLarge(f"more than {max_states} states")
                found.append(G.copy())
            return
        cand = [u for u in candidates(v) if G.degree(u) < hi[u]]
        need_lo = max(0, lo[v] - G.degree(v))
        need_hi = hi[v] - G.degree(v)
        if need_lo > len(cand) or need_hi < 0:
            return
        for size in range(need_lo, min(need_hi, len(cand)) + 1):
            for subset in itertools.combinations(cand, size):
                ok = True
                for u in subset:
                    G.add_edge(v, u)
                    if pam:
                        s = slot(v, u)
                        counts[s] += 1
                        ok = ok and counts[s] <= caps[s]
                if ok and feasible_after(v):
                    assign(v + 1)
                for u in subset:
                    G.remove_edge(v, u)
                    if pam:
                        counts[slot(v, u)] -= 1

    assign(0)
    found.sort(key=lambda g: g.key())
    index = {g.key(): i for i, g in enumerate(found)}
    return StateSpace(inst, perturbed, tuple(found), index)


def transition_matrix(chain: ChainSpec, space: StateSpace) -> np.ndarray:
    """Dense row-stochastic matrix of exact one-step probabilities.

    Rows are assembled from exact rationals (the diagonal is the exact
    complement) before conversion to float64.
    """
    N = len(space)
    P = np.zeros((N, N))
    for i, G in enumerate(space.states):
        off = Fraction(0)
        for H, p in neighbors(chain, G):
            j = space.index.get(H.key())
            if j is None:
                raise ValueError(
                    "state space does not contain a reachable state; "
                    "chain and space disagree"
                )
            P[i, j] = float(p)
            off += p
        P[i, i] = float(1 - off)
    return P


def spectral_gap(
    P: np.ndarray, tol: float = 1e-10, max_iter: int = 10**6
) -> tuple[float, float]:
    """Second-largest eigenvalue and gap of a symmetric lazy kernel.

    Power iteration on the complement of the top eigenvector (the uniform
    vector: P is doubly stochastic).  Laziness makes the spectrum
    non-negative, so the iteration converges to the second eigenvalue from
    any admissible start.  A one-state space reports (0.0, 1.0) by
    convention.
    """
    P = np.asarray(P, dtype=float)
    N = P.shape[0]
    if N == 1:
        return 0.0, 1.0
    top = np.full(N, 1.0 / sqrt(N))
    v = np.sin(np.arange(1, N + 1, dtype=float))
    v -= (top @ v) * top
    norm = np.linalg.norm(v)
    if norm < 1e-12:  # pragma: no cover - sin start never collapses for N>=2
        v = np.zeros(N)
        v[0] = 1.0
        v -= (top @ v) * top
        norm = np.linalg.norm(v)
    v /= norm
    for _ in range(max_iter):
        w = P @ v
        w -= (top @ w) * top
        lam = v @ w
        if np.linalg.norm(w - lam * v) <= tol:
            lam = max(0.0, min(1.0, lam))
            return lam, 1.0 - lam
        norm = np.linalg.norm(w)
        if norm <= tol:
            return 0.0, 1.0  # remaining spectrum is (numerically) zero
        v = w / norm
    raise NonConvergence(f"power iteration did not reach {tol} in {max_iter} steps")


def _eig_powers(P: np.ndarray):
    if not np.allclose(P, P.T, atol=1e-9):
        raise ValueError("tv diagnostics require a symmetric kernel")
    lam, Q = np.linalg.eigh(P)
    return lam, Q


def _tv_all_rows(lam: np.ndarray, Q: np.ndarray, t: int) -> np.ndarray:
    """Delta_x(t) for every start state x at once."""
    N = Q.shape[0]
    Mt = (Q * lam**t) @ Q.T
    return 0.5 * np.abs(Mt - 1.0 / N).sum(axis=1)


def tv_distance(P: np.ndarray, x: int, t: int) -> float:
    """Total variation distance of row x of P^t from uniform."""
    if t < 0:
        raise ValueError("t must be non-negative")
    lam, Q = _eig_powers(np.asarray(P, dtype=float))
    row = (Q[x] * lam**t) @ Q.T
    return 0.5 * float(np.abs(row - 1.0 / len(row)).sum())


def mixing_time(P: np.ndarray, eps: float) -> int:
    """Smallest t with max-over-starts TV distance at most eps from t on.

    Bracketing by doubling plus binary search; lazy reversible kernels have
    non-increasing worst-case TV distance, and that is verified at the
    probe points around the answer rather than assumed.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must be in (0, 1)")
    P = np.asarray(P, dtype=float)
    lam, Q = _eig_powers(P)

    def worst(t: int) -> float:
        return float(_tv_all_rows(lam, Q, t).max())

    if worst(0) <= eps:
        return 0
    t_hi = 1
    while worst(t_hi) > eps:
        t_hi *= 2
        if t_hi > 10**8:
            raise NonConvergence("chain does not reach the target distance")
    t_lo = t_hi // 2  # worst(t_lo) > eps
    while t_hi - t_lo > 1:
        mid = (t_lo + t_hi) // 2
        if worst(mid) <= eps:
            t_hi = mid
        else:
            t_lo = mid
    tau = t_hi
    if not (worst(tau) <= eps < worst(tau - 1)):
        raise RuntimeError("TV distance is not monotone around the answer")
    for k in (1, 2, 3):
        if worst(tau + k) > eps:
            raise RuntimeError("TV distance increased after the mixing point")
    return tau


@dataclass(frozen=True)
class FlowAssignment:
    """Flow values over simple paths in the state-space graph."""

    paths: tuple[tuple[tuple[int, ...], float], ...]

    @staticmethod
    def from_paths(items: Iterable[tuple[Sequence[int], float]]) -> "FlowAssignment":
        return FlowAssignment(tuple((tuple(p), float(v)) for p, v in items))


def flow_congestion(
    space: StateSpace,
    P: np.ndarray,
    flow: FlowAssignment,
    lambda1: float | None = None,
) -> tuple[float, int]:
    """Maximum edge load rho(f) and longest flow-carrying path length.

    Validates that every ordered pair of distinct states receives its
    pi(x)pi(y) demand (uniform stationary distribution; the kernels here
    are symmetric), that paths are simple and follow actual transitions,
    and, when lambda1 is supplied, that the Sinclair bound
    1/(1-lambda1) <= rho * ell holds.
    """
    N = len(space)
    if P.shape != (N, N):
        raise ValueError("matrix does not match the state space")
    pi = 1.0 / N
    demand: dict[tuple[int, int], float] = {}
    edge_flow: dict[tuple[int, int], float] = {}
    ell = 0
    for path, value in flow.paths:
        if value < 0:
            raise InvalidFlow("negative path flow")
        if len(path) < 2:
            raise InvalidFlow("a flow path needs at least two states")
        if len(set(path)) != len(path):
            raise InvalidFlow(f"path revisits a state: {path}")
        for u, v in zip(path, path[1:]):
            if P[u, v] <= 0:
                raise InvalidFlow(f"path uses a non-transition {u}->{v}")
            if value > 0:
                edge_flow[(u, v)] = edge_flow.get((u, v), 0.0) + value
        pair = (path[0], path[-1])
        demand[pair] = demand.get(pair, 0.0) + value
        if value > 0:
            ell = max(ell, len(path) - 1)
    for x in range(N):
        for y in range(N):
            if x == y:
                continue
            got = demand.get((x, y), 0.0)
            if abs(got - pi * pi) > 1e-12:
                raise InvalidFlow(
                    f"pair ({x},{y}) demand {pi * pi} but routed {got}"
                )
    rho = 0.0
    for (u, v), f in edge_flow.items():
        rho = max(rho, f / (pi * P[u, v]))
    if lambda1 is not None and lambda1 < 1:
        if 1.0 / (1.0 - lambda1) > rho * ell * (1 + 1e-9) + 1e-9:
            raise InvalidFlow(
                "Sinclair bound violated: 1/(1-lambda1)="
                f"{1.0 / (1.0 - lambda1):.6g} exceeds rho*ell={rho * ell:.6g}"
            )
    return rho, ell
