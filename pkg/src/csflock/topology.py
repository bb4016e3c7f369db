"""Directed neighbor graphs, rootedness tests, composition and switching signals.

Vertices are the agents ``1..n``.  An arc ``(j, i)`` means that agent ``j``
influences agent ``i`` (information flows ``j -> i``), so the adjacency
matrix has ``chi[i-1, j-1] == 1`` exactly when ``(j, i)`` is an arc.
"""

from __future__ import annotations

from bisect import bisect_right
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Iterator, Mapping, NamedTuple

import numpy as np

from .errors import DimensionError

__all__ = [
    "Digraph",
    "RootInfo",
    "LeadershipInfo",
    "StrongRootInfo",
    "is_rooted",
    "is_rooted_leadership",
    "is_strongly_rooted",
    "compose",
    "compose_arcs",
    "compose_with_self_loops",
    "compose_sequence",
    "reachable_from",
    "all_digraphs",
    "random_rooted_leadership",
    "CyclicSchedule",
    "ExplicitSchedule",
    "SwitchingSignal",
    "constant_signal",
    "signal_at",
    "random_alternating_signal",
    "schedule_indices",
]


@dataclass(frozen=True)
class Digraph:
    """Directed graph on vertices ``1..n`` without self-loops."""

    n: int
    arcs: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"vertex count must be positive, got {self.n}")
        arcs = frozenset((int(j), int(i)) for j, i in self.arcs)
        for j, i in arcs:
            if not (1 <= j <= self.n and 1 <= i <= self.n):
                raise ValueError(f"arc ({j}, {i}) has a vertex outside 1..{self.n}")
            if j == i:
                raise ValueError(f"self-loop ({j}, {i}) is not allowed")
        object.__setattr__(self, "arcs", arcs)

    @classmethod
    def from_adjacency(cls, chi) -> Digraph:
        """Build from an adjacency matrix with ``chi[i, j] != 0`` iff ``j -> i``.

        Diagonal entries are ignored.
        """
        chi = np.asarray(chi)
        n = chi.shape[0]
        arcs = {(j + 1, i + 1) for i, j in zip(*np.nonzero(chi)) if i != j}
        return cls(n, frozenset(arcs))

    @classmethod
    def complete(cls, n: int) -> Digraph:
        return cls(n, frozenset((j, i) for j in range(1, n + 1) for i in range(1, n + 1) if i != j))

    @classmethod
    def empty(cls, n: int) -> Digraph:
        return cls(n, frozenset())

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Boolean matrix ``chi`` with ``chi[i-1, j-1]`` set iff ``(j, i)`` is an arc."""
        chi = np.zeros((self.n, self.n), dtype=bool)
        for j, i in self.arcs:
            chi[i - 1, j - 1] = True
        chi.setflags(write=False)
        return chi

    @cached_property
    def successors(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {v: [] for v in range(1, self.n + 1)}
        for j, i in sorted(self.arcs):
            out[j].append(i)
        return {v: tuple(w) for v, w in out.items()}

    def in_neighbors(self, i: int) -> tuple[int, ...]:
        """Agents that influence ``i``."""
        return tuple(sorted(j for j, k in self.arcs if k == i))

    def __repr__(self) -> str:
        return f"Digraph(n={self.n}, arcs={sorted(self.arcs)})"


def reachable_from(g: Digraph, source: int) -> set[int]:
    """Vertices reachable from ``source`` by a directed path (``source`` included)."""
    seen = {source}
    queue = deque([source])
    succ = g.successors
    while queue:
        u = queue.popleft()
        for w in succ[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


class RootInfo(NamedTuple):
    rooted: bool
    roots: frozenset


class LeadershipInfo(NamedTuple):
    valid: bool
    leader: int | None
    reason: str = ""


class StrongRootInfo(NamedTuple):
    strongly_rooted: bool
    strong_roots: frozenset


def is_rooted(g: Digraph) -> RootInfo:
    """Find every vertex that reaches all other vertices."""
    everyone = set(range(1, g.n + 1))
    roots = frozenset(v for v in everyone if reachable_from(g, v) == everyone)
    return RootInfo(bool(roots), roots)


def is_rooted_leadership(g: Digraph) -> LeadershipInfo:
    """Check for a unique leader: reaches everyone, reached by no one.

    "No incoming path from others" is read as: no other vertex reaches the
    leader by any directed path.  For this property it coincides with "no
    incoming arc", since any path into a vertex ends with an arc into it.
    """
    everyone = set(range(1, g.n + 1))
    reach = {v: reachable_from(g, v) for v in everyone}
    candidates = [
        r
        for r in sorted(everyone)
        if reach[r] == everyone and not any(r in reach[u] for u in everyone if u != r)
    ]
    if len(candidates) == 1:
        return LeadershipInfo(True, candidates[0])
    if not candidates:
        roots = is_rooted(g).roots
        if not roots:
            reason = "no vertex reaches every other vertex"
        else:
            reason = f"every root in {sorted(roots)} is reachable from another vertex"
        return LeadershipInfo(False, None, reason)
    return LeadershipInfo(False, None, f"leader is not unique: candidates {candidates}")


def is_strongly_rooted(g: Digraph) -> StrongRootInfo:
    """Find vertices with a direct arc to every other vertex."""
    chi = g.adjacency
    off = ~np.eye(g.n, dtype=bool)
    # column j of chi lists who j influences
    strong = frozenset(int(j) + 1 for j in range(g.n) if np.all(chi[:, j] | ~off[:, j]))
    return StrongRootInfo(bool(strong), strong)


def _check_same_n(gq: Digraph, gp: Digraph) -> None:
    if gq.n != gp.n:
        raise DimensionError(f"cannot compose digraphs on {gq.n} and {gp.n} vertices")


def compose_arcs(q_arcs, p_arcs) -> frozenset:
    """Relational composition of arc sets, keeping pairs ``(i, i)``.

    ``(i, j)`` is included whenever ``(i, k)`` is in ``p_arcs`` and ``(k, j)``
    in ``q_arcs`` for some ``k``.  Unlike :func:`compose` this is associative.
    """
    by_tail: dict[int, list[int]] = {}
    for k, j in q_arcs:
        by_tail.setdefault(k, []).append(j)
    return frozenset((i, j) for i, k in p_arcs for j in by_tail.get(k, ()))


def compose(gq: Digraph, gp: Digraph) -> Digraph:
    """Composition ``gq o gp``: ``(i, j)`` whenever ``(i, k)`` is in ``gp`` and ``(k, j)`` in ``gq``.

    Pairs ``(i, i)`` produced by the rule are dropped, so a digraph comes
    back; that makes iterated composition depend on the bracketing.
    """
    _check_same_n(gq, gp)
    arcs = compose_arcs(gq.arcs, gp.arcs)
    return Digraph(gq.n, frozenset((i, j) for i, j in arcs if i != j))


def compose_with_self_loops(gq: Digraph, gp: Digraph) -> Digraph:
    """Composition after giving every vertex a self-loop in both factors.

    This is the support of ``F_q @ F_p`` for flocking matrices, whose
    diagonals are positive.  Self-loops are removed from the result.
    """
    _check_same_n(gq, gp)
    eye = np.eye(gq.n, dtype=np.int64)
    aq = gq.adjacency.astype(np.int64) + eye
    ap = gp.adjacency.astype(np.int64) + eye
    return Digraph.from_adjacency((aq @ ap) > 0)


def all_digraphs(n: int) -> Iterator[Digraph]:
    """Every digraph on ``n`` vertices (``2**(n*(n-1))`` of them)."""
    pairs = [(j, i) for j in range(1, n + 1) for i in range(1, n + 1) if i != j]
    for mask in range(1 << len(pairs)):
        yield Digraph(n, frozenset(p for b, p in enumerate(pairs) if mask >> b & 1))


def random_rooted_leadership(
    n: int, leader: int, rng: np.random.Generator, extra_arc_prob: float = 0.3
) -> Digraph:
    """Random digraph with rooted leadership at ``leader``.

    A random spanning tree out of ``leader`` guarantees reachability; extra
    arcs are added among the followers and out of the leader, never into it.
    """
    if not 1 <= leader <= n:
        raise ValueError(f"leader {leader} outside 1..{n}")
    followers = [v for v in range(1, n + 1) if v != leader]
    order = list(rng.permutation(followers))
    attached = [leader]
    arcs = set()
    for v in order:
        parent = attached[int(rng.integers(len(attached)))]
        arcs.add((int(parent), int(v)))
        attached.append(int(v))
    for j in range(1, n + 1):
        for i in followers:
            if i != j and rng.random() < extra_arc_prob:
                arcs.add((j, i))
    return Digraph(n, frozenset(arcs))


@dataclass(frozen=True)
class CyclicSchedule:
    """Visit ``order`` cyclically, holding each index for ``dwell`` steps."""

    order: tuple
    dwell: int = 1

    def __post_init__(self):
        if not self.order:
            raise ValueError("cyclic schedule needs at least one graph index")
        if int(self.dwell) < 1:
            raise ValueError(f"dwell must be at least one step, got {self.dwell}")
        object.__setattr__(self, "order", tuple(self.order))

    def __call__(self, t: int) -> Hashable:
        return self.order[(t // self.dwell) % len(self.order)]

    def indices(self) -> tuple:
        return self.order


@dataclass(frozen=True)
class ExplicitSchedule:
    """Piecewise-constant schedule: ``changes`` are ``(start_time, index)`` pairs.

    The last index is held forever.  The first change must start at 0.
    """

    changes: tuple
    _starts: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        changes = tuple(sorted((int(t), g) for t, g in self.changes))
        if not changes or changes[0][0] != 0:
            raise ValueError("explicit schedule must assign a graph at t = 0")
        times = [t for t, _ in changes]
        if len(set(times)) != len(times):
            raise ValueError("explicit schedule assigns two graphs to one time")
        object.__setattr__(self, "changes", changes)
        object.__setattr__(self, "_starts", tuple(times))

    def __call__(self, t: int) -> Hashable:
        return self.changes[bisect_right(self._starts, t) - 1][1]

    def indices(self) -> tuple:
        return tuple(g for _, g in self.changes)


@dataclass(frozen=True)
class SwitchingSignal:
    """A family of admissible digraphs and a schedule choosing one per step."""

    graphs: Mapping
    schedule: CyclicSchedule | ExplicitSchedule

    def __post_init__(self):
        if not self.graphs:
            raise ValueError("switching signal needs at least one graph")
        sizes = {g.n for g in self.graphs.values()}
        if len(sizes) != 1:
            raise DimensionError(f"graphs disagree on vertex count: {sorted(sizes)}")
        missing = [k for k in self.schedule.indices() if k not in self.graphs]
        if missing:
            raise KeyError(f"schedule refers to unknown graphs {missing}")
        object.__setattr__(self, "graphs", dict(self.graphs))

    @property
    def n(self) -> int:
        return next(iter(self.graphs.values())).n

    def index_at(self, t: int) -> Hashable:
        if t < 0:
            raise ValueError(f"time must be nonnegative, got {t}")
        return self.schedule(t)

    def __call__(self, t: int) -> Digraph:
        return self.graphs[self.index_at(t)]

    def used_graphs(self) -> dict:
        """The graphs the schedule can actually select."""
        return {k: self.graphs[k] for k in dict.fromkeys(self.schedule.indices())}


def constant_signal(g: Digraph, key: Hashable = 1) -> SwitchingSignal:
    return SwitchingSignal({key: g}, CyclicSchedule((key,), 1))


def signal_at(sig: SwitchingSignal, t: int) -> Digraph:
    """The digraph active at step ``t``."""
    return sig(t)


def compose_sequence(graphs: Iterable[Digraph], self_loops: bool = True) -> Digraph:
    """Left fold ``g_m o ... o g_2 o g_1`` of graphs listed in time order."""
    graphs = list(graphs)
    op = compose_with_self_loops if self_loops else compose
    acc = graphs[0]
    for g in graphs[1:]:
        acc = op(g, acc)
    return acc



def random_alternating_signal(
    n: int,
    steps: int,
    rng: np.random.Generator,
    n_graphs: int | None = None,
    max_dwell: int = 5,
    extra_arc_prob: float = 0.3,
) -> SwitchingSignal:
    """Random rooted-leadership signal whose leader changes over time.

    Builds ``n_graphs`` (default ``n``) random rooted-leadership graphs whose
    leaders cycle through a random permutation of the agents, then switches
    among them at random with dwell times drawn from ``1..max_dwell``.
    """
    if n < 2:
        raise ValueError("alternating leaders need at least two agents")
    n_graphs = n if n_graphs is None else n_graphs
    leaders = rng.permutation(np.arange(1, n + 1))
    graphs = {
        k: random_rooted_leadership(n, int(leaders[k % n]), rng, extra_arc_prob)
        for k in range(n_graphs)
    }
    changes = []
    t = 0
    prev = None
    while t <= steps:
        k = int(rng.integers(n_graphs))
        if n_graphs > 1:
            while k == prev:
                k = int(rng.integers(n_graphs))
        changes.append((t, k))
        prev = k
        t += int(rng.integers(1, max_dwell + 1))
    return SwitchingSignal(graphs, ExplicitSchedule(tuple(changes)))


def schedule_indices(signal: SwitchingSignal, steps: int, keys: list | None = None):
    """Positions in ``keys`` of the graph active at ``t = 0..steps-1``, plus the adjacency stack.

    ``keys`` defaults to the signal's graph keys in insertion order.
    """
    keys = list(signal.graphs) if keys is None else list(keys)
    pos = {k: i for i, k in enumerate(keys)}
    idx = np.array([pos[signal.index_at(t)] for t in range(steps)], dtype=np.intp)
    chi = np.stack([signal.graphs[k].adjacency for k in keys])
    return idx, chi
