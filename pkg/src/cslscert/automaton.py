"""Labeled directed graphs that constrain switching sequences.

An :class:`Automaton` is a strongly connected directed graph whose edges
carry mode labels from ``1..m``.  Paths spell the admissible switching
sequences of a constrained switching system.  The module also enumerates
cycles (closed edge walks up to rotation) for brute-force spectral-radius
lower bounds, and samples edges uniformly for the observation oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

Edge = tuple[str, str, int]


@dataclass(frozen=True)
class Automaton:
    """Strongly connected labeled directed graph G(V, E).

    Parameters
    ----------
    nodes : ordered node identifiers (order fixes the dense indexing
        0..|V|-1 used everywhere downstream, e.g. for per-node matrices).
    edges : (source, target, label) triples; labels range over 1..m.
    label_count : number of labels m.

    Construction does not validate; call :func:`validate` for a report.
    """

    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    label_count: int
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(self.nodes)})

    def __init__(self, nodes: Iterable[str], edges: Iterable[Sequence], label_count: int):
        object.__setattr__(self, "nodes", tuple(str(v) for v in nodes))
        object.__setattr__(
            self, "edges", tuple((str(u), str(v), int(l)) for (u, v, l) in edges)
        )
        object.__setattr__(self, "label_count", int(label_count))
        self.__post_init__()

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def node_index(self, name: str) -> int:
        return self._index[name]

    def edges_indexed(self) -> np.ndarray:
        """Edges as an (|E|, 3) int array of (source idx, target idx, label)."""
        out = np.empty((len(self.edges), 3), dtype=np.int64)
        for k, (u, v, l) in enumerate(self.edges):
            out[k, 0] = self._index[u]
            out[k, 1] = self._index[v]
            out[k, 2] = l
        return out


@dataclass(frozen=True)
class Cycle:
    """A closed edge walk: consecutive edges chain and the walk returns
    to its starting node.  Stored in canonical rotation (lexicographically
    smallest over index triples)."""

    edges: tuple[Edge, ...]

    @property
    def length(self) -> int:
        return len(self.edges)

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(l for (_, _, l) in self.edges)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    problems: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


def validate(automaton: Automaton) -> ValidationReport:
    """Check every structural invariant; returns a report, never raises."""
    problems: list[str] = []
    nodes = automaton.nodes
    m = automaton.label_count

    if not nodes:
        problems.append("node set is empty")
    if len(set(nodes)) != len(nodes):
        problems.append("duplicate node identifiers")
    if m < 1:
        problems.append(f"label count must be >= 1, got {m}")

    known = set(nodes)
    seen_triples = set()
    used_labels = set()
    for (u, v, l) in automaton.edges:
        if u not in known:
            problems.append(f"edge ({u}, {v}, {l}): unknown source node {u!r}")
        if v not in known:
            problems.append(f"edge ({u}, {v}, {l}): unknown target node {v!r}")
        if not (1 <= l <= m):
            problems.append(f"edge ({u}, {v}, {l}): label {l} outside 1..{m}")
        if (u, v, l) in seen_triples:
            problems.append(f"duplicate edge ({u}, {v}, {l})")
        seen_triples.add((u, v, l))
        used_labels.add(l)

    missing = sorted(set(range(1, m + 1)) - used_labels)
    if missing:
        problems.append(f"labels never used on any edge: {missing}")

    if not problems and nodes:
        # Strong connectivity: forward and reverse reachability from node 0.
        fwd: dict[str, set[str]] = {v: set() for v in nodes}
        rev: dict[str, set[str]] = {v: set() for v in nodes}
        for (u, v, _) in automaton.edges:
            fwd[u].add(v)
            rev[v].add(u)

        def reach(adj, start):
            seen = {start}
            stack = [start]
            while stack:
                cur = stack.pop()
                for nxt in adj[cur]:
                    if nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)
            return seen

        start = nodes[0]
        unreachable = set(nodes) - reach(fwd, start)
        if unreachable:
            problems.append(
                f"not strongly connected: {sorted(unreachable)} unreachable from {start!r}"
            )
        cannot_return = set(nodes) - reach(rev, start)
        if cannot_return:
            problems.append(
                f"not strongly connected: no path from {sorted(cannot_return)} back to {start!r}"
            )

    return ValidationReport(not problems, tuple(problems))


def accepts_word(automaton: Automaton, labels: Sequence[int]) -> bool:
    """True iff some path in the graph carries the given label sequence.

    The start node is unconstrained; the empty sequence is accepted.
    """
    m = automaton.label_count
    for l in labels:
        if not (1 <= int(l) <= m):
            raise ValueError(f"label {l} outside 1..{m}")
    current = set(automaton.nodes)
    for l in labels:
        l = int(l)
        nxt = {v for (u, v, el) in automaton.edges if el == l and u in current}
        if not nxt:
            return False
        current = nxt
    return True


def sample_edge(automaton: Automaton, rng: np.random.Generator) -> Edge:
    """One edge drawn uniformly from E."""
    k = int(rng.integers(0, len(automaton.edges)))
    return automaton.edges[k]


def _canonical_rotation(seq: tuple) -> tuple:
    return min(tuple(seq[k:] + seq[:k]) for k in range(len(seq)))


def _is_primitive(canon: tuple) -> bool:
    L = len(canon)
    for d in range(1, L):
        if L % d == 0 and canon == _canonical_rotation(canon[:d] * (L // d)):
            return False
    return True


def enumerate_cycles(automaton: Automaton, max_length: int) -> list[Cycle]:
    """All distinct closed edge walks of length <= max_length, up to rotation.

    A cycle here is a closed walk: nodes may repeat along the way.  Each
    rotation class is reported once, in canonical (lexicographically
    smallest) rotation; repetitions of shorter cycles are excluded.  The
    result is sorted by (length, canonical form) for deterministic output.

    The walk count grows roughly like r**max_length with r the spectral
    radius of the adjacency structure; intended for short bounds on small
    graphs.
    """
    if max_length < 1:
        raise ValueError(f"max_length must be >= 1, got {max_length}")
    idx = {v: i for i, v in enumerate(automaton.nodes)}
    out_adj: dict[str, list[tuple]] = {v: [] for v in automaton.nodes}
    for (u, v, l) in automaton.edges:
        out_adj[u].append((v, (idx[u], idx[v], l), (u, v, l)))
    for v in out_adj:
        out_adj[v].sort(key=lambda t: t[1])

    found: dict[tuple, tuple] = {}  # canonical index seq -> edge seq in that rotation

    def dfs(start: str, cur: str, ipath: list, epath: list):
        if epath and cur == start:
            canon = _canonical_rotation(tuple(ipath))
            if canon not in found and _is_primitive(canon):
                # Store edges rotated to match the canonical index sequence.
                rots = [tuple(ipath[k:] + ipath[:k]) for k in range(len(ipath))]
                shift = rots.index(canon)
                found[canon] = tuple(epath[shift:] + epath[:shift])
        if len(epath) < max_length:
            for (nxt, itrip, etrip) in out_adj[cur]:
                ipath.append(itrip)
                epath.append(etrip)
                dfs(start, nxt, ipath, epath)
                ipath.pop()
                epath.pop()

    for s in automaton.nodes:
        dfs(s, s, [], [])

    keys = sorted(found.keys(), key=lambda c: (len(c), c))
    return [Cycle(found[c]) for c in keys]
