"""Interference hypergraph: strong pairwise edges plus weak-accumulative hyperedges.

A strong edge fires when its two endpoints are active on the same channel. A
weak hyperedge fires on a channel when at least activation_threshold of its
active members picked that channel; below the threshold the group produces no
interference at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import networkx as nx
import numpy as np

from .env import NodeGeometry
from .errors import ConfigError


@dataclass(frozen=True)
class InterferenceHypergraph:
    num_users: int
    strong_edges: tuple = ()
    weak_hyperedges: tuple = ()
    activation_threshold: int = 3

    def __post_init__(self) -> None:
        strong = tuple(sorted(tuple(sorted(int(u) for u in e)) for e in self.strong_edges))
        weak = tuple(sorted(tuple(sorted(int(u) for u in h)) for h in self.weak_hyperedges))
        object.__setattr__(self, "strong_edges", strong)
        object.__setattr__(self, "weak_hyperedges", weak)
        if self.num_users < 1:
            raise ConfigError("num_users: must be >= 1")
        if self.activation_threshold < 1:
            raise ConfigError("activation_threshold: must be >= 1")
        for e in strong:
            if len(e) != 2 or e[0] == e[1]:
                raise ConfigError(f"strong edge {e}: must be a pair of distinct users")
            if e[0] < 0 or e[1] >= self.num_users:
                raise ConfigError(f"strong edge {e}: member out of range")
        for h in weak:
            if len(set(h)) != len(h):
                raise ConfigError(f"weak hyperedge {h}: duplicate member")
            if len(h) < max(3, self.activation_threshold):
                raise ConfigError(f"weak hyperedge {h}: size must be >= max(3, threshold)")
            if h[0] < 0 or h[-1] >= self.num_users:
                raise ConfigError(f"weak hyperedge {h}: member out of range")
        if len(set(strong)) != len(strong) or len(set(weak)) != len(weak):
            raise ConfigError("hypergraph: duplicate edges")

    def without_weak_edges(self) -> "InterferenceHypergraph":
        """Plain-graph view: the baseline model that ignores weak accumulation."""
        return InterferenceHypergraph(
            num_users=self.num_users,
            strong_edges=self.strong_edges,
            weak_hyperedges=(),
            activation_threshold=self.activation_threshold,
        )


def build_hypergraph(geometry: NodeGeometry, strong_radius: float, weak_radius: float,
                     activation_threshold: int = 3) -> InterferenceHypergraph:
    """Construct the hypergraph from transmitter proximity.

    Any pair of transmitters within strong_radius gets a strong edge. Each
    maximal group of >= 3 transmitters mutually within weak_radius becomes a
    weak hyperedge, unless the group is already a complete strong clique.
    """
    if not (weak_radius >= strong_radius > 0):
        raise ConfigError("radii: need weak_radius >= strong_radius > 0")
    n = geometry.num_users
    pts = geometry.tx
    strong = set()
    weak_graph = nx.Graph()
    weak_graph.add_nodes_from(range(n))
    for u in range(n):
        for v in range(u + 1, n):
            d = math.dist(pts[u], pts[v])
            if d <= strong_radius:
                strong.add((u, v))
            if d <= weak_radius:
                weak_graph.add_edge(u, v)
    hyper = []
    min_size = max(3, activation_threshold)
    for clique in nx.find_cliques(weak_graph):
        if len(clique) < min_size:
            continue
        members = tuple(sorted(clique))
        all_strong = all(
            (members[i], members[j]) in strong
            for i in range(len(members))
            for j in range(i + 1, len(members))
        )
        if not all_strong:
            hyper.append(members)
    return InterferenceHypergraph(
        num_users=n,
        strong_edges=tuple(sorted(strong)),
        weak_hyperedges=tuple(sorted(hyper)),
        activation_threshold=activation_threshold,
    )


def edge_active(hypergraph: InterferenceHypergraph, edge, choices, active_mask) -> frozenset:
    """Channels on which the given edge or hyperedge is firing (empty = inactive)."""
    edge = tuple(sorted(int(u) for u in edge))
    choices = np.asarray(choices, dtype=np.int64)
    active = np.asarray(active_mask, dtype=bool)
    if len(edge) == 2:
        if edge not in hypergraph.strong_edges:
            raise ConfigError(f"edge {edge}: not in hypergraph")
        u, v = edge
        if active[u] and active[v] and choices[u] == choices[v]:
            return frozenset({int(choices[u])})
        return frozenset()
    if edge not in hypergraph.weak_hyperedges:
        raise ConfigError(f"hyperedge {edge}: not in hypergraph")
    members = [u for u in edge if active[u]]
    if len(members) < hypergraph.activation_threshold:
        return frozenset()
    counts = {}
    for u in members:
        c = int(choices[u])
        counts[c] = counts.get(c, 0) + 1
    return frozenset(c for c, k in counts.items() if k >= hypergraph.activation_threshold)


def total_generalized_interference(hypergraph: InterferenceHypergraph, choices,
                                   active_mask, jammed_channels) -> int:
    """Active strong edges + (hyperedge, channel) activations + jammed active users."""
    choices = np.asarray(choices, dtype=np.int64)
    active = np.asarray(active_mask, dtype=bool)
    total = 0
    for u, v in hypergraph.strong_edges:
        if active[u] and active[v] and choices[u] == choices[v]:
            total += 1
    thr = hypergraph.activation_threshold
    for h in hypergraph.weak_hyperedges:
        counts = {}
        for u in h:
            if active[u]:
                c = int(choices[u])
                counts[c] = counts.get(c, 0) + 1
        total += sum(1 for k in counts.values() if k >= thr)
    if jammed_channels:
        for u in range(hypergraph.num_users):
            if active[u] and int(choices[u]) in jammed_channels:
                total += 1
    return total


def marginal_interference(hypergraph: InterferenceHypergraph, n: int, choices,
                          active_mask, jammed_channels) -> int:
    """How much of the generalized interference disappears if user n leaves.

    Equals total_generalized_interference(a) minus the same total with n made
    inactive, computed incrementally: only terms touching n's channel move.
    """
    choices = np.asarray(choices, dtype=np.int64)
    active = np.asarray(active_mask, dtype=bool)
    if not active[n]:
        return 0
    c = int(choices[n])
    delta = 0
    for u, v in hypergraph.strong_edges:
        if n in (u, v):
            other = v if u == n else u
            if active[other] and int(choices[other]) == c:
                delta += 1
    thr = hypergraph.activation_threshold
    for h in hypergraph.weak_hyperedges:
        if n not in h:
            continue
        count = sum(1 for u in h if active[u] and int(choices[u]) == c)
        # Removing n kills the activation on c only when n was the marginal member.
        if count == thr:
            delta += 1
    if jammed_channels and c in jammed_channels:
        delta += 1
    return delta


def to_edge_list(hypergraph: InterferenceHypergraph) -> str:
    """Plain-text form: `S u v` per strong edge, `W u v w ...` per hyperedge."""
    lines = [f"S {u} {v}" for u, v in hypergraph.strong_edges]
    lines += ["W " + " ".join(str(u) for u in h) for h in hypergraph.weak_hyperedges]
    return "\n".join(lines) + ("\n" if lines else "")


def parse_edge_list(text: str, num_users: int | None = None,
                    activation_threshold: int = 3) -> InterferenceHypergraph:
    """Inverse of to_edge_list; num_users defaults to the largest index + 1."""
    strong, weak = [], []
    seen_max = -1
    for i, raw in enumerate(text.splitlines()):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        tag, members = parts[0], [int(p) for p in parts[1:]]
        seen_max = max(seen_max, *members) if members else seen_max
        if tag == "S" and len(members) == 2:
            strong.append(tuple(members))
        elif tag == "W" and len(members) >= 3:
            weak.append(tuple(members))
        else:
            raise ConfigError(f"edge list line {i + 1}: expected 'S u v' or 'W u v w ...'")
    if num_users is None:
        num_users = seen_max + 1 if seen_max >= 0 else 1
    return InterferenceHypergraph(
        num_users=num_users,
        strong_edges=tuple(strong),
        weak_hyperedges=tuple(weak),
        activation_threshold=activation_threshold,
    )
