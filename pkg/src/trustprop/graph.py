"""Directed communication networks with legitimate and malicious agents.

Nodes are dense integer ids ``0..n-1``. An edge ``(i, j)`` means agent ``i``
can send to ``j``; communication graphs carry a self-loop on every node.
Support digraphs of matrices (see :mod:`trustprop.analysis`) reuse
:class:`DirectedGraph` without the forced self-loops.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .errors import (
    GraphGenerationError,
    InvalidGraphSizeError,
    TrustpropError,
    UndefinedDiameterError,
)

ER_RETRY_LIMIT = 1000


class DirectedGraph:
    """Adjacency-matrix backed directed graph over node ids ``0..n-1``."""

    def __init__(
        self,
        node_count: int,
        edges: Iterable[tuple[int, int]] = (),
        *,
        ensure_self_loops: bool = True,
    ):
        if node_count < 0:
            raise InvalidGraphSizeError("node_count must be non-negative")
        adj = np.zeros((node_count, node_count), dtype=bool)
        for i, j in edges:
            if not (0 <= i < node_count and 0 <= j < node_count):
                raise TrustpropError(f"edge ({i}, {j}) out of range for n={node_count}")
            adj[i, j] = True
        if ensure_self_loops and node_count:
            np.fill_diagonal(adj, True)
        self._adj = adj

    @classmethod
    def from_adjacency(cls, adj: np.ndarray, *, ensure_self_loops: bool = True) -> "DirectedGraph":
        g = cls.__new__(cls)
        mat = np.asarray(adj, dtype=bool).copy()
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise TrustpropError("adjacency must be a square matrix")
        if ensure_self_loops and mat.shape[0]:
            np.fill_diagonal(mat, True)
        g._adj = mat
        return g

    @property
    def n(self) -> int:
        return self._adj.shape[0]

    @property
    def adjacency(self) -> np.ndarray:
        """Boolean adjacency matrix; treat as read-only."""
        return self._adj

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self._adj[i, j])

    def edges(self) -> Iterator[tuple[int, int]]:
        for i, j in zip(*np.nonzero(self._adj)):
            yield int(i), int(j)

    @property
    def edge_count(self) -> int:
        return int(self._adj.sum())

    def in_neighbors(self, i: int) -> np.ndarray:
        return np.flatnonzero(self._adj[:, i])

    def out_neighbors(self, i: int) -> np.ndarray:
        return np.flatnonzero(self._adj[i, :])

    def in_degree(self, i: int) -> int:
        return int(self._adj[:, i].sum())

    def out_degree(self, i: int) -> int:
        return int(self._adj[i, :].sum())

    def induced_subgraph(self, nodes: Sequence[int]) -> "DirectedGraph":
        """Subgraph on ``nodes``; new ids follow the order given."""
        idx = np.asarray(list(nodes), dtype=int)
        return DirectedGraph.from_adjacency(
            self._adj[np.ix_(idx, idx)], ensure_self_loops=False
        )

    def transpose(self) -> "DirectedGraph":
        return DirectedGraph.from_adjacency(self._adj.T, ensure_self_loops=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DirectedGraph):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self._adj, other._adj))

    def __repr__(self) -> str:
        return f"DirectedGraph(n={self.n}, edges={self.edge_count})"


@dataclass(frozen=True)
class NetworkInstance:
    """A communication graph together with the legitimate/malicious partition."""

    graph: DirectedGraph
    is_malicious: np.ndarray  # bool, length n

    def __post_init__(self):
        roles = np.asarray(self.is_malicious, dtype=bool)
        if roles.shape != (self.graph.n,):
            raise TrustpropError("role vector length must equal node count")
        if roles.all() and self.graph.n:
            raise TrustpropError("malicious agents must be a strict subset of the nodes")
        object.__setattr__(self, "is_malicious", roles)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def legitimate(self) -> np.ndarray:
        return np.flatnonzero(~self.is_malicious)

    @property
    def malicious(self) -> np.ndarray:
        return np.flatnonzero(self.is_malicious)

    @property
    def n_legit(self) -> int:
        return int((~self.is_malicious).sum())

    @property
    def n_malicious(self) -> int:
        return int(self.is_malicious.sum())

    def legit_subgraph(self) -> DirectedGraph:
        return self.graph.induced_subgraph(self.legitimate)


@dataclass(frozen=True)
class AssumptionReport:
    """Result of checking the connectivity and observation assumptions."""

    legit_subgraph_strongly_connected: bool
    every_malicious_observed: bool
    violating_malicious_nodes: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return self.legit_subgraph_strongly_connected and self.every_malicious_observed


@dataclass(frozen=True)
class TargetPartition:
    """Legitimate observers (d_q) and non-observers (c_q) of a target agent."""

    q: int
    d_q: tuple[int, ...]
    c_q: tuple[int, ...]

    @property
    def u_q(self) -> int:
        return len(self.c_q)


def build_cyclic_legit(n: int) -> DirectedGraph:
    """Directed cycle 0 -> 1 -> ... -> n-1 -> 0 with self-loops."""
    if n < 2:
        raise InvalidGraphSizeError("cyclic graph needs at least 2 nodes")
    edges = [(i, (i + 1) % n) for i in range(n)]
    return DirectedGraph(n, edges)


def default_er_edge_prob(n: int) -> float:
    """Edge probability 2*ln(n)/n used for the random legitimate graphs."""
    return 2.0 * math.log(n) / n


def build_erdos_renyi_legit(
    n: int,
    p: float,
    rng: np.random.Generator,
    *,
    max_attempts: int = ER_RETRY_LIMIT,
) -> DirectedGraph:
    """Directed G(n, p) with self-loops, redrawn until strongly connected."""
    if n < 2:
        raise InvalidGraphSizeError("random graph needs at least 2 nodes")
    if not 0.0 < p <= 1.0:
        raise TrustpropError(f"edge probability must be in (0, 1], got {p}")
    for _ in range(max_attempts):
        adj = rng.random((n, n)) < p
        np.fill_diagonal(adj, True)
        g = DirectedGraph.from_adjacency(adj)
        if is_strongly_connected(g):
            return g
    raise GraphGenerationError(max_attempts)


def attach_malicious(
    legit: DirectedGraph,
    m: int,
    edge_prob: float,
    rng: np.random.Generator,
) -> NetworkInstance:
    """Add ``m`` malicious nodes, wiring each direction independently.

    Every directed edge between a malicious node and any other node is drawn
    with probability ``edge_prob``. Out-edges of a malicious node towards the
    legitimate set are redrawn until at least one is present, so every
    malicious agent is observed by some legitimate agent.
    """
    if m < 0:
        raise TrustpropError("m must be non-negative")
    if m and not 0.0 < edge_prob <= 1.0:
        raise TrustpropError(f"edge probability must be in (0, 1], got {edge_prob}")
    n = legit.n
    total = n + m
    adj = np.zeros((total, total), dtype=bool)
    adj[:n, :n] = legit.adjacency
    if m:
        out_draws = rng.random((m, total)) < edge_prob  # row b: edges (n+b) -> *
        in_draws = rng.random((n, m)) < edge_prob  # edges legit -> malicious
        adj[n:, :] = out_draws
        adj[:n, n:] = in_draws
        for b in range(n, total):
            while not adj[b, :n].any():
                adj[b, :n] = rng.random(n) < edge_prob
    np.fill_diagonal(adj, True)
    roles = np.zeros(total, dtype=bool)
    roles[n:] = True
    return NetworkInstance(DirectedGraph.from_adjacency(adj), roles)


def all_legit_instance(graph: DirectedGraph) -> NetworkInstance:
    """Wrap a plain graph as an instance with no malicious agents."""
    return NetworkInstance(graph, np.zeros(graph.n, dtype=bool))


def is_strongly_connected(g: DirectedGraph) -> bool:
    if g.n == 0:
        return False
    n_comp, _ = connected_components(
        csr_matrix(g.adjacency), directed=True, connection="strong"
    )
    return n_comp == 1


def verify_assumptions(inst: NetworkInstance) -> AssumptionReport:
    """Check legit-subgraph strong connectivity and malicious observability."""
    legit_ok = is_strongly_connected(inst.legit_subgraph())
    legit_mask = ~inst.is_malicious
    violating = [
        int(j)
        for j in inst.malicious
        if not (inst.graph.adjacency[j, :] & legit_mask).any()
    ]
    return AssumptionReport(
        legit_subgraph_strongly_connected=legit_ok,
        every_malicious_observed=not violating,
        violating_malicious_nodes=tuple(violating),
    )


def target_partition(inst: NetworkInstance, q: int) -> TargetPartition:
    """Split the legitimate agents into observers and non-observers of ``q``."""
    if not 0 <= q < inst.n:
        raise TrustpropError(f"target {q} out of range")
    legit_mask = ~inst.is_malicious
    observers = inst.graph.adjacency[q, :] & legit_mask
    d_q = tuple(int(i) for i in np.flatnonzero(observers))
    c_q = tuple(int(i) for i in np.flatnonzero(legit_mask & ~observers))
    return TargetPartition(q=q, d_q=d_q, c_q=c_q)


def diameter(g: DirectedGraph) -> int:
    """Longest shortest directed path length; graph must be strongly connected."""
    if g.n == 0:
        raise UndefinedDiameterError("empty graph")
    dist = shortest_path(csr_matrix(g.adjacency), method="D", unweighted=True)
    if np.isinf(dist).any():
        raise UndefinedDiameterError("graph is not strongly connected")
    return int(dist.max())


def max_in_degree(inst: NetworkInstance, subset: Sequence[int] | None = None) -> int:
    """Maximum in-degree (self-loop included) over ``subset``, default legit agents."""
    nodes = inst.legitimate if subset is None else np.asarray(list(subset), dtype=int)
    if len(nodes) == 0:
        raise TrustpropError("max_in_degree over empty node set")
    return int(inst.graph.adjacency[:, nodes].sum(axis=0).max())


def write_edge_list(inst: NetworkInstance, path) -> None:
    """Dump an instance as `#role i legit|malicious` headers plus `i j` lines."""

    def _write(fh: io.TextIOBase) -> None:
        for i in range(inst.n):
            role = "malicious" if inst.is_malicious[i] else "legit"
            fh.write(f"#role {i} {role}\n")
        for i, j in inst.graph.edges():
            fh.write(f"{i} {j}\n")

    if hasattr(path, "write"):
        _write(path)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            _write(fh)


def read_edge_list(path) -> NetworkInstance:
    """Parse the edge-list format produced by :func:`write_edge_list`."""
    roles: dict[int, bool] = {}
    edges: list[tuple[int, int]] = []
    if hasattr(path, "read"):
        lines = path.read().splitlines()
    else:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#role"):
            parts = line.split()
            if len(parts) != 3 or parts[2] not in ("legit", "malicious"):
                raise TrustpropError(f"bad role line {lineno}: {raw!r}")
            roles[int(parts[1])] = parts[2] == "malicious"
        elif line.startswith("#"):
            continue
        else:
            parts = line.split()
            if len(parts) != 2:
                raise TrustpropError(f"bad edge line {lineno}: {raw!r}")
            edges.append((int(parts[0]), int(parts[1])))
    if not roles:
        raise TrustpropError("edge list carries no #role lines")
    n = max(roles) + 1
    if sorted(roles) != list(range(n)):
        raise TrustpropError("role lines must cover dense ids 0..n-1")
    is_malicious = np.array([roles[i] for i in range(n)], dtype=bool)
    return NetworkInstance(DirectedGraph(n, edges), is_malicious)
