"""Matrix-theoretic toolkit for the opinion dynamics.

For a fixed target agent ``q``, the non-observing legitimate agents evolve
their opinions about ``q`` linearly: ``o_C(t) = W_C o_C(t-1) + W_D o_D(t-1)
+ W_M o_M(t-1)``. Once every agent has learned its in-neighbors, ``W_M``
vanishes and ``W_C`` becomes a fixed substochastic matrix whose powers decay
to zero exactly when it is weakly chained, i.e. when every fully-stochastic
row has a support path to a deficient row. This module builds those
matrices, computes the index of contraction with an explicit witness path or
unreachability certificate, runs convergence/absorption oracles against the
closed form, and evaluates the probability tail bounds on the learning
times.

Path lengths in the index of contraction are counted as the number of nodes
on the witness path (so a chain ``4 -> 3 -> 2 -> 1`` ending in a deficient
row has index 4, and ``len(witness_path)`` always equals the index).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import (
    BoundUndefinedError,
    DegenerateMarginError,
    NotSubstochasticError,
    TrustpropError,
    UndefinedDiameterError,
)
from .graph import (
    DirectedGraph,
    NetworkInstance,
    diameter,
    max_in_degree,
    target_partition,
)
from .observation import TrustObservationModel, margins

ROW_SUM_TOL = 1e-12


def assert_substochastic(w: np.ndarray, tol: float = ROW_SUM_TOL) -> np.ndarray:
    """Validate non-negativity and row sums <= 1; returns the array."""
    w = np.asarray(w, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise NotSubstochasticError("matrix must be square")
    if w.size and (w < 0).any():
        raise NotSubstochasticError("matrix has a negative entry")
    if w.size and (w.sum(axis=1) > 1.0 + tol).any():
        raise NotSubstochasticError("matrix has a row summing above one")
    return w


def deficient_rows(w: np.ndarray, tol: float = ROW_SUM_TOL) -> np.ndarray:
    """Boolean mask of rows whose entries sum to strictly less than one."""
    return np.asarray(w, dtype=float).sum(axis=1) < 1.0 - tol


def digraph_of(w: np.ndarray) -> DirectedGraph:
    """Support digraph: edge (i, j) exactly where the entry is positive."""
    w = np.asarray(w, dtype=float)
    if (w < 0).any():
        raise NotSubstochasticError("support digraph requires a non-negative matrix")
    return DirectedGraph.from_adjacency(w > 0.0, ensure_self_loops=False)


@dataclass(frozen=True)
class ContractionResult:
    """Index of contraction plus its witness.

    ``witness_path`` lists the nodes of a shortest support path from the
    maximizing non-deficient row to a deficient row; ``unreachable_row``
    certifies an infinite index instead.
    """

    value: float
    j_hat: frozenset[int]
    witness_path: tuple[int, ...] | None = None
    unreachable_row: int | None = None

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)


def index_of_contraction(w: np.ndarray, tol: float = ROW_SUM_TOL) -> ContractionResult:
    """Index of contraction of a substochastic matrix.

    Runs a multi-source BFS from the deficient rows over the reversed
    support digraph; the index is the node count of the longest among the
    shortest paths from a non-deficient row into the deficient set. Zero
    when every row is deficient (or the matrix is empty), infinite when some
    non-deficient row cannot reach a deficient one.
    """
    w = assert_substochastic(w, tol)
    n = w.shape[0]
    j_mask = deficient_rows(w, tol)
    j_hat = frozenset(int(i) for i in np.flatnonzero(j_mask))
    if n == 0 or j_mask.all():
        return ContractionResult(value=0, j_hat=j_hat)

    support = w > 0.0
    dist = np.full(n, -1, dtype=int)
    parent = np.full(n, -1, dtype=int)
    queue: deque[int] = deque()
    for j in np.flatnonzero(j_mask):
        dist[j] = 0
        queue.append(int(j))
    while queue:
        u = queue.popleft()
        for i in np.flatnonzero(support[:, u]):
            if dist[i] < 0:
                dist[i] = dist[u] + 1
                parent[i] = u
                queue.append(int(i))

    outside = np.flatnonzero(~j_mask)
    unreachable = outside[dist[outside] < 0]
    if len(unreachable):
        return ContractionResult(
            value=math.inf, j_hat=j_hat, unreachable_row=int(unreachable[0])
        )
    start = int(outside[np.argmax(dist[outside])])
    path = [start]
    while parent[path[-1]] >= 0:
        path.append(int(parent[path[-1]]))
    return ContractionResult(value=len(path), j_hat=j_hat, witness_path=tuple(path))


def is_weakly_chained(w: np.ndarray, tol: float = ROW_SUM_TOL) -> bool:
    """True exactly when the index of contraction is finite."""
    return index_of_contraction(w, tol).is_finite


def convergence_oracle(
    w: np.ndarray, t_max: int = 500, tol: float = 1e-6
) -> tuple[bool, np.ndarray]:
    """Track the infinity norm of successive powers up to ``t_max``.

    Returns whether the norm dropped below ``tol`` and the norm sequence up
    to (and including) the first sub-tolerance power.
    """
    w = np.asarray(w, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise TrustpropError("convergence oracle needs a square matrix")
    if w.shape[0] == 0:
        return True, np.empty(0)
    power = w.copy()
    norms = []
    for _ in range(t_max):
        norms.append(float(np.abs(power).sum(axis=1).max()))
        if norms[-1] < tol:
            return True, np.asarray(norms)
        power = power @ w
    return False, np.asarray(norms)


# ---------------------------------------------------------------------------
# Partitioned update matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PartitionedUpdate:
    """Update matrices for one target, columns ordered [C_q | D_q | M]."""

    q: int
    c_q: tuple[int, ...]
    d_q: tuple[int, ...]
    malicious: tuple[int, ...]
    w_c: np.ndarray
    w_d: np.ndarray
    w_m: np.ndarray

    @property
    def u_q(self) -> int:
        return len(self.c_q)

    @property
    def ordering(self) -> tuple[int, ...]:
        return self.c_q + self.d_q + self.malicious


def legit_trusted_sets(inst: NetworkInstance) -> dict[int, frozenset[int]]:
    """Trusted sets once learning has settled: legitimate in-neighbors only."""
    legit_mask = ~inst.is_malicious
    return {
        int(i): frozenset(
            int(j) for j in inst.graph.in_neighbors(i) if legit_mask[j]
        )
        for i in inst.legitimate
    }


def build_partitioned_update(
    inst: NetworkInstance,
    q: int,
    trusted_sets: Mapping[int, frozenset[int]],
) -> PartitionedUpdate:
    """Assemble [W_C | W_D | W_M] for target ``q`` from per-agent trusted sets."""
    part = target_partition(inst, q)
    c_q, d_q = part.c_q, part.d_q
    mal = tuple(int(j) for j in inst.malicious)
    col_of = {node: k for k, node in enumerate(c_q + d_q + mal)}
    u = len(c_q)
    w = np.zeros((u, inst.n), dtype=float)
    for row, i in enumerate(c_q):
        tset = trusted_sets[i]
        if i not in tset:
            raise TrustpropError(f"trusted set of agent {i} must contain itself")
        weight = 1.0 / len(tset)
        for j in tset:
            w[row, col_of[j]] = weight
    n_d = len(d_q)
    return PartitionedUpdate(
        q=q,
        c_q=c_q,
        d_q=d_q,
        malicious=mal,
        w_c=w[:, :u],
        w_d=w[:, u : u + n_d],
        w_m=w[:, u + n_d :],
    )


def replay_error(w_c: np.ndarray, delta_at_tf: np.ndarray, steps: int) -> np.ndarray:
    """Propagate an error vector ``steps`` rounds through the settled dynamics."""
    if steps < 0:
        raise TrustpropError("steps must be non-negative")
    v = np.array(delta_at_tf, dtype=float)
    for _ in range(steps):
        v = w_c @ v
    return v


# ---------------------------------------------------------------------------
# Absorbing-chain bound
# ---------------------------------------------------------------------------

def _half_life_factor(x: float) -> float:
    """1 / log2(1 / (1 - x)) for x in (0, 1), stable for tiny x."""
    if not 0.0 < x < 1.0:
        raise BoundUndefinedError(f"contraction probability {x} outside (0, 1)")
    return math.log(2.0) / (-math.log1p(-x))


def absorption_bound(
    w_c: np.ndarray, deg_max: int, con: float
) -> tuple[float, int]:
    """Rounds guaranteeing the settled error norm drops below one half.

    Embeds the update matrix as the transient block of an absorbing chain
    ``Q = [[W_C, v], [0, 1]]`` (``v`` holds the row deficiencies), checks
    numerically that the norm of each power is one minus the worst-case
    absorption probability, and returns ``(h_q, rounds)`` with ``rounds``
    the smallest integer strictly above ``h_q * (con + 1)``.
    """
    w_c = assert_substochastic(w_c)
    if not math.isfinite(con):
        raise BoundUndefinedError("infinite contraction index has no absorption bound")
    if deg_max < 1:
        raise BoundUndefinedError("deg_max must be at least 1")
    x = (1.0 / deg_max) ** (con + 1)
    h_q = _half_life_factor(x)
    rounds = math.floor(h_q * (con + 1)) + 1

    u = w_c.shape[0]
    if u:
        # the identity holds at every power; check a cheap one since
        # `rounds` can be huge when the contraction probability is tiny
        check_t = min(rounds, u + 2)
        v = 1.0 - w_c.sum(axis=1)
        power = np.eye(u)
        absorbed = np.zeros(u)
        for _ in range(check_t):
            absorbed += power @ v
            power = power @ w_c
        norm = float(np.abs(power).sum(axis=1).max())
        if not math.isclose(norm, 1.0 - float(absorbed.min()), abs_tol=1e-9):
            raise TrustpropError(
                "norm of settled-update power disagrees with absorption probability"
            )
    return h_q, rounds


# ---------------------------------------------------------------------------
# Finite-time probability bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteTimeBounds:
    """Degree totals, margins and constants feeding the tail bounds."""

    d_l: int
    d_m: int
    e_l: float
    e_m: float
    deg_max: int
    l_g: int
    h: float
    delta: float

    def _terms(self, t: float) -> tuple[float, float]:
        if self.e_l == 0.0 or self.e_m == 0.0:
            raise DegenerateMarginError("zero observation margin")
        exps = []
        for count, e in ((self.d_l, self.e_l), (self.d_m, self.e_m)):
            exponent = -2.0 * t * e * e
            exps.append(count * math.exp(exponent) if exponent < 700.0 else math.inf)
        return exps[0], exps[1]

    def pc(self, t: float, printed_form: bool = False) -> float:
        """Union bound on hitting the sign-correct state exactly at ``t``.

        ``printed_form`` weights the malicious term by the legitimate degree
        total instead of the malicious one.
        """
        term_l, term_m = self._terms(t)
        if printed_form and math.isfinite(term_m):
            term_m = term_m * (self.d_l / self.d_m) if self.d_m else 0.0
        return min(term_l + term_m, 1.0)

    def pe(self, t: float) -> float:
        """Union bound on the sign-correct state not being reached by ``t``."""
        term_l, term_m = self._terms(t)
        denom_l = 1.0 - math.exp(-2.0 * self.e_l**2)
        denom_m = 1.0 - math.exp(-2.0 * self.e_m**2)
        return min(term_l / denom_l + term_m / denom_m, 1.0)

    def tmax_equality_bound(self, t: float) -> float:
        """Upper bound on all agents first classifying correctly at ``t``."""
        return self.pc(t - self.delta)

    def tmax_survival_bound(self, t: float) -> float:
        """Upper bound on full correct classification not holding by ``t - 1``."""
        return self.pe(t - self.delta)


def finite_time_bounds(
    inst: NetworkInstance,
    model: TrustObservationModel,
    *,
    diameter_on_legit: bool = False,
) -> FiniteTimeBounds:
    """Compute degree totals and constants for the tail bounds on an instance."""
    adj = inst.graph.adjacency
    legit = inst.legitimate
    mal = inst.malicious
    d_l = int(adj[np.ix_(legit, legit)].sum())
    d_m = int(adj[np.ix_(mal, legit)].sum()) if len(mal) else 0
    marg = margins(model)
    graph = inst.legit_subgraph() if diameter_on_legit else inst.graph
    l_g = diameter(graph)
    deg = max_in_degree(inst)
    if deg < 2:
        raise BoundUndefinedError("max in-degree below 2 leaves the bound undefined")
    x = (1.0 / deg) ** l_g
    h = _half_life_factor(x) if x > 0.0 else math.inf
    return FiniteTimeBounds(
        d_l=d_l,
        d_m=d_m,
        e_l=marg.e_l,
        e_m=marg.e_m,
        deg_max=deg,
        l_g=l_g,
        h=h,
        delta=h * l_g + 1.0,
    )


# ---------------------------------------------------------------------------
# Whole-instance summary
# ---------------------------------------------------------------------------

def contraction_summary(
    inst: NetworkInstance, *, diameter_on_legit: bool = False
) -> dict:
    """Per-target contraction indices plus instance-level bound constants."""
    tsets = legit_trusted_sets(inst)
    deg = max_in_degree(inst)
    per_q = []
    values: list[float] = []
    for q in range(inst.n):
        part = build_partitioned_update(inst, q, tsets)
        role = "malicious" if inst.is_malicious[q] else "legit"
        if part.u_q == 0:
            per_q.append(
                {"q": q, "role": role, "u_q": 0, "con": 0,
                 "weakly_chained": True, "h_q": None, "bound_rounds": 0}
            )
            continue
        res = index_of_contraction(part.w_c)
        values.append(res.value)
        entry = {
            "q": q,
            "role": role,
            "u_q": part.u_q,
            "con": int(res.value) if res.is_finite else "inf",
            "weakly_chained": res.is_finite,
        }
        if res.is_finite:
            h_q, rounds = absorption_bound(part.w_c, deg, res.value)
            entry["h_q"] = h_q
            entry["bound_rounds"] = rounds
        else:
            entry["h_q"] = None
            entry["bound_rounds"] = None
        per_q.append(entry)
    if not values:
        con_max = None
    elif math.isinf(max(values)):
        con_max = "inf"
    else:
        con_max = int(max(values))
    instance = {"con_max": con_max, "deg_max": deg}
    try:
        graph = inst.legit_subgraph() if diameter_on_legit else inst.graph
        l_g = diameter(graph)
        x = (1.0 / deg) ** l_g
        h = _half_life_factor(x) if x > 0.0 else math.inf
        instance.update({"l_G": l_g, "h": h, "Delta": h * l_g + 1.0})
    except UndefinedDiameterError:
        instance.update({"l_G": None, "h": None, "Delta": None})
    return {"targets": per_q, "instance": instance}
