"""Independent oracles and instance builders shared by the test modules."""

from __future__ import annotations

import math

import numpy as np

import trustprop as tp


def reference_run(inst, model, seed, rounds):
    """Drive the simulation with the per-agent operations only.

    Independent of the vectorized engine: samples per receiver in sorted-id
    order from streams spawned exactly like the engine's, then applies
    `update_beta`/`update_opinions` agent by agent. Returns the per-round
    history of legitimate opinion matrices (list of (|L|, N) arrays) and the
    final per-agent states.
    """
    legit = [int(i) for i in inst.legitimate]
    n = inst.n
    states = {i: tp.AgentState.fresh(i, inst.graph.in_neighbors(i), n) for i in legit}
    streams = {
        i: np.random.Generator(np.random.PCG64(s))
        for i, s in zip(legit, np.random.SeedSequence(seed).spawn(len(legit)))
    }
    inversion = inst.is_malicious.astype(float)
    prev = {i: states[i].opinion.copy() for i in legit}
    for j in inst.malicious:
        prev[int(j)] = inversion.copy()
    history = [np.array([states[i].opinion for i in legit])]
    for _ in range(rounds):
        for i in legit:
            senders = [int(j) for j in inst.graph.in_neighbors(i) if j != i]
            u = streams[i].random(len(senders))
            obs = {}
            for k, j in enumerate(senders):
                lo, hi = model.interval_for(bool(inst.is_malicious[j]))
                obs[j] = lo + (hi - lo) * u[k]
            states[i] = tp.update_beta(states[i], obs)
        new_prev = dict(prev)
        for i in legit:
            incoming = {j: prev[j] for j in states[i].in_neighbors}
            states[i] = tp.update_opinions(states[i], incoming)
            new_prev[i] = states[i].opinion.copy()
        prev = new_prev
        history.append(np.array([states[i].opinion for i in legit]))
    return history, states


def contraction_by_enumeration(w, tol=1e-12):
    """Contraction index by exhaustive simple-path enumeration.

    Counts the nodes on each path; for every non-deficient row the shortest
    path into the deficient set is found by brute force, and the index is
    the largest of those (0 when all rows are deficient, inf when some row
    has no path).
    """
    w = np.asarray(w, dtype=float)
    n = w.shape[0]
    deficient = {i for i in range(n) if w[i].sum() < 1.0 - tol}
    if n == 0 or len(deficient) == n:
        return 0
    succ = [list(np.flatnonzero(w[i] > 0.0)) for i in range(n)]
    worst = 0

    def shortest_from(start):
        best = math.inf

        def explore(node, visited, length):
            nonlocal best
            if length >= best:
                return
            if node in deficient:
                best = length
                return
            for j in succ[node]:
                if j not in visited:
                    explore(int(j), visited | {int(j)}, length + 1)

        explore(start, frozenset([start]), 1)
        return best

    for i in range(n):
        if i not in deficient:
            worst = max(worst, shortest_from(i))
    return worst


def random_substochastic(rng, n):
    """Random substochastic matrix that is clearly convergent or clearly not.

    Rows are either stochastic or clearly deficient (sum <= 0.9). Draws with
    spectral radius in the near-critical band (0.93, 1) are resampled: a
    convergent matrix then contracts far below 1e-6 within 500 powers, while
    a non-convergent one keeps a row-stochastic closed class and norm 1.
    """
    while True:
        w = np.zeros((n, n))
        for i in range(n):
            k = int(rng.integers(0, n + 1))
            if k == 0:
                continue
            cols = rng.choice(n, size=k, replace=False)
            weights = 1.0 + rng.random(k)
            weights /= weights.sum()
            scale = 1.0 if rng.random() < 0.5 else float(rng.uniform(0.3, 0.9))
            w[i, cols] = weights * scale
        radius = float(np.abs(np.linalg.eigvals(w)).max()) if n else 0.0
        if radius <= 0.93 or radius >= 1.0 - 1e-9:
            return w


def chain_matrix():
    """Support chain 3 -> 2 -> 1 -> 0 with only row 0 deficient."""
    w = np.zeros((4, 4))
    w[0, 0] = 0.5
    for i in (1, 2, 3):
        w[i, i] = 0.5
        w[i, i - 1] = 0.5
    return w


def substochastic_corpus(seed=0, count=200, max_n=6):
    """Mixed corpus: hand-picked edge cases plus random draws."""
    rng = np.random.default_rng(seed)
    cycle3 = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
    unreachable = np.array([[0.3, 0.0], [0.0, 1.0]])
    mats = [
        np.eye(3),
        np.zeros((2, 2)),
        np.diag([0.5, 0.5]),
        cycle3,
        unreachable,
        chain_matrix(),
    ]
    while len(mats) < count:
        n = int(rng.integers(1, max_n + 1))
        mats.append(random_substochastic(rng, n))
    return mats


def fig3_instance():
    """Four legitimate agents on a cycle plus one malicious observer source.

    Ids 0..3 are the legitimate cycle 0 -> 1 -> 2 -> 3 -> 0; id 4 is
    malicious and sends to 0 and 1.
    """
    edges = [(0, 1), (1, 2), (2, 3), (3, 0), (4, 0), (4, 1)]
    g = tp.DirectedGraph(5, edges)
    roles = np.array([False, False, False, False, True])
    return tp.NetworkInstance(g, roles)


def random_valid_instance(rng, n_legit=None, kind=None, ratio=1.5):
    """Random assumption-satisfying instance for property loops."""
    if n_legit is None:
        n_legit = int(rng.integers(4, 13))
    if kind is None:
        kind = "cyclic" if rng.random() < 0.5 else "erdos_renyi"
    if kind == "cyclic":
        legit = tp.build_cyclic_legit(n_legit)
    else:
        legit = tp.build_erdos_renyi_legit(
            n_legit, tp.default_er_edge_prob(n_legit), rng
        )
    m = int(round(ratio * n_legit))
    return tp.attach_malicious(legit, m, 0.2, rng)
