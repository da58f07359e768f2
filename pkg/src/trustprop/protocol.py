"""Per-round trust-learning dynamics.

Legitimate agents accumulate centered trust observations into running
aggregates (``beta``), trust exactly the in-neighbors with non-negative
aggregate, pin opinions about in-neighbors to the aggregate's sign, and
average trusted neighbors' previous opinions for everyone else. Malicious
agents ignore the protocol and broadcast an adversarial vector.

Two layers live here: small per-agent operations (`update_beta`,
`trusted_in_neighbors`, `update_opinions`) that state the rules one agent at
a time, and the vectorized :class:`Simulation` engine that runs whole
networks with per-receiver random streams.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, replace
from typing import Callable, Mapping

import numpy as np

from .errors import ConfigRejectedError, ProtocolViolationError, TrustpropError
from .graph import NetworkInstance, verify_assumptions
from .observation import DEFAULT_MODEL, TrustObservationModel

SAMPLE_CHUNK_ROUNDS = 256


# ---------------------------------------------------------------------------
# Per-agent operations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AgentState:
    """One legitimate agent's aggregates and opinion vector.

    ``beta`` maps every in-neighbor to its running aggregate; the self entry
    is pinned to 1. Opinions start at all ones (trust everyone).
    """

    id: int
    in_neighbors: frozenset[int]
    beta: dict[int, float]
    opinion: np.ndarray

    @classmethod
    def fresh(cls, agent_id: int, in_neighbors, n: int) -> "AgentState":
        nbrs = frozenset(int(j) for j in in_neighbors) | {agent_id}
        beta = {j: 0.0 for j in nbrs}
        beta[agent_id] = 1.0
        return cls(
            id=agent_id,
            in_neighbors=nbrs,
            beta=beta,
            opinion=np.ones(n, dtype=float),
        )


def update_beta(state: AgentState, observations: Mapping[int, float]) -> AgentState:
    """Fold one round of observations into the running aggregates."""
    expected = state.in_neighbors - {state.id}
    if set(observations) != expected:
        raise ProtocolViolationError(
            f"agent {state.id}: observations must cover exactly the non-self "
            f"in-neighbors {sorted(expected)}, got {sorted(observations)}"
        )
    beta = dict(state.beta)
    for j, alpha in observations.items():
        beta[j] += alpha - 0.5
    beta[state.id] = 1.0
    return replace(state, beta=beta)


def trusted_in_neighbors(state: AgentState) -> frozenset[int]:
    """In-neighbors with non-negative aggregate; always contains self."""
    return frozenset(j for j, b in state.beta.items() if b >= 0.0)


def update_opinions(state: AgentState, incoming: Mapping[int, np.ndarray]) -> AgentState:
    """Apply the opinion update given all in-neighbors' previous vectors."""
    if set(incoming) != state.in_neighbors:
        raise ProtocolViolationError(
            f"agent {state.id}: incoming vectors must cover the in-neighborhood"
        )
    trusted = sorted(trusted_in_neighbors(state))
    assert trusted, "self-loop invariant guarantees a non-empty trusted set"
    n = state.opinion.shape[0]
    averaged = np.zeros(n, dtype=float)
    for j in trusted:
        averaged += np.asarray(incoming[j], dtype=float)
    averaged /= len(trusted)
    new_opinion = averaged
    for q in state.in_neighbors:
        new_opinion[q] = 1.0 if state.beta[q] >= 0.0 else 0.0
    return replace(state, opinion=new_opinion)


# ---------------------------------------------------------------------------
# Adversary
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AdversaryPolicy:
    """What malicious agents broadcast each round."""

    kind: str
    emit_fn: Callable[[int], np.ndarray] | None = None

    @classmethod
    def inversion(cls) -> "AdversaryPolicy":
        """Broadcast the opposite of the truth: 1 for malicious, 0 for legit."""
        return cls(kind="inversion")

    @classmethod
    def custom(cls, fn: Callable[[int], np.ndarray]) -> "AdversaryPolicy":
        return cls(kind="custom", emit_fn=fn)


def adversary_emit(policy: AdversaryPolicy, inst: NetworkInstance, round_index: int) -> np.ndarray:
    if policy.kind == "inversion":
        return inst.is_malicious.astype(float)
    vec = np.asarray(policy.emit_fn(round_index), dtype=float)
    if vec.shape != (inst.n,):
        raise TrustpropError(
            f"adversary vector has shape {vec.shape}, expected ({inst.n},)"
        )
    return np.clip(vec, 0.0, 1.0)


# ---------------------------------------------------------------------------
# Trace
# ---------------------------------------------------------------------------

@dataclass
class SimulationTrace:
    """Per-round metrics plus the detected stopping times of one trial."""

    is_malicious: np.ndarray
    legit: np.ndarray
    mse: np.ndarray
    max_err: np.ndarray
    min_err: np.ndarray
    signs_ok: np.ndarray
    correct: np.ndarray
    t_f: int | None
    t_hat_max: int | None
    final_classification: np.ndarray  # bool, (|L|, N): opinion >= 1/2
    seed: int | None = None
    graph_kind: str = "custom"
    opinions: np.ndarray | None = None  # (rounds+1, |L|, N) when recorded

    @property
    def rounds(self) -> int:
        return len(self.mse) - 1

    @property
    def n(self) -> int:
        return len(self.is_malicious)

    @property
    def final_mse(self) -> float:
        return float(self.mse[-1])

    @property
    def classified_ok(self) -> bool:
        truth = ~self.is_malicious
        return bool((self.final_classification == truth[None, :]).all())

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["round", "mse", "max_err", "min_err"])
            for t in range(len(self.mse)):
                writer.writerow(
                    [t, repr(float(self.mse[t])), repr(float(self.max_err[t])),
                     repr(float(self.min_err[t]))]
                )

    def summary_dict(self) -> dict:
        return {
            "seed": self.seed,
            "T_f": self.t_f,
            "T_hat_max": self.t_hat_max,
            "classified_ok": self.classified_ok,
            "n_legit": int((~self.is_malicious).sum()),
            "n_malicious": int(self.is_malicious.sum()),
            "graph_kind": self.graph_kind,
        }

    def write_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.summary_dict(), fh, sort_keys=True, indent=2)
            fh.write("\n")


# ---------------------------------------------------------------------------
# Vectorized engine
# ---------------------------------------------------------------------------

class Simulation:
    """Synchronous-round engine over one network instance.

    Observation randomness comes from one stream per legitimate receiver,
    spawned from the trial seed, so results do not depend on the order
    receivers are visited. All mutable state is instance-local; independent
    trials can run concurrently.
    """

    def __init__(
        self,
        instance: NetworkInstance,
        *,
        model: TrustObservationModel = DEFAULT_MODEL,
        adversary: AdversaryPolicy | None = None,
        seed: int | np.random.SeedSequence = 0,
        record_opinions: bool = False,
        check_assumptions: bool = True,
    ):
        self.instance = instance
        self.model = model
        self.adversary = adversary or AdversaryPolicy.inversion()
        self.seed = seed if isinstance(seed, int) else None
        if check_assumptions:
            report = verify_assumptions(instance)
            if not report.ok:
                raise ConfigRejectedError(
                    f"instance violates the protocol assumptions: {report}"
                )

        adj = instance.graph.adjacency
        self._legit = instance.legitimate
        self._mal = instance.malicious
        n, n_l = instance.n, len(self._legit)
        self._truth_bool = ~instance.is_malicious
        self._truth = self._truth_bool.astype(float)

        # receiver-major flat edge arrays (non-self in-edges of legit agents)
        recv_local, senders = [], []
        for a, i in enumerate(self._legit):
            for j in np.flatnonzero(adj[:, i]):
                if j != i:
                    recv_local.append(a)
                    senders.append(int(j))
        self._edge_recv = np.asarray(recv_local, dtype=int)
        self._edge_sender = np.asarray(senders, dtype=int)
        self._edge_flat = self._edge_recv * n + self._edge_sender
        self._edge_sender_legit = self._truth_bool[self._edge_sender]
        lo = np.empty(len(senders))
        hi = np.empty(len(senders))
        for k, j in enumerate(senders):
            lo[k], hi[k] = model.interval_for(bool(instance.is_malicious[j]))
        self._alpha_lo, self._alpha_span = lo, hi - lo

        # per-receiver sample streams, chunk-buffered round-major
        ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        self._streams = [np.random.Generator(np.random.PCG64(s)) for s in ss.spawn(n_l)]
        self._recv_slices = []
        start = 0
        for a in range(n_l):
            deg = int((self._edge_recv == a).sum())
            self._recv_slices.append(slice(start, start + deg))
            start += deg
        self._buf = np.empty((len(senders), SAMPLE_CHUNK_ROUNDS))
        self._buf_ptr = SAMPLE_CHUNK_ROUNDS

        self._in_mask = adj[:, self._legit].T.copy()  # (|L|, N)
        self.beta = np.zeros((n_l, n), dtype=float)
        self.beta[np.arange(n_l), self._legit] = 1.0

        self.opinions = np.ones((n, n), dtype=float)
        if len(self._mal):
            self.opinions[self._mal, :] = adversary_emit(self.adversary, instance, 0)

        self.round = 0
        self.t_hat_max: int | None = None
        self._streak_start: int | None = None
        self._record = record_opinions
        self._mse: list[float] = []
        self._max_err: list[float] = []
        self._min_err: list[float] = []
        self._signs_ok: list[bool] = []
        self._correct: list[bool] = []
        self._opinion_log: list[np.ndarray] = []
        self._append_metrics()

    # -- state views ------------------------------------------------------

    @property
    def legit_opinions(self) -> np.ndarray:
        return self.opinions[self._legit, :]

    def mse_now(self) -> float:
        return self._mse[-1]

    def max_error_now(self) -> float:
        return self._max_err[-1]

    # -- dynamics ---------------------------------------------------------

    def _draw_round_uniforms(self) -> np.ndarray:
        if self._buf_ptr >= SAMPLE_CHUNK_ROUNDS:
            for a, gen in enumerate(self._streams):
                rows = self._recv_slices[a]
                deg = rows.stop - rows.start
                if deg:
                    self._buf[rows, :] = gen.random((SAMPLE_CHUNK_ROUNDS, deg)).T
            self._buf_ptr = 0
        col = self._buf[:, self._buf_ptr]
        self._buf_ptr += 1
        return col

    def _append_metrics(self) -> None:
        o_l = self.opinions[self._legit, :]
        err_sq = (o_l - self._truth[None, :]) ** 2
        per_agent = err_sq.mean(axis=1)
        self._mse.append(float(per_agent.mean()))
        self._max_err.append(float(per_agent.max()))
        self._min_err.append(float(per_agent.min()))
        signs = self.beta.ravel()[self._edge_flat] >= 0.0
        self._signs_ok.append(bool((signs == self._edge_sender_legit).all()))
        correct = bool(((o_l >= 0.5) == self._truth_bool[None, :]).all())
        self._correct.append(correct)
        if correct:
            if self._streak_start is None:
                self._streak_start = self.round
            if (
                self.t_hat_max is None
                and self.round - self._streak_start + 1 >= self.instance.n
            ):
                self.t_hat_max = self._streak_start
        else:
            self._streak_start = None
        if self._record:
            self._opinion_log.append(o_l.copy())

    def step(self) -> "Simulation":
        """Advance one synchronous round; returns self."""
        u = self._draw_round_uniforms()
        alpha = self._alpha_lo + self._alpha_span * u
        self.beta.ravel()[self._edge_flat] += alpha - 0.5

        trusted = self._in_mask & (self.beta >= 0.0)
        weights = trusted / trusted.sum(axis=1, keepdims=True)
        averaged = weights @ self.opinions
        direct = (self.beta >= 0.0).astype(float)
        new_legit = np.where(self._in_mask, direct, averaged)

        self.opinions[self._legit, :] = new_legit
        if len(self._mal):
            self.opinions[self._mal, :] = adversary_emit(
                self.adversary, self.instance, self.round + 1
            )
        self.round += 1
        self._append_metrics()
        return self

    def run(self, max_rounds: int = 1000) -> "Simulation":
        """Step until the correctness streak completes or the horizon hits."""
        while self.t_hat_max is None and self.round < max_rounds:
            self.step()
        return self

    # -- trace ------------------------------------------------------------

    def _detect_t_f(self) -> int | None:
        """First round from which the aggregate signs stay correct to the end."""
        ok = self._signs_ok
        if not ok or not ok[-1]:
            return None
        t = len(ok) - 1
        while t > 0 and ok[t - 1]:
            t -= 1
        return t

    def trace(self, graph_kind: str = "custom") -> SimulationTrace:
        return SimulationTrace(
            is_malicious=self.instance.is_malicious.copy(),
            legit=self._legit.copy(),
            mse=np.asarray(self._mse),
            max_err=np.asarray(self._max_err),
            min_err=np.asarray(self._min_err),
            signs_ok=np.asarray(self._signs_ok, dtype=bool),
            correct=np.asarray(self._correct, dtype=bool),
            t_f=self._detect_t_f(),
            t_hat_max=self.t_hat_max,
            final_classification=self.opinions[self._legit, :] >= 0.5,
            seed=self.seed,
            graph_kind=graph_kind,
            opinions=np.asarray(self._opinion_log) if self._record else None,
        )


def run_trial(
    instance: NetworkInstance,
    *,
    model: TrustObservationModel = DEFAULT_MODEL,
    adversary: AdversaryPolicy | None = None,
    seed: int | np.random.SeedSequence = 0,
    max_rounds: int = 1000,
    record_opinions: bool = False,
    check_assumptions: bool = True,
    graph_kind: str = "custom",
) -> SimulationTrace:
    """Run one trial to its stopping streak (or the horizon) and trace it."""
    sim = Simulation(
        instance,
        model=model,
        adversary=adversary,
        seed=seed,
        record_opinions=record_opinions,
        check_assumptions=check_assumptions,
    )
    sim.run(max_rounds=max_rounds)
    return sim.trace(graph_kind=graph_kind)


def mse(sim: Simulation) -> float:
    """Mean over legitimate agents of their per-agent squared opinion error."""
    return sim.mse_now()


def max_error(sim: Simulation) -> float:
    """Largest per-agent squared opinion error among legitimate agents."""
    return sim.max_error_now()
