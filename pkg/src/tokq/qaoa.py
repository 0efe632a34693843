"""QAOA for MaxCut and multitask parameter transfer between graphs.

Convention: gammas drive the cost (phase-separation) layer and betas the
mixer ``exp(-i*beta*sum X)``. Internally the optimizer minimizes
``cost = -expected_cut``, so "smaller cost" and "larger expected cut" mean
the same thing in the transfer rules.
"""
from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .errors import InvalidArgumentError
from .instances import WeightedGraph, brute_force_maxcut, cut_table
from .optimizers import OptTrace, Spsa, SpsaConfig
from .seeding import split_seed
from .simulator import (
    PauliSum,
    PauliTerm,
    Statevector,
    apply_rx_all,
    apply_zz,
    init_plus_state,
    probabilities,
    sample_counts,
)


@dataclass(frozen=True)
class QaoaParams:
    gammas: tuple[float, ...]
    betas: tuple[float, ...]

    def __post_init__(self):
        g = tuple(float(x) for x in self.gammas)
        b = tuple(float(x) for x in self.betas)
        if len(g) != len(b) or not g:
            raise InvalidArgumentError(f"need equal, non-zero gamma/beta lengths, got {len(g)} and {len(b)}")
        object.__setattr__(self, "gammas", g)
        object.__setattr__(self, "betas", b)

    @property
    def p(self) -> int:
        return len(self.gammas)

    def to_vector(self) -> np.ndarray:
        return np.array(self.gammas + self.betas)

    @classmethod
    def from_vector(cls, x) -> "QaoaParams":
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.size % 2:
            raise InvalidArgumentError("parameter vector must have even length")
        p = x.size // 2
        return cls(tuple(x[:p]), tuple(x[p:]))

    @classmethod
    def random(cls, p: int, rng: np.random.Generator) -> "QaoaParams":
        return cls.from_vector(rng.uniform(0.0, math.pi, size=2 * p))


def cut_observable(graph: WeightedGraph) -> PauliSum:
    """``sum_ij w_ij (1 - Z_i Z_j) / 2``."""
    terms = []
    for u, v, w in graph.edges:
        terms.append(PauliTerm(w / 2.0))
        terms.append(PauliTerm(-w / 2.0, {u: "Z", v: "Z"}))
    return PauliSum(terms)


def qaoa_state(graph: WeightedGraph, params: QaoaParams) -> Statevector:
    """|+>^n followed by p rounds of cost layer then mixer layer.

    The cost layer applies ``exp(-i*gamma*w/2*(1 - Z_u Z_v))`` per edge,
    realised as ``apply_zz(-gamma*w/2)`` with the global phase dropped.
    """
    state = init_plus_state(graph.n_vertices)
    for gamma, beta in zip(params.gammas, params.betas):
        for u, v, w in graph.edges:
            state = apply_zz(state, u, v, -gamma * w / 2.0)
        state = apply_rx_all(state, beta)
    return state


class QaoaProblem:
    """Cached cut table for fast repeated evaluation on one graph.

    The cost layer becomes one diagonal phase ``exp(-i*gamma*(C(b) - W/2))``,
    which is exactly the per-edge product used by :func:`qaoa_state`.
    """

    def __init__(self, graph: WeightedGraph):
        self.graph = graph
        self.n = graph.n_vertices
        self.cuts = cut_table(graph)
        self.shifted = self.cuts - graph.total_weight / 2.0
        self._best = None

    @property
    def best_cut(self) -> float:
        if self._best is None:
            self._best = brute_force_maxcut(self.graph).best_value
        return self._best

    @property
    def optimal_mask(self) -> np.ndarray:
        tol = 1e-9 * max(1.0, self.graph.total_weight)
        return self.cuts >= self.best_cut - tol

    def state(self, params: QaoaParams) -> Statevector:
        n = self.n
        psi = np.full(1 << n, 1.0 / math.sqrt(1 << n), dtype=complex)
        for gamma, beta in zip(params.gammas, params.betas):
            psi = psi * np.exp(-1j * gamma * self.shifted)
            psi = apply_rx_all(Statevector(n, psi), beta).amplitudes
        return Statevector(n, psi)

    def expected_cut(self, params: QaoaParams, shots: int | None = None,
                     rng: np.random.Generator | None = None) -> float:
        state = self.state(params)
        if shots is None:
            return float(probabilities(state) @ self.cuts)
        counts = sample_counts(state, shots, rng if rng is not None else np.random.default_rng())
        return float(counts @ self.cuts / shots)

    def success_probability(self, params: QaoaParams) -> float:
        return float(probabilities(self.state(params))[self.optimal_mask].sum())

    def cost(self, x) -> float:
        return -self.expected_cut(QaoaParams.from_vector(x))


def expected_cut(graph: WeightedGraph, params: QaoaParams) -> float:
    """Expectation of the cut observable in the QAOA state."""
    return float(probabilities(qaoa_state(graph, params)) @ cut_table(graph))


def success_probability(graph: WeightedGraph, params: QaoaParams) -> float:
    """Probability mass on bitstrings that reach the maximum cut."""
    best = brute_force_maxcut(graph).best_value
    cuts = cut_table(graph)
    tol = 1e-9 * max(1.0, graph.total_weight)
    return float(probabilities(qaoa_state(graph, params))[cuts >= best - tol].sum())


def _spsa_config(steps: int, seed: int, spsa: SpsaConfig | None) -> SpsaConfig:
    base = spsa if spsa is not None else SpsaConfig()
    return SpsaConfig(iterations=steps, a=base.a, c=base.c, A=base.A, alpha=base.alpha,
                      gamma_exp=base.gamma_exp, seed=split_seed(seed, "spsa"),
                      target_step=base.target_step)


def initial_params(p: int, seed: int) -> QaoaParams:
    return QaoaParams.random(p, np.random.default_rng(split_seed(seed, "init")))


def optimize_single(graph: WeightedGraph, p: int, steps: int, seed: int,
                    spsa: SpsaConfig | None = None, params0: QaoaParams | None = None,
                    problem: QaoaProblem | None = None):
    """SPSA on ``-expected_cut`` from seeded uniform [0, pi) parameters.

    Returns the best traced parameters and the trace (objective is the cost,
    i.e. the negated expected cut).
    """
    if steps < 1:
        raise InvalidArgumentError(f"steps must be positive, got {steps}")
    problem = problem or QaoaProblem(graph)
    x0 = (params0 or initial_params(p, seed)).to_vector()
    opt = Spsa(problem.cost, x0, _spsa_config(steps, seed, spsa))
    opt.step(steps)
    return QaoaParams.from_vector(opt.trace.best_params), opt.trace


# --- multitask transfer ----------------------------------------------------------

Strategy = Literal["none", "static", "evolve"]


@dataclass(frozen=True)
class TransferConfig:
    n_transfers: int = 4
    steps_per_block: int = 20
    k_prime: int | None = None
    strategy: Strategy = "static"

    def __post_init__(self):
        if self.n_transfers < 1:
            raise InvalidArgumentError(f"n_transfers must be positive, got {self.n_transfers}")
        if self.steps_per_block < 1:
            raise InvalidArgumentError(f"steps_per_block must be positive, got {self.steps_per_block}")
        if self.strategy not in ("none", "static", "evolve"):
            raise InvalidArgumentError(f"unknown strategy {self.strategy!r}")
        if self.k_prime is None:
            object.__setattr__(self, "k_prime", self.steps_per_block)
        if not 1 <= self.k_prime <= self.steps_per_block:
            raise InvalidArgumentError(
                f"k_prime must lie in [1, steps_per_block={self.steps_per_block}], got {self.k_prime}")

    @property
    def total_steps(self) -> int:
        return self.n_transfers * self.steps_per_block


@dataclass(frozen=True)
class TransferEvent:
    block_index: int
    target_graph: int
    source_graph: int
    expected_cut_before: float
    expected_cut_after: float
    kind: Literal["adoption", "rollback-keep", "rollback-discard"]


@dataclass
class GraphOutcome:
    graph_id: int
    params: QaoaParams
    trace: OptTrace
    expected_cut: float
    success_probability: float
    best_cut: float

    @property
    def expected_cut_trace(self) -> np.ndarray:
        return -np.asarray(self.trace.objective)


@dataclass
class MultitaskReport:
    strategy: str
    graphs: list[GraphOutcome]
    events: list[TransferEvent] = field(default_factory=list)

    @property
    def success_probabilities(self) -> np.ndarray:
        return np.array([g.success_probability for g in self.graphs])

    @property
    def mean_success(self) -> float:
        return float(self.success_probabilities.mean())

    @property
    def stderr_success(self) -> float:
        sp = self.success_probabilities
        return float(sp.std(ddof=1) / math.sqrt(sp.size)) if sp.size > 1 else 0.0

    def events_for(self, graph_id: int, kind: str | None = None) -> list[TransferEvent]:
        return [e for e in self.events if e.target_graph == graph_id and (kind is None or e.kind == kind)]


def graph_seed(seed: int, graph_id: int) -> int:
    """Per-graph seed used by :func:`run_multitask`."""
    return split_seed(seed, "graph", graph_id)


def _cross_matrix(problems, opts) -> np.ndarray:
    k = len(problems)
    m = np.empty((k, k))
    for i in range(k):
        for j in range(k):
            m[i, j] = -opts[j].value if i == j else problems[i].expected_cut(
                QaoaParams.from_vector(opts[j].theta))
    return m


def _best_source(row: np.ndarray, i: int) -> int | None:
    """argmax over foreign params, smallest id on ties; None unless strictly better than self."""
    best_j, best_v = None, -math.inf
    for j, v in enumerate(row):
        if j != i and v > best_v:
            best_j, best_v = j, v
    if best_j is None or not best_v > row[i]:
        return None
    return best_j


def run_multitask(graphs: Sequence[WeightedGraph], p: int, config: TransferConfig, seed: int,
                  spsa: SpsaConfig | None = None,
                  initial: Sequence[QaoaParams] | None = None,
                  graph_seeds: Sequence[int] | None = None) -> MultitaskReport:
    """Optimize several graphs side by side with cross-graph parameter transfer.

    The run is split into ``n_transfers`` blocks of ``steps_per_block`` SPSA
    iterations per graph. After each block every graph's expected cut is
    evaluated under every graph's current parameters.

    * ``static``: a graph adopts the best foreign parameters if they strictly
      beat its own.
    * ``evolve``: the foreign parameters start a parallel branch while the
      incumbent keeps optimizing; after ``k_prime`` iterations the branch with
      the larger expected cut survives. Branches forked at the final transfer
      have no budget left and are resolved immediately.
    * ``none``: independent optimizations.

    Graph ``i`` draws its initial parameters and SPSA stream from
    ``graph_seed(seed, i)`` unless ``graph_seeds`` overrides them.
    """
    k = len(graphs)
    if k < 1:
        raise InvalidArgumentError("need at least one graph")
    n = graphs[0].n_vertices
    if any(g.n_vertices != n for g in graphs):
        raise InvalidArgumentError("all graphs must have the same vertex count to share parameters")
    if initial is not None and len(initial) != k:
        raise InvalidArgumentError("need one initial parameter set per graph")
    if graph_seeds is None:
        graph_seeds = [graph_seed(seed, i) for i in range(k)]
    elif len(graph_seeds) != k:
        raise InvalidArgumentError("need one seed per graph")

    problems = [QaoaProblem(g) for g in graphs]
    steps = config.total_steps
    opts = []
    for i, prob in enumerate(problems):
        gs = graph_seeds[i]
        x0 = (initial[i] if initial is not None else initial_params(p, gs)).to_vector()
        if x0.size != 2 * p:
            raise InvalidArgumentError(f"initial params for graph {i} do not have depth {p}")
        opts.append(Spsa(prob.cost, x0, _spsa_config(steps, gs, spsa)))

    events: list[TransferEvent] = []
    branches: dict[int, tuple[int, Spsa]] = {}  # target -> (source, branch)
    kp = config.k_prime

    def resolve(i, block):
        src, branch = branches.pop(i)
        inc, alt = -opts[i].value, -branch.value
        if alt > inc:
            events.append(TransferEvent(block, i, src, inc, alt, "rollback-keep"))
            opts[i] = branch
        else:
            events.append(TransferEvent(block, i, src, inc, inc, "rollback-discard"))

    for block in range(config.n_transfers):
        for i in range(k):
            if i in branches:
                opts[i].step(kp)
                branches[i][1].step(kp)
                resolve(i, block)
                opts[i].step(config.steps_per_block - kp)
            else:
                opts[i].step(config.steps_per_block)
        if config.strategy == "none" or k < 2:
            continue
        m = _cross_matrix(problems, opts)
        snapshot = [o.theta.copy() for o in opts]
        for i in range(k):
            j = _best_source(m[i], i)
            if j is None:
                continue
            if config.strategy == "static":
                events.append(TransferEvent(block, i, j, m[i, i], m[i, j], "adoption"))
                opts[i].replace(snapshot[j], value=-m[i, j])
            else:
                branch = copy.deepcopy(opts[i])
                branch.replace(snapshot[j], value=-m[i, j])
                branches[i] = (j, branch)
        if block == config.n_transfers - 1:
            for i in sorted(branches):
                resolve(i, block)

    outcomes = []
    for i, (prob, opt) in enumerate(zip(problems, opts)):
        params = QaoaParams.from_vector(opt.trace.best_params)
        outcomes.append(GraphOutcome(i, params, opt.trace, -opt.trace.best_value,
                                     prob.success_probability(params), prob.best_cut))
    return MultitaskReport(config.strategy, outcomes, events)
