"""Ising encoding of MaxCut and a Metropolis analog of forward/reverse annealing.

The annealing fraction ``s`` is mapped to a temperature ``T(s) = t_max * (1 - s)``:
``s = 0`` is the hot, fully fluctuating end and ``s = 1`` the classical end.
A reverse schedule starts from a classical seed state at ``s = 1``, ramps
down to ``s_target``, holds, and ramps back up, which makes it a local
search around the seed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numba
import numpy as np

from .errors import InvalidArgumentError
from .instances import WeightedGraph
from .seeding import split_seed

RAMP_SCALE = 0.01  # |ds| per sweep for ramp_slope = 1.0


@dataclass(frozen=True)
class IsingModel:
    n_spins: int
    couplings: dict[tuple[int, int], float]
    fields: dict[int, float] = field(default_factory=dict)
    offset: float = 0.0

    def __post_init__(self):
        if self.n_spins < 1:
            raise InvalidArgumentError("n_spins must be positive")
        for (i, j) in self.couplings:
            if not 0 <= i < j < self.n_spins:
                raise InvalidArgumentError(f"coupling key ({i},{j}) must satisfy 0 <= i < j < n_spins")
        for i in self.fields:
            if not 0 <= i < self.n_spins:
                raise InvalidArgumentError(f"field index {i} out of range")

    def dense(self) -> tuple[np.ndarray, np.ndarray]:
        """Symmetric coupling matrix (zero diagonal) and field vector."""
        J = np.zeros((self.n_spins, self.n_spins))
        for (i, j), c in self.couplings.items():
            J[i, j] = J[j, i] = c
        h = np.zeros(self.n_spins)
        for i, c in self.fields.items():
            h[i] = c
        return J, h

    def max_local_field(self) -> float:
        J, h = self.dense()
        return float(np.max(np.abs(h) + np.abs(J).sum(axis=1)))


def ising_from_maxcut(graph: WeightedGraph) -> IsingModel:
    """MaxCut as an Ising model with ``energy(s) = -cut(s)``.

    ``J_ij = w_ij / 2``, no fields, offset ``-sum(w) / 2``. Spin +1 is side 0.
    """
    couplings = {(u, v): w / 2.0 for u, v, w in graph.edges}
    return IsingModel(graph.n_vertices, couplings, {}, -graph.total_weight / 2.0)


def spins_to_partition(spins: Sequence[int]) -> tuple[int, ...]:
    return tuple(0 if s > 0 else 1 for s in spins)


def partition_to_spins(partition: Sequence[int]) -> np.ndarray:
    return np.array([1 if b == 0 else -1 for b in partition], dtype=np.int8)


def _check_spins(model: IsingModel, s) -> np.ndarray:
    s = np.asarray(s)
    if s.shape[-1] != model.n_spins:
        raise InvalidArgumentError(f"spin vector length {s.shape[-1]} does not match {model.n_spins} spins")
    if np.any(np.abs(s) != 1):
        raise InvalidArgumentError("spins must be +1 or -1")
    return s.astype(float)


def energy(model: IsingModel, s) -> float:
    s = _check_spins(model, s)
    if s.ndim != 1:
        raise InvalidArgumentError("energy() takes a single spin vector")
    e = model.offset
    for (i, j), c in model.couplings.items():
        e += c * s[i] * s[j]
    for i, c in model.fields.items():
        e += c * s[i]
    return float(e)


def energies(model: IsingModel, S) -> np.ndarray:
    """Vectorized energy of each row of ``S``."""
    S = np.atleast_2d(_check_spins(model, S))
    J, h = model.dense()
    return model.offset + 0.5 * np.einsum("ri,ij,rj->r", S, J, S) + S @ h


def flip_delta(model: IsingModel, s, k: int) -> float:
    """Energy change of flipping spin ``k``: ``-2 s_k (h_k + sum_j J_kj s_j)``."""
    s = _check_spins(model, s)
    J, h = model.dense()
    return float(-2.0 * s[k] * (h[k] + J[k] @ s))


# --- Metropolis kernel --------------------------------------------------------

@numba.njit(cache=True, nogil=True)
def _splitmix(state):
    state = state + np.uint64(0x9E3779B97F4A7C15)
    z = state
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    z = z ^ (z >> np.uint64(31))
    return state, (z >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@numba.njit(cache=True, nogil=True)
def _run_read(J, h, spins, temps, rng_state, randomize):
    n = spins.shape[0]
    state = rng_state
    if randomize:
        for i in range(n):
            state, u = _splitmix(state)
            spins[i] = 1.0 if u < 0.5 else -1.0
    local = h.copy()
    for i in range(n):
        for j in range(n):
            local[i] += J[i, j] * spins[j]
    for t in range(temps.shape[0]):
        T = temps[t]
        for k in range(n):
            dE = -2.0 * spins[k] * local[k]
            if T <= 0.0:
                accept = dE < 0.0
            elif dE <= 0.0:
                accept = True
            else:
                state, u = _splitmix(state)
                accept = u < math.exp(-dE / T)
            if accept:
                old = spins[k]
                spins[k] = -old
                for j in range(n):
                    local[j] -= 2.0 * old * J[j, k]
    # zero-temperature descent: index-order scan, take strict improvements
    improved = True
    while improved:
        improved = False
        for k in range(n):
            if -2.0 * spins[k] * local[k] < -1e-12:
                old = spins[k]
                spins[k] = -old
                for j in range(n):
                    local[j] -= 2.0 * old * J[j, k]
                improved = True
    return spins


@dataclass
class AnnealResult:
    spins: np.ndarray           # (num_reads, n) int8
    energies: np.ndarray        # (num_reads,)
    per_read_seeds: list[int]

    @property
    def samples(self) -> list[tuple[np.ndarray, float]]:
        return [(s, float(e)) for s, e in zip(self.spins, self.energies)]

    @property
    def best_index(self) -> int:
        return int(np.argmin(self.energies))

    @property
    def best(self) -> tuple[np.ndarray, float]:
        i = self.best_index
        return self.spins[i], float(self.energies[i])

    @property
    def best_energy(self) -> float:
        return float(self.energies.min())


def _anneal(model, temps, num_reads, seed, seed_state=None, reinitialize=True):
    J, h = model.dense()
    n = model.n_spins
    seeds = [split_seed(seed, "read", r) for r in range(num_reads)]
    out = np.empty((num_reads, n), dtype=np.int8)
    temps = np.ascontiguousarray(temps, dtype=float)
    prev = None if seed_state is None else np.asarray(seed_state, dtype=float)
    for r, rs in enumerate(seeds):
        if seed_state is None:
            spins = np.empty(n)
            randomize = True
        else:
            spins = (prev if (reinitialize or r == 0) else out[r - 1].astype(float)).copy()
            randomize = False
        final = _run_read(J, h, spins, temps, np.uint64(rs), randomize)
        out[r] = final.astype(np.int8)
    return AnnealResult(out, energies(model, out), seeds)


def forward_anneal(model: IsingModel, n_sweeps: int | None = None, num_reads: int = 1,
                   t_max: float | None = None, seed: int = 0) -> AnnealResult:
    """Random initial spins, Metropolis sweeps with T linear from ``t_max`` to 0."""
    if n_sweeps is None:
        n_sweeps = 10 * model.n_spins
    if n_sweeps < 1 or num_reads < 1:
        raise InvalidArgumentError("n_sweeps and num_reads must be positive")
    if t_max is None:
        t_max = model.max_local_field()
    if not t_max > 0:
        raise InvalidArgumentError(f"t_max must be positive, got {t_max}")
    temps = np.linspace(t_max, 0.0, n_sweeps)
    return _anneal(model, temps, num_reads, seed)


@dataclass(frozen=True)
class ReverseSchedule:
    s_target: float = 0.5
    hold_time: int = 100
    ramp_slope: float = 2.0
    num_reads: int = 1000
    reinitialize: bool = True
    ramp_scale: float = RAMP_SCALE

    def __post_init__(self):
        if not 0.0 < self.s_target < 1.0:
            raise InvalidArgumentError(f"s_target must lie in (0, 1), got {self.s_target}")
        if self.hold_time < 0:
            raise InvalidArgumentError(f"hold_time must be non-negative, got {self.hold_time}")
        if not self.ramp_slope > 0:
            raise InvalidArgumentError(f"ramp_slope must be positive, got {self.ramp_slope}")
        if self.num_reads < 1:
            raise InvalidArgumentError(f"num_reads must be positive, got {self.num_reads}")
        if not self.ramp_scale > 0:
            raise InvalidArgumentError(f"ramp_scale must be positive, got {self.ramp_scale}")

    def s_values(self) -> np.ndarray:
        """Annealing fraction for each sweep: 1 -> s_target, hold, s_target -> 1."""
        ds = self.ramp_scale * self.ramp_slope
        n_ramp = max(1, math.ceil((1.0 - self.s_target) / ds - 1e-12))
        down = np.maximum(1.0 - ds * np.arange(1, n_ramp + 1), self.s_target)
        hold = np.full(self.hold_time, self.s_target)
        up = np.minimum(self.s_target + ds * np.arange(1, n_ramp + 1), 1.0)
        return np.concatenate([down, hold, up])


def reverse_anneal(model: IsingModel, seed_state, schedule: ReverseSchedule,
                   t_max: float | None = None, rng_seed: int = 0) -> AnnealResult:
    """Reverse anneal from a classical seed state.

    With ``reinitialize`` every read restarts from ``seed_state``; otherwise
    each read continues from the previous read's final state.
    """
    s0 = np.asarray(seed_state)
    if s0.shape != (model.n_spins,):
        raise InvalidArgumentError(f"seed state length {s0.size} does not match {model.n_spins} spins")
    _check_spins(model, s0)
    if t_max is None:
        t_max = model.max_local_field()
    if not t_max > 0:
        raise InvalidArgumentError(f"t_max must be positive, got {t_max}")
    temps = t_max * (1.0 - schedule.s_values())
    return _anneal(model, temps, schedule.num_reads, rng_seed, seed_state=s0,
                   reinitialize=schedule.reinitialize)
