"""MaxCut instances: generation, file I/O, perturbation and exact solution."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Literal, NamedTuple, Sequence

import numpy as np

from .errors import CapacityError, InvalidArgumentError, InvalidInstanceError, ParseError

BRUTE_FORCE_MAX_VERTICES = 24

Edge = tuple[int, int, float]
Partition = tuple[int, ...]


@dataclass(frozen=True)
class WeightedGraph:
    n_vertices: int
    edges: tuple[Edge, ...]
    meta: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if self.n_vertices < 1:
            raise InvalidInstanceError(f"n_vertices must be positive, got {self.n_vertices}")
        seen = set()
        canon = []
        for e in self.edges:
            u, v, w = int(e[0]), int(e[1]), float(e[2])
            if u == v:
                raise InvalidInstanceError(f"self-loop on vertex {u}")
            if u > v:
                u, v = v, u
            if u < 0 or v >= self.n_vertices:
                raise InvalidInstanceError(f"edge ({u},{v}) out of range for {self.n_vertices} vertices")
            if not (math.isfinite(w) and w > 0):
                raise InvalidInstanceError(f"edge ({u},{v}) has invalid weight {w}")
            if (u, v) in seen:
                raise InvalidInstanceError(f"duplicate edge ({u},{v})")
            seen.add((u, v))
            canon.append((u, v, w))
        object.__setattr__(self, "edges", tuple(sorted(canon)))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def total_weight(self) -> float:
        return float(sum(w for _, _, w in self.edges))

    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset((u, v) for u, v, _ in self.edges)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Edge endpoints and weights as numpy arrays ``(us, vs, ws)``."""
        if not self.edges:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), np.zeros(0)
        us, vs, ws = zip(*self.edges)
        return np.array(us, dtype=np.int64), np.array(vs, dtype=np.int64), np.array(ws, dtype=float)

    def density(self) -> float:
        pairs = self.n_vertices * (self.n_vertices - 1) // 2
        return self.n_edges / pairs if pairs else 0.0

    def is_connected(self) -> bool:
        parent = list(range(self.n_vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v, _ in self.edges:
            parent[find(u)] = find(v)
        return len({find(i) for i in range(self.n_vertices)}) == 1


@dataclass(frozen=True)
class PerturbationSpec:
    fraction: float
    seed: int
    mode: Literal["remove-edges", "regenerate-all"] = "remove-edges"

    def __post_init__(self):
        if self.mode not in ("remove-edges", "regenerate-all"):
            raise InvalidArgumentError(f"unknown perturbation mode {self.mode!r}")
        if not 0.0 <= self.fraction <= 1.0:
            raise InvalidArgumentError(f"fraction must lie in [0, 1], got {self.fraction}")
        if self.mode == "regenerate-all":
            object.__setattr__(self, "fraction", 1.0)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _random_edges(n: int, density: float, rng: np.random.Generator) -> list[Edge]:
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < density
    return [(int(u), int(v), 1.0) for u, v in zip(iu[keep], ju[keep])]


def generate_base_instance(n: int, density: float, seed: int) -> WeightedGraph:
    """Seeded Erdos-Renyi graph with unit weights.

    Every vertex pair is drawn independently with probability ``density``.
    Connectedness is not enforced; it is recorded in ``graph.meta``.
    """
    if n < 2:
        raise InvalidInstanceError(f"need at least 2 vertices, got {n}")
    if not 0.0 < density <= 1.0:
        raise InvalidInstanceError(f"density must lie in (0, 1], got {density}")
    g = WeightedGraph(n, tuple(_random_edges(n, density, np.random.default_rng(seed))))
    g.meta.update(source="generated", density=density, seed=seed, connected=g.is_connected())
    return g


def perturb(graph: WeightedGraph, spec: PerturbationSpec) -> WeightedGraph:
    """Remove a seeded random fraction of edges, or regenerate the instance.

    ``remove-edges`` deletes exactly ``round(fraction * |E|)`` edges chosen
    uniformly without replacement and keeps the vertex set. ``regenerate-all``
    draws an independent graph with the same vertex count and the same
    expected density.
    """
    rng = np.random.default_rng(spec.seed)
    if spec.mode == "regenerate-all":
        edges = _random_edges(graph.n_vertices, graph.density(), rng)
        g = WeightedGraph(graph.n_vertices, tuple(edges))
        g.meta.update(source="regenerated", seed=spec.seed, connected=g.is_connected())
        return g
    m = graph.n_edges
    k = _round_half_up(spec.fraction * m)
    drop = set(rng.choice(m, size=k, replace=False).tolist()) if k else set()
    edges = tuple(e for i, e in enumerate(graph.edges) if i not in drop)
    g = WeightedGraph(graph.n_vertices, edges)
    g.meta.update(source="perturbed", fraction=spec.fraction, seed=spec.seed, removed=k,
                  connected=g.is_connected())
    return g


def modify_edges(graph: WeightedGraph, fraction: float, seed: int) -> WeightedGraph:
    """Rewire a fraction of edges, keeping |E| constant.

    ``round(fraction * |E|)`` seeded-random edges are removed and the same
    number of fresh unit-weight edges is added between previously
    non-adjacent pairs.
    """
    if not 0.0 <= fraction <= 1.0:
        raise InvalidArgumentError(f"fraction must lie in [0, 1], got {fraction}")
    rng = np.random.default_rng(seed)
    m = graph.n_edges
    k = _round_half_up(fraction * m)
    present = graph.edge_set()
    non_edges = [(u, v) for u in range(graph.n_vertices) for v in range(u + 1, graph.n_vertices)
                 if (u, v) not in present]
    k = min(k, len(non_edges))
    drop = set(rng.choice(m, size=k, replace=False).tolist()) if k else set()
    add = rng.choice(len(non_edges), size=k, replace=False).tolist() if k else []
    edges = [e for i, e in enumerate(graph.edges) if i not in drop]
    edges += [(non_edges[i][0], non_edges[i][1], 1.0) for i in add]
    g = WeightedGraph(graph.n_vertices, tuple(edges))
    g.meta.update(source="modified", fraction=fraction, seed=seed, rewired=k,
                  connected=g.is_connected())
    return g


def jaccard(a: WeightedGraph, b: WeightedGraph) -> float:
    ea, eb = a.edge_set(), b.edge_set()
    union = ea | eb
    return len(ea & eb) / len(union) if union else 1.0


# --- file I/O ---------------------------------------------------------------

def save_instance(graph: WeightedGraph, path: str | Path) -> None:
    lines = [str(graph.n_vertices)]
    lines += [f"{u} {v} {w!r}" for u, v, w in graph.edges]
    Path(path).write_text("\n".join(lines) + "\n")


def load_instance(path: str | Path) -> WeightedGraph:
    """Read the edge-list format: ``n_vertices`` then one ``u v w`` per line."""
    path = Path(path)
    text = path.read_text()
    return parse_instance(text, source=str(path))


def parse_instance(text: str, source: str | None = None) -> WeightedGraph:
    n = None
    edges: list[Edge] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 1:
                raise ParseError("expected vertex count on first line", lineno, source)
            try:
                n = int(parts[0])
            except ValueError:
                raise ParseError(f"invalid vertex count {parts[0]!r}", lineno, source) from None
            if n < 1:
                raise ParseError(f"vertex count must be positive, got {n}", lineno, source)
            continue
        if len(parts) != 3:
            raise ParseError(f"expected 'u v w', got {line!r}", lineno, source)
        try:
            u, v, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise ParseError(f"malformed edge {line!r}", lineno, source) from None
        if u == v:
            raise ParseError(f"self-loop on vertex {u}", lineno, source)
        if u > v:
            u, v = v, u
        if u < 0 or v >= n:
            raise ParseError(f"vertex out of range in {line!r}", lineno, source)
        if not (math.isfinite(w) and w > 0):
            raise ParseError(f"weight must be positive and finite, got {parts[2]}", lineno, source)
        if (u, v) in seen:
            raise ParseError(f"duplicate edge ({u},{v})", lineno, source)
        seen.add((u, v))
        edges.append((u, v, w))
    if n is None:
        raise ParseError("empty instance file", None, source)
    g = WeightedGraph(n, tuple(edges))
    g.meta.update(source=source or "text", connected=g.is_connected())
    return g


# --- objective --------------------------------------------------------------

def _as_partition(graph: WeightedGraph, partition: Sequence[int]) -> np.ndarray:
    p = np.asarray(partition, dtype=np.int64)
    if p.ndim != 1 or p.size != graph.n_vertices:
        raise InvalidArgumentError(
            f"partition length {p.size} does not match {graph.n_vertices} vertices")
    if np.any((p != 0) & (p != 1)):
        raise InvalidArgumentError("partition entries must be 0 or 1")
    return p


def cut_value(graph: WeightedGraph, partition: Sequence[int]) -> float:
    """Total weight of edges whose endpoints lie on different sides."""
    p = _as_partition(graph, partition)
    us, vs, ws = graph.arrays()
    return float(ws[p[us] != p[vs]].sum())


def cut_values_of_indices(graph: WeightedGraph, indices: np.ndarray) -> np.ndarray:
    """Cut value of each little-endian bitstring index (bit k = side of vertex k)."""
    idx = np.asarray(indices, dtype=np.int64)
    out = np.zeros(idx.shape, dtype=float)
    for u, v, w in graph.edges:
        out += w * (((idx >> u) ^ (idx >> v)) & 1)
    return out


def cut_table(graph: WeightedGraph) -> np.ndarray:
    """Cut values of all 2**n bitstrings."""
    if graph.n_vertices > BRUTE_FORCE_MAX_VERTICES:
        raise CapacityError(f"{graph.n_vertices} vertices exceed the {BRUTE_FORCE_MAX_VERTICES}-vertex bound")
    return cut_values_of_indices(graph, np.arange(1 << graph.n_vertices))


def index_to_partition(index: int, n: int) -> Partition:
    return tuple((index >> k) & 1 for k in range(n))


def partition_to_index(partition: Iterable[int]) -> int:
    return sum(int(b) << k for k, b in enumerate(partition))


class MaxCutSolution(NamedTuple):
    best_value: float
    optimal_partitions: frozenset[Partition]

    def canonical(self) -> Partition:
        """Lexicographically smallest optimizer."""
        return min(self.optimal_partitions)


def brute_force_maxcut(graph: WeightedGraph, chunk: int = 1 << 18) -> MaxCutSolution:
    """Exhaustive MaxCut over the 2**(n-1) partitions with vertex 0 on side 0.

    All optimizers are returned (one representative per global-flip pair).
    """
    n = graph.n_vertices
    if n > BRUTE_FORCE_MAX_VERTICES:
        raise CapacityError(f"{n} vertices exceed the {BRUTE_FORCE_MAX_VERTICES}-vertex brute-force bound")
    half = 1 << (n - 1)
    tol = 1e-9 * max(1.0, graph.total_weight)
    best = -math.inf
    winners: list[np.ndarray] = []
    for start in range(0, half, chunk):
        idx = (np.arange(start, min(start + chunk, half), dtype=np.int64)) << 1
        vals = cut_values_of_indices(graph, idx)
        m = vals.max()
        if m > best + tol:
            best = m
            winners = []
        if m >= best - tol:
            winners.append(idx[vals >= best - tol])
    best = float(best)
    opt = frozenset(index_to_partition(int(i), n) for arr in winners for i in arr)
    return MaxCutSolution(best, opt)
