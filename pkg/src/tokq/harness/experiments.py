"""Runners for the three transfer protocols and instance generation.

Each runner takes a validated :class:`ExperimentConfig`, writes its CSV
results (plus a summary CSV, a JSON manifest and optional SVG figures) and
returns the manifest dict. All randomness is derived from the master seed
through :func:`tokq.seeding.split_seed`, so outputs are byte-identical for
identical configurations.
"""
from __future__ import annotations

import csv
import json
import math
import os
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .. import __version__
from ..annealing import (
    ReverseSchedule,
    forward_anneal,
    ising_from_maxcut,
    reverse_anneal,
    spins_to_partition,
)
from ..instances import (
    PerturbationSpec,
    brute_force_maxcut,
    WeightedGraph,
    cut_value,
    generate_base_instance,
    load_instance,
    modify_edges,
    perturb,
    save_instance,
)
from ..optimizers import SpsaConfig
from ..qaoa import TransferConfig, run_multitask
from ..seeding import split_seed
from ..vqe import H2Table, default_h2_table, load_h2_table, run_sweep
from .config import AUTO, ConfigError, ExperimentConfig
from .plots import emit_boxplot, emit_errorbars, emit_lines
from .stats import summarize


@dataclass(frozen=True)
class TransferTag:
    what: str   # individual | parameter | feature-representation | relational
    how: str    # sequential | multitasking


TRANSFER_TAGS = {
    "uc1": TransferTag("individual", "sequential"),
    "uc2": TransferTag("parameter", "multitasking"),
    "uc3": TransferTag("parameter", "sequential"),
}


def max_workers() -> int:
    env = os.environ.get("TOKQ_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def pmap(fn: Callable, items: Sequence) -> list:
    """Order-preserving map over a thread pool capped by ``TOKQ_THREADS``."""
    items = list(items)
    workers = min(max_workers(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def _num(x) -> str:
    if x is None:
        return "NA"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_num(x) for x in row])
    return path


def _sibling(out: Path, suffix: str) -> Path:
    return out.with_name(out.stem + suffix)


def _versions() -> dict:
    import numba

    return {"tokq": __version__, "python": platform.python_version(), "numpy": np.__version__,
            "numba": numba.__version__}


def _spsa(cfg: ExperimentConfig, iterations: int) -> SpsaConfig:
    a = cfg["spsa-a"]
    big_a = cfg["spsa-big-a"]
    return SpsaConfig(iterations=iterations, a=None if a == AUTO else a, c=cfg["spsa-c"],
                      A=None if big_a == AUTO else big_a, alpha=cfg["spsa-alpha"],
                      gamma_exp=cfg["spsa-gamma"], target_step=cfg["target-step"])


def _finish(cfg: ExperimentConfig, out: Path, outputs: list[Path], seeds: dict, summary: dict,
            started: float) -> dict:
    manifest = {
        "use_case": cfg.use_case,
        "config": cfg.echo(),
        "transfer_tag": asdict(TRANSFER_TAGS[cfg.use_case]) if cfg.use_case in TRANSFER_TAGS else None,
        "seeds": seeds,
        "versions": _versions(),
        "wall_time_s": round(time.perf_counter() - started, 3),
        "outputs": [str(p) for p in outputs],
        "summary": summary,
    }
    path = _sibling(out, ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2, default=_json_default) + "\n")
    manifest["outputs"].append(str(path))
    return manifest


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o))


# --- instances ----------------------------------------------------------------------

def base_name(n: int) -> str:
    return f"MaxCut_{n}"


def build_uc1_instances(base: WeightedGraph, seed: int, fractions: Sequence[int],
                        unrelated: bool) -> list[tuple[str, WeightedGraph]]:
    """Perturbed derivatives ``MaxCut_<n>_<X>`` and the regenerated ``MaxCut_<n>_100``."""
    n = base.n_vertices
    out = []
    for x in fractions:
        spec = PerturbationSpec(x / 100.0, split_seed(seed, "perturb", x))
        out.append((f"{base_name(n)}_{x}", perturb(base, spec)))
    if unrelated:
        spec = PerturbationSpec(1.0, split_seed(seed, "unrelated"), "regenerate-all")
        out.append((f"{base_name(n)}_100", perturb(base, spec)))
    return out


def generated_base(n: int, density: float, seed: int) -> WeightedGraph:
    return generate_base_instance(n, density, split_seed(seed, "base"))


def run_gen_instances(cfg: ExperimentConfig) -> dict:
    started = time.perf_counter()
    out_dir = Path(cfg["out-dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    base = generated_base(cfg["n"], cfg["density"], cfg["seed"])
    insts = [(base_name(base.n_vertices), base)]
    insts += build_uc1_instances(base, cfg["seed"], cfg["perturb-fractions"], cfg["unrelated"])
    outputs = []
    rows = []
    for name, g in insts:
        path = out_dir / f"{name}.txt"
        save_instance(g, path)
        outputs.append(path)
        rows.append((name, g.n_vertices, g.n_edges, g.is_connected()))
    index = write_csv(out_dir / "instances.csv", ["instance", "n_vertices", "n_edges", "connected"], rows)
    outputs.append(index)
    summary = {name: {"n_edges": g.n_edges, "connected": g.is_connected()} for name, g in insts}
    return _finish(cfg, out_dir / "instances.csv", outputs, {"master": cfg["seed"]}, summary, started)


# --- UC1: seeded reverse annealing --------------------------------------------------

BASELINE = "forward-baseline"


def run_uc1(cfg: ExperimentConfig) -> dict:
    started = time.perf_counter()
    seed = cfg["seed"]
    if cfg["base"] == "gen":
        base = generated_base(cfg["n"], cfg["density"], seed)
    else:
        base = load_instance(cfg["base"])
    sources = build_uc1_instances(base, seed, cfg["fractions"], cfg["unrelated"])
    model = ising_from_maxcut(base)
    sweeps = None if cfg["sweeps"] == AUTO else cfg["sweeps"]
    t_max = None if cfg["t-max"] == AUTO else cfg["t-max"]
    ra_t_max = None if cfg["ra-t-max"] == AUTO else cfg["ra-t-max"]
    reads, runs = cfg["reads"], cfg["runs"]
    schedule = ReverseSchedule(s_target=cfg["s-target"], hold_time=cfg["hold"], ramp_slope=cfg["ramp"],
                               num_reads=reads, reinitialize=cfg["reinitialize"], ramp_scale=cfg["ramp-scale"])
    source_models = {name: ising_from_maxcut(g) for name, g in sources}

    def task(item):
        name, run = item
        if name == BASELINE:
            res = forward_anneal(model, sweeps, reads, t_max, split_seed(seed, "uc1-baseline", run))
            seed_cut = None
        else:
            src = forward_anneal(source_models[name], sweeps, reads, t_max,
                                 split_seed(seed, f"uc1-source:{name}", run))
            state = src.best[0]
            seed_cut = cut_value(base, spins_to_partition(state))
            res = reverse_anneal(model, state, schedule, ra_t_max, split_seed(seed, f"uc1-reverse:{name}", run))
        cuts = -res.energies
        st = summarize(cuts)
        return name, run, float(cuts.max()), st.median, st.iqr, seed_cut

    items = [(BASELINE, r) for r in range(runs)] + [(name, r) for name, _ in sources for r in range(runs)]
    results = pmap(task, items)

    out = Path(cfg["out"])
    outputs = [write_csv(out, ["source_instance", "run", "best_cut", "median_cut", "iqr"],
                         [r[:5] for r in results])]
    order = [BASELINE] + [name for name, _ in sources]
    groups = {name: [r[2] for r in results if r[0] == name] for name in order}
    seed_cuts = {name: [r[5] for r in results if r[0] == name] for name in order[1:]}
    summary_rows = []
    summary = {}
    for name in order:
        st = summarize(groups[name])
        sc = summarize(seed_cuts[name]).median if name in seed_cuts else None
        summary_rows.append((name, st.n, st.median, st.iqr, st.mean, st.stderr, sc))
        summary[name] = {"median": st.median, "iqr": st.iqr, "mean": st.mean, "stderr": st.stderr,
                         "seed_cut_median": sc}
    outputs.append(write_csv(_sibling(out, "_summary.csv"),
                             ["source_instance", "runs", "median_best_cut", "iqr_best_cut", "mean_best_cut",
                              "stderr_best_cut", "median_seed_cut_on_base"], summary_rows))
    medians = [summary[name]["median"] for name in order[1:] if not name.endswith("_100")]
    summary["_chain_monotone"] = all(a >= b for a, b in zip(medians, medians[1:]))
    if cfg["plot"]:
        outputs.append(emit_boxplot(groups, _sibling(out, "_boxplot.svg"),
                                    title="UC1: best cut per run", ylabel="cut value"))
    seeds = {"master": seed, "base_instance": split_seed(seed, "base") if cfg["base"] == "gen" else None}
    return _finish(cfg, out, outputs, seeds, summary, started)


# --- UC2: multitask Transfer-QAOA ---------------------------------------------------

def build_uc2_graphs(n: int, k: int, density: float, modify_frac: float, seed: int) -> list[WeightedGraph]:
    root = generate_base_instance(n, density, split_seed(seed, "uc2-root"))
    return [modify_edges(root, modify_frac, split_seed(seed, "uc2-graph", i)) for i in range(k)]


def run_uc2(cfg: ExperimentConfig) -> dict:
    started = time.perf_counter()
    seed = cfg["seed"]
    graphs = build_uc2_graphs(cfg["n"], cfg["k"], cfg["density"], cfg["modify-frac"], seed)
    steps = cfg["steps"]
    kp = None if cfg["k-prime"] == AUTO else cfg["k-prime"]
    if kp is not None and kp > steps:
        raise ConfigError("k-prime", f"must not exceed steps={steps}")
    spsa = _spsa(cfg, cfg["transfers"] * steps)
    p = cfg["p"]
    strategies = cfg["strategy"]
    n_seeds = cfg["seeds"]

    def task(item):
        strategy, s = item
        tc = TransferConfig(cfg["transfers"], steps, kp, strategy)
        return strategy, s, run_multitask(graphs, p, tc, split_seed(seed, "uc2-run", s), spsa)

    results = pmap(task, [(st, s) for st in strategies for s in range(n_seeds)])

    rows, ev_rows = [], []
    per_strategy: dict[str, list[float]] = {st: [] for st in strategies}
    per_graph: dict[str, list[list[float]]] = {st: [[] for _ in graphs] for st in strategies}
    sound = True
    for strategy, s, rep in results:
        for g in rep.graphs:
            evs = rep.events_for(g.graph_id)
            n_adopt = sum(e.kind in ("adoption", "rollback-keep") for e in evs)
            n_roll = sum(e.kind == "rollback-discard" for e in evs)
            rows.append((strategy, s, g.graph_id, g.expected_cut, g.success_probability, n_adopt, n_roll))
            per_graph[strategy][g.graph_id].append(g.success_probability)
        per_strategy[strategy].append(rep.mean_success)
        for e in rep.events:
            ev_rows.append((strategy, s, e.block_index, e.target_graph, e.source_graph,
                            e.expected_cut_before, e.expected_cut_after, e.kind))
            if e.kind in ("adoption", "rollback-keep") and not e.expected_cut_after > e.expected_cut_before:
                sound = False
            if e.expected_cut_after < e.expected_cut_before:
                sound = False

    out = Path(cfg["out"])
    outputs = [write_csv(out, ["strategy", "seed", "graph_id", "final_expected_cut", "success_prob",
                               "n_adoptions", "n_rollbacks"], rows)]
    outputs.append(write_csv(_sibling(out, "_events.csv"),
                             ["strategy", "seed", "block", "target_graph", "source_graph",
                              "expected_cut_before", "expected_cut_after", "kind"], ev_rows))
    summary = {"events_sound": sound, "max_cut": [brute_force_maxcut(g).best_value for g in graphs]}
    srows = []
    for st in strategies:
        agg = summarize(per_strategy[st])
        summary[st] = {"mean_success": agg.mean, "stderr_success": agg.stderr,
                       "per_graph_mean": [float(np.mean(v)) for v in per_graph[st]]}
        srows.append((st, agg.n, agg.mean, agg.stderr, 100 * agg.mean, 100 * agg.stderr))
    outputs.append(write_csv(_sibling(out, "_summary.csv"),
                             ["strategy", "seeds", "mean_success", "stderr_success", "mean_success_pct",
                              "stderr_success_pct"], srows))
    if cfg["plot"]:
        pts = []
        for gid in range(len(graphs)):
            for st in strategies:
                agg = summarize(per_graph[st][gid])
                pts.append((f"G{gid}:{st}", agg.mean, agg.stderr))
        outputs.append(emit_errorbars(pts, _sibling(out, "_success.svg"),
                                      title="UC2: success probability per graph", ylabel="success probability"))
    seeds = {"master": seed, "root_graph": split_seed(seed, "uc2-root"),
             "runs": [split_seed(seed, "uc2-run", s) for s in range(n_seeds)]}
    return _finish(cfg, out, outputs, seeds, summary, started)


# --- UC3: sequential VQE sweep ------------------------------------------------------

def _table(cfg: ExperimentConfig) -> H2Table:
    return default_h2_table() if cfg["table"] == "default" else load_h2_table(cfg["table"])


def run_uc3(cfg: ExperimentConfig) -> dict:
    started = time.perf_counter()
    seed = cfg["seed"]
    table = _table(cfg)
    spsa = _spsa(cfg, cfg["iters"])
    mode = cfg["mode"]
    runs = cfg["runs"]
    wrap = cfg["wrap"]
    focus = cfg["focus-r"]
    try:
        focus_idx = table.index_of(focus)
    except KeyError:
        raise ConfigError("focus-r", f"no table row at r={focus}") from None

    results = pmap(lambda r: run_sweep(table, spsa, mode, split_seed(seed, "uc3-run", r), wrap), range(runs))

    rows = []
    for run, sw in enumerate(results):
        for pt in sw.points:
            rows.append((mode, run, pt.r, pt.theta_final, pt.energy, pt.exact_energy, pt.ica))
    out = Path(cfg["out"])
    outputs = [write_csv(out, ["mode", "run", "r", "theta_final", "energy", "exact_energy", "ica"], rows)]

    srows = []
    for i, row in enumerate(table):
        pts = [sw.points[i] for sw in results]
        icas = [math.inf if p.ica is None else p.ica for p in pts]
        med = summarize(icas).median if all(math.isfinite(x) for x in icas) else float(np.median(icas))
        e = summarize([p.energy for p in pts])
        srows.append((row.r, pts[0].exact_energy, e.mean, e.stderr, None if not math.isfinite(med) else med,
                      sum(p.ica is None for p in pts)))
    outputs.append(write_csv(_sibling(out, "_summary.csv"),
                             ["r", "exact_energy", "mean_energy", "stderr_energy", "median_ica", "not_reached"],
                             srows))
    fp = [sw.points[focus_idx] for sw in results]
    focus_icas = [math.inf if p.ica is None else p.ica for p in fp]
    fmed = float(np.median(focus_icas))
    summary = {"focus_r": focus, "focus_median_ica": None if not math.isfinite(fmed) else fmed,
               "focus_not_reached": sum(p.ica is None for p in fp),
               "min_gap_to_exact": min(p.energy - p.exact_energy for sw in results for p in sw.points)}
    if cfg["plot"]:
        rs = [row.r for row in table]
        energies = np.array([[p.energy for p in sw.points] for sw in results])
        outputs.append(emit_lines(
            {f"VQE ({mode})": (rs, energies.mean(axis=0)), "exact": (rs, [p.exact_energy for p in results[0].points])},
            _sibling(out, "_energy.svg"), title="H2 ground-state energy", xlabel="bond length (A)",
            ylabel="energy (Ha)", bands={f"VQE ({mode})": (energies.min(axis=0), energies.max(axis=0))}))
        err = np.array([np.abs(np.asarray(p.trace.objective) - p.exact_energy) for p in fp])
        it = list(range(err.shape[1]))
        outputs.append(emit_lines({f"|E - exact| at r={focus}": (it, err.mean(axis=0))},
                                  _sibling(out, "_convergence.svg"), title=f"Convergence at r={focus} A ({mode})",
                                  xlabel="iteration", ylabel="energy error (Ha)",
                                  bands={f"|E - exact| at r={focus}": (err.min(axis=0), err.max(axis=0))}))
    seeds = {"master": seed, "runs": [split_seed(seed, "uc3-run", r) for r in range(runs)]}
    return _finish(cfg, out, outputs, seeds, summary, started)


RUNNERS = {
    "gen-instances": run_gen_instances,
    "uc1": run_uc1,
    "uc2": run_uc2,
    "uc3": run_uc3,
}


def run_experiment(config: ExperimentConfig) -> int:
    """Dispatch to the runner for ``config.use_case``; returns the exit status."""
    RUNNERS[config.use_case](config)
    return 0
