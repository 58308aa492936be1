"""Experiment harness: per-iteration metrics, summaries and merged comparisons.

An iteration is a budget of ``m`` edge updates.  Coordinate methods emit one
row per pass (or per epoch, normalised by ``m``), MWU one row per round and
the area-convexity solver one row per binary-search probe indexed by its
cumulative outer steps.  ``wall_ms`` counts solver time only: parsing and
metric bookkeeping are excluded.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graph import DensityValue, Graph, read_edge_list

__all__ = ["ALGORITHMS", "METRIC_HEADER", "RunConfig", "RunResult", "run", "run_graph", "compare",
           "write_metrics", "write_summary", "write_table"]

METRIC_HEADER = ["iteration", "wall_ms", "best_density", "load_norm"]
ALGORITHMS = ("mwu", "ac", "acdm", "acdm-ref", "rcdm", "greedy", "greedypp")
COORDINATE = ("acdm", "acdm-ref", "rcdm")


@dataclass
class RunConfig:
    input: str | None = None
    algo: str = "acdm"
    eps: float = 0.1
    passes: int | None = None
    seed: int = 0
    init: str = "greedy"
    out_metrics: str | None = None
    out_summary: str | None = None
    out_decomposition: str | None = None
    label: str | None = None

    def validate(self):
        if self.algo not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algo!r}; choose from {', '.join(ALGORITHMS)}")
        if self.algo == "mwu" and not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        if self.algo == "ac" and not 0 < self.eps < 1 / 6:
            raise ValueError("eps must lie in (0, 1/6) for ac")
        if self.passes is not None and self.passes < 1:
            raise ValueError("passes must be at least 1")


@dataclass
class RunResult:
    config: RunConfig
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    decomposition: dict | None = None


class _Clock:
    """Accumulates solver time between checkpoints, skipping bookkeeping."""

    def __init__(self):
        self.elapsed = 0.0
        self._mark = time.perf_counter()

    def pause(self) -> float:
        self.elapsed += time.perf_counter() - self._mark
        return self.elapsed * 1e3

    def resume(self):
        self._mark = time.perf_counter()


class _Rows:
    def __init__(self):
        self.rows = []
        self.best: DensityValue | None = None
        self.best_set = None

    def offer(self, verts, dens: DensityValue):
        if self.best is None or dens > self.best:
            self.best, self.best_set = dens, verts

    def add(self, iteration, wall_ms, best_value=None, load_norm=None):
        best = self.best.value if self.best is not None else 0.0
        if best_value is not None:
            best = max(best, best_value)
        if self.rows:
            best = max(best, self.rows[-1][2])
        self.rows.append((iteration, wall_ms, best, load_norm))


def _default_passes(algo: str) -> int:
    return {"acdm": 100, "rcdm": 100, "acdm-ref": 10, "greedypp": 50}.get(algo, 1)


def _coordinate(graph: Graph, cfg: RunConfig, rows: _Rows, clock: _Clock):
    from .decomposition import acdm, acdm_practical, default_inner_steps, rcdm
    from .rounding import charikar_sweep

    passes = cfg.passes or _default_passes(cfg.algo)
    m = graph.m
    state = {"updates": 0}

    def callback(p, z, b, f):
        clock.pause()
        verts, dens = charikar_sweep(graph, b)
        rows.offer(verts, dens)
        if cfg.algo == "acdm-ref":
            state["updates"] += per_epoch
            it = state["updates"] / m
        else:
            it = p + 1
        rows.add(it, clock.elapsed * 1e3, load_norm=math.sqrt(f))
        clock.resume()

    if cfg.algo == "acdm":
        res = acdm_practical(graph, passes, seed=cfg.seed, init=cfg.init, callback=callback)
    elif cfg.algo == "rcdm":
        res = rcdm(graph, passes, seed=cfg.seed, init=cfg.init, callback=callback)
    else:
        T = default_inner_steps(graph)
        per_epoch = T  # expected updates per epoch: T steps of one edge on average
        res = acdm(graph, passes, T=T, seed=cfg.seed, init=cfg.init, callback=callback)
    extra = {"passes": passes, "f": res.f, "load_norm": math.sqrt(res.f), "edge_updates": res.updates,
             "init": cfg.init}
    if cfg.algo == "acdm-ref":
        extra["inner_steps"] = res.meta["T"]
    return res, extra


_WARM: set = set()


def _warm_up(cfg: RunConfig) -> None:
    """Run the solver once on a tiny graph so JIT loading stays out of the timings."""
    if cfg.algo in _WARM:
        return
    _WARM.add(cfg.algo)
    tiny = Graph.from_edges(4, [(0, 1), (0, 2), (1, 2), (2, 3)])
    run_graph(tiny, RunConfig(algo=cfg.algo, eps=0.15, passes=2, init=cfg.init), warm=False)


def run_graph(graph: Graph, cfg: RunConfig, parse_ms: float = 0.0, warm: bool = True) -> RunResult:
    """Run one configuration on an already-loaded graph."""
    cfg.validate()
    if graph.m == 0:
        raise ValueError("graph has no edges")
    if warm:
        _warm_up(cfg)
    rows = _Rows()
    extra: dict = {}
    decomposition = None
    clock = _Clock()
    if cfg.algo == "mwu":
        from .mwu import mwu_solve
        from .rounding import charikar_sweep, construct_primal

        def cb(t, D, p, z):
            clock.pause()
            rows.add(t + 1, clock.elapsed * 1e3, best_value=D)
            clock.resume()

        run_ = mwu_solve(graph, cfg.eps, callback=cb)
        primal = construct_primal(graph, run_.p_tau, run_.z_tau, run_.D_tau)
        verts, dens = charikar_sweep(graph, primal.x)
        clock.pause()
        rows.offer(verts, dens)
        last = rows.rows.pop()
        rows.add(last[0], clock.elapsed * 1e3, best_value=last[2])
        extra = {"rounds": run_.T, "D_tau": run_.D_tau, "tau": run_.tau,
                 "edge_updates": run_.T * 2 * graph.m,
                 "min_edge_cover": float((run_.zbar[0::2] + run_.zbar[1::2]).min())}
    elif cfg.algo == "ac":
        from .area_convexity import ac_densest, recover_primal_ac

        state = {"steps": 0, "rounds": 0}

        def on_probe(pr):
            clock.pause()
            state["steps"] += pr.result.T
            state["rounds"] += pr.result.oracle_rounds
            verts, dens = recover_primal_ac(graph, pr.result.point.y, pr.D)
            rows.offer(verts, dens)
            rows.add(state["steps"], clock.elapsed * 1e3)
            clock.resume()

        res = ac_densest(graph, cfg.eps, on_probe=on_probe)
        clock.pause()
        state["steps"] += res.final.T
        state["rounds"] += res.final.oracle_rounds
        rows.offer(res.vertices, res.density)
        rows.add(state["steps"], clock.elapsed * 1e3)
        extra = {"D_tilde": res.D_tilde, "D_bar": res.D_bar, "probes": len(res.search.probes),
                 "outer_steps": state["steps"], "oracle_rounds": state["rounds"],
                 # each outer step makes two oracle calls; each oracle round touches every incidence
                 "edge_updates": state["rounds"] * 2 * graph.m}
    elif cfg.algo in COORDINATE:
        from .decomposition import fractional_peel

        res, extra = _coordinate(graph, cfg, rows, clock)
        clock.pause()
        dec = fractional_peel(graph, res.z, res.b)
        rows.offer(dec.blocks[0], dec.densities[0])
        if rows.rows:
            last = rows.rows.pop()
            rows.add(last[0], last[1], load_norm=last[3])
        dec.meta.update({"algorithm": cfg.algo, "seed": cfg.seed, "passes": extra["passes"]})
        decomposition = dec.to_dict(graph)
    elif cfg.algo == "greedy":
        from .baselines import greedy_peel

        tr = greedy_peel(graph)
        clock.pause()
        rows.offer(tr.best_set, tr.best_density)
        rows.add(1, clock.elapsed * 1e3)
    else:
        from .baselines import greedy_pp

        passes = cfg.passes or _default_passes(cfg.algo)

        load = np.zeros(graph.n)

        def cb(t, trace, best):
            clock.pause()
            rows.offer(trace.best_set, trace.best_density)
            # the average peel load approaches the optimal load vector
            load[trace.order] += trace.degree_at_removal
            rows.add(t + 1, clock.elapsed * 1e3, load_norm=float(np.linalg.norm(load / (t + 1))))
            clock.resume()

        res = greedy_pp(graph, passes, callback=cb)
        clock.pause()
        extra = {"passes": passes, "load_norm": float(np.linalg.norm(res.loads / passes))}
    verts, dens = rows.best_set, rows.best
    summary = {
        "algorithm": cfg.algo,
        "input": cfg.input,
        "n": graph.n,
        "m": graph.m,
        "eps": cfg.eps if cfg.algo in ("mwu", "ac") else None,
        "seed": cfg.seed,
        "best_set_size": int(dens.size),
        "best_set_edges": int(dens.edges),
        "density": dens.value,
        "density_fraction": str(dens),
        "vertices": graph.original_ids(verts),
        "iterations": len(rows.rows),
        "parse_ms": parse_ms,
        "solve_ms": clock.elapsed * 1e3,
        **extra,
    }
    return RunResult(cfg, rows.rows, summary, decomposition)


def run(cfg: RunConfig) -> RunResult:
    """Load ``cfg.input``, run the solver and write any requested outputs."""
    cfg.validate()
    if cfg.input is None:
        raise ValueError("no input file given")
    t0 = time.perf_counter()
    graph = read_edge_list(cfg.input)
    parse_ms = (time.perf_counter() - t0) * 1e3
    result = run_graph(graph, cfg, parse_ms)
    if cfg.out_metrics:
        write_metrics(result.rows, cfg.out_metrics)
    if cfg.out_summary:
        write_summary(result.summary, cfg.out_summary)
    if cfg.out_decomposition:
        if result.decomposition is None:
            raise ValueError(f"algorithm {cfg.algo!r} does not produce a decomposition")
        write_summary(result.decomposition, cfg.out_decomposition)
    return result


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_metrics(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(METRIC_HEADER)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_summary(summary: dict, path) -> None:
    Path(path).write_text(json.dumps(summary, indent=2, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialise {type(o).__name__}")


def _labels(configs) -> list[str]:
    base = [c.label or c.algo for c in configs]
    out = []
    for c, b in zip(configs, base):
        out.append(b if base.count(b) == 1 or c.label else f"{b}-seed{c.seed}")
    if len(set(out)) != len(out):
        raise ValueError("configurations are indistinguishable; give them labels")
    return out


def compare(configs, graph: Graph | None = None):
    """Run several configurations on one input and merge their tables by iteration.

    Returns ``(header, rows, results)``: the header is ``iteration`` followed by
    ``<label>_wall_ms, <label>_best_density, <label>_load_norm`` per run.
    """
    if not configs:
        raise ValueError("no configurations")
    inputs = {c.input for c in configs}
    if len(inputs) != 1:
        raise ValueError(f"configurations use different inputs: {sorted(map(str, inputs))}")
    for c in configs:
        c.validate()
    parse_ms = 0.0
    if graph is None:
        t0 = time.perf_counter()
        graph = read_edge_list(configs[0].input)
        parse_ms = (time.perf_counter() - t0) * 1e3
    results = [run_graph(graph, c, parse_ms) for c in configs]
    if len(configs) == 1:
        return list(METRIC_HEADER), list(results[0].rows), results
    labels = _labels(configs)
    header = ["iteration"]
    for lab in labels:
        header += [f"{lab}_wall_ms", f"{lab}_best_density", f"{lab}_load_norm"]
    iters = sorted({r[0] for res in results for r in res.rows})
    lookup = [{r[0]: r[1:] for r in res.rows} for res in results]
    merged = []
    for it in iters:
        row = [it]
        for table in lookup:
            row += list(table.get(it, (None, None, None)))
        merged.append(row)
    return header, merged, results


def write_table(header, rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
