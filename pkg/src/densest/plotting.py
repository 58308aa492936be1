"""Trajectory figures for benchmark runs.

matplotlib is imported lazily so the solvers never depend on it.
"""

from __future__ import annotations

from pathlib import Path

__all__ = ["plot_runs"]

PANELS = (
    ("iteration", "best_density", "Iteration", "Best density", "iteration-bestdensity"),
    ("wall_ms", "best_density", "Time (ms)", "Best density", "time-bestdensity"),
    ("iteration", "load_norm", "Iteration", "Load norm", "iteration-loadnorm"),
)


def _pyplot():
    try:
        import matplotlib
    except ImportError as exc:  # pragma: no cover - optional extra
        raise RuntimeError("plotting needs matplotlib (pip install 'artifact[plot]')") from exc
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_runs(runs: dict, out_dir, stem: str = "bench") -> list[Path]:
    """Write one PNG per panel.

    ``runs`` maps a legend label to its metric rows
    ``(iteration, wall_ms, best_density, load_norm)``.  Panels without any
    data (e.g. load norms for MWU only) are skipped.
    """
    plt = _pyplot()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    col = {"iteration": 0, "wall_ms": 1, "best_density": 2, "load_norm": 3}
    written = []
    for xkey, ykey, xlabel, ylabel, name in PANELS:
        fig, ax = plt.subplots(figsize=(5, 3.5))
        drawn = 0
        lo, hi = float("inf"), 0.0
        for label, rows in runs.items():
            pts = [(r[col[xkey]], r[col[ykey]]) for r in rows if r[col[ykey]] is not None]
            if not pts:
                continue
            xs, ys = zip(*pts)
            lo, hi = min(lo, min(ys)), max(hi, max(ys))
            ax.plot(xs, ys, label=label, marker="." if len(xs) < 30 else None)
            drawn += 1
        if not drawn:
            plt.close(fig)
            continue
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if ykey == "load_norm" and lo > 0 and hi / lo >= 10:
            ax.set_yscale("log")
        ax.grid(alpha=0.3)
        ax.legend(fontsize=8)
        fig.tight_layout()
        path = out_dir / f"{stem}-{name}.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written
