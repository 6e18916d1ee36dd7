"""Drawing routines: one image per experiment tag.

Input CSVs follow the solver CLI's documented headers; a missing column is
an error naming both the column and the file.  Analytic curves are drawn
dashed (red) over solid empirical ones throughout.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .spec import FigureSpec

__all__ = ["render", "load_csv", "require_columns"]

ANALYTIC = dict(color="tab:red", linestyle="--", linewidth=1.4)


def load_csv(path: Path) -> np.ndarray:
    data = np.genfromtxt(path, delimiter=",", names=True)
    if data.dtype.names is None:
        raise ValueError(f"{path}: no header row")
    return np.atleast_1d(data)


def require_columns(data: np.ndarray, columns: list[str], path: Path) -> None:
    for col in columns:
        if col not in (data.dtype.names or ()):
            raise KeyError(f"missing column {col!r} in {path}")


def _input(spec: FigureSpec, name: str) -> Path:
    try:
        return spec.inputs[name]
    except KeyError:
        raise KeyError(f"figure {spec.tag}: manifest lacks input {name!r}") from None


def _load(spec: FigureSpec, name: str, columns: list[str]) -> np.ndarray:
    path = _input(spec, name)
    data = load_csv(path)
    require_columns(data, columns, path)
    return data


def _histogram_panel(ax, spec, hist_name, density=None, title=""):
    hist = _load(spec, hist_name, ["bin_left", "bin_right", "density"])
    ax.bar(hist["bin_left"], hist["density"],
           width=hist["bin_right"] - hist["bin_left"], align="edge",
           color="tab:blue", alpha=0.7)
    if density is not None:
        ax.plot(density["x"], density["p"], **ANALYTIC)
    ax.set_xlabel("reserve level")
    ax.set_title(title)


def _render_f1(spec, fig):
    data = _load(spec, "picard_iterates", ["t", "e_1"])
    ax = fig.subplots()
    names = [n for n in data.dtype.names if n.startswith("e_")]
    for name in names:
        ax.plot(data["t"], data[name], linewidth=0.9)
    ax.set_xlabel("t")
    ax.set_ylabel("expected defaults per bank")
    ax.set_title(f"Picard iterates of the default-count map ({len(names)} curves)")


def _render_f2(spec, fig):
    data = _load(spec, "e0_surface", ["a", "x0", "e0"])
    ax = fig.subplots()
    a_vals = np.unique(data["a"])
    x0_vals = np.unique(data["x0"])
    grid = data["e0"].reshape(a_vals.size, x0_vals.size)
    mesh = ax.pcolormesh(x0_vals, a_vals, grid, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="stationary default rate e0")
    ax.set_xlabel("x0")
    ax.set_ylabel("a")
    ax.set_title("Stationary default rate over (a, x0)")


def _render_density_comparison(spec, fig):
    density = _load(spec, "density_analytic", ["x", "p"])
    axes = fig.subplots(1, 3)
    axes[0].plot(density["x"], density["p"], **ANALYTIC)
    axes[0].set_title("closed form")
    axes[0].set_xlabel("reserve level")
    _histogram_panel(axes[1], spec, "hist_ps", density, "interacting system")
    _histogram_panel(axes[2], spec, "hist_mfsta", density, "frozen-mean system")


def _render_f5(spec, fig):
    axes = fig.subplots(1, 2)
    for ax, suffix, title in ((axes[0], "a_small", "weak reversion"),
                              (axes[1], "a_large", "strong reversion")):
        for variant, style in (("ps", dict(color="tab:green", linestyle="--")),
                               ("mfsta", dict(color="tab:blue"))):
            mean = _load(spec, f"mean_{variant}_{suffix}", ["t", "mean"])
            ax.plot(mean["t"], mean["mean"], label=variant, **style)
        ax.axhline(2.0, **ANALYTIC)
        ax.set_xlabel("t")
        ax.set_title(title)
        ax.legend()
    axes[0].set_ylabel("empirical average")


def _render_f6(spec, fig):
    axes = fig.subplots(1, 2)
    for variant, style in (("ps", dict(color="tab:green", linestyle="--")),
                           ("mfsta", dict(color="tab:blue"))):
        d = _load(spec, f"defaults_{variant}", ["t", "rate", "cumulative"])
        axes[0].plot(d["t"], d["rate"], label=variant, **style)
        axes[1].plot(d["t"], d["cumulative"], label=variant, **style)
    axes[0].set_title("default rate")
    axes[1].set_title("cumulative defaults")
    for ax in axes:
        ax.set_xlabel("t")
        ax.legend()


def _render_f7(spec, fig):
    axes = fig.subplots(2, 2)
    for ax, name, title in ((axes[0, 0], "u_t0", "value at t = 0"),
                            (axes[0, 1], "u_tmid", "value at mid horizon"),
                            (axes[1, 0], "u_tend", "value at the horizon")):
        d = _load(spec, name, ["x", "u_numeric", "u_ansatz"])
        ax.plot(d["x"], d["u_numeric"], color="tab:blue", label="numeric")
        ax.plot(d["x"], d["u_ansatz"], label="ansatz", **ANALYTIC)
        ax.set_title(title)
        ax.legend()
    d = _load(spec, "m_final", ["x", "m_numeric", "m_ansatz"])
    axes[1, 1].plot(d["x"], d["m_numeric"], color="tab:blue", label="numeric")
    axes[1, 1].plot(d["x"], d["m_ansatz"], label="closed form", **ANALYTIC)
    axes[1, 1].set_title("plateau density")
    axes[1, 1].legend()


def _render_f8(spec, fig):
    labels = sorted({n.split("summary_", 1)[1] for n in spec.inputs if n.startswith("summary_")})
    axes = fig.subplots(1, 3)
    for label in labels:
        s = _load(spec, f"summary_{label}", ["t", "mean", "default_rate"])
        m = _load(spec, f"m_final_{label}", ["x", "m"])
        axes[0].plot(m["x"], m["m"], label=label)
        axes[1].plot(s["t"], s["mean"], label=label)
        axes[2].plot(s["t"], s["default_rate"], label=label)
    for ax, title in zip(axes, ("final density", "mean value", "default rate")):
        ax.set_title(title)
        ax.legend(fontsize=7)
    axes[0].set_xlabel("reserve level")
    axes[1].set_xlabel("t")
    axes[2].set_xlabel("t")


def _render_f9(spec, fig):
    axes = fig.subplots(1, 2)
    for ax, name, title in ((axes[0], "m_surface", "density m(t, x)"),
                            (axes[1], "u_surface", "value u(t, x)")):
        d = _load(spec, name, ["n", "i", "value"])
        n_vals = np.unique(d["n"]).size
        i_vals = np.unique(d["i"]).size
        grid = d["value"].reshape(n_vals, i_vals)
        mesh = ax.pcolormesh(np.arange(i_vals), np.arange(n_vals), grid,
                             shading="nearest", cmap="viridis")
        fig.colorbar(mesh, ax=ax)
        ax.set_xlabel("space index")
        ax.set_ylabel("time index")
        ax.set_title(title)


_RENDERERS = {
    "F1": _render_f1,
    "F2": _render_f2,
    "F3": _render_density_comparison,
    "F4": _render_density_comparison,
    "F5": _render_f5,
    "F6": _render_f6,
    "F7": _render_f7,
    "F8": _render_f8,
    "F9": _render_f9,
}

_SIZES = {"F3": (12, 3.5), "F4": (12, 3.5), "F5": (10, 4), "F6": (10, 4),
          "F7": (10, 7), "F8": (13, 4), "F9": (11, 4)}


def render(spec: FigureSpec) -> Path:
    """Draw the figure for one spec and write its image file."""
    fig = plt.figure(figsize=_SIZES.get(spec.tag, (7, 5)))
    try:
        _RENDERERS[spec.tag](spec, fig)
        fig.tight_layout()
        spec.output.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(spec.output, dpi=110)
    finally:
        plt.close(fig)
    return spec.output
