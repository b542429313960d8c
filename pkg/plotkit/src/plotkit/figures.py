"""The four figure kinds rendered from noisyqd tables.

All rendering is deterministic: Agg backend, fixed style, no timestamps
in the output, so identical inputs give byte-identical images.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .tables import COLUMNS, ContractError, read_table

STYLE = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 150,
    "savefig.dpi": 150,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.hashsalt": "noisyqd-plot",
}


def _labels(paths: list[str]) -> list[str]:
    stems = [os.path.splitext(os.path.basename(p))[0] for p in paths]
    if len(set(stems)) == len(stems):
        return stems
    # identical file names: disambiguate with the parent directory
    return [os.path.join(os.path.basename(os.path.dirname(os.path.abspath(p))), s)
            for p, s in zip(paths, stems)]


def _single(paths: list[str], kind: str) -> str:
    if len(paths) != 1:
        raise ContractError(f"{kind} takes exactly one input file, got {len(paths)}")
    return paths[0]


def heatmap_psi2(paths: list[str], ax) -> None:
    data = read_table(_single(paths, "heatmap_psi2"), COLUMNS["psi2_heatmap"])
    t, x, dens = data[:, 0], data[:, 1], data[:, 2]
    times = np.unique(t)
    xs = np.unique(x)
    if len(times) * len(xs) != len(dens):
        raise ContractError("heatmap rows do not form a complete (t, x) lattice")
    grid = np.full((len(times), len(xs)), np.nan)
    grid[np.searchsorted(times, t), np.searchsorted(xs, x)] = dens
    mesh = ax.pcolormesh(times, xs, grid.T, shading="nearest", cmap="magma")
    ax.figure.colorbar(mesh, ax=ax, label=r"$|\psi|^2$")
    ax.set_xlabel("t")
    ax.set_ylabel("x")
    ax.set_title("probability density")
    ax.grid(False)


def current_curves(paths: list[str], ax) -> None:
    for path, label in zip(paths, _labels(paths)):
        data = read_table(path, COLUMNS["current"])
        for probe in np.unique(data[:, 1]):
            rows = data[data[:, 1] == probe]
            ax.plot(rows[:, 0], rows[:, 2], lw=1.0,
                    label=f"{label}, x={probe:g}")
    ax.set_xlabel("t")
    ax.set_ylabel(r"$J_R$")
    ax.set_title("probe current")
    ax.legend(fontsize=8)


def trace_purity(paths: list[str], ax) -> None:
    data = read_table(_single(paths, "trace_purity"), COLUMNS["trace_purity"])
    t = data[:, 0]
    ax.plot(t, data[:, 1], label="Re tr", color="tab:blue")
    ax.plot(t, data[:, 2], label="Im tr", color="tab:blue", ls="--", lw=0.8)
    ax.plot(t, data[:, 3], label="purity", color="tab:red")
    ax.set_xlabel("t")
    ax.set_ylabel("trace / purity")
    ax.set_title("density-matrix trace and purity")
    ax.legend(fontsize=8)


def norm_decay(paths: list[str], ax) -> None:
    for path, label in zip(paths, _labels(paths)):
        data = read_table(path, COLUMNS["norm"])
        ax.semilogy(data[:, 0], data[:, 1], lw=1.0, label=label)
    ax.set_xlabel("t")
    ax.set_ylabel(r"$\|\psi\|^2$")
    ax.set_title("norm decay")
    ax.legend(fontsize=8)


KINDS = {
    "heatmap_psi2": heatmap_psi2,
    "current_curves": current_curves,
    "trace_purity": trace_purity,
    "norm_decay": norm_decay,
}


def render(kind: str, paths: list[str], out: str) -> None:
    """Render one figure kind from the given tables to an image file."""
    if kind not in KINDS:
        raise ContractError(f"unknown figure kind {kind!r}, expected one of {sorted(KINDS)}")
    if not paths:
        raise ContractError("at least one --in table is required")
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        try:
            KINDS[kind](paths, ax)
            fig.tight_layout()
            # SVG embeds a creation date unless told otherwise
            metadata = {"Date": None} if out.endswith(".svg") else None
            fig.savefig(out, metadata=metadata)
        finally:
            plt.close(fig)
