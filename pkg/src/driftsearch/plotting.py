"""Static SVG renders of fields, hypergraphs, trajectories and success curves."""
from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import ListedColormap  # noqa: E402

from .util import atomic_write_text  # noqa: E402

plt.rcParams["svg.hashsalt"] = "driftsearch"
HYPERGRAPH_CMAP = ListedColormap(["#2b6cb0", "#c53030"])   # mesoelliptic blue, mesohyperbolic red


def _save(fig, path):
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    atomic_write_text(path, buf.getvalue())


def _grid_from_rows(x, y, v):
    xs, ys = np.unique(x), np.unique(y)
    img = np.full((len(ys), len(xs)), np.nan)
    img[np.searchsorted(ys, y), np.searchsorted(xs, x)] = v
    dx = xs[1] - xs[0] if len(xs) > 1 else 1.0
    dy = ys[1] - ys[0] if len(ys) > 1 else 1.0
    extent = (xs[0] - dx / 2, xs[-1] + dx / 2, ys[0] - dy / 2, ys[-1] + dy / 2)
    return img, extent


def field_svg(path, x, y, values, title="", cmap="viridis", label=None):
    img, extent = _grid_from_rows(np.asarray(x), np.asarray(y), np.asarray(values))
    fig, ax = plt.subplots(figsize=(8, 8 * (extent[3] - extent[2]) / (extent[1] - extent[0]) + 1))
    im = ax.imshow(img, origin="lower", extent=extent, cmap=cmap, interpolation="nearest")
    fig.colorbar(im, ax=ax, shrink=0.8, label=label)
    ax.set_xlabel("x [km]")
    ax.set_ylabel("y [km]")
    ax.set_title(title)
    _save(fig, path)


def hypergraph_svg(path, x, y, labels, title="finite-time mixing"):
    codes = (np.asarray(labels) == "mesohyperbolic").astype(float)
    img, extent = _grid_from_rows(np.asarray(x), np.asarray(y), codes)
    fig, ax = plt.subplots(figsize=(8, 8 * (extent[3] - extent[2]) / (extent[1] - extent[0]) + 1))
    ax.imshow(img, origin="lower", extent=extent, cmap=HYPERGRAPH_CMAP, vmin=0, vmax=1,
              interpolation="nearest")
    ax.set_title(f"{title} (blue: mesoelliptic, red: mesohyperbolic)")
    ax.set_xlabel("x [km]")
    ax.set_ylabel("y [km]")
    _save(fig, path)


def curves_svg(path, series, title="detected fraction", xlabel="t [h]"):
    """``series`` maps a legend label to ``(times, fractions)``."""
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for name, (t, f) in series.items():
        ax.plot(t, f, label=name, lw=1.2)
    ax.set_ylim(0, 1)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("fraction of targets detected")
    ax.set_title(title)
    ax.legend(loc="upper left")
    _save(fig, path)


def trajectories_svg(path, records, detections=(), background=None, title="agent paths"):
    fig, ax = plt.subplots(figsize=(8, 6))
    if background is not None:
        x, y, v = background
        img, extent = _grid_from_rows(np.asarray(x), np.asarray(y), np.asarray(v))
        ax.imshow(img, origin="lower", extent=extent, cmap="Greys", interpolation="nearest")
    by_agent = {}
    for r in records:
        by_agent.setdefault(r["agent_id"], []).append((r["x_km"], r["y_km"]))
    for pts in by_agent.values():
        pts = np.array(pts)
        ax.plot(pts[:, 0], pts[:, 1], lw=0.6)
    if detections:
        d = np.array([(r["x_km"], r["y_km"]) for r in detections])
        ax.plot(d[:, 0], d[:, 1], "x", color="green", ms=3, label="detections")
        ax.legend(loc="upper right")
    ax.set_aspect("equal")
    ax.set_xlabel("x [km]")
    ax.set_ylabel("y [km]")
    ax.set_title(title)
    _save(fig, path)


def histogram_svg(path, finals_by_label, bins=20):
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for name, finals in finals_by_label.items():
        ax.hist(finals, bins=bins, range=(0, 1), alpha=0.6, label=name)
    ax.set_xlabel("final success rate")
    ax.set_ylabel("runs")
    ax.legend()
    _save(fig, path)
