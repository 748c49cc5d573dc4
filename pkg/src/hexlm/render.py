"""Figure rendering: mesh drawings, routed nets, and benchmark charts.

Everything is drawn with matplotlib and written to whatever format the
output path implies (SVG in the CLI contract).  Mesh drawings show cell
outlines, corner waveguide segments, couplers coloured by state, routed
paths colour-keyed per net/sink with length labels, and optionally a
search-space overlay where visited couplers are shaded by the accumulated
length at which the search popped them.
"""

from __future__ import annotations

from typing import Optional, Sequence

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
from matplotlib.lines import Line2D

from .mesh import (ArcKind, CouplerState, HexMesh, RoutingResourceGraph,
                   cell_center, corner_point)

_STATE_COLOR = {
    CouplerState.AVAILABLE: "#b0b0b0",
    CouplerState.BAR: "#2c7fb8",
    CouplerState.CROSS: "#d95f02",
    CouplerState.PARTIAL: "#7b3294",
}

_ROUTE_CYCLE = plt.get_cmap("tab10").colors


def _hexagon(cell) -> list[tuple[float, float]]:
    import math
    cx, cy = cell_center(cell)
    pts = []
    for k in range(6):
        ang = math.radians(60 * k + 30)
        pts.append((cx + math.cos(ang), cy + math.sin(ang)))
    return pts


def draw_mesh(ax, mesh: HexMesh, show_ids: bool = False) -> None:
    from matplotlib.patches import Polygon

    # every disc cell owns six perimeter segments, so this recovers the disc
    disc_cells = {seg.cell for seg in mesh.segments}
    for cell in sorted(disc_cells):
        ax.add_patch(Polygon(_hexagon(cell), closed=True, fill=False,
                             edgecolor="#e5e5e5", linewidth=0.8, zorder=0))

    for seg in mesh.segments:
        a = mesh.couplers[seg.a[0]].center()
        b = mesh.couplers[seg.b[0]].center()
        k = corner_point(seg.corner)
        ax.plot([a[0], k[0], b[0]], [a[1], k[1], b[1]],
                color="#c8c8c8", linewidth=1.0, zorder=1)

    for coupler in mesh.couplers:
        x, y = coupler.center()
        ax.scatter([x], [y], s=46, c=_STATE_COLOR[coupler.state],
                   edgecolors="#404040", linewidths=0.5, zorder=3)
        if show_ids:
            ax.annotate(str(coupler.id), (x, y), fontsize=5,
                        ha="center", va="center", zorder=4)

    ax.set_aspect("equal")
    ax.axis("off")


def _route_points(rrg: RoutingResourceGraph, arcs: Sequence[int]) -> list[tuple[float, float]]:
    mesh = rrg.mesh
    inter = int(ArcKind.INTER)
    pts: list[tuple[float, float]] = []
    if not arcs:
        return pts
    first_coupler = rrg.arc_tail[arcs[0]] // 8
    pts.append(mesh.couplers[first_coupler].center())
    n_intra = len(mesh.couplers) * 8
    for aid in arcs:
        if rrg.arc_kind[aid] != inter:
            continue
        seg = mesh.segments[(aid - n_intra) // 2]
        pts.append(corner_point(seg.corner))
        pts.append(mesh.couplers[rrg.arc_head[aid] // 8].center())
    return pts


def draw_routes(ax, rrg: RoutingResourceGraph, routed: Sequence[dict]) -> None:
    """Overlay routed sink paths.

    ``routed`` entries carry ``net``, ``sink``, ``arcs`` and ``length``;
    colours cycle per (net, sink).
    """
    handles = []
    for i, entry in enumerate(routed):
        color = _ROUTE_CYCLE[i % len(_ROUTE_CYCLE)]
        pts = _route_points(rrg, entry["arcs"])
        if not pts:
            continue
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        ax.plot(xs, ys, color=color, linewidth=2.4, alpha=0.9, zorder=5,
                solid_capstyle="round")
        label = f"{entry['net']}[{entry['sink']}] L={entry['length']}"
        ax.annotate(f"L={entry['length']}", pts[-1], fontsize=7, color=color,
                    xytext=(4, 4), textcoords="offset points", zorder=6)
        handles.append(Line2D([0], [0], color=color, lw=2.4, label=label))
    if handles:
        ax.legend(handles=handles, loc="upper left", fontsize=6,
                  bbox_to_anchor=(1.0, 1.0), frameon=False)


def draw_trace(ax, rrg: RoutingResourceGraph, events: Sequence[dict]) -> None:
    """Shade couplers by the accumulated length g at which pops visited them."""
    best: dict[int, int] = {}
    for ev in events:
        if ev.get("ev") != "pop":
            continue
        c = int(ev["node"]) // 8
        g = int(ev["g"])
        best[c] = max(best.get(c, 0), g)
    if not best:
        return
    gmax = max(best.values()) or 1
    cmap = plt.get_cmap("viridis")
    xs, ys, cs = [], [], []
    for c, g in sorted(best.items()):
        x, y = rrg.mesh.couplers[c].center()
        xs.append(x)
        ys.append(y)
        cs.append(cmap(g / gmax))
    ax.scatter(xs, ys, s=220, c=cs, alpha=0.45, zorder=2, linewidths=0)


def render_mesh(mesh: HexMesh, out_path: str,
                rrg: Optional[RoutingResourceGraph] = None,
                routed: Optional[Sequence[dict]] = None,
                trace: Optional[Sequence[dict]] = None,
                title: Optional[str] = None,
                show_ids: bool = False) -> None:
    size = max(4.0, 1.6 * (mesh.radius + 1.5))
    fig, ax = plt.subplots(figsize=(size * 1.25, size))
    draw_mesh(ax, mesh, show_ids=show_ids)
    if trace and rrg is not None:
        draw_trace(ax, rrg, trace)
    if routed and rrg is not None:
        draw_routes(ax, rrg, routed)
    if title:
        ax.set_title(title, fontsize=9)
    fig.savefig(out_path, bbox_inches="tight")
    plt.close(fig)


def render_sweep(series: dict[str, list[tuple[int, float]]], out_path: str,
                 ylabel: str = "avg pushed nodes",
                 title: str = "search space vs expected length") -> None:
    fig, ax = plt.subplots(figsize=(6.4, 3.2))
    for name, pts in sorted(series.items()):
        pts = sorted(pts)
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o",
                markersize=3.5, linewidth=1.4, label=name)
    ax.set_xlabel("expected length (segments)")
    ax.set_ylabel(ylabel)
    ax.set_title(title, fontsize=9)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=7)
    fig.savefig(out_path, bbox_inches="tight")
    plt.close(fig)


def render_strategy_bars(medians: dict[str, dict[str, float]], out_path: str,
                         ylabel: str = "median pushed nodes") -> None:
    """Grouped bars: one group per benchmark family, one bar per strategy."""
    fams = sorted(medians)
    strategies = sorted({s for row in medians.values() for s in row})
    fig, ax = plt.subplots(figsize=(1.4 + 1.2 * len(fams), 3.0))
    width = 0.8 / max(1, len(strategies))
    for j, strat in enumerate(strategies):
        xs = [i + j * width for i in range(len(fams))]
        ys = [medians[f].get(strat, 0.0) for f in fams]
        ax.bar(xs, ys, width=width, label=strat)
    ax.set_xticks([i + 0.4 - width / 2 for i in range(len(fams))])
    ax.set_xticklabels(fams, fontsize=8)
    ax.set_ylabel(ylabel, fontsize=8)
    ax.legend(fontsize=7)
    fig.savefig(out_path, bbox_inches="tight")
    plt.close(fig)
