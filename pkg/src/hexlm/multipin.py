"""Nets with one source and several exact-length sinks.

Sinks are routed sequentially, tightest detour margin first (a sink whose
required length barely exceeds its current shortest length has the least
slack and must claim resources early).  A sink search may ride the net's
already-committed tree outward from the source, still paying full length
for shared arcs, and branch off onto free arcs at any point; once off the
tree it may not re-enter it, so each routed net forms an out-tree rooted at
the source pin.

If any sink fails under the primary strategy the whole net is ripped up
and rerun with the dual-stage strategy, whose late detours leave the
source region calmer.  The fallback is all-or-nothing by design; there is
no per-sink strategy switching.

Netlist routing is sequential by contract (occupancy makes results order
dependent); independent netlists may be routed in parallel only on
separate graph instances.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import heuristic as hx
from . import search as se
from .mesh import (FORMAT_VERSION, ArcKind, MeshError, Pin,
                   RoutingResourceGraph, commit_path, rip_up, validate_path)


@dataclass(frozen=True)
class Sink:
    pin: Pin
    length: int


@dataclass(frozen=True)
class Net:
    id: str
    source: Pin
    sinks: tuple[Sink, ...]

    def __post_init__(self):
        if not self.sinks:
            raise MeshError(f"net {self.id!r} has no sinks")
        pins = {self.source}
        for s in self.sinks:
            if s.length < 0:
                raise MeshError(f"net {self.id!r} sink length must be >= 0")
            if s.pin in pins:
                raise MeshError(f"net {self.id!r} repeats pin {s.pin}")
            pins.add(s.pin)


@dataclass
class Netlist:
    radius: int
    nets: list[Net]

    def validate(self, rrg: RoutingResourceGraph) -> None:
        seen: dict[Pin, str] = {}
        for net in self.nets:
            for pin in [net.source] + [s.pin for s in net.sinks]:
                rrg.resolve_pin(pin)
                holder = seen.get(pin)
                if holder is not None and holder != net.id:
                    raise MeshError(f"pin {pin} shared by nets {holder!r} and {net.id!r}")
                seen[pin] = net.id


@dataclass
class Margin:
    value: float  # exact int margin, or +inf when the sink is unreachable
    shortest: Optional[int]
    reachable: bool


@dataclass
class SinkResult:
    pin: Pin
    requested: int
    achieved: Optional[int]
    arcs: tuple[int, ...]
    stats: se.SearchStats


@dataclass
class RouteResult:
    net_id: str
    status: str  # "routed" | "failed"
    strategy_used: str
    sinks: list[Optional[SinkResult]]
    order: list[int]
    twl: int
    failed_sink: Optional[int] = None
    failure_reason: str = ""
    attempts_stats: se.SearchStats = field(default_factory=se.SearchStats)

    @property
    def routed(self) -> bool:
        return self.status == "routed"


def detour_margin(rrg: RoutingResourceGraph, source: Pin, sink: Pin,
                  length: int, backend: hx.Backend = hx.Backend.HEX,
                  budget: int = se.DEFAULT_BUDGET,
                  net_id: Optional[str] = None) -> Margin:
    """Slack between the required length and the current shortest length.

    Negative slack means the request is infeasible as stated; an
    unreachable sink reports an infinite margin with the flag cleared.
    """
    s = rrg.resolve_pin(source)
    t = rrg.resolve_pin(sink)
    h = hx.node_h_table(rrg, t, backend)
    out = se.shortest_path(se.SearchProblem(rrg, s, t, 0, h, net_id=net_id,
                                            budget=budget))
    if not out.found:
        return Margin(math.inf, None, False)
    return Margin(length - out.g, out.g, True)


def order_sinks(rrg: RoutingResourceGraph, net: Net,
                backend: hx.Backend = hx.Backend.HEX) -> list[int]:
    """Sink indices sorted by ascending detour margin, stable on ties.

    Unreachable sinks sort last so the failure is reported after everything
    routable has been attempted.
    """
    margins = []
    for i, sink in enumerate(net.sinks):
        m = detour_margin(rrg, net.source, sink.pin, sink.length, backend)
        margins.append((m.value, i))
    margins.sort(key=lambda t: (t[0], t[1]))
    return [i for _, i in margins]


_FAIL_REASON = {
    se.Status.INFEASIBLE: "infeasible",
    se.Status.EXHAUSTED: "exhausted",
    se.Status.NOT_FOUND: "blocked",
}


def _attempt(rrg: RoutingResourceGraph, net: Net, engine, backend: hx.Backend,
             budget: int, totals: se.SearchStats,
             trace_hook=None) -> tuple[Optional[list], Optional[int], str, list[int]]:
    """Route all sinks with one engine; returns per-sink results or failure."""
    order = order_sinks(rrg, net, backend)
    results: list[Optional[SinkResult]] = [None] * len(net.sinks)
    for idx in order:
        sink = net.sinks[idx]
        s = rrg.resolve_pin(net.source)
        t = rrg.resolve_pin(sink.pin)
        h = hx.node_h_table(rrg, t, backend)
        trace = trace_hook(net.id, idx) if trace_hook is not None else None
        problem = se.SearchProblem(rrg, s, t, sink.length, h,
                                   net_id=net.id, budget=budget, trace=trace)
        out = engine(problem)
        totals.merge(out.stats)
        if not out.found:
            return None, idx, _FAIL_REASON[out.status], order
        bad = validate_path(rrg, out.path, sink.length, net.id)
        if bad:
            raise AssertionError(f"engine returned an illegal path: {bad[:3]}")
        commit_path(rrg, out.path, net.id)
        results[idx] = SinkResult(sink.pin, sink.length, out.g, out.path, out.stats)
    return results, None, "", order


def _twl(rrg: RoutingResourceGraph, sinks: Sequence[Optional[SinkResult]]) -> int:
    inter = int(ArcKind.INTER)
    union: set[int] = set()
    for sr in sinks:
        if sr is None:
            continue
        union.update(a for a in sr.arcs if rrg.arc_kind[a] == inter)
    return len(union)


def route_net(rrg: RoutingResourceGraph, net: Net, policy: str = "auto",
              backend: hx.Backend = hx.Backend.HEX,
              budget: int = se.DEFAULT_BUDGET, trace_hook=None) -> RouteResult:
    """Route one net under a strategy policy.

    ``auto`` tries the heuristic-guided engine for the whole net and falls
    back to the dual-stage engine after a full rip-up; any single strategy
    name (``greedy``, ``hlm``, ``dslm``, ``lemar``) routes every sink with
    that engine only.  On failure the graph is restored to its pre-net
    state.
    """
    if policy == "auto":
        passes = [("hlm", se.h_lm), ("dslm-fallback", se.ds_lm)]
    elif policy in se.STRATEGIES:
        passes = [(policy, se.STRATEGIES[policy])]
    else:
        raise ValueError(f"unknown policy {policy!r}")
    totals = se.SearchStats()

    last_fail = (None, "")
    for label, engine in passes:
        results, failed_idx, reason, order = _attempt(rrg, net, engine, backend,
                                                      budget, totals, trace_hook)
        if results is not None:
            return RouteResult(net.id, "routed", label,
                               results, order, _twl(rrg, results),
                               attempts_stats=totals)
        rip_up(rrg, net.id)
        last_fail = (failed_idx, reason)

    return RouteResult(net.id, "failed", passes[-1][0],
                       [None] * len(net.sinks), [], 0,
                       failed_sink=last_fail[0], failure_reason=last_fail[1],
                       attempts_stats=totals)


def route_netlist(rrg: RoutingResourceGraph, netlist: Netlist,
                  policy: str = "auto", backend: hx.Backend = hx.Backend.HEX,
                  budget: int = se.DEFAULT_BUDGET, trace_hook=None,
                  order_by_margin: bool = False) -> list[RouteResult]:
    """Route nets sequentially; failures do not roll back earlier nets.

    Nets go in submission order unless ``order_by_margin`` is set, which
    routes tighter nets (smaller summed detour margin on the untouched
    graph) first.  Results always come back in submission order.
    """
    netlist.validate(rrg)
    order = list(range(len(netlist.nets)))
    if order_by_margin:
        totals = []
        for i, net in enumerate(netlist.nets):
            vals = [detour_margin(rrg, net.source, s.pin, s.length, backend).value
                    for s in net.sinks]
            totals.append((sum(vals), i))
        order = [i for _, i in sorted(totals, key=lambda t: (t[0], t[1]))]
    results: list[Optional[RouteResult]] = [None] * len(netlist.nets)
    for i in order:
        results[i] = route_net(rrg, netlist.nets[i], policy, backend, budget,
                               trace_hook)
    return results  # type: ignore[return-value]


def net_tree_ok(rrg: RoutingResourceGraph, net: Net,
                result: RouteResult) -> bool:
    """Check the routed arc union forms an out-tree rooted at the source pin."""
    if not result.routed:
        return False
    union: set[int] = set()
    for sr in result.sinks:
        union.update(sr.arcs)
    indeg: dict[int, int] = {}
    for aid in union:
        head = rrg.arc_head[aid]
        indeg[head] = indeg.get(head, 0) + 1
        if indeg[head] > 1:
            return False
    root = rrg.resolve_pin(net.source)
    if indeg.get(root):
        return False
    reached: set[int] = set()
    frontier = [root]
    while frontier:
        node = frontier.pop()
        for head, aid, _ in rrg.out_arcs(node):
            if aid in union and aid not in reached:
                reached.add(aid)
                frontier.append(head)
    return reached == union


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _pin_to_dict(pin: Pin) -> dict:
    return {"coupler": pin.coupler, "port": pin.port, "direction": pin.direction}


def _pin_from_dict(doc: dict) -> Pin:
    return Pin(int(doc["coupler"]), int(doc["port"]), str(doc["direction"]))


def netlist_to_dict(netlist: Netlist) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "netlist",
        "radius": netlist.radius,
        "nets": [
            {
                "id": net.id,
                "source": _pin_to_dict(net.source),
                "sinks": [
                    dict(_pin_to_dict(s.pin), length_segments=s.length)
                    for s in net.sinks
                ],
            }
            for net in netlist.nets
        ],
    }


def save_netlist(netlist: Netlist, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(netlist_to_dict(netlist), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_netlist(path: str) -> Netlist:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("kind") != "netlist":
        raise MeshError(f"{path} is not a netlist document")
    nets = []
    for entry in doc["nets"]:
        sinks = tuple(Sink(_pin_from_dict(s), int(s["length_segments"]))
                      for s in entry["sinks"])
        nets.append(Net(str(entry["id"]), _pin_from_dict(entry["source"]), sinks))
    return Netlist(int(doc["radius"]), nets)


def results_to_dict(results: Sequence[RouteResult], strategy: str,
                    backend: str, budget: int, seed: Optional[int] = None) -> dict:
    nets = []
    for r in results:
        sinks = []
        for sr in r.sinks:
            if sr is None:
                sinks.append(None)
                continue
            sinks.append({
                "pin": _pin_to_dict(sr.pin),
                "length_segments": sr.requested,
                "achieved": sr.achieved,
                "arcs": list(sr.arcs),
                "stats": sr.stats.to_dict(),
            })
        nets.append({
            "id": r.net_id,
            "status": r.status,
            "strategy_used": r.strategy_used,
            "twl": r.twl,
            "order": r.order,
            "failed_sink": r.failed_sink,
            "failure_reason": r.failure_reason,
            "sinks": sinks,
            "stats": r.attempts_stats.to_dict(),
        })
    return {
        "format_version": FORMAT_VERSION,
        "kind": "route-result",
        "strategy": strategy,
        "backend": backend,
        "budget": budget,
        "seed": seed,
        "nets": nets,
        "totals": {
            "nets": len(results),
            "routed": sum(1 for r in results if r.routed),
            "twl": sum(r.twl for r in results),
            "pushed": sum(r.attempts_stats.pushed for r in results),
            "popped": sum(r.attempts_stats.popped for r in results),
            "duration_s": sum(r.attempts_stats.duration_s for r in results),
        },
    }
