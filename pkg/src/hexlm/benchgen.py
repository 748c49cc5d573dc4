"""Deterministic generators for the benchmark families.

Four families model the photonic applications that need exact-length
routing, plus a length sweep used for search-space comparisons:

* ``mzi``        two length-matched interferometer arms between a splitter
  and a combiner three segments apart, plus shortest input/output feeds
  from chip-edge ports.
* ``orr``        a ring: source and target ports on one coupler, closed by
  an exact-length loop.
* ``ottd``       delay lines: source/target eight segments apart, one
  instance per requested exact length.
* ``multicast``  one source fanning out to six sinks with distinct exact
  lengths.
* ``sweep``      the ottd placement swept over lengths 8..26.

Every emitted instance is certified solvable by actually routing it (the
found paths are the witnesses); multicast draws that fail certification
are rejected and redrawn.  Generation is a pure function of family,
radius, parameters and seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import heuristic as hx
from . import multipin as mp
from . import search as se
from .mesh import (FORMAT_VERSION, HexMesh, Pin, RoutingResourceGraph,
                   build_mesh, build_rrg)

CERT_BUDGET = 400_000


class GenerationError(ValueError):
    """No placement satisfying the family's constraints could be certified."""


@dataclass
class BenchmarkInstance:
    id: str
    family: str
    radius: int
    netlist: mp.Netlist
    meta: dict = field(default_factory=dict)

    def fresh_rrg(self) -> RoutingResourceGraph:
        return build_rrg(build_mesh(self.radius), check_heuristic=False)


@dataclass
class BenchmarkSuite:
    family: str
    radius: int
    seed: int
    params: dict
    instances: list[BenchmarkInstance]


def interior_couplers(mesh: HexMesh) -> list[int]:
    return [c.id for c in mesh.couplers
            if all(p is not None for p in c.port_segment)]


def boundary_pins(mesh: HexMesh, direction: str) -> list[Pin]:
    """Chip-edge pins: dangling ports usable as inputs (in) or outputs (out)."""
    pins = []
    for c in mesh.couplers:
        for p in range(4):
            if c.port_segment[p] is None:
                pins.append(Pin(c.id, p, direction))
    return pins


def _rotated(items: Sequence, offset: int) -> list:
    if not items:
        return []
    k = offset % len(items)
    return list(items[k:]) + list(items[:k])


def _shortest(rrg: RoutingResourceGraph, src: Pin, dst: Pin) -> Optional[int]:
    h = hx.node_h_table(rrg, dst.node, hx.Backend.HEX)
    out = se.shortest_path(se.SearchProblem(rrg, src.node, dst.node, 0, h,
                                            budget=CERT_BUDGET))
    return out.g if out.found else None


def _routes_exact(rrg: RoutingResourceGraph, src: Pin, dst: Pin, length: int) -> bool:
    h = hx.node_h_table(rrg, dst.node, hx.Backend.HEX)
    out = se.h_lm(se.SearchProblem(rrg, src.node, dst.node, length, h,
                                   budget=CERT_BUDGET))
    return out.found


def _certify(instance: BenchmarkInstance, policies: Sequence[str]) -> bool:
    """An instance is kept only if every policy routes its whole netlist."""
    for policy in policies:
        rrg = instance.fresh_rrg()
        results = mp.route_netlist(rrg, instance.netlist, policy=policy,
                                   budget=CERT_BUDGET)
        if not all(r.routed for r in results):
            return False
    return True


# ---------------------------------------------------------------------------
# MZI
# ---------------------------------------------------------------------------

def gen_mzi(radius: int, arm_length: int, seed: int = 0) -> BenchmarkInstance:
    """Splitter/combiner three segments apart with equal-length arms.

    The two arms leave the splitter's fan-out side and land on the
    combiner's two same-side ports; input and output nets run at their
    shortest achievable length from/to chip-edge ports.
    """
    mesh = build_mesh(radius)
    rrg = build_rrg(mesh, check_heuristic=False)
    interior = interior_couplers(mesh)
    if not interior:
        raise GenerationError(
            f"radius {radius} has no coupler with all four ports wired; "
            "no splitter placement exists")
    dist = {c: hx.coupler_distances(rrg, c) for c in interior}

    inputs = boundary_pins(mesh, "in")
    outputs = boundary_pins(mesh, "out")

    for s_c in _rotated(interior, seed):
        for c_c in interior:
            if dist[s_c][c_c] != 3:
                continue
            for ta, tb in ((0, 1), (1, 0), (2, 3), (3, 2)):
                arms = [(Pin(s_c, 2, "out"), Pin(c_c, ta, "in")),
                        (Pin(s_c, 3, "out"), Pin(c_c, tb, "in"))]
                base = [_shortest(rrg, a, b) for a, b in arms]
                if any(g is None or g > arm_length or (arm_length - g) % 2
                       for g in base):
                    continue
                if not all(_routes_exact(rrg, a, b, arm_length) for a, b in arms):
                    continue
                out_port = 2 if ta < 2 else 0
                nets = [mp.Net(f"arm{i + 1}", a, (mp.Sink(b, arm_length),))
                        for i, (a, b) in enumerate(arms)]

                feed = _nearest_feed(rrg, inputs, Pin(s_c, 0, "in"))
                drain = _nearest_feed(rrg, outputs, Pin(c_c, out_port, "out"),
                                      reverse=True)
                if feed is None or drain is None:
                    continue
                nets.append(mp.Net("in", feed[0], (mp.Sink(Pin(s_c, 0, "in"),
                                                           feed[1]),)))
                nets.append(mp.Net("out", Pin(c_c, out_port, "out"),
                                   (mp.Sink(drain[0], drain[1]),)))
                inst = BenchmarkInstance(
                    f"mzi_r{radius}_L{arm_length}_s{seed}", "mzi", radius,
                    mp.Netlist(radius, nets),
                    meta={"arm_length": arm_length, "splitter": s_c,
                          "combiner": c_c, "coupler_distance": dist[s_c][c_c],
                          "seed": seed})
                if _certify(inst, ("greedy", "hlm", "dslm")):
                    return inst
    raise GenerationError(
        f"no certified splitter/combiner placement for radius {radius}, "
        f"arm length {arm_length}")


def _nearest_feed(rrg: RoutingResourceGraph, edge_pins: list[Pin], inner: Pin,
                  reverse: bool = False) -> Optional[tuple[Pin, int]]:
    """Closest chip-edge pin and its shortest length to/from an inner pin."""
    best: Optional[tuple[int, Pin]] = None
    for pin in edge_pins:
        g = _shortest(rrg, inner, pin) if reverse else _shortest(rrg, pin, inner)
        if g is None:
            continue
        if best is None or (g, pin.coupler, pin.port) < (best[0], best[1].coupler, best[1].port):
            best = (g, pin)
    if best is None:
        return None
    return (best[1], best[0])


# ---------------------------------------------------------------------------
# ORR
# ---------------------------------------------------------------------------

def gen_orr(radius: int, length: int, seed: int = 0) -> BenchmarkInstance:
    """A ring closing through one coupler with exact loop length."""
    mesh = build_mesh(radius)
    rrg = build_rrg(mesh, check_heuristic=False)
    interior = interior_couplers(mesh)
    if not interior:
        raise GenerationError(f"radius {radius} has no interior coupler for a ring")
    for cc in _rotated(interior, seed):
        for sp, tp in ((3, 1), (2, 1), (3, 0), (2, 0)):
            src, dst = Pin(cc, sp, "out"), Pin(cc, tp, "in")
            ring_min = _shortest(rrg, src, dst)
            if ring_min is None:
                continue
            if length < ring_min:
                raise GenerationError(
                    f"requested ring length {length} is below the minimal "
                    f"ring length {ring_min} at radius {radius}")
            if not _routes_exact(rrg, src, dst, length):
                continue
            net = mp.Net("ring", src, (mp.Sink(dst, length),))
            inst = BenchmarkInstance(
                f"orr_r{radius}_L{length}_s{seed}", "orr", radius,
                mp.Netlist(radius, [net]),
                meta={"length": length, "coupler": cc, "ring_min": ring_min,
                      "seed": seed})
            if _certify(inst, ("greedy", "hlm", "dslm")):
                return inst
    raise GenerationError(
        f"no coupler admits an exact ring of length {length} at radius {radius}")


# ---------------------------------------------------------------------------
# OTTD / sweep
# ---------------------------------------------------------------------------

def _ottd_placement(radius: int, lengths: Sequence[int], seed: int,
                    distance: int = 8) -> tuple[Pin, Pin]:
    mesh = build_mesh(radius)
    rrg = build_rrg(mesh, check_heuristic=False)
    interior = interior_couplers(mesh)
    for s_c in _rotated(interior, seed * 7):
        d = hx.coupler_distances(rrg, s_c)
        for t_c in interior:
            if d[t_c] != distance:
                continue
            for sp in (2, 3, 0, 1):
                for tp in range(4):
                    src, dst = Pin(s_c, sp, "out"), Pin(t_c, tp, "in")
                    if _shortest(rrg, src, dst) != distance:
                        continue
                    if all(_routes_exact(rrg, src, dst, L) for L in lengths):
                        return src, dst
    raise GenerationError(
        f"radius {radius} admits no pin pair {distance} segments apart "
        f"covering lengths {list(lengths)}")


def gen_ottd(radius: int, lengths: Sequence[int], seed: int = 0,
             family: str = "ottd") -> list[BenchmarkInstance]:
    """Delay-line instances: one exact-length net per requested tap length.

    All instances of one generation share a certified pin pair placed eight
    segments apart; each routes on its own fresh mesh.
    """
    lengths = list(lengths)
    if not lengths:
        raise GenerationError("at least one tap length is required")
    src, dst = _ottd_placement(radius, lengths, seed)
    out = []
    for L in lengths:
        net = mp.Net("tap", src, (mp.Sink(dst, L),))
        out.append(BenchmarkInstance(
            f"{family}_r{radius}_L{L}_s{seed}", family, radius,
            mp.Netlist(radius, [net]),
            meta={"length": L, "distance": 8, "source": [src.coupler, src.port],
                  "target": [dst.coupler, dst.port], "seed": seed}))
    return out


SWEEP_LENGTHS = tuple(range(8, 27, 2))


def gen_sweep(radius: int = 3, seed: int = 0) -> list[BenchmarkInstance]:
    return gen_ottd(radius, SWEEP_LENGTHS, seed, family="sweep")


# ---------------------------------------------------------------------------
# Multicast
# ---------------------------------------------------------------------------

def gen_multicast(radius: int = 3, sink_count: int = 6, seed: int = 0,
                  count: int = 10) -> list[BenchmarkInstance]:
    """Seeded 1-to-N nets with distinct exact lengths, both policies certified."""
    mesh = build_mesh(radius)
    rrg = build_rrg(mesh, check_heuristic=False)
    interior = interior_couplers(mesh)
    rng = random.Random(seed)
    instances = []
    attempts = 0
    while len(instances) < count:
        attempts += 1
        if attempts > count * 60:
            raise GenerationError(
                f"could not certify {count} multicast instances at radius {radius}")
        s_c = rng.choice(interior)
        sp = rng.choice((2, 3))
        src = Pin(s_c, sp, "out")
        d = hx.coupler_distances(rrg, s_c)
        lo, hi = max(3, 2 * radius - 2), 2 * radius + 2
        sink_couplers = [c for c in interior if c != s_c and lo <= d[c] <= hi]
        if len(sink_couplers) < sink_count:
            continue
        # spread the sinks out so the fan-out does not choke one region
        pool = rng.sample(sink_couplers, len(sink_couplers))
        apart = {c: hx.coupler_distances(rrg, c) for c in pool}
        picks: list[int] = []
        for c in pool:
            if all(apart[c][p] >= 3 for p in picks):
                picks.append(c)
            if len(picks) == sink_count:
                break
        if len(picks) < sink_count:
            continue
        sinks = []
        used_lengths: set[int] = set()
        ok = True
        for c in picks:
            options = []
            for tp in range(4):
                pin = Pin(c, tp, "in")
                g = _shortest(rrg, src, pin)
                if g is not None:
                    options.append((g, tp, pin))
            if not options:
                ok = False
                break
            g, _, pin = min(options)
            # draw only lengths this pin pair can actually realise solo
            feasible = [g + off for off in (0, 2, 4, 6)
                        if (g + off) not in used_lengths
                        and _routes_exact(rrg, src, pin, g + off)]
            if not feasible:
                ok = False
                break
            length = rng.choice(feasible)
            used_lengths.add(length)
            sinks.append(mp.Sink(pin, length))
        if not ok:
            continue
        net = mp.Net("cast", src, tuple(sinks))
        idx = len(instances)
        inst = BenchmarkInstance(
            f"multicast_r{radius}_i{idx}_s{seed}", "multicast", radius,
            mp.Netlist(radius, [net]),
            meta={"sink_count": sink_count, "seed": seed, "index": idx,
                  "lengths": [s.length for s in sinks]})
        if _certify(inst, ("hlm", "dslm")):
            instances.append(inst)
    return instances


# ---------------------------------------------------------------------------
# Suites and serialization
# ---------------------------------------------------------------------------

def generate_suite(family: str, radius: Optional[int] = None, seed: int = 0,
                   lengths: Optional[Sequence[int]] = None,
                   count: Optional[int] = None) -> BenchmarkSuite:
    """Build a named suite with family-appropriate defaults.

    ``mzi``/``orr`` spread instances over lengths and seeds, ``ottd`` and
    ``sweep`` sweep the tap length, ``multicast`` draws ``count`` seeded
    nets.
    """
    if family == "mzi":
        radius = 2 if radius is None else radius
        ls = list(lengths) if lengths else [7, 11, 13]
        n = count if count is not None else 20
        instances = []
        i = 0
        while len(instances) < n:
            L = ls[i % len(ls)]
            s = seed + i // len(ls)
            instances.append(gen_mzi(radius, L, s))
            i += 1
        params = {"arm_lengths": ls}
    elif family == "orr":
        radius = 2 if radius is None else radius
        ls = list(lengths) if lengths else [6, 10, 12, 14, 16]
        n = count if count is not None else 20
        instances = []
        i = 0
        while len(instances) < n:
            L = ls[i % len(ls)]
            s = seed + i // len(ls)
            instances.append(gen_orr(radius, L, s))
            i += 1
        params = {"lengths": ls}
    elif family in ("ottd", "sweep"):
        radius = 3 if radius is None else radius
        ls = list(lengths) if lengths else list(SWEEP_LENGTHS)
        seeds = range(seed, seed + (count or 1))
        instances = []
        for s in seeds:
            instances.extend(gen_ottd(radius, ls, s, family=family))
        params = {"lengths": ls}
    elif family == "multicast":
        radius = 3 if radius is None else radius
        instances = gen_multicast(radius, 6, seed, count or 10)
        params = {"sink_count": 6}
    else:
        raise GenerationError(f"unknown benchmark family {family!r}")
    return BenchmarkSuite(family, radius, seed, params, instances)


def suite_to_manifest(suite: BenchmarkSuite, file_names: dict[str, tuple[str, str]]) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "benchmark-manifest",
        "family": suite.family,
        "radius": suite.radius,
        "seed": suite.seed,
        "params": suite.params,
        "nets": sum(len(i.netlist.nets) for i in suite.instances),
        "instances": [
            {
                "id": inst.id,
                "mesh": file_names[inst.id][0],
                "netlist": file_names[inst.id][1],
                "meta": inst.meta,
            }
            for inst in suite.instances
        ],
    }
