"""Hexagonal programmable photonic mesh and its routing-resource graph.

The mesh is a disc of hexagonal cells.  Every cell edge carries one tunable
2x2 coupler; every cell corner carries short waveguide arcs that join the
two couplers sitting on the adjacent edges of that cell.  Light therefore
hops coupler -> corner waveguide -> coupler, and the unit of path length is
one corner-to-corner waveguide segment.

For routing, the mesh is expanded into a directed routing-resource graph
(RRG).  Each physical coupler port yields two nodes (one for light entering
the coupler, one for light leaving it), each coupler contributes eight
zero-length internal arcs (every entering port reaches both leaving ports
of the opposite side), and each waveguide segment contributes a pair of
opposite unit-length arcs, one per propagation direction.  Using an arc
forbids its opposite: a segment carries light in a single direction.

Path legality (see :func:`validate_path`):

* consecutive arcs must be head-to-tail contiguous,
* a path may not pass through the same coupler twice.  The one exception
  is a ring that closes back onto the coupler it started from (resonator
  style source/target pins on one coupler),
* an arc may never appear together with its opposite,
* every arc must be free, or active for the owning net,
* the summed segment count must equal the requested length exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Iterable, Optional

FORMAT_VERSION = 1

Axial = tuple[int, int]
Cube = tuple[int, int, int]
CornerKey = tuple[Axial, Axial, Axial]

#: Axial neighbour offsets in circular order (east, then counter-clockwise).
DIRS: tuple[Axial, ...] = ((1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1))

#: Construction guard; bigger discs are legal but pointless for this tool.
MAX_RADIUS = 8

SQRT3 = 3.0 ** 0.5


class MeshError(ValueError):
    """Raised for invalid mesh construction or pin references."""


class CommitError(RuntimeError):
    """Raised when a path cannot be committed atomically."""


def cube(cell: Axial) -> Cube:
    q, r = cell
    return (q, -q - r, r)


def cells_within(radius: int) -> list[Axial]:
    """All axial cells of the hexagonal disc, in sorted order."""
    out = []
    for q in range(-radius, radius + 1):
        for r in range(max(-radius, -q - radius), min(radius, -q + radius) + 1):
            out.append((q, r))
    out.sort()
    return out


def cell_center(cell: Axial) -> tuple[float, float]:
    q, r = cell
    return (SQRT3 * (q + r / 2.0), 1.5 * r)


def _corner_key(cell: Axial, i: int) -> CornerKey:
    """Corner between neighbour directions i and i+1 of ``cell``."""
    q, r = cell
    da = DIRS[i]
    db = DIRS[(i + 1) % 6]
    trio = sorted([cell, (q + da[0], r + da[1]), (q + db[0], r + db[1])])
    return (trio[0], trio[1], trio[2])


def corner_point(key: CornerKey) -> tuple[float, float]:
    xs = [cell_center(c) for c in key]
    return (sum(p[0] for p in xs) / 3.0, sum(p[1] for p in xs) / 3.0)


class CouplerState(Enum):
    AVAILABLE = "available"
    BAR = "bar"
    CROSS = "cross"
    PARTIAL = "partial"


#: Internal port pairings realised by each committed coupler state.
BAR_PAIRS = frozenset({(0, 2), (1, 3)})
CROSS_PAIRS = frozenset({(0, 3), (1, 2)})


@dataclass
class Coupler:
    """A tunable 2x2 coupler on one cell edge.

    Ports 0 and 1 face one end corner of the edge (side A), ports 2 and 3
    face the other (side B).  ``coords`` is the integer three-axis position
    used by the look-ahead estimator: the component-wise sum of the cube
    coordinates of the two cells sharing the edge.  Neighbouring couplers
    differ by at most one on every axis.
    """

    id: int
    cells: tuple[Axial, Axial]
    coords: Cube
    corners: tuple[CornerKey, CornerKey]
    state: CouplerState = CouplerState.AVAILABLE
    port_segment: list[Optional[int]] = field(default_factory=lambda: [None] * 4)

    def center(self) -> tuple[float, float]:
        a = cell_center(self.cells[0])
        b = cell_center(self.cells[1])
        return ((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)

    def side_of_corner(self, key: CornerKey) -> int:
        if key == self.corners[0]:
            return 0
        if key == self.corners[1]:
            return 1
        raise MeshError(f"corner {key} not on coupler {self.id}")


@dataclass(frozen=True)
class Segment:
    """One corner waveguide joining two coupler ports of a single cell."""

    id: int
    cell: Axial
    corner: CornerKey
    a: tuple[int, int]  # (coupler id, port index)
    b: tuple[int, int]


@dataclass
class HexMesh:
    radius: int
    couplers: list[Coupler]
    segments: list[Segment]
    coupler_by_edge: dict[tuple[Axial, Axial], int]

    def coupler(self, cid: int) -> Coupler:
        return self.couplers[cid]


def _edge_key(cell: Axial, d: Axial) -> tuple[Axial, Axial]:
    other = (cell[0] + d[0], cell[1] + d[1])
    return (cell, other) if cell <= other else (other, cell)


def build_mesh(radius: int) -> HexMesh:
    """Construct the disc mesh of the given ring count deterministically."""
    if radius < 0:
        raise MeshError("radius must be non-negative")
    if radius > MAX_RADIUS:
        raise MeshError(f"radius {radius} exceeds the supported maximum {MAX_RADIUS}")

    cells = cells_within(radius)

    edge_keys: set[tuple[Axial, Axial]] = set()
    for c in cells:
        for d in DIRS:
            edge_keys.add(_edge_key(c, d))
    ordered_edges = sorted(edge_keys)

    couplers: list[Coupler] = []
    coupler_by_edge: dict[tuple[Axial, Axial], int] = {}
    for cid, (c1, c2) in enumerate(ordered_edges):
        coords = tuple(a + b for a, b in zip(cube(c1), cube(c2)))
        d = (c2[0] - c1[0], c2[1] - c1[1])
        di = DIRS.index(d)
        k_plus = _corner_key(c1, di)          # corner between d and next dir
        k_minus = _corner_key(c1, (di - 1) % 6)
        corners = (k_plus, k_minus) if k_plus < k_minus else (k_minus, k_plus)
        couplers.append(Coupler(cid, (c1, c2), coords, corners))  # type: ignore[arg-type]
        coupler_by_edge[(c1, c2)] = cid

    segments: list[Segment] = []
    for c in cells:
        for i in range(6):
            corner = _corner_key(c, i)
            e1 = _edge_key(c, DIRS[i])
            e2 = _edge_key(c, DIRS[(i + 1) % 6])
            ca = couplers[coupler_by_edge[e1]]
            cb = couplers[coupler_by_edge[e2]]
            seg_id = len(segments)
            ends = []
            for cp in (ca, cb):
                side = cp.side_of_corner(corner)
                slot = 0 if c == cp.cells[0] else 1
                port = side * 2 + slot
                if cp.port_segment[port] is not None:
                    raise MeshError("port already wired; construction bug")
                cp.port_segment[port] = seg_id
                ends.append((cp.id, port))
            segments.append(Segment(seg_id, c, corner, ends[0], ends[1]))

    return HexMesh(radius, couplers, segments, coupler_by_edge)


# ---------------------------------------------------------------------------
# Routing-resource graph
# ---------------------------------------------------------------------------

IN = 0
OUT = 1


class ArcKind(IntEnum):
    INTRA = 0
    INTER = 1


class ArcStatus(IntEnum):
    FREE = 0
    ACTIVE = 1
    FORBIDDEN = 2


@dataclass(frozen=True)
class Pin:
    """A routing endpoint: one directed port node of one coupler."""

    coupler: int
    port: int
    direction: str  # "in" or "out"

    @property
    def node(self) -> int:
        d = IN if self.direction == "in" else OUT
        return self.coupler * 8 + self.port * 2 + d

    @staticmethod
    def of_node(node: int) -> "Pin":
        c, rest = divmod(node, 8)
        p, d = divmod(rest, 2)
        return Pin(c, p, "in" if d == IN else "out")


def port_node(coupler: int, port: int, direction: int) -> int:
    return coupler * 8 + port * 2 + direction


@dataclass(frozen=True)
class Violation:
    rule: str
    arc: Optional[int]
    detail: str = ""


#: Internal arc layout per coupler: entering port -> leaving port.
_INTRA_PORT_PAIRS = (
    (0, 2), (0, 3), (1, 2), (1, 3),
    (2, 0), (2, 1), (3, 0), (3, 1),
)


class RoutingResourceGraph:
    """Directed port-level routing graph over a :class:`HexMesh`.

    Node ids are ``coupler*8 + port*2 + direction``.  Arc ids enumerate all
    internal arcs first (eight per coupler) and then the segment arcs (two
    per segment).  Construction and ids are deterministic, so serialized
    references stay stable across runs.

    Construction and read-only queries may be shared freely between
    concurrent searches; occupancy mutation (:meth:`commit_path`,
    :meth:`rip_up`) must be serialized by the caller.
    """

    def __init__(self, mesh: HexMesh):
        self.mesh = mesh
        ncoup = len(mesh.couplers)
        self.n_nodes = ncoup * 8
        n_intra = ncoup * 8
        n_arcs = n_intra + len(mesh.segments) * 2
        self.n_arcs = n_arcs

        self.arc_tail = [0] * n_arcs
        self.arc_head = [0] * n_arcs
        self.arc_kind = [int(ArcKind.INTRA)] * n_arcs
        self.arc_len = [0] * n_arcs
        self.arc_opp = [-1] * n_arcs
        self.arc_pair: list[Optional[tuple[int, int]]] = [None] * n_arcs
        self.arc_status = [int(ArcStatus.FREE)] * n_arcs
        self.arc_owner: list[Optional[str]] = [None] * n_arcs

        for cid in range(ncoup):
            for k, (pin, pout) in enumerate(_INTRA_PORT_PAIRS):
                aid = cid * 8 + k
                self.arc_tail[aid] = port_node(cid, pin, IN)
                self.arc_head[aid] = port_node(cid, pout, OUT)
                lo, hi = min(pin, pout), max(pin, pout)
                self.arc_pair[aid] = (lo, hi)

        for seg in mesh.segments:
            (ca, pa), (cb, pb) = seg.a, seg.b
            a1 = n_intra + seg.id * 2
            a2 = a1 + 1
            self.arc_tail[a1] = port_node(ca, pa, OUT)
            self.arc_head[a1] = port_node(cb, pb, IN)
            self.arc_tail[a2] = port_node(cb, pb, OUT)
            self.arc_head[a2] = port_node(ca, pa, IN)
            for aid in (a1, a2):
                self.arc_kind[aid] = int(ArcKind.INTER)
                self.arc_len[aid] = 1
            self.arc_opp[a1] = a2
            self.arc_opp[a2] = a1

        adj: list[list[tuple[int, int, int]]] = [[] for _ in range(self.n_nodes)]
        for aid in range(n_arcs):
            adj[self.arc_tail[aid]].append((self.arc_head[aid], aid, self.arc_len[aid]))
        self.out_adj: list[tuple[tuple[int, int, int], ...]] = [
            tuple(sorted(lst, key=lambda t: t[1])) for lst in adj
        ]

        # committed internal arcs per coupler: {coupler: {arc: owner}}
        self._committed: dict[int, dict[int, str]] = {}

    # -- basic queries ------------------------------------------------------

    def node_coupler(self, node: int) -> int:
        return node // 8

    def arc_coupler(self, aid: int) -> int:
        """Coupler whose interior an internal arc crosses (head coupler for
        segment arcs)."""
        return self.arc_head[aid] // 8

    def out_arcs(self, node: int) -> tuple[tuple[int, int, int], ...]:
        return self.out_adj[node]

    def coupler_adjacency(self) -> list[list[int]]:
        """Bidirectional coupler-level adjacency (one entry per segment)."""
        adj: list[list[int]] = [[] for _ in self.mesh.couplers]
        for seg in self.mesh.segments:
            adj[seg.a[0]].append(seg.b[0])
            adj[seg.b[0]].append(seg.a[0])
        return adj

    def resolve_pin(self, pin: Pin) -> int:
        if not (0 <= pin.coupler < len(self.mesh.couplers)):
            raise MeshError(f"pin references unknown coupler {pin.coupler}")
        if not (0 <= pin.port < 4):
            raise MeshError(f"pin references invalid port {pin.port}")
        if pin.direction not in ("in", "out"):
            raise MeshError(f"pin direction must be 'in' or 'out', got {pin.direction!r}")
        return pin.node

    def occupancy_state(self) -> tuple:
        """Full occupancy fingerprint, used for exact restore checks."""
        return (
            tuple(self.arc_status),
            tuple(self.arc_owner),
            tuple(c.state for c in self.mesh.couplers),
        )

    # -- path legality ------------------------------------------------------

    def extension_guard(self, source: int, target: int, path: tuple[int, ...],
                        net_id: Optional[str] = None):
        """Return a predicate deciding whether an arc may extend ``path``.

        The predicate captures the partial-path state once, so per-successor
        checks are O(1).  Rules: arc occupancy (free, or owned by ``net_id``
        while the path is still walking the net's already-routed tree from
        the source), no arc together with its opposite, no re-entering a
        coupler already passed through (except arriving at the target when
        source and target live on the same coupler), and at most one
        internal crossing per coupler.
        """
        arc_status = self.arc_status
        arc_owner = self.arc_owner
        arc_kind = self.arc_kind
        arc_opp = self.arc_opp
        FREE = int(ArcStatus.FREE)
        ACTIVE = int(ArcStatus.ACTIVE)
        INTER = int(ArcKind.INTER)

        src_coupler = source // 8
        entered = {src_coupler}
        crossed: set[int] = set()
        used: set[int] = set()
        prefix_mode = net_id is not None
        for aid in path:
            used.add(aid)
            if arc_kind[aid] == INTER:
                entered.add(self.arc_head[aid] // 8)
            else:
                crossed.add(self.arc_head[aid] // 8)
            if prefix_mode and arc_owner[aid] != net_id:
                prefix_mode = False

        def admit(head: int, aid: int) -> bool:
            st = arc_status[aid]
            if st != FREE:
                if st == ACTIVE:
                    if arc_owner[aid] != net_id or not prefix_mode:
                        return False
                else:
                    # a state-excluded internal arc may still host this
                    # net's own fan-out (bar/cross upgraded to partial)
                    if (net_id is None or arc_kind[aid] == INTER
                            or not _intra_upgrade_ok(self, aid, net_id)):
                        return False
            if aid in used:
                return False
            opp = arc_opp[aid]
            if opp >= 0 and opp in used:
                return False
            hc = head // 8
            if arc_kind[aid] == INTER:
                if hc in entered and not (head == target and hc == src_coupler):
                    return False
            else:
                if hc in crossed:
                    return False
            return True

        return admit


def _intra_upgrade_ok(rrg: RoutingResourceGraph, aid: int, net_id: str) -> bool:
    """May ``net_id`` claim a state-excluded internal arc anyway?

    True when every commitment at the coupler already belongs to the net
    and adding this arc still classifies to a physical state (the same-net
    fan-out that turns bar or cross into partial).
    """
    cid = aid // 8
    committed = rrg._committed.get(cid, {})
    if any(owner != net_id for owner in committed.values()):
        return False
    merged = dict(committed)
    merged[aid] = net_id
    return _classify_state(merged, rrg) is not None


def validate_path(rrg: RoutingResourceGraph, path: Iterable[int], length: int,
                  net_id: Optional[str] = None) -> list[Violation]:
    """Check a complete arc sequence against all legality rules.

    Returns an empty list when the path is legal and its segment count is
    exactly ``length``; otherwise one :class:`Violation` per broken rule.
    An empty path is legal with length zero.
    """
    arcs = list(path)
    violations: list[Violation] = []
    if not arcs:
        if length != 0:
            violations.append(Violation("length-mismatch", None,
                                        f"empty path has length 0, expected {length}"))
        return violations

    for aid in arcs:
        if not (0 <= aid < rrg.n_arcs):
            return [Violation("unknown-arc", aid, "arc id outside the graph")]

    for prev, nxt in zip(arcs, arcs[1:]):
        if rrg.arc_head[prev] != rrg.arc_tail[nxt]:
            violations.append(Violation("non-contiguous", nxt,
                                        f"arc {nxt} does not start where arc {prev} ends"))

    inter = int(ArcKind.INTER)
    source = rrg.arc_tail[arcs[0]]
    src_coupler = source // 8
    target = rrg.arc_head[arcs[-1]]
    entered = {src_coupler}
    crossed: set[int] = set()
    for i, aid in enumerate(arcs):
        head = rrg.arc_head[aid]
        hc = head // 8
        if rrg.arc_kind[aid] == inter:
            ring_close = (i == len(arcs) - 1 and head == target and hc == src_coupler)
            if hc in entered and not ring_close:
                violations.append(Violation("coupler-revisit", aid,
                                            f"coupler {hc} visited twice"))
            entered.add(hc)
        else:
            if hc in crossed:
                violations.append(Violation("coupler-revisit", aid,
                                            f"coupler {hc} crossed twice"))
            crossed.add(hc)

    seen: set[int] = set()
    for aid in arcs:
        if aid in seen:
            violations.append(Violation("arc-repeat", aid, "arc used twice"))
        opp = rrg.arc_opp[aid]
        if opp >= 0 and opp in seen:
            violations.append(Violation("opposite-pair", aid,
                                        f"arc {aid} and its opposite {opp} share the path"))
        seen.add(aid)

    free = int(ArcStatus.FREE)
    active = int(ArcStatus.ACTIVE)
    intra = int(ArcKind.INTRA)
    for aid in arcs:
        st = rrg.arc_status[aid]
        if st == free:
            continue
        if st == active and net_id is not None and rrg.arc_owner[aid] == net_id:
            continue
        if (st != active and net_id is not None and rrg.arc_kind[aid] == intra
                and _intra_upgrade_ok(rrg, aid, net_id)):
            continue
        who = rrg.arc_owner[aid]
        violations.append(Violation("occupancy", aid,
                                    f"arc {aid} is {'forbidden' if st != active else 'owned by ' + str(who)}"))

    total = sum(rrg.arc_len[a] for a in arcs)
    if total != length:
        violations.append(Violation("length-mismatch", None,
                                    f"path length {total}, expected {length}"))
    return violations


# ---------------------------------------------------------------------------
# Occupancy mutation
# ---------------------------------------------------------------------------

def _classify_state(arcs: dict[int, str], rrg: RoutingResourceGraph) -> Optional[CouplerState]:
    """Coupler state implied by its committed internal arcs, or None on
    physically impossible combinations."""
    if not arcs:
        return CouplerState.AVAILABLE
    pairs = {rrg.arc_pair[a] for a in arcs}
    if pairs <= BAR_PAIRS:
        return CouplerState.BAR
    if pairs <= CROSS_PAIRS:
        return CouplerState.CROSS
    if len(arcs) == 2:
        (a1, o1), (a2, o2) = sorted(arcs.items())
        same_tail = rrg.arc_tail[a1] == rrg.arc_tail[a2]
        if same_tail and o1 == o2:
            return CouplerState.PARTIAL
    return None


def _refresh_coupler(rrg: RoutingResourceGraph, cid: int) -> None:
    """Recompute coupler state and internal-arc statuses from commitments."""
    arcs = rrg._committed.get(cid, {})
    state = _classify_state(arcs, rrg)
    assert state is not None, "inconsistent commitments slipped past commit checks"
    rrg.mesh.couplers[cid].state = state

    if state is CouplerState.AVAILABLE:
        allowed = None  # everything free
    elif state is CouplerState.BAR:
        allowed = BAR_PAIRS
    elif state is CouplerState.CROSS:
        allowed = CROSS_PAIRS
    else:  # PARTIAL admits exactly the two committed fan-out arcs
        allowed = frozenset()

    base = cid * 8
    for aid in range(base, base + 8):
        if aid in arcs:
            rrg.arc_status[aid] = int(ArcStatus.ACTIVE)
            continue
        rrg.arc_owner[aid] = None
        if allowed is None or rrg.arc_pair[aid] in allowed:
            rrg.arc_status[aid] = int(ArcStatus.FREE)
        else:
            rrg.arc_status[aid] = int(ArcStatus.FORBIDDEN)


def commit_path(rrg: RoutingResourceGraph, path: Iterable[int], net_id: str) -> None:
    """Mark a validated path active for ``net_id``; all-or-nothing.

    Segment arcs become active and their opposites forbidden.  Internal
    arcs update the coupler state: the first use fixes bar or cross, a
    same-net fan-out at one entering port upgrades to partial, and any
    other combination (including demands from another net) aborts without
    touching the graph.
    """
    arcs = list(path)
    problems = validate_path(rrg, arcs, sum(rrg.arc_len[a] for a in arcs), net_id)
    problems = [v for v in problems if v.rule != "length-mismatch"]
    if problems:
        raise CommitError(f"path fails validation: {problems[:3]}")

    intra = int(ArcKind.INTRA)
    staged: dict[int, dict[int, str]] = {}
    for aid in arcs:
        if rrg.arc_kind[aid] != intra:
            continue
        cid = aid // 8
        merged = staged.setdefault(cid, dict(rrg._committed.get(cid, {})))
        merged[aid] = net_id
    for cid, merged in staged.items():
        if _classify_state(merged, rrg) is None:
            raise CommitError(
                f"coupler {cid} cannot satisfy state demands of net {net_id!r}")

    for aid in arcs:
        rrg.arc_status[aid] = int(ArcStatus.ACTIVE)
        rrg.arc_owner[aid] = net_id
        opp = rrg.arc_opp[aid]
        if opp >= 0:
            rrg.arc_status[opp] = int(ArcStatus.FORBIDDEN)
    for cid, merged in staged.items():
        rrg._committed[cid] = merged
        _refresh_coupler(rrg, cid)


def rip_up(rrg: RoutingResourceGraph, net_id: str) -> None:
    """Release every resource owned by ``net_id``, restoring prior state."""
    inter = int(ArcKind.INTER)
    touched_couplers: set[int] = set()
    for aid in range(rrg.n_arcs):
        if rrg.arc_owner[aid] != net_id:
            continue
        rrg.arc_owner[aid] = None
        rrg.arc_status[aid] = int(ArcStatus.FREE)
        if rrg.arc_kind[aid] == inter:
            opp = rrg.arc_opp[aid]
            rrg.arc_status[opp] = int(ArcStatus.FREE)
        else:
            touched_couplers.add(aid // 8)
    for cid in touched_couplers:
        committed = rrg._committed.get(cid)
        if committed:
            remaining = {a: o for a, o in committed.items() if o != net_id}
            if remaining:
                rrg._committed[cid] = remaining
            else:
                del rrg._committed[cid]
        _refresh_coupler(rrg, cid)


def build_rrg(mesh: HexMesh, check_heuristic: bool = True) -> RoutingResourceGraph:
    """Expand a mesh into its routing-resource graph.

    By default the coordinate-based look-ahead estimator is verified
    exhaustively against true coupler distances and construction aborts if
    it could ever overestimate; the coordinate scheme is treated as correct
    only operationally.
    """
    rrg = RoutingResourceGraph(mesh)
    if check_heuristic:
        from . import heuristic as _h

        report = _h.verify_heuristic(rrg, _h.Backend.HEX)
        if not report.admissible:
            raise MeshError(
                "look-ahead estimator overestimates on this mesh: "
                f"{report.admissibility_counterexamples[:3]}")
    return rrg


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def mesh_to_dict(mesh: HexMesh) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "mesh",
        "radius": mesh.radius,
        "couplers": [
            {
                "id": c.id,
                "cells": [list(c.cells[0]), list(c.cells[1])],
                "coords": list(c.coords),
                "state": c.state.value,
            }
            for c in mesh.couplers
        ],
        "segments": [
            {
                "id": s.id,
                "ends": [[s.a[0], s.a[1]], [s.b[0], s.b[1]]],
            }
            for s in mesh.segments
        ],
    }


def save_mesh(mesh: HexMesh, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(mesh_to_dict(mesh), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_mesh(path: str) -> HexMesh:
    """Rebuild a mesh from its JSON document.

    Construction is deterministic, so the file's radius fully determines the
    mesh; the stored tables are cross-checked against the rebuild to catch
    stale or hand-edited files.
    """
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("kind") != "mesh":
        raise MeshError(f"{path} is not a mesh document")
    mesh = build_mesh(int(doc["radius"]))
    if len(doc["couplers"]) != len(mesh.couplers) or len(doc["segments"]) != len(mesh.segments):
        raise MeshError(f"{path} does not match the deterministic construction")
    for c, entry in zip(mesh.couplers, doc["couplers"]):
        if entry["id"] != c.id or tuple(entry["coords"]) != c.coords:
            raise MeshError(f"coupler table mismatch in {path} at id {entry['id']}")
    return mesh
