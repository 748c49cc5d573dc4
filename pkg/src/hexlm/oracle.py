"""Brute-force ground truth for exact-length routing.

``enumerate_paths`` walks every legal arc sequence between two pins up to a
length bound and tallies how many paths realise each exact segment count.
It re-implements the legality rules from scratch (recursive sets rather
than the guard closures the engines use) so that agreement between oracle
and engines actually checks both sides.  The only pruning is the residual
bound g + bfs(n) <= L_max with true bidirectional coupler distances, which
can never hide a legal path.

Cost is exponential by design; stick to small meshes and bounds, and the
``node_budget`` raises rather than silently truncating.  Each enumeration
is self-contained, so different pin pairs can run in parallel over a
shared read-only graph.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .mesh import ArcKind, ArcStatus, RoutingResourceGraph

DEFAULT_L_MAX = 24
DEFAULT_NODE_BUDGET = 40_000_000


class OracleWorkLimit(RuntimeError):
    """Enumeration exceeded its configured work budget."""


@dataclass
class FeasibleLengthSet:
    """All achievable exact lengths between two pins, with path counts."""

    source: int
    target: int
    l_max: int
    counts: dict[int, int] = field(default_factory=dict)
    witness: dict[int, tuple[int, ...]] = field(default_factory=dict)

    @property
    def lengths(self) -> list[int]:
        return sorted(self.counts)

    def feasible(self, length: int) -> bool:
        return length in self.counts


@dataclass(frozen=True)
class QuantizationVerdict:
    quantized: bool
    minimum: Optional[int]
    offenders: tuple[int, ...] = ()


def check_quantization(fls: FeasibleLengthSet) -> QuantizationVerdict:
    """Do the feasible lengths all sit on {d, d+2, d+4, ...}?

    The verdict is computed from the data, never assumed; offenders list
    every length breaking the parity ladder.
    """
    lengths = fls.lengths
    if not lengths:
        return QuantizationVerdict(False, None, ())
    d = lengths[0]
    offenders = tuple(x for x in lengths if (x - d) % 2 != 0)
    return QuantizationVerdict(not offenders, d, offenders)


def _coupler_bfs(rrg: RoutingResourceGraph, origin_coupler: int) -> list[int]:
    # Independent of heuristic.coupler_distances on purpose: the oracle must
    # not borrow from the machinery it is used to judge.
    n = len(rrg.mesh.couplers)
    adj: list[list[int]] = [[] for _ in range(n)]
    for seg in rrg.mesh.segments:
        adj[seg.a[0]].append(seg.b[0])
        adj[seg.b[0]].append(seg.a[0])
    dist = [n * 4 + 1] * n
    dist[origin_coupler] = 0
    dq = deque([origin_coupler])
    while dq:
        u = dq.popleft()
        for v in adj[u]:
            if dist[u] + 1 < dist[v]:
                dist[v] = dist[u] + 1
                dq.append(v)
    return dist


def enumerate_paths(rrg: RoutingResourceGraph, source: int, target: int,
                    l_max: int = DEFAULT_L_MAX,
                    node_budget: int = DEFAULT_NODE_BUDGET,
                    net_id: Optional[str] = None,
                    reverse_order: bool = False) -> FeasibleLengthSet:
    """Exhaustively enumerate legal paths from ``source`` to ``target``.

    ``reverse_order`` flips successor iteration; results must not depend on
    it (the counts are a set property), which the tests assert.
    """
    if l_max < 0:
        raise ValueError("l_max must be non-negative")
    out = FeasibleLengthSet(source, target, l_max)
    if source == target:
        out.counts[0] = 1
        out.witness[0] = ()
        return out

    remaining = _coupler_bfs(rrg, target // 8)
    inter = int(ArcKind.INTER)
    free = int(ArcStatus.FREE)
    active = int(ArcStatus.ACTIVE)
    src_coupler = source // 8

    arc_head = rrg.arc_head
    arc_kind = rrg.arc_kind
    arc_opp = rrg.arc_opp
    arc_status = rrg.arc_status
    arc_owner = rrg.arc_owner
    out_adj = rrg.out_adj

    entered = {src_coupler}
    crossed: set[int] = set()
    used: set[int] = set()
    path: list[int] = []
    work = 0

    def walk(node: int, g: int) -> None:
        nonlocal work
        work += 1
        if work > node_budget:
            raise OracleWorkLimit(f"enumeration exceeded {node_budget} steps")
        succ = out_adj[node]
        if reverse_order:
            succ = succ[::-1]
        for head, aid, alen in succ:
            st = arc_status[aid]
            if st != free and not (st == active and net_id is not None
                                   and arc_owner[aid] == net_id):
                continue
            if aid in used:
                continue
            opp = arc_opp[aid]
            if opp >= 0 and opp in used:
                continue
            g2 = g + alen
            if g2 > l_max:
                continue
            hc = head // 8
            if arc_kind[aid] == inter:
                if hc in entered and not (head == target and hc == src_coupler):
                    continue
                if head == target:
                    path.append(aid)
                    out.counts[g2] = out.counts.get(g2, 0) + 1
                    out.witness.setdefault(g2, tuple(path))
                    path.pop()
                    continue
                if g2 + remaining[hc] > l_max:
                    continue
                entered.add(hc)
                used.add(aid)
                path.append(aid)
                walk(head, g2)
                path.pop()
                used.discard(aid)
                entered.discard(hc)
            else:
                if hc in crossed:
                    continue
                if head == target:
                    path.append(aid)
                    out.counts[g2] = out.counts.get(g2, 0) + 1
                    out.witness.setdefault(g2, tuple(path))
                    path.pop()
                    continue
                if g2 + remaining[hc] > l_max:
                    continue
                crossed.add(hc)
                used.add(aid)
                path.append(aid)
                walk(head, g2)
                path.pop()
                used.discard(aid)
                crossed.discard(hc)

    walk(source, 0)
    return out
