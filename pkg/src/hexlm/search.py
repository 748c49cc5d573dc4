"""Best-first search engines for exact-length path finding.

All engines share one queue discipline: entries are ``(key, -g, seq, node,
path, g)`` tuples ordered by smallest key, then largest accumulated length
g (finish promising detours first), then insertion order.  That makes every
run fully deterministic for a given problem.

Strategies differ only in the key and pruning rule:

* ``greedy_lm``   key = L - g, prune g > L.  Depth-first flavoured: the
  deepest partial path always pops first.
* ``h_lm``        key = L - g - h(n), prune key < 0.  The admissible
  estimate h never lets the key go negative on any prefix of a feasible
  exact-length path, so nothing reachable is lost.
* ``ds_lm``       stage one runs plain shortest-path search; if the
  shortest route is still shorter than L the surviving queue is re-keyed
  with the length-matching key and the search continues, which concentrates
  detours near the target.  Stage-one dominance pruning can drop prefixes
  stage two would need, so exhaustion falls back to a fresh ``h_lm`` run
  before giving up.
* ``lemar_like``  key = g + h(n), no length pruning, no dominance map: the
  shortest-path-first baseline with deliberately redundant expansion.

Nodes may be revisited freely via different partial paths (no CLOSED set);
legality is judged per path by the space's extension guard.  Paths are arc
tuples; every Found outcome carries a path whose segment count equals L
exactly.  Each run owns its queue and trace, so concurrent searches over a
shared read-only graph snapshot are safe.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from heapq import heappush, heappop
from typing import Callable, Optional, Sequence

DEFAULT_BUDGET = 5_000_000


class Status(Enum):
    FOUND = "found"
    NOT_FOUND = "not-found"
    INFEASIBLE = "infeasible"
    EXHAUSTED = "exhausted"


@dataclass
class SearchStats:
    pushed: int = 0
    popped: int = 0
    pruned: int = 0
    peak_queue: int = 0
    duration_s: float = 0.0

    def merge(self, other: "SearchStats") -> None:
        self.pushed += other.pushed
        self.popped += other.popped
        self.pruned += other.pruned
        self.peak_queue = max(self.peak_queue, other.peak_queue)
        self.duration_s += other.duration_s

    def to_dict(self) -> dict:
        return {
            "pushed": self.pushed,
            "popped": self.popped,
            "pruned": self.pruned,
            "peak_queue": self.peak_queue,
            "duration_s": self.duration_s,
        }


@dataclass(frozen=True)
class SearchOutcome:
    status: Status
    stats: SearchStats
    path: Optional[tuple[int, ...]] = None
    g: Optional[int] = None
    reason: str = ""

    @property
    def found(self) -> bool:
        return self.status is Status.FOUND


@dataclass
class SearchProblem:
    """One exact-length connection request over a search space.

    ``space`` must provide ``out_arcs(node) -> ((head, arc, length), ...)``
    and ``extension_guard(source, target, path, net_id) -> admit(head, arc)``.
    ``h`` is a per-node table of admissible remaining-distance estimates.
    ``length`` is the exact segment count required (ignored by
    :func:`shortest_path`).
    """

    space: object
    source: int
    target: int
    length: int
    h: Sequence[int]
    net_id: Optional[str] = None
    budget: int = DEFAULT_BUDGET
    trace: Optional[list] = None


def _trace_pop(trace, f, g, node):
    trace.append({"ev": "pop", "f": f, "g": g, "node": node})


def _trace_push(trace, f, g, node, parent, parent_f, parent_g):
    trace.append({"ev": "push", "f": f, "g": g, "node": node,
                  "parent": parent, "parent_f": parent_f, "parent_g": parent_g})


def _run_lm(problem: SearchProblem, *, heap=None, seq_start: int = 0,
            stats: Optional[SearchStats] = None) -> SearchOutcome:
    """Length-matching best-first loop shared by greedy_lm / h_lm / ds_lm."""
    t0 = time.perf_counter()
    space = problem.space
    h = problem.h
    L = problem.length
    target = problem.target
    out_arcs = space.out_arcs
    guard_of = space.extension_guard
    trace = problem.trace
    st = stats if stats is not None else SearchStats()

    seq = seq_start
    if heap is None:
        heap = []
        f0 = L - h[problem.source]
        if f0 >= 0:
            heappush(heap, (f0, 0, seq, problem.source, (), 0))
            seq += 1
            st.pushed += 1
            st.peak_queue = max(st.peak_queue, len(heap))
        else:
            st.duration_s += time.perf_counter() - t0
            return SearchOutcome(Status.INFEASIBLE, st,
                                 reason="target farther than requested length")

    while heap:
        f, _, _, node, path, g = heappop(heap)
        st.popped += 1
        if trace is not None:
            _trace_pop(trace, f, g, node)
        if node == target and g == L:
            st.duration_s += time.perf_counter() - t0
            return SearchOutcome(Status.FOUND, st, path=path, g=g)
        admit = guard_of(problem.source, target, path, problem.net_id)
        for head, aid, alen in out_arcs(node):
            if not admit(head, aid):
                st.pruned += 1
                continue
            g2 = g + alen
            f2 = L - g2 - h[head]
            if f2 < 0:
                st.pruned += 1
                continue
            if st.pushed >= problem.budget:
                st.duration_s += time.perf_counter() - t0
                return SearchOutcome(Status.EXHAUSTED, st,
                                     reason=f"push budget {problem.budget} exceeded")
            heappush(heap, (f2, -g2, seq, head, path + (aid,), g2))
            seq += 1
            st.pushed += 1
            if len(heap) > st.peak_queue:
                st.peak_queue = len(heap)
            if trace is not None:
                _trace_push(trace, f2, g2, head, node, f, g)

    st.duration_s += time.perf_counter() - t0
    return SearchOutcome(Status.NOT_FOUND, st, reason="queue exhausted")


def h_lm(problem: SearchProblem) -> SearchOutcome:
    """Heuristic-guided exact-length search (key L - g - h, prune < 0)."""
    return _run_lm(problem)


def greedy_lm(problem: SearchProblem) -> SearchOutcome:
    """Exact-length search without look-ahead (key L - g, prune g > L)."""
    zero = _ZERO_CACHE.get(len(problem.h))
    if zero is None:
        zero = _ZERO_CACHE[len(problem.h)] = [0] * len(problem.h)
    q = SearchProblem(problem.space, problem.source, problem.target,
                      problem.length, zero, problem.net_id, problem.budget,
                      problem.trace)
    return _run_lm(q)


_ZERO_CACHE: dict[int, list[int]] = {}


def lemar_like(problem: SearchProblem) -> SearchOutcome:
    """Shortest-path-ordered baseline without length pruning.

    Models wavefront routers that postpone all length adjustment: ordering
    is g + h, every legal successor is pushed regardless of L, and there is
    no visited map, so redundant expansion grows quickly with L.
    """
    t0 = time.perf_counter()
    space = problem.space
    h = problem.h
    L = problem.length
    target = problem.target
    out_arcs = space.out_arcs
    guard_of = space.extension_guard
    trace = problem.trace
    st = SearchStats()

    seq = 0
    heap = [(h[problem.source], 0, seq, problem.source, (), 0)]
    seq += 1
    st.pushed = 1
    st.peak_queue = 1

    while heap:
        f, _, _, node, path, g = heappop(heap)
        st.popped += 1
        if trace is not None:
            _trace_pop(trace, f, g, node)
        if node == target and g == L:
            st.duration_s = time.perf_counter() - t0
            return SearchOutcome(Status.FOUND, st, path=path, g=g)
        admit = guard_of(problem.source, target, path, problem.net_id)
        for head, aid, alen in out_arcs(node):
            if not admit(head, aid):
                st.pruned += 1
                continue
            g2 = g + alen
            if st.pushed >= problem.budget:
                st.duration_s = time.perf_counter() - t0
                return SearchOutcome(Status.EXHAUSTED, st,
                                     reason=f"push budget {problem.budget} exceeded")
            f2 = g2 + h[head]
            heappush(heap, (f2, -g2, seq, head, path + (aid,), g2))
            seq += 1
            st.pushed += 1
            if len(heap) > st.peak_queue:
                st.peak_queue = len(heap)
            if trace is not None:
                _trace_push(trace, f2, g2, head, node, f, g)

    st.duration_s = time.perf_counter() - t0
    return SearchOutcome(Status.NOT_FOUND, st, reason="queue exhausted")


def _astar(problem: SearchProblem, *, keep_queue: bool):
    """Dominance-pruned A* core; optionally hands back the live queue."""
    t0 = time.perf_counter()
    space = problem.space
    h = problem.h
    target = problem.target
    out_arcs = space.out_arcs
    guard_of = space.extension_guard
    st = SearchStats()

    seq = 0
    heap = [(h[problem.source], 0, seq, problem.source, (), 0)]
    seq += 1
    st.pushed = 1
    st.peak_queue = 1
    best_g: dict[int, int] = {}

    hit = None
    while heap:
        f, _, _, node, path, g = heappop(heap)
        st.popped += 1
        prev = best_g.get(node)
        if prev is not None and prev <= g:
            continue
        best_g[node] = g
        if node == target:
            hit = (path, g)
            break
        admit = guard_of(problem.source, target, path, problem.net_id)
        for head, aid, alen in out_arcs(node):
            if not admit(head, aid):
                st.pruned += 1
                continue
            g2 = g + alen
            prev = best_g.get(head)
            if prev is not None and prev <= g2:
                st.pruned += 1
                continue
            if st.pushed >= problem.budget:
                st.duration_s = time.perf_counter() - t0
                return None, st, heap, seq, True
            heappush(heap, (g2 + h[head], -g2, seq, head, path + (aid,), g2))
            seq += 1
            st.pushed += 1
            if len(heap) > st.peak_queue:
                st.peak_queue = len(heap)

    st.duration_s = time.perf_counter() - t0
    if not keep_queue:
        heap = []
    return hit, st, heap, seq, False


def shortest_path(problem: SearchProblem) -> SearchOutcome:
    """Minimal-segment-count legal path via dominance-pruned A*.

    The problem's ``length`` field is ignored; the outcome's ``g`` is the
    achieved shortest length under current occupancy.
    """
    hit, st, _, _, exhausted = _astar(problem, keep_queue=False)
    if exhausted:
        return SearchOutcome(Status.EXHAUSTED, st,
                             reason=f"push budget {problem.budget} exceeded")
    if hit is None:
        return SearchOutcome(Status.NOT_FOUND, st, reason="target unreachable")
    path, g = hit
    return SearchOutcome(Status.FOUND, st, path=path, g=g)


def ds_lm(problem: SearchProblem) -> SearchOutcome:
    """Dual-stage exact-length search: shortest path first, detours second.

    Stage one stops when the target pops with cost scost; scost == L
    returns that path.  Otherwise stage two re-keys every surviving queue
    entry with the length-matching key and resumes with revisitation
    allowed, which concentrates detours near the target.

    Stage one's node dominance assumes path-independent legality, which
    the per-path rules break: a doomed short prefix can hide the only
    viable route, so stage one may miss a reachable target or report an
    inflated scost.  Every negative stage outcome (unreachable, scost > L,
    stage-two exhaustion) is therefore re-checked with a fresh ``h_lm``
    run, whose pruning is complete, before anything is reported as
    unroutable.  The push budget applies per stage.
    """
    L = problem.length
    hit, st, heap, seq, exhausted = _astar(problem, keep_queue=True)
    if exhausted:
        return SearchOutcome(Status.EXHAUSTED, st,
                             reason=f"push budget {problem.budget} exceeded")

    def repair(infeasible_reason: str = "") -> SearchOutcome:
        fresh = SearchProblem(problem.space, problem.source, problem.target,
                              problem.length, problem.h, problem.net_id,
                              problem.budget, problem.trace)
        out = h_lm(fresh)
        st.merge(out.stats)
        if out.status is Status.NOT_FOUND and infeasible_reason:
            return SearchOutcome(Status.INFEASIBLE, st, reason=infeasible_reason)
        return SearchOutcome(out.status, st, path=out.path, g=out.g,
                             reason=out.reason)

    if hit is None:
        return repair()
    spath, scost = hit
    if scost == L:
        return SearchOutcome(Status.FOUND, st, path=spath, g=scost)
    if scost > L:
        return repair(f"no path of exact length {L}; shortest found {scost}")

    h = problem.h
    stage2: list = []
    while heap:
        _, negg, _, node, path, g = heappop(heap)
        f2 = L - g - h[node]
        if f2 < 0:
            st.pruned += 1
            continue
        heappush(stage2, (f2, negg, seq, node, path, g))
        seq += 1
    out = _run_lm(problem, heap=stage2, seq_start=seq, stats=st)
    if out.status is Status.NOT_FOUND:
        return repair()
    return out


STRATEGIES: dict[str, Callable[[SearchProblem], SearchOutcome]] = {
    "greedy": greedy_lm,
    "hlm": h_lm,
    "dslm": ds_lm,
    "lemar": lemar_like,
}
