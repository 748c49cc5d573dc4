import pytest

from hexlm import heuristic as hx
from hexlm.mesh import Pin, RoutingResourceGraph, build_mesh


def fresh_rrg(radius: int) -> RoutingResourceGraph:
    return RoutingResourceGraph(build_mesh(radius))


@pytest.fixture(scope="session")
def rrg_by_radius():
    """Read-only graphs shared across tests; never commit on these."""
    return {r: fresh_rrg(r) for r in range(4)}


def interior_couplers(rrg):
    return [c.id for c in rrg.mesh.couplers
            if all(p is not None for p in c.port_segment)]


def reachable_in_pin(rrg, src: Pin, coupler: int):
    """The target in-port of ``coupler`` with the smallest shortest length."""
    from hexlm import search as se

    best = None
    for p in range(4):
        pin = Pin(coupler, p, "in")
        h = hx.node_h_table(rrg, pin.node, hx.Backend.HEX)
        out = se.shortest_path(se.SearchProblem(rrg, src.node, pin.node, 0, h))
        if out.found and (best is None or out.g < best[0]):
            best = (out.g, pin)
    return best  # (shortest, pin) or None
