"""Exact-length light-path routing on hexagonal programmable photonic meshes.

The package models a hexagonal mesh of tunable 2x2 couplers as a directed
port-level routing-resource graph and finds paths whose segment count
matches a required length exactly, the constraint that interferometer
arms, ring resonators and true time-delay lines impose.  Four best-first
strategies (greedy, heuristic-guided, dual-stage, and a wavefront-style
baseline) are cross-validated against a brute-force path enumerator, with
multi-pin fan-out, benchmark generation, and a CLI on top.
"""

__version__ = "0.1.0"

from .mesh import (ArcKind, ArcStatus, Coupler, CouplerState, HexMesh, Pin,
                   RoutingResourceGraph, Segment, Violation, build_mesh,
                   build_rrg, commit_path, rip_up, validate_path)
from .heuristic import Backend, hex_heuristic, node_h_table, verify_heuristic
from .search import (SearchOutcome, SearchProblem, SearchStats, Status,
                     ds_lm, greedy_lm, h_lm, lemar_like, shortest_path)
from .multipin import (Net, Netlist, RouteResult, Sink, detour_margin,
                       order_sinks, route_net, route_netlist)
from .oracle import (FeasibleLengthSet, QuantizationVerdict, check_quantization,
                     enumerate_paths)

__all__ = [
    "ArcKind", "ArcStatus", "Backend", "Coupler", "CouplerState",
    "FeasibleLengthSet", "HexMesh", "Net", "Netlist", "Pin",
    "QuantizationVerdict", "RouteResult", "RoutingResourceGraph",
    "SearchOutcome", "SearchProblem", "SearchStats", "Segment", "Sink",
    "Status", "Violation", "build_mesh", "build_rrg", "check_quantization",
    "commit_path", "detour_margin", "ds_lm", "enumerate_paths",
    "greedy_lm", "h_lm", "hex_heuristic", "lemar_like", "node_h_table",
    "order_sinks", "rip_up", "route_net", "route_netlist", "shortest_path",
    "validate_path", "verify_heuristic",
]
