import math

import pytest

from hexlm import oracle as oc
from hexlm import search as se
import hexlm.multipin as mp
from hexlm.mesh import ArcKind, ArcStatus, MeshError, Pin, validate_path

from conftest import fresh_rrg, interior_couplers, reachable_in_pin


def _pair(rrg, src_coupler_idx=0, dst_coupler_idx=-1):
    interior = interior_couplers(rrg)
    src = Pin(interior[src_coupler_idx], 2, "out")
    got = reachable_in_pin(rrg, src, interior[dst_coupler_idx])
    assert got
    return src, got[1], got[0]


def test_margin_zero_at_shortest():
    rrg = fresh_rrg(2)
    src, dst, g0 = _pair(rrg)
    m = mp.detour_margin(rrg, src, dst, g0)
    assert m.value == 0 and m.reachable and m.shortest == g0


def test_margin_arithmetic_on_distance_eight_placement():
    import hexlm.benchgen as bg

    inst = bg.gen_ottd(3, [8], 0)[0]
    rrg = inst.fresh_rrg()
    net = inst.netlist.nets[0]
    m = mp.detour_margin(rrg, net.source, net.sinks[0].pin, 12)
    assert m.shortest == 8
    assert m.value == 4


def test_margin_unreachable_sentinel():
    rrg = fresh_rrg(1)
    src, dst, _ = _pair(rrg)
    tc = dst.coupler
    for aid in range(rrg.n_arcs):
        if rrg.arc_len[aid] == 1 and rrg.arc_head[aid] // 8 == tc:
            rrg.arc_status[aid] = int(ArcStatus.FORBIDDEN)
    m = mp.detour_margin(rrg, src, dst, 10)
    assert not m.reachable and math.isinf(m.value)


def test_order_sinks_by_margin():
    rrg = fresh_rrg(2)
    interior = interior_couplers(rrg)
    src = Pin(interior[0], 2, "out")
    found = []
    for c in interior[1:]:
        got = reachable_in_pin(rrg, src, c)
        if got and got[0] >= 2:
            found.append((got[1], got[0]))
        if len(found) == 3:
            break
    (p1, g1), (p2, g2), (p3, g3) = found
    net = mp.Net("n", src, (mp.Sink(p1, g1 + 4), mp.Sink(p2, g2),
                            mp.Sink(p3, g3 + 2)))
    assert mp.order_sinks(rrg, net) == [1, 2, 0]


def test_order_sinks_stable_on_ties():
    rrg = fresh_rrg(2)
    interior = interior_couplers(rrg)
    src = Pin(interior[0], 2, "out")
    found = []
    for c in interior[1:]:
        got = reachable_in_pin(rrg, src, c)
        if got:
            found.append((got[1], got[0]))
        if len(found) == 3:
            break
    net = mp.Net("n", src, tuple(mp.Sink(p, g) for p, g in found))
    assert mp.order_sinks(rrg, net) == [0, 1, 2]


def test_order_sinks_six_distinct_margins_ascending():
    import hexlm.benchgen as bg

    inst = bg.gen_multicast(3, 6, 3, count=1)[0]
    rrg = inst.fresh_rrg()
    net = inst.netlist.nets[0]
    order = mp.order_sinks(rrg, net)
    margins = [mp.detour_margin(rrg, net.source, s.pin, s.length).value
               for s in net.sinks]
    ordered = [margins[i] for i in order]
    assert ordered == sorted(margins)


def test_route_single_sink_at_shortest():
    rrg = fresh_rrg(2)
    src, dst, g0 = _pair(rrg)
    net = mp.Net("n", src, (mp.Sink(dst, g0),))
    res = mp.route_net(rrg, net, policy="hlm")
    assert res.routed
    assert res.twl == g0
    assert res.sinks[0].achieved == g0
    assert res.strategy_used == "hlm"


def test_twl_counts_union_once():
    rrg = fresh_rrg(2)
    inter = [a for a in range(rrg.n_arcs)
             if rrg.arc_kind[a] == int(ArcKind.INTER)]
    shared = inter[:3]
    arm1 = shared + inter[3:10]          # 10 segments
    arm2 = shared + inter[10:19]         # 12 segments
    sinks = [mp.SinkResult(Pin(0, 0, "in"), 10, 10, tuple(arm1), se.SearchStats()),
             mp.SinkResult(Pin(0, 1, "in"), 12, 12, tuple(arm2), se.SearchStats())]
    assert mp._twl(rrg, sinks) == 10 + 12 - 3


def test_shared_prefix_twl_arithmetic_end_to_end():
    rrg = fresh_rrg(2)
    interior = interior_couplers(rrg)
    src = Pin(interior[0], 2, "out")
    sinks = []
    for c in (interior[10], interior[15]):
        got = reachable_in_pin(rrg, src, c)
        sinks.append(mp.Sink(got[1], got[0]))
    net = mp.Net("n", src, tuple(sinks))
    res = mp.route_net(rrg, net, policy="dslm")
    assert res.routed
    a0 = {a for a in res.sinks[0].arcs if rrg.arc_len[a] == 1}
    a1 = {a for a in res.sinks[1].arcs if rrg.arc_len[a] == 1}
    assert res.twl == len(a0) + len(a1) - len(a0 & a1)


def test_route_netlist_empty():
    rrg = fresh_rrg(1)
    assert mp.route_netlist(rrg, mp.Netlist(1, [])) == []


def test_two_far_nets_route_disjoint():
    rrg = fresh_rrg(3)
    interior = interior_couplers(rrg)
    src_a = Pin(interior[0], 2, "out")
    src_b = Pin(interior[-1], 2, "out")
    got_a = reachable_in_pin(rrg, src_a, interior[4])
    got_b = reachable_in_pin(rrg, src_b, interior[-5])
    netlist = mp.Netlist(3, [
        mp.Net("a", src_a, (mp.Sink(got_a[1], got_a[0]),)),
        mp.Net("b", src_b, (mp.Sink(got_b[1], got_b[0]),)),
    ])
    results = mp.route_netlist(rrg, netlist, policy="auto")
    assert all(r.routed for r in results)
    arcs_a = set(results[0].sinks[0].arcs)
    arcs_b = set(results[1].sinks[0].arcs)
    assert not (arcs_a & arcs_b)


def test_competing_nets_never_share_arcs():
    rrg = fresh_rrg(2)
    interior = interior_couplers(rrg)
    src_a = Pin(interior[0], 2, "out")
    src_b = Pin(interior[1], 2, "out")
    got_a = reachable_in_pin(rrg, src_a, interior[10])
    got_b = reachable_in_pin(rrg, src_b, interior[10])
    if got_b is None or got_a is None:
        pytest.skip("no shared-coupler contention available")
    netlist = mp.Netlist(2, [
        mp.Net("a", src_a, (mp.Sink(got_a[1], got_a[0]),)),
        mp.Net("b", src_b, (mp.Sink(got_b[1], got_b[0]),)),
    ])
    results = mp.route_netlist(rrg, netlist, policy="auto")
    assert results[0].routed
    owners: dict[int, str] = {}
    for r, net_id in zip(results, ("a", "b")):
        if not r.routed:
            continue
        for sr in r.sinks:
            for aid in sr.arcs:
                assert owners.setdefault(aid, net_id) == net_id
    for aid in range(rrg.n_arcs):
        if rrg.arc_status[aid] == int(ArcStatus.ACTIVE):
            opp = rrg.arc_opp[aid]
            if opp >= 0:
                assert rrg.arc_status[opp] != int(ArcStatus.ACTIVE)


def test_failed_net_restores_graph_state():
    rrg = fresh_rrg(2)
    src, dst, g0 = _pair(rrg)
    fls = oc.enumerate_paths(rrg, src.node, dst.node, l_max=14)
    bad_l = next(L for L in range(g0, 15) if L not in fls.counts)
    before = rrg.occupancy_state()
    net = mp.Net("n", src, (mp.Sink(dst, bad_l),))
    res = mp.route_net(rrg, net, policy="auto")
    assert not res.routed
    assert res.failure_reason in ("blocked", "infeasible")
    assert rrg.occupancy_state() == before


def test_routed_paths_validate_with_exact_lengths():
    import hexlm.benchgen as bg

    inst = bg.gen_multicast(3, 6, 1, count=1)[0]
    rrg = inst.fresh_rrg()
    net = inst.netlist.nets[0]
    res = mp.route_net(rrg, net, policy="hlm")
    assert res.routed
    for sink, sr in zip(net.sinks, res.sinks):
        assert sr.achieved == sink.length
        assert validate_path(rrg, sr.arcs, sink.length, net.id) == []
    assert mp.net_tree_ok(rrg, net, res)
    assert res.twl <= sum(s.length for s in net.sinks)


def test_netlist_margin_ordering_flag(monkeypatch):
    rrg = fresh_rrg(2)
    interior = interior_couplers(rrg)
    src_a = Pin(interior[0], 2, "out")
    src_b = Pin(interior[1], 2, "out")
    ga = reachable_in_pin(rrg, src_a, interior[12])
    gb = reachable_in_pin(rrg, src_b, interior[14])
    netlist = mp.Netlist(2, [
        mp.Net("loose", src_a, (mp.Sink(ga[1], ga[0] + 2),)),
        mp.Net("tight", src_b, (mp.Sink(gb[1], gb[0]),)),
    ])
    calls = []
    real = mp.route_net

    def spy(rrg_, net, *a, **kw):
        calls.append(net.id)
        return real(rrg_, net, *a, **kw)

    monkeypatch.setattr(mp, "route_net", spy)
    results = mp.route_netlist(rrg, netlist, policy="auto",
                               order_by_margin=True)
    assert calls == ["tight", "loose"]
    assert [r.net_id for r in results] == ["loose", "tight"]
    calls.clear()
    rrg2 = fresh_rrg(2)
    mp.route_netlist(rrg2, netlist, policy="auto")
    assert calls == ["loose", "tight"]


def test_netlist_rejects_shared_pins():
    rrg = fresh_rrg(1)
    interior = interior_couplers(rrg)
    src = Pin(interior[0], 2, "out")
    got = reachable_in_pin(rrg, src, interior[-1])
    netlist = mp.Netlist(1, [
        mp.Net("a", src, (mp.Sink(got[1], got[0]),)),
        mp.Net("b", src, (mp.Sink(got[1], got[0]),)),
    ])
    with pytest.raises(MeshError):
        netlist.validate(rrg)


def test_net_requires_sinks_and_nonnegative_lengths():
    src = Pin(0, 2, "out")
    with pytest.raises(MeshError):
        mp.Net("n", src, ())
    with pytest.raises(MeshError):
        mp.Net("n", src, (mp.Sink(Pin(1, 0, "in"), -1),))
    with pytest.raises(MeshError):
        mp.Net("n", src, (mp.Sink(src, 4),))


def test_netlist_json_roundtrip(tmp_path):
    rrg = fresh_rrg(2)
    src, dst, g0 = _pair(rrg)
    netlist = mp.Netlist(2, [mp.Net("n0", src, (mp.Sink(dst, g0 + 2),))])
    p = tmp_path / "netlist.json"
    mp.save_netlist(netlist, str(p))
    loaded = mp.load_netlist(str(p))
    assert loaded.radius == 2
    assert loaded.nets[0].source == src
    assert loaded.nets[0].sinks[0] == mp.Sink(dst, g0 + 2)
    doc = mp.netlist_to_dict(loaded)
    assert doc["format_version"] == 1 and doc["kind"] == "netlist"


def test_results_document_shape():
    rrg = fresh_rrg(2)
    src, dst, g0 = _pair(rrg)
    net = mp.Net("n", src, (mp.Sink(dst, g0),))
    res = mp.route_net(rrg, net, policy="auto")
    doc = mp.results_to_dict([res], "auto", "hex", 1000, seed=5)
    assert doc["kind"] == "route-result" and doc["format_version"] == 1
    assert doc["totals"]["routed"] == 1
    entry = doc["nets"][0]
    assert entry["strategy_used"] == "hlm"
    assert entry["sinks"][0]["achieved"] == g0
