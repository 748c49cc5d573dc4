"""Command-line front end.

Subcommands: ``gen`` (benchmark generation), ``route`` (route a netlist on
a mesh), ``bench`` (run strategy comparisons over a benchmark manifest,
emitting CSV tables and figures), ``verify`` (estimator and search
soundness audits), ``render`` (mesh/route/trace drawings).

Exit codes are a stable contract: 0 success, 1 usage or generation error,
2 routing failure, 3 push-budget exhaustion.
"""

from __future__ import annotations

import csv
import json
import os
import statistics
import sys
from pathlib import Path

import click

from . import __version__
from . import benchgen as bg
from . import heuristic as hx
from . import multipin as mp
from . import oracle as oc
from . import search as se
from .mesh import (FORMAT_VERSION, MeshError, Pin, build_mesh, build_rrg,
                   load_mesh, save_mesh)

_BACKENDS = {
    "hex": hx.Backend.HEX,
    "bfs": hx.Backend.EXACT_BFS,
    "zero": hx.Backend.ZERO,
}

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ROUTE_FAILED = 2
EXIT_BUDGET = 3


def _out_dir(value: str | None) -> Path:
    d = Path(value or os.environ.get("HEXLM_OUT_DIR", "."))
    d.mkdir(parents=True, exist_ok=True)
    return d


def _parse_lengths(text: str | None) -> list[int] | None:
    """``8:26:2`` (inclusive range) or ``8,10,12`` styles."""
    if not text:
        return None
    if ":" in text:
        parts = [int(x) for x in text.split(":")]
        if len(parts) == 2:
            start, stop, step = parts[0], parts[1], 1
        elif len(parts) == 3:
            start, stop, step = parts
        else:
            raise click.UsageError(f"bad length range {text!r}")
        if step <= 0 or stop < start:
            raise click.UsageError(f"bad length range {text!r}")
        return list(range(start, stop + 1, step))
    return [int(x) for x in text.split(",") if x.strip()]


def _write_json(doc: dict, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


@click.group()
@click.version_option(version=__version__, prog_name="hexlm")
def cli() -> None:
    """Exact-length light-path routing on hexagonal photonic meshes."""


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------

@cli.command("gen")
@click.option("--family", required=True,
              type=click.Choice(["mzi", "orr", "ottd", "multicast", "sweep"]))
@click.option("--radius", type=int, default=None, help="Mesh rings (family default).")
@click.option("--lengths", default=None, help="Lengths, e.g. 8:26:2 or 7,11,13.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--count", type=int, default=None,
              help="Instances (mzi/orr/multicast) or placement seeds (ottd/sweep).")
@click.option("--out-dir", "out_dir", default=None,
              help="Output directory (default $HEXLM_OUT_DIR or cwd).")
def cmd_gen(family, radius, lengths, seed, count, out_dir):
    """Generate a benchmark suite: meshes, netlists and a manifest."""
    out = _out_dir(out_dir)
    try:
        suite = bg.generate_suite(family, radius=radius, seed=seed,
                                  lengths=_parse_lengths(lengths), count=count)
    except (bg.GenerationError, MeshError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    files = {}
    for inst in suite.instances:
        mesh_name = f"mesh_{inst.id}.json"
        net_name = f"netlist_{inst.id}.json"
        save_mesh(build_mesh(inst.radius), out / mesh_name)
        mp.save_netlist(inst.netlist, out / net_name)
        files[inst.id] = (mesh_name, net_name)
    manifest = bg.suite_to_manifest(suite, files)
    _write_json(manifest, out / "manifest.json")
    click.echo(f"wrote {len(suite.instances)} instances "
               f"({manifest['nets']} nets) to {out}")


# ---------------------------------------------------------------------------
# route
# ---------------------------------------------------------------------------

def _strategy_exit(results) -> int:
    if all(r.routed for r in results):
        return EXIT_OK
    if any(r.failure_reason == "exhausted" for r in results):
        return EXIT_BUDGET
    return EXIT_ROUTE_FAILED


@cli.command("route")
@click.option("--mesh", "mesh_path", required=True, type=click.Path(exists=True))
@click.option("--netlist", "netlist_path", required=True, type=click.Path(exists=True))
@click.option("--strategy", default="auto", show_default=True,
              type=click.Choice(["greedy", "hlm", "dslm", "lemar", "auto"]))
@click.option("--backend", default="hex", show_default=True,
              type=click.Choice(sorted(_BACKENDS)))
@click.option("--budget", type=int, default=se.DEFAULT_BUDGET, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--format", "fmt", default="json", show_default=True,
              type=click.Choice(["json", "csv"]))
@click.option("--out", "out_path", default=None, help="Result file path.")
@click.option("--trace", "trace_path", default=None,
              help="Write per-connection search events as JSON lines.")
@click.option("--order-nets-by-margin", is_flag=True, default=False,
              help="Route tighter nets (smaller summed detour margin) first.")
def cmd_route(mesh_path, netlist_path, strategy, backend, budget, seed, fmt,
              out_path, trace_path, order_nets_by_margin):
    """Route a netlist and write the result document plus per-net stats."""
    mesh = load_mesh(mesh_path)
    rrg = build_rrg(mesh)
    netlist = mp.load_netlist(netlist_path)
    if netlist.radius != mesh.radius:
        click.echo("error: netlist radius does not match mesh", err=True)
        sys.exit(EXIT_USAGE)

    traces: list[tuple[str, int, list]] = []

    def hook(net_id: str, sink_idx: int):
        events: list = []
        traces.append((net_id, sink_idx, events))
        return events

    results = mp.route_netlist(rrg, netlist, policy=strategy,
                               backend=_BACKENDS[backend], budget=budget,
                               trace_hook=hook if trace_path else None,
                               order_by_margin=order_nets_by_margin)
    doc = mp.results_to_dict(results, strategy, backend, budget, seed)

    out = Path(out_path) if out_path else _out_dir(None) / f"route_{Path(netlist_path).stem}.{fmt}"
    if fmt == "json":
        _write_json(doc, out)
    else:
        with open(out, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["net", "status", "strategy_used", "twl",
                        "pushed", "popped", "pruned", "peak_queue", "runtime_s"])
            for r in results:
                st = r.attempts_stats
                w.writerow([r.net_id, r.status, r.strategy_used, r.twl,
                            st.pushed, st.popped, st.pruned, st.peak_queue,
                            f"{st.duration_s:.6f}"])
    if trace_path:
        with open(trace_path, "w", encoding="utf-8") as fh:
            for net_id, sink_idx, events in traces:
                for ev in events:
                    rec = {"net": net_id, "sink": sink_idx}
                    rec.update(ev)
                    fh.write(json.dumps(rec, sort_keys=True) + "\n")

    for r in results:
        st = r.attempts_stats
        click.echo(f"{r.net_id}: {r.status} ({r.strategy_used}) "
                   f"twl={r.twl} pushed={st.pushed} popped={st.popped} "
                   f"runtime={st.duration_s:.4f}s")
    click.echo(f"result written to {out}")
    sys.exit(_strategy_exit(results))


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

def _load_manifest(manifest_path: str):
    with open(manifest_path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("kind") != "benchmark-manifest":
        raise click.UsageError(f"{manifest_path} is not a benchmark manifest")
    base = Path(manifest_path).parent
    out = []
    for inst in doc["instances"]:
        mesh = load_mesh(base / inst["mesh"])
        netlist = mp.load_netlist(base / inst["netlist"])
        out.append((inst["id"], inst.get("meta", {}), mesh, netlist))
    return doc, out


@cli.command("bench")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--strategies", default=None,
              help="Comma list from greedy,hlm,dslm,lemar,auto (family default).")
@click.option("--budget", type=int, default=300_000, show_default=True)
@click.option("--lemar-budget", type=int, default=150_000, show_default=True,
              help="Smaller cap for the baseline, which rarely terminates on big L.")
@click.option("--backend", default="hex", show_default=True,
              type=click.Choice(sorted(_BACKENDS)))
@click.option("--out-dir", "out_dir", default=None)
@click.option("--figures/--no-figures", default=True, show_default=True)
def cmd_bench(manifest_path, strategies, budget, lemar_budget, backend,
              out_dir, figures):
    """Run strategy comparisons over a manifest; emit CSV tables and figures."""
    doc, instances = _load_manifest(manifest_path)
    family = doc.get("family", "bench")
    if strategies:
        strats = [s.strip() for s in strategies.split(",") if s.strip()]
    elif family == "multicast":
        strats = ["hlm", "dslm"]
    else:
        strats = ["greedy", "hlm", "dslm", "lemar"]
    for s in strats:
        if s not in ("auto",) and s not in se.STRATEGIES:
            raise click.UsageError(f"unknown strategy {s!r}")

    out = _out_dir(out_dir)
    rows = []
    for inst_id, meta, mesh, netlist in instances:
        for strat in strats:
            rrg = build_rrg(mesh, check_heuristic=False)
            b = lemar_budget if strat == "lemar" else budget
            results = mp.route_netlist(rrg, netlist, policy=strat,
                                       backend=_BACKENDS[backend], budget=b)
            st = se.SearchStats()
            for r in results:
                st.merge(r.attempts_stats)
            rows.append({
                "family": family,
                "instance": inst_id,
                "length": meta.get("length", meta.get("arm_length", "")),
                "strategy": strat,
                "status": "routed" if all(r.routed for r in results) else "failed",
                "runtime_s": round(st.duration_s, 6),
                "total_push": st.pushed,
                "popped": st.popped,
                "pruned": st.pruned,
                "peak_queue": st.peak_queue,
                "twl": sum(r.twl for r in results),
            })

    results_csv = out / f"bench_{family}.csv"
    with open(results_csv, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        w.writeheader()
        w.writerows(rows)

    # aggregate table in the shape of the strategy-comparison summaries
    agg_rows = []
    for strat in strats:
        vals = [r for r in rows if r["strategy"] == strat]
        agg_rows.append({
            "family": family,
            "strategy": strat,
            "instances": len(vals),
            "routed": sum(1 for r in vals if r["status"] == "routed"),
            "runtime_s_total": round(sum(r["runtime_s"] for r in vals), 6),
            "total_push": sum(r["total_push"] for r in vals),
            "median_push": statistics.median(r["total_push"] for r in vals),
            "mean_push": round(statistics.mean(r["total_push"] for r in vals), 1),
            "total_twl": sum(r["twl"] for r in vals),
            "mean_twl": round(statistics.mean(r["twl"] for r in vals), 1),
        })
    agg_csv = out / f"bench_{family}_aggregate.csv"
    with open(agg_csv, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=list(agg_rows[0].keys()))
        w.writeheader()
        w.writerows(agg_rows)
    click.echo(f"wrote {results_csv} and {agg_csv}")

    sweep_like = all(isinstance(r["length"], int) for r in rows) and \
        len({r["length"] for r in rows}) > 1
    if sweep_like:
        series_rows = []
        series: dict[str, list[tuple[int, float]]] = {}
        med_series: dict[str, list[tuple[int, float]]] = {}
        lengths = sorted({r["length"] for r in rows})
        for strat in strats:
            for L in lengths:
                vals = [r["total_push"] for r in rows
                        if r["strategy"] == strat and r["length"] == L]
                if not vals:
                    continue
                mean_v = statistics.mean(vals)
                med_v = statistics.median(vals)
                series.setdefault(strat, []).append((L, mean_v))
                med_series.setdefault(strat, []).append((L, med_v))
                series_rows.append({"length": L, "strategy": strat,
                                    "mean_push": round(mean_v, 1),
                                    "median_push": med_v,
                                    "samples": len(vals)})
        with open(out / f"bench_{family}_series.csv", "w", newline="",
                  encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=["length", "strategy",
                                               "mean_push", "median_push",
                                               "samples"])
            w.writeheader()
            w.writerows(series_rows)
        if figures:
            from . import render
            render.render_sweep(series, str(out / f"bench_{family}_sweep.svg"))
            click.echo(f"wrote sweep figure bench_{family}_sweep.svg")

    if figures:
        from . import render
        med = {family: {a["strategy"]: a["median_push"] for a in agg_rows}}
        render.render_strategy_bars(med, str(out / f"bench_{family}_medians.svg"))
        click.echo(f"wrote bar figure bench_{family}_medians.svg")


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

@cli.command("verify")
@click.option("--radius", type=int, default=2, show_default=True,
              help="Largest mesh radius audited (kept small; checks are exhaustive).")
@click.option("--backend", default="hex", show_default=True,
              type=click.Choice(sorted(_BACKENDS)))
@click.option("--inflate-h", type=int, default=0, show_default=True,
              help="Add a constant to the estimator to demo failure detection.")
@click.option("--pairs", type=int, default=40, show_default=True,
              help="Sampled pin pairs for the oracle agreement audit.")
@click.option("--lmax", type=int, default=12, show_default=True)
@click.option("--out", "out_path", default=None, help="Write the JSON report here.")
def cmd_verify(radius, backend, inflate_h, pairs, lmax, out_path):
    """Audit estimator soundness, oracle agreement and length quantization."""
    if radius > 3:
        raise click.UsageError("exhaustive verification is limited to radius <= 3")
    import random as _random

    report: dict = {"format_version": FORMAT_VERSION, "kind": "verify-report",
                    "radius": radius, "backend": backend, "inflate_h": inflate_h,
                    "heuristic": [], "agreement": {}, "quantization": {}}
    failed = False

    for r in range(radius + 1):
        rrg = build_rrg(build_mesh(r), check_heuristic=False)
        rep = hx.verify_heuristic(rrg, _BACKENDS[backend], inflate=inflate_h)
        report["heuristic"].append(rep.to_dict())
        status = "ok" if rep.ok else "FAIL"
        if not rep.ok:
            failed = True
        click.echo(f"heuristic {backend}{'+%d' % inflate_h if inflate_h else ''} "
                   f"radius {r}: admissible={rep.admissible} "
                   f"consistent={rep.consistent} [{status}]")

    rng = _random.Random(20_000 + radius)
    rrg = build_rrg(build_mesh(radius), check_heuristic=False)
    ncoup = len(rrg.mesh.couplers)
    disagreements = 0
    verdicts = {"quantized": 0, "not_quantized": 0, "empty": 0}
    checked = 0
    while checked < pairs:
        src = Pin(rng.randrange(ncoup), rng.randrange(4), "out").node
        dst = Pin(rng.randrange(ncoup), rng.randrange(4), "in").node
        if src == dst:
            continue
        checked += 1
        fls = oc.enumerate_paths(rrg, src, dst, l_max=lmax)
        h = hx.node_h_table(rrg, dst, _BACKENDS[backend], inflate=inflate_h)
        for L in range(lmax + 1):
            feas = fls.feasible(L)
            for engine in (se.h_lm, se.ds_lm):
                got = engine(se.SearchProblem(rrg, src, dst, L, h,
                                              budget=2_000_000)).found
                if got != feas:
                    disagreements += 1
        if not fls.lengths:
            verdicts["empty"] += 1
        elif oc.check_quantization(fls).quantized:
            verdicts["quantized"] += 1
        else:
            verdicts["not_quantized"] += 1
    report["agreement"] = {"pairs": checked, "lmax": lmax,
                           "disagreements": disagreements}
    report["quantization"] = verdicts
    if disagreements:
        failed = True
    click.echo(f"oracle agreement: {checked} pairs, L<= {lmax}, "
               f"{disagreements} disagreements "
               f"[{'FAIL' if disagreements else 'ok'}]")
    click.echo(f"quantization verdicts: {verdicts}")

    if out_path:
        _write_json(report, Path(out_path))
        click.echo(f"report written to {out_path}")
    sys.exit(EXIT_ROUTE_FAILED if failed else EXIT_OK)


# ---------------------------------------------------------------------------
# render
# ---------------------------------------------------------------------------

@cli.command("render")
@click.option("--mesh", "mesh_path", required=True, type=click.Path(exists=True))
@click.option("--result", "result_path", default=None, type=click.Path(exists=True))
@click.option("--trace", "trace_path", default=None, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True)
@click.option("--show-ids", is_flag=True, default=False)
@click.option("--title", default=None)
def cmd_render(mesh_path, result_path, trace_path, out_path, show_ids, title):
    """Draw the mesh, optionally overlaying routed paths and a search trace."""
    from . import render

    mesh = load_mesh(mesh_path)
    rrg = build_rrg(mesh, check_heuristic=False)

    routed = []
    if result_path:
        with open(result_path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        if doc.get("kind") != "route-result":
            raise click.UsageError(f"{result_path} is not a route result")
        for net in doc["nets"]:
            for i, sink in enumerate(net.get("sinks") or []):
                if not sink:
                    continue
                routed.append({"net": net["id"], "sink": i,
                               "arcs": sink["arcs"],
                               "length": sink["achieved"]})

    trace_events = []
    if trace_path:
        with open(trace_path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    trace_events.append(json.loads(line))

    render.render_mesh(mesh, out_path, rrg=rrg, routed=routed,
                       trace=trace_events or None, title=title,
                       show_ids=show_ids)
    click.echo(f"wrote {out_path}")


def main() -> None:
    try:
        cli(standalone_mode=False)
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        sys.exit(EXIT_USAGE)
    except click.ClickException as exc:
        exc.show()
        sys.exit(EXIT_USAGE)
    except click.exceptions.Abort:
        sys.exit(EXIT_USAGE)


if __name__ == "__main__":
    main()
