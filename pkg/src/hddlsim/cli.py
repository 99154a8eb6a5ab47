"""Command-line interface.

Subcommands:
  generate    write a scenario file (seeded or resolved to explicit nodes)
  detect      run the detection pass on a scenario, dump hole records
  route       route one src/dst pair under gpsr or hddl, print the trace
  experiment  run a full sweep from a config file or flags, emit CSVs
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .harness import ExperimentConfig, build_caches, emit, run_experiment
from .hddl import route_hddl
from .gpsr import route_gpsr
from .netgen import Scenario, dump_scenario, load_scenario, scenario_from_network


def _parse_area(text: str):
    parts = [float(v) for v in text.split(",")]
    if len(parts) == 1:
        return (parts[0], parts[0])
    if len(parts) == 2:
        return (parts[0], parts[1])
    raise argparse.ArgumentTypeError("area must be W or W,H")


def _parse_carve(text: str):
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("carve must be cx,cy,r")
    return tuple(parts)


def _add_net_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--nodes", type=int, default=150, help="node count")
    p.add_argument("--area", type=_parse_area, default=(400.0, 400.0))
    p.add_argument("--radius", type=float, default=20.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--carve", type=_parse_carve, default=None, metavar="CX,CY,R")


def cmd_generate(args) -> int:
    sc = Scenario(
        seed=args.seed,
        n=args.nodes,
        area_width=args.area[0],
        area_height=args.area[1],
        radius=args.radius,
        carve=[args.carve] if args.carve else [],
    )
    net = sc.build()
    if args.explicit:
        out = scenario_from_network(net, seed=args.seed)
    else:
        out = sc
    dump_scenario(out, args.out)
    print(f"wrote scenario ({net.n} nodes) to {args.out}")
    return 0


def cmd_detect(args) -> int:
    sc = load_scenario(args.scenario)
    net = sc.build()
    cfg = ExperimentConfig(delta=args.delta).detection()
    caches, records, messages, evals = build_caches(net, cfg)
    docs = [rec.to_dict() for rec in records]
    payload = {
        "holes": docs,
        "announce_messages": messages,
        "ratio_evaluations": evals,
        "cached_nodes": sorted(caches),
    }
    text = json.dumps(payload, indent=1, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        print(f"wrote {len(docs)} hole record(s) to {args.out}")
    else:
        print(text)
    return 0


def cmd_route(args) -> int:
    sc = load_scenario(args.scenario)
    net = sc.build()
    if args.protocol == "hddl":
        caches, _, _, _ = build_caches(net, ExperimentConfig(delta=args.delta).detection())
        path = route_hddl(net, caches, args.src, args.dst)
    else:
        path = route_gpsr(net, args.src, args.dst)
    print(
        json.dumps(
            {
                "protocol": args.protocol,
                "src": args.src,
                "dst": args.dst,
                "delivered": path.delivered,
                "hops": path.hop_count,
                "length_m": path.euclidean_length,
                "trace": path.hops,
                "modes": path.mode_trace,
            },
            indent=1,
        )
    )
    return 0 if path.delivered else 1


def cmd_experiment(args) -> int:
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        if "area" in doc:
            doc["area"] = tuple(doc["area"])
        if doc.get("carve"):
            doc["carve"] = tuple(doc["carve"])
        cfg = ExperimentConfig(**doc)
    else:
        cfg = ExperimentConfig(
            node_counts=args.node_counts,
            networks_per_count=args.seeds,
            area=args.area,
            radius=args.radius,
            delta=args.delta,
            pairs_per_network=args.pairs,
            carve=args.carve,
            seed_base=args.seed,
        )
    metrics = run_experiment(cfg)
    paths = emit(metrics, args.out)
    for note in metrics.skipped:
        print(f"skipped {note}", file=sys.stderr)
    print(json.dumps(paths, indent=1))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hddlsim")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a scenario file")
    _add_net_flags(g)
    g.add_argument("--explicit", action="store_true", help="store resolved node list")
    g.add_argument("--out", required=True)
    g.set_defaults(fn=cmd_generate)

    d = sub.add_parser("detect", help="detection pass -> hole-record dump")
    d.add_argument("scenario")
    d.add_argument("--delta", type=float, default=2.25)
    d.add_argument("--out", default=None)
    d.set_defaults(fn=cmd_detect)

    r = sub.add_parser("route", help="route one pair")
    r.add_argument("scenario")
    r.add_argument("--src", type=int, required=True)
    r.add_argument("--dst", type=int, required=True)
    r.add_argument("--protocol", choices=["gpsr", "hddl"], default="gpsr")
    r.add_argument("--delta", type=float, default=2.25)
    r.set_defaults(fn=cmd_route)

    e = sub.add_parser("experiment", help="full sweep -> routes/summary files")
    e.add_argument("--config", default=None, help="JSON config file")
    e.add_argument("--node-counts", type=int, nargs="+", dest="node_counts",
                   default=list(ExperimentConfig().node_counts))
    e.add_argument("--seeds", type=int, default=50, help="networks per count")
    e.add_argument("--pairs", type=int, default=50)
    e.add_argument("--area", type=_parse_area, default=(400.0, 400.0))
    e.add_argument("--radius", type=float, default=20.0)
    e.add_argument("--delta", type=float, default=2.25)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--carve", type=_parse_carve, default=None, metavar="CX,CY,R")
    e.add_argument("--out", required=True)
    e.set_defaults(fn=cmd_experiment)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
