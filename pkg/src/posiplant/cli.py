"""Command-line front end.

Subcommands::

    posiplant graph   KIND SIZE [--defect-nodes K] [--defect-edges K] [-o FILE]
    posiplant plant   (-n N | --graph FILE | --topology KIND:SIZE) [--count C] [--seed S]
    posiplant verify  INSTANCE... [--exhaustive-cap 24]
    posiplant solve   INSTANCE... {sa,greedy,exhaustive} [--reads R] [--sweeps S]
    posiplant eval    SAMPLESET... [-o FILE]
    posiplant stats   INSTANCE... [-o FILE]
    posiplant dimacs  INSTANCE [-o FILE]

Exit status is 0 on success, 1 when a verification or generation fails
and 2 on a usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .exceptions import PosiplantError, SparseGraphError
from .formats import (
    FORMAT_VERSION,
    atomic_write,
    read_instance,
    read_sampleset,
    reports_to_csv,
    write_instance,
    write_sampleset,
)
from .metrics import run_report
from .model import Qubo, brute_force, eval_posiform, eval_qubo, posiform_to_qubo
from .planting import PlantedInstance, PlantingConfig, plant_many
from .samplers import SamplerParams, exhaustive, simulated_annealing, steepest_descent
from .topology import apply_defects, by_name, defects_to_counts, read_edge_list, write_edge_list
from .twosat import is_uniquely_satisfiable, posiform_to_twosat, to_dimacs

log = logging.getLogger("posiplant")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
KINDS = ("chimera", "pegasus", "zephyr", "complete", "random")


class UsageError(Exception):
    pass


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("POSIPLANT_THREADS", "1")))
    except ValueError:
        return 1


def _map(fn, items, threads):
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------- graph

def cmd_graph(args) -> int:
    e = by_name(args.kind, args.size, t=args.t, density=args.density, seed=args.seed)
    if args.target_counts:
        if args.defect_nodes or args.defect_edges:
            raise UsageError("--target-counts replaces --defect-nodes/--defect-edges")
        e = defects_to_counts(e, args.target_counts[0], args.target_counts[1], args.seed)
    elif args.defect_nodes or args.defect_edges:
        e = apply_defects(e, args.defect_nodes, args.defect_edges, args.seed)
    out = Path(args.output or f"{args.kind}{args.size}.edges")
    buf = io.StringIO()
    write_edge_list(e, buf)
    atomic_write(out, buf.getvalue())
    print(f"nodes={e.num_vars} active={e.num_active} edges={e.num_edges} -> {out}")
    return EXIT_OK


# ---------------------------------------------------------------- plant

def _parse_bits(text: str) -> tuple[int, ...]:
    if text.startswith("@"):
        text = Path(text[1:]).read_text().strip()
    text = text.replace(",", "").replace(" ", "")
    if not text or set(text) - {"0", "1"}:
        raise UsageError(f"planted bitstring must be 0/1 digits, got {text!r}")
    return tuple(int(c) for c in text)


def _parse_pool(text: str) -> tuple[float, ...]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad coefficient pool {text!r}") from None
    return tuple(int(v) if v.is_integer() else v for v in vals)


def _plant_graph(args):
    """Edge set (possibly compacted) and the original labels of its nodes."""
    if args.graph:
        e = read_edge_list(args.graph)
    elif args.topology:
        kind, _, size = args.topology.partition(":")
        if not size.isdigit():
            raise UsageError("--topology expects KIND:SIZE, e.g. chimera:4")
        e = by_name(kind, int(size), density=args.density, seed=args.seed)
    else:
        return None, None
    if e.inactive:
        if not args.compact:
            raise UsageError(
                f"graph has {len(e.inactive)} inactive nodes; pass --compact to plant on the active ones"
            )
        e, old = e.compact()
        return e, [int(v) for v in old]
    return e, None


def cmd_plant(args) -> int:
    edge_set, active = _plant_graph(args)
    if edge_set is not None:
        n = edge_set.num_vars
        if args.num_vars is not None and args.num_vars != n:
            raise UsageError(f"-n {args.num_vars} does not match the graph's {n} active nodes")
    elif args.num_vars is not None:
        n = args.num_vars
    else:
        raise UsageError("give -n, --graph or --topology")
    if args.planted == "random":
        bits, random_bits = (0,) * n, True
    else:
        bits, random_bits = _parse_bits(args.planted), False
        if len(bits) != n:
            raise UsageError(f"planted bitstring has {len(bits)} bits, expected {n}")
    if args.count < 1:
        raise UsageError("--count must be at least 1")
    template = PlantingConfig(
        num_vars=n,
        planted=bits,
        edge_set=edge_set,
        batch_size=args.batch_size,
        coefficient_pool=_parse_pool(args.coeffs),
        seed=args.seed,
        max_clauses=args.max_clauses,
    )
    instances = plant_many(template, args.count, args.seed, random_bits=random_bits, threads=args.threads)
    out_dir = Path(args.out_dir)
    width = max(4, len(str(args.count - 1)))
    names = []
    for k, inst in enumerate(instances):
        path = out_dir / f"{args.prefix}_{k:0{width}d}.json"
        write_instance(path, inst, edge_set=edge_set if args.embed_graph else None, active_nodes=active)
        names.append(path.name)
        print(f"{path}: n={inst.num_vars} clauses={inst.clause_count} "
              f"couplers={len(inst.qubo.quadratic)} seed={inst.seed}")
    manifest = {
        "format_version": FORMAT_VERSION,
        "generator_version": instances[0].generator_version,
        "master_seed": args.seed,
        "edge_set_label": instances[0].edge_set_label,
        "num_vars": n,
        "files": names,
        "seeds": [inst.seed for inst in instances],
    }
    atomic_write(out_dir / f"{args.prefix}_manifest.json", json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------- verify

def _same_qubo(a: Qubo, b: Qubo) -> bool:
    return a.num_vars == b.num_vars and a.linear == b.linear and a.quadratic == b.quadratic and a.offset == b.offset


def verify_instance(inst: PlantedInstance, cap: int = 24) -> list[tuple[str, bool, str]]:
    """Run the certificate checks on a loaded instance.

    Returns ``(check, passed, detail)`` triples.  The brute-force check runs
    only when the instance has at most ``cap`` variables; larger instances
    rely on the 2-SAT certificate carried by the stored posiform.
    """
    q, x = inst.qubo, inst.planted
    results = []
    e = eval_qubo(q, x)
    results.append(("energy", e == inst.planted_energy,
                    f"energy at planted = {e:g}, recorded planted_energy = {inst.planted_energy:g}"))
    total = inst.planted_energy + inst.offset
    results.append(("offset", total == 0.0,
                    f"planted_energy + offset = {inst.planted_energy:g} + {inst.offset:g} = {total:g}"))
    has_posiform = bool(inst.posiform.linear or inst.posiform.quadratic)
    if has_posiform:
        expanded = posiform_to_qubo(inst.posiform)
        same = _same_qubo(expanded, q.with_offset(inst.offset))
        pz = eval_posiform(inst.posiform, x)
        results.append(("posiform", same and pz == 0.0,
                        f"posiform at planted = {pz:g}; expansion matches qubo + offset: {same}"))
    if q.num_vars <= cap:
        emin, minimizers = brute_force(q, cap)
        ok = minimizers == [tuple(x)] and emin == inst.planted_energy
        detail = f"minimum {emin:g} attained by {len(minimizers)} bitstring(s)"
        if minimizers and minimizers[0] != tuple(x):
            detail += f"; first minimiser {''.join(map(str, minimizers[0]))}"
        results.append(("uniqueness", ok, detail))
    else:
        results.append(("uniqueness", True, "certified-by-construction"))
        if has_posiform:
            f = posiform_to_twosat(inst.posiform)
            ok = f.satisfied_by(x) and is_uniquely_satisfiable(f, x)
            results.append(("2sat-certificate", ok, f"{len(f)} clauses, planted is the unique model: {ok}"))
    return results


def cmd_verify(args) -> int:
    status = EXIT_OK
    for path in args.instances:
        inst, _ = read_instance(path)
        for name, ok, detail in verify_instance(inst, args.exhaustive_cap):
            if name == "uniqueness" and detail == "certified-by-construction":
                print(f"{path}: uniqueness: certified-by-construction")
                continue
            print(f"{path}: {name}: {'PASS' if ok else 'FAIL'} ({detail})")
            if not ok:
                status = EXIT_FAIL
    return status


# ---------------------------------------------------------------- solve

def _sampler_params(args) -> SamplerParams:
    beta = None
    if args.beta_min is not None or args.beta_max is not None:
        if args.beta_min is None or args.beta_max is None:
            raise UsageError("give both --beta-min and --beta-max")
        beta = (args.beta_min, args.beta_max)
    return SamplerParams(num_reads=args.reads, sweeps=args.sweeps, beta_range=beta, seed=args.seed)


def run_sampler(inst: PlantedInstance, sampler: str, params: SamplerParams, cap: int = 24):
    if sampler == "sa":
        return simulated_annealing(inst.qubo, params)
    if sampler == "greedy":
        return steepest_descent(inst.qubo, params)
    if sampler == "exhaustive":
        return exhaustive(inst.qubo, cap=cap)
    raise UsageError(f"unknown sampler {sampler!r}")


def cmd_solve(args) -> int:
    params = _sampler_params(args)
    if args.output and len(args.instances) > 1:
        raise UsageError("-o names a single output; use --out-dir for several instances")

    def one(path):
        path = Path(path)
        inst, _ = read_instance(path)
        s = run_sampler(inst, args.sampler, params, args.exhaustive_cap)
        s.instance = path.stem
        s.ground_energy = inst.planted_energy
        if args.clock == "nominal":
            s.use_nominal_clock()
        if args.output:
            stem = Path(args.output)
        else:
            stem = Path(args.out_dir or path.parent) / f"{path.stem}.{args.sampler}"
        jpath, _ = write_sampleset(stem, s)
        _, best = s.best()
        report = run_report(s)
        return f"{jpath}: best {best:g} (planted {inst.planted_energy:g}) gsp {report.gsp:g} reads {s.num_reads}"

    for line in _map(one, args.instances, args.threads):
        print(line)
    return EXIT_OK


# ---------------------------------------------------------------- eval

def cmd_eval(args) -> int:
    reports = [run_report(read_sampleset(p)) for p in args.samplesets]
    text = reports_to_csv(reports)
    if args.output:
        atomic_write(args.output, text)
        mean = sum(r.gsp for r in reports) / len(reports)
        print(f"{len(reports)} rows -> {args.output} (mean gsp {mean:g})")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------- stats

def cmd_stats(args) -> int:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["instance", "term", "coefficient", "count"])
    for path in args.instances:
        inst, _ = read_instance(path)
        for term, values in (("linear", inst.qubo.linear.values()), ("quadratic", inst.qubo.quadratic.values())):
            for v, c in sorted(Counter(values).items()):
                w.writerow([Path(path).stem, term, json.dumps(int(v) if float(v).is_integer() else v), c])
    if args.output:
        atomic_write(args.output, buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


# ---------------------------------------------------------------- dimacs

def cmd_dimacs(args) -> int:
    inst, _ = read_instance(args.instance)
    if not (inst.posiform.linear or inst.posiform.quadratic):
        raise UsageError("instance file carries no posiform")
    text = to_dimacs(posiform_to_twosat(inst.posiform))
    if args.output:
        atomic_write(args.output, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="posiplant", description="Planted-solution QUBO generator and benchmark.")
    p.add_argument("--version", action="version", version=f"posiplant {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("graph", help="write a hardware or synthetic graph as an edge list")
    g.add_argument("kind", choices=KINDS)
    g.add_argument("size", type=int, help="grid size m, or node count for complete/random")
    g.add_argument("--t", type=int, default=4, help="shore size for chimera/zephyr")
    g.add_argument("--density", type=float, help="edge probability for random graphs")
    g.add_argument("--defect-nodes", type=int, default=0)
    g.add_argument("--defect-edges", type=int, default=0)
    g.add_argument("--target-counts", type=int, nargs=2, metavar=("QUBITS", "COUPLERS"),
                   help="remove random nodes and edges until exactly these counts remain")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", help="default: <kind><size>.edges")
    g.set_defaults(func=cmd_graph)

    pl = sub.add_parser("plant", help="generate planted instances")
    pl.add_argument("-n", "--num-vars", type=int)
    pl.add_argument("--graph", help="edge-list file")
    pl.add_argument("--topology", help="KIND:SIZE, e.g. chimera:4")
    pl.add_argument("--density", type=float, help="edge probability for --topology random:N")
    pl.add_argument("--compact", action="store_true", help="plant on the active nodes of a defective graph")
    pl.add_argument("--planted", default="random", help="'random', a 0/1 string, or @FILE")
    pl.add_argument("-B", "--batch-size", type=int, help="clauses before the first uniqueness check (default n)")
    pl.add_argument("--coeffs", default="1,2", help="comma-separated coefficient pool")
    pl.add_argument("--max-clauses", type=int, help="give up after this many clauses (default 100n)")
    pl.add_argument("--seed", type=int, default=0, help="master seed; instance k uses a derived seed")
    pl.add_argument("--count", type=int, default=1)
    pl.add_argument("--out-dir", default=".")
    pl.add_argument("--prefix", default="instance")
    pl.add_argument("--embed-graph", action="store_true", help="store the edge set in each file")
    pl.add_argument("--threads", type=int, default=default_threads())
    pl.set_defaults(func=cmd_plant)

    v = sub.add_parser("verify", help="check instance certificates")
    v.add_argument("instances", nargs="+")
    v.add_argument("--exhaustive-cap", type=int, default=24)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("solve", help="run a sampler on instances")
    s.add_argument("instances", nargs="+")
    s.add_argument("sampler", choices=("sa", "greedy", "exhaustive"))
    s.add_argument("--reads", type=int, default=800)
    s.add_argument("--sweeps", type=int, default=1000)
    s.add_argument("--beta-min", type=float)
    s.add_argument("--beta-max", type=float)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--exhaustive-cap", type=int, default=24)
    s.add_argument("--clock", choices=("wall", "nominal"), default="wall",
                   help="'nominal' charges 1 ns per single-variable update, for reproducible timings")
    s.add_argument("-o", "--output", help="output stem; writes STEM.json and STEM.csv")
    s.add_argument("--out-dir")
    s.add_argument("--threads", type=int, default=default_threads())
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("eval", help="GSP and TTS table from sample sets")
    e.add_argument("samplesets", nargs="+", help="sample-set JSON files")
    e.add_argument("-o", "--output")
    e.set_defaults(func=cmd_eval)

    st = sub.add_parser("stats", help="coefficient histogram CSV")
    st.add_argument("instances", nargs="+")
    st.add_argument("-o", "--output")
    st.set_defaults(func=cmd_stats)

    d = sub.add_parser("dimacs", help="export an instance's 2-SAT certificate as DIMACS CNF")
    d.add_argument("instance")
    d.add_argument("-o", "--output")
    d.set_defaults(func=cmd_dimacs)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except SparseGraphError as exc:
        print(f"posiplant {args.command}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, PosiplantError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"posiplant {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
