"""Command-line surface: generate, reduce, kernelize, solve, verify, bench.

Exit codes are a stable contract: 0 for reduced/solved output, 10 for a
YES resolution, 20 for a NO resolution, 1 for usage or input errors. All
randomness flows from --seed (or the SPARSE_OUTBRANCH_SEED environment
variable), so identical invocations produce identical artifacts up to the
timing fields of reports.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from typing import Optional

import numpy as np

from . import verify as verify_mod
from .generators import FAMILIES, generate
from .instance_io import (
    InstanceFile,
    ParseError,
    load_instance,
    save_instance,
    serialize_instance,
)
from .iob_kernel import IobInstance, iob_report, kernelize_iob, vc_or_solution
from .lob_analyzer import analyze
from .lob_reducer import LobInstance, reduce_to_fixpoint
from .oracle import SolveMode, solve_branch_and_bound
from .outcomes import NoOutcome, ReducedOutcome, YesOutcome

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_YES = 10
EXIT_NO = 20


def _default_seed() -> int:
    env = os.environ.get("SPARSE_OUTBRANCH_SEED")
    try:
        return int(env) if env else 0
    except ValueError:
        return 0


def _write_json(path: Optional[str], payload: dict) -> None:
    if path is None:
        return
    text = json.dumps(payload, indent=2, sort_keys=True)
    if path == "-":
        print(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _trace_summary(trace) -> dict:
    counts: dict[str, int] = {}
    for step in trace:
        tag = getattr(getattr(step, "application", step), "rule_id", None)
        key = f"rule{tag}" if tag is not None else "crown"
        counts[key] = counts.get(key, 0) + 1
    return counts


def _dot_export(path: str, inst: LobInstance, ana) -> None:
    dc = ana.contracted
    colors = {}
    for v in ana.special:
        colors[v] = "tomato"
    for v in ana.isolated:
        colors[v] = "skyblue"
    for p in ana.decomposition.paths:
        for w in p.internals:
            colors.setdefault(w, "palegreen")
    lines = ["digraph reduced {"]
    g = inst.graph
    for v in range(g.n):
        attrs = []
        cls = colors.get(dc.origin[v])
        if cls:
            attrs.append(f'style=filled fillcolor="{cls}"')
        if v == g.root:
            attrs.append("shape=doublecircle")
        lines.append(f'  {v} [{" ".join(attrs)}];' if attrs else f"  {v};")
    for u, v in g.arcs():
        lines.append(f"  {u} -> {v};")
    lines.append("}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _load(path: str, expect_kind: str) -> InstanceFile:
    inst = load_instance(path)
    for w in inst.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if inst.kind != expect_kind:
        raise SystemExit(f"error: expected a {expect_kind} instance, got {inst.kind}")
    return inst


def cmd_reduce_lob(args) -> int:
    try:
        f = _load(args.file, "lob")
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    inst = LobInstance(f.graph, f.k)
    report: dict = {
        "command": "reduce-lob",
        "input": {"n": f.graph.n, "m": f.graph.m, "root": f.graph.root, "k": f.k},
    }
    t0 = time.monotonic()
    outcome, trace = reduce_to_fixpoint(inst)
    report["timing"] = {"reduce_s": round(time.monotonic() - t0, 3)}
    report["trace_summary"] = _trace_summary(trace)
    if isinstance(outcome, NoOutcome):
        report["outcome"] = "no"
        report["reason"] = outcome.reason
        _write_json(args.json, report)
        print(f"NO: {outcome.reason}")
        return EXIT_NO
    reduced = outcome.instance
    report["reduced"] = {"n": reduced.graph.n, "m": reduced.graph.m}
    t1 = time.monotonic()
    ana = analyze(reduced, check=False)
    report["timing"]["analyze_s"] = round(time.monotonic() - t1, 3)
    report["certificate"] = ana.cert.to_dict()
    report["size_report"] = {k: v for k, v in ana.report.items() if k != "paths"}
    if args.dot:
        _dot_export(args.dot, reduced, ana)
    if ana.cert.accepted:
        report["outcome"] = "yes"
        report["decision_source"] = "certificate"
        _write_json(args.json, report)
        print(f"YES: certificate {ana.cert.decision} "
              f"(sp={ana.cert.special_count}, iso={ana.cert.isolated_count}, "
              f"sl={ana.cert.slave_count}, k={f.k})")
        return EXIT_YES
    if args.accept_constant is not None and reduced.graph.n > args.accept_constant * f.k:
        report["outcome"] = "yes"
        report["decision_source"] = "accept-constant"
        _write_json(args.json, report)
        print(f"YES: size {reduced.graph.n} exceeds c*k = {args.accept_constant * f.k}")
        return EXIT_YES
    if reduced.graph.n <= args.solve_max_n:
        t2 = time.monotonic()
        res = solve_branch_and_bound(reduced.graph, f.k, SolveMode.LEAF,
                                     timeout=args.budget)
        report["timing"]["solve_s"] = round(time.monotonic() - t2, 3)
        if res.best_value >= f.k:
            report["outcome"] = "yes"
            report["decision_source"] = "exact-solve"
            _write_json(args.json, report)
            print(f"YES: reduced core solved, maxleaf >= {res.best_value}")
            return EXIT_YES
        if res.exact:
            report["outcome"] = "no"
            report["decision_source"] = "exact-solve"
            _write_json(args.json, report)
            print(f"NO: reduced core solved, maxleaf = {res.best_value} < k = {f.k}")
            return EXIT_NO
    report["outcome"] = "reduced"
    out_path = args.out or (args.file + ".reduced")
    save_instance(out_path, "lob", reduced.graph, reduced.k,
                  comments=[f"reduced from {os.path.basename(args.file)}"])
    report["output_file"] = out_path
    _write_json(args.json, report)
    print(f"REDUCED: {f.graph.n} -> {reduced.graph.n} vertices, written to {out_path}")
    return EXIT_OK


def cmd_kernelize_iob(args) -> int:
    try:
        f = _load(args.file, "iob")
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    inst = IobInstance(f.graph, f.k)
    report: dict = {
        "command": "kernelize-iob",
        "input": {"n": f.graph.n, "m": f.graph.m, "root": f.graph.root, "k": f.k},
    }
    t0 = time.monotonic()
    outcome, trace = kernelize_iob(inst, threshold=args.threshold)
    report["timing"] = {"kernelize_s": round(time.monotonic() - t0, 3)}
    report["trace_summary"] = _trace_summary(trace)
    if isinstance(outcome, YesOutcome):
        tree = outcome.certificate
        report["outcome"] = "yes"
        report["internal_count"] = tree.internal_count()
        _write_json(args.json, report)
        print(f"YES: branching with {tree.internal_count()} internal vertices")
        for v in sorted(tree.parent):
            print(f"  parent[{v}] = {tree.parent[v]}")
        return EXIT_YES
    if isinstance(outcome, NoOutcome):
        report["outcome"] = "no"
        report["reason"] = outcome.reason
        _write_json(args.json, report)
        print(f"NO: {outcome.reason}")
        return EXIT_NO
    reduced = outcome.instance
    mapping = list(range(f.graph.n))
    for step in trace:
        mapping = [step.mapping[x] if x is not None else None for x in mapping]
    report["outcome"] = "reduced"
    report["kernel"] = iob_report(reduced, threshold=args.threshold)
    report["vertex_map"] = {str(i): m for i, m in enumerate(mapping)}
    out_path = args.out or (args.file + ".kernel")
    comments = [f"kernel of {os.path.basename(args.file)}"]
    comments += [f"map {i} {m}" for i, m in enumerate(mapping) if m is not None]
    save_instance(out_path, "iob", reduced.graph, reduced.k, comments=comments)
    report["output_file"] = out_path
    _write_json(args.json, report)
    print(f"REDUCED: {f.graph.n} -> {reduced.graph.n} vertices, written to {out_path}")
    return EXIT_OK


def cmd_solve(args) -> int:
    try:
        inst = load_instance(args.file)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    for w in inst.warnings:
        print(f"warning: {w}", file=sys.stderr)
    if args.mode == "auto":
        mode = SolveMode.LEAF if inst.kind == "lob" else SolveMode.INTERNAL
    else:
        mode = SolveMode(args.mode)
    from .digraph import is_connected
    if not is_connected(inst.graph):
        _write_json(args.json, {"command": "solve", "outcome": "no",
                                "reason": "vertex unreachable from root"})
        print("NO: vertex unreachable from root (no out-branching exists)")
        return EXIT_NO
    t0 = time.monotonic()
    res = solve_branch_and_bound(inst.graph, None, mode, timeout=args.budget)
    elapsed = time.monotonic() - t0
    report = {
        "command": "solve",
        "mode": mode.value,
        "input": {"n": inst.graph.n, "m": inst.graph.m, "k": inst.k},
        "best_value": res.best_value,
        "exact": res.exact,
        "timing": {"solve_s": round(elapsed, 3)},
    }
    _write_json(args.json, report)
    print(f"{mode.value} optimum{'' if res.exact else ' (lower bound: timed out)'}: "
          f"{res.best_value}")
    if res.witness is not None:
        arcs = " ".join(f"{p}->{v}" for v, p in sorted(res.witness.parent.items()))
        print(f"witness: {arcs}")
    if not res.exact:
        return EXIT_OK
    return EXIT_YES if res.best_value >= inst.k else EXIT_NO


def cmd_verify(args) -> int:
    names = list(verify_mod.SUITES) if args.suite == "all" else args.suite.split(",")
    for name in names:
        if name not in verify_mod.SUITES:
            print(f"error: unknown suite {name!r}; available: "
                  f"{', '.join(verify_mod.SUITES)}", file=sys.stderr)
            return EXIT_ERROR
    results = verify_mod.run_suites(names, trials=args.trials,
                                    max_n=args.max_n, seed=args.seed)
    ok = True
    for res in results:
        print(res.summary())
        ok = ok and res.passed
    print("ALL SUITES PASS" if ok else "SUITE FAILURES PRESENT")
    return EXIT_OK if ok else EXIT_ERROR


def cmd_gen(args) -> int:
    kwargs = {}
    if args.d is not None:
        kwargs["d"] = args.d
    if args.m is not None:
        kwargs["m"] = args.m
    if args.both_prob is not None:
        kwargs["both_prob"] = args.both_prob
    if args.keep_prob is not None:
        kwargs["keep_prob"] = args.keep_prob
    if args.twin_factor is not None:
        kwargs["twin_factor"] = args.twin_factor
    try:
        g = generate(args.family, args.n, args.k, args.seed, **kwargs)
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    kind = args.kind or ("iob" if args.family == "iob-twins" else "lob")
    comment = (f"family={args.family} n={args.n} k={args.k} seed={args.seed} "
               + " ".join(f"{k}={v}" for k, v in sorted(kwargs.items()))).strip()
    text = serialize_instance(kind, g, args.k, comments=[comment])
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return EXIT_OK


def cmd_bench(args) -> int:
    rows = []
    fieldnames = ["family", "kind", "k", "rep", "seed", "n_input", "m_input",
                  "outcome", "n_out", "m_out", "cover_size", "elapsed_s"]
    rng_base = args.seed
    for k in range(args.k_min, args.k_max + 1):
        for rep in range(args.reps):
            seed = rng_base * 1_000_003 + 101 * k + rep
            n = max(8, args.scale * k)
            row = {"family": args.family, "k": k, "rep": rep, "seed": seed}
            if args.family in ("planar", "bipath-chain"):
                if args.family == "planar":
                    g = generate("planar", n, k, seed, both_prob=0.1, keep_prob=0.25)
                else:
                    g = generate("bipath-chain", n, k, seed)
                row.update({"kind": "lob", "n_input": g.n, "m_input": g.m})
                t0 = time.monotonic()
                outcome, _ = reduce_to_fixpoint(LobInstance(g, k))
                row["elapsed_s"] = round(time.monotonic() - t0, 3)
                if isinstance(outcome, ReducedOutcome):
                    red = outcome.instance.graph
                    row.update({"outcome": "reduced", "n_out": red.n,
                                "m_out": red.m, "cover_size": ""})
                else:
                    row.update({"outcome": outcome.status, "n_out": "",
                                "m_out": "", "cover_size": ""})
            elif args.family in ("iob-twins", "degenerate"):
                g = generate("iob-twins", n, k, seed, d=args.d or 3)
                row.update({"kind": "iob", "n_input": g.n, "m_input": g.m})
                t0 = time.monotonic()
                outcome, _ = kernelize_iob(IobInstance(g, k))
                row["elapsed_s"] = round(time.monotonic() - t0, 3)
                if isinstance(outcome, ReducedOutcome):
                    red = outcome.instance
                    cover = vc_or_solution(red)
                    csize = len(cover) if isinstance(cover, set) else ""
                    row.update({"outcome": "reduced", "n_out": red.graph.n,
                                "m_out": red.graph.m, "cover_size": csize})
                else:
                    row.update({"outcome": outcome.status, "n_out": "",
                                "m_out": "", "cover_size": ""})
            else:
                print(f"error: bench does not support family {args.family!r}",
                      file=sys.stderr)
                return EXIT_ERROR
            rows.append(row)
    out = sys.stdout if args.csv in (None, "-") else open(args.csv, "w", newline="")
    try:
        writer = csv.DictWriter(out, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()
    sized = [(r["k"], r["n_out"]) for r in rows if r["outcome"] == "reduced"]
    if len(sized) >= 3:
        xs = np.array([s[0] for s in sized], dtype=float)
        ys = np.array([s[1] for s in sized], dtype=float)
        slope, intercept = np.polyfit(xs, ys, 1)
        pred = slope * xs + intercept
        ss_tot = float(((ys - ys.mean()) ** 2).sum())
        r2 = 1.0 - float(((ys - pred) ** 2).sum()) / ss_tot if ss_tot else 1.0
        print(f"fit: kernel_size ~ {slope:.2f}*k + {intercept:.2f} (R^2 = {r2:.3f})",
              file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparse-outbranch",
        description="Kernelization toolkit for rooted out-branching problems "
                    "on sparse digraphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce-lob", help="apply the leaf-out-branching reduction rules")
    p.add_argument("file")
    p.add_argument("--json", help="write a JSON report here ('-' for stdout)")
    p.add_argument("--dot", help="write a colored DOT rendering of the reduced graph")
    p.add_argument("--out", help="path for the reduced instance file")
    p.add_argument("--accept-constant", type=float, default=None,
                   help="accept when the reduced size exceeds this constant times k")
    p.add_argument("--solve-max-n", type=int, default=12,
                   help="solve reduced cores up to this size exactly")
    p.add_argument("--budget", type=float, default=60.0,
                   help="time budget for the exact solve, seconds")
    p.set_defaults(fn=cmd_reduce_lob)

    p = sub.add_parser("kernelize-iob", help="run the internal-out-branching crown kernel")
    p.add_argument("file")
    p.add_argument("--json")
    p.add_argument("--out")
    p.add_argument("--threshold", type=int, default=None,
                   help="degree threshold separating small/heavy remainder "
                        "vertices (default: twice the degeneracy)")
    p.set_defaults(fn=cmd_kernelize_iob)

    p = sub.add_parser("solve", help="solve an instance exactly by branch and bound")
    p.add_argument("file")
    p.add_argument("--mode", choices=["leaf", "internal", "auto"], default="auto")
    p.add_argument("--budget", type=float, default=60.0)
    p.add_argument("--json")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("verify", help="run randomized verification suites")
    p.add_argument("--suite", default="all",
                   help="comma-separated suite names, or 'all'")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--max-n", type=int, default=None)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("gen", help="generate a seeded instance")
    p.add_argument("family", choices=sorted(FAMILIES))
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--kind", choices=["lob", "iob"], default=None)
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--d", type=int, default=None, help="degeneracy parameter")
    p.add_argument("--m", type=int, default=None, help="arc count for the random family")
    p.add_argument("--both-prob", type=float, default=None)
    p.add_argument("--keep-prob", type=float, default=None)
    p.add_argument("--twin-factor", type=int, default=None)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("bench", help="kernel size versus k as CSV")
    p.add_argument("--family", default="planar",
                   choices=["planar", "bipath-chain", "degenerate", "iob-twins"])
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--k-max", type=int, default=10)
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--scale", type=int, default=10,
                   help="input size per unit of k")
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--csv", help="CSV output path (default stdout)")
    p.set_defaults(fn=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return EXIT_ERROR
        raise
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
