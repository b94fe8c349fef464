"""Command line front end.

Exit codes: 0 optimal, 1 error, 2 limit reached, 64 usage error.

``solve`` writes into ``--out``:

* ``report.json``  run report, ``schema: 1`` (see README for fields)
* ``tour.txt``     optimal tour, one vertex id per line in cyclic order
* ``pool.txt``     SEC pool dump, ``status origin v1 v2 ...`` per line

``experiment`` writes a run CSV with the fixed header :data:`RUN_FIELDS`
and a ``summary.csv`` next to it; ``stats`` writes curve tables into a
directory.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from collections import defaultdict
from pathlib import Path
from typing import Sequence

import numpy as np

from . import metrics
from .backend import BackendError, SolveLimits, make_backend
from .clustering import restricted_cluster
from .engine import RunReport, VariantConfig, solve
from .instances import (Instance, TsplibError, gen_mesh, gen_random_euclidean, load_tsplib,
                        render_tsplib)

log = logging.getLogger("inttsp")

EXIT_OK, EXIT_ERROR, EXIT_LIMIT, EXIT_USAGE = 0, 1, 2, 64
RUN_FIELDS = ("instance", "n", "variant", "sec_form", "seed", "seconds", "iterations",
              "constraints_final", "objective", "status")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _pair(text: str) -> tuple[int, int]:
    try:
        a, b = text.split(",")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N,SEED, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _filter(text: str) -> tuple[float, str]:
    body = text[2:] if text.startswith("p:") else text
    try:
        p, key = body.split(",")
        p = float(p)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected P,card|len, got {text!r}") from None
    if key not in ("card", "len") or not 0 < p <= 1:
        raise argparse.ArgumentTypeError(f"expected P in (0,1] and card|len, got {text!r}")
    return p, key


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sec-form", choices=("packing", "cut", "hybrid"), default="hybrid")
    p.add_argument("--backend", default="reference",
                   help='reference | highs | cmd:"TEMPLATE with {lp} and {sol}"')
    p.add_argument("--warm-start", action="store_true")
    p.add_argument("--no-incumbents", action="store_true")
    p.add_argument("--seed-triangles", type=float, default=0.0, metavar="P")
    p.add_argument("--filter", type=_filter, default=None, metavar="P,card|len")
    p.add_argument("--time-limit", type=float, default=None, metavar="S")
    p.add_argument("--workers", type=int, default=1,
                   help="processes for independent cluster solves (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="inttsp", description="Integer-only subtour elimination TSP solver")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("solve", help="solve one instance")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--instance", metavar="PATH", help="TSPLIB95 file")
    src.add_argument("--random", type=_pair, metavar="N,SEED")
    src.add_argument("--mesh", type=int, metavar="COLS")
    p.add_argument("--variant", default="basic", help="basic|c:K|rc3:K|rc3n|hc[:U]|hcd[:U]")
    p.add_argument("--out", default=".", metavar="DIR")
    _add_run_options(p)

    p = sub.add_parser("generate", help="write a generated instance as TSPLIB")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--random", type=_pair, metavar="N,SEED")
    src.add_argument("--mesh", type=int, metavar="COLS")
    p.add_argument("--out", default="-", metavar="PATH")

    p = sub.add_parser("parse", help="read a TSPLIB file and print a summary")
    p.add_argument("path")
    p.add_argument("--explicit", action="store_true", help="print as EXPLICIT/LOWER_ROW")

    p = sub.add_parser("experiment", help="sweep variants over random Euclidean instances")
    p.add_argument("--n", type=_int_list, required=True, metavar="N1,N2,...")
    p.add_argument("--seeds", type=int, default=3, help="instances per n")
    p.add_argument("--base-seed", type=int, default=0)
    p.add_argument("--variants", default="basic", help="comma-separated, first is the baseline")
    p.add_argument("--out", default="runs.csv", metavar="PATH")
    _add_run_options(p)

    p = sub.add_parser("stats", help="iteration, length, subtour-curve and cluster statistics")
    p.add_argument("--n", type=_int_list, required=True, metavar="N1,N2,...")
    p.add_argument("--count", type=int, default=50, help="instances per n")
    p.add_argument("--base-seed", type=int, default=0)
    p.add_argument("--out", default="stats", metavar="DIR")
    _add_run_options(p)
    return parser


def instance_seed(base: int, n: int, index: int) -> int:
    """Seed of the ``index``-th sweep instance of size ``n``."""
    state = np.random.SeedSequence([base, n, index]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def instance_letter(index: int) -> str:
    """A, B, ..., Z, AA, AB, ... as in RE_A_150."""
    s = ""
    index += 1
    while index:
        index, r = divmod(index - 1, 26)
        s = chr(ord("A") + r) + s
    return s


def _config(args, variant: str) -> VariantConfig:
    try:
        limits = SolveLimits(time_limit_seconds=args.time_limit)
        return VariantConfig.parse(
            variant, sec_form=args.sec_form, harvest_incumbents=not args.no_incumbents,
            warm_start=args.warm_start, seed_triangles_p=args.seed_triangles,
            filter=args.filter, limits=limits, workers=args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _backend(args):
    try:
        return make_backend(args.backend)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _instance(args) -> Instance:
    if getattr(args, "instance", None):
        if not Path(args.instance).is_file():
            raise UsageError(f"instance file {args.instance!r} not found")
        return load_tsplib(args.instance)
    if args.random:
        n, seed = args.random
        return gen_random_euclidean(n, seed)
    if args.mesh is not None:
        return gen_mesh(args.mesh)
    raise UsageError("one of --instance, --random or --mesh is required")


def cmd_solve(args) -> int:
    config = _config(args, args.variant)
    backend = _backend(args)
    inst = _instance(args)
    report = solve(inst, backend, config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(json.dumps(report.to_json(), indent=2) + "\n")
    if report.tour is not None:
        (out / "tour.txt").write_text("".join(f"{v}\n" for v in report.tour.order))
    (out / "pool.txt").write_text(report.pool_dump)
    print(f"{inst.name} n={inst.n} variant={report.variant} status={report.status} "
          f"objective={report.objective} iterations={report.iterations} "
          f"constraints={report.constraints_final} seconds={report.seconds:.3f}")
    return EXIT_OK if report.complete else EXIT_LIMIT


def cmd_generate(args) -> int:
    inst = _instance(args)
    text = render_tsplib(inst)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
    return EXIT_OK


def cmd_parse(args) -> int:
    inst = load_tsplib(args.path)
    if args.explicit:
        sys.stdout.write(render_tsplib(inst))
    else:
        w = inst.weights
        print(f"name={inst.name} n={inst.n} edges={inst.m} min={w.min()} max={w.max()}")
    return EXIT_OK


def _run_row(report: RunReport, seed: int | str) -> dict:
    return {
        "instance": report.instance, "n": report.n, "variant": report.variant,
        "sec_form": report.sec_form, "seed": seed, "seconds": f"{report.seconds:.6f}",
        "iterations": report.iterations, "constraints_final": report.constraints_final,
        "objective": "" if report.objective is None else report.objective,
        "status": report.status,
    }


def run_sweep(args) -> tuple[list[dict], list[dict]]:
    variants = [v for v in args.variants.split(",") if v]
    if not variants:
        raise UsageError("--variants is empty")
    configs = [_config(args, v) for v in variants]
    backend = _backend(args)
    rows: list[dict] = []
    reports: dict[tuple[str, str], RunReport] = {}
    for n in args.n:
        for i in range(args.seeds):
            seed = instance_seed(args.base_seed, n, i)
            name = f"RE_{instance_letter(i)}_{n}"
            inst = gen_random_euclidean(n, seed, name)
            for v, config in zip(variants, configs):
                try:
                    report = solve(inst, backend, config)
                except (BackendError, ValueError, RuntimeError) as exc:
                    log.warning("%s %s failed: %s", name, v, exc)
                    rows.append({"instance": name, "n": n, "variant": config.label,
                                 "sec_form": config.sec_form.value, "seed": seed,
                                 "seconds": "", "iterations": "", "constraints_final": "",
                                 "objective": "", "status": "error"})
                    continue
                reports[(name, config.label)] = report
                rows.append(_run_row(report, seed))
    return rows, _summary(variants, configs, reports)


def _summary(variants, configs, reports) -> list[dict]:
    base = configs[0].label
    instances = sorted({k[0] for k in reports})
    out = []
    for config in configs:
        pairs = [(reports[(i, base)], reports[(i, config.label)]) for i in instances
                 if (i, base) in reports and (i, config.label) in reports
                 and reports[(i, base)].complete and reports[(i, config.label)].complete]
        if pairs:
            ratio = metrics.mean_ratio([max(a.seconds, 1e-9) for a, _ in pairs],
                                       [max(b.seconds, 1e-9) for _, b in pairs])
            out.append({"metric": "mean_ratio", "variant": config.label,
                        "baseline": base, "value": f"{ratio:.6f}", "instances": len(pairs)})
    basic = "basic" if "basic" in variants else None
    if basic:
        for config in configs:
            if config.variant not in ("hc", "hcd", "cluster", "restricted", "restricted_n"):
                continue
            used, cov = [], []
            for i in instances:
                a, b = reports.get((i, config.label)), reports.get((i, basic))
                if not (a and b and a.complete and b.complete):
                    continue
                if a.prephase_keys:
                    used.append(float(metrics.p_used(a.prephase_keys, b.model_keys)))
                if b.model_keys:
                    cov.append(float(metrics.p_cov(a.prephase_keys, b.model_keys)))
            for name, vals in (("p_used", used), ("p_cov", cov)):
                if vals:
                    out.append({"metric": name, "variant": config.label, "baseline": basic,
                                "value": f"{sum(vals) / len(vals):.6f}", "instances": len(vals)})
    return out


def _write_csv(path_or_buf, fields, rows) -> None:
    own = not hasattr(path_or_buf, "write")
    fh = open(path_or_buf, "w", newline="", encoding="utf-8") if own else path_or_buf
    try:
        w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\r\n")
        w.writeheader()
        w.writerows(rows)
    finally:
        if own:
            fh.close()


def cmd_experiment(args) -> int:
    rows, summary = run_sweep(args)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    _write_csv(out, RUN_FIELDS, rows)
    _write_csv(out.with_name(out.stem + "_summary.csv"),
               ("metric", "variant", "baseline", "value", "instances"), summary)
    failed = sum(r["status"] != "optimal" for r in rows)
    print(f"{len(rows)} runs written to {out} ({failed} not optimal)")
    return EXIT_OK if not failed else EXIT_LIMIT


def cmd_stats(args) -> int:
    config = _config(args, "basic")
    backend = _backend(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    reports: list[RunReport] = []
    cprime: dict[int, list[int]] = defaultdict(list)
    for n in args.n:
        for i in range(args.count):
            inst = gen_random_euclidean(n, instance_seed(args.base_seed, n, i))
            cprime[n].append(restricted_cluster(inst, n).c_actual)
            report = solve(inst, backend, config)
            if not report.complete:
                log.warning("%s did not finish (%s)", inst.name, report.status)
                continue
            reports.append(report)

    _write_csv(out / "iterations.csv", ("n", "runs", "mean_iterations", "mode_iterations"),
               [{"n": s.n, "runs": s.runs, "mean_iterations": f"{s.mean:.6f}",
                 "mode_iterations": s.mode} for s in metrics.iteration_stats(reports)])
    tsp = {r.n: r for r in metrics.sqrt_asymptotic(
        [(r.n, r.objective) for r in reports], scale=2**14)}
    m2 = {r.n: r for r in metrics.sqrt_asymptotic(
        [(r.n, r.first_objective) for r in reports], scale=2**14)}
    first = defaultdict(list)
    for r in reports:
        first[r.n].append(r.per_iteration[0].subtours)
    _write_csv(out / "lengths.csv",
               ("n", "samples", "tsp_ratio", "tsp_stderr", "m2_ratio", "m2_stderr",
                "mean_first_subtours"),
               [{"n": n, "samples": tsp[n].samples, "tsp_ratio": f"{tsp[n].mean:.6f}",
                 "tsp_stderr": f"{tsp[n].stderr:.6f}", "m2_ratio": f"{m2[n].mean:.6f}",
                 "m2_stderr": f"{m2[n].stderr:.6f}",
                 "mean_first_subtours": f"{sum(first[n]) / len(first[n]):.6f}"}
                for n in sorted(tsp)])
    by_n = defaultdict(list)
    for r in reports:
        by_n[r.n].append(r)
    curve_rows = []
    for n in sorted(by_n):
        for pt in metrics.subtour_curve(by_n[n]):
            curve_rows.append({"n": n, "iterations": pt.iterations, "runs": pt.runs,
                               "x": f"{pt.x:.6f}", "mean_subtours": f"{pt.mean_subtours:.6f}"})
    _write_csv(out / "subtour_curve.csv", ("n", "iterations", "runs", "x", "mean_subtours"),
               curve_rows)
    _write_csv(out / "cprime.csv", ("n", "instances", "mean_cprime", "min_cprime", "max_cprime"),
               [{"n": n, "instances": len(v), "mean_cprime": f"{sum(v) / len(v):.6f}",
                 "min_cprime": min(v), "max_cprime": max(v)} for n, v in sorted(cprime.items())])
    print(f"{len(reports)} runs summarised in {out}")
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "generate": cmd_generate, "parse": cmd_parse,
            "experiment": cmd_experiment, "stats": cmd_stats}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"inttsp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TsplibError, BackendError, OSError, ValueError) as exc:
        print(f"inttsp: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


def csv_text(rows, fields=RUN_FIELDS) -> str:
    buf = io.StringIO()
    _write_csv(buf, fields, rows)
    return buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
