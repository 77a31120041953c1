"""Command line: vm (register machines), kx (program search), cls (classical
sources), qc (quantum chains).

Exit codes: 0 success, 1 usage or IO error, 2 when a report assertion fails.
Reports are deterministic for a fixed config and cache; `--out report.json`
writes the report and, for rate-producing commands, a PNG figure next to it.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import time
from typing import Optional

import numpy as np

from . import __version__
from .classical import brudno_experiment, ks_rate, source_from_spec, typical_set
from .complexity import (
    PLAIN,
    PREFIX,
    c_upper,
    count_below,
    default_cache_dir,
    dovetail,
    k_upper,
    kraft_total,
    landauer_cost,
    load_cache,
    save_cache,
    structural_antichain,
)
from .config import ExperimentConfig, write_report
from .langvm import Halted, godel_program, parse_program, program_from_number, run
from .quantum import (
    af_entropy_estimate,
    build_mu_hat,
    check_density,
    gacs_lower,
    gacs_upper,
    matrix_from_spec,
    quantum_brudno_experiment,
    typical_projection,
)

__all__ = ["dispatch", "main"]


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the harness contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _load_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _load_density(path: str) -> np.ndarray:
    return check_density(matrix_from_spec(_load_json(path)))


def _load_source(path: Optional[str]):
    if path is None:
        return source_from_spec({"kind": "bernoulli", "probabilities": ["1/2", "1/2"]})[0]
    return source_from_spec(_load_json(path))[0]


def _load_ensemble(path: str):
    spec = _load_json(path)
    unknown = sorted(set(spec) - {"dimension", "schedule", "extras"})
    if unknown:
        raise ValueError(f"unknown ensemble field {unknown[0]!r}")
    cache = None
    if spec.get("schedule"):
        rounds = [(int(r[0]), int(r[1])) for r in spec["schedule"]]
        cache = dovetail(PREFIX, rounds)
    extras = [
        (matrix_from_spec(entry), f"ensemble-file-extra-{i}")
        for i, entry in enumerate(spec.get("extras", []))
    ]
    return build_mu_hat(int(spec["dimension"]), cache, extra=extras)


def _cache_file(mode: str) -> str:
    return os.path.join(default_cache_dir(), f"{mode}.jsonl")


def _require_cache(mode: str):
    path = _cache_file(mode)
    if not os.path.exists(path):
        raise FileNotFoundError(2, "no enumeration cache; run `kxchain kx search` first", path)
    return load_cache(path)


def _finish(args, config: ExperimentConfig, records, assertions, csv_table=None, figure=None) -> int:
    if args.out:
        report = {
            "tool": {"name": "kxchain", "version": __version__},
            "records": records,
            "assertions": [{"name": name, "passed": bool(ok)} for name, ok in assertions],
        }
        path = write_report(report, config, args.out, csv_table)
        print(f"report: {path}")
        if figure is not None:
            from .plotting import rate_figure

            fig_path = os.path.splitext(path)[0] + ".png"
            rate_figure(fig_path, **figure)
            print(f"figure: {fig_path}")
    failed = False
    for name, ok in assertions:
        print(f"{'PASS' if ok else 'FAIL'} {name}")
        failed = failed or not ok
    return 2 if failed else 0


# ---------------------------------------------------------------------------
# vm family


def _parse_inputs(text: str) -> tuple[int, ...]:
    if not text:
        return ()
    values = tuple(int(part) for part in text.split(","))
    if any(v < 0 for v in values):
        raise ValueError("register inputs must be non-negative")
    return values


def _read_program(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_program(fh.read())


def _cmd_vm_run(args) -> int:
    program = _read_program(args.file)
    outcome = run(program, _parse_inputs(args.inputs), budget=args.budget)
    if isinstance(outcome, Halted):
        print(outcome.output)
    else:
        print(f"no halt within {outcome.steps} steps")
    return 0


def _cmd_vm_number(args) -> int:
    print(godel_program(_read_program(args.file)))
    return 0


def _cmd_vm_decode(args) -> int:
    number = int(args.nat)
    if number < 0:
        raise ValueError("program numbers are non-negative")
    print(program_from_number(number))
    return 0


# ---------------------------------------------------------------------------
# kx family


def _mode_of(args) -> str:
    return PREFIX if args.mode == "prefix" else PLAIN


def _count_records(cache) -> list[dict]:
    return [
        {"c": c, "count": count_below(cache, c), "cap": 1 << c}
        for c in range(1, 17)
    ]


def _cmd_kx_search(args) -> int:
    mode = _mode_of(args)
    path = _cache_file(args.mode)
    cache = load_cache(path) if os.path.exists(path) else None
    cache = dovetail(mode, [(args.max_len, args.max_steps)], cache=cache, jobs=args.jobs)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    save_cache(cache, path)
    print(f"cache: {path}")
    total = kraft_total(cache)
    counts = _count_records(cache)
    records = {
        "mode": args.mode,
        "halting_programs": len(cache.records),
        "distinct_outputs": len(cache.min_length_by_output()),
        "kraft_sum": total,
        "kraft_sum_float": float(total),
        "content_hash": cache.content_hash(),
        "counts_below": counts,
    }
    assertions = [("counting-bound", all(r["count"] < r["cap"] for r in counts))]
    if mode == PREFIX:
        assertions.append(("kraft-sum-at-most-one", total <= 1))
        assertions.append(("prefix-free-antichain", structural_antichain(cache)))
    config = ExperimentConfig(
        kind="kx-search",
        mode=args.mode,
        max_len=args.max_len,
        max_steps=args.max_steps,
        jobs=args.jobs,
        seed=args.seed,
        out=args.out,
        format=args.format,
    )
    table = (
        ("c", "count", "cap"),
        [(r["c"], r["count"], r["cap"]) for r in counts],
    )
    return _finish(args, config, records, assertions, csv_table=table)


def _cmd_kx_estimate(args) -> int:
    if set(args.target) - {"0", "1"}:
        raise ValueError("target must be a bit string")
    cache = _require_cache(args.mode)
    est = k_upper(cache, args.target) if cache.mode == PREFIX else c_upper(cache, args.target)
    if est.value is None:
        print(f"no witness for {args.target!r} within budget {est.budget}")
    else:
        print(f"{est.value} bits via {est.witness!r} (budget {est.budget})")
    return 0


def _cmd_kx_kraft(args) -> int:
    cache = _require_cache(args.mode)
    total = kraft_total(cache)
    print(f"kraft sum = {total} = {float(total):.17g}")
    records = {
        "mode": args.mode,
        "kraft_sum": total,
        "kraft_sum_float": float(total),
        "halting_programs": len(cache.records),
    }
    assertions = []
    if cache.mode == PREFIX:
        assertions = [
            ("kraft-sum-at-most-one", total <= 1),
            ("prefix-free-antichain", structural_antichain(cache)),
        ]
    config = ExperimentConfig(
        kind="kx-kraft", mode=args.mode, seed=args.seed, out=args.out, format=args.format
    )
    return _finish(args, config, records, assertions)


def _cmd_kx_landauer(args) -> int:
    if args.bits < 0 or args.temp <= 0:
        raise ValueError("need bits >= 0 and temperature > 0")
    print(f"{landauer_cost(args.bits, args.temp):.17g} J")
    return 0


# ---------------------------------------------------------------------------
# cls family


def _cmd_cls_entropy(args) -> int:
    source = _load_source(args.source)
    report = ks_rate(source, args.n)
    records = {
        "source_kind": source.kind,
        "n_max": report.n_max,
        "ratios": list(report.ratios),
        "differences": list(report.differences),
        "min_ratio": report.min_ratio,
        "estimate": report.estimate,
    }
    ns = list(range(1, report.n_max + 1))
    config = ExperimentConfig(
        kind="cls-entropy", source=args.source, n=args.n,
        seed=args.seed, out=args.out, format=args.format,
    )
    table = (
        ("n", "ratio", "difference"),
        list(zip(ns, report.ratios, report.differences)),
    )
    figure = {
        "series": {
            "H_n / n": (ns, list(report.ratios)),
            "H_n - H_(n-1)": (ns, list(report.differences)),
        },
        "reference": report.estimate,
        "reference_label": "last difference",
        "title": f"block entropy rate ({source.kind})",
    }
    return _finish(args, config, records, [], csv_table=table, figure=figure)


def _cmd_cls_typical(args) -> int:
    source = _load_source(args.source)
    report = typical_set(source, args.n, args.eps)
    records = {
        "source_kind": source.kind,
        "n": report.n,
        "eps": report.eps,
        "entropy_rate": report.entropy_rate,
        "count": report.count,
        "measure": report.measure,
        "measure_float": float(report.measure),
        "log2_count": report.log2_count,
        "log2_cardinality_cap": report.log2_cardinality_cap,
    }
    assertions = [("cardinality-cap", report.cardinality_bound_ok)]
    config = ExperimentConfig(
        kind="cls-typical", source=args.source, n=args.n, eps=args.eps,
        seed=args.seed, out=args.out, format=args.format,
    )
    table = (
        ("n", "eps", "count", "measure", "log2_count", "log2_cap"),
        [(report.n, report.eps, report.count, float(report.measure),
          report.log2_count, report.log2_cardinality_cap)],
    )
    return _finish(args, config, records, assertions, csv_table=table)


def _cmd_cls_brudno(args) -> int:
    source = _load_source(args.source)
    cache = _require_cache("plain") if args.backend == "search-cache" else None
    report = brudno_experiment(
        source, args.n, args.trials, backend=args.backend, seed=args.seed, cache=cache
    )
    records = {
        "source_kind": report.source_kind,
        "n": report.n,
        "trials": report.trials,
        "backend": report.backend,
        "entropy_rate": report.entropy_rate,
        "mean_rate": report.mean_rate,
        "stdev_rate": report.stdev_rate,
        "found": report.found,
        "rows": [dataclasses.asdict(row) for row in report.rows],
    }
    close = (
        report.mean_rate is not None
        and abs(report.mean_rate - report.entropy_rate) <= args.tol
    )
    assertions = [("mean-rate-within-tol", close)]
    config = ExperimentConfig(
        kind="cls-brudno", source=args.source, n=args.n, trials=args.trials,
        backend=args.backend, tol=args.tol, seed=args.seed,
        out=args.out, format=args.format,
    )
    table = (
        ("n", "trial", "rate", "h", "backend"),
        report.csv_rows(),
    )
    trials = [row.trial for row in report.rows]
    figure = {
        "series": {"per-trial rate": (trials, [row.rate for row in report.rows])},
        "reference": report.entropy_rate,
        "reference_label": "entropy rate",
        "xlabel": "trial",
        "title": f"description rate, n={report.n} ({report.backend})",
    }
    return _finish(args, config, records, assertions, csv_table=table, figure=figure)


# ---------------------------------------------------------------------------
# qc family


def _cmd_qc_af(args) -> int:
    site = _load_density(args.site)
    report = af_entropy_estimate(site, n_max=args.nmax)
    gaps = [
        abs(value - (n * report.site_entropy + n))
        for n, value in zip(range(1, report.n_max + 1), report.entropies)
    ]
    records = {
        "n_max": report.n_max,
        "opu_size": report.opu_size,
        "site_entropy": report.site_entropy,
        "gram_entropy": report.gram_entropy,
        "entropies": list(report.entropies),
        "rates": list(report.rates),
        "methods": list(report.methods),
        "identity_gaps": gaps,
    }
    assertions = [("af-identity-within-1e-7", max(gaps) <= 1e-7)]
    config = ExperimentConfig(
        kind="qc-af", site=args.site, opu=args.opu, n_max=args.nmax,
        seed=args.seed, out=args.out, format=args.format,
    )
    ns = list(range(1, report.n_max + 1))
    table = (
        ("n", "entropy", "rate", "method"),
        list(zip(ns, report.entropies, report.rates, report.methods)),
    )
    figure = {
        "series": {"S(rho[Z^(n)]) / n": (ns, list(report.rates))},
        "reference": report.site_entropy + 1,
        "reference_label": "site entropy + 1",
        "title": "refinement entropy rate",
    }
    return _finish(args, config, records, assertions, csv_table=table, figure=figure)


def _cmd_qc_typical(args) -> int:
    site = _load_density(args.site)
    report = typical_projection(site, args.n, args.eps)
    records = {
        "n": report.n,
        "eps": report.eps,
        "site_spectrum": list(report.site_spectrum),
        "entropy_rate": report.entropy_rate,
        "rank": report.rank,
        "trace_p": report.trace_p,
        "omega": report.omega,
        "items": dict(report.items),
        "margins": dict(report.margins),
        "selected_eigenvalues": list(report.selected_eigenvalues),
    }
    assertions = [
        ("trace-matches-rank", report.trace_p == report.rank),
        ("omega-at-most-one", report.omega <= 1 + 1e-12),
    ]
    config = ExperimentConfig(
        kind="qc-typical", site=args.site, n=args.n, eps=args.eps,
        seed=args.seed, out=args.out, format=args.format,
    )
    table = (
        ("n", "eps", "rank", "omega", "item1", "item2", "item3"),
        [(report.n, report.eps, report.rank, report.omega,
          report.items["item1"], report.items["item2"], report.items["item3"])],
    )
    return _finish(args, config, records, assertions, csv_table=table)


def _cmd_qc_gacs(args) -> int:
    rho = _load_density(args.rho)
    ensemble = _load_ensemble(args.ensemble)
    lower = gacs_lower(rho, ensemble)
    upper = gacs_upper(rho, ensemble)
    print(f"lower = {lower:.17g} bits, upper = {upper:.17g} bits")
    records = {
        "dimension": ensemble.dimension,
        "components": len(ensemble.components),
        "total_trace": ensemble.total_trace(),
        "gacs_lower": lower,
        "gacs_upper": upper,
    }
    assertions = [("lower-at-most-upper", lower <= upper + 1e-9)]
    config = ExperimentConfig(
        kind="qc-gacs", rho=args.rho, ensemble=args.ensemble,
        seed=args.seed, out=args.out, format=args.format,
    )
    return _finish(args, config, records, assertions)


def _cmd_qc_brudno(args) -> int:
    site = _load_density(args.site)
    lo, hi = args.nrange
    cache = dovetail(PREFIX, [(args.max_len, args.max_steps)])
    report = quantum_brudno_experiment(
        site, range(lo, hi + 1), args.eps,
        cache=cache, samples=args.samples, seed=args.seed,
    )
    levels = []
    for level in report.levels:
        levels.append(
            {
                "n": level.n,
                "rank": level.rank,
                "omega": level.omega,
                "alpha_n": level.alpha_n,
                "b_complement_count": level.b_complement_count,
                "items": dict(level.items),
                "rate": level.rate,
                "samples": [dataclasses.asdict(s) for s in level.samples],
            }
        )
    records = {
        "site_spectrum": list(report.site_spectrum),
        "entropy_rate": report.entropy_rate,
        "eps": report.eps,
        "n_epsilon": report.n_epsilon,
        "ensemble_sizes": list(report.ensemble_sizes),
        "levels": levels,
    }
    finite = all(
        s.rate == s.rate and not math.isinf(s.rate)
        for level in report.levels
        for s in level.samples
    )
    onward = [lv for lv in report.levels if report.n_epsilon is not None and lv.n >= report.n_epsilon]
    items_hold = all(
        lv.items["item1"] and lv.items["item2"] and lv.items["item3"] for lv in onward
    )
    assertions = [
        ("sample-rates-finite", finite),
        ("items-hold-from-n-epsilon", items_hold),
    ]
    config = ExperimentConfig(
        kind="qc-brudno", site=args.site, n_range=(lo, hi), eps=args.eps,
        samples=args.samples, max_len=args.max_len, max_steps=args.max_steps,
        seed=args.seed, out=args.out, format=args.format,
    )
    ns = [level.n for level in report.levels]
    table = (
        ("n", "rank", "omega", "rate"),
        [(level.n, level.rank, level.omega, level.rate) for level in report.levels],
    )
    figure = {
        "series": {"-log2 Tr(M p) / n": (ns, [level.rate for level in report.levels])},
        "reference": report.entropy_rate,
        "reference_label": "entropy rate s",
        "title": f"chain rate, eps={report.eps}",
    }
    return _finish(args, config, records, assertions, csv_table=table, figure=figure)


# ---------------------------------------------------------------------------
# wiring


def build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="experiment seed (default 0)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--out", help="write the report to this path")

    parser = _Parser(prog="kxchain", description="register machines, program search, and chain-rate experiments")
    parser.add_argument("--version", action="version", version=f"kxchain {__version__}")
    families = parser.add_subparsers(dest="family", metavar="{vm,kx,cls,qc}")

    vm = families.add_parser("vm", help="register machine programs")
    vm_sub = vm.add_subparsers(dest="command")
    p = vm_sub.add_parser("run", parents=[common], help="execute a program file")
    p.add_argument("file")
    p.add_argument("--inputs", default="", help="comma-separated register inputs")
    p.add_argument("--budget", type=int, default=10**6, help="step budget")
    p.set_defaults(handler=_cmd_vm_run)
    p = vm_sub.add_parser("number", parents=[common], help="print a program's number")
    p.add_argument("file")
    p.set_defaults(handler=_cmd_vm_number)
    p = vm_sub.add_parser("decode", parents=[common], help="print the program with this number")
    p.add_argument("nat")
    p.set_defaults(handler=_cmd_vm_decode)

    kx = families.add_parser("kx", help="program-length complexity estimation")
    kx_sub = kx.add_subparsers(dest="command")
    p = kx_sub.add_parser("search", parents=[common], help="extend the enumeration cache")
    p.add_argument("--mode", choices=["plain", "prefix"], default="prefix")
    p.add_argument("--max-len", type=int, required=True)
    p.add_argument("--max-steps", type=int, required=True)
    p.set_defaults(handler=_cmd_kx_search)
    p = kx_sub.add_parser("estimate", parents=[common], help="upper-bound one target string")
    p.add_argument("--mode", choices=["plain", "prefix"], default="prefix")
    p.add_argument("--target", required=True, help="bit string")
    p.set_defaults(handler=_cmd_kx_estimate)
    p = kx_sub.add_parser("kraft", parents=[common], help="mass of the recorded programs")
    p.add_argument("--mode", choices=["plain", "prefix"], default="prefix")
    p.set_defaults(handler=_cmd_kx_kraft)
    p = kx_sub.add_parser("landauer", parents=[common], help="erasure cost in joules")
    p.add_argument("--bits", type=float, required=True)
    p.add_argument("--temp", type=float, required=True, help="kelvin")
    p.set_defaults(handler=_cmd_kx_landauer)

    cls = families.add_parser("cls", help="classical sources and rates")
    cls_sub = cls.add_subparsers(dest="command")
    p = cls_sub.add_parser("entropy", parents=[common], help="block-entropy rate table")
    p.add_argument("--source", help="source spec file (default: fair coin)")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(handler=_cmd_cls_entropy)
    p = cls_sub.add_parser("typical", parents=[common], help="entropy-typical words")
    p.add_argument("--source", help="source spec file (default: fair coin)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.set_defaults(handler=_cmd_cls_typical)
    p = cls_sub.add_parser("brudno", parents=[common], help="description rate vs entropy rate")
    p.add_argument("--source", help="source spec file (default: fair coin)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--backend", choices=["compressor", "search-cache"], default="compressor")
    p.add_argument("--tol", type=float, default=0.05)
    p.set_defaults(handler=_cmd_cls_brudno)

    qc = families.add_parser("qc", help="quantum chain experiments")
    qc_sub = qc.add_subparsers(dest="command")
    p = qc_sub.add_parser("af", parents=[common], help="refinement entropy rates")
    p.add_argument("--site", required=True, help="density-matrix spec file")
    p.add_argument("--opu", choices=["matrix-units"], default="matrix-units")
    p.add_argument("--nmax", type=int, default=8)
    p.set_defaults(handler=_cmd_qc_af)
    p = qc_sub.add_parser("typical", parents=[common], help="typical projection report")
    p.add_argument("--site", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.set_defaults(handler=_cmd_qc_typical)
    p = qc_sub.add_parser("gacs", parents=[common], help="lower/upper state complexity")
    p.add_argument("--rho", required=True, help="state spec file")
    p.add_argument("--ensemble", required=True, help="ensemble spec file")
    p.set_defaults(handler=_cmd_qc_gacs)
    p = qc_sub.add_parser("brudno", parents=[common], help="chain-rate sweep")
    p.add_argument("--site", required=True)
    p.add_argument("--nrange", type=_parse_range, required=True, help="lo:hi inclusive")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--samples", type=int, default=2)
    p.add_argument("--max-len", type=int, default=16, help="cache schedule length bound")
    p.add_argument("--max-steps", type=int, default=200, help="cache schedule step bound")
    p.set_defaults(handler=_cmd_qc_brudno)
    return parser


def _parse_range(text: str) -> tuple[int, int]:
    from .config import parse_n_range

    try:
        return parse_n_range(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if isinstance(exc.code, int):
            return exc.code
        return 0 if exc.code is None else 1
    handler = getattr(args, "handler", None)
    if handler is None:
        parser.print_usage(sys.stderr)
        return 1
    started = time.monotonic()
    try:
        code = handler(args)
    except FileNotFoundError as exc:
        message = f"error: no such file: {exc.filename}"
        if exc.strerror and exc.strerror != os.strerror(exc.errno or 2):
            message += f" ({exc.strerror})"
        print(message, file=sys.stderr)
        return 1
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wall time: {time.monotonic() - started:.3f}s", file=sys.stderr)
    return code


def main() -> int:
    return dispatch(sys.argv[1:])
