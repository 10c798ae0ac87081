"""Command-line entry point: ``esg <subcommand> ...``.

Exit codes: 0 when scenarios were produced (or the command has no such
notion), 2 when a pipeline run ends with no scenario, 1 on any error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .classifier import DEFAULT_PROBES, MODES, build_allowed
from .equiv import LoopConfig
from .equiv.check import DEFAULT_COUNTER_BUDGET
from .equiv.loop import DEFAULT_CAP, DEFAULT_SYNTH_BUDGET
from .equiv.scoring import peak_size, sample_sets, score, sweep_graph_size
from .equiv.truth import GroundTruth, shipped_truth
from .generator import TARGET_NORMAL, categorize, category_counts, generate
from .model import parse_sequence, serialize
from .model.lang import ParseError, canonical_names
from .normalizer import NormalizeConfig, normalize_pipeline
from .pipeline import (
    ConfigError, RunConfig, dump_json, load_scenarios, lookup_target, repeat, resolve, run,
    write_json, write_scenarios,
)
from .seeding import default_seed

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NIL = 2

log = logging.getLogger("esg")


def _emit(data, path: str | None) -> None:
    if path:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        write_json(Path(path), data)
    else:
        sys.stdout.write(dump_json(data))


def _sizes(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            out = list(range(int(lo), int(hi) + 1))
        else:
            out = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}; use 0..11 or 1,2,5") from None
    if not out:
        raise argparse.ArgumentTypeError("empty size list")
    return out


def _run_config(args, **over) -> RunConfig:
    fields = dict(
        api=args.api, method=args.method, blacklist=args.blacklist, mode=args.mode,
        probes=args.probes, seed=args.seed,
    )
    for name in ("budget", "max_len", "target_bias", "lo", "hi", "min_distinct", "out"):
        if hasattr(args, name):
            fields[name] = getattr(args, name)
    fields.update(over)
    return RunConfig(**fields)


def _loop_config(args) -> LoopConfig:
    return LoopConfig(cap=args.cap, synth_budget=args.synth_budget,
                      counter_budget=args.counter_budget, strict_returns=args.strict_returns)


def _truth(args, target) -> GroundTruth:
    if args.truth:
        try:
            truth = GroundTruth.load(args.truth)
        except OSError as exc:
            raise ConfigError(f"cannot read ground truth {args.truth}: {exc.strerror}") from None
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"bad ground truth {args.truth}: {exc}") from None
    else:
        try:
            truth = shipped_truth(target)
        except FileNotFoundError as exc:
            raise ConfigError(f"{exc}; pass --truth FILE") from None
    if truth.target != target.qualified:
        raise ConfigError(f"ground truth is for {truth.target}, not {target.qualified}")
    return truth


# -- subcommands -------------------------------------------------------------------

def cmd_classify(args) -> int:
    cfg = _run_config(args)
    api, target, bl = resolve(cfg)
    allowed = build_allowed(api, target, bl, cfg.mode, cfg.probes, cfg.seed)
    _emit(allowed.to_json(), args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    cfg = _run_config(args, out=None)
    api, target, bl = resolve(cfg)
    allowed = build_allowed(api, target, bl, cfg.mode, cfg.probes, cfg.seed)
    tests = generate(api, allowed, cfg.gen_config())
    out = Path(args.out)
    (out / "tests").mkdir(parents=True, exist_ok=True)
    kept = [t for t in tests if categorize(t, target, api) == TARGET_NORMAL]
    files = []
    for i, seq in enumerate(kept):
        name = f"tests/test-{i:04d}.seq"
        (out / name).write_text(serialize(canonical_names(seq)), encoding="utf-8")
        files.append(name)
    write_json(out / "manifest.json", {
        "target": target.qualified, "seed": cfg.seed, "generated": len(tests),
        "categories": category_counts(tests, target, api), "files": files,
    })
    print(f"{len(kept)} usable test cases of {len(tests)} written to {out}", file=sys.stderr)
    return EXIT_OK


def cmd_normalize(args) -> int:
    api, target = lookup_target(args.api, args.method)
    tests = []
    for path in sorted(Path(args.input).rglob("*.seq")):
        try:
            tests.append(parse_sequence(path.read_text(encoding="utf-8"), api))
        except ParseError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    result = normalize_pipeline(tests, target, NormalizeConfig(args.lo, args.hi, args.min_distinct), api)
    out = Path(args.out)
    files = write_scenarios(out / "scenarios", result.scenarios)
    write_json(out / "manifest.json", {
        "target": target.qualified, "inputs": result.inputs, "drops": result.drops,
        "scenarios": [{"file": f"scenarios/{f}", "element_count": s.element_count,
                       "distinct_values": s.distinct_values}
                      for f, s in zip(files, result.scenarios)],
    })
    print(f"{len(files)} scenarios from {result.inputs} test cases", file=sys.stderr)
    return EXIT_NIL if result.nil else EXIT_OK


def cmd_run(args) -> int:
    cfg = _run_config(args)
    report, scenarios = run(cfg)
    if args.eval and scenarios:
        api, target, _ = resolve(cfg)
        truth = _truth(args, target)
        sets = sample_sets(scenarios, args.runs, args.per_run, cfg.seed)
        metrics, _ = score(target, sets, truth, args.runs, cfg.seed, _loop_config(args), api, args.workers)
        data = report.to_json()
        data["eval"] = metrics.to_json()
        write_json(Path(cfg.out) / "report.json", data)
    print(f"{report.scenarios} scenarios for {report.target} in {cfg.out}", file=sys.stderr)
    return EXIT_NIL if report.nil else EXIT_OK


def cmd_repeat(args) -> int:
    agg = repeat(_run_config(args), args.n)
    print(f"min {agg['min']} max {agg['max']} avg {agg['avg']:.2f}", file=sys.stderr)
    return EXIT_NIL if agg["min"] == 0 else EXIT_OK


def cmd_eval(args) -> int:
    api, target = lookup_target(args.api, args.method)
    truth = _truth(args, target)
    try:
        scenarios = load_scenarios(args.scenarios, target, api)
    except (ParseError, ValueError) as exc:
        raise ConfigError(f"bad scenario in {args.scenarios}: {exc}") from None
    if not scenarios:
        raise ConfigError(f"no scenarios in {args.scenarios}")
    sets = sample_sets(scenarios, args.runs, args.per_run, args.seed)
    metrics, outcomes = score(target, sets, truth, args.runs, args.seed, _loop_config(args), api, args.workers)
    data = {
        "target": target.qualified, "seed": args.seed, "scenarios": len(scenarios),
        "metrics": metrics.to_json(),
        "runs": [{"run": o.run, "found": list(o.found), "true_positive": list(o.true_positive),
                  "iterations": o.iterations} for o in outcomes],
    }
    _emit(data, args.report)
    return EXIT_OK


def cmd_sweep(args) -> int:
    api, target = lookup_target(args.api, args.method)
    truth = _truth(args, target)
    rows = sweep_graph_size(target, truth, args.sizes, args.runs, args.seed, _loop_config(args), api,
                            args.workers)
    data = {
        "target": target.qualified, "seed": args.seed, "runs": args.runs,
        "named": truth.named, "peak_size": peak_size(rows),
        "rows": [dict(size=s, **m.to_json()) for s, m in rows],
    }
    _emit(data, args.report)
    return EXIT_OK


# -- parser ------------------------------------------------------------------------

def _common(p, need_method=True):
    p.add_argument("--api", default="stack", help="subject model (default: stack)")
    p.add_argument("--method", required=need_method, help='target signature, e.g. "pop()"')
    p.add_argument("--seed", type=int, default=default_seed(), help="rng seed (default: $ESG_SEED or 0)")


def _classify_opts(p):
    p.add_argument("--blacklist", help="pattern file (default: the shipped list)")
    p.add_argument("--mode", choices=MODES, default="blacklist")
    p.add_argument("--probes", type=int, default=DEFAULT_PROBES, help="random states per purity probe")


def _window_opts(p):
    p.add_argument("--lo", "--min-elems", dest="lo", type=int, default=5, help="minimum element count")
    p.add_argument("--hi", "--max-elems", dest="hi", type=int, default=8, help="maximum element count")
    p.add_argument("--min-distinct", type=int, default=3, help="heterogeneity threshold (1 disables)")


def _gen_opts(p):
    p.add_argument("--budget", type=int, default=2000, help="sequences to attempt")
    p.add_argument("--max-len", type=int, default=12, help="statements per sequence")
    p.add_argument("--target-bias", type=float, default=0.5,
                   help="chance of ending an attempt with a target call")


def _loop_opts(p, need_truth=False):
    p.add_argument("--truth", required=need_truth, help="ground-truth JSON (default: shipped fixture)")
    p.add_argument("--runs", type=int, default=30)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="iteration cap per run")
    p.add_argument("--synth-budget", type=int, default=DEFAULT_SYNTH_BUDGET)
    p.add_argument("--counter-budget", type=int, default=DEFAULT_COUNTER_BUDGET)
    p.add_argument("--strict-returns", action="store_true", help="always compare return values")
    p.add_argument("--workers", type=int, default=1, help="parallel processes for runs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="esg", description="Generate execution scenarios for "
                                     "equivalent-sequence search and score them.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="list the methods allowed in generated tests")
    _common(p)
    _classify_opts(p)
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.add_argument("--json", action="store_true", help="accepted for compatibility; output is always JSON")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("gen", help="generate test cases and keep the usable ones")
    _common(p)
    _classify_opts(p)
    _gen_opts(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("normalize", help="turn test cases into execution scenarios")
    _common(p)
    _window_opts(p)
    p.add_argument("--in", dest="input", required=True, help="directory of .seq test cases")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("run", help="classify, generate and normalize in one go")
    _common(p)
    _classify_opts(p)
    _gen_opts(p)
    _window_opts(p)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--eval", action="store_true", help="also score the scenarios")
    p.add_argument("--per-run", type=int, default=5, help="scenarios drawn per eval run")
    _loop_opts(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("repeat", help="several runs with derived seeds")
    _common(p)
    _classify_opts(p)
    _gen_opts(p)
    _window_opts(p)
    p.add_argument("-n", type=int, default=5, help="number of runs")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_repeat)

    p = sub.add_parser("eval", help="score a scenario directory against ground truth")
    _common(p)
    p.add_argument("--scenarios", required=True, help="directory of .scn scenarios")
    p.add_argument("--per-run", type=int, default=5, help="scenarios drawn per run")
    p.add_argument("--report", help="write JSON here instead of stdout")
    _loop_opts(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="score one canonical scenario per receiver size")
    _common(p)
    p.add_argument("--sizes", type=_sizes, default=list(range(12)), help="e.g. 0..11 or 0,5,9")
    p.add_argument("--report", help="write JSON here instead of stdout")
    _loop_opts(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"esg: error: {exc}", file=sys.stderr)
    except KeyError as exc:
        print(f"esg: error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
    except ValueError as exc:
        print(f"esg: error: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"esg: error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
