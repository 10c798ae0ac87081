"""End-to-end runs: classify, generate, normalize, and persist.

A run directory holds ``allowed.json``, ``scenarios/*.scn``,
``manifest.json`` and ``report.json``. Reports are written with sorted keys
so two runs with the same configuration differ only in their timings.
"""

from __future__ import annotations

import json
import logging
import os
import time
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from pathlib import Path

from .classifier import BLACKLIST_MODE, DEFAULT_PROBES, MODES, Blacklist, build_allowed
from .generator import DEFAULT_POOL, GenConfig, category_counts, generate, keep_third_category
from .model import get_api, parse_sequence
from .model.lang import NORMALIZED
from .normalizer import (
    DEFAULT_HI, DEFAULT_LO, DEFAULT_MIN_DISTINCT, ExecutionScenario, NormalizeConfig,
    make_scenario, normalize_pipeline,
)
from .seeding import derive_seed

log = logging.getLogger(__name__)

SCENARIO_DIR = "scenarios"
SCENARIO_EXT = ".scn"
MANIFEST = "manifest.json"
REPORT = "report.json"
AGGREGATE = "aggregate.json"


class ConfigError(ValueError):
    """A run cannot start: unknown api, unknown target, unreadable blacklist..."""


def shipped_blacklist_text() -> str:
    return resources.files("esg.data").joinpath("blacklist.txt").read_text(encoding="utf-8")


def dump_json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def write_json(path: Path, data) -> None:
    path.write_text(dump_json(data), encoding="utf-8")


@dataclass(frozen=True)
class RunConfig:
    api: str = "stack"
    method: str = "pop()"
    blacklist: str | None = None        # path; None selects the shipped list
    mode: str = BLACKLIST_MODE
    probes: int = DEFAULT_PROBES
    seed: int = 0
    budget: int = 2000
    max_len: int = 12
    max_receivers: int = 3
    value_pool: tuple = DEFAULT_POOL
    target_bias: float = 0.5
    lo: int = DEFAULT_LO
    hi: int = DEFAULT_HI
    min_distinct: int = DEFAULT_MIN_DISTINCT
    out: str | None = None

    def __post_init__(self):
        if self.lo > self.hi:
            raise ConfigError(f"window lo={self.lo} exceeds hi={self.hi}")
        if self.mode not in MODES:
            raise ConfigError(f"unknown classification mode {self.mode!r}")

    def gen_config(self) -> GenConfig:
        return GenConfig(seed=self.seed, budget=self.budget, max_length=self.max_len,
                         value_pool=tuple(self.value_pool), max_receivers=self.max_receivers,
                         target_bias=self.target_bias)

    def normalize_config(self) -> NormalizeConfig:
        return NormalizeConfig(self.lo, self.hi, self.min_distinct)

    def to_json(self) -> dict:
        d = asdict(self)
        d["value_pool"] = list(self.value_pool)
        d.pop("out")
        return d


@dataclass
class RunReport:
    target: str
    seed: int
    config: dict
    timings_ms: dict
    categories: dict
    drops: dict
    allowed: list
    scenarios: int
    files: list = field(default_factory=list)

    @property
    def nil(self) -> bool:
        return self.scenarios == 0

    def to_json(self) -> dict:
        d = asdict(self)
        d["nil"] = self.nil
        return d


def lookup_target(api_name: str, method: str):
    try:
        api = get_api(api_name)
    except KeyError as exc:
        raise ConfigError(exc.args[0]) from None
    try:
        return api, api.method(method)
    except KeyError as exc:
        raise ConfigError(f"target not found: {exc.args[0]}") from None


def resolve(cfg: RunConfig):
    """Look up api, target and blacklist, turning failures into ConfigError."""
    api, target = lookup_target(cfg.api, cfg.method)
    bl = None
    if cfg.mode != "probe":
        if cfg.blacklist is None:
            bl = Blacklist.parse(shipped_blacklist_text())
        else:
            try:
                bl = Blacklist.load(cfg.blacklist)
            except OSError as exc:
                raise ConfigError(f"cannot read blacklist {cfg.blacklist}: {exc.strerror}") from None
            except ValueError as exc:
                raise ConfigError(f"bad blacklist {cfg.blacklist}: {exc}") from None
    return api, target, bl


def _ms(t0: float) -> float:
    return round((time.perf_counter() - t0) * 1000.0, 3)


def write_scenarios(directory: Path, scenarios) -> list[str]:
    directory.mkdir(parents=True, exist_ok=True)
    names = []
    for i, sc in enumerate(scenarios):
        name = f"scenario-{i:03d}{SCENARIO_EXT}"
        (directory / name).write_text(sc.canonical, encoding="utf-8")
        names.append(name)
    return names


def load_scenarios(directory, target, api) -> list[ExecutionScenario]:
    out = []
    paths = [p for p in Path(directory).iterdir() if p.suffix in (SCENARIO_EXT, ".seq")]
    for path in sorted(paths):
        seq = parse_sequence(path.read_text(encoding="utf-8"), api, NORMALIZED)
        out.append(make_scenario(seq, target, api))
    return out


def run(cfg: RunConfig) -> tuple[RunReport, list[ExecutionScenario]]:
    """Classify, generate and normalize; persist artifacts when ``cfg.out`` is set."""
    t_all = time.perf_counter()
    api, target, bl = resolve(cfg)
    out = Path(cfg.out) if cfg.out else None
    if out is not None:
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"cannot create output directory {out}: {exc.strerror}") from None
        if not os.access(out, os.W_OK):
            raise ConfigError(f"output directory {out} is not writable")

    t0 = time.perf_counter()
    allowed = build_allowed(api, target, bl, cfg.mode, cfg.probes, cfg.seed)
    t_classify = _ms(t0)

    t0 = time.perf_counter()
    tests = generate(api, allowed, cfg.gen_config())
    t_generate = _ms(t0)

    t0 = time.perf_counter()
    usable = keep_third_category(tests, target, api)
    result = normalize_pipeline(usable, target, cfg.normalize_config(), api)
    t_convert = _ms(t0)

    files = []
    if out is not None:
        files = [f"{SCENARIO_DIR}/{n}" for n in write_scenarios(out / SCENARIO_DIR, result.scenarios)]
        write_json(out / "allowed.json", allowed.to_json())
        write_json(out / MANIFEST, {
            "target": target.qualified,
            "seed": cfg.seed,
            "scenarios": [{"file": f, "element_count": s.element_count,
                           "distinct_values": s.distinct_values}
                          for f, s in zip(files, result.scenarios)],
        })

    report = RunReport(
        target=target.qualified,
        seed=cfg.seed,
        config=cfg.to_json(),
        timings_ms={"classify": t_classify, "generate": t_generate, "convert": t_convert,
                    "total": _ms(t_all)},
        categories=category_counts(tests, target, api),
        drops=result.drops,
        allowed=[m.qualified for m in allowed.methods],
        scenarios=len(result.scenarios),
        files=files,
    )
    if out is not None:
        write_json(out / REPORT, report.to_json())
    log.info("%s seed %d: %d scenarios", target.key, cfg.seed, report.scenarios)
    return report, result.scenarios


def repeat_seeds(seed: int, n: int) -> list[int]:
    return [derive_seed(seed, "repeat", i) % 2**31 for i in range(n)]


def repeat(cfg: RunConfig, n: int) -> dict:
    """``n`` runs with derived seeds, each in its own ``run-i`` directory."""
    if n < 1:
        raise ConfigError("repeat count must be >= 1")
    runs = []
    for i, seed in enumerate(repeat_seeds(cfg.seed, n)):
        sub = str(Path(cfg.out) / f"run-{i}") if cfg.out else None
        report, _ = run(replace(cfg, seed=seed, out=sub))
        runs.append(report)
    counts = [r.scenarios for r in runs]
    agg = {
        "target": runs[0].target,
        "base_seed": cfg.seed,
        "n": n,
        "runs": [{"run": i, "seed": r.seed, "scenarios": r.scenarios, "timings_ms": r.timings_ms}
                 for i, r in enumerate(runs)],
        "min": min(counts),
        "max": max(counts),
        "avg": sum(counts) / n,
    }
    if cfg.out:
        write_json(Path(cfg.out) / AGGREGATE, agg)
    return agg
