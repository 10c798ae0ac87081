"""Decide which methods may appear in generated test cases.

Pure methods cannot grow the receiver and methods that shrink the object
graph can leave it under the useful element count, so both are dropped.
The target method is always kept.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

from .model import COLLECTION, ELEMENT, INDEX, INT, MethodSig, SubjectApi, SubjectError
from .model import fingerprint, graph_size
from .seeding import rng_for

log = logging.getLogger(__name__)

PURE = "pure"
IMPURE = "impure"
INCREASING = "increasing"
DECREASING = "decreasing"
NODE_MUTATING = "node-mutating"

BLACKLIST_MODE = "blacklist"
PROBE_MODE = "probe"
BOTH_MODE = "both"
MODES = (BLACKLIST_MODE, PROBE_MODE, BOTH_MODE)

DEFAULT_PROBES = 64
PROBE_POOL = (-1, 0, 1, 2, 10)
EDGE_STATES = ((), (1,), (3, 1, 4, 1, 5, 9, 2, 6))

DEFAULT_PATTERNS = ("remove", "clear", "retain", "pop", "setSize")


@dataclass(frozen=True)
class Blacklist:
    patterns: tuple[str, ...]

    def __post_init__(self):
        if not self.patterns:
            raise ValueError("blacklist has no patterns")
        lowered = [p.lower() for p in self.patterns]
        if len(set(lowered)) != len(lowered):
            raise ValueError("blacklist has duplicate patterns")

    @classmethod
    def parse(cls, text: str) -> "Blacklist":
        pats = []
        for line in text.splitlines():
            line = line.strip()
            if line and not line.startswith("#") and line not in pats:
                pats.append(line)
        return cls(tuple(pats))

    @classmethod
    def load(cls, path) -> "Blacklist":
        return cls.parse(Path(path).read_text(encoding="utf-8"))

    @classmethod
    def default(cls) -> "Blacklist":
        return cls(DEFAULT_PATTERNS)


@dataclass(frozen=True)
class Evidence:
    source: str                     # "probed" or "blacklist"
    samples: int = 0
    deltas: tuple[int, ...] = ()    # distinct graph-size deltas observed
    pattern: str | None = None


@dataclass(frozen=True)
class MethodClassification:
    method: MethodSig
    category: str
    evidence: Evidence


@dataclass
class AllowedMethods:
    target: MethodSig
    methods: list[MethodSig]
    removed_pure: list[MethodSig] = field(default_factory=list)
    removed_decreasing: list[MethodSig] = field(default_factory=list)
    classifications: dict[MethodSig, MethodClassification] = field(default_factory=dict)

    def __contains__(self, sig) -> bool:
        return sig in self.methods

    @property
    def decreasing(self) -> list[MethodSig]:
        """Every method classified as decreasing, including a retained target."""
        return [m for m, c in self.classifications.items() if c.category == DECREASING]

    @property
    def pure(self) -> list[MethodSig]:
        return [m for m, c in self.classifications.items() if c.category == PURE]

    def to_json(self) -> dict:
        def entry(c: MethodClassification) -> dict:
            ev = c.evidence
            d = {"method": c.method.qualified, "category": c.category, "evidence": ev.source}
            if ev.source == "probed":
                d["samples"] = ev.samples
                d["deltas"] = list(ev.deltas)
            if ev.pattern:
                d["pattern"] = ev.pattern
            return d

        return {
            "target": self.target.qualified,
            "allowed": [m.qualified for m in self.methods],
            "removed_pure": [m.qualified for m in self.removed_pure],
            "removed_decreasing": [m.qualified for m in self.removed_decreasing],
            "decreasing": [m.qualified for m in self.decreasing],
            "classifications": [entry(self.classifications[m]) for m in self.classifications],
        }


def extract_methods(api: SubjectApi) -> list[MethodSig]:
    return list(api.methods)


def matches_blacklist(method: MethodSig, bl: Blacklist) -> str | None:
    name = method.name.lower()
    for pat in bl.patterns:
        if pat.lower() in name:
            return pat
    return None


# -- probing ---------------------------------------------------------------------

def _random_state(rng) -> tuple:
    return tuple(rng.choice(PROBE_POOL) for _ in range(rng.randint(0, 8)))


def _random_args(rng, sig: MethodSig, state: tuple) -> list:
    n = len(state)
    args = []
    for kind in sig.params:
        if kind == ELEMENT:
            pool = state if state and rng.random() < 0.5 else PROBE_POOL
            args.append(rng.choice(pool))
        elif kind == INDEX:
            args.append(rng.randint(0, n) if rng.random() < 0.8 else rng.choice(PROBE_POOL))
        elif kind == INT:
            args.append(rng.randint(0, n + 2))
        elif kind == COLLECTION:
            source = list(state) + list(PROBE_POOL)
            args.append(tuple(rng.choice(source) for _ in range(rng.randint(0, 3))))
        else:  # pragma: no cover
            raise ValueError(kind)
    return args


@dataclass(frozen=True)
class ProbeReport:
    samples: int
    changed: bool
    deltas: tuple[int, ...]


def probe(api: SubjectApi, method: MethodSig, probes: int = DEFAULT_PROBES, seed: int = 0) -> ProbeReport:
    """Apply ``method`` to the edge states plus ``probes`` random states and
    record whether the observable state changed and how graph size moved."""
    if probes < 1:
        raise ValueError("probe budget must be >= 1")
    rng = rng_for(seed, "probe", api.name, method.qualified)
    states = list(EDGE_STATES) + [_random_state(rng) for _ in range(probes)]
    changed = False
    deltas = set()
    for state in states:
        args = _random_args(rng, method, state)
        try:
            after, _ = api.apply(method, state, args)
        except SubjectError:
            after = state
        if fingerprint(after, api=api) != fingerprint(state, api=api):
            changed = True
        deltas.add(graph_size(after) - graph_size(state))
    return ProbeReport(len(states), changed, tuple(sorted(deltas)))


def probe_purity(api: SubjectApi, method: MethodSig, probes: int = DEFAULT_PROBES, seed: int = 0) -> str:
    return IMPURE if probe(api, method, probes, seed).changed else PURE


def _impure_category(report: ProbeReport) -> str:
    if any(d < 0 for d in report.deltas):
        return DECREASING
    if any(d > 0 for d in report.deltas):
        return INCREASING
    return NODE_MUTATING


def classify_impure(api: SubjectApi, method: MethodSig, probes: int = DEFAULT_PROBES, seed: int = 0) -> str:
    return _impure_category(probe(api, method, probes, seed))


def classify(api: SubjectApi, method: MethodSig, probes: int = DEFAULT_PROBES, seed: int = 0) -> MethodClassification:
    report = probe(api, method, probes, seed)
    category = _impure_category(report) if report.changed else PURE
    return MethodClassification(method, category, Evidence("probed", report.samples, report.deltas))


def build_allowed(api: SubjectApi, target: MethodSig, bl: Blacklist | None = None,
                  mode: str = BLACKLIST_MODE, probes: int = DEFAULT_PROBES, seed: int = 0) -> AllowedMethods:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    methods = extract_methods(api)
    if target not in methods:
        raise KeyError(f"target {target} not found in {api.name}")
    if mode != PROBE_MODE and bl is None:
        raise ValueError(f"mode {mode!r} needs a blacklist")

    out = AllowedMethods(target, [])
    for sig in methods:
        probed = classify(api, sig, probes, seed)
        pattern = matches_blacklist(sig, bl) if bl is not None and mode != PROBE_MODE else None
        by_probe = probed.category == DECREASING and mode != BLACKLIST_MODE

        if probed.category == PURE:
            final = probed
        elif pattern is not None or by_probe:
            if pattern is not None and not by_probe:
                ev = Evidence("blacklist", pattern=pattern)
            else:
                ev = Evidence("probed", probed.evidence.samples, probed.evidence.deltas, pattern)
            final = MethodClassification(sig, DECREASING, ev)
        else:
            final = probed
        out.classifications[sig] = final

        if sig == target:
            out.methods.append(sig)
        elif final.category == PURE:
            out.removed_pure.append(sig)
        elif final.category == DECREASING:
            out.removed_decreasing.append(sig)
        else:
            out.methods.append(sig)
    log.debug("allowed for %s: %s", target, [m.key for m in out.methods])
    return out
