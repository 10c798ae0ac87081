"""Counterexample-guided search for equivalent call sequences.

Synthesis draws candidate bodies at random (length 1 to 3, shorter ones
more often, never the same body twice) and keeps the first that matches
every scenario and has no proper subsequence that also matches. Validation
then hunts for a counterexample; if one turns up it joins the scenario set
and the iteration counter moves on, otherwise the candidate is recorded as
an equivalence and excluded from later rounds.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from ..model import MethodSig, SubjectApi, get_api
from ..seeding import derive_seed, rng_for
from .candidate import DEFAULT_ELEMENT_CONSTANTS, Call, Candidate, alphabet, target_only
from .check import (
    DEFAULT_COUNTER_BUDGET, Case, case_matches, find_counterexample, has_effect, scenario_case,
)

log = logging.getLogger(__name__)

LENGTH_WEIGHTS = (0.5, 0.3, 0.2)
DEFAULT_SYNTH_BUDGET = 1500
DEFAULT_CAP = 2


@dataclass(frozen=True)
class LoopConfig:
    cap: int = DEFAULT_CAP
    synth_budget: int = DEFAULT_SYNTH_BUDGET
    counter_budget: int = DEFAULT_COUNTER_BUDGET
    strict_returns: bool = False
    max_len: int = 3
    constants: tuple = DEFAULT_ELEMENT_CONSTANTS
    run_budget: int | None = None   # statements for the whole loop; None = unbounded

    def __post_init__(self):
        if self.cap < 1:
            raise ValueError("iteration cap must be >= 1")
        if self.synth_budget < 1 or self.counter_budget < 1:
            raise ValueError("budgets must be >= 1")
        if self.run_budget is not None and self.run_budget < 1:
            raise ValueError("run budget must be >= 1")
        if not 1 <= self.max_len <= len(LENGTH_WEIGHTS):
            raise ValueError(f"max_len must be in 1..{len(LENGTH_WEIGHTS)}")


def _as_case(s, target, api) -> Case:
    return s if isinstance(s, Case) else scenario_case(s, target, api)


class _Matcher:
    """Checks bodies against the scenario set, charging the budget."""

    def __init__(self, cases, target, api, strict, budget):
        self.cases = list(reversed(cases))   # newest first: counterexamples bite sooner
        self.target, self.api, self.strict = target, api, strict
        self.budget, self.spent = budget, 0

    @property
    def exhausted(self) -> bool:
        return self.spent >= self.budget

    def matches(self, cand: Candidate) -> bool:
        for case in self.cases:
            self.spent += case.cost + len(cand)
            if not case_matches(cand, self.target, case, self.api, self.strict):
                return False
        return True

    def minimal(self, cand: Candidate) -> bool:
        return not any(self.matches(sub) for sub in cand.subsequences())


_ALPHABETS: dict = {}


def _alphabet(api: SubjectApi, target: MethodSig, constants) -> list[Call]:
    key = (api.name, target, tuple(constants))
    if key not in _ALPHABETS:
        _ALPHABETS[key] = alphabet(api, target, constants)
    return _ALPHABETS[key]


def synthesize_candidate(scenarios, target: MethodSig, budget: int = DEFAULT_SYNTH_BUDGET,
                         seed: int = 0, api: SubjectApi | None = None, exclude=(),
                         strict: bool = False, max_len: int = 3,
                         constants=DEFAULT_ELEMENT_CONSTANTS, stats: dict | None = None) -> Candidate | None:
    """A minimal body matching every scenario, or None within ``budget``.

    ``budget`` counts executed statements: each check replays the
    scenario's prefix and then runs the body. When the target has no
    observable effect on any scenario, every no-op body would match, so
    nothing is synthesized. If given, ``stats["spent"]`` receives the
    statements used.
    """
    scenarios = list(scenarios)
    if not scenarios:
        raise ValueError("synthesis needs at least one scenario")
    api = api or get_api("stack")
    cases = [_as_case(s, target, api) for s in scenarios]
    if not any(has_effect(target, c, api) for c in cases):
        return None
    rng = rng_for(seed, "synthesize", target.qualified)
    pool = _alphabet(api, target, constants)
    singles = list(pool)
    rng.shuffle(singles)
    tried = {target_only(target).text} | {c.text if isinstance(c, Candidate) else str(c) for c in exclude}
    matcher = _Matcher(cases, target, api, strict, budget)
    try:
        return _search(matcher, rng, pool, singles, tried, max_len)
    finally:
        if stats is not None:
            stats["spent"] = matcher.spent


def _search(matcher: _Matcher, rng, pool, singles, tried, max_len):
    weights = LENGTH_WEIGHTS[:max_len]
    misses = 0
    while not matcher.exhausted and misses < 1000:
        length = rng.choices(range(1, max_len + 1), weights)[0]
        if length == 1 and not singles:
            if max_len == 1:
                return None
            length = rng.randint(2, max_len)
        if length == 1:
            cand = Candidate((singles.pop(),))
        else:
            cand = Candidate(tuple(rng.choice(pool) for _ in range(length)))
        if cand.text in tried:
            misses += 1
            continue
        misses = 0
        tried.add(cand.text)
        if matcher.matches(cand) and matcher.minimal(cand):
            return cand
    return None


@dataclass(frozen=True)
class Found:
    candidate: Candidate
    iteration: int

    @property
    def text(self) -> str:
        return self.candidate.text


@dataclass
class LoopResult:
    found: list[Found]
    iterations: int
    counterexamples: list = field(default_factory=list)
    spent: int = 0

    @property
    def texts(self) -> list[str]:
        return [f.text for f in self.found]


def synthesis_loop(initial, target: MethodSig, cfg: LoopConfig | None = None, seed: int = 0,
              api: SubjectApi | None = None) -> LoopResult:
    """Synthesize, validate, augment; repeat until the cap or the search dries up."""
    cfg = cfg or LoopConfig()
    api = api or get_api("stack")
    cases = [_as_case(s, target, api) for s in initial]
    if not cases:
        raise ValueError("the loop needs at least one initial scenario")
    result = LoopResult([], 1)

    def left(cap):
        if cfg.run_budget is None:
            return cap
        return min(cap, cfg.run_budget - result.spent)

    rounds = 0
    while left(1) > 0:
        rounds += 1
        stats: dict = {}
        cand = synthesize_candidate(cases, target, left(cfg.synth_budget), derive_seed(seed, "round", rounds),
                                    api, [f.candidate for f in result.found], cfg.strict_returns,
                                    cfg.max_len, cfg.constants, stats)
        result.spent += stats.get("spent", 0)
        if cand is None or left(1) <= 0:
            break
        stats = {}
        cex = find_counterexample(cand, target, left(cfg.counter_budget), derive_seed(seed, "check", rounds),
                                  api, strict=cfg.strict_returns, stats=stats)
        result.spent += stats.get("spent", 0)
        if cex is None:
            log.debug("iteration %d: accepted %s", result.iterations, cand.text)
            result.found.append(Found(cand, result.iterations))
            continue
        log.debug("iteration %d: %s refuted", result.iterations, cand.text)
        result.counterexamples.append(cex)
        if result.iterations >= cfg.cap:
            break
        result.iterations += 1
        cases.append(scenario_case(cex, target, api))
    return result
