"""Effectiveness metrics over repeated loop runs, and the graph-size sweep."""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

from ..model import ELEMENT, INDEX, INT, MethodSig, SubjectApi, get_api
from ..model.lang import Lit, Sequence, Statement, with_minimal_casts, SUBJECT
from ..normalizer import make_scenario
from ..seeding import derive_seed, rng_for
from .candidate import parse_candidate
from .check import exhaustively_equivalent
from .loop import LoopConfig, synthesis_loop
from .truth import GroundTruth

# Distinct receiver contents for the sweep; the candidate constants 0 and 1
# only show up from size 3 on, so tiny receivers admit more spurious bodies.
SWEEP_VALUES = (5, 8, 0, 3, 1, 9, 2, 7, 4, 6, 10, 11)


@dataclass(frozen=True)
class RunOutcome:
    run: int
    seed: int
    found: tuple[str, ...]
    true_positive: tuple[bool, ...]
    iterations: int
    named_iteration: int | None
    spent: int

    @property
    def tp(self) -> int:
        return sum(self.true_positive)

    @property
    def fp(self) -> int:
        return len(self.found) - self.tp


@dataclass(frozen=True)
class EquivMetrics:
    runs: int
    total: int
    avg: float
    max_t: int
    max_r: int
    precision: float | None     # None when nothing was reported in any run
    recall: float
    iterations: int | None      # most common discovery iteration of the named equivalence
    named_rate: float           # share of runs that found the named equivalence
    iteration1_rate: float      # share of runs that found it at iteration 1
    tp: int
    fp: int

    def __post_init__(self):
        if self.precision is not None and not 0.0 <= self.precision <= 1.0:
            raise ValueError("precision out of range")
        if not 0.0 <= self.recall <= 1.0:
            raise ValueError("recall out of range")
        if not self.max_r <= self.max_t <= self.total:
            raise ValueError("expected max_r <= max_t <= total")

    def to_json(self) -> dict:
        return asdict(self)


def metrics_from_outcomes(outcomes, truth: GroundTruth) -> EquivMetrics:
    outcomes = list(outcomes)
    if not outcomes:
        raise ValueError("no runs to aggregate")
    n = len(outcomes)
    tp = sum(o.tp for o in outcomes)
    fp = sum(o.fp for o in outcomes)
    known_per_run = [{t for t in o.found if t in truth} for o in outcomes]
    union = set().union(*known_per_run)
    named_its = [o.named_iteration for o in outcomes if o.named_iteration is not None]
    mode = None
    if named_its:
        counts = Counter(named_its)
        mode = min(counts, key=lambda k: (-counts[k], k))
    return EquivMetrics(
        runs=n,
        total=truth.total,
        avg=sum(len(o.found) for o in outcomes) / n,
        max_t=len(union),
        max_r=max(len(k) for k in known_per_run),
        precision=tp / (tp + fp) if tp + fp else None,
        recall=len(union) / truth.total,
        iterations=mode,
        named_rate=len(named_its) / n,
        iteration1_rate=sum(1 for i in named_its if i == 1) / n,
        tp=tp,
        fp=fp,
    )


class _Judge:
    """TP check: listed in the ground truth, or survives the exhaustive check."""

    def __init__(self, target, truth, api):
        self.target, self.truth, self.api = target, truth, api
        self.cache: dict[str, bool] = {}

    def __call__(self, text: str) -> bool:
        if text in self.truth:
            return True
        if text not in self.cache:
            cand = parse_candidate(text, self.api, self.target)
            self.cache[text] = exhaustively_equivalent(cand, self.target, self.api)
        return self.cache[text]


def _one_run(job):
    api_name, target_key, scenarios, cfg, seed, run, truth = job
    api = get_api(api_name)
    target = api.method(target_key)
    res = synthesis_loop(scenarios, target, cfg, seed, api)
    judge = _Judge(target, truth, api)
    named = next((f.iteration for f in res.found if f.text == truth.named), None)
    return RunOutcome(run, seed, tuple(res.texts), tuple(judge(t) for t in res.texts),
                      res.iterations, named, res.spent)


def score(target: MethodSig, scenario_sets, truth: GroundTruth, runs: int = 30, seed: int = 0,
          cfg: LoopConfig | None = None, api: SubjectApi | None = None,
          workers: int = 1) -> tuple[EquivMetrics, list[RunOutcome]]:
    """Run the loop ``runs`` times; run r uses scenario set r mod len(sets)."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    sets = [list(s) for s in scenario_sets]
    if not sets or any(not s for s in sets):
        raise ValueError("every scenario set needs at least one scenario")
    api = api or get_api("stack")
    cfg = cfg or LoopConfig()
    jobs = [(api.name, target.key, sets[r % len(sets)], cfg, derive_seed(seed, "run", r), r, truth)
            for r in range(runs)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            outcomes = list(pool.map(_one_run, jobs))
    else:
        outcomes = [_one_run(j) for j in jobs]
    return metrics_from_outcomes(outcomes, truth), outcomes


def canonical_scenario(target: MethodSig, size: int, api: SubjectApi | None = None,
                       fill: str = "push(Object)"):
    """A receiver holding ``size`` distinct values, then one target call.

    Element arguments of the target take a value outside the receiver;
    index arguments point at the middle element.
    """
    api = api or get_api("stack")
    if not 0 <= size <= len(SWEEP_VALUES):
        raise ValueError(f"size must be in 0..{len(SWEEP_VALUES)}")
    values = SWEEP_VALUES[:size]
    filler = api.method(fill)
    recv, env = "stack0", {"stack0": SUBJECT}
    sts = [Statement.construct(recv, api.classes[0])]
    sts += [with_minimal_casts(api, Statement.invoke(recv, filler, [Lit(v)]), env) for v in values]
    args = []
    for i, kind in enumerate(target.params):
        if kind == ELEMENT:
            args.append(Lit(20 + i))
        elif kind in (INT, INDEX):
            args.append(Lit(size // 2))
        else:
            args.append(Lit((20 + i,)))
    sts.append(with_minimal_casts(api, Statement.invoke(recv, target, args), env))
    return make_scenario(Sequence(tuple(sts)), target, api)


def sweep_graph_size(target: MethodSig, truth: GroundTruth, sizes=range(12), runs: int = 30,
                     seed: int = 0, cfg: LoopConfig | None = None, api: SubjectApi | None = None,
                     workers: int = 1) -> list[tuple[int, EquivMetrics]]:
    api = api or get_api("stack")
    rows = []
    for size in sizes:
        sc = canonical_scenario(target, size, api)
        metrics, _ = score(target, [[sc]], truth, runs, derive_seed(seed, "size", size), cfg, api, workers)
        rows.append((size, metrics))
    return rows


def peak_size(rows) -> int:
    """Size with the highest average; ties go to the smallest such size."""
    best = max(m.avg for _, m in rows)
    return min(s for s, m in rows if m.avg == best)


def sample_sets(scenarios, runs: int, per_run: int = 5, seed: int = 0) -> list[list]:
    """One random draw of ``per_run`` scenarios for each run."""
    scenarios = list(scenarios)
    if not scenarios:
        raise ValueError("no scenarios to sample from")
    k = min(per_run, len(scenarios))
    return [rng_for(seed, "sample", r).sample(scenarios, k) for r in range(runs)]
