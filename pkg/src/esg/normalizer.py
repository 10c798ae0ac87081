"""Turn usable test cases into execution scenarios.

Order of operations in :func:`normalize_pipeline`: truncate after the
target, merge all receivers into one, canonicalize literals, filter on the
element-count window, filter on value heterogeneity, drop syntactic
duplicates.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace

from .model import CONSTRUCT, MethodSig, SubjectApi, get_api, replay
from .model.lang import (
    NORMALIZED, Lit, Ref, Sequence, canonical_names, serialize, variable_kinds,
    with_minimal_casts,
)

DEFAULT_LO = 5
DEFAULT_HI = 8
DEFAULT_MIN_DISTINCT = 3


class NormalizationError(ValueError):
    pass


@dataclass(frozen=True)
class ExecutionScenario:
    seq: Sequence
    element_count: int
    values: tuple            # sorted multiset of receiver elements before the target call
    distinct_values: int

    @property
    def text(self) -> str:
        return serialize(self.seq)

    @property
    def canonical(self) -> str:
        return serialize(canonical_names(self.seq))


@dataclass(frozen=True)
class NormalizeConfig:
    lo: int = DEFAULT_LO
    hi: int = DEFAULT_HI
    min_distinct: int = DEFAULT_MIN_DISTINCT

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"window lo={self.lo} exceeds hi={self.hi}")
        if self.min_distinct < 1:
            raise ValueError("min_distinct must be >= 1")


@dataclass
class NormalizeResult:
    scenarios: list[ExecutionScenario]
    inputs: int = 0
    drops: dict = field(default_factory=dict)

    @property
    def nil(self) -> bool:
        return not self.scenarios


def truncate_after_target(seq: Sequence, target: MethodSig, api: SubjectApi | None = None) -> Sequence:
    """Cut ``seq`` right after its last target call that completes normally."""
    trace = replay(seq, api)
    last = None
    for step in trace.steps:
        if step.statement.method == target and not step.raised:
            last = step.index
    if last is None:
        raise NormalizationError(f"no non-raising call to {target.key}")
    return seq.with_statements(seq.statements[:last + 1])


def merge_receivers(seq: Sequence) -> Sequence:
    """Re-target every call onto the first constructed instance.

    Calls taking another subject instance as argument (``addAll(stack2)``)
    are dropped: that instance's own calls are already merged inline.
    """
    subjects = [st.receiver for st in seq if st.kind == CONSTRUCT]
    if len(subjects) <= 1:
        return seq.with_statements(seq.statements, NORMALIZED)
    keep = subjects[0]
    subject_set = set(subjects)
    out = []
    for st in seq:
        if st.kind == CONSTRUCT:
            if st.receiver == keep:
                out.append(st)
            continue
        if any(isinstance(a, Ref) and a.name in subject_set for a in st.args):
            continue
        out.append(st if st.receiver == keep else _retarget(st, keep))
    return seq.with_statements(out, NORMALIZED)


def _retarget(st, receiver):
    return replace(st, receiver=receiver)


def specialize_values(seq: Sequence, api: SubjectApi | None = None) -> Sequence:
    """Plain integer literals everywhere; keep only casts that select an overload.

    Arguments naming an earlier result (``push(obj0)``) or a subject instance
    (``addAll(stack0)``) become the literal value they held when the call
    ran. References the replay never reached are left alone; such a
    sequence fails the replay check later anyway.
    """
    api = api or get_api("stack")
    trace = replay(seq, api)
    env = variable_kinds(seq)
    out = []
    objects: dict = {}
    for i, st in enumerate(seq):
        if i < len(trace.steps):
            known = {**trace.values, **objects}
            st = replace(st, args=tuple(_inline(a, known) for a in st.args))
            objects = trace.steps[i].states
        out.append(with_minimal_casts(api, st, env))
    return seq.with_statements(out)


def _inline(arg, known):
    value = known.get(arg.name) if isinstance(arg, Ref) else None
    if isinstance(value, (int, tuple)) and not isinstance(value, bool):
        return Lit(tuple(value) if isinstance(value, tuple) else value)
    return arg


def _pre_target_state(seq: Sequence, target: MethodSig, api) -> tuple:
    if not len(seq) or seq[-1].method != target:
        raise NormalizationError("sequence does not end with the target call")
    trace = replay(seq, api)
    if len(trace.steps) < len(seq):
        raise NormalizationError(f"replay aborted at statement {len(trace.steps)}")
    return trace.steps[-1].receiver_before


def element_count(seq: Sequence, target: MethodSig, api: SubjectApi | None = None) -> int:
    return len(_pre_target_state(seq, target, api))


def make_scenario(seq: Sequence, target: MethodSig, api: SubjectApi | None = None) -> ExecutionScenario:
    """Wrap a single-instance sequence ending in a non-raising target call."""
    if sum(1 for st in seq if st.kind == CONSTRUCT) != 1:
        raise NormalizationError("scenario must construct exactly one instance")
    trace = replay(seq, api)
    if len(trace.steps) < len(seq) or trace.aborted:
        raise NormalizationError("scenario does not replay to completion")
    if seq[-1].method != target:
        raise NormalizationError("scenario does not end with the target call")
    before = trace.steps[-1].receiver_before
    return ExecutionScenario(seq, len(before), tuple(sorted(before)), len(set(before)))


def filter_window(scenarios, lo: int = DEFAULT_LO, hi: int = DEFAULT_HI) -> list[ExecutionScenario]:
    if lo > hi:
        raise ValueError(f"window lo={lo} exceeds hi={hi}")
    return [s for s in scenarios if lo <= s.element_count <= hi]


def heterogeneity_filter(scenarios, min_distinct: int = DEFAULT_MIN_DISTINCT) -> list[ExecutionScenario]:
    if min_distinct < 1:
        raise ValueError("min_distinct must be >= 1")
    return [s for s in scenarios if s.distinct_values >= min(min_distinct, s.element_count)]


def dedupe_syntactic(scenarios) -> list[ExecutionScenario]:
    seen = set()
    out = []
    for s in scenarios:
        key = s.canonical if isinstance(s, ExecutionScenario) else serialize(canonical_names(s))
        if key not in seen:
            seen.add(key)
            out.append(s)
    return out


def normalize_pipeline(test_cases, target: MethodSig, cfg: NormalizeConfig | None = None,
                       api: SubjectApi | None = None) -> NormalizeResult:
    cfg = cfg or NormalizeConfig()
    api = api or get_api("stack")
    drops = Counter()
    staged = []
    test_cases = list(test_cases)
    for tc in test_cases:
        try:
            seq = truncate_after_target(tc, target, api)
        except NormalizationError:
            drops["no_target"] += 1
            continue
        seq = specialize_values(merge_receivers(seq), api)
        try:
            staged.append(make_scenario(seq, target, api))
        except NormalizationError:
            drops["merge_failed"] += 1
    windowed = filter_window(staged, cfg.lo, cfg.hi)
    drops["window"] = len(staged) - len(windowed)
    varied = heterogeneity_filter(windowed, cfg.min_distinct)
    drops["heterogeneity"] = len(windowed) - len(varied)
    unique = dedupe_syntactic(varied)
    drops["duplicate"] = len(varied) - len(unique)
    for key in ("no_target", "merge_failed"):
        drops.setdefault(key, 0)
    return NormalizeResult(unique, len(test_cases), dict(sorted(drops.items())))
