"""Feedback-directed random generation of test cases.

Each attempt grows one sequence statement by statement, executing as it
goes. Like Randoop, an attempt may start from a previously generated
sequence that ran without raising (a component), so long sequences build
up over the run. A statement that raises ends the sequence, which is kept
as-is (the generated test would expect the exception). With probability
``target_bias`` the last statement of an attempt is forced to be a call to
the target, so rarely drawn signatures still get exercised. That forced
call is not part of the stored component: for a target like ``clear()``
it would otherwise hand every later attempt an emptied receiver.
"""

from __future__ import annotations

from dataclasses import dataclass

from .classifier import AllowedMethods
from .model import (
    COLLECTION, CONSTRUCT, ELEMENT, INT, MethodSig, Session, SubjectApi, replay,
)
from .model.lang import SUBJECT, Lit, Ref, Sequence, Statement, with_minimal_casts
from .seeding import rng_for

NO_TARGET = "no-target"
TARGET_RAISES = "target-raises"
TARGET_NORMAL = "target-normal"
CATEGORIES = (NO_TARGET, TARGET_RAISES, TARGET_NORMAL)

DEFAULT_POOL = (-1, 0, 1, 10, 100, 7, 42)

_PREFIX = {ELEMENT: "obj", "boolean": "b", INT: "i", COLLECTION: "c"}


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    budget: int = 2000
    max_length: int = 12
    value_pool: tuple = DEFAULT_POOL
    max_receivers: int = 3
    target_bias: float = 0.5
    var_bias: float = 0.25
    reuse: float = 0.9

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.max_length < 2:
            raise ValueError("max_length must be >= 2")
        if not self.value_pool:
            raise ValueError("value_pool must be non-empty")
        if self.max_receivers < 1:
            raise ValueError("max_receivers must be >= 1")
        if not 0.0 <= self.target_bias <= 1.0:
            raise ValueError("target_bias must be in [0, 1]")
        if not 0.0 <= self.reuse <= 1.0:
            raise ValueError("reuse must be in [0, 1]")


class _Builder:
    """One attempt: statements, the live session and variable bookkeeping."""

    def __init__(self, api: SubjectApi, cfg: GenConfig, rng):
        self.api = api
        self.cfg = cfg
        self.rng = rng
        self.session = Session(api)
        self.statements: list[Statement] = []
        self.env: dict[str, str] = {}
        self.receivers: list[str] = []
        self.counters: dict[str, int] = {}
        self.raised = False

    def fresh(self, prefix: str) -> str:
        n = self.counters.get(prefix, 0)
        self.counters[prefix] = n + 1
        return f"{prefix}{n}"

    def extend_from(self, component: Sequence):
        for st in component:
            self._run(st)
            d = st.defines
            if st.kind == CONSTRUCT:
                self.env[d] = SUBJECT
                self.receivers.append(d)
            elif d:
                self.env[d] = st.method.returns
            if d:
                prefix = d.rstrip("0123456789")
                self.counters[prefix] = max(self.counters.get(prefix, 0), int(d[len(prefix):]) + 1)

    def construct(self):
        var = self.fresh("stack")
        self._run(Statement.construct(var, self.api.classes[0]))
        self.env[var] = SUBJECT
        self.receivers.append(var)

    def _vars(self, *kinds):
        return [v for v, k in self.env.items() if k in kinds]

    def pick_arg(self, kind: str):
        rng, cfg = self.rng, self.cfg
        if kind == COLLECTION:
            choices = self._vars(SUBJECT, COLLECTION)
            if choices and rng.random() < cfg.var_bias:
                return Ref(rng.choice(choices))
            return Lit(tuple(rng.choice(cfg.value_pool) for _ in range(rng.randint(0, 3))))
        usable = self._vars(ELEMENT, INT) if kind == ELEMENT else self._vars(INT)
        if usable and rng.random() < cfg.var_bias:
            return Ref(rng.choice(usable))
        return Lit(rng.choice(cfg.value_pool))

    def invoke(self, method: MethodSig):
        receiver = self.rng.choice(self.receivers)
        args = [self.pick_arg(k) for k in method.params]
        bind = self.fresh(_PREFIX[method.returns]) if method.returns in _PREFIX else None
        st = with_minimal_casts(self.api, Statement.invoke(receiver, method, args, bind), self.env)
        outcome = self._run(st)
        if outcome[0] == "raise":
            self.raised = True
        elif bind:
            self.env[bind] = method.returns

    def _run(self, st: Statement):
        outcome, _ = self.session.execute(st)
        self.statements.append(st)
        return outcome


def _attempt(api: SubjectApi, allowed: AllowedMethods, cfg: GenConfig, rng, components):
    """Return the attempted sequence and its reusable part (None if it raised
    before the forced target call)."""
    b = _Builder(api, cfg, rng)
    if components and rng.random() < cfg.reuse:
        b.extend_from(rng.choice(components))
    limit = cfg.max_length - 1  # room for a forced target call
    while len(b.statements) < limit and not b.raised:
        if not b.receivers:
            b.construct()
            continue
        actions = ["extend", "stop"]
        if len(b.receivers) < cfg.max_receivers:
            actions.append("construct")
        action = rng.choice(actions)
        if action == "stop":
            break
        if action == "construct":
            b.construct()
        else:
            b.invoke(rng.choice(allowed.methods))
    prefix = Sequence(tuple(b.statements)) if not b.raised else None
    if not b.raised and rng.random() < cfg.target_bias:
        b.invoke(allowed.target)
    return Sequence(tuple(b.statements)), prefix


def generate(api: SubjectApi, allowed: AllowedMethods, cfg: GenConfig) -> list[Sequence]:
    """Generate up to ``cfg.budget`` test cases over the allowed methods."""
    if not allowed.methods:
        raise ValueError("allowed method list is empty")
    rng = rng_for(cfg.seed, "generate", api.name, allowed.target.qualified)
    out = []
    components: list[Sequence] = []
    for _ in range(cfg.budget):
        seq, prefix = _attempt(api, allowed, cfg, rng, components)
        if len(seq):
            out.append(seq)
        if prefix is not None and len(prefix):
            components.append(prefix)
    return out


def categorize(seq: Sequence, target: MethodSig, api: SubjectApi | None = None) -> str:
    """Classify a test case by how its target calls behave.

    Only executed statements count; a sequence whose target calls all sit
    after an aborting statement is treated like one whose target raised.
    """
    if not any(st.method == target for st in seq):
        return NO_TARGET
    trace = replay(seq, api)
    calls = [step for step in trace.steps if step.statement.method == target]
    if not calls or calls[-1].raised:
        return TARGET_RAISES
    return TARGET_NORMAL


def keep_third_category(seqs, target: MethodSig, api: SubjectApi | None = None) -> list[Sequence]:
    return [s for s in seqs if categorize(s, target, api) == TARGET_NORMAL]


def category_counts(seqs, target: MethodSig, api: SubjectApi | None = None) -> dict[str, int]:
    counts = dict.fromkeys(CATEGORIES, 0)
    for s in seqs:
        counts[categorize(s, target, api)] += 1
    return counts
