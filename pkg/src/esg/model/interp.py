"""Replay of statement sequences against a subject API."""

from __future__ import annotations

from dataclasses import dataclass, field

from .api import SubjectApi, SubjectError
from .lang import CONSTRUCT, Lit, Ref, Sequence, Statement


@dataclass(frozen=True)
class ObjectState:
    elements: tuple = ()


def graph_size(state) -> int:
    """Object-graph node count: one root plus one node per element."""
    elements = state.elements if isinstance(state, ObjectState) else state
    return 1 + len(elements)


# Outcomes of a call: ("return", value) or ("raise", kind).
def returned(value) -> tuple:
    return ("return", value)


def raised(kind: str) -> tuple:
    return ("raise", kind)


@dataclass(frozen=True)
class Fingerprint:
    observable: tuple
    last: tuple | None = None


def fingerprint(state, last=None, api: SubjectApi | None = None) -> Fingerprint:
    """Observable view of ``state``: size() followed by get(i) for each
    index, read through the API's own observers."""
    api = api or _default_api()
    elements = state.elements if isinstance(state, ObjectState) else tuple(state)
    size_sig, get_sig = api.method("size()"), api.method("get(int)")
    _, n = api.apply(size_sig, elements, ())
    obs = [n]
    for i in range(n):
        obs.append(api.apply(get_sig, elements, (i,))[1])
    return Fingerprint(tuple(obs), last)


@dataclass
class Step:
    index: int
    statement: Statement
    outcome: tuple
    receiver_before: tuple | None
    states: dict

    @property
    def raised(self) -> str | None:
        return self.outcome[1] if self.outcome[0] == "raise" else None

    @property
    def result(self):
        return self.outcome[1] if self.outcome[0] == "return" else None


@dataclass
class ReplayTrace:
    steps: list = field(default_factory=list)
    objects: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)

    @property
    def exception(self) -> str | None:
        return self.steps[-1].raised if self.steps else None

    @property
    def aborted(self) -> bool:
        return self.exception is not None

    def state(self, var: str) -> ObjectState:
        return ObjectState(self.objects[var])

    @property
    def last(self) -> Step | None:
        return self.steps[-1] if self.steps else None


class Session:
    """Incremental interpreter: execute statements one at a time."""

    def __init__(self, api: SubjectApi | None = None):
        self.api = api or _default_api()
        self.objects: dict[str, tuple] = {}
        self.values: dict[str, object] = {}
        self.executed = 0

    def copy(self) -> "Session":
        other = Session(self.api)
        other.objects = dict(self.objects)
        other.values = dict(self.values)
        other.executed = self.executed
        return other

    def arg_value(self, arg):
        if isinstance(arg, Lit):
            return arg.value
        if arg.name in self.objects:
            return self.objects[arg.name]
        return self.values[arg.name]

    def execute(self, st: Statement) -> tuple[tuple, tuple | None]:
        """Run one statement; returns (outcome, receiver state before)."""
        self.executed += 1
        if st.kind == CONSTRUCT:
            self.objects[st.receiver] = ()
            return returned(None), None
        before = self.objects[st.receiver]
        args = [self.arg_value(a) for a in st.args]
        try:
            after, result = self.api.apply(st.method, before, args)
        except SubjectError as exc:
            return raised(exc.kind), before
        self.objects[st.receiver] = after
        if st.bind:
            self.values[st.bind] = result
        return returned(result), before


def replay(seq: Sequence, api: SubjectApi | None = None) -> ReplayTrace:
    """Execute ``seq``; stops after the first statement that raises."""
    session = Session(api)
    trace = ReplayTrace()
    for i, st in enumerate(seq):
        outcome, before = session.execute(st)
        trace.steps.append(Step(i, st, outcome, before, dict(session.objects)))
        if outcome[0] == "raise":
            break
    trace.objects = session.objects
    trace.values = session.values
    return trace


def _default_api() -> SubjectApi:
    from . import get_api
    return get_api("stack")
