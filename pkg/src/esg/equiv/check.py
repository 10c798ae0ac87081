"""Comparing a candidate body with the target call.

Each scenario is reduced to a :class:`Case`: the receiver state just before
the target call, the target's argument values and the number of statements
a replay of the prefix costs. Matching compares the observable state after
the target with the state after the candidate, plus the outcome: exception
kinds must agree. Return values are compared when both sides return
something of the same kind, and also whenever the target returns a value
but leaves the receiver unchanged, since the result is then all there is
to observe. ``--strict-returns`` compares them everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from ..model import (
    COLLECTION, ELEMENT, INDEX, INT, NONE, MethodSig, Session, SubjectApi,
    SubjectError, fingerprint, get_api,
)
from ..model.lang import COUNTEREXAMPLE, SUBJECT, Lit, Sequence, Statement, with_minimal_casts
from ..normalizer import ExecutionScenario, make_scenario
from ..seeding import rng_for
from .candidate import Candidate

EXHAUSTIVE_POOL = (0, 1, 2)
EXHAUSTIVE_MAX = 5
COUNTER_POOL = (0, 1, 2, 7, 42)
COUNTER_MAX = 8
DEFAULT_COUNTER_BUDGET = 3000


@dataclass(frozen=True)
class Case:
    state: tuple
    params: tuple
    cost: int = 0     # statements replayed to reach the target call


def scenario_case(scenario, target: MethodSig, api: SubjectApi | None = None) -> Case:
    seq = scenario.seq if isinstance(scenario, ExecutionScenario) else scenario
    if not len(seq) or seq[-1].method != target:
        raise ValueError("scenario does not end with the target call")
    session = Session(api)
    for st in seq.statements[:-1]:
        outcome, _ = session.execute(st)
        if outcome[0] == "raise":
            raise ValueError(f"scenario prefix raises {outcome[1]}")
    last = seq[-1]
    params = tuple(session.arg_value(a) for a in last.args)
    return Case(session.objects[last.receiver], params, len(seq) - 1)


def _target_run(api: SubjectApi, target: MethodSig, case: Case):
    try:
        after, value = api.apply(target, case.state, case.params)
    except SubjectError as exc:
        return case.state, ("raise", exc.kind)
    return after, ("return", value)


def outcomes_agree(t_out, t_kind, c_out, c_kind, strict: bool = False) -> bool:
    if t_out[0] == "raise" or c_out[0] == "raise":
        return t_out == c_out
    if strict:
        return t_kind == c_kind and t_out == c_out
    if t_kind == NONE or c_kind == NONE or t_kind != c_kind:
        return True
    return t_out == c_out


def case_matches(cand: Candidate, target: MethodSig, case: Case, api: SubjectApi,
                 strict: bool = False) -> bool:
    t_after, t_out = _target_run(api, target, case)
    c_after, c_out, c_kind = cand.run(api, case.state, case.params)
    if fingerprint(t_after, api=api) != fingerprint(c_after, api=api):
        return False
    # A call that leaves the receiver alone is observed only through its
    # result, so that result is never waived.
    only_result = t_after == case.state and target.returns != NONE
    return outcomes_agree(t_out, target.returns, c_out, c_kind, strict or only_result)


def candidate_matches(cand: Candidate, target: MethodSig, scenario, api: SubjectApi | None = None,
                      strict: bool = False) -> bool:
    api = api or get_api("stack")
    case = scenario if isinstance(scenario, Case) else scenario_case(scenario, target, api)
    return case_matches(cand, target, case, api, strict)


def has_effect(target: MethodSig, case: Case, api: SubjectApi) -> bool:
    """Does the target call change the receiver or hand back a value?"""
    after, out = _target_run(api, target, case)
    return out[0] == "raise" or target.returns != NONE or after != case.state


# -- exhaustive small-state validation ----------------------------------------------

def small_states(pool=EXHAUSTIVE_POOL, max_size: int = EXHAUSTIVE_MAX):
    for n in range(max_size + 1):
        yield from product(pool, repeat=n)


def _param_choices(kind: str, pool):
    if kind == COLLECTION:
        return [()] + [(v,) for v in pool] + [tuple(pool)]
    return list(pool)


def exhaustive_counterexample(cand: Candidate, target: MethodSig, api: SubjectApi | None = None,
                              pool=EXHAUSTIVE_POOL, max_size: int = EXHAUSTIVE_MAX,
                              strict: bool = False) -> Case | None:
    """First small state (and argument tuple) on which the bodies differ.

    Covers states on which the target raises too, so exception kinds are
    compared on the empty receiver."""
    api = api or get_api("stack")
    arg_lists = list(product(*(_param_choices(k, pool) for k in target.params)))
    for state in small_states(pool, max_size):
        for params in arg_lists:
            case = Case(tuple(state), tuple(params))
            if not case_matches(cand, target, case, api, strict):
                return case
    return None


def exhaustively_equivalent(cand: Candidate, target: MethodSig, api: SubjectApi | None = None,
                            pool=EXHAUSTIVE_POOL, max_size: int = EXHAUSTIVE_MAX,
                            strict: bool = False) -> bool:
    return exhaustive_counterexample(cand, target, api, pool, max_size, strict) is None


# -- randomized counterexample search -----------------------------------------------

def case_sequence(case: Case, target: MethodSig, api: SubjectApi,
                  fill: str = "addElement(Object)") -> Sequence:
    """Spell a case out as a runnable sequence ending in the target call.

    The final call may raise; such a sequence is a counterexample but not
    an execution scenario."""
    filler = api.method(fill)
    recv = "stack0"
    sts = [Statement.construct(recv, api.classes[0])]
    env = {recv: SUBJECT}
    for v in case.state:
        sts.append(with_minimal_casts(api, Statement.invoke(recv, filler, [Lit(v)]), env))
    sts.append(with_minimal_casts(api, Statement.invoke(recv, target, [Lit(p) for p in case.params]), env))
    return Sequence(tuple(sts), COUNTEREXAMPLE)


def case_scenario(case: Case, target: MethodSig, api: SubjectApi,
                  fill: str = "addElement(Object)") -> ExecutionScenario:
    """As :func:`case_sequence`, for cases on which the target completes."""
    return make_scenario(case_sequence(case, target, api, fill), target, api)


def _random_params(rng, target: MethodSig, state: tuple, pool) -> tuple:
    out = []
    for kind in target.params:
        if kind == ELEMENT:
            src = state if state and rng.random() < 0.5 else pool
            out.append(rng.choice(src))
        elif kind in (INT, INDEX):
            out.append(rng.randint(0, len(state)) if rng.random() < 0.8 else rng.choice(pool))
        else:
            out.append(tuple(rng.choice(pool) for _ in range(rng.randint(0, 3))))
    return tuple(out)


def find_counterexample(cand: Candidate, target: MethodSig, budget: int = DEFAULT_COUNTER_BUDGET,
                        seed: int = 0, api: SubjectApi | None = None, pool=COUNTER_POOL,
                        max_size: int = COUNTER_MAX, strict: bool = False,
                        stats: dict | None = None) -> Sequence | None:
    """Random receiver states, small ones first, until the bodies disagree.

    ``budget`` counts statements a concrete test would execute: building
    the receiver, the target call and the candidate body. States on which
    the target raises are tried too, since a body that raises the wrong
    kind (or nothing) is as wrong as one that leaves another state.
    ``stats["spent"]`` reports the statements used.
    """
    api = api or get_api("stack")
    rng = rng_for(seed, "counterexample", target.qualified, cand.text)
    stats = stats if stats is not None else {}
    stats["spent"] = 0
    trial = 0
    while stats["spent"] < budget:
        n = rng.randint(0, min(max_size, 1 + trial // 3))
        trial += 1
        state = tuple(rng.choice(pool) for _ in range(n))
        case = Case(state, _random_params(rng, target, state, pool), n + 1)
        stats["spent"] += case.cost + 1 + len(cand)
        if not case_matches(cand, target, case, api, strict):
            return case_sequence(case, target, api)
    return None
