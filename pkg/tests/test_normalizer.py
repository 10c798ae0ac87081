"""Normalization of usable test cases into execution scenarios."""

import pytest
from hypothesis import given, settings, strategies as st

from esg.classifier import Blacklist, build_allowed
from esg.generator import GenConfig, generate, keep_third_category
from esg.model import CONSTRUCT, Lit, canonical_names, get_api, parse_sequence, replay, serialize
from esg.normalizer import (
    ExecutionScenario, NormalizationError, NormalizeConfig, dedupe_syntactic, element_count,
    filter_window, heterogeneity_filter, make_scenario, merge_receivers, normalize_pipeline,
    specialize_values, truncate_after_target,
)

from worked_examples import MERGED_SCENARIO, POP_RAISES, THREE_RECEIVERS


@pytest.fixture
def pop(api):
    return api.method("pop()")


@pytest.fixture(scope="module")
def corpus():
    """Usable pop() test cases from three seeds."""
    api = get_api("stack")
    target = api.method("pop()")
    allowed = build_allowed(api, target, Blacklist.default())
    out = []
    for seed in (11, 12, 13):
        out += keep_third_category(generate(api, allowed, GenConfig(seed=seed, budget=300)), target, api)
    return out


def fake(count, values=None):
    values = tuple(values if values is not None else range(count))
    return ExecutionScenario(parse_sequence(f"s = new Stack()\ns.push({count})\nr = s.pop()"),
                             count, tuple(sorted(values)), len(set(values)))


# -- individual operations -------------------------------------------------------------------

def test_truncate_drops_the_trailing_push(api, pop):
    seq = truncate_after_target(parse_sequence(THREE_RECEIVERS, api), pop, api)
    assert seq[-1].method == pop
    assert seq[-1].bind == "obj1"
    assert seq.statements == parse_sequence(THREE_RECEIVERS, api).statements[:len(seq)]


def test_truncate_fixpoint(api, pop):
    seq = parse_sequence("s = new Stack()\ns.push(1)\nr = s.pop()", api)
    assert truncate_after_target(seq, pop, api).statements == seq.statements


def test_truncate_needs_a_normal_target_call(api, pop):
    with pytest.raises(NormalizationError):
        truncate_after_target(parse_sequence(POP_RAISES, api), pop, api)


def test_merge_worked_example(api, pop):
    seq = merge_receivers(truncate_after_target(parse_sequence(THREE_RECEIVERS, api), pop, api))
    calls = [(st.method.name, tuple(a.value for a in st.args)) for st in seq if st.kind != CONSTRUCT]
    assert calls == [("addElement", (0,)), ("addElement", (10,)), ("push", (1,)),
                     ("addElement", (1,)), ("add", (0, -1)), ("pop", ())]
    assert sum(st.kind == CONSTRUCT for st in seq) == 1


def test_merge_single_receiver_is_unchanged(api):
    seq = parse_sequence("s = new Stack()\ns.push(1)\ns.push(2)", api)
    assert merge_receivers(seq).statements == seq.statements


def test_merge_keeps_results_replayable_or_drops(corpus, pop, api):
    result = normalize_pipeline(corpus, pop, NormalizeConfig(0, 100, 1), api)
    assert result.inputs == len(corpus)
    assert len(result.scenarios) + sum(result.drops.values()) == len(corpus)
    for sc in result.scenarios:
        trace = replay(sc.seq, api)
        assert len(trace.steps) == len(sc.seq) and not trace.aborted


def test_specialize_drops_casts(api):
    seq = parse_sequence("s = new Stack()\ns.push((Object)1)\ns.addElement((Object)(-1))", api)
    text = serialize(specialize_values(seq, api))
    assert "(Object)" not in text
    assert "push(1)" in text and "addElement(-1)" in text


def test_specialize_keeps_overload_selecting_casts(api):
    seq = parse_sequence("s = new Stack()\ns.push(1)\ns.remove((Object)1)", api)
    out = specialize_values(seq, api)
    assert out[-1].method == api.method("remove(Object)")
    assert serialize(specialize_values(out, api)) == serialize(out)


def test_specialize_round_trip_on_corpus(corpus, api):
    for seq in corpus[:150]:
        spec = specialize_values(seq, api)
        assert serialize(specialize_values(parse_sequence(serialize(spec), api), api)) == serialize(spec)


def test_element_count(api, pop):
    assert element_count(parse_sequence(MERGED_SCENARIO, api), pop, api) == 5
    clear = api.method("clear()")
    assert element_count(parse_sequence("s = new Stack()\ns.clear()", api), clear, api) == 0
    eight = "s = new Stack()\n" + "s.addElement(3)\n" * 8 + "r = s.pop()"
    assert element_count(parse_sequence(eight, api), pop, api) == 8


def test_element_count_errors(api, pop):
    with pytest.raises(NormalizationError):
        element_count(parse_sequence("s = new Stack()\ns.push(1)", api), pop, api)
    with pytest.raises(NormalizationError):
        element_count(parse_sequence("s = new Stack()\ns.set(3, 3)\nr = s.pop()", api), pop, api)


def test_filter_window():
    kept = filter_window([fake(n) for n in (0, 4, 5, 8, 9)])
    assert [s.element_count for s in kept] == [5, 8]
    assert filter_window([]) == []
    with pytest.raises(ValueError):
        filter_window([], 6, 5)


def test_heterogeneity_filter():
    varied, flat = fake(5, (-1, 0, 10, 1, 1)), fake(5, (5,) * 5)
    assert heterogeneity_filter([varied, flat], 3) == [varied]
    assert heterogeneity_filter([varied, flat], 1) == [varied, flat]
    small = fake(2, (4, 4))
    assert heterogeneity_filter([small], 3) == []
    assert heterogeneity_filter([fake(2, (4, 5))], 3) != []
    with pytest.raises(ValueError):
        heterogeneity_filter([], 0)


def test_dedupe_alpha_equivalent(api, pop):
    a = make_scenario(parse_sequence("x = new Stack()\nx.push(1)\nr = x.pop()", api), pop, api)
    b = make_scenario(parse_sequence("y = new Stack()\ny.push(1)\nq = y.pop()", api), pop, api)
    assert dedupe_syntactic([a, b]) == [a]


def test_dedupe_keeps_reordered_calls(api, pop):
    a = make_scenario(parse_sequence("x = new Stack()\nx.push(1)\nx.push(2)\nr = x.pop()", api), pop, api)
    b = make_scenario(parse_sequence("x = new Stack()\nx.push(2)\nx.push(1)\nr = x.pop()", api), pop, api)
    assert dedupe_syntactic([a, b]) == [a, b]


@given(st.lists(st.sampled_from(["x.push(1)", "x.push(2)", "x.addElement(3)"]), max_size=3),
       st.integers(min_value=1, max_value=4))
def test_dedupe_is_idempotent(body, copies):
    api = get_api("stack")
    pop = api.method("pop()")
    text = "\n".join(["x = new Stack()", "x.push(9)"] + body + ["r = x.pop()"])
    items = [make_scenario(parse_sequence(text, api), pop, api)] * copies
    once = dedupe_syntactic(items)
    assert dedupe_syntactic(once) == once
    assert len(once) == 1


# -- whole pipeline ------------------------------------------------------------------------

def test_worked_example_end_to_end(api, pop):
    result = normalize_pipeline([parse_sequence(THREE_RECEIVERS, api)], pop, api=api)
    assert len(result.scenarios) == 1
    sc = result.scenarios[0]
    assert sc.canonical == serialize(canonical_names(parse_sequence(MERGED_SCENARIO, api)))
    assert sc.element_count == 5
    assert sc.values == (-1, 0, 1, 1, 10)
    assert sc.distinct_values == 4


def test_last_result_preserved_through_merge(api):
    before = replay(parse_sequence(THREE_RECEIVERS, api), api)
    pop_steps = [s for s in before.steps if s.statement.method == api.method("pop()")]
    after = replay(parse_sequence(MERGED_SCENARIO, api), api)
    assert pop_steps[-1].result == 1
    assert after.last.result == 1


def test_empty_input_is_nil(api, pop):
    result = normalize_pipeline([], pop, api=api)
    assert result.nil and result.scenarios == []


def test_pipeline_invariants_on_corpus(corpus, api, pop):
    result = normalize_pipeline(corpus, pop, api=api)
    assert result.scenarios
    canon = [s.canonical for s in result.scenarios]
    assert len(canon) == len(set(canon))
    for sc in result.scenarios:
        assert 5 <= sc.element_count <= 8
        assert sum(st.kind == CONSTRUCT for st in sc.seq) == 1
        assert sc.seq[-1].method == pop
        assert not replay(sc.seq, api).aborted
        assert "(Object)" not in sc.text
        assert all(isinstance(a, Lit) for st in sc.seq for a in st.args)


def test_pipeline_is_idempotent(corpus, api, pop):
    first = normalize_pipeline(corpus, pop, api=api).scenarios
    second = normalize_pipeline([s.seq for s in first], pop, api=api).scenarios
    assert [s.canonical for s in second] == [s.canonical for s in first]


@settings(max_examples=10)
@given(st.integers(0, 8), st.integers(0, 8), st.integers(1, 4))
def test_pipeline_respects_configured_window(lo, span, distinct):
    api = get_api("stack")
    pop = api.method("pop()")
    hi = lo + span
    scenarios = [parse_sequence("s = new Stack()\n" + "".join(f"s.push({i})\n" for i in range(n))
                                + "r = s.pop()", api) for n in range(1, 12)]
    out = normalize_pipeline(scenarios, pop, NormalizeConfig(lo, hi, distinct), api).scenarios
    assert [s.element_count for s in out] == [n for n in range(1, 12) if lo <= n <= hi]


def test_config_validation():
    with pytest.raises(ValueError):
        NormalizeConfig(9, 8)
    with pytest.raises(ValueError):
        NormalizeConfig(min_distinct=0)


def test_make_scenario_rejects_two_receivers(api, pop):
    seq = parse_sequence("a = new Stack()\nb = new Stack()\na.push(1)\nr = a.pop()", api)
    with pytest.raises(NormalizationError):
        make_scenario(seq, pop, api)
