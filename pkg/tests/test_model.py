"""Subject model: statement language, interpreter and container semantics."""

import random

import pytest
from hypothesis import given, strategies as st

from esg.model import (
    EMPTY, OUT_OF_BOUNDS, ObjectState, ParseError, Sequence, SubjectError,
    canonical_names, fingerprint, get_api, graph_size, parse_sequence, replay, serialize,
)


# -- independent oracle ---------------------------------------------------------------
# Plain list mutation, written from the Java Vector/Stack contracts rather than
# the tuple-slicing implementation under test.

class Raised(Exception):
    def __init__(self, kind):
        self.kind = kind


def _check_read(xs, i):
    if not xs:
        raise Raised(EMPTY)
    if i < 0 or i >= len(xs):
        raise Raised(OUT_OF_BOUNDS)


def _check_write(xs, i):
    if i < 0 or i >= len(xs):
        raise Raised(OUT_OF_BOUNDS)


def _check_insert(xs, i):
    if i < 0 or i > len(xs):
        raise Raised(OUT_OF_BOUNDS)


def oracle(key, xs, args):
    xs = list(xs)
    a = list(args)
    if key == "push(Object)":
        xs.append(a[0]); return xs, a[0]
    if key == "pop()":
        if not xs: raise Raised(EMPTY)
        return xs, xs.pop()
    if key == "peek()":
        if not xs: raise Raised(EMPTY)
        return xs, xs[-1]
    if key == "empty()" or key == "isEmpty()":
        return xs, len(xs) == 0
    if key == "search(Object)":
        for d in range(1, len(xs) + 1):
            if xs[-d] == a[0]:
                return xs, d
        return xs, -1
    if key == "add(int,Object)":
        _check_insert(xs, a[0]); xs.insert(a[0], a[1]); return xs, None
    if key == "add(Object)":
        xs.append(a[0]); return xs, True
    if key == "addAll(int,Collection)":
        _check_insert(xs, a[0]); xs[a[0]:a[0]] = list(a[1]); return xs, len(a[1]) > 0
    if key == "addAll(Collection)":
        xs.extend(a[0]); return xs, len(a[0]) > 0
    if key == "addElement(Object)":
        xs.append(a[0]); return xs, None
    if key == "set(int,Object)":
        _check_write(xs, a[0]); old = xs[a[0]]; xs[a[0]] = a[1]; return xs, old
    if key == "insertElementAt(Object,int)":
        _check_insert(xs, a[1]); xs.insert(a[1], a[0]); return xs, None
    if key == "setElementAt(Object,int)":
        _check_write(xs, a[1]); xs[a[1]] = a[0]; return xs, None
    if key == "capacity()":
        cap = 10
        while cap < len(xs):
            cap *= 2
        return xs, cap
    if key == "clone()":
        return xs, tuple(xs)
    if key == "contains(Object)":
        return xs, a[0] in xs
    if key in ("get(int)", "elementAt(int)"):
        _check_read(xs, a[0]); return xs, xs[a[0]]
    if key in ("clear()", "removeAllElements()"):
        return [], None
    if key == "remove(int)":
        _check_read(xs, a[0]); return xs, xs.pop(a[0])
    if key in ("remove(Object)", "removeElement(Object)"):
        if a[0] in xs:
            xs.remove(a[0]); return xs, True
        return xs, False
    if key == "removeAll(Collection)":
        kept = [v for v in xs if v not in a[0]]; return kept, len(kept) != len(xs)
    if key == "removeElementAt(int)":
        _check_read(xs, a[0]); del xs[a[0]]; return xs, None
    if key == "retainAll(Collection)":
        kept = [v for v in xs if v in a[0]]; return kept, len(kept) != len(xs)
    if key == "setSize(int)":
        if a[0] < 0: raise Raised(OUT_OF_BOUNDS)
        return (xs + [0] * a[0])[:a[0]], None
    if key == "size()":
        return xs, len(xs)
    if key == "firstElement()":
        if not xs: raise Raised(EMPTY)
        return xs, xs[0]
    if key == "lastElement()":
        if not xs: raise Raised(EMPTY)
        return xs, xs[-1]
    if key == "indexOf(Object)":
        return xs, xs.index(a[0]) if a[0] in xs else -1
    raise AssertionError(f"oracle lacks {key}")


VALUES = st.integers(min_value=-2, max_value=12)
STATES = st.lists(VALUES, max_size=9).map(tuple)


def _arg(kind, data):
    if kind == "collection":
        return tuple(data.draw(st.lists(VALUES, max_size=3)))
    if kind in ("int", "index"):
        return data.draw(st.integers(min_value=-1, max_value=10))
    return data.draw(VALUES)


@given(STATES, st.data())
def test_semantics_agree_with_list_oracle(state, data):
    api = get_api("stack")
    sig = data.draw(st.sampled_from(api.methods))
    args = [_arg(k, data) for k in sig.params]
    try:
        want = oracle(sig.key, state, args)
    except Raised as exc:
        with pytest.raises(SubjectError) as info:
            api.apply(sig, state, args)
        assert info.value.kind == exc.kind
        assert exc.kind in sig.exception_kinds
        return
    after, result = api.apply(sig, state, args)
    assert list(after) == want[0]
    assert result == want[1]


@given(STATES, st.data())
def test_apply_is_deterministic(state, data):
    api = get_api("stack")
    sig = data.draw(st.sampled_from(api.methods))
    args = [_arg(k, data) for k in sig.params]

    def once():
        try:
            return api.apply(sig, state, args)
        except SubjectError as exc:
            return exc.kind

    assert once() == once()


# -- api surface ------------------------------------------------------------------------

def test_signatures_are_unique(api):
    idents = [(m.owner, m.name, m.params) for m in api.methods]
    assert len(idents) == len(set(idents)) == 32


def test_method_lookup_by_signature(api):
    assert api.method("Stack.push(Object)").name == "push"
    assert api.method("remove(int)").params == ("index",)
    assert api.method("remove(Object)").params == ("element",)
    with pytest.raises(KeyError, match="ambiguous"):
        api.method("remove")
    with pytest.raises(KeyError, match="not found"):
        api.method("frobnicate()")


def test_unknown_api():
    with pytest.raises(KeyError, match="unknown api"):
        get_api("queue")


# -- parsing ----------------------------------------------------------------------------

def test_parse_three_statements_ending_in_pop(api):
    seq = parse_sequence("s0 = new Stack()\ns0.push(1)\nr0 = s0.pop()", api)
    assert len(seq) == 3
    assert seq[-1].method == api.method("pop()")
    assert seq[-1].bind == "r0"


def test_parse_empty_text():
    assert len(parse_sequence("")) == 0


def test_parse_unbound_variable():
    with pytest.raises(ParseError, match="unbound variable s0") as info:
        parse_sequence("s0.push(1)")
    assert info.value.args  # carries line/column


@pytest.mark.parametrize("text, needle", [
    ("s0 = new Stack()\ns0.frob(1)", "frob"),
    ("s0 = new Stack()\ns0.push(1, 2)", "push"),
    ("s0 = new Stack()\ns0.push([1,)", None),
    ("s0 = new Queue()", "unknown type"),
])
def test_parse_errors(text, needle):
    with pytest.raises(ParseError, match=needle):
        parse_sequence(text)


def test_parse_error_names_line_and_column():
    with pytest.raises(ParseError) as info:
        parse_sequence("s0 = new Stack()\n\ns0.frob()")
    assert "3" in str(info.value)


def test_parse_java_decoration(api):
    seq = parse_sequence(
        "Stack<Integer> stack0 = new Stack<Integer>();\n"
        "stack0.add(0, (Object)(-1));\n"
        "boolean b0 = stack0.remove((Object)1);  # comment\n", api)
    assert seq[1].method == api.method("add(int,Object)")
    assert seq[2].method == api.method("remove(Object)")


def test_cast_selects_overload(api):
    plain = parse_sequence("s0 = new Stack()\ns0.push(1)\ns0.remove(0)", api)
    cast = parse_sequence("s0 = new Stack()\ns0.push(1)\ns0.remove((Object)1)", api)
    assert plain[-1].method == api.method("remove(int)")
    assert cast[-1].method == api.method("remove(Object)")
    assert "(Object)" in serialize(cast)


_CALLS = [
    "v.push({e})", "v.addElement({e})", "v.add({e})", "v.add(0, {e})",
    "v.addAll([{e}, 3])", "v.insertElementAt({e}, 0)", "v.remove((Object){e})",
    "v.setElementAt({e}, 0)", "v.peek()", "v.size()",
]


@given(st.lists(st.tuples(st.sampled_from(_CALLS), VALUES), max_size=8))
def test_serialize_parse_round_trip(calls):
    lines = ["v = new Stack()", "v.push(5)"] + [c.format(e=e) for c, e in calls]
    seq = parse_sequence("\n".join(lines))
    text = serialize(seq)
    assert serialize(parse_sequence(text)) == text
    assert parse_sequence(text).statements == seq.statements


def test_canonical_names_are_alpha_invariant(api):
    a = parse_sequence("x = new Stack()\nx.push(1)\nr = x.pop()", api)
    b = parse_sequence("stack9 = new Stack()\nstack9.push(1)\nout = stack9.pop()", api)
    assert serialize(canonical_names(a)) == serialize(canonical_names(b))


# -- replay -----------------------------------------------------------------------------

def test_replay_push_pop(api):
    trace = replay(parse_sequence("s = new Stack()\ns.push(1)\nr = s.pop()", api), api)
    assert trace.last.result == 1
    assert trace.state("s") == ObjectState(())
    assert not trace.aborted


def test_replay_pop_on_empty_records_exception(api):
    trace = replay(parse_sequence("s = new Stack()\nr = s.pop()", api), api)
    assert len(trace.steps) == 2
    assert trace.exception == EMPTY


def test_replay_set_out_of_bounds(api):
    trace = replay(parse_sequence("s = new Stack()\ns.set(10, 10)", api), api)
    assert trace.exception == OUT_OF_BOUNDS


def test_replay_stops_at_first_raise(api):
    seq = parse_sequence("s = new Stack()\ns.pop()\ns.push(1)\ns.push(2)", api)
    trace = replay(seq, api)
    assert len(trace.steps) == 2
    assert trace.state("s").elements == ()


@given(st.lists(st.tuples(st.sampled_from(_CALLS), VALUES), max_size=10))
def test_replay_is_deterministic(calls):
    seq = parse_sequence("\n".join(["v = new Stack()"] + [c.format(e=e) for c, e in calls]))
    a, b = replay(seq), replay(seq)
    assert [(s.outcome, s.states) for s in a.steps] == [(s.outcome, s.states) for s in b.steps]


# -- graph size and fingerprint -----------------------------------------------------------

@pytest.mark.parametrize("elements, size", [((), 1), ((-1, 0, 10, 1, 1), 6), (tuple(range(1, 9)), 9)])
def test_graph_size(elements, size):
    assert graph_size(ObjectState(elements)) == size
    assert graph_size(elements) == size


def test_graph_size_of_worked_scenario(api):
    seq = parse_sequence(
        "s = new Stack()\ns.addElement(0)\ns.addElement(10)\ns.push(1)\n"
        "s.addElement(1)\ns.add(0, -1)\nr = s.pop()", api)
    before = replay(seq, api).last.receiver_before
    assert before == (-1, 0, 10, 1, 1)
    assert graph_size(before) == 6


@given(STATES)
def test_graph_size_is_one_plus_length(state):
    assert graph_size(state) == 1 + len(state)


def test_fingerprint_examples(api):
    assert fingerprint((), ("return", 1), api) == fingerprint((), ("return", 1), api)
    assert fingerprint((1,), None, api) != fingerprint((2,), None, api)
    pop, rem = api.method("pop()"), api.method("remove(int)")
    a, _ = api.apply(pop, (10, 1), ())
    b, _ = api.apply(rem, (10, 1), (1,))
    assert fingerprint(a, None, api) == fingerprint(b, None, api)


@given(STATES, STATES)
def test_fingerprint_equal_iff_elements_equal(a, b):
    assert (fingerprint(a) == fingerprint(b)) == (a == b)


def test_pop_matches_remove_last_on_random_states(api):
    rng = random.Random(1234)
    pop, rem = api.method("pop()"), api.method("remove(int)")
    for _ in range(200):
        state = tuple(rng.choice((-1, 0, 1, 7, 42)) for _ in range(rng.randint(0, 8)))
        if state:
            a = api.apply(pop, state, ())
            b = api.apply(rem, state, (len(state) - 1,))
            assert fingerprint(a[0], ("return", a[1]), api) == fingerprint(b[0], ("return", b[1]), api)
        else:
            with pytest.raises(SubjectError) as x:
                api.apply(pop, state, ())
            with pytest.raises(SubjectError) as y:
                api.apply(rem, state, (len(state) - 1,))
            assert x.value.kind == y.value.kind == EMPTY


def test_sequence_is_iterable():
    seq = parse_sequence("s = new Stack()\ns.push(3)")
    assert isinstance(seq, Sequence)
    assert [st.kind for st in seq] == ["construct", "invoke"]
