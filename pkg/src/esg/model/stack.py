"""Reference semantics for a java.util.Stack-like container of integers.

Exception model (two kinds):

* reading or removing a position of an *empty* container raises
  ``empty-container`` (pop, peek, firstElement, lastElement, get,
  elementAt, remove(int), removeElementAt);
* any other out-of-range index raises ``index-out-of-bounds``; writes and
  inserts (set, setElementAt, add(int, e), insertElementAt,
  addAll(int, c)) and setSize with a negative size always use this kind,
  even on an empty container.
"""

from __future__ import annotations

from .api import (
    BOOLEAN, COLLECTION, ELEMENT, EMPTY, INDEX, INT, NONE, OUT_OF_BOUNDS,
    MethodSig, SubjectApi, SubjectError,
)

STACK = "Stack"
VECTOR = "Vector"

_ON_EMPTY = (EMPTY, "container is empty")
_READ_INDEX = (OUT_OF_BOUNDS, "index < 0 or index >= size on a non-empty container")
_WRITE_INDEX = (OUT_OF_BOUNDS, "index < 0 or index >= size")
_INSERT_INDEX = (OUT_OF_BOUNDS, "index < 0 or index > size")
_READ = (_ON_EMPTY, _READ_INDEX)


def _read_at(state, i):
    if not state:
        raise SubjectError(EMPTY, f"index {i} of empty container")
    if not 0 <= i < len(state):
        raise SubjectError(OUT_OF_BOUNDS, f"index {i}, size {len(state)}")


def _write_at(state, i):
    if not 0 <= i < len(state):
        raise SubjectError(OUT_OF_BOUNDS, f"index {i}, size {len(state)}")


def _insert_at(state, i):
    if not 0 <= i <= len(state):
        raise SubjectError(OUT_OF_BOUNDS, f"index {i}, size {len(state)}")


def _nonempty(state):
    if not state:
        raise SubjectError(EMPTY)


def _index_of(state, e):
    try:
        return state.index(e)
    except ValueError:
        return -1


def capacity_for(n: int) -> int:
    """Capacity of a default-constructed Vector holding ``n`` elements
    (initial 10, doubling)."""
    cap = 10
    while cap < n:
        cap *= 2
    return cap


# -- Stack -------------------------------------------------------------------

def push(s, e):
    return s + (e,), e


def pop(s):
    _nonempty(s)
    return s[:-1], s[-1]


def peek(s):
    _nonempty(s)
    return s, s[-1]


def empty(s):
    return s, not s


def search(s, e):
    for depth, v in enumerate(reversed(s), start=1):
        if v == e:
            return s, depth
    return s, -1


# -- Vector: growth and node mutation ------------------------------------------

def add_at(s, i, e):
    _insert_at(s, i)
    return s[:i] + (e,) + s[i:], None


def add(s, e):
    return s + (e,), True


def add_all_at(s, i, c):
    _insert_at(s, i)
    c = tuple(c)
    return s[:i] + c + s[i:], bool(c)


def add_all(s, c):
    c = tuple(c)
    return s + c, bool(c)


def add_element(s, e):
    return s + (e,), None


def set_(s, i, e):
    _write_at(s, i)
    return s[:i] + (e,) + s[i + 1:], s[i]


def insert_element_at(s, e, i):
    _insert_at(s, i)
    return s[:i] + (e,) + s[i:], None


def set_element_at(s, e, i):
    _write_at(s, i)
    return s[:i] + (e,) + s[i + 1:], None


# -- Vector: observers ---------------------------------------------------------

def capacity(s):
    return s, capacity_for(len(s))


def clone(s):
    return s, tuple(s)


def contains(s, e):
    return s, e in s


def get(s, i):
    _read_at(s, i)
    return s, s[i]


def size(s):
    return s, len(s)


def is_empty(s):
    return s, not s


def first_element(s):
    _nonempty(s)
    return s, s[0]


def last_element(s):
    _nonempty(s)
    return s, s[-1]


def index_of(s, e):
    return s, _index_of(s, e)


# -- Vector: shrinking ---------------------------------------------------------

def clear(s):
    return (), None


def remove_at(s, i):
    _read_at(s, i)
    return s[:i] + s[i + 1:], s[i]


def remove_element(s, e):
    i = _index_of(s, e)
    if i < 0:
        return s, False
    return s[:i] + s[i + 1:], True


def remove_all(s, c):
    c = set(c)
    out = tuple(v for v in s if v not in c)
    return out, len(out) != len(s)


def remove_element_at(s, i):
    _read_at(s, i)
    return s[:i] + s[i + 1:], None


def retain_all(s, c):
    c = set(c)
    out = tuple(v for v in s if v in c)
    return out, len(out) != len(s)


def set_size(s, n):
    if n < 0:
        raise SubjectError(OUT_OF_BOUNDS, f"negative size {n}")
    # padding uses 0 where Java would use null
    return s[:n] + (0,) * (n - len(s)), None


def build_stack_api() -> SubjectApi:
    api = SubjectApi(name="stack", classes=(STACK,))
    table = [
        (MethodSig(STACK, "push", (ELEMENT,), ELEMENT), push),
        (MethodSig(STACK, "pop", (), ELEMENT, (_ON_EMPTY,)), pop),
        (MethodSig(STACK, "peek", (), ELEMENT, (_ON_EMPTY,)), peek),
        (MethodSig(STACK, "empty", (), BOOLEAN), empty),
        (MethodSig(STACK, "search", (ELEMENT,), INT), search),
        (MethodSig(VECTOR, "add", (INDEX, ELEMENT), NONE, (_INSERT_INDEX,)), add_at),
        (MethodSig(VECTOR, "add", (ELEMENT,), BOOLEAN), add),
        (MethodSig(VECTOR, "addAll", (INDEX, COLLECTION), BOOLEAN, (_INSERT_INDEX,)), add_all_at),
        (MethodSig(VECTOR, "addAll", (COLLECTION,), BOOLEAN), add_all),
        (MethodSig(VECTOR, "addElement", (ELEMENT,), NONE), add_element),
        (MethodSig(VECTOR, "set", (INDEX, ELEMENT), ELEMENT, (_WRITE_INDEX,)), set_),
        (MethodSig(VECTOR, "insertElementAt", (ELEMENT, INDEX), NONE, (_INSERT_INDEX,)), insert_element_at),
        (MethodSig(VECTOR, "setElementAt", (ELEMENT, INDEX), NONE, (_WRITE_INDEX,)), set_element_at),
        (MethodSig(VECTOR, "capacity", (), INT), capacity),
        (MethodSig(VECTOR, "clone", (), COLLECTION), clone),
        (MethodSig(VECTOR, "contains", (ELEMENT,), BOOLEAN), contains),
        (MethodSig(VECTOR, "get", (INDEX,), ELEMENT, _READ), get),
        (MethodSig(VECTOR, "clear", (), NONE), clear),
        (MethodSig(VECTOR, "remove", (INDEX,), ELEMENT, _READ), remove_at),
        (MethodSig(VECTOR, "remove", (ELEMENT,), BOOLEAN), remove_element),
        (MethodSig(VECTOR, "removeAll", (COLLECTION,), BOOLEAN), remove_all),
        (MethodSig(VECTOR, "removeAllElements", (), NONE), clear),
        (MethodSig(VECTOR, "removeElement", (ELEMENT,), BOOLEAN), remove_element),
        (MethodSig(VECTOR, "removeElementAt", (INDEX,), NONE, _READ), remove_element_at),
        (MethodSig(VECTOR, "retainAll", (COLLECTION,), BOOLEAN), retain_all),
        (MethodSig(VECTOR, "setSize", (INT,), NONE, ((OUT_OF_BOUNDS, "negative size"),)), set_size),
        (MethodSig(VECTOR, "size", (), INT), size),
        (MethodSig(VECTOR, "isEmpty", (), BOOLEAN), is_empty),
        (MethodSig(VECTOR, "elementAt", (INDEX,), ELEMENT, _READ), get),
        (MethodSig(VECTOR, "firstElement", (), ELEMENT, (_ON_EMPTY,)), first_element),
        (MethodSig(VECTOR, "lastElement", (), ELEMENT, (_ON_EMPTY,)), last_element),
        (MethodSig(VECTOR, "indexOf", (ELEMENT,), INT), index_of),
    ]
    for sig, impl in table:
        api.register(sig, impl)
    return api
