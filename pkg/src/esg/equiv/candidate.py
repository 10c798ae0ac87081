"""Candidate bodies: short call sequences on the scenario's receiver.

A body is written one call per ``;``, e.g. ``remove(size()-1)`` or
``addAll([$0]); removeElementAt(0)``. Argument atoms:

* integer literal, optionally cast: ``0`` or ``(Object)0``
* ``$k``: the k-th argument of the target call
* ``size()``, ``size()-1``, ``size()+2``: evaluated against the receiver
  at the moment the call runs
* ``[a, b]``: a collection of element atoms
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product

from ..model import (
    COLLECTION, ELEMENT, INDEX, INT, NONE, MethodSig, SubjectApi, SubjectError,
)

CONST = "const"
PARAM = "param"
SIZE = "size"
COLL = "coll"

DEFAULT_ELEMENT_CONSTANTS = (0, 1)


@dataclass(frozen=True)
class Atom:
    kind: str          # CONST, PARAM, SIZE or COLL
    value: object = 0  # literal, parameter index, size offset, or tuple of atoms
    cast: bool = False  # (Object) cast on a literal

    def evaluate(self, state: tuple, params: tuple):
        if self.kind == CONST:
            return self.value
        if self.kind == PARAM:
            return params[self.value]
        if self.kind == SIZE:
            return len(state) + self.value
        return tuple(a.evaluate(state, params) for a in self.value)

    def text(self) -> str:
        if self.kind == CONST:
            return f"(Object){self.value}" if self.cast else str(self.value)
        if self.kind == PARAM:
            return f"${self.value}"
        if self.kind == SIZE:
            off = self.value
            return "size()" if off == 0 else f"size(){'+' if off > 0 else '-'}{abs(off)}"
        return "[" + ", ".join(a.text() for a in self.value) + "]"


@dataclass(frozen=True)
class Call:
    method: MethodSig
    args: tuple[Atom, ...]

    def text(self) -> str:
        return f"{self.method.name}({', '.join(a.text() for a in self.args)})"


@dataclass(frozen=True)
class Candidate:
    calls: tuple[Call, ...]

    def __len__(self) -> int:
        return len(self.calls)

    @property
    def text(self) -> str:
        return "; ".join(c.text() for c in self.calls)

    def __str__(self) -> str:
        return self.text

    def run(self, api: SubjectApi, state: tuple, params: tuple):
        """Execute on ``state``; returns (final state, outcome, return kind).

        The outcome is that of the last call, or the first raise."""
        outcome, kind = ("return", None), NONE
        for call in self.calls:
            args = [a.evaluate(state, params) for a in call.args]
            try:
                state, value = api.apply(call.method, state, args)
            except SubjectError as exc:
                return state, ("raise", exc.kind), call.method.returns
            outcome, kind = ("return", value), call.method.returns
        return state, outcome, kind

    def subsequences(self):
        """Every proper, non-empty subsequence (order preserved)."""
        n = len(self.calls)
        for mask in range(1, (1 << n) - 1):
            yield Candidate(tuple(c for i, c in enumerate(self.calls) if mask >> i & 1))


def target_only(target: MethodSig) -> Candidate:
    """The body consisting of the target call itself, fed its own arguments."""
    return Candidate((Call(target, tuple(Atom(PARAM, i) for i in range(target.arity))),))


# -- overload resolution -------------------------------------------------------------

def _atom_fit(atom: Atom, kind: str, target: MethodSig | None) -> int | None:
    """0 = exact, 1 = by boxing, None = incompatible."""
    if atom.kind == COLL:
        return 0 if kind == COLLECTION else None
    if atom.kind == SIZE or (atom.kind == CONST and not atom.cast):
        if kind in (INT, INDEX):
            return 0
        return 1 if kind == ELEMENT else None
    if atom.kind == CONST:  # cast to Object
        return 0 if kind == ELEMENT else None
    pkind = target.params[atom.value] if target and atom.value < target.arity else None
    if pkind == ELEMENT:
        return 0 if kind == ELEMENT else None
    if pkind in (INT, INDEX):
        if kind in (INT, INDEX):
            return 0
        return 1 if kind == ELEMENT else None
    return None


def resolve_call(api: SubjectApi, name: str, args, target: MethodSig | None = None) -> MethodSig:
    best, best_cost = [], None
    for sig in api.overloads(name, len(args)):
        fits = [_atom_fit(a, k, target) for a, k in zip(args, sig.params)]
        if None in fits:
            continue
        for a, k in zip(args, sig.params):
            if a.kind == COLL and any(_atom_fit(x, ELEMENT, target) is None for x in a.value):
                break
        else:
            cost = sum(fits)
            if best_cost is None or cost < best_cost:
                best, best_cost = [sig], cost
            elif cost == best_cost:
                best.append(sig)
    if not best:
        raise LookupError(f"no overload of {name} accepts ({', '.join(a.text() for a in args)})")
    if len(best) > 1:
        raise LookupError(f"ambiguous call {name}({', '.join(a.text() for a in args)})")
    return best[0]


def make_call(api: SubjectApi, sig: MethodSig, args, target: MethodSig | None = None) -> Call:
    """Build a call to ``sig``, casting element literals only where the
    uncast form would pick another overload."""
    plain = tuple(Atom(CONST, a.value) if a.kind == CONST else a for a in args)
    try:
        if resolve_call(api, sig.name, plain, target) == sig:
            return Call(sig, plain)
    except LookupError:
        pass
    cast = tuple(Atom(CONST, a.value, True) if a.kind == CONST and k == ELEMENT else a
                 for a, k in zip(plain, sig.params))
    if resolve_call(api, sig.name, cast, target) != sig:  # pragma: no cover
        raise LookupError(f"cannot express a call to {sig.key}")
    return Call(sig, cast)


# -- parsing -------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\(Object\))|(size\(\))|(\$\d+)|(-?\d+)|([A-Za-z_]\w*)|([()\[\],;+-]))")


class CandidateSyntaxError(ValueError):
    pass


def _tokens(text: str):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise CandidateSyntaxError(f"unexpected input at column {pos + 1}: {text[pos:pos + 10]!r}")
        kinds = ("cast", "size", "param", "int", "name", "punct")
        kind = next(k for k, g in zip(kinds, m.groups()) if g is not None)
        out.append((kind, m.group(m.lastindex)))
        pos = m.end()
    return out


def parse_candidate(text: str, api: SubjectApi, target: MethodSig | None = None) -> Candidate:
    toks = _tokens(text)
    i = 0

    def peek():
        return toks[i] if i < len(toks) else (None, None)

    def take(kind=None, value=None):
        nonlocal i
        k, v = peek()
        if k is None or (kind and k != kind) or (value and v != value):
            raise CandidateSyntaxError(f"expected {value or kind} in {text!r}")
        i += 1
        return v

    def atom() -> Atom:
        k, v = peek()
        if k == "cast":
            take()
            return Atom(CONST, int(take("int")), True)
        if k == "int":
            take()
            return Atom(CONST, int(v))
        if k == "param":
            take()
            idx = int(v[1:])
            if target is not None and idx >= target.arity:
                raise CandidateSyntaxError(f"{v} exceeds the target's {target.arity} argument(s)")
            return Atom(PARAM, idx)
        if k == "size":
            take()
            if peek() in (("punct", "+"), ("punct", "-")):
                sign = 1 if take() == "+" else -1
                return Atom(SIZE, sign * int(take("int")))
            if peek()[0] == "int" and peek()[1].startswith("-"):
                return Atom(SIZE, int(take("int")))
            return Atom(SIZE, 0)
        if (k, v) == ("punct", "["):
            take()
            items = []
            while peek() != ("punct", "]"):
                items.append(atom())
                if peek() == ("punct", ","):
                    take()
            take("punct", "]")
            return Atom(COLL, tuple(items))
        raise CandidateSyntaxError(f"bad argument in {text!r}")

    calls = []
    while i < len(toks):
        args = []
        if peek()[0] == "size":  # a call to size() itself
            take()
            name = "size"
        else:
            name = take("name")
            take("punct", "(")
            while peek() != ("punct", ")"):
                args.append(atom())
                if peek() == ("punct", ","):
                    take()
            take("punct", ")")
        try:
            sig = resolve_call(api, name, args, target)
        except LookupError as exc:
            raise CandidateSyntaxError(str(exc)) from None
        calls.append(Call(sig, tuple(args)))
        if i < len(toks):
            take("punct", ";")
    if not calls:
        raise CandidateSyntaxError("empty candidate body")
    return Candidate(tuple(calls))


# -- the search alphabet -------------------------------------------------------------

def atoms_for(kind: str, target: MethodSig, constants=DEFAULT_ELEMENT_CONSTANTS) -> list[Atom]:
    elem_params = [Atom(PARAM, i) for i, k in enumerate(target.params) if k == ELEMENT]
    int_params = [Atom(PARAM, i) for i, k in enumerate(target.params) if k in (INT, INDEX)]
    if kind == ELEMENT:
        return [Atom(CONST, c) for c in constants] + elem_params
    if kind in (INT, INDEX):
        return [Atom(CONST, 0), Atom(SIZE, -1), Atom(SIZE, 0)] + int_params
    singles = [Atom(CONST, c) for c in constants] + elem_params
    return [Atom(COLL, ())] + [Atom(COLL, (a,)) for a in singles]


def alphabet(api: SubjectApi, target: MethodSig, constants=DEFAULT_ELEMENT_CONSTANTS) -> list[Call]:
    """Every single call over the full API with the standard atoms."""
    out = []
    for sig in api.methods:
        for args in product(*(atoms_for(k, target, constants) for k in sig.params)):
            out.append(make_call(api, sig, args, target))
    return out
