"""Method signatures and the executable subject-API container."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

# parameter kinds
INT = "int"
ELEMENT = "element"
INDEX = "index"
COLLECTION = "collection"
PARAM_KINDS = (INT, ELEMENT, INDEX, COLLECTION)

# return kinds
NONE = "none"
BOOLEAN = "boolean"
RETURN_KINDS = (NONE, ELEMENT, BOOLEAN, INT, COLLECTION)

# exception kinds
EMPTY = "empty-container"
OUT_OF_BOUNDS = "index-out-of-bounds"
EXCEPTION_KINDS = (EMPTY, OUT_OF_BOUNDS)

_JAVA_PARAM = {INT: "int", INDEX: "int", ELEMENT: "Object", COLLECTION: "Collection"}


class SubjectError(Exception):
    """Raised by subject semantics; ``kind`` is one of EXCEPTION_KINDS."""

    def __init__(self, kind: str, detail: str = ""):
        super().__init__(f"{kind}: {detail}" if detail else kind)
        self.kind = kind


State = tuple  # tuple[int, ...]
Impl = Callable[..., "tuple[State, object]"]


@dataclass(frozen=True)
class MethodSig:
    owner: str
    name: str
    params: tuple[str, ...] = ()
    returns: str = NONE
    throws: tuple[tuple[str, str], ...] = field(default=(), compare=False)

    @property
    def arity(self) -> int:
        return len(self.params)

    @property
    def key(self) -> str:
        """Java-style signature without the owner, e.g. ``add(int,Object)``."""
        return f"{self.name}({','.join(_JAVA_PARAM[p] for p in self.params)})"

    @property
    def qualified(self) -> str:
        return f"{self.owner}.{self.key}"

    @property
    def exception_kinds(self) -> frozenset[str]:
        return frozenset(kind for kind, _ in self.throws)

    def __str__(self) -> str:
        return self.qualified


@dataclass
class SubjectApi:
    """A container API: ordered signatures plus one transition function each.

    A transition takes ``(state, *args)`` and returns ``(new_state, result)``
    or raises :class:`SubjectError`. States are tuples of ints.
    """

    name: str
    classes: tuple[str, ...] = ()
    methods: list[MethodSig] = field(default_factory=list)
    semantics: dict[MethodSig, Impl] = field(default_factory=dict)

    def register(self, sig: MethodSig, impl: Impl) -> MethodSig:
        ident = (sig.owner, sig.name, sig.params)
        if any((m.owner, m.name, m.params) == ident for m in self.methods):
            raise ValueError(f"duplicate method {sig.qualified}")
        for kind in sig.exception_kinds:
            if kind not in EXCEPTION_KINDS:
                raise ValueError(f"{sig.qualified}: unknown exception kind {kind}")
        self.methods.append(sig)
        self.semantics[sig] = impl
        return sig

    def overloads(self, name: str, arity: int | None = None) -> list[MethodSig]:
        return [m for m in self.methods if m.name == name and (arity is None or m.arity == arity)]

    def method(self, spec: str) -> MethodSig:
        """Look up a method from a spec string such as ``pop()``,
        ``Stack.push(Object)`` or ``remove(int)``. A bare name is accepted
        when it is not overloaded."""
        spec = spec.strip().replace(" ", "")
        if "(" not in spec:
            name, params = spec, None
        else:
            if not spec.endswith(")"):
                raise KeyError(f"malformed method spec {spec!r}")
            name, _, rest = spec.partition("(")
            params = [p for p in rest[:-1].split(",") if p]
        if "." in name:
            name = name.rsplit(".", 1)[1]
        found = self.overloads(name)
        if params is not None:
            found = [m for m in found if _params_match(m, params)]
        if len(found) != 1:
            if not found:
                raise KeyError(f"method {spec!r} not found in {self.name}")
            raise KeyError(f"method {spec!r} is ambiguous in {self.name}: "
                           + ", ".join(m.key for m in found))
        return found[0]

    def apply(self, sig: MethodSig, state: State, args: Iterable) -> tuple[State, object]:
        return self.semantics[sig](tuple(state), *args)



_TYPE_ALIASES = {
    "int": {INT, INDEX},
    "Integer": {ELEMENT},
    "Object": {ELEMENT},
    "E": {ELEMENT},
    "Collection": {COLLECTION},
}


def _params_match(sig: MethodSig, params: list[str]) -> bool:
    if len(params) != sig.arity:
        return False
    for have, want in zip(params, sig.params):
        base = have.split("<", 1)[0].rsplit(".", 1)[-1]
        if want not in _TYPE_ALIASES.get(base, set()):
            return False
    return True
