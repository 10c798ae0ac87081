"""The statement language: one construction or call per line.

::

    s0 = new Stack()          # construct
    s0.push(1)                # invoke, result discarded
    r0 = s0.pop()             # invoke, result bound
    s0.addAll([1, 2])         # list literal
    s0.remove((Object)1)      # cast selects the remove(Object) overload

Java-flavoured decoration is tolerated so generated test listings can be
read back: a leading declared type (``Integer obj0 = ...``), generic
arguments (``new Stack<Integer>()``), trailing semicolons and casts such as
``(Collection)stack2``. Casts are kept in the parsed form;
:func:`esg.normalizer.specialize_values` drops those that are not needed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Iterator, Union

from .api import COLLECTION, ELEMENT, INDEX, INT, NONE, MethodSig, SubjectApi

CONSTRUCT = "construct"
INVOKE = "invoke"

GENERATED = "generated"
NORMALIZED = "normalized"
COUNTEREXAMPLE = "counterexample"

SUBJECT = "subject"

_ELEMENT_CASTS = {"Object", "Integer"}
_COLLECTION_CASTS = {"Collection", "List", "Vector", "Stack"}
_INT_CASTS = {"int"}


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Lit:
    value: Union[int, tuple]
    cast: str | None = None


@dataclass(frozen=True)
class Ref:
    name: str
    cast: str | None = None


Arg = Union[Lit, Ref]


@dataclass(frozen=True)
class Statement:
    kind: str
    receiver: str
    method: MethodSig | None = None
    args: tuple = ()
    bind: str | None = None
    type_name: str | None = None

    @classmethod
    def construct(cls, var: str, type_name: str = "Stack") -> "Statement":
        return cls(CONSTRUCT, var, type_name=type_name)

    @classmethod
    def invoke(cls, receiver: str, method: MethodSig, args=(), bind: str | None = None) -> "Statement":
        return cls(INVOKE, receiver, method, tuple(args), bind)

    def variables(self) -> Iterator[str]:
        """Variables read by this statement."""
        if self.kind == INVOKE:
            yield self.receiver
            for a in self.args:
                if isinstance(a, Ref):
                    yield a.name

    @property
    def defines(self) -> str | None:
        return self.receiver if self.kind == CONSTRUCT else self.bind


@dataclass(frozen=True)
class Sequence:
    statements: tuple = ()
    provenance: str = GENERATED

    def __len__(self) -> int:
        return len(self.statements)

    def __iter__(self):
        return iter(self.statements)

    def __getitem__(self, i):
        return self.statements[i]

    def with_statements(self, statements, provenance: str | None = None) -> "Sequence":
        return Sequence(tuple(statements), provenance or self.provenance)

    def text(self) -> str:
        return serialize(self)


# -- argument kinds --------------------------------------------------------------

def _arg_kinds(arg: Arg, env: dict[str, str]) -> tuple[set[str], set[str]]:
    """(exact, convertible) parameter kinds an argument can fill."""
    if isinstance(arg, Lit):
        if isinstance(arg.value, tuple):
            return {COLLECTION}, set()
        if arg.cast in _ELEMENT_CASTS:
            return {ELEMENT}, set()
        if arg.cast in _INT_CASTS:
            return {INT, INDEX}, {ELEMENT}
        return {INT, INDEX}, {ELEMENT}
    kind = env[arg.name]
    if kind in (SUBJECT, COLLECTION):
        return {COLLECTION}, set()
    if kind == ELEMENT:
        if arg.cast in _INT_CASTS:
            return {INT, INDEX}, set()
        return {ELEMENT}, {INT, INDEX}
    if kind == INT:
        if arg.cast in _ELEMENT_CASTS:
            return {ELEMENT}, set()
        return {INT, INDEX}, {ELEMENT}
    return set(), set()


def resolve(api: SubjectApi, name: str, args, env: dict[str, str]) -> MethodSig:
    """Pick the overload of ``name`` for ``args``, Java style: exact kinds
    first, then boxing/unboxing. Raises LookupError with a reason."""
    named = api.overloads(name)
    if not named:
        raise LookupError(f"unknown method name {name!r}")
    cands = [m for m in named if m.arity == len(args)]
    if not cands:
        arities = sorted({m.arity for m in named})
        raise LookupError(f"arity mismatch: {name} takes {' or '.join(map(str, arities))} "
                          f"argument(s), got {len(args)}")
    kinds = [_arg_kinds(a, env) for a in args]
    exact = [m for m in cands if all(p in ex for p, (ex, _) in zip(m.params, kinds))]
    if len(exact) == 1:
        return exact[0]
    if not exact:
        loose = [m for m in cands if all(p in ex | cv for p, (ex, cv) in zip(m.params, kinds))]
        if len(loose) == 1:
            return loose[0]
        if not loose:
            raise LookupError(f"argument kind mismatch for {name}")
        exact = loose
    raise LookupError(f"ambiguous call to {name}: " + ", ".join(m.key for m in exact))


# -- tokenizer / parser ----------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<ident>[A-Za-z_$][A-Za-z_$0-9]*)|(?P<punct>[=.()\[\],<>;\-]))")


def _tokenize(line: str, lineno: int) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(line):
        if line[pos:].strip() == "":
            break
        m = _TOKEN.match(line, pos)
        if not m or m.end() == pos:
            col = pos + len(line[pos:]) - len(line[pos:].lstrip()) + 1
            raise ParseError(f"unexpected character {line[col - 1]!r}", lineno, col)
        kind = m.lastgroup
        if kind == "int" and m.end() < len(line) and (line[m.end()].isalnum() or line[m.end()] in "_$"):
            end = re.match(r"[\w$]*", line[m.end():]).end() + m.end()
            raise ParseError(f"malformed literal {line[m.start(kind):end]!r}", lineno, m.start(kind) + 1)
        out.append((kind, m.group(kind), m.start(kind) + 1))
        pos = m.end()
    return out


class _LineParser:
    def __init__(self, tokens, lineno: int, eol_col: int):
        self.toks = tokens
        self.i = 0
        self.lineno = lineno
        self.eol = eol_col

    def peek(self, k: int = 0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else ("eol", "", self.eol)

    def col(self) -> int:
        return self.peek()[2]

    def error(self, msg: str, col: int | None = None):
        raise ParseError(msg, self.lineno, self.col() if col is None else col)

    def take(self, kind: str, value: str | None = None):
        tok = self.peek()
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of line"
            self.error(f"expected {want!r}, got {got!r}")
        self.i += 1
        return tok

    def at(self, kind: str, value: str | None = None, k: int = 0) -> bool:
        tok = self.peek(k)
        return tok[0] == kind and (value is None or tok[1] == value)

    def skip_generics(self):
        if self.at("punct", "<"):
            self.take("punct", "<")
            while not self.at("punct", ">"):
                if self.at("eol"):
                    self.error("unterminated generic argument list")
                self.i += 1
            self.take("punct", ">")

    def statement(self):
        """Returns (bind, bind_col, rhs) where rhs is ('new', type, col) or
        ('call', receiver, recv_col, method, method_col, args)."""
        # optional declared type: IDENT [<...>] IDENT '='
        if self.at("ident") and not self.at("punct", ".", 1) and not self.at("punct", "=", 1):
            self.take("ident")
            self.skip_generics()
        bind = bind_col = None
        if self.at("ident") and self.at("punct", "=", 1):
            _, bind, bind_col = self.take("ident")
            self.take("punct", "=")
        if self.at("ident", "new"):
            self.take("ident")
            _, tname, tcol = self.take("ident")
            self.skip_generics()
            self.take("punct", "(")
            self.take("punct", ")")
            rhs = ("new", tname, tcol)
        else:
            _, recv, rcol = self.take("ident")
            self.take("punct", ".")
            _, meth, mcol = self.take("ident")
            self.take("punct", "(")
            args = []
            if not self.at("punct", ")"):
                args.append(self.arg())
                while self.at("punct", ","):
                    self.take("punct", ",")
                    args.append(self.arg())
            self.take("punct", ")")
            rhs = ("call", recv, rcol, meth, mcol, args)
        if self.at("punct", ";"):
            self.take("punct", ";")
        if not self.at("eol"):
            self.error(f"unexpected {self.peek()[1]!r} after statement")
        return bind, bind_col, rhs

    def arg(self):
        """Returns (Arg, col)."""
        col = self.col()
        cast = None
        # cast: '(' IDENT ')' followed by the start of an atom
        if (self.at("punct", "(") and self.at("ident", k=1) and self.at("punct", ")", 2)
                and (self.peek(3)[0] in ("int", "ident") or self.peek(3)[1] in ("(", "-", "["))):
            self.take("punct", "(")
            cast = self.take("ident")[1]
            self.take("punct", ")")
        atom = self.atom()
        if cast is None:
            return atom, col
        if isinstance(atom, Lit):
            return Lit(atom.value, cast), col
        return Ref(atom.name, cast), col

    def atom(self):
        if self.at("punct", "("):
            self.take("punct", "(")
            inner, _ = self.arg()
            self.take("punct", ")")
            return inner
        if self.at("punct", "-"):
            self.take("punct", "-")
            return Lit(-int(self.take("int")[1]))
        if self.at("int"):
            return Lit(int(self.take("int")[1]))
        if self.at("punct", "["):
            self.take("punct", "[")
            vals = []
            if not self.at("punct", "]"):
                vals.append(self.int_literal())
                while self.at("punct", ","):
                    self.take("punct", ",")
                    vals.append(self.int_literal())
            self.take("punct", "]")
            return Lit(tuple(vals))
        if self.at("ident"):
            return Ref(self.take("ident")[1])
        tok = self.peek()
        self.error(f"malformed literal {tok[1]!r}" if tok[1] else "missing argument")

    def int_literal(self) -> int:
        neg = False
        if self.at("punct", "-"):
            self.take("punct", "-")
            neg = True
        if not self.at("int"):
            self.error(f"malformed literal {self.peek()[1]!r} in list")
        v = int(self.take("int")[1])
        return -v if neg else v


def parse_sequence(text: str, api: SubjectApi | None = None,
                   provenance: str = GENERATED) -> Sequence:
    """Parse statement-language text into a well-formed :class:`Sequence`.

    Raises :class:`ParseError` naming line and column for unknown methods,
    arity mismatches, unbound variables and malformed literals.
    """
    if api is None:
        from . import get_api
        api = get_api("stack")
    env: dict[str, str] = {}
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        p = _LineParser(_tokenize(line, lineno), lineno, len(line) + 1)
        bind, bind_col, rhs = p.statement()
        if bind is not None and bind in env:
            raise ParseError(f"variable {bind} is already bound", lineno, bind_col)
        if rhs[0] == "new":
            _, tname, tcol = rhs
            if tname not in api.classes:
                raise ParseError(f"unknown type {tname!r}", lineno, tcol)
            if bind is None:
                raise ParseError("construction must be bound to a variable", lineno, tcol)
            out.append(Statement.construct(bind, tname))
            env[bind] = SUBJECT
            continue
        _, recv, rcol, meth, mcol, args = rhs
        if recv not in env:
            raise ParseError(f"unbound variable {recv}", lineno, rcol)
        if env[recv] != SUBJECT:
            raise ParseError(f"{recv} is not a {api.name} instance", lineno, rcol)
        for a, acol in args:
            if isinstance(a, Ref) and a.name not in env:
                raise ParseError(f"unbound variable {a.name}", lineno, acol)
            if isinstance(a, Lit) and isinstance(a.value, tuple) and a.cast not in (None, *_COLLECTION_CASTS):
                raise ParseError(f"cannot cast list literal to {a.cast}", lineno, acol)
        plain = [a for a, _ in args]
        try:
            sig = resolve(api, meth, plain, env)
        except LookupError as exc:
            raise ParseError(str(exc), lineno, mcol) from None
        if bind is not None and sig.returns == NONE:
            raise ParseError(f"{sig.key} returns nothing; cannot bind {bind}", lineno, bind_col)
        out.append(Statement.invoke(recv, sig, plain, bind))
        if bind is not None:
            env[bind] = sig.returns
    return Sequence(tuple(out), provenance)


# -- serializer -------------------------------------------------------------------

def format_arg(arg: Arg) -> str:
    if isinstance(arg, Ref):
        body = arg.name
    elif isinstance(arg.value, tuple):
        body = "[" + ", ".join(str(v) for v in arg.value) + "]"
    else:
        body = str(arg.value)
    return f"({arg.cast}){body}" if arg.cast else body


def format_statement(st: Statement) -> str:
    if st.kind == CONSTRUCT:
        return f"{st.receiver} = new {st.type_name}()"
    call = f"{st.receiver}.{st.method.name}({', '.join(format_arg(a) for a in st.args)})"
    return f"{st.bind} = {call}" if st.bind else call


def serialize(seq: Sequence) -> str:
    return "".join(format_statement(st) + "\n" for st in seq)


def variable_kinds(seq: Sequence) -> dict[str, str]:
    env = {}
    for st in seq:
        if st.kind == CONSTRUCT:
            env[st.receiver] = SUBJECT
        elif st.bind:
            env[st.bind] = st.method.returns
    return env


def rename(seq: Sequence, mapping: dict[str, str]) -> Sequence:
    def ren(a):
        return replace(a, name=mapping.get(a.name, a.name)) if isinstance(a, Ref) else a

    out = []
    for st in seq:
        out.append(replace(
            st,
            receiver=mapping.get(st.receiver, st.receiver),
            args=tuple(ren(a) for a in st.args),
            bind=mapping.get(st.bind, st.bind) if st.bind else None,
        ))
    return seq.with_statements(out)


def canonical_names(seq: Sequence) -> Sequence:
    """Rename variables to v0, v1, ... in order of definition."""
    mapping = {}
    for st in seq:
        d = st.defines
        if d is not None and d not in mapping:
            mapping[d] = f"v{len(mapping)}"
    return rename(seq, mapping)



_CAST_FOR = {ELEMENT: "Object", INT: "int", INDEX: "int", COLLECTION: "Collection"}


def with_minimal_casts(api: SubjectApi, st: Statement, env: dict[str, str]) -> Statement:
    """Drop every cast from ``st``'s arguments, then re-add only those needed
    for the call to resolve to ``st.method`` again."""
    if st.kind == CONSTRUCT:
        return st
    plain = tuple(replace(a, cast=None) for a in st.args)
    try:
        if resolve(api, st.method.name, plain, env) == st.method:
            return replace(st, args=plain)
    except LookupError:
        pass
    cast = []
    for a, p in zip(plain, st.method.params):
        exact, _ = _arg_kinds(a, env)
        cast.append(a if p in exact else replace(a, cast=_CAST_FOR[p]))
    cast = tuple(cast)
    if resolve(api, st.method.name, cast, env) != st.method:
        raise LookupError(f"cannot express a call to {st.method.key} unambiguously")
    return replace(st, args=cast)
