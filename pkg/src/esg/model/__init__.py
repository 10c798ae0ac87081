"""Subject model: container API semantics, statement language, interpreter."""

from functools import lru_cache

from .api import (
    BOOLEAN, COLLECTION, ELEMENT, EMPTY, INDEX, INT, NONE, OUT_OF_BOUNDS,
    MethodSig, SubjectApi, SubjectError,
)
from .interp import (
    Fingerprint, ObjectState, ReplayTrace, Session, Step, fingerprint, graph_size,
    raised, replay, returned,
)
from .lang import (
    CONSTRUCT, INVOKE, Lit, ParseError, Ref, Sequence, Statement, canonical_names,
    parse_sequence, serialize,
)
from .stack import build_stack_api

_REGISTRY = {"stack": build_stack_api}


@lru_cache(maxsize=None)
def get_api(name: str) -> SubjectApi:
    try:
        return _REGISTRY[name]()
    except KeyError:
        raise KeyError(f"unknown api {name!r}; known: {', '.join(sorted(_REGISTRY))}") from None


def api_names() -> list[str]:
    return sorted(_REGISTRY)


__all__ = [
    "BOOLEAN", "COLLECTION", "CONSTRUCT", "ELEMENT", "EMPTY", "INDEX", "INT", "INVOKE",
    "NONE", "OUT_OF_BOUNDS", "Fingerprint", "Lit", "MethodSig", "ObjectState",
    "ParseError", "Ref", "ReplayTrace", "Sequence", "Session", "Statement", "Step",
    "SubjectApi", "SubjectError", "api_names", "canonical_names", "fingerprint",
    "get_api", "graph_size", "parse_sequence", "raised", "replay", "returned", "serialize",
]
