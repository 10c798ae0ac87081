"""Known equivalences per target, shipped as JSON fixtures.

The fixtures hold every single-call body from the search alphabet that
survives the exhaustive small-state check. :func:`derive_truth` recomputes
them, so the frozen files can be checked against a fresh derivation.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..model import MethodSig, SubjectApi, get_api
from .candidate import DEFAULT_ELEMENT_CONSTANTS, Candidate, alphabet, target_only
from .check import exhaustively_equivalent

SCORED_METHODS = (
    "addElement(Object)", "clear()", "firstElement()", "peek()", "push(Object)", "remove(Object)",
)


@dataclass(frozen=True)
class GroundTruth:
    target: str                      # qualified signature, e.g. "Vector.clear()"
    equivalences: tuple[str, ...]
    total: int
    named: str | None = None         # the equivalence whose discovery iteration is reported

    def __post_init__(self):
        if self.total != len(self.equivalences):
            raise ValueError(f"total {self.total} != {len(self.equivalences)} listed equivalences")
        if not self.equivalences:
            raise ValueError("ground truth lists no equivalences")
        if len(set(self.equivalences)) != len(self.equivalences):
            raise ValueError("ground truth lists an equivalence twice")
        if self.named is not None and self.named not in self.equivalences:
            raise ValueError(f"named equivalence {self.named!r} is not listed")

    def __contains__(self, text: str) -> bool:
        return text in self.equivalences

    def to_json(self) -> dict:
        return {"target": self.target, "equivalences": list(self.equivalences),
                "total": self.total, "named": self.named}

    @classmethod
    def from_json(cls, data: dict) -> "GroundTruth":
        return cls(data["target"], tuple(data["equivalences"]), int(data["total"]), data.get("named"))

    @classmethod
    def load(cls, path) -> "GroundTruth":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def fixture_name(target: MethodSig) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", target.key).strip("_") + ".json"


def shipped_truth(target: MethodSig) -> GroundTruth:
    res = resources.files("esg.data").joinpath("truth", fixture_name(target))
    if not res.is_file():
        raise FileNotFoundError(f"no shipped ground truth for {target.key}")
    return GroundTruth.from_json(json.loads(res.read_text(encoding="utf-8")))


def derive_truth(target: MethodSig, api: SubjectApi | None = None, named: str | None = None,
                 constants=DEFAULT_ELEMENT_CONSTANTS) -> GroundTruth:
    """Single-call bodies that pass the exhaustive check (the target itself excluded)."""
    api = api or get_api("stack")
    own = target_only(target).text
    found = []
    for call in alphabet(api, target, constants):
        cand = Candidate((call,))
        if cand.text != own and exhaustively_equivalent(cand, target, api):
            found.append(cand.text)
    return GroundTruth(target.qualified, tuple(found), len(found), named)
