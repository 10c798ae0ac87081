"""Search for call sequences equivalent to a target method, used to score scenarios."""

from .candidate import Atom, Call, Candidate, CandidateSyntaxError, parse_candidate, target_only
from .check import (
    Case, candidate_matches, exhaustive_counterexample, exhaustively_equivalent,
    case_sequence, find_counterexample, scenario_case,
)
from .loop import Found, LoopConfig, LoopResult, synthesis_loop, synthesize_candidate
