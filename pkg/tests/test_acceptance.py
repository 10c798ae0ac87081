"""Acceptance criteria, one test each, at their stated tolerances.

Every test prints a single ``ACCEPTANCE <n> PASS|FAIL`` line (with capture
disabled so it shows up in plain ``pytest`` output) and then asserts.
"""

import json
import subprocess
import sys
import time

import pytest

from esg.classifier import Blacklist, build_allowed
from esg.equiv import exhaustively_equivalent, parse_candidate
from esg.equiv.loop import LoopConfig
from esg.equiv.scoring import peak_size, sample_sets, score, sweep_graph_size
from esg.equiv.truth import shipped_truth
from esg.model import CONSTRUCT, Lit, canonical_names, get_api, parse_sequence, replay, serialize
from esg.normalizer import normalize_pipeline, specialize_values
from esg.pipeline import REPORT, RunConfig, repeat_seeds, run

from worked_examples import MERGED_SCENARIO, THREE_RECEIVERS

MEASURED = [
    "add(int,Object)", "add(Object)", "addElement(Object)", "clear()", "elementAt(int)",
    "firstElement()", "get(int)", "indexOf(Object)", "lastElement()", "peek()", "pop()",
    "push(Object)", "remove(Object)", "remove(int)", "set(int,Object)",
]


@pytest.fixture
def verdict(capsys):
    def say(n, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {n} {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return say


@pytest.fixture(scope="module")
def production():
    """Five runs per measured target, budget 2000: counts, wall-clock, scenarios."""
    api = get_api("stack")
    out = {}
    for key in MEASURED:
        t0 = time.perf_counter()
        runs = [run(RunConfig(method=key, seed=s, budget=2000)) for s in repeat_seeds(0, 5)]
        out[key] = dict(counts=[r.scenarios for r, _ in runs], seconds=time.perf_counter() - t0,
                        per_run=[scs for _, scs in runs], target=api.method(key))
    return out


def test_1_golden_classifier_lists(verdict):
    t0 = time.perf_counter()
    api = get_api("stack")
    allowed = build_allowed(api, api.method("pop()"), Blacklist.default())
    got_allowed = [m.qualified for m in allowed.methods]
    got_removed = {m.qualified for m in allowed.decreasing}
    got_pure = {m.qualified for m in allowed.removed_pure}
    want_allowed = [
        "Stack.push(Object)", "Stack.pop()", "Vector.add(int,Object)", "Vector.add(Object)",
        "Vector.addAll(int,Collection)", "Vector.addAll(Collection)", "Vector.addElement(Object)",
        "Vector.set(int,Object)", "Vector.insertElementAt(Object,int)",
        "Vector.setElementAt(Object,int)",
    ]
    want_removed = {
        "Vector.clear()", "Vector.remove(int)", "Vector.remove(Object)",
        "Vector.removeAll(Collection)", "Vector.removeAllElements()", "Vector.removeElement(Object)",
        "Vector.removeElementAt(int)", "Vector.retainAll(Collection)", "Vector.setSize(int)",
        "Stack.pop()",
    }
    want_pure = {"Stack.empty()", "Stack.peek()", "Stack.search(Object)", "Vector.capacity()",
                 "Vector.clone()", "Vector.contains(Object)"}
    elapsed = time.perf_counter() - t0
    ok = (got_allowed == want_allowed and got_removed == want_removed and want_pure <= got_pure
          and elapsed < 5)
    verdict(1, ok, f"allowed {len(got_allowed)}/10 exact={got_allowed == want_allowed}, "
                   f"removed exact={got_removed == want_removed}, pure subset={want_pure <= got_pure}, "
                   f"{elapsed:.2f}s")


def test_2_worked_example_normalization(verdict):
    t0 = time.perf_counter()
    api = get_api("stack")
    pop = api.method("pop()")
    result = normalize_pipeline([parse_sequence(THREE_RECEIVERS, api)], pop, api=api)
    want = serialize(canonical_names(parse_sequence(MERGED_SCENARIO, api)))
    sc = result.scenarios[0] if len(result.scenarios) == 1 else None
    last = replay(sc.seq, api).last.result if sc else None
    elapsed = time.perf_counter() - t0
    ok = sc is not None and sc.canonical == want and sc.element_count == 5 and last == 1 and elapsed < 1
    verdict(2, ok, f"canonical match={sc is not None and sc.canonical == want}, "
                   f"element count={sc.element_count if sc else None}, final pop={last}, {elapsed:.3f}s")


def test_3_scenario_production_floor(verdict, production):
    mins = {k: min(v["counts"]) for k, v in production.items()}
    slowest = max(v["seconds"] for v in production.values())
    ok = all(m >= 1 for m in mins.values()) and slowest < 60
    worst = min(mins, key=mins.get)
    verdict(3, ok, f"min over 5 runs >= 1 for {sum(m >= 1 for m in mins.values())}/15 targets "
                   f"(lowest {worst} {mins[worst]}), slowest target {slowest:.1f}s for 5 runs")


def _integer_literal(arg):
    if not isinstance(arg, Lit):
        return False
    values = arg.value if isinstance(arg.value, tuple) else (arg.value,)
    return all(isinstance(v, int) and not isinstance(v, bool) for v in values)


def test_4_window_and_well_formedness(verdict, production):
    api = get_api("stack")
    total = violations = 0
    for data in production.values():
        target = data["target"]
        for scs in data["per_run"]:
            canon = [sc.canonical for sc in scs]
            violations += len(canon) - len(set(canon))
            for sc in scs:
                total += 1
                trace = replay(sc.seq, api)
                good = (
                    sc.seq[-1].method == target
                    and len(trace.steps) == len(sc.seq) and not trace.aborted
                    and sum(st.kind == CONSTRUCT for st in sc.seq) == 1
                    and 5 <= len(trace.last.receiver_before) <= 8
                    and all(_integer_literal(a) for st in sc.seq for a in st.args)
                    and specialize_values(sc.seq, api) == sc.seq  # only overload-selecting casts
                )
                violations += not good
    ok = total >= 500 and violations == 0
    verdict(4, ok, f"{total} scenarios checked, {violations} violations")


def test_5_graph_size_sweep(verdict):
    t0 = time.perf_counter()
    api = get_api("stack")
    clear = api.method("clear()")
    rows = sweep_graph_size(clear, shipped_truth(clear), range(12), runs=30, seed=0, api=api)
    elapsed = time.perf_counter() - t0
    by_size = dict(rows)
    zero = by_size[0].avg == 0
    first = {s: by_size[s].iteration1_rate for s in range(5, 9)}
    peak = peak_size(rows)
    ok = zero and all(r >= 0.8 for r in first.values()) and 4 <= peak <= 9 and elapsed < 600
    curve = " ".join(f"{s}:{m.avg:.2f}" for s, m in rows)
    verdict(5, ok, f"avg at size 0={by_size[0].avg}, named at iteration 1 for sizes 5-8="
                   f"{[round(r, 2) for r in first.values()]}, peak size {peak}, {elapsed:.0f}s; avg {curve}")


def test_6_known_equivalence_oracles(verdict):
    api = get_api("stack")
    checks = [("clear()", "removeAllElements()"), ("pop()", "remove(size()-1)"),
              ("push(Object)", "add($0)"), ("push(Object)", "addElement($0)")]
    failed = [f"{b} vs {k}" for k, b in checks
              if not exhaustively_equivalent(parse_candidate(b, api, api.method(k)), api.method(k), api)]
    verdict(6, not failed, f"{len(checks) - len(failed)}/{len(checks)} equivalences hold on every "
                           f"state of <= 5 elements over (0, 1, 2); failing: {failed or 'none'}")


def _esg_run(out):
    cmd = [sys.executable, "-m", "esg.cli", "run", "--method", "pop()", "--seed", "7",
           "--budget", "2000", "--out", str(out)]
    return subprocess.run(cmd, capture_output=True, text=True, check=False).returncode


def test_7_determinism(verdict, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    codes = (_esg_run(a), _esg_run(b))
    files = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
    same_set = files == sorted(p.relative_to(b) for p in b.rglob("*") if p.is_file())
    differing = []
    for rel in files:
        x, y = (a / rel).read_bytes(), (b / rel).read_bytes()
        if rel.name == REPORT:
            x, y = (json.loads(z) for z in (x, y))
            x.pop("timings_ms"), y.pop("timings_ms")
        if x != y:
            differing.append(str(rel))
    ok = codes == (0, 0) and same_set and not differing and len(files) > 3
    verdict(7, ok, f"exit codes {codes}, {len(files)} files, identical set={same_set}, "
                   f"differing: {differing or 'none'}")


def test_8_heterogeneity_trend(verdict):
    api = get_api("stack")
    push = api.method("push(Object)")
    truth = shipped_truth(push)
    recall = {}
    for label, distinct in (("on", 3), ("off", 1)):
        pool = []
        for seed in range(3):
            pool += run(RunConfig(method="push(Object)", seed=seed, min_distinct=distinct))[1]
        metrics, _ = score(push, sample_sets(pool, 30, 5, 0), truth, 30, 0, LoopConfig(), api)
        recall[label] = metrics.recall
    ok = recall["on"] >= recall["off"]
    verdict(8, ok, f"push recall with heterogeneity filter {recall['on']:.2f}, "
                   f"without {recall['off']:.2f} (30 runs each)")
