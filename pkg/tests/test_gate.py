import io
import json
import random
import sys

import numpy as np
import pytest

from simplegate.classifiers import Prediction, save_model, train_nb
from simplegate.corpus import NO, YES, DataError
from simplegate.gate import (
    CommandEngine,
    EngineError,
    GateConfig,
    MockEngine,
    Pipeline,
    decide,
    engine_from_config,
    run_pipeline,
    simplify,
    write_decisions,
)

UPPER = [sys.executable, "-c", "import sys\nfor l in sys.stdin: print(l.strip().upper())"]
DOUBLE = [sys.executable, "-c", "import sys\nfor l in sys.stdin: print(l.strip()); print(l.strip())"]
FAIL = [sys.executable, "-c", "import sys; sys.stderr.write('model not loaded'); sys.exit(4)"]
SLOW = [sys.executable, "-c", "import time; time.sleep(5)"]


class Stub:
    def __init__(self, label):
        self.label = label
        self.kind = "stub"

    def predict(self, x):
        return Prediction(self.label, 1.0 if self.label == YES else 0.0)


class Coin:
    """Deterministic pseudo-random verdict keyed on the feature vector."""

    kind = "stub"

    def predict(self, x):
        return Prediction(YES if int(sum(x) * 1000) % 2 else NO, 0.5)


class Boom:
    kind = "stub"

    def predict(self, x):
        raise RuntimeError("classifier blew up")


class FlakyEngine:
    def __init__(self, bad):
        self.bad = bad

    def translate(self, lines):
        if lines[0] == self.bad:
            raise EngineError("engine exited with status 1", "segfault")
        return [line.lower() for line in lines]


def test_mock_echo_and_table():
    assert simplify(MockEngine(), "hello") == "hello"
    assert simplify(MockEngine({"a complex sentence": "a simple sentence"}), "a complex sentence") == "a simple sentence"


def test_command_engine_roundtrip():
    assert CommandEngine(UPPER, timeout=20).translate(["ab", "cd"]) == ["AB", "CD"]


def test_command_engine_line_mismatch():
    with pytest.raises(EngineError, match="output line count mismatch"):
        simplify(CommandEngine(DOUBLE, timeout=20), "one")


def test_command_engine_failure_carries_stderr():
    with pytest.raises(EngineError, match="status 4: model not loaded") as info:
        simplify(CommandEngine(FAIL, timeout=20), "x")
    assert info.value.stderr == "model not loaded"


def test_command_engine_timeout():
    with pytest.raises(EngineError, match="timed out"):
        simplify(CommandEngine(SLOW, timeout=0.5), "x")


def test_command_engine_missing_binary():
    with pytest.raises(EngineError, match="cannot start engine"):
        simplify(CommandEngine(["/nonexistent/moses"]), "x")


def test_engine_from_config():
    assert isinstance(engine_from_config({"mock": {"a": "b"}}), MockEngine)
    eng = engine_from_config({"cmd": ["cat"], "timeout_s": 3})
    assert isinstance(eng, CommandEngine) and eng.timeout == 3.0
    with pytest.raises(DataError):
        engine_from_config({"other": 1})


def test_decide_routes_by_label(house_resources):
    yes = decide(house_resources, Stub(YES), "the house", "das haus")
    assert yes.routed_is_simplified and yes.routed == "das haus"
    no = decide(house_resources, Stub(NO), "the house", "das haus")
    assert not no.routed_is_simplified and no.routed == "the house"


def test_decide_identical_sentences(house_resources):
    d = decide(house_resources, Stub(YES), "the house", "the house")
    assert d.prediction is not None and d.routed_is_simplified


def test_decide_empty_simplification(house_resources):
    d = decide(house_resources, Stub(YES), "the house", "   ")
    assert d.routed == "the house" and not d.routed_is_simplified
    assert d.flags == ("engine returned empty",)


def _check_invariant(d):
    assert d.routed in (d.original, d.simplified)
    if d.prediction is None:
        assert not d.routed_is_simplified
    else:
        assert d.routed_is_simplified == (d.prediction.label == YES)
    assert (d.routed == d.simplified and d.routed_is_simplified) or (d.routed == d.original and not d.routed_is_simplified)


def random_sentences(n, seed):
    rng = random.Random(seed)
    words = "the house is big small red city river month year with days of".split()
    return [" ".join(rng.choice(words) for _ in range(rng.randint(1, 9))) + rng.choice(["", ".", " ,"]) for _ in range(n)]


def test_routing_invariant_randomized(toy_resources):
    sentences = random_sentences(100, 1)
    table = {s: " ".join(s.split()[: max(1, len(s.split()) // 2)]) for s in sentences[::2]}
    pipe = Pipeline(toy_resources, Coin(), MockEngine(table))
    decisions, summary = run_pipeline(pipe, sentences)
    assert len(decisions) == 100
    for d in decisions:
        _check_invariant(d)
    assert summary.routed_simplified + summary.routed_original == 100


def test_pipeline_always_yes(toy_resources):
    decisions, summary = run_pipeline(Pipeline(toy_resources, Stub(YES), MockEngine()), ["a b", "c d", "e f"])
    assert all(d.routed_is_simplified for d in decisions)
    assert (summary.total, summary.routed_simplified) == (3, 3)


def test_engine_failure_is_contained(toy_resources):
    pipe = Pipeline(toy_resources, Stub(YES), FlakyEngine("Second One"))
    decisions, summary = run_pipeline(pipe, ["First One", "Second One", "Third One"])
    assert [d.routed for d in decisions] == ["first one", "Second One", "third one"]
    assert decisions[1].flags and "engine error" in decisions[1].flags[0]
    assert not decisions[0].flags and not decisions[2].flags
    assert summary.failures == 1


def test_classifier_failure_is_contained(toy_resources):
    decisions, summary = run_pipeline(Pipeline(toy_resources, Boom(), MockEngine()), ["a b", "c"])
    assert all(d.routed == d.original and d.flags for d in decisions)
    assert summary.failures == 2


def test_external_engine_in_pipeline(toy_resources):
    pipe = Pipeline(toy_resources, Stub(YES), CommandEngine(UPPER, timeout=20))
    decisions, _ = run_pipeline(pipe, ["abc def"])
    assert decisions[0].routed == "ABC DEF"


def test_empty_stream(toy_resources):
    decisions, summary = run_pipeline(Pipeline(toy_resources, Stub(YES), MockEngine()), [])
    assert decisions == [] and summary.total == 0 and summary.failures == 0


def test_worker_pool_preserves_order(toy_resources):
    sentences = random_sentences(40, 2)
    serial, _ = run_pipeline(Pipeline(toy_resources, Coin(), MockEngine()), sentences)
    pooled, _ = run_pipeline(Pipeline(toy_resources, Coin(), MockEngine(), workers=4), sentences)
    assert serial == pooled


def test_translator_slot(toy_resources):
    pipe = Pipeline(toy_resources, Stub(NO), MockEngine(), translator=MockEngine({"a b": "ए बी"}))
    decisions, _ = run_pipeline(pipe, ["a b"])
    assert decisions[0].translation == "ए बी"


def test_config_and_output(tmp_path, toy_resources):
    toy_resources.save(tmp_path / "res")
    save_model(train_nb(np.eye(17)[:4] * [[1], [2], [3], [4]], [1, 0, 1, 0]), tmp_path / "nb.json")
    cfg_path = tmp_path / "gate.json"
    cfg_path.write_text(json.dumps({
        "simplifier": {"mock": {"a long sentence here .": "a sentence ."}},
        "classifier_model": "nb.json",
        "resources": "res",
        "timeout_s": 5,
    }))
    cfg = GateConfig.load(cfg_path)
    decisions, summary = run_pipeline(cfg, ["a long sentence here .", "other"])
    buf = io.StringIO()
    write_decisions(decisions, summary, buf)
    lines = [json.loads(line) for line in buf.getvalue().splitlines()]
    assert len(lines) == 3
    assert lines[-1]["summary"]["total"] == 2
    assert set(lines[0]) >= {"original", "simplified", "prediction", "routed", "routed_is_simplified", "flags"}


def test_config_missing_model(tmp_path, toy_resources):
    toy_resources.save(tmp_path / "res")
    cfg_path = tmp_path / "gate.json"
    cfg_path.write_text(json.dumps({"simplifier": None, "classifier_model": "nope.json", "resources": "res"}))
    with pytest.raises(DataError):
        run_pipeline(GateConfig.load(cfg_path), ["x"])
