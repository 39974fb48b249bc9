"""Simplify, classify, route.

A sentence goes through the simplification engine; the classifier judges the
(original, simplified) pair; the simplified sentence is forwarded only on a
Yes, otherwise the original is. Engines are external line-oriented commands
or an in-process mock table.
"""

from __future__ import annotations

import json
import logging
import shutil
import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .classifiers import Prediction, load_model
from .corpus import YES, DataError, tokenize
from .features import FeatureResources, extract_features

log = logging.getLogger(__name__)

DEFAULT_TIMEOUT_S = 30.0
STDERR_EXCERPT = 400


class EngineError(RuntimeError):
    def __init__(self, message: str, stderr: str = ""):
        excerpt = stderr.strip()[-STDERR_EXCERPT:]
        super().__init__(f"{message}: {excerpt}" if excerpt else message)
        self.stderr = excerpt


class MockEngine:
    """Looks sentences up in a table; anything missing is echoed back."""

    kind = "mock"

    def __init__(self, table: dict | None = None):
        self.table = dict(table or {})

    def translate(self, lines: Sequence[str]) -> list[str]:
        return [self.table.get(line, line) for line in lines]


class CommandEngine:
    """Runs an external command, one sentence per stdin line, one output line each."""

    kind = "external-command"

    def __init__(self, cmd: Sequence[str], timeout: float = DEFAULT_TIMEOUT_S):
        if not cmd:
            raise ValueError("empty engine command")
        self.cmd = list(cmd)
        self.timeout = timeout

    def translate(self, lines: Sequence[str]) -> list[str]:
        lines = [line.replace("\n", " ").replace("\r", " ") for line in lines]
        payload = "".join(line + "\n" for line in lines)
        try:
            proc = subprocess.run(
                self.cmd,
                input=payload,
                capture_output=True,
                text=True,
                encoding="utf-8",
                timeout=self.timeout,
            )
        except subprocess.TimeoutExpired as exc:
            stderr = exc.stderr.decode("utf-8", "replace") if isinstance(exc.stderr, bytes) else (exc.stderr or "")
            raise EngineError(f"engine timed out after {self.timeout:g}s", stderr) from None
        except OSError as exc:
            raise EngineError(f"cannot start engine {self.cmd[0]!r}: {exc.strerror or exc}") from None
        if proc.returncode != 0:
            raise EngineError(f"engine exited with status {proc.returncode}", proc.stderr)
        out = proc.stdout.splitlines()
        if len(out) != len(lines):
            raise EngineError(f"output line count mismatch: sent {len(lines)}, got {len(out)}", proc.stderr)
        return out


def engine_from_config(doc: dict | None, timeout: float = DEFAULT_TIMEOUT_S):
    """``{"cmd": [...]}`` or ``{"mock": {...}}``; None means a pass-through mock."""
    if doc is None:
        return MockEngine()
    if "cmd" in doc:
        cmd = doc["cmd"]
        if isinstance(cmd, str):
            cmd = cmd.split()
        # fail at startup rather than flagging every sentence of the stream
        if not cmd or shutil.which(cmd[0]) is None:
            raise EngineError(f"engine not found: {cmd[0] if cmd else '(empty command)'}")
        return CommandEngine(cmd, float(doc.get("timeout_s", timeout)))
    if "mock" in doc:
        return MockEngine(doc["mock"] or {})
    raise DataError("engine config needs a 'cmd' or 'mock' entry")


def simplify(engine, sentence: str) -> str:
    return engine.translate([sentence])[0]


@dataclass(frozen=True)
class GateDecision:
    original: str
    simplified: str
    prediction: Prediction | None
    routed: str
    routed_is_simplified: bool
    flags: tuple = ()
    translation: str | None = None

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["flags"] = list(self.flags)
        return doc


def _fallback(original: str, simplified: str, flag: str) -> GateDecision:
    return GateDecision(original, simplified, None, original, False, (flag,))


def decide(resources: FeatureResources, model, original: str, simplified: str) -> GateDecision:
    """Classify one pair and pick the sentence to forward."""
    if not simplified or not simplified.strip():
        return _fallback(original, simplified or "", "engine returned empty")
    src, tgt = tokenize(original), tokenize(simplified)
    if not src:
        return _fallback(original, simplified, "empty original")
    x = extract_features(resources, src, tgt)
    pred = model.predict(x)
    use_simplified = pred.label == YES
    return GateDecision(
        original=original,
        simplified=simplified,
        prediction=pred,
        routed=simplified if use_simplified else original,
        routed_is_simplified=use_simplified,
    )


@dataclass
class GateSummary:
    total: int = 0
    routed_simplified: int = 0
    routed_original: int = 0
    failures: int = 0

    def add(self, decision: GateDecision) -> None:
        self.total += 1
        if decision.routed_is_simplified:
            self.routed_simplified += 1
        else:
            self.routed_original += 1
        if decision.flags:
            self.failures += 1

    def to_dict(self) -> dict:
        return {"summary": asdict(self)}


@dataclass
class GateConfig:
    simplifier: dict | None
    classifier_model: str
    resources: str
    timeout_s: float = DEFAULT_TIMEOUT_S
    translator: dict | None = None
    workers: int = 1

    @classmethod
    def load(cls, path) -> "GateConfig":
        path = Path(path)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise DataError(f"config not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: invalid JSON ({exc.msg})") from None
        try:
            cfg = cls(
                simplifier=doc.get("simplifier"),
                classifier_model=doc["classifier_model"],
                resources=doc["resources"],
                timeout_s=float(doc.get("timeout_s", DEFAULT_TIMEOUT_S)),
                translator=doc.get("translator"),
                workers=int(doc.get("workers", 1)),
            )
        except KeyError as exc:
            raise DataError(f"{path}: missing config key {exc}") from None
        # relative paths resolve against the config file
        base = path.parent
        cfg.classifier_model = str(base / cfg.classifier_model)
        cfg.resources = str(base / cfg.resources)
        return cfg


class Pipeline:
    def __init__(self, resources: FeatureResources, model, simplifier, translator=None, workers: int = 1):
        self.resources = resources
        self.model = model
        self.simplifier = simplifier
        self.translator = translator
        self.workers = max(1, workers)
        self.summary = GateSummary()

    @classmethod
    def from_config(cls, cfg: GateConfig) -> "Pipeline":
        resources = FeatureResources.load(cfg.resources)
        model = load_model(cfg.classifier_model)
        simplifier = engine_from_config(cfg.simplifier, cfg.timeout_s)
        translator = engine_from_config(cfg.translator, cfg.timeout_s) if cfg.translator else None
        return cls(resources, model, simplifier, translator, cfg.workers)

    def process(self, sentence: str) -> GateDecision:
        """Never raises for per-sentence trouble; failures route the original."""
        try:
            simplified = simplify(self.simplifier, sentence)
        except EngineError as exc:
            log.warning("simplifier failed: %s", exc)
            return _fallback(sentence, "", f"engine error: {exc}")
        try:
            decision = decide(self.resources, self.model, sentence, simplified)
        except Exception as exc:  # noqa: BLE001 - one bad sentence must not stop the stream
            log.warning("classification failed: %s", exc)
            return _fallback(sentence, simplified, f"classifier error: {exc}")
        if self.translator is not None:
            try:
                translation = simplify(self.translator, decision.routed)
            except EngineError as exc:
                return GateDecision(**{**decision.__dict__, "flags": decision.flags + (f"translator error: {exc}",)})
            decision = GateDecision(**{**decision.__dict__, "translation": translation})
        return decision

    def run(self, sentences: Iterable[str]) -> Iterator[GateDecision]:
        """Decisions in input order; ``self.summary`` is filled as they are yielded."""
        # reset in place: callers may hold a reference taken before iteration
        self.summary.__init__()
        if self.workers > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                for decision in pool.map(self.process, sentences):
                    self.summary.add(decision)
                    yield decision
        else:
            for sentence in sentences:
                decision = self.process(sentence)
                self.summary.add(decision)
                yield decision


def run_pipeline(config: GateConfig | Pipeline, sentences: Iterable[str]) -> tuple[list[GateDecision], GateSummary]:
    """Run a whole stream. Startup problems (missing model or resources) raise."""
    pipeline = config if isinstance(config, Pipeline) else Pipeline.from_config(config)
    decisions = list(pipeline.run(sentences))
    return decisions, pipeline.summary


def write_decisions(decisions: Iterable[GateDecision], summary: GateSummary, fh) -> None:
    for d in decisions:
        fh.write(json.dumps(d.to_dict(), ensure_ascii=False, sort_keys=True) + "\n")
    fh.write(json.dumps(summary.to_dict(), sort_keys=True) + "\n")
