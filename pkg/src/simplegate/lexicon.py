"""IBM Model 1 lexical translation table, trained with EM.

The table stores p(target word | source word) estimated from a parallel
corpus of complex and simplified sentences.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Sequence

from .corpus import DataError, surfaces

NULL = "<null>"
DEFAULT_ITERATIONS = 5
LEXICON_FORMAT_VERSION = 1


@dataclass(frozen=True)
class LexicalTable:
    prob: dict = field(repr=False)  # source -> {target: p(target | source)}
    iterations_run: int = 0
    use_null: bool = False

    def get(self, source: str, target: str) -> float:
        return self.prob.get(source, {}).get(target, 0.0)

    def to_json(self) -> dict:
        return {
            "format": "lexical_table",
            "version": LEXICON_FORMAT_VERSION,
            "iterations_run": self.iterations_run,
            "use_null": self.use_null,
            "prob": {s: dict(sorted(ts.items())) for s, ts in sorted(self.prob.items())},
        }

    @classmethod
    def from_json(cls, doc: dict) -> "LexicalTable":
        if doc.get("format") != "lexical_table":
            raise DataError("not a lexical table document")
        if doc.get("version") != LEXICON_FORMAT_VERSION:
            raise DataError(f"unsupported lexical table version {doc.get('version')!r}")
        try:
            prob = {s: {t: float(p) for t, p in ts.items()} for s, ts in doc["prob"].items()}
            return cls(prob, int(doc["iterations_run"]), bool(doc.get("use_null", False)))
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise DataError(f"malformed lexical table document: {exc}") from None


def _prepare(pairs, use_null: bool) -> list[tuple[list[str], list[str]]]:
    bitext = []
    for src, tgt in pairs:
        s, t = surfaces(src), surfaces(tgt)
        if use_null:
            s = [NULL, *s]
        if s and t:
            bitext.append((s, t))
    return bitext


def train_model1(pairs: Sequence, iterations: int = DEFAULT_ITERATIONS, use_null: bool = False) -> LexicalTable:
    """Estimate p(t|s) with ``iterations`` rounds of Model 1 EM.

    Each source word starts uniform over the target words it co-occurs with.
    Iteration order is the corpus order, so results are reproducible.
    """
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    bitext = _prepare(pairs, use_null)
    if not bitext:
        raise DataError("empty parallel corpus")

    cooc: dict[str, set] = defaultdict(set)
    for s, t in bitext:
        for sw in s:
            cooc[sw].update(t)
    prob = {sw: dict.fromkeys(sorted(ts), 1.0 / len(ts)) for sw, ts in sorted(cooc.items())}

    for _ in range(iterations):
        counts: dict[str, dict[str, float]] = {sw: dict.fromkeys(ts, 0.0) for sw, ts in prob.items()}
        for s, t in bitext:
            for tw in t:
                norm = math.fsum(prob[sw][tw] for sw in s)
                for sw in s:
                    counts[sw][tw] += prob[sw][tw] / norm
        prob = {}
        for sw, ts in counts.items():
            total = math.fsum(ts.values())
            prob[sw] = {tw: c / total for tw, c in ts.items()}

    return LexicalTable(prob, iterations, use_null)


def log_likelihood(table: LexicalTable, pairs: Sequence) -> float:
    """Model 1 corpus log-likelihood, up to the constant length term."""
    total = 0.0
    for s, t in _prepare(pairs, table.use_null):
        for tw in t:
            total += math.log(math.fsum(table.get(sw, tw) for sw in s) / len(s))
    return total


def translations_above(table: LexicalTable, source: str, tau: float) -> int:
    """Number of targets with p(t|source) >= tau; unknown words give 0."""
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"tau must be in (0, 1], got {tau}")
    return sum(1 for p in table.prob.get(source, {}).values() if p >= tau)


def avg_translations_feature(table: LexicalTable, sentence: Sequence, tau: float) -> float:
    words = surfaces(sentence)
    if not words:
        raise DataError("cannot score empty sentence")
    return sum(translations_above(table, w, tau) for w in words) / len(words)

