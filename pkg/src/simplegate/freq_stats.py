"""N-gram frequency tables with quartile cut-offs.

Low-frequency n-grams are those whose corpus count is at or below the first
quartile of the distinct n-gram counts, high-frequency ones at or above the
third quartile. Unseen n-grams have count 0: always low, never high.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .corpus import DataError, surfaces

ORDERS = (1, 2, 3)
FREQ_FORMAT_VERSION = 1


def ngrams(words: Sequence[str], n: int) -> list[tuple[str, ...]]:
    return [tuple(words[i:i + n]) for i in range(len(words) - n + 1)]


def nearest_rank(values: Sequence[int], pct: int) -> int:
    """Nearest-rank percentile: the value at rank ceil(pct/100 * m), 1-based.

    An empty sample yields 0.
    """
    m = len(values)
    if m == 0:
        return 0
    rank = max(1, -(-pct * m // 100))
    return sorted(values)[rank - 1]


@dataclass(frozen=True)
class FrequencyStats:
    counts: dict = field(repr=False)  # n -> {ngram tuple: count}
    q1: dict = field(default_factory=dict)
    q3: dict = field(default_factory=dict)
    side: str = "source"

    @property
    def degenerate_orders(self) -> list[int]:
        """Orders with no n-grams at all, whose quartiles default to 0."""
        return [n for n in ORDERS if not self.counts[n]]

    def count(self, gram: tuple[str, ...]) -> int:
        return self.counts[len(gram)].get(gram, 0)

    def to_json(self) -> dict:
        return {
            "format": "frequency_stats",
            "version": FREQ_FORMAT_VERSION,
            "side": self.side,
            "q1": {str(n): self.q1[n] for n in ORDERS},
            "q3": {str(n): self.q3[n] for n in ORDERS},
            "degenerate_orders": self.degenerate_orders,
            "counts": {
                str(n): sorted([list(g), c] for g, c in self.counts[n].items()) for n in ORDERS
            },
        }

    @classmethod
    def from_json(cls, doc: dict) -> "FrequencyStats":
        if doc.get("format") != "frequency_stats":
            raise DataError("not a frequency stats document")
        if doc.get("version") != FREQ_FORMAT_VERSION:
            raise DataError(f"unsupported frequency stats version {doc.get('version')!r}")
        try:
            counts = {n: {tuple(g): int(c) for g, c in doc["counts"][str(n)]} for n in ORDERS}
            q1 = {n: int(doc["q1"][str(n)]) for n in ORDERS}
            q3 = {n: int(doc["q3"][str(n)]) for n in ORDERS}
            return cls(counts, q1, q3, doc.get("side", "source"))
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed frequency stats document: {exc}") from None


def build_freq_stats(corpus: Iterable[Sequence], side: str = "source") -> FrequencyStats:
    counts = {n: Counter() for n in ORDERS}
    seen = 0
    for sent in corpus:
        words = surfaces(sent)
        if not words:
            continue
        seen += 1
        for n in ORDERS:
            counts[n].update(ngrams(words, n))
    if not seen:
        raise DataError("empty frequency corpus")
    q1 = {n: nearest_rank(list(counts[n].values()), 25) for n in ORDERS}
    q3 = {n: nearest_rank(list(counts[n].values()), 75) for n in ORDERS}
    return FrequencyStats({n: dict(c) for n, c in counts.items()}, q1, q3, side)


def is_degenerate(sentence: Sequence, n: int) -> bool:
    return len(sentence) < n


def _pct(stats: FrequencyStats, sentence: Sequence, n: int, predicate) -> float:
    if n not in ORDERS:
        raise ValueError(f"n must be one of {ORDERS}, got {n}")
    grams = ngrams(surfaces(sentence), n)
    if not grams:
        return 0.0
    hits = sum(1 for g in grams if predicate(stats.count(g)))
    return 100.0 * hits / len(grams)


def low_freq_pct(stats: FrequencyStats, sentence: Sequence, n: int) -> float:
    """Percentage of the sentence's n-grams with corpus count <= Q1.

    A sentence shorter than ``n`` has no n-grams and scores 0.0; check
    :func:`is_degenerate` to tell that apart from a genuine zero.
    """
    q1 = stats.q1[n] if n in stats.q1 else 0
    return _pct(stats, sentence, n, lambda c: c <= q1)


def high_freq_pct(stats: FrequencyStats, sentence: Sequence, n: int) -> float:
    q3 = stats.q3[n] if n in stats.q3 else 0
    return _pct(stats, sentence, n, lambda c: c >= 1 and c >= q3)


def _present(stats: FrequencyStats, sentence: Sequence) -> tuple[int, int]:
    words = surfaces(sentence)
    if not words:
        raise DataError("cannot score empty sentence")
    return sum(1 for w in words if stats.counts[1].get((w,), 0) >= 1), len(words)


def words_in_corpus_pct(stats: FrequencyStats, sentence: Sequence) -> float:
    present, total = _present(stats, sentence)
    return 100.0 * present / total


def target_presence_feature(stats_target: FrequencyStats, sentence: Sequence) -> float:
    """Fraction (not percentage) of target tokens seen in the target corpus."""
    present, total = _present(stats_target, sentence)
    return present / total
