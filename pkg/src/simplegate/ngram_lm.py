"""Add-one smoothed trigram language model used for the LM score features."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .corpus import DataError, surfaces

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"

LM_FORMAT_VERSION = 1


@dataclass(frozen=True)
class TrigramLM:
    """Trigram counts over padded sentences.

    ``bigram_counts`` holds context counts: the number of times each pair
    ``(a, b)`` was followed by a predicted token, so that
    ``sum_w trigram_counts[(a, b, w)] == bigram_counts[(a, b)]``.
    ``BOS`` is never an outcome and is not in the vocabulary.
    """

    vocabulary: frozenset
    trigram_counts: dict = field(repr=False)
    bigram_counts: dict = field(repr=False)
    unigram_counts: dict = field(repr=False)

    @property
    def vocab_size(self) -> int:
        return len(self.vocabulary)

    def map_token(self, token: str) -> str:
        if token == BOS or token in self.vocabulary:
            return token
        return UNK

    def prob(self, context: tuple[str, str], word: str) -> float:
        return trigram_prob(self, context, word)

    def to_json(self) -> dict:
        return {
            "format": "trigram_lm",
            "version": LM_FORMAT_VERSION,
            "vocab": sorted(self.vocabulary),
            "unigrams": sorted([w, c] for w, c in self.unigram_counts.items()),
            "bigrams": sorted([a, b, c] for (a, b), c in self.bigram_counts.items()),
            "trigrams": sorted([a, b, w, c] for (a, b, w), c in self.trigram_counts.items()),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "TrigramLM":
        if doc.get("format") != "trigram_lm":
            raise DataError("not a trigram LM document")
        if doc.get("version") != LM_FORMAT_VERSION:
            raise DataError(f"unsupported trigram LM version {doc.get('version')!r}")
        try:
            return cls(
                vocabulary=frozenset(doc["vocab"]),
                unigram_counts={w: int(c) for w, c in doc["unigrams"]},
                bigram_counts={(a, b): int(c) for a, b, c in doc["bigrams"]},
                trigram_counts={(a, b, w): int(c) for a, b, w, c in doc["trigrams"]},
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed trigram LM document: {exc}") from None


def pad(sentence: Sequence[str]) -> list[str]:
    return [BOS, BOS, *sentence, EOS]


def train_lm(sentences: Iterable[Sequence]) -> TrigramLM:
    """Count trigrams over ``<s> <s> w1 .. wn </s>`` for every sentence.

    Empty sentences are skipped; at least one non-empty sentence is required.
    """
    tri: Counter = Counter()
    ctx: Counter = Counter()
    uni: Counter = Counter()
    seen = 0
    for sent in sentences:
        words = surfaces(sent)
        if not words:
            continue
        seen += 1
        padded = pad(words)
        uni.update(padded[2:])
        for i in range(2, len(padded)):
            tri[(padded[i - 2], padded[i - 1], padded[i])] += 1
            ctx[(padded[i - 2], padded[i - 1])] += 1
    if not seen:
        raise DataError("empty LM training corpus")
    vocab = frozenset(uni) | {EOS, UNK}
    return TrigramLM(vocab, dict(tri), dict(ctx), dict(uni))


def trigram_prob(lm: TrigramLM, context: tuple[str, str], word: str) -> float:
    """Laplace estimate (c(a, b, w) + 1) / (c(a, b) + |V|); OOV tokens map to UNK."""
    a, b = (lm.map_token(t) for t in context)
    w = lm.map_token(word)
    num = lm.trigram_counts.get((a, b, w), 0) + 1
    den = lm.bigram_counts.get((a, b), 0) + lm.vocab_size
    return num / den


def sentence_logprobs(lm: TrigramLM, sentence: Sequence) -> list[float]:
    padded = pad(surfaces(sentence))
    return [
        math.log10(trigram_prob(lm, (padded[i - 2], padded[i - 1]), padded[i]))
        for i in range(2, len(padded))
    ]


def lm_feature(lm: TrigramLM, sentence: Sequence) -> float:
    """Mean base-10 log-probability over the sentence's len+1 trigrams."""
    if not len(sentence):
        raise DataError("cannot score empty sentence")
    logs = sentence_logprobs(lm, sentence)
    return math.fsum(logs) / len(logs)
