"""Tokenization, annotated-pair I/O and corpus statistics."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

PUNCTUATION = frozenset('.,;:!?"\'()[]-—/')

YES = "Yes"
NO = "No"


class DataError(ValueError):
    """Raised for malformed input files or records."""


@dataclass(frozen=True)
class Token:
    surface: str
    is_punct: bool

    def __str__(self) -> str:
        return self.surface


def is_punct(surface: str) -> bool:
    return bool(surface) and all(ch in PUNCTUATION for ch in surface)


def tokenize(text: str) -> tuple[Token, ...]:
    """Split ``text`` into lowercased tokens.

    Whitespace separates chunks; punctuation characters at either edge of a
    chunk are peeled off as single-character tokens. Punctuation inside a
    word (``solomon's``, ``well-known``) stays attached.
    """
    tokens: list[Token] = []
    for chunk in text.split():
        start, end = 0, len(chunk)
        while start < end and chunk[start] in PUNCTUATION:
            start += 1
        while end > start and chunk[end - 1] in PUNCTUATION:
            end -= 1
        tokens.extend(Token(ch, True) for ch in chunk[:start])
        if start < end:
            tokens.append(Token(chunk[start:end].lower(), False))
        tokens.extend(Token(ch, True) for ch in chunk[end:])
    return tuple(tokens)


def surfaces(tokens: Iterable[Token | str]) -> list[str]:
    return [t.surface if isinstance(t, Token) else t for t in tokens]


def detokenize(tokens: Iterable[Token | str]) -> str:
    return " ".join(surfaces(tokens))


def parse_label(value) -> str:
    """Canonicalize a label read from disk; case-insensitive."""
    if isinstance(value, str):
        folded = value.strip().lower()
        if folded == "yes":
            return YES
        if folded == "no":
            return NO
    raise DataError(f"invalid label {value!r}")


def label_to_int(label: str) -> int:
    return 1 if parse_label(label) == YES else 0


def int_to_label(value: int) -> str:
    return YES if value else NO


@dataclass(frozen=True)
class AnnotatedPair:
    """One row of the annotation table: complex sentence, its simplification
    and the human verdict on whether the simplification is acceptable."""

    source: tuple[Token, ...]
    target: tuple[Token, ...]
    label: str
    source_text: str = ""
    target_text: str = ""

    @classmethod
    def from_text(cls, source: str, target: str, label) -> "AnnotatedPair":
        src, tgt = tokenize(source), tokenize(target)
        if not src:
            raise DataError("empty source sentence")
        if not tgt:
            raise DataError("empty target sentence")
        return cls(src, tgt, parse_label(label), source, target)

    @property
    def y(self) -> int:
        return 1 if self.label == YES else 0


def load_annotated(path) -> list[AnnotatedPair]:
    """Read annotated pairs from a JSONL file (one object per line).

    Blank lines are skipped. Errors carry the 1-based line number.
    """
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"malformed JSON at line {lineno}: {exc.msg}") from None
            if not isinstance(record, dict):
                raise DataError(f"malformed record at line {lineno}: expected an object")
            for key in ("source", "target", "label"):
                if key not in record:
                    raise DataError(f"missing field {key!r} at line {lineno}")
            if not isinstance(record["source"], str) or not isinstance(record["target"], str):
                raise DataError(f"malformed record at line {lineno}: sentences must be strings")
            try:
                label = parse_label(record["label"])
            except DataError:
                raise DataError(f"invalid label at line {lineno}: {record['label']!r}") from None
            try:
                pairs.append(AnnotatedPair.from_text(record["source"], record["target"], label))
            except DataError as exc:
                raise DataError(f"{exc} at line {lineno}") from None
    return pairs


def load_tsv(path) -> list[AnnotatedPair]:
    """Read the three-column tab-separated layout: source, target, label."""
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise DataError(f"expected 3 tab-separated columns at line {lineno}, got {len(cols)}")
            try:
                label = parse_label(cols[2])
            except DataError:
                raise DataError(f"invalid label at line {lineno}: {cols[2]!r}") from None
            try:
                pairs.append(AnnotatedPair.from_text(cols[0], cols[1], label))
            except DataError as exc:
                raise DataError(f"{exc} at line {lineno}") from None
    return pairs


def write_annotated(pairs: Iterable[AnnotatedPair], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for pair in pairs:
            source = pair.source_text or detokenize(pair.source)
            target = pair.target_text or detokenize(pair.target)
            record = {"source": source, "target": target, "label": pair.label}
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def read_lines(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [line.rstrip("\r\n") for line in fh]


def read_parallel(source_path, target_path) -> list[tuple[tuple[Token, ...], tuple[Token, ...]]]:
    """Load a line-aligned parallel corpus as tokenized sentence pairs.

    Lines empty on both sides are dropped; a line empty on only one side is an
    alignment error.
    """
    src_lines = read_lines(source_path)
    tgt_lines = read_lines(target_path)
    if len(src_lines) != len(tgt_lines):
        raise DataError(f"alignment mismatch {len(src_lines)}≠{len(tgt_lines)}")
    pairs = []
    for lineno, (s, t) in enumerate(zip(src_lines, tgt_lines), 1):
        src, tgt = tokenize(s), tokenize(t)
        if not src and not tgt:
            continue
        if not src or not tgt:
            raise DataError(f"one-sided empty sentence at line {lineno}")
        pairs.append((src, tgt))
    return pairs


def file_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass(frozen=True)
class CorpusStats:
    sentence_count: int = 0
    word_count_source: int = 0
    word_count_target: int = 0
    unique_words_source: int = 0
    unique_words_target: int = 0

    def as_dict(self) -> dict:
        return {
            "sentences": self.sentence_count,
            "words": [self.word_count_source, self.word_count_target],
            "unique_words": [self.unique_words_source, self.unique_words_target],
        }


def corpus_stats(pairs: Iterable) -> CorpusStats:
    """Sentence, token and type counts per side.

    Accepts AnnotatedPair objects or plain ``(source_tokens, target_tokens)``
    tuples.
    """
    n = ws = wt = 0
    vs: set[str] = set()
    vt: set[str] = set()
    for pair in pairs:
        if isinstance(pair, AnnotatedPair):
            src, tgt = pair.source, pair.target
        else:
            src, tgt = pair[0], pair[1]
        src, tgt = surfaces(src), surfaces(tgt)
        n += 1
        ws += len(src)
        wt += len(tgt)
        vs.update(src)
        vt.update(tgt)
    return CorpusStats(n, ws, wt, len(vs), len(vt))


def split(pairs: Sequence, test_fraction: float, seed: int = 13) -> tuple[list, list]:
    """Deterministic shuffled train/test split.

    The test side gets ``round(test_fraction * N)`` items (halves round up).
    Both parts keep the original relative order.
    """
    if not 0.0 <= test_fraction <= 1.0:
        raise ValueError(f"test_fraction must be in [0, 1], got {test_fraction}")
    n = len(pairs)
    n_test = int(math.floor(test_fraction * n + 0.5))
    order = np.random.default_rng(seed).permutation(n)
    test_idx = set(int(i) for i in order[:n_test])
    train = [p for i, p in enumerate(pairs) if i not in test_idx]
    test = [p for i, p in enumerate(pairs) if i in test_idx]
    return train, test
