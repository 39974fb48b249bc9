"""The 17 sentence-pair features and the trained resources behind them."""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import DataError, Token, is_punct, surfaces
from .freq_stats import (
    FrequencyStats,
    build_freq_stats,
    high_freq_pct,
    is_degenerate,
    low_freq_pct,
    target_presence_feature,
    words_in_corpus_pct,
)
from .lexicon import DEFAULT_ITERATIONS, LexicalTable, avg_translations_feature, train_model1
from .ngram_lm import TrigramLM, lm_feature, train_lm

log = logging.getLogger(__name__)

N_FEATURES = 17

# Column i holds feature i+1.
FEATURE_NAMES = (
    "source_tokens",
    "target_tokens",
    "source_avg_token_length",
    "source_lm_logprob",
    "target_lm_logprob",
    "target_tokens_in_target_corpus",
    "source_avg_translations_p20",
    "source_avg_translations_p10",
    "source_low_freq_unigrams_pct",
    "source_high_freq_unigrams_pct",
    "source_low_freq_bigrams_pct",
    "source_high_freq_bigrams_pct",
    "source_low_freq_trigrams_pct",
    "source_high_freq_trigrams_pct",
    "source_words_in_corpus_pct",
    "source_punctuation",
    "target_punctuation",
)

RESOURCE_FILES = {
    "source_lm": "source_lm.json",
    "target_lm": "target_lm.json",
    "lexical_table": "lexicon.json",
    "source_stats": "source_freq.json",
    "target_stats": "target_freq.json",
}
MANIFEST_FILE = "manifest.json"
RESOURCES_FORMAT_VERSION = 1


class FeatureError(DataError):
    """A feature could not be computed; ``index`` is the 1-based feature number."""

    def __init__(self, index: int, message: str):
        super().__init__(f"feature {index} ({FEATURE_NAMES[index - 1]}): {message}")
        self.index = index


class BatchError(DataError):
    def __init__(self, failures: list[tuple[int, Exception]]):
        lines = [f"row {i}: {exc}" for i, exc in failures]
        super().__init__(f"{len(failures)} row(s) failed feature extraction:\n" + "\n".join(lines))
        self.failures = failures


def dump_json(doc, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, ensure_ascii=False, indent=1, sort_keys=True)
        fh.write("\n")


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def corpus_fingerprint(pairs) -> str:
    """sha256 over the tokenized parallel corpus, one ``src\\ttgt`` line per pair."""
    h = hashlib.sha256()
    for src, tgt in pairs:
        h.update(" ".join(surfaces(src)).encode("utf-8"))
        h.update(b"\t")
        h.update(" ".join(surfaces(tgt)).encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()


@dataclass(frozen=True)
class FeatureResources:
    source_lm: TrigramLM
    target_lm: TrigramLM
    lexical_table: LexicalTable
    source_stats: FrequencyStats
    target_stats: FrequencyStats
    provenance: str = ""

    def save(self, directory, manifest_extra: dict | None = None) -> Path:
        """Write the five resource files plus ``manifest.json`` into ``directory``."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for attr, name in RESOURCE_FILES.items():
            dump_json(getattr(self, attr).to_json(), directory / name)
        manifest = {
            "format": "feature_resources",
            "version": RESOURCES_FORMAT_VERSION,
            "corpus_sha256": self.provenance,
            "files": dict(RESOURCE_FILES),
            "lexicon_iterations": self.lexical_table.iterations_run,
            "lexicon_null": self.lexical_table.use_null,
        }
        manifest.update(manifest_extra or {})
        dump_json(manifest, directory / MANIFEST_FILE)
        return directory

    @classmethod
    def load(cls, directory) -> "FeatureResources":
        directory = Path(directory)
        if not directory.is_dir():
            raise DataError(f"resource directory not found: {directory}")
        manifest_path = directory / MANIFEST_FILE
        manifest = load_json(manifest_path) if manifest_path.exists() else {}
        if manifest and manifest.get("version") != RESOURCES_FORMAT_VERSION:
            raise DataError(f"unsupported resources version {manifest.get('version')!r}")
        docs = {}
        for attr, name in RESOURCE_FILES.items():
            path = directory / name
            if not path.exists():
                raise DataError(f"missing resource file {path}")
            docs[attr] = load_json(path)
        return cls(
            source_lm=TrigramLM.from_json(docs["source_lm"]),
            target_lm=TrigramLM.from_json(docs["target_lm"]),
            lexical_table=LexicalTable.from_json(docs["lexical_table"]),
            source_stats=FrequencyStats.from_json(docs["source_stats"]),
            target_stats=FrequencyStats.from_json(docs["target_stats"]),
            provenance=manifest.get("corpus_sha256", ""),
        )


def build_resources(pairs: Sequence, iterations: int = DEFAULT_ITERATIONS, use_null: bool = False) -> FeatureResources:
    """Train every resource from one parallel corpus of (source, target) token sequences."""
    pairs = list(pairs)
    if not pairs:
        raise DataError("empty parallel corpus")
    sources = [p[0] for p in pairs]
    targets = [p[1] for p in pairs]
    return FeatureResources(
        source_lm=train_lm(sources),
        target_lm=train_lm(targets),
        lexical_table=train_model1(pairs, iterations, use_null=use_null),
        source_stats=build_freq_stats(sources, side="source"),
        target_stats=build_freq_stats(targets, side="target"),
        provenance=corpus_fingerprint(pairs),
    )


def _punct_count(tokens: Sequence) -> int:
    return sum(1 for t in tokens if (t.is_punct if isinstance(t, Token) else is_punct(t)))


def surface_features(source: Sequence, target: Sequence) -> tuple[float, float, float, float, float]:
    """Token counts, mean source token length and punctuation counts.

    Returns features 1, 2, 3, 16 and 17 in that order.
    """
    if not len(source) or not len(target):
        raise DataError("empty sentence")
    src = surfaces(source)
    f3 = sum(len(w) for w in src) / len(src)
    return (
        float(len(source)),
        float(len(target)),
        f3,
        float(_punct_count(source)),
        float(_punct_count(target)),
    )


def extract_features(res: FeatureResources, source: Sequence, target: Sequence) -> np.ndarray:
    """Compute the 17-entry feature vector for one (source, target) pair."""
    f1, f2, f3, f16, f17 = surface_features(source, target)
    computations = (
        (4, lambda: lm_feature(res.source_lm, source)),
        (5, lambda: lm_feature(res.target_lm, target)),
        (6, lambda: target_presence_feature(res.target_stats, target)),
        (7, lambda: avg_translations_feature(res.lexical_table, source, 0.2)),
        (8, lambda: avg_translations_feature(res.lexical_table, source, 0.1)),
        (9, lambda: low_freq_pct(res.source_stats, source, 1)),
        (10, lambda: high_freq_pct(res.source_stats, source, 1)),
        (11, lambda: low_freq_pct(res.source_stats, source, 2)),
        (12, lambda: high_freq_pct(res.source_stats, source, 2)),
        (13, lambda: low_freq_pct(res.source_stats, source, 3)),
        (14, lambda: high_freq_pct(res.source_stats, source, 3)),
        (15, lambda: words_in_corpus_pct(res.source_stats, source)),
    )
    values = [f1, f2, f3]
    for index, fn in computations:
        try:
            value = fn()
        except (DataError, ValueError, KeyError) as exc:
            raise FeatureError(index, str(exc)) from exc
        if not math.isfinite(value):
            raise FeatureError(index, f"non-finite value {value!r}")
        values.append(value)
    values += [f16, f17]
    for n in (2, 3):
        if is_degenerate(source, n):
            log.debug("source shorter than %d tokens; %d-gram features set to 0.0", n, n)
    return np.asarray(values, dtype=np.float64)


def extract_batch(res: FeatureResources, pairs: Sequence, threads: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Feature matrix (N x 17) and 0/1 label vector for annotated pairs.

    Rows keep the input order whatever ``threads`` is. All failing rows are
    reported together.
    """
    pairs = list(pairs)

    def one(pair):
        try:
            return extract_features(res, pair.source, pair.target), None
        except (DataError, ValueError) as exc:
            return None, exc

    if threads > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, pairs))
    else:
        results = [one(p) for p in pairs]

    failures = [(i, exc) for i, (_, exc) in enumerate(results) if exc is not None]
    if failures:
        raise BatchError(failures)
    X = np.vstack([row for row, _ in results]) if results else np.empty((0, N_FEATURES))
    y = np.asarray([p.y for p in pairs], dtype=np.int64)
    return X, y


def write_feature_csv(X: np.ndarray, y: np.ndarray, path) -> None:
    """CSV dump with header ``f1..f17,label``; labels written as Yes/No."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f{i}" for i in range(1, N_FEATURES + 1)] + ["label"])
        for row, label in zip(X, y):
            writer.writerow([repr(float(v)) for v in row] + ["Yes" if label else "No"])
