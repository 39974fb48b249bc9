"""Agreement metrics between human and classifier labels.

The confusion matrix is oriented rows = human, columns = machine. Weighted
precision/recall/F average the per-class values by human (row) support, which
makes weighted recall identical to accuracy.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

from .corpus import NO, YES, DataError


def _as_int(label) -> int:
    if isinstance(label, str):
        if label.strip().lower() == "yes":
            return 1
        if label.strip().lower() == "no":
            return 0
        raise ValueError(f"invalid label {label!r}")
    if label in (0, 1):
        return int(label)
    raise ValueError(f"invalid label {label!r}")


@dataclass(frozen=True)
class ConfusionMatrix:
    yes_yes: int = 0
    yes_no: int = 0
    no_yes: int = 0
    no_no: int = 0

    def __post_init__(self):
        for name in ("yes_yes", "yes_no", "no_yes", "no_no"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def total(self) -> int:
        return self.yes_yes + self.yes_no + self.no_yes + self.no_no

    @property
    def human_yes(self) -> int:
        return self.yes_yes + self.yes_no

    @property
    def human_no(self) -> int:
        return self.no_yes + self.no_no

    @property
    def machine_yes(self) -> int:
        return self.yes_yes + self.no_yes

    @property
    def machine_no(self) -> int:
        return self.yes_no + self.no_no

    @property
    def agreements(self) -> int:
        return self.yes_yes + self.no_no

    @property
    def disagreements(self) -> int:
        return self.yes_no + self.no_yes


def confusion(human: Sequence, machine: Sequence) -> ConfusionMatrix:
    if len(human) != len(machine):
        raise ValueError(f"length mismatch: {len(human)} human vs {len(machine)} machine labels")
    if not len(human):
        raise ValueError("no labels to compare")
    cells = [[0, 0], [0, 0]]
    for h, m in zip(human, machine):
        cells[1 - _as_int(h)][1 - _as_int(m)] += 1
    return ConfusionMatrix(cells[0][0], cells[0][1], cells[1][0], cells[1][1])


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f_measure: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    confusion: ConfusionMatrix
    accuracy: float
    per_class: dict  # "Yes"/"No" -> ClassScores
    precision: float
    recall: float
    f_measure: float
    kappa: float
    mae: float | None = None
    rmse: float | None = None
    undefined: tuple = field(default=())

    def to_dict(self) -> dict:
        cm = self.confusion
        return {
            "confusion": {**asdict(cm), "total": cm.total, "agreements": cm.agreements, "disagreements": cm.disagreements},
            "accuracy": self.accuracy,
            "per_class": {k: asdict(v) for k, v in self.per_class.items()},
            "precision": self.precision,
            "recall": self.recall,
            "f_measure": self.f_measure,
            "kappa": self.kappa,
            "mae": self.mae,
            "rmse": self.rmse,
            "undefined": list(self.undefined),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _ratio(num: int, den: int, what: str, undefined: list) -> float:
    if den == 0:
        undefined.append(what)
        return 0.0
    return num / den


def _harmonic(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2.0 * p * r / (p + r)


def metrics(cm: ConfusionMatrix) -> EvalReport:
    """Accuracy, per-class and support-weighted P/R/F, and Cohen's kappa.

    A zero denominator yields 0.0 and is listed in ``undefined``.
    """
    n = cm.total
    if n == 0:
        raise ValueError("empty confusion matrix")
    undefined: list[str] = []
    per_class = {}
    for name, correct, row, col in (
        (YES, cm.yes_yes, cm.human_yes, cm.machine_yes),
        (NO, cm.no_no, cm.human_no, cm.machine_no),
    ):
        p = _ratio(correct, col, f"precision[{name}]", undefined)
        r = _ratio(correct, row, f"recall[{name}]", undefined)
        per_class[name] = ClassScores(p, r, _harmonic(p, r), row)

    def weighted(attr):
        return (per_class[YES].support * getattr(per_class[YES], attr)
                + per_class[NO].support * getattr(per_class[NO], attr)) / n

    p_o = cm.agreements / n
    p_e = (cm.human_yes * cm.machine_yes + cm.human_no * cm.machine_no) / (n * n)
    if p_e == 1.0:
        # both raters used one and the same label throughout
        kappa = 1.0 if p_o == 1.0 else 0.0
        undefined.append("kappa")
    else:
        kappa = (p_o - p_e) / (1.0 - p_e)
    return EvalReport(
        confusion=cm,
        accuracy=p_o,
        per_class=per_class,
        precision=weighted("precision"),
        recall=weighted("recall"),
        f_measure=weighted("f_measure"),
        kappa=kappa,
        undefined=tuple(undefined),
    )


def error_scores(truth: Sequence, scores: Sequence[float]) -> tuple[float, float]:
    """(MAE, RMSE) of scores in [0, 1] against 0/1 truth."""
    if len(truth) != len(scores):
        raise ValueError(f"length mismatch: {len(truth)} vs {len(scores)}")
    if not len(truth):
        raise ValueError("no scores to compare")
    abs_err = []
    for t, s in zip(truth, scores):
        s = float(s)
        if not 0.0 <= s <= 1.0:
            raise ValueError(f"score {s!r} outside [0, 1]")
        abs_err.append(abs(_as_int(t) - s))
    mae = math.fsum(abs_err) / len(abs_err)
    rmse = math.sqrt(math.fsum(e * e for e in abs_err) / len(abs_err))
    return mae, rmse


def report(human: Sequence, machine: Sequence, scores: Sequence[float] | None = None) -> EvalReport:
    """Full report. ``scores`` are p(Yes) values for MAE/RMSE; hard labels are used when absent."""
    cm = confusion(human, machine)
    base = metrics(cm)
    if scores is None:
        scores = [_as_int(m) for m in machine]
    mae, rmse = error_scores(human, scores)
    return EvalReport(**{**base.__dict__, "mae": mae, "rmse": rmse})


def render_confusion(cm: ConfusionMatrix) -> str:
    rows = [
        ("Human \\ Machine", "Yes", "No", "Total"),
        ("Yes", cm.yes_yes, cm.yes_no, cm.human_yes),
        ("No", cm.no_yes, cm.no_no, cm.human_no),
        ("Total", cm.machine_yes, cm.machine_no, cm.total),
    ]
    return "\n".join(f"{str(a):<16}{str(b):>7}{str(c):>7}{str(d):>7}" for a, b, c, d in rows)


def render_text(rep: EvalReport, title: str = "Human - Classifier") -> str:
    """Metrics in the usual table order followed by the confusion matrix."""
    lines = [f"{'':<22}{title}", f"{'':<22}{'3 dp':>8}{'4 dp':>10}"]
    rows = [
        ("Mean Absolute Error", rep.mae),
        ("Root Mean Square Error", rep.rmse),
        ("Kappa Statistics", rep.kappa),
        ("Precision", rep.precision),
        ("Recall", rep.recall),
        ("F-Measure", rep.f_measure),
        ("Accuracy", rep.accuracy),
    ]
    for name, value in rows:
        if value is None:
            lines.append(f"{name:<22}{'n/a':>8}{'n/a':>10}")
        else:
            lines.append(f"{name:<22}{value:>8.3f}{value:>10.4f}")
    cm = rep.confusion
    lines.append("")
    lines.append(f"Agreements {cm.agreements}, disagreements {cm.disagreements}")
    lines.append(render_confusion(cm))
    if rep.undefined:
        lines.append("undefined (reported as 0): " + ", ".join(rep.undefined))
    return "\n".join(lines)
