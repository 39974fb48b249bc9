import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from simplegate.evaluation import (
    ConfusionMatrix,
    confusion,
    error_scores,
    metrics,
    render_text,
    report,
)

NB_MATRIX = ConfusionMatrix(668, 603, 703, 1026)
SVM_MATRIX = ConfusionMatrix(516, 542, 855, 1087)


def labels_for(cm):
    """Human/machine label lists reproducing a confusion matrix."""
    human = [1] * cm.yes_yes + [1] * cm.yes_no + [0] * cm.no_yes + [0] * cm.no_no
    machine = [1] * cm.yes_yes + [0] * cm.yes_no + [1] * cm.no_yes + [0] * cm.no_no
    return human, machine


def brute_force(human, machine):
    """Metrics straight from the label lists, no confusion matrix."""
    n = len(human)
    out = {"accuracy": sum(h == m for h, m in zip(human, machine)) / n}
    per = {}
    for c in (1, 0):
        tp = sum(1 for h, m in zip(human, machine) if h == c and m == c)
        predicted = sum(1 for m in machine if m == c)
        actual = sum(1 for h in human if h == c)
        p = tp / predicted if predicted else 0.0
        r = tp / actual if actual else 0.0
        f = 2.0 * p * r / (p + r) if p + r else 0.0
        per[c] = (p, r, f, actual)
    for k, name in enumerate(("precision", "recall", "f_measure")):
        out[name] = (per[1][3] * per[1][k] + per[0][3] * per[0][k]) / n
    p_o = out["accuracy"]
    h_yes, m_yes = sum(human), sum(machine)
    p_e = (h_yes * m_yes + (n - h_yes) * (n - m_yes)) / (n * n)
    out["kappa"] = (p_o - p_e) / (1.0 - p_e) if p_e != 1.0 else (1.0 if p_o == 1.0 else 0.0)
    return out


def test_confusion_basic():
    assert confusion(["Yes", "No"], ["Yes", "No"]) == ConfusionMatrix(1, 0, 0, 1)
    assert confusion(["Yes"], ["No"]) == ConfusionMatrix(0, 1, 0, 0)
    with pytest.raises(ValueError, match="length mismatch"):
        confusion([1, 0], [1])


def test_confusion_reproduces_nb_matrix():
    human, machine = labels_for(NB_MATRIX)
    rng = random.Random(0)
    pairs = list(zip(human, machine))
    rng.shuffle(pairs)
    assert confusion(*zip(*pairs)) == NB_MATRIX


def test_nb_matrix_metrics():
    r = metrics(NB_MATRIX)
    assert r.accuracy == pytest.approx(1694 / 3000)
    assert r.recall == pytest.approx(0.5647, abs=5e-4)
    assert r.kappa == pytest.approx(0.11775, abs=5e-5)
    assert r.precision == pytest.approx(0.569, abs=1e-3)
    assert r.f_measure == pytest.approx(0.566, abs=1e-3)


def test_svm_matrix_metrics():
    r = metrics(SVM_MATRIX)
    assert r.accuracy == pytest.approx(0.53433, abs=5e-6)
    assert r.kappa == pytest.approx(0.04445, abs=5e-6)


def test_perfect_diagonal():
    r = metrics(ConfusionMatrix(10, 0, 0, 7))
    assert r.accuracy == 1.0 and r.kappa == 1.0


def test_empty_matrix_rejected():
    with pytest.raises(ValueError):
        metrics(ConfusionMatrix())


def test_all_yes_predictions_flag_no_precision():
    r = metrics(ConfusionMatrix(5, 0, 3, 0))
    assert r.per_class["No"].precision == 0.0
    assert "precision[No]" in r.undefined


small_labels = st.integers(1, 50).flatmap(
    lambda n: st.tuples(st.lists(st.sampled_from([0, 1]), min_size=n, max_size=n),
                        st.lists(st.sampled_from([0, 1]), min_size=n, max_size=n)))


def test_brute_force_equivalence_1000_vectors():
    rng = random.Random(2024)
    for _ in range(1000):
        n = rng.randint(1, 50)
        human = [rng.randint(0, 1) for _ in range(n)]
        machine = [rng.randint(0, 1) for _ in range(n)]
        r = metrics(confusion(human, machine))
        oracle = brute_force(human, machine)
        for key, value in oracle.items():
            assert getattr(r, key) == value, key


def test_matches_sklearn():
    sk = pytest.importorskip("sklearn.metrics")
    rng = random.Random(5)
    for _ in range(50):
        n = rng.randint(5, 50)
        human = [rng.randint(0, 1) for _ in range(n)]
        machine = [rng.randint(0, 1) for _ in range(n)]
        if len(set(human)) < 2 or len(set(machine)) < 2:
            continue
        r = metrics(confusion(human, machine))
        p, rec, f, _ = sk.precision_recall_fscore_support(human, machine, average="weighted", zero_division=0)
        assert r.precision == pytest.approx(p, abs=1e-12)
        assert r.recall == pytest.approx(rec, abs=1e-12)
        assert r.f_measure == pytest.approx(f, abs=1e-12)
        assert r.kappa == pytest.approx(sk.cohen_kappa_score(human, machine), abs=1e-12)


@given(small_labels)
def test_weighted_recall_is_accuracy(labels):
    r = metrics(confusion(*labels))
    assert r.recall == pytest.approx(r.accuracy, abs=1e-15)
    assert -1.0 <= r.kappa <= 1.0
    for v in (r.accuracy, r.precision, r.recall, r.f_measure):
        assert 0.0 <= v <= 1.0


@given(small_labels, st.randoms())
def test_permutation_invariance(labels, rnd):
    pairs = list(zip(*labels))
    rnd.shuffle(pairs)
    assert metrics(confusion(*labels)) == metrics(confusion(*zip(*pairs)))


@given(st.integers(0, 30), st.integers(0, 30), st.integers(0, 30), st.integers(0, 30))
def test_kappa_one_iff_no_disagreement(a, b, c, d):
    if a + b + c + d == 0:
        return
    r = metrics(ConfusionMatrix(a, b, c, d))
    assert (r.kappa == 1.0) == (b == 0 and c == 0)


@given(st.integers(1, 20), st.integers(1, 20), st.integers(1, 20), st.integers(1, 20))
def test_kappa_zero_for_outer_product(r1, r2, c1, c2):
    r = metrics(ConfusionMatrix(r1 * c1, r1 * c2, r2 * c1, r2 * c2))
    assert abs(r.kappa) < 1e-12


def test_error_scores():
    assert error_scores([1, 0], [1, 0]) == (0.0, 0.0)
    assert error_scores([1, 0], [0.5, 0.5]) == (0.5, 0.5)
    with pytest.raises(ValueError):
        error_scores([1], [1.5])
    with pytest.raises(ValueError):
        error_scores([1, 0], [1])


def test_error_scores_hard_labels_nb_matrix():
    human, machine = labels_for(NB_MATRIX)
    mae, rmse = error_scores(human, machine)
    assert mae == pytest.approx(1306 / 3000)
    assert mae == pytest.approx(0.43533, abs=5e-6)
    assert rmse == pytest.approx(0.65980, abs=5e-6)


def test_report_rendering_nb_matrix():
    human, machine = labels_for(NB_MATRIX)
    rep = report(human, machine)
    text = render_text(rep)
    rows = {line.split()[0]: line.split() for line in text.splitlines() if line.strip()}
    assert rows["Recall"][1] == "0.565"
    assert ["Yes", "668", "603", "1271"] in [line.split() for line in text.splitlines()]
    assert ["Total", "1371", "1629", "3000"] in [line.split() for line in text.splitlines()]
    doc = json.loads(rep.to_json())
    assert doc["confusion"]["agreements"] == 1694
    assert doc["mae"] == pytest.approx(1306 / 3000)


def test_report_empty_rejected():
    with pytest.raises(ValueError):
        report([], [])
