import pytest
from hypothesis import given
from hypothesis import strategies as st

from drive_snn.metrics import ConfusionMatrix, auc_rank, confusion, roc_auc, roc_curve, trapezoid_area

from _oracles import auc_brute_force


def test_confusion_perfect():
    cm = confusion([1, 0, 1], [1, 0, 1])
    assert (cm.tp, cm.tn, cm.fp, cm.fn) == (2, 1, 0, 0)
    assert cm.accuracy == 1.0


def test_confusion_all_wrong():
    cm = confusion([0, 1], [1, 0])
    assert (cm.tp, cm.tn, cm.accuracy) == (0, 0, 0.0)


def test_confusion_length_mismatch():
    with pytest.raises(ValueError):
        confusion([0, 1], [0])


def test_reference_counts_accuracy():
    cm = ConfusionMatrix(tp=195, tn=216, fp=9, fn=5)
    assert cm.total == 425
    assert cm.accuracy == 411 / 425
    assert round(cm.accuracy, 4) == 0.9671


def test_auc_perfect_and_ties():
    assert auc_rank([0, 0, 1, 1], [0.1, 0.2, 0.8, 0.9]) == 1.0
    assert auc_rank([0, 1, 0, 1], [0.4] * 4) == 0.5


def test_auc_hand_example():
    labels = [1, 1, 0, 0]
    scores = [0.9, 0.4, 0.6, 0.1]
    assert auc_rank(labels, scores) == 0.75
    assert auc_brute_force(labels, scores) == 0.75


def test_auc_single_class():
    with pytest.raises(ValueError):
        auc_rank([1, 1], [0.3, 0.4])


def test_roc_endpoints():
    pts = roc_curve([0, 1, 0, 1], [0.2, 0.7, 0.5, 0.5])
    assert pts[0] == (0.0, 0.0) and pts[-1] == (1.0, 1.0)
    xs, ys = zip(*pts)
    assert list(xs) == sorted(xs) and list(ys) == sorted(ys)


binary_case = st.integers(2, 50).flatmap(
    lambda n: st.tuples(
        st.lists(st.integers(0, 1), min_size=n, max_size=n).filter(lambda l: 0 < sum(l) < len(l)),
        st.lists(st.sampled_from([0.0, 0.1, 0.25, 0.5, 0.6, 0.9, 1.0]) | st.floats(0, 1), min_size=n, max_size=n),
    )
)


@given(binary_case)
def test_auc_equals_trapezoid(case):
    labels, scores = case
    roc = roc_auc(labels, scores)
    assert abs(roc.auc - trapezoid_area(roc.points)) <= 1e-12
    assert 0.0 <= roc.auc <= 1.0


@given(binary_case)
def test_auc_invariant_under_increasing_transform(case):
    labels, scores = case
    transformed = [3.0 * s**3 + 1.0 for s in scores]
    # the cube can merge distinct floats; compare only when ordering is preserved
    if len(set(transformed)) == len(set(scores)):
        assert auc_rank(labels, transformed) == auc_rank(labels, scores)


@given(binary_case, st.randoms())
def test_confusion_permutation_invariant(case, rnd):
    labels, scores = case
    preds = [int(s >= 0.5) for s in scores]
    idx = list(range(len(labels)))
    rnd.shuffle(idx)
    assert confusion(labels, preds) == confusion([labels[i] for i in idx], [preds[i] for i in idx])
