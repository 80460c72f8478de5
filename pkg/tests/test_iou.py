import numpy as np
import pytest
from cgleval.enums import EAggregationMode
from cgleval.exceptions import (AllClassesUndefined, ClassCountMismatch, ClassIdOutOfRange,
                                DimensionMismatch, EmptyInput)
from cgleval.iou import (ConfusionCounts, aggregate_iou, class_iou, confusion_counts, mean_iou,
                         per_class_iou, pixel_accuracy)
from conftest import label_map


def half(width=8, left=True):
    out = np.zeros((8, width), dtype=np.int64)
    if left:
        out[:, :width // 2] = 1
    else:
        out[:, width // 2:] = 1
    return out


def test_empty_prediction_against_half_ground_truth():
    counts = confusion_counts(label_map(np.zeros((8, 8))), label_map(half()))

    assert counts.tp.tolist() == [32, 0]
    assert counts.fp.tolist() == [32, 0]
    assert counts.fn.tolist() == [0, 32]
    assert per_class_iou(counts) == [0.5, 0.0]
    assert mean_iou(counts) == pytest.approx(0.25)


def test_perfect_prediction():
    gt = label_map(half())
    counts = confusion_counts(gt, gt)

    assert mean_iou(counts) == 1.0
    assert class_iou(counts, 1) == 1.0
    assert pixel_accuracy(counts) == 1.0


def test_absent_class_is_undefined_and_left_out_of_the_mean():
    zeros = label_map(np.zeros((4, 4)))
    counts = confusion_counts(zeros, zeros)

    assert class_iou(counts, 1) is None
    assert mean_iou(counts) == 1.0


def test_all_classes_undefined():
    with pytest.raises(AllClassesUndefined):
        mean_iou(ConfusionCounts.zeros(3))


def test_counts_per_class_for_three_classes():
    gt = label_map([[0, 1, 2, 2]], 3)
    pred = label_map([[0, 2, 2, 1]], 3)
    counts = confusion_counts(pred, gt)

    assert counts.tp.tolist() == [1, 0, 1]
    assert counts.fp.tolist() == [0, 1, 1]
    assert counts.fn.tolist() == [0, 1, 1]
    assert per_class_iou(counts) == [1.0, 0.0, pytest.approx(1 / 3)]
    assert pixel_accuracy(counts) == 0.5


def test_confusion_counts_checks_inputs():
    with pytest.raises(DimensionMismatch):
        confusion_counts(label_map(np.zeros((2, 2))), label_map(np.zeros((2, 3))))
    with pytest.raises(ClassCountMismatch):
        confusion_counts(label_map(np.zeros((2, 2)), 2), label_map(np.zeros((2, 2)), 3))
    with pytest.raises(ClassIdOutOfRange):
        class_iou(ConfusionCounts.zeros(2), 2)


def test_counts_merge_is_addition():
    a = confusion_counts(label_map(np.zeros((8, 8))), label_map(half()))
    b = confusion_counts(label_map(half()), label_map(half()))

    total = a + b

    assert total.tp.tolist() == [64, 32]
    assert total.total_pixels == 128
    assert a.merge(b) == b.merge(a)

    with pytest.raises(ClassCountMismatch):
        a.merge(ConfusionCounts.zeros(3))


def test_counts_from_split_image_merge_to_whole_image_counts():
    rng = np.random.default_rng(11)
    pred = rng.integers(0, 3, size=(10, 12))
    gt = rng.integers(0, 3, size=(10, 12))

    whole = confusion_counts(label_map(pred, 3), label_map(gt, 3))
    top = confusion_counts(label_map(pred[:4], 3), label_map(gt[:4], 3))
    bottom = confusion_counts(label_map(pred[4:], 3), label_map(gt[4:], 3))

    assert top + bottom == whole


def test_aggregation_modes_differ():
    gt = label_map(half())
    perfect = confusion_counts(gt, gt)
    inverted = confusion_counts(label_map(half(left=False)), gt)

    per_image = aggregate_iou([perfect, inverted], EAggregationMode.PerImage)
    merged = aggregate_iou([perfect, inverted], EAggregationMode.Global)

    assert per_image.mean_iou == pytest.approx(0.5)
    assert per_image.cgl_iou == pytest.approx(0.5)
    assert merged.mean_iou == pytest.approx(1 / 3)
    assert merged.cgl_iou == pytest.approx(1 / 3)
    assert merged.per_class_iou == (pytest.approx(1 / 3), pytest.approx(1 / 3))


def test_per_image_aggregation_skips_undefined_values():
    zeros = label_map(np.zeros((8, 8)))
    background_only = confusion_counts(zeros, zeros)
    gt = label_map(half())
    perfect = confusion_counts(gt, gt)

    report = aggregate_iou([background_only, perfect], 'per-image')

    assert report.per_class_iou == (1.0, 1.0)
    assert report.cgl_iou == 1.0
    assert report.mean_iou == 1.0


def test_aggregate_requires_input():
    with pytest.raises(EmptyInput):
        aggregate_iou([])
    with pytest.raises(ClassCountMismatch):
        aggregate_iou([ConfusionCounts.zeros(2), ConfusionCounts.zeros(3)])


def test_report_as_dict():
    gt = label_map(half())
    report = aggregate_iou([confusion_counts(gt, gt)], EAggregationMode.Global)

    assert report.as_dict() == {'per_class_iou': [1.0, 1.0],
                                'mean_iou': 1.0,
                                'cgl_iou': 1.0,
                                'aggregation_mode': 'global',
                                }


@pytest.mark.parametrize('num_classes', [2, 4, 150])
def test_counts_match_pixel_enumeration(num_classes):
    rng = np.random.default_rng(num_classes)

    for _ in range(50):
        pred = rng.integers(0, num_classes, size=(16, 16))
        gt = rng.integers(0, num_classes, size=(16, 16))
        tp = [0] * num_classes
        fp = [0] * num_classes
        fn = [0] * num_classes

        for p, g in zip(pred.ravel().tolist(), gt.ravel().tolist()):
            if p == g:
                tp[p] += 1
            else:
                fp[p] += 1
                fn[g] += 1

        counts = confusion_counts(label_map(pred, num_classes), label_map(gt, num_classes))
        assert counts == ConfusionCounts(num_classes, tp, fp, fn)


def test_identity_mean_iou_on_random_maps():
    rng = np.random.default_rng(7)

    for _ in range(100):
        data = rng.integers(0, 3, size=rng.integers(1, 129, size=2))
        lm = label_map(data, 3)

        assert mean_iou(confusion_counts(lm, lm)) == 1.0


def test_swapping_prediction_and_ground_truth():
    rng = np.random.default_rng(31)
    pred = label_map(rng.integers(0, 4, size=(12, 12)), 4)
    gt = label_map(rng.integers(0, 4, size=(12, 12)), 4)

    forward = confusion_counts(pred, gt)
    backward = confusion_counts(gt, pred)

    assert backward.tp.tolist() == forward.tp.tolist()
    assert backward.fp.tolist() == forward.fn.tolist()
    assert backward.fn.tolist() == forward.fp.tolist()
    assert per_class_iou(backward) == per_class_iou(forward)


def test_relabeling_classes_permutes_the_scores():
    rng = np.random.default_rng(32)
    pred = rng.integers(0, 4, size=(16, 16))
    gt = rng.integers(0, 4, size=(16, 16))
    perm = np.array([2, 0, 3, 1])

    before = confusion_counts(label_map(pred, 4), label_map(gt, 4))
    after = confusion_counts(label_map(perm[pred], 4), label_map(perm[gt], 4))

    ious, relabeled = per_class_iou(before), per_class_iou(after)
    for cls in range(4):
        assert relabeled[perm[cls]] == pytest.approx(ious[cls])
    assert mean_iou(after) == pytest.approx(mean_iou(before))
