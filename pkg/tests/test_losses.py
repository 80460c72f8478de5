import math
import numpy as np
import pytest
from cgleval.exceptions import ClassIdOutOfRange, DimensionMismatch, InvalidParameter
from cgleval.losses import (LossWeights, argmax_label_map, combined_loss, multitask_loss,
                            pixel_cross_entropy)
from cgleval.masks import LabelMap


def test_uniform_logits_give_log_k():
    gt = LabelMap(np.array([[0, 1], [2, 3]]), 4)

    assert pixel_cross_entropy(np.zeros((4, 2, 2)), gt) == pytest.approx(math.log(4))


def test_known_probability():
    logits = np.zeros((2, 1, 1))
    logits[1, 0, 0] = math.log(3.0)
    gt = LabelMap(np.array([[1]]), 2)

    assert pixel_cross_entropy(logits, gt) == pytest.approx(-math.log(0.75))


def test_loss_is_mean_over_positions():
    logits = np.zeros((2, 1, 2))
    logits[1, 0, 0] = math.log(3.0)
    gt = LabelMap(np.array([[1, 0]]), 2)

    expected = (-math.log(0.75) - math.log(0.5)) / 2
    assert pixel_cross_entropy(logits, gt) == pytest.approx(expected)


def test_shift_invariance_and_large_logits():
    rng = np.random.default_rng(0)
    logits = rng.standard_normal((3, 4, 5))
    gt = LabelMap(rng.integers(0, 3, size=(4, 5)), 3)

    base = pixel_cross_entropy(logits, gt)
    shifted = pixel_cross_entropy(logits + 1000.0 + rng.standard_normal((1, 4, 5)), gt)

    assert shifted == pytest.approx(base)
    assert math.isfinite(pixel_cross_entropy(logits * 1000.0, gt))


def test_confident_correct_prediction_is_near_zero():
    gt = LabelMap(np.array([[0, 1]]), 2)
    logits = np.array([[[50.0, -50.0]], [[-50.0, 50.0]]])

    assert 0.0 <= pixel_cross_entropy(logits, gt) < 1e-12


def test_cross_entropy_checks_inputs():
    with pytest.raises(DimensionMismatch):
        pixel_cross_entropy(np.zeros((2, 3, 3)), LabelMap(np.zeros((3, 4), dtype=np.int64), 2))

    gt = np.zeros((2, 2), dtype=np.int64)
    gt[1, 0] = 4
    with pytest.raises(ClassIdOutOfRange) as info:
        pixel_cross_entropy(np.zeros((2, 2, 2)), LabelMap(gt, 5))
    assert info.value.position == (1, 0)

    with pytest.raises(InvalidParameter):
        pixel_cross_entropy(np.zeros((2, 2)), LabelMap(np.zeros((2, 2), dtype=np.int64), 2))


def test_combined_loss():
    assert combined_loss(0.5, 2.0, LossWeights()) == 2.5
    assert combined_loss(0.5, 2.0, LossWeights(alpha=2.0, beta=0.25)) == 1.5
    assert combined_loss(0.5, 2.0, LossWeights(beta=0.0)) == 0.5

    with pytest.raises(InvalidParameter):
        LossWeights(alpha=-1.0)
    with pytest.raises(InvalidParameter):
        LossWeights(beta=float('nan'))


def test_multitask_loss():
    gt_cgl = LabelMap(np.array([[0, 1]]), 2)
    gt_ss = LabelMap(np.array([[2, 0, 1]]), 3)

    loss = multitask_loss(np.zeros((2, 1, 2)), gt_cgl, np.zeros((3, 1, 3)), gt_ss,
                          LossWeights(alpha=1.0, beta=0.5))

    assert loss.l_cgl == pytest.approx(math.log(2))
    assert loss.l_ss == pytest.approx(math.log(3))
    assert loss.total == pytest.approx(math.log(2) + 0.5 * math.log(3))


def test_argmax_label_map():
    logits = np.array([[[1.0, 0.0, 2.0]],
                       [[1.0, 3.0, 0.0]]])

    assert argmax_label_map(logits) == LabelMap(np.array([[0, 1, 0]]), 2)


@pytest.mark.parametrize('num_classes', [2, 150])
def test_uniform_logits_exact(num_classes):
    gt = LabelMap(np.random.default_rng(0).integers(0, num_classes, size=(6, 5)), num_classes)

    loss = pixel_cross_entropy(np.zeros((num_classes, 6, 5)), gt)

    assert abs(loss - math.log(num_classes)) < 1e-12


def test_combined_loss_is_bilinear():
    weights = LossWeights(alpha=0.5, beta=2.0)

    assert combined_loss(2.0 * 3.0, 0.0, weights) == 2.0 * combined_loss(3.0, 0.0, weights)
    assert combined_loss(1.0, 4.0, weights) == combined_loss(1.0, 0.0, weights) + combined_loss(0.0, 4.0, weights)


def test_seeded_logits_match_per_position_oracle():
    rng = np.random.default_rng(43)
    logits = rng.standard_normal((3, 4, 4)) * 2.0
    labels = rng.integers(0, 3, size=(4, 4))

    terms = []
    for row in range(4):
        for col in range(4):
            scores = logits[:, row, col]
            terms.append(-math.log(math.exp(scores[labels[row, col]]) / sum(math.exp(s) for s in scores)))

    assert abs(pixel_cross_entropy(logits, LabelMap(labels, 3)) - sum(terms) / len(terms)) < 1e-12


def test_raising_the_true_class_logit_lowers_the_loss():
    rng = np.random.default_rng(3)
    base = rng.standard_normal((4, 3, 3))
    labels = rng.integers(0, 4, size=(3, 3))
    gt = LabelMap(labels, 4)
    true_class = np.zeros_like(base)
    np.put_along_axis(true_class, labels[np.newaxis], 1.0, axis=0)

    losses = [pixel_cross_entropy(base + step * true_class, gt) for step in np.linspace(-5.0, 5.0, 21)]

    assert all(a > b for a, b in zip(losses, losses[1:]))
