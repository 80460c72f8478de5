"""
Loss terms of the multi-task CGL model.

Logit volumes are channel-first, ``K x H x W``, one score per class and
position.

.. code:: python

    l_cgl = pixel_cross_entropy(o_fd, gt_cgl)   # K = 2
    l_ss = pixel_cross_entropy(o_ad, gt_ss)     # K = 150
    loss = combined_loss(l_cgl, l_ss, LossWeights(alpha=1.0, beta=0.5))
"""
import math
from dataclasses import dataclass
import numpy as np
from scipy.special import log_softmax
from cgleval.exceptions import ClassIdOutOfRange, DimensionMismatch, InvalidParameter
from cgleval.masks import LabelMap


@dataclass(frozen=True)
class LossWeights(object):
    """``alpha`` weighs the CGL term, ``beta`` the semantic segmentation term"""
    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        for name in ('alpha', 'beta'):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise InvalidParameter("%s must be finite and >= 0, got %r" % (name, value))


@dataclass(frozen=True)
class MultitaskLoss(object):
    total: float
    l_cgl: float
    l_ss: float


def _check_logits(logits):
    logits = np.asarray(logits, dtype=np.float64)
    if logits.ndim != 3:
        raise InvalidParameter("Expected K x H x W logits, got shape %s" % (logits.shape,))
    if logits.shape[0] < 2:
        raise InvalidParameter("At least 2 classes are required, got %d" % logits.shape[0])
    if not np.isfinite(logits).all():
        raise InvalidParameter("Logits must be finite")
    return logits


def pixel_cross_entropy(logits, gt):
    """Mean over positions of ``-log softmax(logits)[gt]``

    :param logits: ``K x H x W`` class scores
    :type logits: :class:`numpy.ndarray`
    :param gt: ground truth label map (``H x W``)
    :type gt: :class:`.LabelMap`
    :rtype: :class:`float`
    :raises: :class:`.DimensionMismatch`, :class:`.ClassIdOutOfRange`
    """
    logits = _check_logits(logits)
    k = logits.shape[0]

    if logits.shape[1:] != gt.shape:
        raise DimensionMismatch(logits.shape[1:], gt.shape)
    bad = gt.data >= k
    if bad.any():
        row, col = np.argwhere(bad)[0]
        raise ClassIdOutOfRange(int(gt.data[row, col]), (int(row), int(col)), k)

    log_probs = log_softmax(logits, axis=0)
    picked = np.take_along_axis(log_probs, gt.data[np.newaxis], axis=0)

    return float(-picked.mean())


def combined_loss(l_cgl, l_ss, weights):
    """``alpha * l_cgl + beta * l_ss``

    :type weights: :class:`LossWeights`
    :rtype: :class:`float`
    """
    return weights.alpha * l_cgl + weights.beta * l_ss


def multitask_loss(o_fd, gt_cgl, o_ad, gt_ss, weights):
    """Total training loss from both decoder outputs

    :param o_fd: fusion decoder logits for a CGL image (``2 x H x W``)
    :param gt_cgl: CGL ground truth
    :type gt_cgl: :class:`.LabelMap`
    :param o_ad: attention decoder logits for a semantic segmentation image
    :param gt_ss: semantic segmentation ground truth
    :type gt_ss: :class:`.LabelMap`
    :type weights: :class:`LossWeights`
    :rtype: :class:`MultitaskLoss`
    """
    l_cgl = pixel_cross_entropy(o_fd, gt_cgl)
    l_ss = pixel_cross_entropy(o_ad, gt_ss)

    return MultitaskLoss(combined_loss(l_cgl, l_ss, weights), l_cgl, l_ss)


def argmax_label_map(logits):
    """Reduce ``K x H x W`` logits to a label map (ties go to the lowest class id)

    :rtype: :class:`.LabelMap`
    """
    logits = _check_logits(logits)
    return LabelMap(np.argmax(logits, axis=0), logits.shape[0])
