"""
Confusion counts and the IoU family of scores (per-class IoU, CGL IoU, mean IoU).

A class that is absent from both prediction and ground truth has an undefined
IoU, represented as :class:`None`, and is left out of every mean.
"""
from dataclasses import dataclass
import numpy as np
from cgleval.enums import EAggregationMode
from cgleval.exceptions import (AllClassesUndefined, ClassCountMismatch, ClassIdOutOfRange,
                                DimensionMismatch, EmptyInput, InvalidParameter)


def _counts_array(values, num_classes):
    array = np.array(values, dtype=np.int64, copy=True).reshape(-1)
    if array.shape != (num_classes,):
        raise InvalidParameter("Expected %d per-class counts, got %d" % (num_classes, array.size))
    if (array < 0).any():
        raise InvalidParameter("Counts must be non-negative")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class ConfusionCounts(object):
    """Per-class true positive, false positive and false negative pixel counts

    Merging is element-wise addition, so counts from many images (or from
    parts of one image) can be reduced in any order.

    .. code:: python

        total = sum(per_image_counts[1:], per_image_counts[0])
    """
    num_classes: int
    tp: np.ndarray
    fp: np.ndarray
    fn: np.ndarray

    def __post_init__(self):
        for name in ('tp', 'fp', 'fn'):
            object.__setattr__(self, name, _counts_array(getattr(self, name), self.num_classes))

    @classmethod
    def zeros(cls, num_classes):
        zero = np.zeros(num_classes, dtype=np.int64)
        return cls(num_classes, zero, zero, zero)

    @classmethod
    def from_dict(cls, data):
        return cls(len(data['tp']), data['tp'], data['fp'], data['fn'])

    @property
    def total_pixels(self):
        """Pixels covered by these counts (``sum(tp) + sum(fn)``)"""
        return int(self.tp.sum() + self.fn.sum())

    def merge(self, other):
        """
        :param other: counts to add
        :type other: :class:`ConfusionCounts`
        :rtype: :class:`ConfusionCounts`
        :raises: :class:`.ClassCountMismatch`
        """
        if other.num_classes != self.num_classes:
            raise ClassCountMismatch("Cannot merge counts for %d and %d classes"
                                     % (self.num_classes, other.num_classes))
        return ConfusionCounts(self.num_classes,
                               self.tp + other.tp,
                               self.fp + other.fp,
                               self.fn + other.fn)

    __add__ = merge

    def as_dict(self):
        return {'tp': self.tp.tolist(), 'fp': self.fp.tolist(), 'fn': self.fn.tolist()}

    def __eq__(self, other):
        return (isinstance(other, ConfusionCounts)
                and self.num_classes == other.num_classes
                and np.array_equal(self.tp, other.tp)
                and np.array_equal(self.fp, other.fp)
                and np.array_equal(self.fn, other.fn))

    def __repr__(self):
        return "<ConfusionCounts K=%d tp=%s fp=%s fn=%s>" % (self.num_classes,
                                                           self.tp.tolist(),
                                                           self.fp.tolist(),
                                                           self.fn.tolist(),
                                                           )


@dataclass(frozen=True)
class IoUReport(object):
    """
    :param per_class_iou: IoU per class, ``None`` where undefined
    :param mean_iou: mean over defined classes (or images, see ``aggregation_mode``)
    :param cgl_iou: IoU of the positive (CGL) class, ``None`` where undefined
    :param aggregation_mode: how per-image counts were combined
    """
    per_class_iou: tuple
    mean_iou: float
    cgl_iou: float
    aggregation_mode: EAggregationMode

    def as_dict(self):
        return {'per_class_iou': list(self.per_class_iou),
                'mean_iou': self.mean_iou,
                'cgl_iou': self.cgl_iou,
                'aggregation_mode': self.aggregation_mode.value,
                }


def confusion_counts(pred, gt):
    """Count per-class agreement between two label maps

    :param pred: predicted label map
    :type pred: :class:`.LabelMap`
    :param gt: ground truth label map
    :type gt: :class:`.LabelMap`
    :rtype: :class:`ConfusionCounts`
    :raises: :class:`.DimensionMismatch`, :class:`.ClassCountMismatch`
    """
    if pred.shape != gt.shape:
        raise DimensionMismatch(pred.shape, gt.shape)
    if pred.num_classes != gt.num_classes:
        raise ClassCountMismatch("pred has %d classes, gt has %d" % (pred.num_classes, gt.num_classes))

    k = gt.num_classes
    matrix = np.bincount(k * gt.data.ravel() + pred.data.ravel(),
                         minlength=k * k).reshape(k, k)   # rows: gt, cols: pred

    tp = np.diag(matrix)
    fp = matrix.sum(axis=0) - tp
    fn = matrix.sum(axis=1) - tp

    return ConfusionCounts(k, tp, fp, fn)


def class_iou(counts, class_id):
    """IoU of a single class

    :param counts: confusion counts
    :type counts: :class:`ConfusionCounts`
    :param class_id: class to score
    :type class_id: :class:`int`
    :return: ``tp / (tp + fp + fn)``, or ``None`` when the class is absent from both maps
    :rtype: :class:`float`, :class:`None`
    :raises: :class:`.ClassIdOutOfRange`
    """
    if not 0 <= class_id < counts.num_classes:
        raise ClassIdOutOfRange(class_id, None, counts.num_classes)

    tp = int(counts.tp[class_id])
    union = tp + int(counts.fp[class_id]) + int(counts.fn[class_id])

    if union == 0:
        return None

    return tp / union


def per_class_iou(counts):
    """
    :rtype: :class:`list` of :class:`float` or :class:`None`
    """
    return [class_iou(counts, c) for c in range(counts.num_classes)]


def _mean_defined(values):
    defined = [v for v in values if v is not None]
    if not defined:
        return None
    return float(np.mean(defined))


def mean_iou(counts):
    """Mean IoU over the classes with a defined IoU

    :rtype: :class:`float`
    :raises: :class:`.AllClassesUndefined`
    """
    value = _mean_defined(per_class_iou(counts))
    if value is None:
        raise AllClassesUndefined("No class is present in prediction or ground truth")
    return value


def pixel_accuracy(counts):
    """
    :return: fraction of pixels whose predicted class matches ground truth
    :rtype: :class:`float`
    """
    total = counts.total_pixels
    if total == 0:
        raise EmptyInput("No pixels counted")
    return float(counts.tp.sum()) / total


def aggregate_iou(per_image, mode=EAggregationMode.PerImage, positive_class=1):
    """Combine per-image confusion counts into dataset scores

    ``EAggregationMode.Global`` merges all counts and scores once.
    ``EAggregationMode.PerImage`` scores every image and averages the defined
    values, per class and for the mean.

    :param per_image: counts, one entry per image
    :type per_image: :class:`list` of :class:`ConfusionCounts`
    :param mode: aggregation mode
    :type mode: :class:`.EAggregationMode`
    :param positive_class: class reported as CGL IoU
    :type positive_class: :class:`int`
    :rtype: :class:`IoUReport`
    :raises: :class:`.EmptyInput`, :class:`.AllClassesUndefined`
    """
    per_image = list(per_image)
    if not per_image:
        raise EmptyInput("No confusion counts to aggregate")

    mode = EAggregationMode(mode)

    if mode == EAggregationMode.Global:
        total = per_image[0]
        for counts in per_image[1:]:
            total = total.merge(counts)

        classes = per_class_iou(total)
        cgl = class_iou(total, positive_class)

        return IoUReport(tuple(classes), mean_iou(total), cgl, mode)

    num_classes = per_image[0].num_classes
    if any(counts.num_classes != num_classes for counts in per_image):
        raise ClassCountMismatch("All images must use the same number of classes")

    scored = [per_class_iou(counts) for counts in per_image]
    classes = [_mean_defined(row[c] for row in scored) for c in range(num_classes)]
    means = [_mean_defined(row) for row in scored]
    miou = _mean_defined(means)

    if miou is None:
        raise AllClassesUndefined("No class is present in any image")

    if not 0 <= positive_class < num_classes:
        raise ClassIdOutOfRange(positive_class, None, num_classes)

    return IoUReport(tuple(classes), miou, classes[positive_class], mode)
