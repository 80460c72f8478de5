"""
Every error raised by :mod:`cgleval` derives from :class:`CglEvalError`.
Errors caused by bad arguments are also :class:`ValueError` subclasses.
"""


class CglEvalError(Exception):
    pass


class InvalidParameter(CglEvalError, ValueError):
    pass


class DimensionMismatch(CglEvalError, ValueError):
    def __init__(self, shape_a, shape_b):
        super(DimensionMismatch, self).__init__("Dimensions differ: %s vs %s" % (shape_a, shape_b))
        self.shape_a = shape_a
        self.shape_b = shape_b


class ClassIdOutOfRange(CglEvalError, ValueError):
    """
    :param value: offending class id or pixel value
    :param position: ``(row, col)`` of the first offending pixel, or ``None``
    """
    def __init__(self, value, position=None, num_classes=None):
        msg = "Class id %d out of range" % value
        if num_classes is not None:
            msg += " (num_classes=%d)" % num_classes
        if position is not None:
            msg += " at %s" % (position,)
        super(ClassIdOutOfRange, self).__init__(msg)
        self.value = value
        self.position = position
        self.num_classes = num_classes


class ClassCountMismatch(CglEvalError, ValueError):
    pass


class MalformedImage(CglEvalError, ValueError):
    pass


class AllClassesUndefined(CglEvalError, ValueError):
    pass


class EmptyInput(CglEvalError, ValueError):
    pass


class MissingIntermediates(CglEvalError, ValueError):
    pass


class ConfigError(CglEvalError):
    pass


class DirectoryNotFound(ConfigError):
    def __init__(self, path):
        super(DirectoryNotFound, self).__init__("Directory not found: %s" % path)
        self.path = path


class NoPairsFound(ConfigError):
    def __init__(self, unmatched_pred, unmatched_gt):
        super(NoPairsFound, self).__init__(
            "No prediction/ground truth pairs found (unmatched pred: %s, unmatched gt: %s)"
            % (', '.join(unmatched_pred) or '-', ', '.join(unmatched_gt) or '-'))
        self.unmatched_pred = list(unmatched_pred)
        self.unmatched_gt = list(unmatched_gt)


class MalformedVolume(CglEvalError, ValueError):
    pass
