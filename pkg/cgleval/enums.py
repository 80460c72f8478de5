from enum import Enum


class EBorderMode(str, Enum):
    Zero = 'zero'
    Replicate = 'replicate'


class EEmptyGtPolicy(str, Enum):
    Skip = 'skip'
    #: score 1.0 when y' is empty, else 0.0
    Binary = 'binary'


class EAggregationMode(str, Enum):
    PerImage = 'per-image'
    Global = 'global'


class EMetric(str, Enum):
    MIoU = 'miou'
    ClassIoU = 'class-iou'
    DaR = 'dar'


class EReportFormat(str, Enum):
    Json = 'json'
    Csv = 'csv'


class EImageFlag(str, Enum):
    EmptyGt = 'empty-gt'
    NegativeDar = 'negative-dar'
    NegativeDarClamped = 'negative-dar-clamped'
    VanishedGtComponent = 'vanished-gt-component'
    LoadError = 'load-error'
    DimensionMismatch = 'dimension-mismatch'


# Do not remove
from sys import modules
from enum import EnumMeta

__all__ = [obj.__name__
           for obj in modules[__name__].__dict__.values()
           if obj.__class__ is EnumMeta and obj.__name__ != 'Enum'
           ]

del modules, EnumMeta
