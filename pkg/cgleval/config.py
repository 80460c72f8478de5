"""
Evaluation settings.

Settings are flat ``key=value`` pairs whose keys mirror the CLI flag names
(``pred-dir``, ``sigma``, ``iou-agg``, ...). A config file holds one pair per
line; ``#`` starts a comment. CLI flags override config file values, which
override the defaults.

.. code:: text

    # split1.cfg
    pred-dir = runs/split1/pred
    gt-dir = data/split1/gt
    metrics = miou,class-iou,dar
    sigma = 3.0
    th = 0.999
"""
import logging
from dataclasses import dataclass, field
from cgleval.enums import EAggregationMode, EBorderMode, EEmptyGtPolicy, EMetric, EReportFormat
from cgleval.exceptions import CglEvalError, ConfigError
from cgleval.dar import DarParams
from cgleval.masks import binary_remap, load_remap

_LOG = logging.getLogger("EvalConfig")

#: every recognised setting
SETTING_KEYS = (
    'pred-dir', 'gt-dir', 'metrics', 'positive-class', 'num-classes',
    'sigma', 'th', 'kernel-radius', 'border', 'clamp-dar', 'empty-gt',
    'iou-agg', 'remap', 'workers', 'out', 'format', 'dump-dir',
)

_true = ('1', 'true', 'yes', 'on')
_false = ('0', 'false', 'no', 'off')


@dataclass(frozen=True)
class EvalConfig(object):
    """
    :param pred_dir: directory with predicted masks
    :param gt_dir: directory with ground truth masks
    :param metrics: metrics to compute
    :param positive_class: the CGL class (default ``1``)
    :param num_classes: classes per label map (default ``2``)
    :param dar: DaR parameters
    :param iou_aggregation: how IoU is combined over images
    :param remap: pixel value remap; two-class runs default to ``0 -> 0, * -> 1``
    :param remap_path: file the remap was read from, for provenance
    :param workers: size of the worker pool
    :param debug_dump_dir: write DaR intermediates per image below this directory
    :param output: report path
    :param output_format: report format
    """
    pred_dir: str
    gt_dir: str
    metrics: tuple = (EMetric.MIoU, EMetric.ClassIoU, EMetric.DaR)
    positive_class: int = 1
    num_classes: int = 2
    dar: DarParams = field(default_factory=DarParams)
    iou_aggregation: EAggregationMode = EAggregationMode.PerImage
    remap: object = None
    remap_path: str = None
    workers: int = 1
    debug_dump_dir: str = None
    output: str = None
    output_format: EReportFormat = EReportFormat.Json

    def __post_init__(self):
        try:
            metrics = tuple(sorted(set(EMetric(m) for m in self.metrics),
                                   key=list(EMetric).index))
            object.__setattr__(self, 'metrics', metrics)
            object.__setattr__(self, 'iou_aggregation', EAggregationMode(self.iou_aggregation))
            object.__setattr__(self, 'output_format', EReportFormat(self.output_format))
        except ValueError as exp:
            raise ConfigError(str(exp))

        if not self.pred_dir or not self.gt_dir:
            raise ConfigError("Both pred-dir and gt-dir are required")
        if not self.metrics:
            raise ConfigError("At least one metric must be selected")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1, got %d" % self.workers)
        if self.num_classes < 2:
            raise ConfigError("num-classes must be >= 2, got %d" % self.num_classes)
        if not 0 <= self.positive_class < self.num_classes:
            raise ConfigError("positive-class %d is not below num-classes %d"
                              % (self.positive_class, self.num_classes))

    @property
    def effective_remap(self):
        """Remap used when loading masks"""
        if self.remap is None and self.num_classes == 2:
            return binary_remap()
        return self.remap

    def provenance(self):
        """Every setting that can change a score

        Worker count and output destination are left out so reports do not
        depend on them.

        :rtype: :class:`dict`
        """
        remap = self.effective_remap

        return {'pred_dir': self.pred_dir,
                'gt_dir': self.gt_dir,
                'metrics': [m.value for m in self.metrics],
                'positive_class': self.positive_class,
                'num_classes': self.num_classes,
                'dar': self.dar.as_dict(),
                'iou_aggregation': self.iou_aggregation.value,
                'remap': remap.as_dict() if remap is not None else None,
                'remap_path': self.remap_path,
                }

    @classmethod
    def from_mapping(cls, settings):
        """Build a config from flat settings

        :param settings: ``{key: value}``; keys as in :data:`SETTING_KEYS`
            (underscores are accepted in place of dashes), values as strings
            or already typed
        :type settings: :class:`dict`
        :rtype: :class:`EvalConfig`
        :raises: :class:`.ConfigError`
        """
        values = {}
        for key, value in settings.items():
            key = key.strip().replace('_', '-')
            if key not in SETTING_KEYS:
                raise ConfigError("Unknown setting: %r" % key)
            if value is not None:
                values[key] = value

        try:
            dar = DarParams(sigma=_get(values, 'sigma', float, 3.0),
                            th=_get(values, 'th', float, 0.999),
                            kernel_radius=_get(values, 'kernel-radius', int, None),
                            border_mode=EBorderMode(values.get('border', EBorderMode.Zero)),
                            empty_gt_policy=EEmptyGtPolicy(values.get('empty-gt', EEmptyGtPolicy.Skip)),
                            clamp_negative=_get(values, 'clamp-dar', _to_bool, False),
                            )

            remap_path = values.get('remap')
            remap = load_remap(remap_path) if remap_path else None

            return cls(pred_dir=values.get('pred-dir'),
                       gt_dir=values.get('gt-dir'),
                       metrics=_get(values, 'metrics', _to_metrics, cls.metrics),
                       positive_class=_get(values, 'positive-class', int, 1),
                       num_classes=_get(values, 'num-classes', int, 2),
                       dar=dar,
                       iou_aggregation=values.get('iou-agg', EAggregationMode.PerImage),
                       remap=remap,
                       remap_path=remap_path,
                       workers=_get(values, 'workers', int, 1),
                       debug_dump_dir=values.get('dump-dir'),
                       output=values.get('out'),
                       output_format=values.get('format', EReportFormat.Json),
                       )
        except ConfigError:
            raise
        except (CglEvalError, ValueError, OSError) as exp:
            raise ConfigError(str(exp))


def _get(values, key, convert, default):
    if key not in values:
        return default
    try:
        return convert(values[key])
    except (TypeError, ValueError):
        raise ConfigError("Invalid value for %s: %r" % (key, values[key]))


def _to_bool(value):
    if isinstance(value, bool):
        return value
    value = str(value).strip().lower()
    if value in _true:
        return True
    if value in _false:
        return False
    raise ValueError(value)


def _to_metrics(value):
    if isinstance(value, str):
        value = [part.strip() for part in value.split(',') if part.strip()]
    return tuple(EMetric(m) for m in value)


def load_config_file(path):
    """Read flat ``key=value`` settings

    :param path: config file
    :rtype: :class:`dict`
    :raises: :class:`.ConfigError`
    """
    settings = {}

    try:
        with open(path, encoding='utf-8') as fp:
            lines = fp.readlines()
    except OSError as exp:
        raise ConfigError("Unable to read config file %s: %s" % (path, exp))

    for lineno, line in enumerate(lines, 1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError("%s:%d: expected key=value, got %r" % (path, lineno, line))

        key, value = (part.strip() for part in line.split('=', 1))
        settings[key.lstrip('-').replace('_', '-')] = value

    _LOG.debug("Read %d settings from %s", len(settings), path)

    return settings
