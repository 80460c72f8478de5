"""
Evaluation reports.

A report holds one entry per image pair, the dataset aggregates and a
provenance block. The aggregates are a pure function of the per-image entries
(:func:`summarize`), so they can be recomputed from a saved report.

CSV reports have one row per image with the columns ``image_id, miou,
cgl_iou, dar, flags`` (the mIoU / CGL IoU / DaR order of the result tables)
followed by a ``<dataset>`` row.
"""
import csv
import json
import logging
from dataclasses import dataclass
from cgleval import __version__
from cgleval.enums import EImageFlag, EMetric, EReportFormat
from cgleval.exceptions import AllClassesUndefined
from cgleval.iou import ConfusionCounts, aggregate_iou
from cgleval.dar import DarResult

_LOG = logging.getLogger("Report")

CSV_COLUMNS = ('image_id', 'miou', 'cgl_iou', 'dar', 'flags')
DATASET_ROW_ID = '<dataset>'


@dataclass(frozen=True)
class ImageResult(object):
    """Scores and status of one image pair

    :param resolution: ``(width, height)`` the metrics were computed at
    :param counts: confusion counts (IoU metrics only)
    :param dar: DaR result without intermediates (DaR only)
    :param error: failure message; a failed entry carries no scores
    """
    image_id: str
    pred_path: str
    gt_path: str
    resolution: tuple = None
    miou: float = None
    cgl_iou: float = None
    per_class_iou: tuple = None
    counts: ConfusionCounts = None
    dar: DarResult = None
    flags: tuple = ()
    error: str = None

    @property
    def failed(self):
        return self.error is not None

    @property
    def dar_score(self):
        return self.dar.score if self.dar is not None else None

    def as_dict(self):
        return {'image_id': self.image_id,
                'pred_path': self.pred_path,
                'gt_path': self.gt_path,
                'resolution': list(self.resolution) if self.resolution else None,
                'miou': self.miou,
                'cgl_iou': self.cgl_iou,
                'per_class_iou': list(self.per_class_iou) if self.per_class_iou is not None else None,
                'counts': self.counts.as_dict() if self.counts is not None else None,
                'dar': self.dar.as_dict() if self.dar is not None else None,
                'flags': [flag.value for flag in self.flags],
                'error': self.error,
                }

    @classmethod
    def from_dict(cls, data):
        counts = data.get('counts')
        dar = data.get('dar')
        per_class = data.get('per_class_iou')

        return cls(image_id=data['image_id'],
                   pred_path=data['pred_path'],
                   gt_path=data['gt_path'],
                   resolution=tuple(data['resolution']) if data.get('resolution') else None,
                   miou=data.get('miou'),
                   cgl_iou=data.get('cgl_iou'),
                   per_class_iou=tuple(per_class) if per_class is not None else None,
                   counts=ConfusionCounts.from_dict(counts) if counts else None,
                   dar=DarResult(**dar) if dar else None,
                   flags=tuple(EImageFlag(f) for f in data.get('flags', ())),
                   error=data.get('error'),
                   )


@dataclass(frozen=True)
class EvalReport(object):
    per_image: tuple
    dataset: dict
    provenance: dict
    unmatched_pred: tuple = ()
    unmatched_gt: tuple = ()

    @property
    def failed(self):
        """Image ids whose evaluation failed"""
        return [r.image_id for r in self.per_image if r.failed]

    def as_dict(self):
        return {'provenance': self.provenance,
                'dataset': self.dataset,
                'per_image': [r.as_dict() for r in self.per_image],
                'unmatched': {'pred': list(self.unmatched_pred),
                              'gt': list(self.unmatched_gt),
                              },
                }

    def to_json(self):
        return json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n"


def _mean(values):
    values = list(values)
    if not values:
        return None
    return sum(values) / len(values)


def summarize(per_image, config):
    """Dataset aggregates for the selected metrics

    IoU scores follow :func:`cgleval.iou.aggregate_iou` in the configured
    mode; DaR is the arithmetic mean over the images that were not skipped.

    :param per_image: per-image entries
    :type per_image: :class:`list` of :class:`ImageResult`
    :param config: evaluation settings
    :type config: :class:`cgleval.config.EvalConfig`
    :rtype: :class:`dict`
    """
    scored = [r for r in per_image if not r.failed]
    dataset = {'images': len(per_image),
               'failed': len(per_image) - len(scored),
               }

    wants_iou = EMetric.MIoU in config.metrics or EMetric.ClassIoU in config.metrics
    counts = [r.counts for r in scored if r.counts is not None]

    if wants_iou:
        report = None
        if counts:
            try:
                report = aggregate_iou(counts, config.iou_aggregation, config.positive_class)
            except AllClassesUndefined:
                pass

        dataset['iou_aggregation'] = config.iou_aggregation.value

        if EMetric.MIoU in config.metrics:
            dataset['miou'] = report.mean_iou if report else None
        if EMetric.ClassIoU in config.metrics:
            dataset['cgl_iou'] = report.cgl_iou if report else None
            dataset['per_class_iou'] = list(report.per_class_iou) if report else None

    if EMetric.DaR in config.metrics:
        results = [r.dar for r in scored if r.dar is not None]
        dataset['dar'] = _mean(d.score for d in results if not d.skipped)
        dataset['dar_skipped'] = sum(1 for d in results if d.skipped)

    return dataset


def build_report(per_image, config, pairs=None):
    """Assemble a report from (unsorted) per-image entries

    :rtype: :class:`EvalReport`
    """
    per_image = tuple(sorted(per_image, key=lambda r: r.image_id))
    kernel = config.dar.kernel

    provenance = config.provenance()
    provenance.update({'version': __version__,
                       'kernel_radius': kernel.radius,
                       'kernel_center_weight': kernel.center_weight,
                       'border_mode': config.dar.border_mode.value,
                       'resolutions': sorted(set("%dx%d" % r.resolution
                                                 for r in per_image if r.resolution)),
                       })

    return EvalReport(per_image=per_image,
                      dataset=summarize(per_image, config),
                      provenance=provenance,
                      unmatched_pred=tuple(getattr(pairs, 'unmatched_pred', ())),
                      unmatched_gt=tuple(getattr(pairs, 'unmatched_gt', ())),
                      )


def _cell(value):
    return '' if value is None else repr(value)


def write_report(report, path, fmt=EReportFormat.Json):
    """Write a report as JSON or CSV

    :param report: report to write
    :type report: :class:`EvalReport`
    :param path: destination file
    :type path: :class:`str`
    :param fmt: output format
    :type fmt: :class:`.EReportFormat`
    :return: ``path``
    :raises: :class:`OSError`
    """
    fmt = EReportFormat(fmt)

    if fmt == EReportFormat.Json:
        with open(path, 'w', encoding='utf-8', newline='\n') as fp:
            fp.write(report.to_json())
    else:
        with open(path, 'w', encoding='utf-8', newline='') as fp:
            writer = csv.writer(fp, lineterminator='\n')
            writer.writerow(CSV_COLUMNS)

            for r in report.per_image:
                writer.writerow([r.image_id,
                                 _cell(r.miou),
                                 _cell(r.cgl_iou),
                                 _cell(r.dar_score),
                                 ';'.join(flag.value for flag in r.flags),
                                 ])

            dataset = report.dataset
            writer.writerow([DATASET_ROW_ID,
                             _cell(dataset.get('miou')),
                             _cell(dataset.get('cgl_iou')),
                             _cell(dataset.get('dar')),
                             '',
                             ])

    _LOG.info("Wrote %s report to %s", fmt.value, path)

    return path
