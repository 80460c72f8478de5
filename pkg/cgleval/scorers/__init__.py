from cgleval.scorers.iou import IoUScorer
from cgleval.scorers.dar import DarScorer


class ScorerBase(IoUScorer, DarScorer):
    """
    This object adds the per-image metrics to :class:`cgleval.evaluator.Evaluator`.
    The metrics are separated into submodules with a single class, each
    registering its scorers by :class:`cgleval.enums.EMetric`.

    A scorer takes ``(sample, config)`` and returns a :class:`dict` of
    :class:`cgleval.report.ImageResult` fields, plus an optional ``flags`` list.
    """
    pass
