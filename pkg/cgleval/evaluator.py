"""
Only the batch loop is found here. The per-image metrics are inherited from
the :mod:`cgleval.scorers` package and its submodules.

.. code:: python

    from cgleval.config import EvalConfig
    from cgleval.evaluator import Evaluator

    evaluator = Evaluator(EvalConfig(pred_dir='pred', gt_dir='gt', workers=4))

    @evaluator.on('image_failed')
    def failed(result):
        print(result.image_id, result.error)

    report = evaluator.run()

Events: ``image_scored`` and ``image_failed`` (one :class:`.ImageResult`
each, in image id order, after all pairs are evaluated) and ``run_done``
(the :class:`.EvalReport`).
"""
import logging
from gevent.threadpool import ThreadPool
from eventemitter import EventEmitter
from cgleval.enums import EImageFlag
from cgleval.exceptions import CglEvalError, DimensionMismatch
from cgleval.masks import load_label_map
from cgleval.pairing import pair_masks
from cgleval.report import ImageResult, build_report
from cgleval.scorers import ScorerBase


class Sample(object):
    """One loaded prediction/ground truth pair; ``cache`` is shared by the scorers"""
    __slots__ = ('image_id', 'pred', 'gt', 'cache')

    def __init__(self, image_id, pred, gt):
        self.image_id = image_id
        self.pred = pred
        self.gt = gt
        self.cache = {}


class Evaluator(EventEmitter, ScorerBase):
    """
    :param config: evaluation settings
    :type config: :class:`cgleval.config.EvalConfig`
    """

    def __init__(self, config):
        self._LOG = logging.getLogger(self.__class__.__name__)
        self.config = config
        self.scorers = {}

        ScorerBase.__init__(self)

        self.on('image_failed', self._handle_image_failed)

    def __repr__(self):
        return "<%s(%s, %s)>" % (self.__class__.__name__,
                                 repr(self.config.pred_dir),
                                 repr(self.config.gt_dir),
                                 )

    def register_scorer(self, metric, scorer):
        self.scorers[metric] = scorer

    def emit(self, event, *args):
        if event is not None:
            self._LOG.debug("Emit event: %s" % repr(event))
        super(Evaluator, self).emit(event, *args)

    def _handle_image_failed(self, result):
        self._LOG.warning("Failed %s: %s", result.image_id, result.error)

    def _failure(self, pair, flag, error, resolution=None):
        return ImageResult(image_id=pair.image_id,
                           pred_path=pair.pred,
                           gt_path=pair.gt,
                           resolution=resolution,
                           flags=(flag,),
                           error=str(error),
                           )

    def evaluate_pair(self, pair):
        """Score one pair with every selected metric

        Load and scoring errors become a failed entry instead of an exception.

        :param pair: files to compare
        :type pair: :class:`cgleval.pairing.MaskPair`
        :rtype: :class:`.ImageResult`
        """
        config = self.config
        remap = config.effective_remap

        try:
            pred = load_label_map(pair.pred, config.num_classes, remap)
            gt = load_label_map(pair.gt, config.num_classes, remap)
        except (CglEvalError, OSError) as exp:
            return self._failure(pair, EImageFlag.LoadError, exp)

        if pred.shape != gt.shape:
            return self._failure(pair, EImageFlag.DimensionMismatch, DimensionMismatch(pred.shape, gt.shape))

        resolution = (gt.width, gt.height)
        sample = Sample(pair.image_id, pred, gt)
        fields = {}
        flags = set()

        for metric in config.metrics:
            try:
                update = self.scorers[metric](sample, config)
            except (CglEvalError, OSError) as exp:
                return self._failure(pair, EImageFlag.LoadError, exp, resolution)

            flags.update(update.pop('flags', ()))
            fields.update(update)

        return ImageResult(image_id=pair.image_id,
                           pred_path=pair.pred,
                           gt_path=pair.gt,
                           resolution=resolution,
                           flags=tuple(f for f in EImageFlag if f in flags),
                           **fields)

    def run(self):
        """Evaluate every pair and build the report

        Pairs are evaluated on a pool of ``config.workers`` threads; results
        are sorted by image id before anything is emitted or aggregated, so
        the report does not depend on the worker count.

        :rtype: :class:`.EvalReport`
        :raises: :class:`.ConfigError`
        """
        config = self.config
        pairs = pair_masks(config.pred_dir, config.gt_dir)

        self._LOG.info("Evaluating %d pairs with %d worker(s)", len(pairs), config.workers)

        if config.workers == 1:
            results = [self.evaluate_pair(pair) for pair in pairs]
        else:
            pool = ThreadPool(config.workers)
            try:
                results = pool.map(self.evaluate_pair, pairs)
            finally:
                pool.kill()

        results = sorted(results, key=lambda r: r.image_id)

        for result in results:
            self.emit('image_failed' if result.failed else 'image_scored', result)

        report = build_report(results, config, pairs)

        self._LOG.info("Done: %d scored, %d failed", len(results) - len(report.failed), len(report.failed))
        self.emit('run_done', report)

        return report


def run_eval(config):
    """Shortcut for ``Evaluator(config).run()``

    :rtype: :class:`.EvalReport`
    """
    return Evaluator(config).run()
