import os
from dataclasses import replace
from cgleval.enums import EImageFlag, EMetric
from cgleval.dar import dar_debug_dump, dar_score
from cgleval.masks import binarize


class DarScorer(object):
    def __init__(self):
        super(DarScorer, self).__init__()

        # register our scorers
        self.register_scorer(EMetric.DaR, self.__score_dar)

    def __score_dar(self, sample, config):
        """
        Binarize both maps on the positive (CGL) class and score them with DaR.

        When ``config.debug_dump_dir`` is set, the intermediates are written to
        ``<debug_dump_dir>/<image id>/`` and then dropped from the result.
        """
        pred = binarize(sample.pred, config.positive_class)
        gt = binarize(sample.gt, config.positive_class)
        dump = config.debug_dump_dir is not None

        result = dar_score(pred, gt, config.dar, keep_intermediates=dump)
        flags = []

        if result.empty_gt:
            flags.append(EImageFlag.EmptyGt)
        if result.raw_score is not None and result.raw_score < 0:
            flags.append(EImageFlag.NegativeDar)
        if result.clamped:
            flags.append(EImageFlag.NegativeDarClamped)
        if result.vanished_components:
            flags.append(EImageFlag.VanishedGtComponent)

        if dump:
            dar_debug_dump(result, os.path.join(config.debug_dump_dir, sample.image_id))
            result = replace(result, intermediates=None)

        return {'dar': result, 'flags': flags}
