from cgleval.enums import EMetric
from cgleval.exceptions import AllClassesUndefined
from cgleval.iou import class_iou, confusion_counts, mean_iou, per_class_iou


class IoUScorer(object):
    def __init__(self):
        super(IoUScorer, self).__init__()

        # register our scorers
        self.register_scorer(EMetric.MIoU, self.__score_miou)
        self.register_scorer(EMetric.ClassIoU, self.__score_class_iou)

    def __counts(self, sample):
        # both IoU scorers share one confusion count per image
        if 'counts' not in sample.cache:
            sample.cache['counts'] = confusion_counts(sample.pred, sample.gt)
        return sample.cache['counts']

    def __score_miou(self, sample, config):
        counts = self.__counts(sample)

        try:
            miou = mean_iou(counts)
        except AllClassesUndefined:
            miou = None

        return {'counts': counts, 'miou': miou}

    def __score_class_iou(self, sample, config):
        counts = self.__counts(sample)

        return {'counts': counts,
                'cgl_iou': class_iou(counts, config.positive_class),
                'per_class_iou': tuple(per_class_iou(counts)),
                }
