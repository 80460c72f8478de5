"""
Matching prediction files to ground truth files.

Files pair up by filename stem, ignoring the extension, so ``a.pgm`` in the
prediction directory pairs with ``a.png`` in the ground truth directory. Only
``.png`` and ``.pgm`` files (any case) are considered.
"""
import os
import logging
from collections import namedtuple
from cgleval.exceptions import ConfigError, DirectoryNotFound, NoPairsFound

_LOG = logging.getLogger("Pairing")

MASK_EXTENSIONS = ('.png', '.pgm')

MaskPair = namedtuple('MaskPair', ['pred', 'gt', 'image_id'])


class MaskPairs(list):
    """List of :class:`MaskPair` sorted by image id, plus the stems left unmatched"""

    def __init__(self, pairs=(), unmatched_pred=(), unmatched_gt=()):
        super(MaskPairs, self).__init__(pairs)
        self.unmatched_pred = sorted(unmatched_pred)
        self.unmatched_gt = sorted(unmatched_gt)

    def __repr__(self):
        return "<MaskPairs pairs=%d unmatched_pred=%d unmatched_gt=%d>" % (len(self),
                                                                          len(self.unmatched_pred),
                                                                          len(self.unmatched_gt),
                                                                          )


def _scan(directory):
    if not os.path.isdir(directory):
        raise DirectoryNotFound(directory)

    files = {}

    for name in sorted(os.listdir(directory)):
        stem, ext = os.path.splitext(name)
        path = os.path.join(directory, name)

        if ext.lower() not in MASK_EXTENSIONS or not os.path.isfile(path):
            continue
        if stem in files:
            raise ConfigError("Ambiguous stem %r in %s: %s and %s" % (stem, directory,
                                                                   os.path.basename(files[stem]),
                                                                   name))
        files[stem] = path

    return files


def pair_masks(pred_dir, gt_dir):
    """Pair prediction and ground truth masks by filename stem

    :param pred_dir: directory with predicted masks
    :type pred_dir: :class:`str`
    :param gt_dir: directory with ground truth masks
    :type gt_dir: :class:`str`
    :return: pairs sorted lexicographically by stem
    :rtype: :class:`MaskPairs`
    :raises: :class:`.DirectoryNotFound`, :class:`.NoPairsFound`, :class:`.ConfigError`
    """
    pred = _scan(pred_dir)
    gt = _scan(gt_dir)

    stems = sorted(set(pred) & set(gt))
    unmatched_pred = set(pred) - set(gt)
    unmatched_gt = set(gt) - set(pred)

    if not stems:
        raise NoPairsFound(sorted(unmatched_pred), sorted(unmatched_gt))

    for stem in sorted(unmatched_pred):
        _LOG.warning("Prediction without ground truth: %s", pred[stem])
    for stem in sorted(unmatched_gt):
        _LOG.warning("Ground truth without prediction: %s", gt[stem])

    return MaskPairs([MaskPair(pred[stem], gt[stem], stem) for stem in stems],
                     unmatched_pred, unmatched_gt)
