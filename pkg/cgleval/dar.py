"""
Dimension-agnostic Recall (DaR).

The score tolerates small differences in the height and width of predicted
blobs while still punishing missed or spurious ones:

1. false positives ``fp = y \\ GT`` and false negatives ``fn = GT \\ y``
2. each complement is blurred with a normalized symmetric Gaussian kernel
3. each blurred field is thresholded at ``Th`` (strictly greater), which keeps
   only pixels whose whole kernel support lies inside the complement
4. the two survivor masks are OR-ed into ``y'``
5. ``DaR = 1 - ones(y') / ones(GT)``

.. note::
    Despite the name, ``y'`` contains surviving false positives too, so the
    score also drops for large spurious detections and can become negative
    when they outweigh the ground truth (see ``clamp_negative``).

.. code:: python

    from cgleval.dar import DarParams, dar_score

    result = dar_score(pred_mask, gt_mask, DarParams(sigma=3.0, th=0.999))
    result.score

A ground truth blob thinner than the vanish cutoff (see :func:`vanish_cutoff`)
that is missed entirely leaves no survivor and does not lower the score; such
blobs are counted in :attr:`DarResult.vanished_components`.
"""
import os
import math
import logging
from functools import lru_cache
from dataclasses import dataclass, field, replace
import numpy as np
from scipy import ndimage
from PIL import Image
from cgleval.enums import EBorderMode, EEmptyGtPolicy
from cgleval.exceptions import DimensionMismatch, InvalidParameter, MissingIntermediates
from cgleval.masks import BinaryMask, FloatGrid, complement_diff, count_ones, or_fuse

_LOG = logging.getLogger("DaR")

DEFAULT_SIGMA = 3.0
DEFAULT_TH = 0.999

_ndimage_modes = {
    EBorderMode.Zero: 'constant',
    EBorderMode.Replicate: 'nearest',
}

#: file names written by :func:`dar_debug_dump`, in pipeline order
DEBUG_FILES = (
    ('fp_mask', 'fp.png'),
    ('fn_mask', 'fn.png'),
    ('fp_blurred', 'fp_blur.png'),
    ('fn_blurred', 'fn_blur.png'),
    ('fp_eroded', 'fp_erode.png'),
    ('fn_eroded', 'fn_erode.png'),
    ('y_prime', 'y_prime.png'),
)


def default_radius(sigma):
    """``ceil(3 * sigma)``"""
    return int(math.ceil(3 * sigma))


@dataclass(frozen=True, eq=False)
class Kernel2D(object):
    """Normalized, truncated Gaussian kernel

    ``weights`` is the ``(2r+1) x (2r+1)`` kernel and ``factor`` its
    normalized 1-D factor; ``outer(factor, factor)`` equals ``weights`` up to
    rounding.
    """
    sigma: float
    radius: int
    weights: np.ndarray
    factor: np.ndarray

    @property
    def size(self):
        return 2 * self.radius + 1

    @property
    def center_weight(self):
        return float(self.weights[self.radius, self.radius])

    def weight(self, i, j):
        """Weight at offset ``(i, j)`` from the centre"""
        return float(self.weights[self.radius + i, self.radius + j])

    def __repr__(self):
        return "<Kernel2D sigma=%s radius=%d>" % (self.sigma, self.radius)


@lru_cache(maxsize=32)
def gaussian_kernel(sigma, radius):
    """Build (or fetch the shared copy of) a Gaussian kernel

    ``w(i, j)`` is proportional to ``exp(-(i^2 + j^2) / (2 sigma^2))`` for
    ``i, j`` in ``[-radius, radius]`` and normalized to sum to 1.

    :param sigma: standard deviation in pixels
    :type sigma: :class:`float`
    :param radius: half width in pixels
    :type radius: :class:`int`
    :rtype: :class:`Kernel2D`
    :raises: :class:`.InvalidParameter`
    """
    if not (sigma > 0 and math.isfinite(sigma)):
        raise InvalidParameter("sigma must be > 0, got %r" % sigma)
    if int(radius) != radius or radius < 1:
        raise InvalidParameter("radius must be an integer >= 1, got %r" % radius)

    radius = int(radius)
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    squared = offsets ** 2
    denom = 2.0 * sigma * sigma

    weights = np.exp(-np.add.outer(squared, squared) / denom)
    weights /= weights.sum()

    factor = np.exp(-squared / denom)
    factor /= factor.sum()

    weights.setflags(write=False)
    factor.setflags(write=False)

    return Kernel2D(float(sigma), radius, weights, factor)


def subset_guaranteed(kernel, th):
    """Whether survivors are guaranteed to be subsets of their complements

    A pixel outside a complement has a blurred value of at most
    ``1 - w(0, 0)``, so it can never pass the threshold when
    ``w(0, 0) > 1 - th``.
    """
    return kernel.center_weight > 1.0 - th


def vanish_cutoff(kernel, th):
    """Widest disagreement stripe that leaves no survivor

    A stripe of width ``w`` that is long in the other direction reaches at
    best the 1-D kernel mass of ``w`` consecutive taps.

    :param kernel: blur kernel
    :type kernel: :class:`Kernel2D`
    :param th: threshold
    :type th: :class:`float`
    :return: largest ``w`` with best coverage ``<= th``
    :rtype: :class:`int`
    """
    width = 0
    for w in range(1, kernel.size + 1):
        best = np.convolve(kernel.factor, np.ones(w), mode='valid').max()
        if best > th:
            break
        width = w
    return width


@dataclass(frozen=True)
class DarParams(object):
    """
    :param sigma: Gaussian standard deviation in pixels (default ``3.0``)
    :param th: threshold in ``(0, 1)`` (default ``0.999``)
    :param kernel_radius: half width of the kernel; ``None`` means ``ceil(3 * sigma)``
    :param border_mode: how reads outside the image are resolved
    :param empty_gt_policy: what to do when the ground truth has no ones
    :param clamp_negative: clamp negative scores to ``0``
    """
    sigma: float = DEFAULT_SIGMA
    th: float = DEFAULT_TH
    kernel_radius: int = None
    border_mode: EBorderMode = EBorderMode.Zero
    empty_gt_policy: EEmptyGtPolicy = EEmptyGtPolicy.Skip
    clamp_negative: bool = False
    _kernel: Kernel2D = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0.0 < self.th < 1.0:
            raise InvalidParameter("th must be in (0, 1), got %r" % self.th)

        object.__setattr__(self, 'border_mode', EBorderMode(self.border_mode))
        object.__setattr__(self, 'empty_gt_policy', EEmptyGtPolicy(self.empty_gt_policy))

        if not self.sigma > 0:
            raise InvalidParameter("sigma must be > 0, got %r" % self.sigma)

        kernel = gaussian_kernel(self.sigma, self.radius)
        object.__setattr__(self, '_kernel', kernel)

        if not subset_guaranteed(kernel, self.th):
            _LOG.warning("Kernel centre weight %.6f <= 1 - Th (%.6f); survivors may fall outside"
                         " their complements", kernel.center_weight, 1.0 - self.th)

    @property
    def radius(self):
        if self.kernel_radius is None:
            return default_radius(self.sigma)
        return self.kernel_radius

    @property
    def kernel(self):
        """:class:`Kernel2D` for these parameters"""
        return self._kernel

    def as_dict(self):
        return {'sigma': self.sigma,
                'th': self.th,
                'kernel_radius': self.radius,
                'border_mode': self.border_mode.value,
                'empty_gt_policy': self.empty_gt_policy.value,
                'clamp_negative': self.clamp_negative,
                }


@dataclass(frozen=True)
class DarIntermediates(object):
    fp_mask: BinaryMask
    fn_mask: BinaryMask
    fp_blurred: FloatGrid
    fn_blurred: FloatGrid
    fp_eroded: BinaryMask
    fn_eroded: BinaryMask
    y_prime: BinaryMask


@dataclass(frozen=True)
class DarResult(object):
    """
    :param score: DaR score; ``None`` when the image was skipped for an empty ground truth
    :param surviving_fp: ones in the eroded false positive mask
    :param surviving_fn: ones in the eroded false negative mask
    :param gt_ones: ones in the ground truth mask
    :param raw_score: score before clamping
    :param clamped: clamping changed the score
    :param skipped: empty ground truth under the ``skip`` policy
    :param vanished_components: ground truth components missed without leaving a survivor
    :param intermediates: pipeline masks and fields, when kept
    """
    score: float
    surviving_fp: int
    surviving_fn: int
    gt_ones: int
    raw_score: float = None
    clamped: bool = False
    skipped: bool = False
    vanished_components: int = 0
    intermediates: DarIntermediates = None

    @property
    def y_prime_ones(self):
        # fp and fn are disjoint, so are their survivors
        return self.surviving_fp + self.surviving_fn

    @property
    def empty_gt(self):
        return self.gt_ones == 0

    def as_dict(self):
        return {'score': self.score,
                'raw_score': self.raw_score,
                'surviving_fp': self.surviving_fp,
                'surviving_fn': self.surviving_fn,
                'gt_ones': self.gt_ones,
                'clamped': self.clamped,
                'skipped': self.skipped,
                'vanished_components': self.vanished_components,
                }


def blur(mask, kernel, border=EBorderMode.Zero, direct=False):
    """Correlate a binary mask with a blur kernel

    The default path runs two separable 1-D passes; ``direct=True`` runs one
    2-D correlation with the full kernel. Both agree to rounding. Values are
    clipped to ``[0, 1]`` to absorb rounding above 1.

    :param mask: mask to blur
    :type mask: :class:`.BinaryMask`
    :param kernel: normalized kernel
    :type kernel: :class:`Kernel2D`
    :param border: border handling
    :type border: :class:`.EBorderMode`
    :rtype: :class:`.FloatGrid`
    """
    mode = _ndimage_modes[EBorderMode(border)]
    data = mask.data.astype(np.float64)

    if direct:
        out = ndimage.correlate(data, kernel.weights, mode=mode, cval=0.0)
    else:
        out = ndimage.correlate1d(data, kernel.factor, axis=0, mode=mode, cval=0.0)
        out = ndimage.correlate1d(out, kernel.factor, axis=1, mode=mode, cval=0.0)

    np.clip(out, 0.0, 1.0, out=out)

    return FloatGrid(out)


def threshold(grid, th):
    """
    :param grid: blurred field
    :type grid: :class:`.FloatGrid`
    :param th: threshold in ``(0, 1)``
    :return: ``1`` where ``grid > th``
    :rtype: :class:`.BinaryMask`
    :raises: :class:`.InvalidParameter`
    """
    if not 0.0 < th < 1.0:
        raise InvalidParameter("th must be in (0, 1), got %r" % th)

    return BinaryMask(grid.data > th)


def _vanished_components(gt, pred, fn_eroded):
    labels, count = ndimage.label(gt.data, structure=np.ones((3, 3), dtype=np.int8))
    if count == 0:
        return 0

    hit = np.bincount(labels[pred.data], minlength=count + 1)
    survived = np.bincount(labels[fn_eroded.data], minlength=count + 1)

    return int(((hit[1:] == 0) & (survived[1:] == 0)).sum())


def dar_components(pred, gt, params=None):
    """Run the DaR pipeline and keep every intermediate

    The result carries the raw score (``None`` for an empty ground truth); no
    clamping or empty ground truth policy is applied here.

    :param pred: predicted mask ``y``
    :type pred: :class:`.BinaryMask`
    :param gt: ground truth mask
    :type gt: :class:`.BinaryMask`
    :param params: parameters (defaults when omitted)
    :type params: :class:`DarParams`
    :rtype: :class:`DarResult`
    :raises: :class:`.DimensionMismatch`
    """
    if params is None:
        params = DarParams()
    if pred.shape != gt.shape:
        raise DimensionMismatch(pred.shape, gt.shape)

    kernel = params.kernel

    fp_mask = complement_diff(pred, gt)
    fn_mask = complement_diff(gt, pred)

    fp_blurred = blur(fp_mask, kernel, params.border_mode)
    fn_blurred = blur(fn_mask, kernel, params.border_mode)

    fp_eroded = threshold(fp_blurred, params.th)
    fn_eroded = threshold(fn_blurred, params.th)

    y_prime = or_fuse(fp_eroded, fn_eroded)

    gt_ones = count_ones(gt)
    surviving_fp = count_ones(fp_eroded)
    surviving_fn = count_ones(fn_eroded)

    raw = None
    if gt_ones:
        raw = 1.0 - count_ones(y_prime) / gt_ones

    return DarResult(score=raw,
                     surviving_fp=surviving_fp,
                     surviving_fn=surviving_fn,
                     gt_ones=gt_ones,
                     raw_score=raw,
                     vanished_components=_vanished_components(gt, pred, fn_eroded),
                     intermediates=DarIntermediates(fp_mask, fn_mask,
                                                    fp_blurred, fn_blurred,
                                                    fp_eroded, fn_eroded,
                                                    y_prime),
                     )


def dar_score(pred, gt, params=None, keep_intermediates=False):
    """Score a prediction with DaR

    ``DaR = 1 - ones(y') / ones(GT)``. With an empty ground truth the
    ``empty_gt_policy`` applies: ``skip`` returns ``score=None`` with
    ``skipped=True``; ``binary`` scores ``1.0`` when ``y'`` is empty and ``0.0``
    otherwise.

    :param pred: predicted mask ``y``
    :type pred: :class:`.BinaryMask`
    :param gt: ground truth mask
    :type gt: :class:`.BinaryMask`
    :param params: parameters (defaults when omitted)
    :type params: :class:`DarParams`
    :param keep_intermediates: keep the pipeline masks for :func:`dar_debug_dump`
    :type keep_intermediates: :class:`bool`
    :rtype: :class:`DarResult`
    :raises: :class:`.DimensionMismatch`
    """
    if params is None:
        params = DarParams()

    result = dar_components(pred, gt, params)
    changes = {}

    if result.empty_gt:
        if params.empty_gt_policy == EEmptyGtPolicy.Skip:
            changes['skipped'] = True
        else:
            changes['score'] = 1.0 if result.y_prime_ones == 0 else 0.0
    elif params.clamp_negative and result.raw_score < 0:
        changes['score'] = 0.0
        changes['clamped'] = True

    if not keep_intermediates:
        changes['intermediates'] = None

    if changes:
        result = replace(result, **changes)

    return result


def _to_image(grid):
    if isinstance(grid, BinaryMask):
        return grid.data.astype(np.uint8) * 255
    return np.rint(grid.data * 255.0).astype(np.uint8)


def dar_debug_dump(result, out_dir):
    """Write every pipeline intermediate as an 8-bit image

    Masks are written as 0/255, blurred fields scaled by 255 and rounded.

    :param result: result from :func:`dar_components` or ``dar_score(..., keep_intermediates=True)``
    :type result: :class:`DarResult`
    :param out_dir: destination directory (created when missing)
    :type out_dir: :class:`str`
    :return: written paths, in pipeline order
    :rtype: :class:`list`
    :raises: :class:`.MissingIntermediates`, :class:`OSError`
    """
    if result.intermediates is None:
        raise MissingIntermediates("Result has no intermediates; use keep_intermediates=True")

    os.makedirs(out_dir, exist_ok=True)
    paths = []

    for attr, filename in DEBUG_FILES:
        path = os.path.join(out_dir, filename)
        Image.fromarray(_to_image(getattr(result.intermediates, attr))).save(path)
        paths.append(path)

    _LOG.debug("Wrote %d debug images to %s", len(paths), out_dir)

    return paths
