"""
Label maps, binary masks and float grids, plus the pixel-set algebra shared by
:mod:`cgleval.iou` and :mod:`cgleval.dar`.

All grids are row-major with the origin at the top-left pixel. Instances are
immutable: the wrapped arrays are flagged read-only on construction.

.. code:: python

    from cgleval.masks import load_label_map, binarize, binary_remap

    gt = load_label_map('gt/0001.png', 2, remap=binary_remap())
    gt_mask = binarize(gt, 1)

Metrics are computed at whatever resolution the mask pair shares; nothing is
resampled here.
"""
import os
import logging
from dataclasses import dataclass, field
import numpy as np
from PIL import Image
from cgleval.exceptions import (ClassIdOutOfRange, DimensionMismatch, InvalidParameter,
                                MalformedImage)

_LOG = logging.getLogger("Masks")


def _frozen(array, dtype):
    array = np.array(array, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


def _check_grid(array):
    if array.ndim != 2:
        raise InvalidParameter("Expected a 2-D grid, got shape %s" % (array.shape,))
    if array.shape[0] < 1 or array.shape[1] < 1:
        raise InvalidParameter("Grid dimensions must be positive, got %s" % (array.shape,))


class _Grid(object):
    @property
    def height(self):
        return self.data.shape[0]

    @property
    def width(self):
        return self.data.shape[1]

    @property
    def shape(self):
        """``(height, width)``"""
        return self.data.shape


@dataclass(frozen=True, eq=False)
class LabelMap(_Grid):
    """
    Grid of class ids in ``[0, num_classes - 1]``

    :param data: 2-D array of integer class ids
    :param num_classes: number of classes ``K``
    :raises: :class:`.ClassIdOutOfRange`, :class:`.InvalidParameter`
    """
    data: np.ndarray
    num_classes: int

    def __post_init__(self):
        if self.num_classes < 1:
            raise InvalidParameter("num_classes must be >= 1")

        data = np.asarray(self.data)
        _check_grid(data)

        if not np.issubdtype(data.dtype, np.integer):
            raise InvalidParameter("Label map must hold integers, got %s" % data.dtype)

        bad = (data < 0) | (data >= self.num_classes)
        if bad.any():
            row, col = np.argwhere(bad)[0]
            raise ClassIdOutOfRange(int(data[row, col]), (int(row), int(col)), self.num_classes)

        object.__setattr__(self, 'data', _frozen(data, np.int64))

    def __eq__(self, other):
        return (isinstance(other, LabelMap)
                and self.num_classes == other.num_classes
                and np.array_equal(self.data, other.data))

    def __repr__(self):
        return "<LabelMap %dx%d K=%d>" % (self.width, self.height, self.num_classes)


@dataclass(frozen=True, eq=False)
class BinaryMask(_Grid):
    """
    Grid of ``{0, 1}`` values, stored as booleans

    :param data: 2-D array; only 0/1 (or bool) values are accepted
    """
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data)
        _check_grid(data)

        if data.dtype != np.bool_:
            if not np.isin(data, (0, 1)).all():
                raise InvalidParameter("Binary mask values must be exactly 0 or 1")

        object.__setattr__(self, 'data', _frozen(data, np.bool_))

    @classmethod
    def zeros(cls, height, width):
        return cls(np.zeros((height, width), dtype=np.bool_))

    def __eq__(self, other):
        return isinstance(other, BinaryMask) and np.array_equal(self.data, other.data)

    def __repr__(self):
        return "<BinaryMask %dx%d ones=%d>" % (self.width, self.height, count_ones(self))


@dataclass(frozen=True, eq=False)
class FloatGrid(_Grid):
    """
    Grid of finite double precision values (a blurred mask, for example)
    """
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        _check_grid(data)

        if not np.isfinite(data).all():
            raise InvalidParameter("Float grid values must be finite")

        object.__setattr__(self, 'data', _frozen(data, np.float64))

    def __repr__(self):
        return "<FloatGrid %dx%d max=%.6f>" % (self.width, self.height, self.data.max())


@dataclass(frozen=True)
class ClassRemap(object):
    """
    Maps raw 8-bit pixel values to class ids

    :param table: ``{pixel value: class id}``
    :param default: class id for values missing from ``table``; ``None`` keeps them unchanged
    """
    table: dict = field(default_factory=dict)
    default: int = None

    def lookup_table(self):
        """
        :return: 256 entry array mapping every 8-bit value to a class id
        :rtype: :class:`numpy.ndarray`
        """
        lut = np.arange(256, dtype=np.int64)
        if self.default is not None:
            lut[:] = self.default
        for value, class_id in self.table.items():
            lut[int(value)] = int(class_id)
        return lut

    def as_dict(self):
        out = {str(k): int(v) for k, v in sorted(self.table.items())}
        if self.default is not None:
            out['*'] = int(self.default)
        return out


def binary_remap():
    """Default remap for two-class masks: ``0 -> 0``, any nonzero value ``-> 1``"""
    return ClassRemap({0: 0}, default=1)


def load_remap(path):
    """Read a remap table file

    One ``value=class`` entry per line; ``*=class`` sets the class for all
    values not listed. Blank lines and ``#`` comments are ignored.

    :param path: remap file
    :type path: :class:`str`
    :rtype: :class:`ClassRemap`
    :raises: :class:`FileNotFoundError`, :class:`.InvalidParameter`
    """
    table = {}
    default = None

    with open(path, encoding='utf-8') as fp:
        for lineno, line in enumerate(fp, 1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            try:
                key, value = (part.strip() for part in line.split('=', 1))
                value = int(value)
                if key == '*':
                    default = value
                else:
                    key = int(key)
                    if not 0 <= key <= 255:
                        raise ValueError
                    table[key] = value
            except ValueError:
                raise InvalidParameter("%s:%d: expected 'value=class', got %r" % (path, lineno, line))

    return ClassRemap(table, default)


def load_label_map(path, expected_classes, remap=None):
    """Load a single-channel 8-bit image as a :class:`LabelMap`

    Pixel value ``v`` becomes class id ``v``, or ``remap(v)`` when a remap
    table is supplied.

    :param path: path to a PNG or PGM file
    :type path: :class:`str`
    :param expected_classes: number of classes ``K``
    :type expected_classes: :class:`int`
    :param remap: optional value to class id mapping
    :type remap: :class:`ClassRemap`
    :rtype: :class:`LabelMap`
    :raises: :class:`FileNotFoundError`, :class:`.MalformedImage`, :class:`.ClassIdOutOfRange`
    """
    if not os.path.isfile(path):
        raise FileNotFoundError("No such mask file: %s" % path)

    try:
        with Image.open(path) as img:
            mode = img.mode
            pixels = np.asarray(img) if mode == 'L' else None
    except (OSError, SyntaxError) as exp:
        raise MalformedImage("Unable to decode %s: %s" % (path, exp))

    if pixels is None:
        raise MalformedImage("%s: expected single-channel 8-bit image, got mode %r" % (path, mode))

    if remap is not None:
        pixels = remap.lookup_table()[pixels]

    _LOG.debug("Loaded %s (%dx%d)", path, pixels.shape[1], pixels.shape[0])

    return LabelMap(pixels.astype(np.int64), expected_classes)


def save_mask(mask, path):
    """Write a mask or label map as an 8-bit single-channel image

    Binary masks are written with values 0/1 and label maps with their class
    ids, so :func:`load_label_map` reads them back unchanged. The format
    follows the file extension (``.png`` or ``.pgm``).

    :param mask: grid to write
    :type mask: :class:`BinaryMask`, :class:`LabelMap`
    :param path: destination file
    :raises: :class:`.InvalidParameter`, :class:`OSError`
    """
    data = mask.data
    if isinstance(mask, LabelMap) and mask.num_classes > 256:
        raise InvalidParameter("Label maps with more than 256 classes cannot be stored as 8-bit")

    Image.fromarray(data.astype(np.uint8)).save(path)
    return path


def _check_same_shape(a, b):
    if a.shape != b.shape:
        raise DimensionMismatch(a.shape, b.shape)


def binarize(label_map, positive_class):
    """
    :param label_map: label map
    :type label_map: :class:`LabelMap`
    :param positive_class: class marked as ``1``
    :type positive_class: :class:`int`
    :return: mask with ``1`` where ``label_map == positive_class``
    :rtype: :class:`BinaryMask`
    :raises: :class:`.ClassIdOutOfRange`
    """
    if not 0 <= positive_class < label_map.num_classes:
        raise ClassIdOutOfRange(positive_class, None, label_map.num_classes)

    return BinaryMask(label_map.data == positive_class)


def complement_diff(a, b):
    """Relative complement ``a \\ b``

    ``complement_diff(pred, gt)`` gives false positives and
    ``complement_diff(gt, pred)`` false negatives.

    :rtype: :class:`BinaryMask`
    :raises: :class:`.DimensionMismatch`
    """
    _check_same_shape(a, b)
    return BinaryMask(a.data & ~b.data)


def or_fuse(a, b):
    """Element-wise OR

    :rtype: :class:`BinaryMask`
    :raises: :class:`.DimensionMismatch`
    """
    _check_same_shape(a, b)
    return BinaryMask(a.data | b.data)


def xor(a, b):
    _check_same_shape(a, b)
    return BinaryMask(a.data ^ b.data)


def count_ones(mask):
    """
    :rtype: :class:`int`
    """
    return int(np.count_nonzero(mask.data))
