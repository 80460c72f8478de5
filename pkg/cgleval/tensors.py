"""
Reading and writing exported feature volumes.

Binary format (``.bin``, ``.f64``): three little-endian int64 values ``d, h, w``
followed by ``d * h * w`` little-endian float64 values in ``d, h, w`` order.

Text format (``.txt``): first line ``d h w``, then the same values separated by
whitespace.
"""
import os
import logging
import numpy as np
from cgleval.exceptions import InvalidParameter, MalformedVolume

_LOG = logging.getLogger("Tensors")

_HEADER = np.dtype('<i8')
_VALUE = np.dtype('<f8')

BINARY_EXTENSIONS = ('.bin', '.f64')
TEXT_EXTENSIONS = ('.txt',)


def _detect(path, fmt):
    if fmt is not None:
        if fmt not in ('binary', 'text'):
            raise InvalidParameter("Unknown volume format: %r" % fmt)
        return fmt

    ext = os.path.splitext(path)[1].lower()
    if ext in BINARY_EXTENSIONS:
        return 'binary'
    if ext in TEXT_EXTENSIONS:
        return 'text'

    raise InvalidParameter("Cannot tell volume format from extension %r" % ext)


def _shape(header, path):
    d, h, w = (int(x) for x in header)
    if min(d, h, w) < 1:
        raise MalformedVolume("%s: invalid volume header %s" % (path, (d, h, w)))
    return d, h, w


def load_volume(path, fmt=None):
    """
    :param path: volume file
    :param fmt: ``'binary'``, ``'text'`` or ``None`` to detect from the extension
    :return: ``d x h x w`` array
    :rtype: :class:`numpy.ndarray`
    :raises: :class:`FileNotFoundError`, :class:`.MalformedVolume`
    """
    fmt = _detect(path, fmt)

    if fmt == 'binary':
        with open(path, 'rb') as fp:
            raw = fp.read()

        if len(raw) < 3 * _HEADER.itemsize:
            raise MalformedVolume("%s: truncated header" % path)
        if (len(raw) - 3 * _HEADER.itemsize) % _VALUE.itemsize:
            raise MalformedVolume("%s: payload is not a whole number of float64 values" % path)

        shape = _shape(np.frombuffer(raw, dtype=_HEADER, count=3), path)
        values = np.frombuffer(raw, dtype=_VALUE, offset=3 * _HEADER.itemsize)
    else:
        with open(path, encoding='utf-8') as fp:
            tokens = fp.read().split()

        if len(tokens) < 3:
            raise MalformedVolume("%s: truncated header" % path)

        try:
            shape = _shape(tokens[:3], path)
            values = np.array([float(x) for x in tokens[3:]], dtype=np.float64)
        except ValueError as exp:
            raise MalformedVolume("%s: %s" % (path, exp))

    expected = shape[0] * shape[1] * shape[2]
    if values.size != expected:
        raise MalformedVolume("%s: expected %d values, found %d" % (path, expected, values.size))

    _LOG.debug("Loaded volume %s with shape %s", path, shape)

    return values.astype(np.float64).reshape(shape)


def save_volume(volume, path, fmt=None):
    """Write a ``d x h x w`` volume; text output uses ``repr`` precision

    :raises: :class:`.InvalidParameter`, :class:`OSError`
    """
    fmt = _detect(path, fmt)
    volume = np.asarray(volume, dtype=np.float64)

    if volume.ndim != 3:
        raise InvalidParameter("Expected a d x h x w volume, got shape %s" % (volume.shape,))

    if fmt == 'binary':
        with open(path, 'wb') as fp:
            fp.write(np.asarray(volume.shape, dtype=_HEADER).tobytes())
            fp.write(np.ascontiguousarray(volume, dtype=_VALUE).tobytes())
    else:
        with open(path, 'w', encoding='utf-8') as fp:
            fp.write("%d %d %d\n" % volume.shape)
            fp.write("\n".join(repr(float(x)) for x in volume.ravel()))
            fp.write("\n")

    return path
