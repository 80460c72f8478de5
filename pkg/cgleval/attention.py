"""
Forward-pass reference kernels for multi-head attention and the two attention
blocks of the CGL model.

* :func:`spda` - scaled dot-product attention for one head
* :func:`multi_head_attention` - heads concatenated and projected by ``W_o``
* :func:`self_attention_block` - stacked self-attention on the attention
  decoder feature map ``F_AD`` giving ``F_s``
* :func:`cross_attention_fuse` - stacked cross-attention with the encoder
  features ``F_e`` as query and ``F_s`` as key and value, giving ``F_c``,
  added element-wise to an intermediate fusion decoder map

A feature volume of shape ``d x h x w`` is treated as a sequence of ``h * w``
feature vectors of dimension ``d`` (see :func:`seq_from_volume`). There are no
positional encodings, no biases and no gradients; the convolution layers
around the blocks are not part of this module.

The ``sqrt(d_k)`` divisor uses the per-head projection width ``d_k``.

.. code:: python

    params = AttentionParams.from_seed(7, heads=2, model_dim=4, head_dim=2)
    f_s = self_attention_block(f_ad, [params])
"""
from dataclasses import dataclass
import numpy as np
from scipy.special import softmax
from cgleval.exceptions import DimensionMismatch, InvalidParameter


def _frozen_matrix(values, ndim, name):
    array = np.array(values, dtype=np.float64, copy=True)
    if array.ndim != ndim:
        raise InvalidParameter("%s must be %d-D, got shape %s" % (name, ndim, array.shape))
    if not np.isfinite(array).all():
        raise InvalidParameter("%s must be finite" % name)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class FeatureSeq(object):
    """Sequence of ``length`` feature vectors of dimension ``dim``

    :param data: ``n x d`` matrix
    :param origin_shape: ``(d, h, w)`` of the volume the sequence was flattened from
    """
    data: np.ndarray
    origin_shape: tuple = None

    def __post_init__(self):
        object.__setattr__(self, 'data', _frozen_matrix(self.data, 2, 'FeatureSeq'))

        if self.origin_shape is not None:
            d, h, w = (int(x) for x in self.origin_shape)
            if (h * w, d) != self.data.shape:
                raise DimensionMismatch((h * w, d), self.data.shape)
            object.__setattr__(self, 'origin_shape', (d, h, w))

    @property
    def length(self):
        return self.data.shape[0]

    @property
    def dim(self):
        return self.data.shape[1]

    def permuted(self, order):
        """Rows reordered by ``order``; the volume layout is dropped"""
        return FeatureSeq(self.data[np.asarray(order)])

    def __add__(self, other):
        if self.data.shape != other.data.shape:
            raise DimensionMismatch(self.data.shape, other.data.shape)
        return FeatureSeq(self.data + other.data, self.origin_shape or other.origin_shape)

    def __repr__(self):
        return "<FeatureSeq n=%d d=%d>" % (self.length, self.dim)


@dataclass(frozen=True, eq=False)
class HeadProjection(object):
    """``W^Q``, ``W^K``, ``W^V`` of one head, each ``d x d_k``"""
    w_q: np.ndarray
    w_k: np.ndarray
    w_v: np.ndarray

    def __post_init__(self):
        for name in ('w_q', 'w_k', 'w_v'):
            object.__setattr__(self, name, _frozen_matrix(getattr(self, name), 2, name))

        if not self.w_q.shape == self.w_k.shape == self.w_v.shape:
            raise DimensionMismatch(self.w_q.shape, self.w_k.shape)

    @property
    def model_dim(self):
        return self.w_q.shape[0]

    @property
    def head_dim(self):
        return self.w_q.shape[1]


@dataclass(frozen=True, eq=False)
class AttentionParams(object):
    """Projection matrices of one multi-head attention layer

    :param w_q: ``h x d x d_k``
    :param w_k: ``h x d x d_k``
    :param w_v: ``h x d x d_k``
    :param w_o: ``(h * d_k) x d``
    :param seed: seed the matrices were drawn from, if any
    """
    w_q: np.ndarray
    w_k: np.ndarray
    w_v: np.ndarray
    w_o: np.ndarray
    seed: int = None

    def __post_init__(self):
        for name in ('w_q', 'w_k', 'w_v'):
            object.__setattr__(self, name, _frozen_matrix(getattr(self, name), 3, name))
        object.__setattr__(self, 'w_o', _frozen_matrix(self.w_o, 2, 'w_o'))

        if not self.w_q.shape == self.w_k.shape == self.w_v.shape:
            raise DimensionMismatch(self.w_q.shape, self.w_k.shape)

        h, d, d_k = self.w_q.shape
        if self.w_o.shape != (h * d_k, d):
            raise DimensionMismatch((h * d_k, d), self.w_o.shape)

    @classmethod
    def from_seed(cls, seed, heads, model_dim, head_dim):
        """Deterministic initialization

        Draws ``W_Q``, ``W_K``, ``W_V`` and then ``W_o`` from
        ``numpy.random.default_rng(seed).standard_normal``, in that order, and
        scales each by ``1 / sqrt(fan_in)`` (``d`` for the head projections,
        ``h * d_k`` for ``W_o``).

        :rtype: :class:`AttentionParams`
        """
        if min(heads, model_dim, head_dim) < 1:
            raise InvalidParameter("heads, model_dim and head_dim must be >= 1")

        rng = np.random.default_rng(seed)
        shape = (heads, model_dim, head_dim)
        scale = 1.0 / np.sqrt(model_dim)

        w_q = rng.standard_normal(shape) * scale
        w_k = rng.standard_normal(shape) * scale
        w_v = rng.standard_normal(shape) * scale
        w_o = rng.standard_normal((heads * head_dim, model_dim)) / np.sqrt(heads * head_dim)

        return cls(w_q, w_k, w_v, w_o, seed)

    @property
    def heads(self):
        return self.w_q.shape[0]

    @property
    def model_dim(self):
        return self.w_q.shape[1]

    @property
    def head_dim(self):
        return self.w_q.shape[2]

    def head(self, index):
        """
        :rtype: :class:`HeadProjection`
        """
        return HeadProjection(self.w_q[index], self.w_k[index], self.w_v[index])

    def __repr__(self):
        return "<AttentionParams h=%d d=%d d_k=%d seed=%r>" % (self.heads, self.model_dim,
                                                             self.head_dim, self.seed)


def _check_qkv(q, k, v, model_dim):
    if k.length != v.length:
        raise DimensionMismatch((k.length,), (v.length,))
    for seq in (q, k, v):
        if seq.dim != model_dim:
            raise DimensionMismatch((model_dim,), (seq.dim,))


def attention_logits(q, k, head):
    """``Q W^Q (K W^K)^T / sqrt(d_k)``, before the softmax

    :rtype: :class:`numpy.ndarray` (``len(q) x len(k)``)
    """
    if q.dim != head.model_dim or k.dim != head.model_dim:
        raise DimensionMismatch((head.model_dim,), (q.dim, k.dim))

    return (q.data @ head.w_q) @ (k.data @ head.w_k).T / np.sqrt(head.head_dim)


def attention_weights(q, k, head):
    """Row-wise softmax of :func:`attention_logits`; each row sums to 1"""
    return softmax(attention_logits(q, k, head), axis=1)


def spda(q, k, v, head):
    """Scaled dot-product attention for one head

    ``softmax(Q W^Q (K W^K)^T / sqrt(d_k)) V W^V``

    :param q: queries (``n_q x d``)
    :type q: :class:`FeatureSeq`
    :param k: keys (``n_k x d``)
    :type k: :class:`FeatureSeq`
    :param v: values (``n_k x d``)
    :type v: :class:`FeatureSeq`
    :param head: projections of the head
    :type head: :class:`HeadProjection`
    :return: ``n_q x d_k`` sequence
    :rtype: :class:`FeatureSeq`
    :raises: :class:`.DimensionMismatch`
    """
    _check_qkv(q, k, v, head.model_dim)
    return FeatureSeq(attention_weights(q, k, head) @ (v.data @ head.w_v))


def multi_head_attention(q, k, v, params):
    """``concat(H_1, ..., H_h) W_o`` with ``H_i = spda(q, k, v, head_i)``

    :type params: :class:`AttentionParams`
    :return: ``n_q x d`` sequence
    :rtype: :class:`FeatureSeq`
    :raises: :class:`.DimensionMismatch`
    """
    _check_qkv(q, k, v, params.model_dim)

    heads = [spda(q, k, v, params.head(i)).data for i in range(params.heads)]

    return FeatureSeq(np.concatenate(heads, axis=1) @ params.w_o)


def _check_layers(layers):
    layers = list(layers)
    if not layers:
        raise InvalidParameter("At least one attention layer is required")
    return layers


def self_attention_block(f_ad, layers):
    """Stacked multi-head self-attention (``Q = K = V``) producing ``F_s``

    :param f_ad: intermediate attention decoder features
    :type f_ad: :class:`FeatureSeq`
    :param layers: one :class:`AttentionParams` per layer
    :type layers: :class:`list`
    :return: ``F_s`` with the same length, dimension and volume layout
    :rtype: :class:`FeatureSeq`
    :raises: :class:`.DimensionMismatch`, :class:`.InvalidParameter`
    """
    current = f_ad
    for params in _check_layers(layers):
        current = multi_head_attention(current, current, current, params)

    return FeatureSeq(current.data, f_ad.origin_shape)


def cross_attention(f_e, f_s, layers):
    """Stacked multi-head cross-attention producing ``F_c``

    The first layer queries with ``F_e``, later layers with the previous
    layer's output; keys and values are ``F_s`` in every layer.

    :rtype: :class:`FeatureSeq`
    """
    current = f_e
    for params in _check_layers(layers):
        current = multi_head_attention(current, f_s, f_s, params)

    return FeatureSeq(current.data, f_e.origin_shape)


def cross_attention_fuse(f_e, f_s, f_int, layers):
    """Cross-attend ``F_e`` to ``F_s`` and add the result to ``F_int``

    :param f_e: encoder features (query side)
    :type f_e: :class:`FeatureSeq`
    :param f_s: self-attended attention decoder features (key and value)
    :type f_s: :class:`FeatureSeq`
    :param f_int: intermediate fusion decoder features, same length as ``f_e``
    :type f_int: :class:`FeatureSeq`
    :param layers: one :class:`AttentionParams` per layer
    :type layers: :class:`list`
    :return: ``F_c + F_int``
    :rtype: :class:`FeatureSeq`
    :raises: :class:`.DimensionMismatch`, :class:`.InvalidParameter`
    """
    if not f_e.dim == f_s.dim == f_int.dim:
        raise DimensionMismatch((f_e.dim, f_s.dim), (f_int.dim,))
    if f_int.length != f_e.length:
        raise DimensionMismatch((f_e.length,), (f_int.length,))

    return cross_attention(f_e, f_s, layers) + f_int


def seq_from_volume(volume):
    """Flatten a ``d x h x w`` feature volume into a sequence

    Spatial position ``(r, c)`` becomes sequence index ``r * w + c``.

    :type volume: :class:`numpy.ndarray`
    :rtype: :class:`FeatureSeq`
    """
    volume = np.asarray(volume, dtype=np.float64)
    if volume.ndim != 3:
        raise InvalidParameter("Expected a d x h x w volume, got shape %s" % (volume.shape,))

    d, h, w = volume.shape
    return FeatureSeq(volume.reshape(d, h * w).T, (d, h, w))


def volume_from_seq(seq):
    """Inverse of :func:`seq_from_volume`

    :rtype: :class:`numpy.ndarray`
    :raises: :class:`.InvalidParameter` when the sequence has no volume layout
    """
    if seq.origin_shape is None:
        raise InvalidParameter("Sequence has no origin_shape")

    d, h, w = seq.origin_shape
    return seq.data.T.reshape(d, h, w).copy()
