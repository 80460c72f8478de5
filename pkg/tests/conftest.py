import os
import numpy as np
import pytest
from PIL import Image
from cgleval.masks import BinaryMask, LabelMap

# Two blobs on a 128x128 canvas: A is 40x40, B is 30x30
SIZE = 128
BLOCK_A = (12, 12, 40)
BLOCK_B = (80, 80, 30)


def block(top, left, size, shape=(SIZE, SIZE), height=None):
    out = np.zeros(shape, dtype=bool)
    out[top:top + (height or size), left:left + size] = True
    return out


def mask(array):
    return BinaryMask(np.asarray(array, dtype=bool))


def label_map(array, num_classes=2):
    return LabelMap(np.asarray(array, dtype=np.int64), num_classes)


def write_png(path, array, scale=255):
    """Binary arrays are written as 0/255 unless ``scale`` says otherwise"""
    Image.fromarray((np.asarray(array).astype(np.uint8) * scale).astype(np.uint8)).save(path)
    return path


def reference_blur(data, sigma, radius, replicate=False):
    """Direct sum over all kernel offsets, no separability"""
    data = np.asarray(data, dtype=np.float64)
    offsets = np.arange(-radius, radius + 1)
    weights = np.exp(-(offsets[:, None] ** 2 + offsets[None, :] ** 2) / (2.0 * sigma * sigma))
    weights /= weights.sum()

    padded = np.pad(data, radius, mode='edge' if replicate else 'constant')
    height, width = data.shape
    out = np.zeros_like(data)

    for i in offsets:
        for j in offsets:
            out += weights[i + radius, j + radius] * padded[radius + i:radius + i + height,
                                                            radius + j:radius + j + width]
    return out


def reference_dar(pred, gt, sigma=3.0, radius=9, th=0.999, replicate=False):
    pred = np.asarray(pred, dtype=bool)
    gt = np.asarray(gt, dtype=bool)

    fp = reference_blur(pred & ~gt, sigma, radius, replicate) > th
    fn = reference_blur(gt & ~pred, sigma, radius, replicate) > th

    return 1.0 - np.count_nonzero(fp | fn) / np.count_nonzero(gt)


@pytest.fixture
def two_blob_gt():
    return block(*BLOCK_A) | block(*BLOCK_B)


@pytest.fixture
def dataset(tmp_path):
    """Three pairs: a perfect prediction, a dilated A with B missed, an empty image"""
    pred_dir = tmp_path / 'pred'
    gt_dir = tmp_path / 'gt'
    pred_dir.mkdir()
    gt_dir.mkdir()

    gt = block(*BLOCK_A) | block(*BLOCK_B)
    dilated = block(BLOCK_A[0] - 2, BLOCK_A[1] - 2, BLOCK_A[2] + 4)
    empty = np.zeros((SIZE, SIZE), dtype=bool)

    write_png(os.path.join(str(gt_dir), 'a.png'), gt)
    write_png(os.path.join(str(pred_dir), 'a.png'), gt)
    write_png(os.path.join(str(gt_dir), 'b.png'), gt)
    write_png(os.path.join(str(pred_dir), 'b.png'), dilated)
    write_png(os.path.join(str(gt_dir), 'c.png'), empty)
    write_png(os.path.join(str(pred_dir), 'c.png'), empty)

    return str(pred_dir), str(gt_dir)
