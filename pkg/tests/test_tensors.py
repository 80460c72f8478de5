import numpy as np
import pytest
from cgleval.attention import seq_from_volume
from cgleval.exceptions import InvalidParameter, MalformedVolume
from cgleval.tensors import load_volume, save_volume


def test_binary_layout(tmp_path):
    volume = np.arange(24, dtype=np.float64).reshape(2, 3, 4) / 7.0
    path = save_volume(volume, str(tmp_path / 'f.bin'))

    raw = (tmp_path / 'f.bin').read_bytes()
    assert np.frombuffer(raw[:24], dtype='<i8').tolist() == [2, 3, 4]
    assert len(raw) == 24 + 24 * 8

    assert np.array_equal(load_volume(path), volume)


def test_text_volume_keeps_full_precision(tmp_path):
    volume = np.random.default_rng(1).standard_normal((3, 2, 2))
    path = save_volume(volume, str(tmp_path / 'f.txt'))

    assert (tmp_path / 'f.txt').read_text().splitlines()[0] == "3 2 2"
    assert np.array_equal(load_volume(path), volume)


def test_loaded_volume_feeds_attention(tmp_path):
    path = tmp_path / 'v.txt'
    path.write_text("2 1 2\n1 2\n3 4\n")

    s = seq_from_volume(load_volume(str(path)))

    assert s.data.tolist() == [[1.0, 3.0], [2.0, 4.0]]


def test_malformed_volumes(tmp_path):
    short = tmp_path / 'short.bin'
    short.write_bytes(np.array([2, 2, 2], dtype='<i8').tobytes() + np.zeros(3, dtype='<f8').tobytes())
    with pytest.raises(MalformedVolume):
        load_volume(str(short))

    header = tmp_path / 'header.bin'
    header.write_bytes(b'\x00' * 10)
    with pytest.raises(MalformedVolume):
        load_volume(str(header))

    text = tmp_path / 'bad.txt'
    text.write_text("1 1 2\n0.5 abc\n")
    with pytest.raises(MalformedVolume):
        load_volume(str(text))

    zero = tmp_path / 'zero.txt'
    zero.write_text("0 1 1\n")
    with pytest.raises(MalformedVolume):
        load_volume(str(zero))


def test_format_detection(tmp_path):
    with pytest.raises(InvalidParameter):
        load_volume(str(tmp_path / 'volume.npy'))
    with pytest.raises(InvalidParameter):
        save_volume(np.zeros((2, 2)), str(tmp_path / 'flat.bin'))

    path = save_volume(np.ones((1, 1, 2)), str(tmp_path / 'volume.dat'), fmt='text')
    assert load_volume(path, fmt='text').shape == (1, 1, 2)
