import struct

import numpy as np
import pytest

from tubal import tensorfile as tf


def test_header_layout():
    data = np.arange(6.0).reshape(1, 2, 3)
    buf = tf.encode(data)
    assert buf[:4] == b"TTEN"
    assert struct.unpack_from("<I", buf, 4)[0] == 1
    assert buf[8] == 0
    assert struct.unpack_from("<I", buf, 9)[0] == 2
    assert struct.unpack_from("<3Q", buf, 13) == (1, 2, 3)
    payload = np.frombuffer(buf[13 + 24:], dtype="<f8")
    # first index fastest, tubal index slowest
    np.testing.assert_array_equal(payload, data.ravel(order="F"))
    assert payload[1] == data[0, 1, 0]


@pytest.mark.parametrize("complex_", [False, True])
def test_roundtrip(tmp_path, rng, complex_):
    X = rng.standard_normal((3, 4, 2, 5))
    if complex_:
        X = X + 1j * rng.standard_normal(X.shape)
    tf.write(tmp_path / "x.tten", X)
    Y = tf.read(tmp_path / "x.tten")
    assert Y.dtype == X.dtype
    np.testing.assert_array_equal(Y, X)


def test_corrupt_files():
    good = tf.encode(np.ones((2, 2)))
    with pytest.raises(tf.TensorFileError, match="magic"):
        tf.decode(b"XXXX" + good[4:])
    with pytest.raises(tf.TensorFileError, match="version"):
        tf.decode(good[:4] + struct.pack("<I", 2) + good[8:])
    with pytest.raises(tf.TensorFileError, match="dtype"):
        tf.decode(good[:8] + b"\x07" + good[9:])
    with pytest.raises(tf.TensorFileError, match="payload"):
        tf.decode(good[:-1])
    with pytest.raises(tf.TensorFileError):
        tf.decode(b"TT")
    with pytest.raises(tf.TensorFileError):
        tf.encode(np.float64(1.0))
