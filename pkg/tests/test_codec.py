import struct

import numpy as np
import pytest

from tensvd import CompressionTarget, compress, decompress, t_hosvd
from tensvd import codec
from tensvd.codec import (
    BadMagicError,
    CodecError,
    ElementCountMismatchError,
    PositionOutOfRangeError,
    TruncatedStreamError,
    UnsupportedVersionError,
)

from conftest import random_tensor


@pytest.fixture
def packed(rng):
    t = random_tensor(rng, (6, 10, 3))
    c = compress(t, CompressionTarget.accuracy(0.3), order_hint=4)
    return t, c, codec.encode(c)


def f32(a):
    return np.asarray(a, dtype=np.float32).astype(np.float64)


def test_round_trip(packed):
    _, c, data = packed
    d = codec.decode(data)
    assert d.plan == c.plan
    np.testing.assert_array_equal(d.sparse_core.positions, c.sparse_core.positions)
    np.testing.assert_array_equal(d.sparse_core.values, f32(c.sparse_core.values))
    for a, b in zip(d.factors, c.factors):
        np.testing.assert_array_equal(a, f32(b))
    assert d.total_energy == c.total_energy
    assert d.stored_count == c.stored_count


def test_deterministic(packed):
    _, c, data = packed
    assert codec.encode(c) == data


def test_header_layout(packed):
    _, c, data = packed
    assert codec.header_size(3, 4) == 4 + 2 + 4 + 3 * 4 + 4 + 4 * 4 == 42
    assert data[:4] == b"TSVD"
    assert struct.unpack_from("<H", data, 4)[0] == codec.VERSION
    assert struct.unpack_from("<4I", data, 6) == (3, 6, 10, 3)
    assert struct.unpack_from("<I", data, 22)[0] == 4
    assert struct.unpack_from("<4I", data, 26) == c.plan.reshaped_dims


def test_size_formula(packed):
    _, c, data = packed
    k = len(c.sparse_core)
    js = c.plan.reshaped_dims
    assert len(data) == 42 + 4 * sum(j * j for j in js) + 8 + 12 * k + 8
    assert len(data) == codec.encoded_size(c)


def test_narrowing_error_is_small(packed):
    t, c, data = packed
    exact = decompress(c)
    narrowed = decompress(codec.decode(data))
    assert np.linalg.norm(exact.data - narrowed.data) / np.linalg.norm(exact.data) < 1e-6


def test_bad_magic(packed):
    _, _, data = packed
    with pytest.raises(BadMagicError):
        codec.decode(b"XSVD" + data[4:])


def test_bad_version(packed):
    _, _, data = packed
    with pytest.raises(UnsupportedVersionError):
        codec.decode(data[:4] + struct.pack("<H", 99) + data[6:])


def test_truncated_in_factors(packed):
    _, _, data = packed
    with pytest.raises(TruncatedStreamError, match=r"factor 0: need \d+ bytes"):
        codec.decode(data[:50])


@pytest.mark.parametrize("cut", [0, 3, 5, 20, -1, -9])
def test_truncated_anywhere(packed, cut):
    _, _, data = packed
    with pytest.raises(TruncatedStreamError):
        codec.decode(data[:cut] if cut else b"")


def test_element_count_mismatch(packed):
    _, _, data = packed
    broken = bytearray(data)
    struct.pack_into("<I", broken, 30, 7)
    with pytest.raises(ElementCountMismatchError):
        codec.decode(bytes(broken))


def test_position_out_of_range(packed):
    _, c, data = packed
    k = len(c.sparse_core)
    broken = bytearray(data)
    pos_offset = len(data) - 8 - 8 * k
    struct.pack_into("<Q", broken, pos_offset, 10**9)
    with pytest.raises(PositionOutOfRangeError):
        codec.decode(bytes(broken))


def test_trailing_bytes(packed):
    _, _, data = packed
    with pytest.raises(CodecError):
        codec.decode(data + b"\0")


def test_error_classes_are_distinct():
    classes = {BadMagicError, UnsupportedVersionError, TruncatedStreamError,
               PositionOutOfRangeError, ElementCountMismatchError}
    assert len(classes) == 5
    assert all(issubclass(c, CodecError) for c in classes)


def test_tucker_container_round_trip(rng, tmp_path):
    t = random_tensor(rng, (5, 6, 3))
    f = t_hosvd(t, (3, 4, 3))
    data = codec.encode_tucker(f)
    assert data[:4] == codec.TUCKER_MAGIC
    g = codec.decode_any(data)
    assert g.ranks == f.ranks and g.dims == f.dims
    np.testing.assert_array_equal(g.core.data, f32(f.core.data))
    n = codec.save(f, tmp_path / "m.thosvd")
    assert n == len(data)
    assert codec.load(tmp_path / "m.thosvd").ranks == (3, 4, 3)
    with pytest.raises(TruncatedStreamError):
        codec.decode_tucker(data[:-1])


def test_save_load_file(packed, tmp_path):
    _, c, data = packed
    p = tmp_path / "x.tsvd"
    assert codec.save(c, p) == len(data)
    assert p.read_bytes() == data
    assert codec.load(p).plan == c.plan
