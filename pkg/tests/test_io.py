import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from segloss import (
    TensorFileError,
    ValidationError,
    file_digest,
    read_pgm,
    read_tensor,
    write_tensor,
)


def valid_header(code=3, dims=(2, 2)):
    return b"NTF1" + bytes([code, len(dims), 0, 0]) + struct.pack(f"<{len(dims)}I", *dims)


class TestRoundTrip:
    @pytest.mark.parametrize("dtype", [np.uint8, np.float32, np.float64])
    @pytest.mark.parametrize("shape", [(5,), (3, 4), (2, 3, 4), (2, 2, 2, 3)])
    def test_bit_exact(self, tmp_path, dtype, shape):
        rng = np.random.default_rng(0)
        if dtype == np.uint8:
            arr = rng.integers(0, 256, size=shape).astype(dtype)
        else:
            arr = rng.standard_normal(shape).astype(dtype)
        path = tmp_path / "t.ntf"
        write_tensor(path, arr)
        back = read_tensor(path)
        assert back.dtype == arr.dtype
        np.testing.assert_array_equal(back, arr)

    def test_bool_written_as_uint8(self, tmp_path):
        path = tmp_path / "m.ntf"
        write_tensor(path, np.array([True, False, True]))
        back = read_tensor(path, expect="mask")
        np.testing.assert_array_equal(back, [True, False, True])

    @given(arr=hnp.arrays(np.float64, st.tuples(st.integers(1, 4), st.integers(1, 4)),
                          elements=st.floats(-1e6, 1e6)))
    @settings(max_examples=25, deadline=None)
    def test_float64_payload_survives(self, tmp_path_factory, arr):
        path = tmp_path_factory.mktemp("rt") / "x.ntf"
        write_tensor(path, arr)
        np.testing.assert_array_equal(read_tensor(path), arr)

    def test_write_rejects_unsupported_dtype(self, tmp_path):
        with pytest.raises(ValidationError):
            write_tensor(tmp_path / "x.ntf", np.zeros(3, dtype=np.int32))

    def test_write_rejects_empty_and_high_rank(self, tmp_path):
        with pytest.raises(ValidationError):
            write_tensor(tmp_path / "x.ntf", np.zeros((0,)))
        with pytest.raises(ValidationError):
            write_tensor(tmp_path / "x.ntf", np.zeros((1,) * 5))


def _roundtrip_error(tmp_path, blob, **kwargs):
    path = tmp_path / "bad.ntf"
    path.write_bytes(blob)
    with pytest.raises(TensorFileError) as exc_info:
        read_tensor(path, **kwargs)
    return exc_info.value


class TestMalformedFiles:
    def test_truncated_header(self, tmp_path):
        err = _roundtrip_error(tmp_path, b"NTF")
        assert err.code == "truncated"

    def test_bad_magic(self, tmp_path):
        err = _roundtrip_error(tmp_path, b"XXXX" + bytes(8))
        assert err.code == "bad-magic"
        assert "offset 0" in str(err)

    def test_bad_dtype_code(self, tmp_path):
        err = _roundtrip_error(tmp_path, b"NTF1" + bytes([9, 1, 0, 0]) + struct.pack("<I", 1))
        assert err.code == "bad-dtype"

    def test_bad_ndim(self, tmp_path):
        err = _roundtrip_error(tmp_path, b"NTF1" + bytes([1, 5, 0, 0]) + bytes(20))
        assert err.code == "bad-ndim"
        err = _roundtrip_error(tmp_path, b"NTF1" + bytes([1, 0, 0, 0]))
        assert err.code == "bad-ndim"

    def test_reserved_bytes_must_be_zero(self, tmp_path):
        err = _roundtrip_error(tmp_path, b"NTF1" + bytes([1, 1, 7, 0]) + struct.pack("<I", 1) + b"\x00")
        assert err.code == "bad-reserved"

    def test_truncated_dims(self, tmp_path):
        err = _roundtrip_error(tmp_path, b"NTF1" + bytes([1, 2, 0, 0]) + struct.pack("<I", 1))
        assert err.code == "truncated"

    def test_zero_dimension(self, tmp_path):
        err = _roundtrip_error(tmp_path, valid_header(1, (0, 3)) + b"")
        assert err.code == "bad-dims"

    def test_short_payload(self, tmp_path):
        err = _roundtrip_error(tmp_path, valid_header(3, (2, 2)) + bytes(8))
        assert err.code == "truncated"
        assert "expected 32" in str(err)

    def test_trailing_bytes(self, tmp_path):
        err = _roundtrip_error(tmp_path, valid_header(1, (2, 2)) + bytes(5))
        assert err.code == "trailing-bytes"


class TestExpectations:
    def test_labels_reject_float_storage(self, tmp_path):
        blob = valid_header(3, (2,)) + struct.pack("<2d", 0.0, 1.0)
        err = _roundtrip_error(tmp_path, blob, expect="labels")
        assert err.code == "dtype-mismatch"

    def test_labels_range_checked(self, tmp_path):
        path = tmp_path / "l.ntf"
        write_tensor(path, np.array([0, 1, 9], dtype=np.uint8))
        with pytest.raises(TensorFileError) as exc_info:
            read_tensor(path, expect="labels", num_classes=2)
        assert exc_info.value.code == "label-range"
        assert read_tensor(path, expect="labels").dtype == np.int64

    def test_mask_rejects_other_values(self, tmp_path):
        path = tmp_path / "m.ntf"
        write_tensor(path, np.array([0, 2], dtype=np.uint8))
        with pytest.raises(TensorFileError) as exc_info:
            read_tensor(path, expect="mask")
        assert exc_info.value.code == "bad-mask-value"
        assert "(1,)" in str(exc_info.value)

    def test_probs_reject_uint8_and_rank_1(self, tmp_path):
        path = tmp_path / "p.ntf"
        write_tensor(path, np.array([1, 0], dtype=np.uint8))
        with pytest.raises(TensorFileError) as exc_info:
            read_tensor(path, expect="probs")
        assert exc_info.value.code == "dtype-mismatch"

        write_tensor(path, np.array([0.5, 0.5]))
        with pytest.raises(TensorFileError) as exc_info:
            read_tensor(path, expect="probs")
        assert exc_info.value.code == "bad-shape"

    def test_probs_simplex_enforced(self, tmp_path):
        path = tmp_path / "p.ntf"
        write_tensor(path, np.array([[0.5, 0.4]]))
        with pytest.raises(TensorFileError) as exc_info:
            read_tensor(path, expect="probs")
        assert exc_info.value.code == "simplex"

    def test_float32_probs_renormalized_to_float64(self, tmp_path):
        path = tmp_path / "p.ntf"
        s = np.array([[0.3, 0.7], [0.6, 0.4]], dtype=np.float32)
        write_tensor(path, s)
        back = read_tensor(path, expect="probs")
        assert back.dtype == np.float64
        np.testing.assert_array_equal(back.sum(-1), 1.0)

    def test_float32_tolerance_is_looser(self, tmp_path):
        # a row sum off by ~1e-7 passes the float32 gate but would fail float64
        path32 = tmp_path / "p32.ntf"
        row = np.array([[0.5, 0.5 + 2e-7]])
        write_tensor(path32, row.astype(np.float32))
        read_tensor(path32, expect="probs")
        path64 = tmp_path / "p64.ntf"
        write_tensor(path64, row)
        with pytest.raises(TensorFileError):
            read_tensor(path64, expect="probs")

    def test_unknown_expectation_rejected(self, tmp_path):
        path = tmp_path / "x.ntf"
        write_tensor(path, np.zeros(2))
        with pytest.raises(ValidationError):
            read_tensor(path, expect="labelz")


class TestPgm:
    def test_reads_binary_pgm_with_comments(self, tmp_path):
        path = tmp_path / "m.pgm"
        raster = bytes([0, 255, 7, 0, 0, 1])
        path.write_bytes(b"P5\n# a comment\n3 2\n255\n" + raster)
        mask = read_pgm(path)
        np.testing.assert_array_equal(mask, [[False, True, True], [False, False, True]])

    def test_rejects_ascii_pgm(self, tmp_path):
        path = tmp_path / "m.pgm"
        path.write_bytes(b"P2\n2 2\n255\n0 1 1 0\n")
        with pytest.raises(TensorFileError) as exc_info:
            read_pgm(path)
        assert exc_info.value.code == "unsupported-pgm"

    def test_rejects_wide_maxval(self, tmp_path):
        path = tmp_path / "m.pgm"
        path.write_bytes(b"P5\n1 1\n65535\n\x00\x00")
        with pytest.raises(TensorFileError) as exc_info:
            read_pgm(path)
        assert exc_info.value.code == "unsupported-pgm"

    def test_rejects_truncated_raster(self, tmp_path):
        path = tmp_path / "m.pgm"
        path.write_bytes(b"P5\n4 4\n255\n\x00\x00")
        with pytest.raises(TensorFileError) as exc_info:
            read_pgm(path)
        assert exc_info.value.code == "truncated"

    def test_rejects_foreign_magic(self, tmp_path):
        path = tmp_path / "m.pgm"
        path.write_bytes(b"P6\n1 1\n255\n\x00\x00\x00")
        with pytest.raises(TensorFileError) as exc_info:
            read_pgm(path)
        assert exc_info.value.code == "bad-magic"


class TestDigest:
    def test_sha256_of_known_bytes(self, tmp_path):
        path = tmp_path / "d.bin"
        path.write_bytes(b"abc")
        assert file_digest(path) == (
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        )
