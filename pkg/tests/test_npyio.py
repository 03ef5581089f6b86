import io

import numpy as np
import pytest

from latentedit import (
    ConfigError,
    LatentArchive,
    LatentCode,
    NpyFormatError,
    read_npy,
    write_npy,
)


def np_save_bytes(arr):
    buf = io.BytesIO()
    np.save(buf, arr)
    return buf.getvalue()


def rand_archive(rng, n):
    return LatentArchive.from_array(rng.standard_normal((n, 18, 512)))


class TestWrite:
    def test_matches_numpy_reference_writer_f64(self):
        rng = np.random.default_rng(0)
        arr = rng.standard_normal((3, 18, 512))
        assert write_npy(LatentArchive.from_array(arr)) == np_save_bytes(arr)

    def test_matches_numpy_reference_writer_f32(self):
        rng = np.random.default_rng(1)
        arr = rng.standard_normal((2, 18, 512)).astype(np.float32)
        archive = LatentArchive.from_array(arr.astype(np.float64), source_dtype="f32")
        assert write_npy(archive) == np_save_bytes(arr)

    def test_frozen_header_bytes(self):
        # Canonical v1.0 header: 128 bytes total, space-padded, newline-terminated.
        data = write_npy(LatentArchive.from_array(np.zeros((1, 18, 512))))
        expected = (
            b"\x93NUMPY\x01\x00v\x00{'descr': '<f8', 'fortran_order': False,"
            b" 'shape': (1, 18, 512), }" + b" " * 52 + b"\n"
        )
        assert data[:128] == expected
        assert len(data) == 128 + 18 * 512 * 8

    def test_single_code_promoted_to_rank3(self):
        data = write_npy(LatentArchive.from_array(np.zeros((18, 512))))
        assert b"'shape': (1, 18, 512)" in data[:128]

    def test_empty_archive_rejected(self):
        with pytest.raises(ConfigError):
            write_npy(LatentArchive(()))

    def test_narrowing_overflow(self):
        values = np.zeros((1, 18, 512))
        values[0, 0, 0] = 1e300
        with pytest.raises(NpyFormatError, match="narrowing overflow"):
            write_npy(LatentArchive.from_array(values), dtype="f32")


class TestRoundTrip:
    def test_f64_value_round_trip(self):
        rng = np.random.default_rng(2)
        for n in (1, 2, 7):
            archive = rand_archive(rng, n)
            back = read_npy(write_npy(archive))
            assert len(back) == n
            assert np.array_equal(back.as_array(), archive.as_array())

    def test_f64_byte_round_trip(self):
        rng = np.random.default_rng(3)
        data = write_npy(rand_archive(rng, 4))
        assert write_npy(read_npy(data)) == data

    def test_f32_byte_round_trip(self):
        rng = np.random.default_rng(4)
        arr = rng.standard_normal((5, 18, 512)).astype(np.float32)
        data = np_save_bytes(arr)
        back = read_npy(data)
        assert back.source_dtype == "f32"
        assert write_npy(back) == data

    def test_f32_values_widen_losslessly(self):
        rng = np.random.default_rng(5)
        arr = rng.standard_normal((2, 18, 512)).astype(np.float32)
        back = read_npy(np_save_bytes(arr))
        assert np.array_equal(back.as_array(), arr.astype(np.float64))

    def test_reads_numpy_written_files(self):
        rng = np.random.default_rng(6)
        arr = rng.standard_normal((2, 18, 512))
        assert np.array_equal(read_npy(np_save_bytes(arr)).as_array(), arr)

    def test_single_code_shape_promoted(self):
        arr = np.zeros((18, 512))
        archive = read_npy(np_save_bytes(arr))
        assert len(archive) == 1
        assert (archive.codes[0].values == 0.0).all()


class TestStructuredFailures:
    def test_all_zero_archive(self):
        archive = read_npy(np_save_bytes(np.zeros((2, 18, 512))))
        assert len(archive) == 2
        assert all((c.values == 0.0).all() for c in archive.codes)

    def test_truncated_file(self):
        with pytest.raises(NpyFormatError, match="payload length mismatch"):
            read_npy(np_save_bytes(np.zeros((1, 18, 512)))[:10])

    def test_truncated_payload(self):
        data = np_save_bytes(np.zeros((1, 18, 512)))
        with pytest.raises(NpyFormatError, match="payload length mismatch"):
            read_npy(data[:-1])

    def test_trailing_garbage(self):
        data = np_save_bytes(np.zeros((1, 18, 512)))
        with pytest.raises(NpyFormatError, match="payload length mismatch"):
            read_npy(data + b"x")

    def test_bad_magic(self):
        with pytest.raises(NpyFormatError, match="not an NPY file"):
            read_npy(b"NOTNPY" + b"\x00" * 100)

    def test_empty_input(self):
        with pytest.raises(NpyFormatError, match="not an NPY file"):
            read_npy(b"")

    def test_unsupported_version(self):
        data = bytearray(np_save_bytes(np.zeros((1, 18, 512))))
        data[6] = 2
        with pytest.raises(NpyFormatError, match="unsupported layout"):
            read_npy(bytes(data))

    def test_unsupported_dtype(self):
        with pytest.raises(NpyFormatError, match="unsupported layout"):
            read_npy(np_save_bytes(np.zeros((1, 18, 512), dtype=np.int64)))

    def test_fortran_order_rejected(self):
        arr = np.asfortranarray(np.random.default_rng(0).standard_normal((18, 512)))
        with pytest.raises(NpyFormatError, match="unsupported layout"):
            read_npy(np_save_bytes(arr))

    def test_wrong_shape_reports_actual(self):
        with pytest.raises(NpyFormatError, match=r"shape mismatch.*\(18, 511\)"):
            read_npy(np_save_bytes(np.zeros((18, 511))))

    def test_wrong_rank(self):
        with pytest.raises(NpyFormatError, match="shape mismatch"):
            read_npy(np_save_bytes(np.zeros(9216)))

    def test_hostile_header_bounded_by_code_limit(self):
        # Header claims a billion codes; must fail on the limit check before
        # any payload-sized allocation happens.
        with pytest.raises(NpyFormatError, match="shape mismatch"):
            read_npy(_forged_header((1_000_000_000, 18, 512)))

    def test_max_codes_configurable(self):
        data = np_save_bytes(np.zeros((3, 18, 512)))
        with pytest.raises(NpyFormatError, match="exceeds the limit"):
            read_npy(data, max_codes=2)

    def test_nan_payload_rejected(self):
        values = np.zeros((1, 18, 512))
        values[0, 4, 2] = np.nan
        with pytest.raises(Exception) as err:
            read_npy(np_save_bytes(values))
        assert "finite" in str(err.value)

    def test_fuzz_never_crashes(self):
        rng = np.random.default_rng(7)
        prefix = np_save_bytes(np.zeros((1, 18, 512)))[:64]
        for _ in range(300):
            size = int(rng.integers(0, 400))
            blob = bytes(rng.integers(0, 256, size=size, dtype=np.uint8))
            if rng.random() < 0.5:
                blob = prefix[: int(rng.integers(0, 64))] + blob
            with pytest.raises(NpyFormatError):
                read_npy(blob)


def _forged_header(shape):
    dict_text = "{'descr': '<f8', 'fortran_order': False, 'shape': %s, }" % repr(shape)
    pad = (64 - (10 + len(dict_text) + 1) % 64) % 64
    text = dict_text + " " * pad + "\n"
    return b"\x93NUMPY\x01\x00" + len(text).to_bytes(2, "little") + text.encode() + b"\x00" * 64
