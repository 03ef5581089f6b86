#!/usr/bin/env python3
# The NPY container used for latent archives, and what the parser rejects.
#
# Only version 1.0, C-order, little-endian f32/f64, shape (N, 18, 512) or
# (18, 512) is accepted; everything else is a structured error rather than
# a crash. The writer's bytes match numpy's own np.save exactly.

import io

import numpy as np

from latentedit import LatentArchive, NpyFormatError, read_npy, write_npy

rng = np.random.default_rng(7)
arr = rng.standard_normal((4, 18, 512))

data = write_npy(LatentArchive.from_array(arr))
print(f"wrote {len(data)} bytes, header: {data[10:70].decode('latin1').strip()}")

# Byte-for-byte identical to numpy's writer.
buf = io.BytesIO()
np.save(buf, arr)
print("matches np.save output?", data == buf.getvalue())

# Values survive the round trip exactly (f64 path is lossless).
back = read_npy(data)
print("round trip exact?", np.array_equal(back.as_array(), arr))
print("re-serialization byte-identical?", write_npy(back) == data)

# f32 files are widened losslessly on read and narrowed back on write.
data32 = write_npy(LatentArchive.from_array(arr), dtype="f32")
back32 = read_npy(data32)
print("f32 round trip within quantization?",
      np.array_equal(back32.as_array(), arr.astype(np.float32).astype(np.float64)))

# Malformed inputs fail loudly with a structured error.
for label, blob in [
    ("truncated file", data[:10]),
    ("bad magic", b"NOTNPY" + data[6:]),
    ("trailing garbage", data + b"\x00"),
]:
    try:
        read_npy(blob)
    except NpyFormatError as err:
        print(f"{label}: {err}")
