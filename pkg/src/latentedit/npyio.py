"""Bit-exact NPY v1.0 reader/writer for latent-code archives.

Only the narrow slice of the format the pipeline produces is supported, and
anything else fails loudly with a structured error: version 1.0, C-order,
little-endian float32/float64, shape (N, 18, 512) or (18, 512). The writer
emits the same canonical bytes as numpy's own ``np.save`` (space-padded
header dictionary, newline terminated, total header a multiple of 64), so
generated files round-trip byte-identically. Every declared size is checked
against the real buffer length before anything is allocated, so hostile
headers cannot trigger unbounded allocation.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass

import numpy as np

from .core import LATENT_SHAPE, LatentCode
from .errors import ConfigError, NpyFormatError

MAGIC = b"\x93NUMPY"
HEADER_ALIGN = 64

_DESCR_BY_TAG = {"f32": "<f4", "f64": "<f8"}
_TAG_BY_DESCR = {v: k for k, v in _DESCR_BY_TAG.items()}
_ITEMSIZE = {"f32": 4, "f64": 8}

DEFAULT_MAX_CODES = 100_000


@dataclass(frozen=True)
class NpyHeader:
    """Parsed NPY header fields (magic is implicit and fixed)."""

    version: tuple
    dtype_tag: str
    fortran_order: bool
    shape: tuple


@dataclass(frozen=True)
class LatentArchive:
    """An ordered collection of latent codes plus the on-disk element width."""

    codes: tuple
    source_dtype: str = "f64"

    def __post_init__(self):
        if self.source_dtype not in _DESCR_BY_TAG:
            raise ConfigError(f"unknown dtype tag {self.source_dtype!r}")
        object.__setattr__(self, "codes", tuple(self.codes))

    def __len__(self):
        return len(self.codes)

    def as_array(self) -> np.ndarray:
        """Stack the codes into an (N, 18, 512) float64 array."""
        return np.stack([c.values for c in self.codes])

    @classmethod
    def from_array(cls, values: np.ndarray, source_dtype: str = "f64") -> "LatentArchive":
        """Build an archive from an (N, 18, 512) or single (18, 512) array."""
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[np.newaxis]
        if arr.ndim != 3 or arr.shape[1:] != LATENT_SHAPE:
            raise NpyFormatError(
                f"shape mismatch: expected (N, 18, 512) or (18, 512), got {arr.shape}"
            )
        return cls(tuple(LatentCode(row) for row in arr), source_dtype)


def parse_header(data: bytes) -> "tuple[NpyHeader, int]":
    """Validate the container framing and return (header, payload offset)."""
    if len(data) < len(MAGIC) or data[: len(MAGIC)] != MAGIC:
        raise NpyFormatError("not an NPY file: bad magic bytes")
    if len(data) < 10:
        raise NpyFormatError("payload length mismatch: header truncated")
    version = (data[6], data[7])
    if version != (1, 0):
        raise NpyFormatError(
            f"unsupported layout: npy version {version[0]}.{version[1]}, only 1.0 is supported"
        )
    header_len = int.from_bytes(data[8:10], "little")
    offset = 10 + header_len
    if offset > len(data):
        raise NpyFormatError("payload length mismatch: header truncated")
    if offset % HEADER_ALIGN != 0:
        raise NpyFormatError(
            f"unsupported layout: total header length {offset} is not a multiple of {HEADER_ALIGN}"
        )
    text = data[10:offset]
    if not text.endswith(b"\n"):
        raise NpyFormatError("unsupported layout: header dictionary not newline-terminated")
    try:
        fields = ast.literal_eval(text.decode("latin1"))
    except (ValueError, SyntaxError):
        raise NpyFormatError("unsupported layout: malformed header dictionary") from None
    if not isinstance(fields, dict) or set(fields) != {"descr", "fortran_order", "shape"}:
        raise NpyFormatError("unsupported layout: malformed header dictionary")

    descr = fields["descr"]
    if descr not in _TAG_BY_DESCR:
        raise NpyFormatError(
            f"unsupported layout: dtype {descr!r}, only little-endian '<f4'/'<f8' are supported"
        )
    if fields["fortran_order"] is not False:
        raise NpyFormatError("unsupported layout: fortran_order must be False (C-order only)")
    shape = fields["shape"]
    if not (
        isinstance(shape, tuple)
        and all(isinstance(n, int) and not isinstance(n, bool) and n >= 0 for n in shape)
    ):
        raise NpyFormatError("unsupported layout: malformed header dictionary")
    return NpyHeader((1, 0), _TAG_BY_DESCR[descr], False, shape), offset


def read_npy(data: bytes, max_codes: int = DEFAULT_MAX_CODES) -> LatentArchive:
    """Parse a complete NPY file image into a latent archive.

    float32 payloads are widened to float64 losslessly. Raises
    :class:`NpyFormatError` on any unsupported or malformed input; no byte
    sequence causes a crash.
    """
    header, offset = parse_header(bytes(data))
    shape = header.shape
    if len(shape) == 2:
        if shape != LATENT_SHAPE:
            raise NpyFormatError(
                f"shape mismatch: expected (N, 18, 512) or (18, 512), got {shape}"
            )
        shape = (1,) + shape
    elif len(shape) != 3 or shape[1:] != LATENT_SHAPE:
        raise NpyFormatError(
            f"shape mismatch: expected (N, 18, 512) or (18, 512), got {shape}"
        )
    n = shape[0]
    if n > max_codes:
        raise NpyFormatError(f"shape mismatch: {n} codes exceeds the limit of {max_codes}")

    expected = n * LATENT_SHAPE[0] * LATENT_SHAPE[1] * _ITEMSIZE[header.dtype_tag]
    payload = bytes(data)[offset:]
    if len(payload) != expected:
        raise NpyFormatError(
            f"payload length mismatch: expected {expected} bytes, got {len(payload)}"
        )
    arr = np.frombuffer(payload, dtype=_DESCR_BY_TAG[header.dtype_tag])
    arr = arr.astype(np.float64).reshape(shape)
    return LatentArchive(tuple(LatentCode(row) for row in arr), header.dtype_tag)


def write_npy(archive: LatentArchive, dtype: "str | None" = None) -> bytes:
    """Serialize an archive as a canonical NPY v1.0 file image.

    ``dtype`` is "f32" or "f64"; None keeps the archive's source width.
    Narrowing to f32 rejects values outside the f32 range.
    """
    if len(archive) == 0:
        raise ConfigError("cannot write an empty archive")
    tag = archive.source_dtype if dtype is None else dtype
    if tag not in _DESCR_BY_TAG:
        raise ConfigError(f"unknown dtype tag {tag!r}")
    values = archive.as_array()
    if tag == "f32":
        with np.errstate(over="ignore"):
            narrowed = values.astype(np.float32)
        if not np.isfinite(narrowed).all():
            raise NpyFormatError("narrowing overflow: values exceed the float32 range")
        payload = narrowed.tobytes(order="C")
    else:
        payload = values.tobytes(order="C")

    dict_text = "{'descr': '%s', 'fortran_order': False, 'shape': %s, }" % (
        _DESCR_BY_TAG[tag],
        repr(values.shape),
    )
    # Pad with spaces + final newline so magic(6) + version(2) + len(2) + text
    # lands on a multiple of 64, matching numpy's canonical writer.
    unpadded = 10 + len(dict_text) + 1
    padding = (HEADER_ALIGN - unpadded % HEADER_ALIGN) % HEADER_ALIGN
    text = dict_text + " " * padding + "\n"
    return MAGIC + bytes((1, 0)) + len(text).to_bytes(2, "little") + text.encode("latin1") + payload
