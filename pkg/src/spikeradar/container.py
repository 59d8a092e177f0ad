"""Single-tensor container file format.

A container file is one UTF-8 JSON header line followed by a raw little-endian
payload:

    {"dtype": "f32", "shape": [48, 100], "axes": ["time", "doppler"], "endian": "little"}\n
    <payload bytes>

Supported dtype tags:

    f32  little-endian float32
    c64  little-endian complex64, interleaved (re, im) pairs
    u1   bit-packed binary values, C-order element order, MSB-first within each
         byte, final byte zero-padded
    f64  little-endian float64 (model weights)
    i8   int8 (quantized weight codes)

Records can be stacked in one file (the model file format does this), so the
read/write primitives also operate on open binary file objects.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from .errors import InvalidInput

# Caps the header line; a real header is well under 1 KiB.
_MAX_HEADER_BYTES = 65536

_DTYPES = {
    "f32": np.dtype("<f4"),
    "c64": np.dtype("<c8"),
    "f64": np.dtype("<f8"),
    "i8": np.dtype("int8"),
}


def dtype_tag_for(values: np.ndarray) -> str:
    """Infer the container dtype tag for an array, or raise InvalidInput."""
    kind = values.dtype.kind
    if kind == "f":
        return "f32" if values.dtype.itemsize <= 4 else "f64"
    if kind == "c":
        return "c64"
    if kind == "b" or (kind == "u" and values.dtype.itemsize == 1):
        return "u1"
    if kind == "i" and values.dtype.itemsize == 1:
        return "i8"
    if kind in ("u", "i"):
        # wider ints are accepted only as bit arrays; anything else would
        # narrow silently
        if _is_binary(values):
            return "u1"
    raise InvalidInput(f"no container dtype tag for array dtype {values.dtype}")


def _is_binary(values: np.ndarray) -> bool:
    return bool(np.isin(values, (0, 1)).all())


def write_tensor_to(f, values: np.ndarray, axes, dtype: str | None = None) -> None:
    """Write one tensor record (header line + payload) to an open binary file."""
    values = np.asarray(values)
    tag = dtype_tag_for(values) if dtype is None else dtype
    axes = [str(a) for a in axes]
    if len(axes) != values.ndim:
        raise InvalidInput(
            f"axes labels {axes} do not match tensor rank {values.ndim}"
        )
    if tag == "u1":
        if not _is_binary(values):
            raise InvalidInput("u1 tensors may only contain 0 and 1")
        payload = np.packbits(values.astype(np.uint8).ravel(order="C"), bitorder="big").tobytes()
    elif tag in _DTYPES:
        payload = np.ascontiguousarray(values.astype(_DTYPES[tag])).tobytes()
    else:
        raise InvalidInput(f"unknown container dtype tag {tag!r}")
    header = {
        "dtype": tag,
        "shape": [int(n) for n in values.shape],
        "axes": axes,
        "endian": "little",
    }
    f.write(json.dumps(header).encode("utf-8"))
    f.write(b"\n")
    f.write(payload)


def read_tensor_from(f):
    """Read one tensor record from an open binary file.

    Returns:
        (values, header) where values is a numpy array (f32 -> float32,
        c64 -> complex64, u1 -> uint8 in {0, 1}, f64 -> float64, i8 -> int8)
        and header is the parsed header dict.
    """
    line = f.readline(_MAX_HEADER_BYTES)
    if not line.endswith(b"\n"):
        raise InvalidInput("container header line missing or unterminated")
    try:
        header = json.loads(line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"container header is not valid JSON: {exc}") from exc
    if not isinstance(header, dict):
        raise InvalidInput("container header must be a JSON object")
    for key in ("dtype", "shape", "axes", "endian"):
        if key not in header:
            raise InvalidInput(f"container header missing field {key!r}")
    if header["endian"] != "little":
        raise InvalidInput(f"unsupported endianness {header['endian']!r}")
    shape = header["shape"]
    if not isinstance(shape, list) or any(
        not isinstance(n, int) or n < 0 for n in shape
    ):
        raise InvalidInput(f"container shape must be a list of non-negative ints, got {shape!r}")
    axes = header["axes"]
    if not isinstance(axes, list) or len(axes) != len(shape):
        raise InvalidInput(
            f"container axes {axes!r} do not match shape rank {len(shape)}"
        )
    tag = header["dtype"]
    n_elem = int(np.prod(shape, dtype=np.int64)) if shape else 1
    if tag == "u1":
        n_bytes = (n_elem + 7) // 8
    elif tag in _DTYPES:
        n_bytes = n_elem * _DTYPES[tag].itemsize
    else:
        raise InvalidInput(f"unknown container dtype tag {tag!r}")
    payload = f.read(n_bytes)
    if len(payload) != n_bytes:
        raise InvalidInput(
            f"container payload truncated: expected {n_bytes} bytes, got {len(payload)}"
        )
    if tag == "u1":
        if n_elem == 0:
            values = np.zeros(shape, dtype=np.uint8)
        else:
            bits = np.unpackbits(
                np.frombuffer(payload, dtype=np.uint8), count=n_elem, bitorder="big"
            )
            values = bits.reshape(shape)
    else:
        values = (
            np.frombuffer(payload, dtype=_DTYPES[tag]).reshape(shape).astype(
                _DTYPES[tag].newbyteorder("=")
            )
        )
    return values, header


def write_tensor(path, values: np.ndarray, axes, dtype: str | None = None) -> None:
    """Write a single-tensor container file."""
    with open(path, "wb") as f:
        write_tensor_to(f, values, axes, dtype=dtype)


def read_tensor(path):
    """Read a single-tensor container file; trailing bytes are an error."""
    with open(path, "rb") as f:
        values, header = read_tensor_from(f)
        if f.read(1):
            raise InvalidInput(f"{path}: trailing bytes after tensor payload")
    return values, header


def file_digest(path) -> str:
    """SHA-256 hex digest of a file's contents."""
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()
