"""Portable matrix I/O: NPY v1.0, TSV, and PGM heatmaps.

NPY support is a deliberately narrow subset -- version 1.0, little-endian
float32/float64, C order, 1-D or 2-D -- parsed by hand so malformed files
fail with a located ParseError instead of a generic exception, and so
fortran_order is rejected explicitly rather than silently transposed.

Writers go through a temp file in the destination directory followed by
an atomic rename, so a failure never leaves a partial output behind.
"""

import ast
import os
import struct
import tempfile

import numpy as np

from .errors import (
    FortranOrderUnsupported,
    ParseError,
    UnsupportedDtype,
)

NPY_MAGIC = b"\x93NUMPY"
_DTYPES = {"<f4": np.float32, "<f8": np.float64}
_DESCRS = {np.dtype(np.float32): "<f4", np.dtype(np.float64): "<f8"}


def read_npy(path):
    """Read a 1-D or 2-D float NPY v1.0 file as a numpy array."""
    with open(path, "rb") as f:
        data = f.read()
    if data[:6] != NPY_MAGIC:
        raise ParseError(f"{path}: bad magic at byte 0")
    if data[6:8] != b"\x01\x00":
        raise ParseError(
            f"{path}: unsupported NPY version {data[6]}.{data[7]} at byte 6"
        )
    if len(data) < 10:
        raise ParseError(f"{path}: truncated header at byte 8")
    (header_len,) = struct.unpack("<H", data[8:10])
    header_end = 10 + header_len
    if len(data) < header_end:
        raise ParseError(f"{path}: truncated header at byte 10")
    try:
        header = ast.literal_eval(data[10:header_end].decode("latin1"))
        descr = header["descr"]
        fortran = header["fortran_order"]
        shape = header["shape"]
    except (ValueError, SyntaxError, KeyError, TypeError) as exc:
        raise ParseError(f"{path}: malformed header dict at byte 10: {exc}")
    if descr not in _DTYPES:
        raise UnsupportedDtype(f"{path}: dtype {descr!r} not in {{<f4, <f8}}")
    if fortran:
        raise FortranOrderUnsupported(f"{path}: fortran_order is unsupported")
    if not isinstance(shape, tuple) or len(shape) not in (1, 2):
        raise ParseError(f"{path}: only 1-D/2-D shapes supported, got {shape}")
    dtype = np.dtype(_DTYPES[descr])
    count = int(np.prod(shape)) if shape else 1
    expected = count * dtype.itemsize
    payload = data[header_end:]
    if len(payload) != expected:
        raise ParseError(
            f"{path}: payload is {len(payload)} bytes at byte {header_end}, "
            f"expected {expected} for shape {shape}"
        )
    return np.frombuffer(payload, dtype=dtype).reshape(shape).copy()


def _npy_bytes(matrix):
    m = np.ascontiguousarray(matrix)
    if m.dtype not in _DESCRS:
        m = m.astype(np.float64)
    header = (
        "{'descr': '%s', 'fortran_order': False, 'shape': %s, }"
        % (_DESCRS[m.dtype], repr(m.shape))
    )
    # pad with spaces so magic+version+len+header is a multiple of 64
    unpadded = len(NPY_MAGIC) + 2 + 2 + len(header) + 1
    header = header + " " * (-unpadded % 64) + "\n"
    return b"".join(
        [
            NPY_MAGIC,
            b"\x01\x00",
            struct.pack("<H", len(header)),
            header.encode("latin1"),
            m.tobytes(),
        ]
    )


def read_tsv(path):
    """Read a TSV of decimal numbers as a float64 matrix."""
    rows = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if line == "":
                continue
            try:
                row = [float(v) for v in line.split("\t")]
            except ValueError as exc:
                raise ParseError(f"{path}: line {lineno}: {exc}")
            if rows and len(row) != len(rows[0]):
                raise ParseError(
                    f"{path}: line {lineno}: expected {len(rows[0])} columns,"
                    f" got {len(row)}"
                )
            rows.append(row)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return np.array(rows, dtype=np.float64)


def read_matrix(path):
    """Read NPY or TSV by sniffing the magic bytes."""
    with open(path, "rb") as f:
        magic = f.read(6)
    if magic == NPY_MAGIC:
        return read_npy(path)
    return read_tsv(path)


def _tsv_bytes(matrix):
    m = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    lines = [
        "\t".join(format(v, ".17g") for v in row) + "\n" for row in m
    ]
    return "".join(lines).encode("utf-8")


def _atomic_write(path, payload):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_matrix(matrix, path, fmt="npy"):
    """Write a matrix as 'npy' or 'tsv'; NPY round-trips bit-exactly."""
    m = np.asarray(matrix)
    if m.size == 0:
        raise ParseError("refusing to write an empty matrix")
    if fmt == "npy":
        _atomic_write(path, _npy_bytes(m))
    elif fmt == "tsv":
        _atomic_write(path, _tsv_bytes(m))
    else:
        raise ValueError(f"unknown format {fmt!r}")


def heatmap(matrix, path):
    """Write a matrix as an 8-bit binary PGM, one pixel per cell.

    Values are scaled linearly so min maps to 0 and max to 255; a constant
    matrix maps to mid-gray 128.
    """
    m = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    lo, hi = float(np.min(m)), float(np.max(m))
    if hi > lo:
        pixels = np.round((m - lo) / (hi - lo) * 255.0).astype(np.uint8)
    else:
        pixels = np.full(m.shape, 128, dtype=np.uint8)
    h, w = m.shape
    _atomic_write(path, b"P5\n%d %d\n255\n" % (w, h) + pixels.tobytes())
