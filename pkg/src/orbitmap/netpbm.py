"""PGM (P2/P5) and PPM (P3/P6) reading and writing, 8- and 16-bit.

Pixel values map linearly to [0, 1] on read (divide by maxval) and back on
write (round and clip). 16-bit binary rasters are big-endian per the
format specification.
"""

from __future__ import annotations

import os
import re
import tempfile

import numpy as np

_MAGIC_CHANNELS = {b"P2": 1, b"P3": 3, b"P5": 1, b"P6": 3}
_BINARY_MAGICS = (b"P5", b"P6")


def _read_header_tokens(data: bytes, count: int) -> tuple[list[int], int]:
    """First ``count`` whitespace-separated integer tokens after the magic, skipping # comments."""
    tokens: list[int] = []
    pos = 2  # past the magic
    while len(tokens) < count:
        if pos >= len(data):
            raise ValueError("truncated header")
        ch = data[pos : pos + 1]
        if ch == b"#":
            pos = data.index(b"\n", pos) + 1
        elif ch.isspace():
            pos += 1
        else:
            match = re.match(rb"\d+", data[pos:])
            if not match:
                raise ValueError(f"malformed header near byte {pos}")
            tokens.append(int(match.group(0)))
            pos += match.end()
    return tokens, pos


def read_netpbm(path) -> tuple[np.ndarray, int]:
    """Read a PGM/PPM file into a float (H, W, C) array in [0, 1], plus its maxval."""
    with open(path, "rb") as fh:
        data = fh.read()
    magic = data[:2]
    if magic not in _MAGIC_CHANNELS:
        raise ValueError(f"unsupported magic {magic!r}; expected P2/P3/P5/P6")
    channels = _MAGIC_CHANNELS[magic]
    (width, height, maxval), pos = _read_header_tokens(data, 3)
    if maxval < 1 or maxval > 65535:
        raise ValueError(f"maxval {maxval} out of range")
    n_values = width * height * channels
    if magic in _BINARY_MAGICS:
        pos += 1  # single whitespace byte after maxval
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        raster = np.frombuffer(data, dtype=dtype, count=n_values, offset=pos)
        if raster.size != n_values:
            raise ValueError("truncated raster")
    else:
        raster = np.array(data[pos:].split()[:n_values], dtype=np.uint32)
        if raster.size != n_values:
            raise ValueError("truncated raster")
    values = raster.astype(float).reshape(height, width, channels) / maxval
    return values, maxval


def write_netpbm(path, values: np.ndarray, maxval: int = 255, binary: bool = True) -> None:
    """Write a float array in [0, 1] as PGM (1 channel) or PPM (3 channels).

    The file is written atomically (temp file + rename).
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3 or arr.shape[2] not in (1, 3):
        raise ValueError("values must be HxW or HxWxC with C in {1, 3}")
    if not 1 <= maxval <= 65535:
        raise ValueError("maxval must be in [1, 65535]")
    height, width, channels = arr.shape
    quantized = np.clip(np.rint(arr * maxval), 0, maxval)
    if binary:
        magic = b"P5" if channels == 1 else b"P6"
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        body = quantized.astype(dtype).tobytes()
    else:
        magic = b"P2" if channels == 1 else b"P3"
        flat = quantized.astype(np.uint32).reshape(height, -1)
        body = ("\n".join(" ".join(str(v) for v in row) for row in flat) + "\n").encode()
    header = b"%s\n%d %d\n%d\n" % (magic, width, height, maxval)
    _atomic_write_bytes(path, header + body)


def _atomic_write_bytes(path, payload: bytes) -> None:
    directory = os.path.dirname(os.fspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise
