"""File formats: matrices (GFM1), masks (GFB1), feature vectors (GFV1), CSV.

All binary fields are little-endian; integers are unsigned 64-bit, reals
are IEEE-754 float64.  Packed mask bits are most-significant-bit-first
within each byte with every mask row padded to a byte boundary.  Writes
go through a temp-file-and-rename so interrupted runs never leave a
truncated file behind.

GFM1 (matrix):   magic "GFM1", H, W, then H*W float64 row-major.
GFB1 (mask):     magic "GFB1", mode byte (0 = gi, 1 = gc), M, H, W
                 (W written as 1 and unused for gc), q (float64),
                 seed (uint64), then packed rows.
GFV1 (features): magic "GFV1", mode byte, length, then float64 values.

CSV: matrices one row per line with comma-separated values; feature
vectors one value per line.  Values use shortest round-trip decimal
representation, locale-independent.
"""

import os
import struct
import tempfile

import numpy as np

from .core import Mode
from .masks import CytometryMask, MaskSet
from .validation import as_image, as_vector

MATRIX_MAGIC = b"GFM1"
MASK_MAGIC = b"GFB1"
FEATURES_MAGIC = b"GFV1"

_MODE_BYTE = {Mode.GI: 0, Mode.GC: 1}
_BYTE_MODE = {0: Mode.GI, 1: Mode.GC}


class FormatError(ValueError):
    """A file does not conform to its declared on-disk format."""


def atomic_write_bytes(path, data: bytes) -> None:
    """Write bytes to ``path`` via a temp file in the same directory."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".ghostproj-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_exact(fh, n: int, what: str) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise FormatError(f"truncated file while reading {what}")
    return data


# -- matrices ---------------------------------------------------------------

def write_matrix(path, image) -> None:
    arr = as_image(image)
    header = MATRIX_MAGIC + struct.pack("<QQ", arr.shape[0], arr.shape[1])
    atomic_write_bytes(path, header + arr.astype("<f8").tobytes())


def read_matrix(path) -> np.ndarray:
    with open(path, "rb") as fh:
        if _read_exact(fh, 4, "magic") != MATRIX_MAGIC:
            raise FormatError(f"{path} is not a GFM1 matrix file")
        height, width = struct.unpack("<QQ", _read_exact(fh, 16, "dimensions"))
        if height < 1 or width < 1:
            raise FormatError("matrix dimensions must be positive")
        body = _read_exact(fh, 8 * height * width, "matrix values")
    return np.frombuffer(body, dtype="<f8").reshape(height, width).astype(np.float64)


def write_matrix_csv(path, image) -> None:
    arr = as_image(image)
    lines = [",".join(repr(float(v)) for v in row) for row in arr]
    atomic_write_bytes(path, ("\n".join(lines) + "\n").encode("ascii"))


def read_matrix_csv(path) -> np.ndarray:
    rows = []
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append([float(tok) for tok in line.split(",")])
    if not rows:
        raise FormatError(f"{path} holds no matrix rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise FormatError(f"{path} has ragged rows")
    return np.array(rows, dtype=np.float64)


def load_image(path) -> np.ndarray:
    """Read a matrix from either format, sniffing the magic bytes."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
    if magic == MATRIX_MAGIC:
        return read_matrix(path)
    return read_matrix_csv(path)


# -- masks ------------------------------------------------------------------

def write_mask(path, mask) -> None:
    if isinstance(mask, MaskSet):
        mode, m, h, w = Mode.GI, mask.n_masks, mask.height, mask.width
    elif isinstance(mask, CytometryMask):
        mode, m, h, w = Mode.GC, mask.mask_width, mask.height, 1
    else:
        raise TypeError(f"cannot serialize {type(mask).__name__} as a mask")
    header = MASK_MAGIC + bytes([_MODE_BYTE[mode]])
    header += struct.pack("<QQQ", m, h, w)
    header += struct.pack("<d", mask.q)
    header += struct.pack("<Q", mask.seed & ((1 << 64) - 1))
    atomic_write_bytes(path, header + mask.packed.tobytes())


def read_mask(path):
    with open(path, "rb") as fh:
        if _read_exact(fh, 4, "magic") != MASK_MAGIC:
            raise FormatError(f"{path} is not a GFB1 mask file")
        mode_byte = _read_exact(fh, 1, "mode")[0]
        if mode_byte not in _BYTE_MODE:
            raise FormatError(f"unknown mask mode byte {mode_byte}")
        m, h, w = struct.unpack("<QQQ", _read_exact(fh, 24, "dimensions"))
        (q,) = struct.unpack("<d", _read_exact(fh, 8, "q"))
        (seed,) = struct.unpack("<Q", _read_exact(fh, 8, "seed"))
        mode = _BYTE_MODE[mode_byte]
        if mode is Mode.GI:
            row_bytes = (w + 7) // 8
            body = _read_exact(fh, m * h * row_bytes, "mask bits")
            packed = np.frombuffer(body, dtype=np.uint8).reshape(m, h, row_bytes).copy()
            return MaskSet(n_masks=m, height=h, width=w, q=q, seed=seed, packed=packed)
        row_bytes = (m + 7) // 8
        body = _read_exact(fh, h * row_bytes, "mask bits")
        packed = np.frombuffer(body, dtype=np.uint8).reshape(h, row_bytes).copy()
        return CytometryMask(height=h, mask_width=m, q=q, seed=seed, packed=packed)


# -- feature vectors --------------------------------------------------------

def write_features(path, values, mode: Mode) -> None:
    arr = as_vector(values, "features")
    header = FEATURES_MAGIC + bytes([_MODE_BYTE[Mode(mode)]])
    header += struct.pack("<Q", arr.size)
    atomic_write_bytes(path, header + arr.astype("<f8").tobytes())


def read_features(path) -> tuple[np.ndarray, Mode]:
    with open(path, "rb") as fh:
        if _read_exact(fh, 4, "magic") != FEATURES_MAGIC:
            raise FormatError(f"{path} is not a GFV1 feature file")
        mode_byte = _read_exact(fh, 1, "mode")[0]
        if mode_byte not in _BYTE_MODE:
            raise FormatError(f"unknown feature mode byte {mode_byte}")
        (length,) = struct.unpack("<Q", _read_exact(fh, 8, "length"))
        body = _read_exact(fh, 8 * length, "feature values")
    return np.frombuffer(body, dtype="<f8").astype(np.float64), _BYTE_MODE[mode_byte]


def write_features_csv(path, values) -> None:
    arr = as_vector(values, "features")
    atomic_write_bytes(path, ("\n".join(repr(float(v)) for v in arr) + "\n").encode("ascii"))


def read_features_csv(path) -> np.ndarray:
    vals = []
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if line:
                vals.append(float(line))
    return np.array(vals, dtype=np.float64)


# -- plot series ------------------------------------------------------------

def write_csv_series(path, header: list[str], rows) -> None:
    """Flat CSV table (headered) for external plotting."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(float(v)) if isinstance(v, float) else str(v)
                              for v in row))
    atomic_write_bytes(path, ("\n".join(lines) + "\n").encode("ascii"))
