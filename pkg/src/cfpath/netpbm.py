"""Binary PGM (P5) and PPM (P6) readers/writers, 8-bit, no codec dependencies."""

from __future__ import annotations

from pathlib import Path

import numpy as np


def _quantize(values: np.ndarray) -> np.ndarray:
    return np.rint(np.clip(values, 0.0, 1.0) * 255.0).astype(np.uint8)


def write_pgm(path, image) -> None:
    """Write a (H, W) array of values in [0, 1] as 8-bit binary PGM."""
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError(f"PGM image must be 2-D, got shape {img.shape}")
    h, w = img.shape
    header = f"P5\n{w} {h}\n255\n".encode("ascii")
    Path(path).write_bytes(header + _quantize(img).tobytes())


def write_ppm(path, rgb) -> None:
    """Write a (H, W, 3) array of values in [0, 1] as 8-bit binary PPM."""
    img = np.asarray(rgb, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"PPM image must be (H, W, 3), got shape {img.shape}")
    h, w, _ = img.shape
    header = f"P6\n{w} {h}\n255\n".encode("ascii")
    Path(path).write_bytes(header + _quantize(img).tobytes())


def _read_header(data: bytes, magic: bytes) -> tuple[int, int, int, int]:
    """Parse magic, width, height, maxval; returns them plus the raster offset."""
    if not data.startswith(magic):
        raise ValueError(f"not a {magic.decode()} file")
    fields: list[int] = []
    pos = len(magic)
    while len(fields) < 3:
        if pos >= len(data):
            raise ValueError("truncated netpbm header")
        ch = data[pos:pos + 1]
        if ch == b"#":  # comment to end of line
            nl = data.find(b"\n", pos)
            pos = len(data) if nl < 0 else nl + 1
        elif ch.isspace():
            pos += 1
        else:
            end = pos
            while end < len(data) and not data[end:end + 1].isspace():
                end += 1
            fields.append(int(data[pos:end]))
            pos = end
    pos += 1  # single whitespace byte separates header from raster
    width, height, maxval = fields
    if maxval != 255:
        raise ValueError(f"only 8-bit netpbm supported, got maxval {maxval}")
    return width, height, maxval, pos


def read_pgm(path) -> np.ndarray:
    """Read an 8-bit binary PGM into a (H, W) float array in [0, 1]."""
    data = Path(path).read_bytes()
    width, height, _, offset = _read_header(data, b"P5")
    raster = np.frombuffer(data, dtype=np.uint8, count=width * height, offset=offset)
    return raster.reshape(height, width).astype(np.float64) / 255.0


def read_ppm(path) -> np.ndarray:
    """Read an 8-bit binary PPM into a (H, W, 3) float array in [0, 1]."""
    data = Path(path).read_bytes()
    width, height, _, offset = _read_header(data, b"P6")
    raster = np.frombuffer(data, dtype=np.uint8, count=width * height * 3, offset=offset)
    return raster.reshape(height, width, 3).astype(np.float64) / 255.0
