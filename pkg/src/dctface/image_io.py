"""Binary PGM I/O and the mean-intensity normalization used before matching."""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateImageError,
    EmptyImageError,
    InvalidFactorError,
    MalformedHeaderError,
    TruncatedDataError,
    UnsupportedMaxvalError,
)

_WHITESPACE = b" \t\n\r\v\f"


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Immutable grid of gray levels, stored as float64 rows."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.array(self.pixels, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"pixels must be 2-D, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @classmethod
    def from_rows(cls, width: int, height: int, values) -> "GrayImage":
        arr = np.asarray(values, dtype=np.float64)
        if arr.size != width * height:
            raise ValueError(f"expected {width * height} pixels, got {arr.size}")
        return cls(arr.reshape(height, width))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.pixels, other.pixels))

    __hash__ = None


class _HeaderReader:
    def __init__(self, data: bytes, pos: int):
        self.data = data
        self.pos = pos

    def _skip_space_and_comments(self):
        data = self.data
        while self.pos < len(data):
            c = data[self.pos : self.pos + 1]
            if c in _WHITESPACE:
                self.pos += 1
            elif c == b"#":
                nl = data.find(b"\n", self.pos)
                self.pos = len(data) if nl < 0 else nl + 1
            else:
                break

    def token(self, what: str) -> int:
        self._skip_space_and_comments()
        start = self.pos
        data = self.data
        while self.pos < len(data) and data[self.pos : self.pos + 1] not in _WHITESPACE + b"#":
            self.pos += 1
        raw = data[start : self.pos]
        if not raw:
            raise MalformedHeaderError(f"missing {what} in PGM header")
        if not raw.isdigit():
            raise MalformedHeaderError(f"bad {what} in PGM header: {raw!r}")
        return int(raw)


def load_pgm(data: bytes) -> GrayImage:
    """Decode a binary (P5) PGM. Pixel values are kept as stored, not rescaled."""
    if data[:2] != b"P5":
        raise MalformedHeaderError("not a binary PGM (magic 'P5' expected)")
    if len(data) > 2 and data[2:3] not in _WHITESPACE + b"#":
        raise MalformedHeaderError("missing separator after magic")
    reader = _HeaderReader(data, 2)
    width = reader.token("width")
    height = reader.token("height")
    maxval = reader.token("maxval")
    if width == 0 or height == 0:
        raise MalformedHeaderError(f"zero-sized image {width}x{height}")
    if maxval == 0:
        raise MalformedHeaderError("maxval must be positive")
    if maxval > 255:
        raise UnsupportedMaxvalError(f"maxval {maxval} > 255 is not supported")
    if reader.pos >= len(data) or data[reader.pos : reader.pos + 1] not in _WHITESPACE:
        raise MalformedHeaderError("missing whitespace after maxval")
    start = reader.pos + 1
    n = width * height
    raster = data[start : start + n]
    if len(raster) < n:
        raise TruncatedDataError(f"expected {n} pixel bytes, found {len(raster)}")
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return GrayImage(pixels)


def read_pgm(path: str | os.PathLike) -> GrayImage:
    with open(path, "rb") as fh:
        return load_pgm(fh.read())


def save_pgm(img: GrayImage) -> bytes:
    """Encode as 8-bit P5, rounding and clamping to [0, 255]."""
    raster = np.clip(np.rint(img.pixels), 0, 255).astype(np.uint8)
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + raster.tobytes()


def write_pgm(img: GrayImage, path: str | os.PathLike) -> None:
    with open(path, "wb") as fh:
        fh.write(save_pgm(img))


def mean_intensity(img: GrayImage) -> float:
    if img.pixels.size == 0:
        raise EmptyImageError("mean of an empty image is undefined")
    return float(img.pixels.mean())


def normalization_factor(registered_mean: float, test_mean: float) -> float:
    """Ratio that rescales a test image to the registered image's average brightness."""
    if not test_mean > 0:
        raise DegenerateImageError(f"test image mean must be positive, got {test_mean}")
    return registered_mean / test_mean


def scale_image(img: GrayImage, factor: float) -> GrayImage:
    # Deliberately unclamped: values above 255 are kept so the DCT stays linear.
    if not factor > 0:
        raise InvalidFactorError(f"scale factor must be positive, got {factor}")
    return GrayImage(img.pixels * factor)
