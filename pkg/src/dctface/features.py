"""Region cropping and per-region DCT templates."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .dct import CoeffVector, dct_2d, truncate, zigzag_scan
from .errors import (
    CoefficientCountError,
    DegenerateImageError,
    ImageSizeError,
    LandmarkFormatError,
    LandmarkOutOfBoundsError,
)
from .image_io import GrayImage, mean_intensity

GLOBAL = "global"
EYE_LEFT = "eye_left"
EYE_RIGHT = "eye_right"
NOSE = "nose"
MOUTH = "mouth"

LOCAL_REGIONS = (EYE_LEFT, EYE_RIGHT, NOSE, MOUTH)
REGIONS = (GLOBAL,) + LOCAL_REGIONS

FACE_SIZE = 128
DEFAULT_KEPT = 64


class Point(NamedTuple):
    x: int  # column
    y: int  # row


@dataclass(frozen=True)
class FaceLandmarks:
    eye_left: Point
    eye_right: Point
    nose: Point
    mouth: Point

    def center(self, region_id: str) -> Point:
        return getattr(self, region_id)

    @classmethod
    def from_dict(cls, data: Mapping) -> "FaceLandmarks":
        points = {}
        for name in LOCAL_REGIONS:
            try:
                entry = data[name]
                x, y = entry["x"], entry["y"]
            except (KeyError, TypeError) as exc:
                raise LandmarkFormatError(f"landmark {name!r} needs integer 'x' and 'y'") from exc
            if isinstance(x, bool) or isinstance(y, bool) or not isinstance(x, int) or not isinstance(y, int):
                raise LandmarkFormatError(f"landmark {name!r} coordinates must be integers")
            points[name] = Point(x, y)
        return cls(**points)

    def to_dict(self) -> dict:
        return {name: {"x": p.x, "y": p.y} for name, p in zip(LOCAL_REGIONS, (self.eye_left, self.eye_right, self.nose, self.mouth))}


def read_landmarks(path: str | os.PathLike) -> FaceLandmarks:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise LandmarkFormatError(f"{path}: {exc}") from exc
    return FaceLandmarks.from_dict(data)


def write_landmarks(landmarks: FaceLandmarks, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(landmarks.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


@dataclass(frozen=True)
class RegionSpec:
    region_id: str
    width: int
    height: int
    kept_coefficients: int = DEFAULT_KEPT

    def __post_init__(self):
        if self.region_id not in REGIONS:
            raise ValueError(f"unknown region {self.region_id!r}")
        if self.width < 1 or self.height < 1:
            raise ValueError(f"region {self.region_id} has empty size {self.width}x{self.height}")
        if not 1 <= self.kept_coefficients <= self.width * self.height:
            raise CoefficientCountError(
                f"region {self.region_id}: kept_coefficients={self.kept_coefficients} "
                f"outside 1..{self.width * self.height}"
            )
        if self.region_id == GLOBAL and (self.width, self.height) != (FACE_SIZE, FACE_SIZE):
            raise ValueError(f"global region must be {FACE_SIZE}x{FACE_SIZE}")

    def to_dict(self) -> dict:
        return {
            "region_id": self.region_id,
            "width": self.width,
            "height": self.height,
            "kept_coefficients": self.kept_coefficients,
        }


# Nose and mouth are wider than tall: 40x25 and 50x30 (width x height).
DEFAULT_SPECS = (
    RegionSpec(GLOBAL, FACE_SIZE, FACE_SIZE),
    RegionSpec(EYE_LEFT, 16, 16),
    RegionSpec(EYE_RIGHT, 16, 16),
    RegionSpec(NOSE, 40, 25),
    RegionSpec(MOUTH, 50, 30),
)


def make_specs(kept: Mapping[str, int] | int | None = None,
               sizes: Mapping[str, Sequence[int]] | None = None) -> tuple[RegionSpec, ...]:
    """Default region specs with optional per-region overrides of kept count and (width, height)."""
    specs = []
    for spec in DEFAULT_SPECS:
        width, height = spec.width, spec.height
        if sizes and spec.region_id in sizes:
            width, height = (int(v) for v in sizes[spec.region_id])
        if isinstance(kept, int):
            k = kept
        elif kept and spec.region_id in kept:
            k = int(kept[spec.region_id])
        else:
            k = spec.kept_coefficients
        specs.append(RegionSpec(spec.region_id, width, height, k))
    return tuple(specs)


def crop_centered(img: GrayImage, center: tuple[int, int], width: int, height: int) -> np.ndarray:
    """Copy the ``width x height`` block around ``center`` (x, y).

    The block spans columns ``x - width//2 .. x - width//2 + width - 1`` (rows likewise),
    so for even sizes the center is the upper-left pixel of the middle 2x2.
    """
    x, y = center
    x0 = x - width // 2
    y0 = y - height // 2
    if x0 < 0 or y0 < 0 or x0 + width > img.width or y0 + height > img.height:
        raise LandmarkOutOfBoundsError(
            f"{width}x{height} region at ({x}, {y}) leaves the {img.width}x{img.height} image"
        )
    return img.pixels[y0 : y0 + height, x0 : x0 + width].copy()


@dataclass(frozen=True, eq=False)
class FaceTemplate:
    mean_intensity: float
    vectors: Mapping[str, CoeffVector]
    specs: tuple[RegionSpec, ...] = DEFAULT_SPECS
    subject_id: str | None = None

    def __post_init__(self):
        specs = tuple(self.specs)
        object.__setattr__(self, "specs", specs)
        ids = [s.region_id for s in specs]
        if sorted(ids) != sorted(REGIONS):
            raise ValueError(f"template needs exactly the regions {REGIONS}, got {ids}")
        if set(self.vectors) != set(REGIONS):
            raise ValueError(f"template vectors must cover {REGIONS}")
        for spec in specs:
            vec = self.vectors[spec.region_id]
            if vec.kept != spec.kept_coefficients:
                raise CoefficientCountError(
                    f"region {spec.region_id}: {vec.kept} coefficients, spec says {spec.kept_coefficients}"
                )
            if (vec.source_rows, vec.source_cols) != (spec.height, spec.width):
                raise ValueError(f"region {spec.region_id}: vector source size disagrees with spec")
        if not self.mean_intensity > 0:
            raise DegenerateImageError(f"template mean intensity must be positive, got {self.mean_intensity}")
        object.__setattr__(self, "vectors", {r: self.vectors[r] for r in REGIONS})

    def spec(self, region_id: str) -> RegionSpec:
        for s in self.specs:
            if s.region_id == region_id:
                return s
        raise KeyError(region_id)

    def with_subject(self, subject_id: str | None) -> "FaceTemplate":
        return FaceTemplate(self.mean_intensity, self.vectors, self.specs, subject_id)

    def __eq__(self, other):
        if not isinstance(other, FaceTemplate):
            return NotImplemented
        return (
            self.subject_id == other.subject_id
            and self.mean_intensity == other.mean_intensity
            and self.specs == other.specs
            and all(self.vectors[r] == other.vectors[r] for r in REGIONS)
        )

    __hash__ = None


def region_vector(pixels, kept: int) -> CoeffVector:
    return truncate(zigzag_scan(dct_2d(pixels)), kept)


def build_template(img: GrayImage, landmarks: FaceLandmarks,
                   specs: Sequence[RegionSpec] = DEFAULT_SPECS,
                   subject_id: str | None = None) -> FaceTemplate:
    if img.shape != (FACE_SIZE, FACE_SIZE):
        raise ImageSizeError(f"face image must be {FACE_SIZE}x{FACE_SIZE}, got {img.width}x{img.height}")
    vectors = {}
    for spec in specs:
        if spec.region_id == GLOBAL:
            block = img.pixels
        else:
            block = crop_centered(img, landmarks.center(spec.region_id), spec.width, spec.height)
        vectors[spec.region_id] = region_vector(block, spec.kept_coefficients)
    return FaceTemplate(mean_intensity(img), vectors, tuple(specs), subject_id)
