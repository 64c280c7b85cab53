"""Enrolled templates and their JSON persistence."""

from __future__ import annotations

import json
import os
import tempfile
from typing import Iterable, Sequence

import numpy as np

from .dct import DCT_CONVENTION, ZIGZAG_CONVENTION, CoeffVector
from .errors import (
    DuplicateSubjectError,
    EmptyGalleryError,
    GalleryFormatError,
    IncompatibleGalleryError,
    IncompatibleTemplatesError,
    UnknownSubjectError,
)
from .features import DEFAULT_SPECS, REGIONS, FaceTemplate, RegionSpec

FORMAT_VERSION = 1
METRICS = ("sum-abs", "euclidean")


class Gallery:
    """Immutable set of enrolled templates sharing one set of region specs.

    Per-region coefficient matrices are stacked lazily so a probe can be scored
    against every subject in one vectorized pass.
    """

    def __init__(self, templates: Iterable[FaceTemplate] = (),
                 specs: Sequence[RegionSpec] | None = None,
                 metric: str = "sum-abs", normalize: bool = True):
        templates = tuple(templates)
        if specs is None:
            specs = templates[0].specs if templates else DEFAULT_SPECS
        self.specs = tuple(specs)
        if metric not in METRICS:
            raise ValueError(f"unknown metric {metric!r}")
        self.metric = metric
        self.normalize = bool(normalize)
        seen = set()
        for t in templates:
            if t.subject_id is None:
                raise ValueError("gallery templates need a subject_id")
            if t.subject_id in seen:
                raise DuplicateSubjectError(f"subject {t.subject_id!r} enrolled twice")
            seen.add(t.subject_id)
            if t.specs != self.specs:
                raise IncompatibleTemplatesError(f"subject {t.subject_id!r} built with different region specs")
        self.templates = templates
        self._stacked: dict[str, np.ndarray] = {}
        self._means: np.ndarray | None = None
        self._tiebreak: np.ndarray | None = None

    def __len__(self):
        return len(self.templates)

    def __iter__(self):
        return iter(self.templates)

    def __eq__(self, other):
        if not isinstance(other, Gallery):
            return NotImplemented
        return (
            self.specs == other.specs
            and self.metric == other.metric
            and self.normalize == other.normalize
            and self.templates == other.templates
        )

    __hash__ = None

    @property
    def subject_ids(self) -> tuple[str, ...]:
        return tuple(t.subject_id for t in self.templates)

    def __contains__(self, subject_id) -> bool:
        return subject_id in self.subject_ids

    def template(self, subject_id: str) -> FaceTemplate:
        for t in self.templates:
            if t.subject_id == subject_id:
                return t
        raise UnknownSubjectError(f"subject {subject_id!r} is not enrolled")

    def add(self, template: FaceTemplate) -> "Gallery":
        return Gallery(self.templates + (template,), self.specs, self.metric, self.normalize)

    def require_nonempty(self):
        if not self.templates:
            raise EmptyGalleryError("gallery has no enrolled subjects")

    def stacked(self, region_id: str) -> np.ndarray:
        """``(n_subjects, kept)`` matrix of one region's coefficients."""
        if region_id not in self._stacked:
            m = np.vstack([t.vectors[region_id].values for t in self.templates])
            m.setflags(write=False)
            self._stacked[region_id] = m
        return self._stacked[region_id]

    @property
    def means(self) -> np.ndarray:
        if self._means is None:
            self._means = np.array([t.mean_intensity for t in self.templates])
        return self._means

    @property
    def tiebreak(self) -> np.ndarray:
        """Position of each subject in ascending subject_id order."""
        if self._tiebreak is None:
            order = sorted(range(len(self.templates)), key=lambda i: self.templates[i].subject_id)
            rank = np.empty(len(order), dtype=np.int64)
            rank[order] = np.arange(len(order))
            self._tiebreak = rank
        return self._tiebreak


def as_gallery(gallery) -> Gallery:
    return gallery if isinstance(gallery, Gallery) else Gallery(gallery)


def gallery_to_dict(gallery) -> dict:
    gallery = as_gallery(gallery)
    subjects = []
    for t in gallery.templates:
        subjects.append({
            "subject_id": t.subject_id,
            "mean_intensity": float(t.mean_intensity),
            "coefficients": {r: [float(v) for v in t.vectors[r].values] for r in REGIONS},
        })
    return {
        "version": FORMAT_VERSION,
        "provenance": {"dct": DCT_CONVENTION, "zigzag": ZIGZAG_CONVENTION},
        "region_specs": [s.to_dict() for s in gallery.specs],
        "defaults": {"metric": gallery.metric, "normalize": gallery.normalize},
        "subjects": subjects,
    }


def dumps_gallery(gallery) -> str:
    # json writes floats with repr(), which round-trips doubles exactly.
    return json.dumps(gallery_to_dict(gallery), sort_keys=True, indent=1, allow_nan=False) + "\n"


def save_gallery(gallery, path: str | os.PathLike) -> None:
    text = dumps_gallery(gallery)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".gallery-", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _require(cond: bool, msg: str):
    if not cond:
        raise GalleryFormatError(msg)


def gallery_from_dict(doc: dict, expected_specs: Sequence[RegionSpec] | None = None) -> Gallery:
    _require(isinstance(doc, dict), "gallery document must be a JSON object")
    version = doc.get("version")
    if version != FORMAT_VERSION:
        raise IncompatibleGalleryError(f"unsupported gallery version {version!r}")
    prov = doc.get("provenance") or {}
    if prov.get("dct") != DCT_CONVENTION:
        raise IncompatibleGalleryError(f"gallery DCT convention {prov.get('dct')!r} != {DCT_CONVENTION!r}")
    if prov.get("zigzag") != ZIGZAG_CONVENTION:
        raise IncompatibleGalleryError(
            f"gallery zigzag convention {prov.get('zigzag')!r} != {ZIGZAG_CONVENTION!r}"
        )
    try:
        specs = tuple(RegionSpec(**s) for s in doc["region_specs"])
        defaults = doc.get("defaults", {})
        metric = defaults.get("metric", "sum-abs")
        normalize = defaults.get("normalize", True)
        subjects = doc["subjects"]
    except (KeyError, TypeError, ValueError) as exc:
        raise GalleryFormatError(f"bad gallery header: {exc}") from exc
    _require(sorted(s.region_id for s in specs) == sorted(REGIONS), "gallery must declare all five regions")
    if expected_specs is not None and tuple(expected_specs) != specs:
        raise IncompatibleGalleryError("gallery region specs differ from the running configuration")
    by_region = {s.region_id: s for s in specs}

    templates = []
    seen = set()
    for entry in subjects:
        try:
            sid = entry["subject_id"]
            mean = entry["mean_intensity"]
            coeffs = entry["coefficients"]
        except (KeyError, TypeError) as exc:
            raise GalleryFormatError(f"bad subject entry: {exc}") from exc
        _require(isinstance(sid, str), "subject_id must be a string")
        if sid in seen:
            raise DuplicateSubjectError(f"subject {sid!r} appears twice in gallery file")
        seen.add(sid)
        _require(isinstance(mean, (int, float)) and not isinstance(mean, bool), f"{sid}: bad mean_intensity")
        _require(isinstance(coeffs, dict) and set(coeffs) == set(REGIONS), f"{sid}: coefficients must cover {REGIONS}")
        vectors = {}
        for region, values in coeffs.items():
            spec = by_region[region]
            _require(isinstance(values, list) and all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in values
            ), f"{sid}/{region}: coefficients must be a list of numbers")
            _require(len(values) == spec.kept_coefficients,
                     f"{sid}/{region}: {len(values)} coefficients, spec declares {spec.kept_coefficients}")
            vectors[region] = CoeffVector(np.array(values, dtype=np.float64), spec.height, spec.width)
        try:
            templates.append(FaceTemplate(float(mean), vectors, specs, sid))
        except ValueError as exc:
            raise GalleryFormatError(f"{sid}: {exc}") from exc
    return Gallery(templates, specs, metric, normalize)


def load_gallery(path: str | os.PathLike, expected_specs: Sequence[RegionSpec] | None = None) -> Gallery:
    """Read a gallery file; ``expected_specs`` (if given) must match the file exactly."""
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GalleryFormatError(f"{path}: {exc}") from exc
    return gallery_from_dict(doc, expected_specs)
