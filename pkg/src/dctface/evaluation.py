"""Manifest-driven experiments: recognition rate, CMC, FAR/FRR per method and normalization."""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

from .config import PipelineConfig
from .errors import ManifestError
from .features import build_template, read_landmarks
from .fusion import FusionMethod, identify
from .gallery import Gallery
from .image_io import read_pgm
from .matching import RankList

MANIFEST_HEADER = ["image", "landmarks", "subject", "role"]
REPORT_HEADER = ["method", "normalized", "rank1", "rank2", "rank3", "far", "frr", "invalid_count", "total"]
ROLES = ("gallery", "probe")


@dataclass(frozen=True)
class ManifestEntry:
    image: str
    landmarks: str
    subject: str
    role: str


@dataclass(frozen=True)
class DatasetManifest:
    entries: tuple[ManifestEntry, ...]
    base_dir: str = "."

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        self.validate()

    def validate(self):
        if not self.entries:
            raise ManifestError("manifest has no entries")
        enrolled = {}
        for e in self.entries:
            if e.role not in ROLES:
                raise ManifestError(f"bad role {e.role!r} for {e.image}; expected gallery or probe")
            if not e.subject:
                raise ManifestError(f"empty subject for {e.image}")
            if e.role == "gallery":
                if e.subject in enrolled:
                    raise ManifestError(f"subject {e.subject!r} has more than one gallery image")
                enrolled[e.subject] = e
        if not enrolled:
            raise ManifestError("manifest has no gallery entries")
        for e in self.probes:
            if e.subject not in enrolled:
                raise ManifestError(f"probe {e.image} refers to unenrolled subject {e.subject!r}")

    @property
    def gallery(self) -> tuple[ManifestEntry, ...]:
        return tuple(e for e in self.entries if e.role == "gallery")

    @property
    def probes(self) -> tuple[ManifestEntry, ...]:
        return tuple(e for e in self.entries if e.role == "probe")

    def resolve(self, path: str) -> str:
        return path if os.path.isabs(path) else os.path.join(self.base_dir, path)

    @classmethod
    def from_csv(cls, path: str | os.PathLike) -> "DatasetManifest":
        """Read ``image,landmarks,subject,role`` rows; relative paths resolve against the CSV's folder."""
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise ManifestError(f"{path}: empty manifest")
            if [h.strip() for h in header] != MANIFEST_HEADER:
                raise ManifestError(f"{path}: header must be {','.join(MANIFEST_HEADER)}")
            entries = []
            for lineno, row in enumerate(reader, start=2):
                if not row or all(not c.strip() for c in row):
                    continue
                if len(row) != 4:
                    raise ManifestError(f"{path}:{lineno}: expected 4 fields, got {len(row)}")
                entries.append(ManifestEntry(*(c.strip() for c in row)))
        return cls(tuple(entries), os.path.dirname(os.path.abspath(path)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(MANIFEST_HEADER)
        for e in self.entries:
            w.writerow([e.image, e.landmarks, e.subject, e.role])
        return buf.getvalue()


def recognition_rate(correct: int, total: int) -> float:
    if total < 1:
        raise ValueError("recognition rate needs at least one tested probe")
    if not 0 <= correct <= total:
        raise ValueError(f"correct={correct} must lie in 0..{total}")
    return correct / total


def cmc_curve(results: Iterable[tuple[RankList, str]], max_k: int) -> list[float]:
    """Fraction of probes whose true subject sits at rank <= k, for k = 1..max_k."""
    results = list(results)
    if not results:
        raise ValueError("cmc_curve needs at least one ranked probe")
    if max_k < 1:
        raise ValueError("max_k must be at least 1")
    hits = [0] * max_k
    for ranking, true_id in results:
        rank = ranking.rank_of(true_id)
        for k in range(rank - 1, max_k):
            hits[k] += 1
    return [h / len(results) for h in hits]


def far_frr(trials: Iterable[tuple[bool, bool]]) -> tuple[float | None, float | None]:
    """``trials`` holds ``(accepted, genuine)`` pairs. A rate with no trials is None."""
    impostor = impostor_accepted = genuine = genuine_rejected = 0
    for accepted, is_genuine in trials:
        if is_genuine:
            genuine += 1
            genuine_rejected += not accepted
        else:
            impostor += 1
            impostor_accepted += bool(accepted)
    far = impostor_accepted / impostor if impostor else None
    frr = genuine_rejected / genuine if genuine else None
    return far, frr


@dataclass(frozen=True)
class CellResult:
    method: FusionMethod
    normalized: bool
    rank_rates: tuple[float | None, ...]
    correct: int
    total: int
    far: float | None
    frr: float | None
    invalid_count: int

    def to_dict(self) -> dict:
        return {
            "method": self.method.name,
            "normalized": self.normalized,
            "rank_rates": list(self.rank_rates),
            "correct": self.correct,
            "total": self.total,
            "far": self.far,
            "frr": self.frr,
            "invalid_count": self.invalid_count,
        }


@dataclass(frozen=True)
class ExperimentReport:
    cells: tuple[CellResult, ...]
    config: dict

    def cell(self, method, normalized: bool) -> CellResult:
        method = FusionMethod.parse(method)
        for c in self.cells:
            if c.method is method and c.normalized == normalized:
                return c
        raise KeyError((method, normalized))

    def to_dict(self) -> dict:
        return {"config": self.config, "cells": [c.to_dict() for c in self.cells]}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_HEADER)
        for c in self.cells:
            ranks = list(c.rank_rates[:3]) + [None] * (3 - len(c.rank_rates[:3]))
            w.writerow([
                c.method.name,
                "true" if c.normalized else "false",
                *(_pct(r) for r in ranks),
                _pct(c.far),
                _pct(c.frr),
                c.invalid_count,
                c.total,
            ])
        return buf.getvalue()


def _pct(rate: float | None) -> str:
    return "" if rate is None else f"{100 * rate:.2f}"


def evaluate_cell(gallery: Gallery, probes: Sequence, method: FusionMethod, normalize: bool,
                  config: PipelineConfig, max_k: int = 3) -> CellResult:
    """Score ``(template, true_id)`` probes under one method and normalization setting.

    Verification trials reuse the identification decision: a claim is accepted
    exactly when it is the probe's decided identity. Each probe makes one genuine
    claim and one impostor claim per other enrolled subject.
    """
    ranked = []
    trials = []
    correct = invalid = 0
    for template, true_id in probes:
        d = identify(template, gallery, method, config.weights, normalize, config.metric)
        if d.invalid:
            invalid += 1
        correct += d.subject_id == true_id
        if d.ranking is not None:
            ranked.append((d.ranking, true_id))
        for claim in gallery.subject_ids:
            trials.append((d.subject_id == claim, claim == true_id))
    total = len(probes)
    if method is FusionMethod.GLOBAL_AND_LOCAL:
        # Accept/reject has no rank beyond the first.
        rates = (recognition_rate(correct, total),) + (None,) * (max_k - 1)
    else:
        rates = tuple(cmc_curve(ranked, max_k))
    far, frr = far_frr(trials)
    return CellResult(method, normalize, rates, correct, total, far, frr, invalid)


def run_experiment(manifest: DatasetManifest, config: PipelineConfig | None = None,
                   methods: Sequence[FusionMethod] = tuple(FusionMethod),
                   normalize_options: Sequence[bool] = (False, True),
                   max_k: int = 3) -> ExperimentReport:
    config = config or PipelineConfig()
    templates = []
    for e in manifest.gallery:
        img = read_pgm(manifest.resolve(e.image))
        lm = read_landmarks(manifest.resolve(e.landmarks))
        templates.append(build_template(img, lm, config.specs, e.subject))
    gallery = Gallery(templates, config.specs, config.metric, config.normalize)
    probes = []
    for e in manifest.probes:
        img = read_pgm(manifest.resolve(e.image))
        lm = read_landmarks(manifest.resolve(e.landmarks))
        probes.append((build_template(img, lm, config.specs), e.subject))
    if not probes:
        raise ManifestError("manifest has no probe entries")
    cells = []
    for method in methods:
        for normalize in normalize_options:
            cells.append(evaluate_cell(gallery, probes, FusionMethod.parse(method), normalize, config, max_k))
    return ExperimentReport(tuple(cells), config.echo())

