"""Coefficient distances and per-region ranking of a probe against the gallery."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dct import CoeffVector
from .errors import IncompatibleTemplatesError, UnknownSubjectError
from .features import FaceTemplate
from .gallery import METRICS, as_gallery

SUM_ABS = "sum-abs"
EUCLIDEAN = "euclidean"


class MatchScore(NamedTuple):
    subject_id: str
    distance: float


@dataclass(frozen=True)
class RankList:
    """Subjects in ascending distance order; rank 1 is the best match."""

    subjects: tuple[str, ...]
    distances: tuple[float, ...]

    def __post_init__(self):
        if len(self.subjects) != len(self.distances):
            raise ValueError("subjects and distances differ in length")

    @classmethod
    def from_scores(cls, scores) -> "RankList":
        """Sort ``(subject_id, distance)`` pairs ascending, ties by subject_id."""
        ordered = sorted(scores, key=lambda s: (s[1], s[0]))
        return cls(tuple(s[0] for s in ordered), tuple(float(s[1]) for s in ordered))

    def __len__(self):
        return len(self.subjects)

    @property
    def scores(self) -> tuple[MatchScore, ...]:
        return tuple(MatchScore(s, d) for s, d in zip(self.subjects, self.distances))

    @property
    def best(self) -> MatchScore:
        return MatchScore(self.subjects[0], self.distances[0])

    def rank_of(self, subject_id: str) -> int:
        try:
            return self.subjects.index(subject_id) + 1
        except ValueError:
            raise UnknownSubjectError(f"subject {subject_id!r} not in ranking") from None

    def distance_of(self, subject_id: str) -> float:
        return self.distances[self.rank_of(subject_id) - 1]

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.subjects, self.distances))

    def top(self, k: int) -> tuple[MatchScore, ...]:
        return self.scores[:k]


def _check_metric(metric: str):
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")


def coeff_distance(a: CoeffVector, b: CoeffVector, metric: str = SUM_ABS) -> float:
    """``sum-abs``: total of per-coefficient |a_i - b_i|. ``euclidean``: L2 norm of a - b."""
    _check_metric(metric)
    if a.kept != b.kept or (a.source_rows, a.source_cols) != (b.source_rows, b.source_cols):
        raise IncompatibleTemplatesError(
            f"cannot compare {a.kept} coefficients of {a.source_rows}x{a.source_cols} "
            f"with {b.kept} of {b.source_rows}x{b.source_cols}"
        )
    diff = a.values - b.values
    if metric == SUM_ABS:
        return float(np.abs(diff).sum())
    return float(np.sqrt(np.dot(diff, diff)))


def region_distances(probe: FaceTemplate, gallery, region_id: str,
                     normalize: bool = True, metric: str = SUM_ABS) -> np.ndarray:
    """Distances from the probe to every gallery subject in gallery order.

    With ``normalize`` the probe's coefficients are multiplied by
    ``gallery_mean / probe_mean`` per subject, which by linearity of the DCT equals
    rescaling the probe's pixels to that subject's average brightness.
    """
    _check_metric(metric)
    gallery = as_gallery(gallery)
    gallery.require_nonempty()
    if probe.specs != gallery.specs:
        raise IncompatibleTemplatesError("probe and gallery were built with different region specs")
    stacked = gallery.stacked(region_id)
    p = probe.vectors[region_id].values
    if normalize:
        factors = gallery.means / probe.mean_intensity
        diff = stacked - factors[:, None] * p[None, :]
    else:
        diff = stacked - p[None, :]
    if metric == SUM_ABS:
        return np.abs(diff).sum(axis=1)
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def rank_distances(gallery, distances: np.ndarray) -> RankList:
    gallery = as_gallery(gallery)
    order = np.lexsort((gallery.tiebreak, distances))
    ids = gallery.subject_ids
    return RankList(tuple(ids[i] for i in order), tuple(float(distances[i]) for i in order))


def rank_gallery(probe: FaceTemplate, gallery, region_id: str,
                 normalize: bool = True, metric: str = SUM_ABS) -> RankList:
    gallery = as_gallery(gallery)
    return rank_distances(gallery, region_distances(probe, gallery, region_id, normalize, metric))
