"""Score fusion across facial regions and the four identification methods."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import UnknownSubjectError, WeightsError
from .features import GLOBAL, LOCAL_REGIONS, REGIONS, EYE_LEFT, EYE_RIGHT, MOUTH, NOSE, FaceTemplate
from .gallery import as_gallery
from .matching import SUM_ABS, RankList, rank_distances, region_distances

# Single-region recognition rates (%) reported for the whole face and each local region.
TABLE_I_RATES = {GLOBAL: 88.25, EYE_RIGHT: 87.18, EYE_LEFT: 86.1, NOSE: 56.2, MOUTH: 52.35}


class FusionMethod(enum.Enum):
    GLOBAL = "g"
    LOCAL = "l"
    GLOBAL_PLUS_LOCAL = "gl"
    GLOBAL_AND_LOCAL = "and"

    @classmethod
    def parse(cls, value) -> "FusionMethod":
        if isinstance(value, cls):
            return value
        text = str(value).strip()
        for m in cls:
            if text.lower() == m.value or text.upper() == m.name:
                return m
        raise ValueError(f"unknown fusion method {value!r}")

    @property
    def label(self) -> str:
        return {"g": "GLOBAL", "l": "LOCAL", "gl": "GLOBAL+LOCAL", "and": "GLOBAL AND LOCAL"}[self.value]


@dataclass(frozen=True)
class FeatureWeights:
    """Nonnegative weight per region. Regions not listed weigh zero."""

    weights: Mapping[str, float]

    def __post_init__(self):
        w = {}
        for region, value in self.weights.items():
            if region not in REGIONS:
                raise WeightsError(f"unknown region {region!r}")
            value = float(value)
            if not value >= 0 or not np.isfinite(value):
                raise WeightsError(f"weight for {region} must be a finite nonnegative number")
            w[region] = value
        object.__setattr__(self, "weights", {r: w.get(r, 0.0) for r in REGIONS})

    @classmethod
    def from_sequence(cls, values: Sequence[float]) -> "FeatureWeights":
        """Five weights in region order: global, eye_left, eye_right, nose, mouth."""
        if len(values) != len(REGIONS):
            raise WeightsError(f"expected {len(REGIONS)} weights, got {len(values)}")
        return cls(dict(zip(REGIONS, values)))

    def __getitem__(self, region: str) -> float:
        return self.weights[region]

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(self.weights[r] for r in REGIONS)

    def restricted(self, regions: Sequence[str]) -> dict[str, float]:
        """Weights over ``regions`` rescaled to sum to 1, dropping zero entries."""
        total = sum(self.weights[r] for r in regions)
        if total <= 0:
            raise WeightsError(f"all weights over {list(regions)} are zero")
        return {r: self.weights[r] / total for r in regions if self.weights[r] > 0}


def default_weights(rates: Mapping[str, float] = TABLE_I_RATES) -> FeatureWeights:
    """Weights proportional to each region's standalone recognition rate."""
    rates = {r: float(v) for r, v in rates.items()}
    if any(v < 0 for v in rates.values()):
        raise WeightsError("recognition rates must be nonnegative")
    total = sum(rates.values())
    if total <= 0:
        raise WeightsError("at least one recognition rate must be positive")
    return FeatureWeights({r: v / total for r, v in rates.items()})


def minmax_normalize(scores) -> list[float]:
    """Map scores to [0, 1]; a constant list maps to all zeros.

    Accepts raw numbers or ``MatchScore``-like pairs.
    """
    values = [s[1] if isinstance(s, tuple) else s for s in scores]
    if not values:
        raise ValueError("cannot normalize an empty score list")
    arr = np.asarray(values, dtype=np.float64)
    lo, hi = arr.min(), arr.max()
    if hi == lo:
        return [0.0] * len(values)
    return list((arr - lo) / (hi - lo))


def _minmax_array(arr: np.ndarray) -> np.ndarray:
    lo, hi = arr.min(), arr.max()
    if hi == lo:
        return np.zeros_like(arr)
    return (arr - lo) / (hi - lo)


def fuse_weighted(rankings: Mapping[str, RankList], weights: FeatureWeights) -> RankList:
    """Weighted sum of min-max normalized per-region distances, ranked ascending."""
    participating = weights.restricted(list(rankings))
    subjects = None
    for region, ranking in rankings.items():
        ids = sorted(ranking.subjects)
        if subjects is None:
            subjects = ids
        elif ids != subjects:
            raise UnknownSubjectError(f"ranking for {region} covers a different subject set")
    if len(participating) == 1:
        (region,) = participating
        ranking = rankings[region]
        # Already in order; normalizing can only merge near-ties, never reorder.
        return RankList(ranking.subjects, tuple(_minmax_array(np.array(ranking.distances)).tolist()))
    fused = np.zeros(len(subjects))
    for region, w in participating.items():
        dist = rankings[region].as_dict()
        fused += w * _minmax_array(np.array([dist[s] for s in subjects]))
    return RankList.from_scores(zip(subjects, fused.tolist()))


def _fused_from_distances(gallery, distances: Mapping[str, np.ndarray], weights: FeatureWeights) -> RankList:
    participating = weights.restricted(list(distances))
    if len(participating) == 1:
        (region,) = participating
        raw = distances[region]
        order = np.lexsort((gallery.tiebreak, raw))
        norm = _minmax_array(raw)
        ids = gallery.subject_ids
        return RankList(tuple(ids[i] for i in order), tuple(float(norm[i]) for i in order))
    fused = np.zeros(len(gallery))
    for region, w in participating.items():
        fused += w * _minmax_array(distances[region])
    return rank_distances(gallery, fused)


@dataclass(frozen=True)
class Decision:
    """Outcome of identification or verification; ``subject_id`` is None when INVALID."""

    subject_id: str | None
    method: FusionMethod
    normalized: bool
    ranking: RankList | None = None
    constituents: Mapping[str, RankList] = field(default_factory=dict)

    @property
    def invalid(self) -> bool:
        return self.subject_id is None

    @property
    def accepted(self) -> bool:
        return self.subject_id is not None


def _method_rankings(probe, gallery, method: FusionMethod, weights: FeatureWeights,
                     normalize: bool, metric: str) -> dict[str, RankList]:
    """Global ranking and/or LOCAL / GLOBAL+LOCAL fused ranking as needed by ``method``."""
    need_global = method in (FusionMethod.GLOBAL, FusionMethod.GLOBAL_AND_LOCAL)
    need_local = method in (FusionMethod.LOCAL, FusionMethod.GLOBAL_AND_LOCAL)
    need_all = method is FusionMethod.GLOBAL_PLUS_LOCAL
    regions = REGIONS if (need_all or (need_global and need_local)) else (
        (GLOBAL,) if need_global else LOCAL_REGIONS)
    dist = {r: region_distances(probe, gallery, r, normalize, metric) for r in regions}
    out = {}
    if need_global:
        out["global"] = rank_distances(gallery, dist[GLOBAL])
    if need_local:
        out["local"] = _fused_from_distances(gallery, {r: dist[r] for r in LOCAL_REGIONS}, weights)
    if need_all:
        out["global+local"] = _fused_from_distances(gallery, dist, weights)
    return out


def identify(probe: FaceTemplate, gallery, method=FusionMethod.GLOBAL,
             weights: FeatureWeights | None = None, normalize: bool = True,
             metric: str = SUM_ABS) -> Decision:
    method = FusionMethod.parse(method)
    weights = weights or default_weights()
    gallery = as_gallery(gallery)
    gallery.require_nonempty()
    ranks = _method_rankings(probe, gallery, method, weights, normalize, metric)
    if method is FusionMethod.GLOBAL_AND_LOCAL:
        g, l = ranks["global"].best.subject_id, ranks["local"].best.subject_id
        return Decision(g if g == l else None, method, normalize, None, ranks)
    ranking = next(iter(ranks.values()))
    return Decision(ranking.best.subject_id, method, normalize, ranking, ranks)


def verify(probe: FaceTemplate, gallery, claimed_id: str,
           weights: FeatureWeights | None = None, normalize: bool = True,
           metric: str = SUM_ABS, method=FusionMethod.GLOBAL_AND_LOCAL) -> Decision:
    """Accept the claim only if it holds rank 1 in the method's ranking(s).

    Under the default AND rule the claim must be first in both the global ranking
    and the LOCAL fused ranking.
    """
    method = FusionMethod.parse(method)
    weights = weights or default_weights()
    gallery = as_gallery(gallery)
    gallery.require_nonempty()
    if claimed_id not in gallery:
        raise UnknownSubjectError(f"claimed subject {claimed_id!r} is not enrolled")
    ranks = _method_rankings(probe, gallery, method, weights, normalize, metric)
    ok = all(r.best.subject_id == claimed_id for r in ranks.values())
    ranking = None if method is FusionMethod.GLOBAL_AND_LOCAL else next(iter(ranks.values()))
    return Decision(claimed_id if ok else None, method, normalize, ranking, ranks)

