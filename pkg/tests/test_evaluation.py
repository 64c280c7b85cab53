import csv
import io
import itertools

import pytest

from dctface.config import PipelineConfig
from dctface.errors import ManifestError, UnknownSubjectError
from dctface.evaluation import (
    REPORT_HEADER,
    DatasetManifest,
    ManifestEntry,
    cmc_curve,
    evaluate_cell,
    far_frr,
    recognition_rate,
    run_experiment,
)
from dctface.features import build_template, read_landmarks
from dctface.fusion import FusionMethod, verify
from dctface.gallery import Gallery
from dctface.image_io import read_pgm
from dctface.matching import RankList
from conftest import write_dataset


@pytest.mark.parametrize("correct, total, rate", [(23, 25, 0.92), (0, 25, 0.0), (25, 25, 1.0)])
def test_recognition_rate(correct, total, rate):
    assert recognition_rate(correct, total) == rate


def test_recognition_rate_errors():
    with pytest.raises(ValueError):
        recognition_rate(0, 0)
    with pytest.raises(ValueError):
        recognition_rate(3, 2)


def ranklist(order):
    return RankList(tuple(order), tuple(float(i) for i in range(len(order))))


def test_cmc_examples():
    assert cmc_curve([(ranklist("ABC"), "A")], 1) == [1.0]
    assert cmc_curve([(ranklist("ABC"), "A"), (ranklist("BCA"), "A")], 3) == [0.5, 0.5, 1.0]
    with pytest.raises(UnknownSubjectError):
        cmc_curve([(ranklist("ABC"), "Z")], 2)


def test_cmc_matches_recount(rng):
    ids = [f"s{i}" for i in range(8)]
    results = []
    for _ in range(20):
        order = list(rng.permutation(ids))
        results.append((ranklist(order), str(rng.choice(ids))))
    curve = cmc_curve(results, len(ids))
    for k in range(1, len(ids) + 1):
        hits = 0
        for ranking, true_id in results:
            if true_id in ranking.subjects[:k]:
                hits += 1
        assert curve[k - 1] == hits / 20
    assert all(a <= b for a, b in zip(curve, curve[1:]))
    assert curve[-1] == 1.0


def test_far_frr_examples():
    assert far_frr([(True, True)] * 10 + [(False, False)] * 10) == (0.0, 0.0)
    trials = [(True, True)] * 8 + [(False, True)] * 2 + [(True, False)] + [(False, False)] * 9
    assert far_frr(trials) == (0.1, 0.2)
    assert far_frr([(True, True)]) == (None, 0.0)
    assert far_frr([]) == (None, None)


def test_manifest_rules(tmp_path):
    g = ManifestEntry("a.pgm", "lm.json", "a", "gallery")
    with pytest.raises(ManifestError):
        DatasetManifest((g, ManifestEntry("b.pgm", "lm.json", "a", "gallery")))
    with pytest.raises(ManifestError):
        DatasetManifest((g, ManifestEntry("c.pgm", "lm.json", "z", "probe")))
    with pytest.raises(ManifestError):
        DatasetManifest((ManifestEntry("c.pgm", "lm.json", "a", "test"),))
    with pytest.raises(ManifestError):
        DatasetManifest(())
    path = tmp_path / "m.csv"
    path.write_text("img,lm,subject,role\n")
    with pytest.raises(ManifestError):
        DatasetManifest.from_csv(path)


def test_self_match_experiment(tmp_path, rng):
    manifest = write_dataset(tmp_path / "ds", rng, n_subjects=4)
    report = run_experiment(DatasetManifest.from_csv(manifest))
    assert len(report.cells) == 8
    for cell in report.cells:
        assert cell.rank_rates[0] == 1.0
        assert cell.correct == cell.total == 4
        assert cell.far == 0.0 and cell.frr == 0.0
        assert cell.invalid_count == 0


def test_report_csv_shape(tmp_path, rng):
    manifest = write_dataset(tmp_path / "ds", rng, n_subjects=3, probes_per_subject=2, noise=20)
    report = run_experiment(DatasetManifest.from_csv(manifest))
    rows = list(csv.reader(io.StringIO(report.to_csv())))
    assert rows[0] == REPORT_HEADER
    assert len(rows) == 9
    methods = [(r[0], r[1]) for r in rows[1:]]
    assert methods == [(m.name, n) for m in FusionMethod for n in ("false", "true")]
    for r in rows[1:]:
        for field in r[2:7]:
            assert field == "" or (len(field.split(".")[1]) == 2 and 0 <= float(field) <= 100)
        assert r[8] == "6"
    and_row = rows[-1]
    assert and_row[3] == and_row[4] == ""


def test_report_is_deterministic(tmp_path, rng):
    manifest = write_dataset(tmp_path / "ds", rng, n_subjects=3, probes_per_subject=2, noise=15)
    m = DatasetManifest.from_csv(manifest)
    assert run_experiment(m).to_csv() == run_experiment(m).to_csv()


def test_invariants_on_noisy_data(tmp_path, rng):
    manifest = write_dataset(tmp_path / "ds", rng, n_subjects=6, probes_per_subject=3, noise=60, sigma=3)
    report = run_experiment(DatasetManifest.from_csv(manifest), max_k=6)
    for cell in report.cells:
        if cell.method is not FusionMethod.GLOBAL_AND_LOCAL:
            rates = cell.rank_rates
            assert all(a <= b for a, b in zip(rates, rates[1:]))
            assert rates[-1] == 1.0
        assert cell.rank_rates[0] == recognition_rate(cell.correct, cell.total)
        assert 0 <= cell.far <= 1 and 0 <= cell.frr <= 1


def test_trials_agree_with_verify(tmp_path, rng):
    """The cell's shortcut (claim accepted iff it is the decided identity) equals calling verify per claim."""
    manifest = DatasetManifest.from_csv(
        write_dataset(tmp_path / "ds", rng, n_subjects=4, probes_per_subject=2, noise=70, sigma=3))
    config = PipelineConfig()
    gallery = Gallery([
        build_template(read_pgm(manifest.resolve(e.image)), _lm(manifest, e), config.specs, e.subject)
        for e in manifest.gallery
    ])
    probes = [(build_template(read_pgm(manifest.resolve(e.image)), _lm(manifest, e), config.specs), e.subject)
              for e in manifest.probes]
    for method, normalize in itertools.product(FusionMethod, (False, True)):
        cell = evaluate_cell(gallery, probes, method, normalize, config)
        trials = [
            (verify(t, gallery, claim, config.weights, normalize, config.metric, method).accepted, claim == true)
            for t, true in probes for claim in gallery.subject_ids
        ]
        assert (cell.far, cell.frr) == far_frr(trials)


def _lm(manifest, entry):
    return read_landmarks(manifest.resolve(entry.landmarks))


def test_manifest_csv_roundtrip(tmp_path, rng):
    manifest = write_dataset(tmp_path / "ds", rng, n_subjects=2)
    m = DatasetManifest.from_csv(manifest)
    assert m.to_csv() == manifest.read_text()
    assert len(m.gallery) == 2 and len(m.probes) == 2
