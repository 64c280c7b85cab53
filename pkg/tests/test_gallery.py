import json

import numpy as np
import pytest

from dctface.errors import DuplicateSubjectError, GalleryFormatError, IncompatibleGalleryError
from dctface.features import DEFAULT_SPECS, build_template, make_specs
from dctface.gallery import Gallery, dumps_gallery, load_gallery, save_gallery
from conftest import smooth_face, tiny_template


def random_gallery(rng, n):
    templates = []
    for i in range(n):
        values = rng.standard_normal(3) * 10 ** rng.uniform(-8, 8, 3)
        templates.append(tiny_template(f"subj-{i}", values, rng.standard_normal(3), mean=float(rng.uniform(1, 255))))
    return Gallery(templates)


def test_empty_gallery_roundtrip(tmp_path):
    path = tmp_path / "g.json"
    save_gallery(Gallery(), path)
    doc = json.loads(path.read_text())
    assert doc["subjects"] == [] and doc["version"] == 1
    loaded = load_gallery(path)
    assert len(loaded) == 0 and loaded.specs == DEFAULT_SPECS


def test_single_subject_bit_exact(tmp_path, rng, landmarks):
    t = build_template(smooth_face(rng), landmarks, subject_id="alice")
    path = tmp_path / "g.json"
    save_gallery(Gallery([t]), path)
    doc = json.loads(path.read_text())
    for region, values in doc["subjects"][0]["coefficients"].items():
        stored = np.array(values)
        assert stored.tobytes() == t.vectors[region].values.tobytes()
    assert load_gallery(path) == Gallery([t])


def test_random_roundtrip_and_byte_stability(tmp_path, rng):
    g = random_gallery(rng, 7)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    save_gallery(g, a)
    loaded = load_gallery(a)
    assert loaded == g
    save_gallery(loaded, b)
    assert a.read_bytes() == b.read_bytes()
    save_gallery(load_gallery(b), b)
    assert a.read_bytes() == b.read_bytes()


def test_duplicate_ids_rejected_before_write(tmp_path):
    path = tmp_path / "g.json"
    with pytest.raises(DuplicateSubjectError):
        save_gallery([tiny_template("x", [1.0]), tiny_template("x", [2.0])], path)
    assert not path.exists()


def tamper(tmp_path, rng, edit):
    path = tmp_path / "g.json"
    save_gallery(random_gallery(rng, 2), path)
    doc = json.loads(path.read_text())
    edit(doc)
    path.write_text(json.dumps(doc))
    return path


def test_unknown_zigzag_convention(tmp_path, rng):
    path = tamper(tmp_path, rng, lambda d: d["provenance"].update(zigzag="down-first"))
    with pytest.raises(IncompatibleGalleryError):
        load_gallery(path)


def test_unknown_version(tmp_path, rng):
    path = tamper(tmp_path, rng, lambda d: d.update(version=2))
    with pytest.raises(IncompatibleGalleryError):
        load_gallery(path)


def test_short_array_rejected(tmp_path, rng, landmarks):
    path = tmp_path / "g.json"
    save_gallery(Gallery([build_template(smooth_face(rng), landmarks, subject_id="a")]), path)
    doc = json.loads(path.read_text())
    doc["subjects"][0]["coefficients"]["global"] = doc["subjects"][0]["coefficients"]["global"][:63]
    path.write_text(json.dumps(doc))
    with pytest.raises(GalleryFormatError):
        load_gallery(path)


def test_duplicate_in_file(tmp_path, rng):
    path = tamper(tmp_path, rng, lambda d: d["subjects"].append(dict(d["subjects"][0])))
    with pytest.raises(DuplicateSubjectError):
        load_gallery(path)


def test_spec_mismatch_with_running_config(tmp_path):
    path = tmp_path / "g.json"
    save_gallery(Gallery(), path)
    with pytest.raises(IncompatibleGalleryError):
        load_gallery(path, make_specs(kept=32))
    assert len(load_gallery(path, DEFAULT_SPECS)) == 0


def test_not_json(tmp_path):
    path = tmp_path / "g.json"
    path.write_text("{nope")
    with pytest.raises(GalleryFormatError):
        load_gallery(path)


def test_canonical_sorted_keys(rng):
    text = dumps_gallery(random_gallery(rng, 1))
    doc = json.loads(text)
    assert list(doc) == sorted(doc)
