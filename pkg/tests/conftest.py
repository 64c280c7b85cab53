import numpy as np
import pytest
from scipy.ndimage import gaussian_filter

from dctface.features import FaceLandmarks, Point
from dctface.image_io import GrayImage

LANDMARKS = FaceLandmarks(
    eye_left=Point(40, 44),
    eye_right=Point(88, 44),
    nose=Point(64, 74),
    mouth=Point(64, 100),
)

_acceptance_lines = []


def smooth_face(rng, sigma=6.0, lo=50.0, hi=200.0, size=128):
    """Random smooth 'face': Gaussian-filtered noise stretched to [lo, hi]."""
    field = gaussian_filter(rng.standard_normal((size, size)), sigma, mode="reflect")
    field = (field - field.min()) / (field.max() - field.min())
    return GrayImage(lo + (hi - lo) * field)


def naive_dct_2d(x):
    """Direct quadruple-loop DCT, written straight from the cosine-sum definition."""
    x = np.asarray(x, dtype=float)
    n, m = x.shape
    out = np.zeros((n, m))
    for u in range(n):
        au = 1 / np.sqrt(2) if u == 0 else 1.0
        for v in range(m):
            av = 1 / np.sqrt(2) if v == 0 else 1.0
            total = 0.0
            for i in range(n):
                ci = np.cos(u * (2 * i + 1) * np.pi / (2 * n))
                for j in range(m):
                    total += ci * np.cos(v * (2 * j + 1) * np.pi / (2 * m)) * x[i, j]
            out[u, v] = np.sqrt(2 / n) * np.sqrt(2 / m) * au * av * total
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def landmarks():
    return LANDMARKS


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion for the terminal summary."""

    def record(name, ok, detail=""):
        _acceptance_lines.append(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f" ({detail})" if detail else ""))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


def tiny_template(subject_id, global_values, local_values=None, mean=100.0, specs=None):
    """Template built straight from coefficient values (every region kept=len(values))."""
    from dctface.dct import CoeffVector
    from dctface.features import LOCAL_REGIONS, FaceTemplate, make_specs

    specs = specs or make_specs(kept=len(global_values))
    local_values = global_values if local_values is None else local_values
    vectors = {}
    for spec in specs:
        if spec.region_id in LOCAL_REGIONS and isinstance(local_values, dict):
            values = local_values[spec.region_id]
        else:
            values = global_values if spec.region_id == "global" else local_values
        vectors[spec.region_id] = CoeffVector(np.asarray(values, dtype=float), spec.height, spec.width)
    return FaceTemplate(mean, vectors, specs, subject_id)


def write_dataset(root, rng, n_subjects=4, probes_per_subject=1, noise=0.0, brightness=1.0, sigma=6.0):
    """Write gallery/probe PGMs, one shared landmark sidecar and a manifest.csv; return the manifest path."""
    from dctface.features import write_landmarks
    from dctface.image_io import GrayImage, write_pgm

    root.mkdir(parents=True, exist_ok=True)
    write_landmarks(LANDMARKS, root / "lm.json")
    rows = ["image,landmarks,subject,role"]
    for s in range(n_subjects):
        sid = f"p{s:02d}"
        face = smooth_face(rng, sigma=sigma)
        write_pgm(face, root / f"{sid}_g.pgm")
        rows.append(f"{sid}_g.pgm,lm.json,{sid},gallery")
        for k in range(probes_per_subject):
            pixels = face.pixels + rng.normal(0, noise, face.shape) if noise else face.pixels
            write_pgm(GrayImage(pixels * brightness), root / f"{sid}_p{k}.pgm")
            rows.append(f"{sid}_p{k}.pgm,lm.json,{sid},probe")
    manifest = root / "manifest.csv"
    manifest.write_text("\n".join(rows) + "\n")
    return manifest
