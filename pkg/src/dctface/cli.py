"""Batch command-line interface.

Exit codes: 0 success, 1 INVALID / not recognized, 2 usage error, 3 I/O or data error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .config import PipelineConfig, load_config
from .dct import dct_2d, energy_fraction, truncate, zigzag_scan
from .errors import DctFaceError, UnknownSubjectError
from .evaluation import DatasetManifest, run_experiment
from .features import build_template, read_landmarks
from .fusion import FusionMethod, identify, verify
from .gallery import Gallery, load_gallery, save_gallery
from .image_io import read_pgm

EXIT_OK, EXIT_INVALID, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _config(args) -> PipelineConfig:
    cfg = load_config(args.config)
    return cfg.override(
        method=FusionMethod.parse(args.method) if getattr(args, "method", None) else None,
        metric=getattr(args, "metric", None),
        normalize=False if getattr(args, "no_normalize", False) else None,
    )


def _probe(args, cfg: PipelineConfig):
    img = read_pgm(args.image)
    lm = read_landmarks(args.landmarks)
    return build_template(img, lm, cfg.specs)


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def cmd_enroll(args, out) -> int:
    cfg = _config(args)
    if os.path.exists(args.gallery):
        gallery = load_gallery(args.gallery, cfg.specs)
    else:
        gallery = Gallery((), cfg.specs, cfg.metric, cfg.normalize)
    template = build_template(read_pgm(args.image), read_landmarks(args.landmarks), cfg.specs, args.id)
    gallery = gallery.add(template)
    save_gallery(gallery, args.gallery)
    print(f"enrolled,{args.id},{len(gallery)}", file=out)
    return EXIT_OK


def cmd_identify(args, out) -> int:
    cfg = _config(args)
    gallery = load_gallery(args.gallery, cfg.specs)
    gallery.require_nonempty()
    probe = _probe(args, cfg)
    decision = identify(probe, gallery, cfg.method, cfg.weights, cfg.normalize, cfg.metric)
    if cfg.method is FusionMethod.GLOBAL_AND_LOCAL:
        print(decision.subject_id if decision.accepted else "INVALID", file=out)
        return EXIT_OK if decision.accepted else EXIT_INVALID
    k = len(gallery) if args.top_k is None else args.top_k
    for rank, (subject, dist) in enumerate(decision.ranking.top(k), start=1):
        print(f"{rank},{subject},{_fmt(dist)}", file=out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    cfg = _config(args)
    gallery = load_gallery(args.gallery, cfg.specs)
    gallery.require_nonempty()
    if args.claim not in gallery:
        raise UsageError(f"claimed subject {args.claim!r} is not enrolled")
    probe = _probe(args, cfg)
    decision = verify(probe, gallery, args.claim, cfg.weights, cfg.normalize, cfg.metric)
    print("ACCEPT" if decision.accepted else "INVALID", file=out)
    return EXIT_OK if decision.accepted else EXIT_INVALID


def cmd_evaluate(args, out) -> int:
    cfg = _config(args)
    manifest = DatasetManifest.from_csv(args.manifest)
    report = run_experiment(manifest, cfg)
    text = report.to_csv()
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    out.write(text)
    return EXIT_OK


def _coef(x: float) -> str:
    text = f"{x:.6f}".rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


def cmd_dct_inspect(args, out) -> int:
    img = read_pgm(args.image)
    if args.coeffs < 1 or args.coeffs > img.width * img.height:
        raise UsageError(f"--coeffs must lie in 1..{img.width * img.height}")
    full = zigzag_scan(dct_2d(img))
    head = truncate(full, args.coeffs)
    print(", ".join(_coef(v) for v in head.values), file=out)
    print(f"energy_fraction,{_fmt(energy_fraction(full, args.coeffs))}", file=out)
    return EXIT_OK


def _matching_flags(p: argparse.ArgumentParser):
    p.add_argument("--gallery", required=True)
    p.add_argument("--image", required=True)
    p.add_argument("--landmarks", required=True)
    p.add_argument("--no-normalize", action="store_true", help="skip mean-intensity normalization")
    p.add_argument("--metric", choices=["sum-abs", "euclidean"])
    p.add_argument("--config", help="JSON config (default: $DCTFACE_CONFIG)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dctface", description="DCT face identification toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enroll", help="add a face template to a gallery file")
    p.add_argument("--gallery", required=True)
    p.add_argument("--image", required=True)
    p.add_argument("--landmarks", required=True)
    p.add_argument("--id", required=True)
    p.add_argument("--config")
    p.set_defaults(func=cmd_enroll)

    p = sub.add_parser("identify", help="rank gallery subjects for a probe image")
    _matching_flags(p)
    p.add_argument("--method", choices=["g", "l", "gl", "and"], default=None)
    p.add_argument("--top-k", type=int, default=None)
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("verify", help="accept or reject an identity claim (global AND local)")
    _matching_flags(p)
    p.add_argument("--claim", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("evaluate", help="run all methods over a dataset manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--json", help="also write the full report as JSON")
    p.add_argument("--config")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("dct-inspect", help="print leading zigzag DCT coefficients of an image")
    p.add_argument("--image", required=True)
    p.add_argument("--coeffs", type=int, default=64)
    p.set_defaults(func=cmd_dct_inspect)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "top_k", None) is not None and args.top_k < 1:
        print("dctface: error: --top-k must be at least 1", file=err)
        return EXIT_USAGE
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"dctface: error: {exc}", file=err)
        return EXIT_USAGE
    except UnknownSubjectError as exc:
        print(f"dctface: error: {exc}", file=err)
        return EXIT_USAGE
    except (DctFaceError, OSError, ValueError) as exc:
        print(f"dctface: error: {exc}", file=err)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
