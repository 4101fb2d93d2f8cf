"""Command line entry point: manifest in, PFV1 file out."""

from __future__ import annotations

import argparse
import sys

from .backbones import known_backbones
from .errors import ExtractorError
from .extract import ExtractionJob, extract_features, read_image_manifest


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pfv-extract",
        description="Export pooled CNN features from an image manifest "
        "into a PFV1 feature file.",
    )
    parser.add_argument("manifest", help="CSV with a path,class_name header")
    parser.add_argument("output", help="PFV1 file to write")
    parser.add_argument(
        "--backbone",
        default="resnet50",
        choices=known_backbones(),
        help="frozen backbone tag (default: resnet50)",
    )
    parser.add_argument("--batch-size", type=int, default=8)
    parser.add_argument(
        "--weights",
        default=None,
        help="optional state-dict path; otherwise a fixed-seed init is used",
    )
    parser.add_argument("--split-tag", default="train")
    args = parser.parse_args(argv)

    try:
        rows = read_image_manifest(args.manifest)
        job = ExtractionJob(
            image_paths=[p for p, _ in rows],
            class_names=[n for _, n in rows],
            output_path=args.output,
            backbone_tag=args.backbone,
            batch_size=args.batch_size,
            weights_path=args.weights,
            split_tag=args.split_tag,
        )
        result = extract_features(job)
    except ExtractorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3

    for line in result.warnings:
        print(f"warning: {line}", file=sys.stderr)
    print(
        f"wrote {result.num_exported} vectors (L={result.embedding_width}) "
        f"to {result.output_path}"
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
