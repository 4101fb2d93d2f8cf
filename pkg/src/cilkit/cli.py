"""Command-line front end.

Subcommands mirror the table-producing steps: ``split`` previews a
class-to-task assignment, ``train`` runs an experiment and writes report
files, ``prompts`` renders or replays the catalogue-building prompts,
``manifest`` freezes image-generation jobs, ``generate`` drives an image
client over a manifest, and ``report`` re-emits tables from a saved JSON
report.

Exit codes: 0 success, 2 configuration error (argparse usage errors
included), 3 data/format/IO error, 4 protocol error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .errors import CilkitError, ConfigurationError
from .feature_store import load_feature_file, split_classes_into_tasks
from .harness import emit_report, load_experiment_config, load_report, run_experiment
from .pipeline import (
    ReplayChatClient,
    SolidColorImageClient,
    Transcript,
    build_generation_manifest,
    load_manifest,
    parse_description_csv,
    read_class_specs_csv,
    render_class_name_system_prompt,
    render_description_system_prompt,
    render_subtype_prompt,
    run_generation,
    save_manifest,
    save_report,
    write_class_specs_csv,
)
from .pipeline.generate import HttpImageClient
from .pipeline.prompts import BIOLOGICAL_COLUMNS, GENERAL_COLUMNS
from .pipeline.realms import RealmSpec


def _cmd_split(args) -> int:
    dataset = load_feature_file(args.features)
    partition = split_classes_into_tasks(dataset.class_ids(), args.tasks, args.seed)
    doc = {
        "tasks": partition.T,
        "seed": partition.seed,
        "assignment": {str(c): t for c, t in sorted(partition.assignment.items())},
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    for t in range(partition.T):
        ids = partition.classes_for_task(t)
        print(f"task {t + 1}: {len(ids)} classes {ids}")
    return 0


def _cmd_train(args) -> int:
    overrides = {
        "train_path": args.train,
        "test_path": args.test,
        "tasks": args.tasks,
        "seed": args.seed,
        "learner": args.learner,
        "alpha": args.alpha,
        "width": args.width,
        "lam": args.lam,
        "balanced": False if args.unbalanced else None,
        "output_dir": args.output_dir,
        "prototype_path": args.prototypes,
        "dataset_tag": args.dataset_tag,
    }
    config = load_experiment_config(args.config, overrides)
    report = run_experiment(config)
    paths = emit_report(report, config.output_dir, basename=args.basename)
    for fmt in sorted(paths):
        print(f"wrote {paths[fmt]}")
    print(f"final_avg_accuracy={report.final_avg_accuracy:.17g}")
    return 0


def _realm_from(args) -> RealmSpec:
    return RealmSpec(name=args.realm, kind=args.kind,
                     subtype_noun=args.subtype_noun)


def _cmd_prompts(args) -> int:
    realm = _realm_from(args)
    if args.names_file:
        with open(args.names_file, "r", encoding="utf-8") as fh:
            names = [line.strip() for line in fh if line.strip()]
        for system, user in render_class_name_system_prompt(realm, names):
            print("--- system ---")
            print(system)
            print("--- user ---")
            print(user)
        return 0
    if not args.subtype:
        print(render_subtype_prompt(realm))
        return 0
    columns = BIOLOGICAL_COLUMNS if realm.kind == "biological" else GENERAL_COLUMNS
    if args.transcript:
        merged = Transcript()
        for path in args.transcript:
            merged.exchanges.extend(Transcript.load(path).exchanges)
        client = ReplayChatClient(merged)
        specs = []
        for subtype in args.subtype:
            system, user = render_description_system_prompt(realm, subtype)
            response = client.chat(system, user)
            accepted, rejects = parse_description_csv(
                response, columns, source_subtype=subtype
            )
            specs.extend(accepted)
            for reject in rejects:
                print(f"rejected ({reject.reason}): {reject.text}",
                      file=sys.stderr)
        if not args.out:
            raise ConfigurationError("--transcript mode needs --out for specs")
        write_class_specs_csv(specs, args.out)
        print(f"wrote {len(specs)} class specs to {args.out}")
        return 0
    for subtype in args.subtype:
        system, user = render_description_system_prompt(realm, subtype)
        print("--- system ---")
        print(system)
        print("--- user ---")
        print(user)
    return 0


def _cmd_manifest(args) -> int:
    specs = read_class_specs_csv(args.specs)
    manifest = build_generation_manifest(
        _realm_from(args), specs, n_per_class=args.n, seed=args.seed,
        style=args.style, image_size=args.size,
        inference_steps=args.steps, guidance_scale=args.guidance,
    )
    save_manifest(manifest, args.out)
    print(f"wrote {len(manifest.jobs)} jobs for "
          f"{manifest.num_classes} classes to {args.out}")
    return 0


def _cmd_generate(args) -> int:
    manifest = load_manifest(args.manifest)
    client = SolidColorImageClient() if args.client == "solid" else HttpImageClient()
    report = run_generation(
        manifest, client, args.output_dir, retries=args.retries,
        backoff_seconds=args.backoff, parallelism=args.parallelism,
    )
    if args.report:
        save_report(report, args.report)
    print(f"complete={report.count('complete')} "
          f"skipped={report.count('skipped')} failed={report.count('failed')}")
    return 0


def _cmd_report(args) -> int:
    report = load_report(args.json)
    report.check()
    paths = emit_report(report, args.output_dir, formats=("csv",),
                        basename=args.basename)
    print(f"wrote {paths['csv']}")
    print(f"final_avg_accuracy={report.final_avg_accuracy:.17g}")
    return 0


def _add_realm_flags(parser) -> None:
    parser.add_argument("--realm", required=True, help="realm name, e.g. Birds")
    parser.add_argument("--kind", choices=("biological", "general"),
                        default="biological")
    parser.add_argument("--subtype-noun", default="orders",
                        help="taxonomic rank word used in biological prompts")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cilkit",
        description="streaming class-incremental learners, feature files, "
                    "and the synthetic-image data pipeline",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("split", help="preview a class-to-task assignment")
    p.add_argument("--features", required=True)
    p.add_argument("--tasks", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the assignment as JSON")
    p.set_defaults(fn=_cmd_split)

    p = sub.add_parser("train", help="run one experiment and write reports")
    p.add_argument("--config", help="JSON config file; flags override it")
    p.add_argument("--train", help="training feature file")
    p.add_argument("--test", help="test feature file")
    p.add_argument("--tasks", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--learner", choices=("ncm", "lda", "ranpac"))
    p.add_argument("--alpha", type=float, help="lda shrinkage in [0, 1]")
    p.add_argument("--width", type=int, help="ranpac projection width")
    p.add_argument("--lam", type=float,
                   help="fixed ridge strength; omit to select from a grid")
    p.add_argument("--unbalanced", action="store_true",
                   help="plain Gram accumulation without class weighting")
    p.add_argument("--prototypes", help="fixed-prototype feature file")
    p.add_argument("--output-dir")
    p.add_argument("--dataset-tag")
    p.add_argument("--basename", default="report")
    p.set_defaults(fn=_cmd_train)

    p = sub.add_parser("prompts",
                       help="render catalogue prompts or replay a transcript")
    _add_realm_flags(p)
    p.add_argument("--subtype", action="append", default=[],
                   help="repeatable; renders the description prompt")
    p.add_argument("--transcript", action="append",
                   help="repeatable; replay responses from these files")
    p.add_argument("--out", help="class-spec CSV path (transcript mode)")
    p.add_argument("--names-file",
                   help="file of class names; renders batched name prompts")
    p.set_defaults(fn=_cmd_prompts)

    p = sub.add_parser("manifest", help="freeze image-generation jobs")
    _add_realm_flags(p)
    p.add_argument("--specs", required=True, help="class-spec CSV")
    p.add_argument("--n", type=int, required=True, help="images per class")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--style", choices=("description", "class_only"),
                   default="description")
    p.add_argument("--size", type=int, default=256)
    p.add_argument("--steps", type=int, default=40)
    p.add_argument("--guidance", type=float, default=2.0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_manifest)

    p = sub.add_parser("generate", help="drive an image client over a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--output-dir", required=True)
    p.add_argument("--client", choices=("solid", "http"), default="http")
    p.add_argument("--retries", type=int, default=3)
    p.add_argument("--backoff", type=float, default=1.0)
    p.add_argument("--parallelism", type=int, default=1)
    p.add_argument("--report", help="write per-job status JSON here")
    p.set_defaults(fn=_cmd_generate)

    p = sub.add_parser("report", help="re-emit tables from a JSON report")
    p.add_argument("--json", required=True)
    p.add_argument("--output-dir", default=".")
    p.add_argument("--basename", default="report")
    p.set_defaults(fn=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CilkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
