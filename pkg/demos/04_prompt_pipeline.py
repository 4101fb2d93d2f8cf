"""From recorded chat transcripts to a generated image folder.

Replays the committed transcripts (three bird orders, twenty species
each), parses the ;-separated catalogue, freezes an image-generation
manifest, and drives the offline solid-color client over it, including
a resumed second pass that submits nothing.

Run from the repository root:

    PYTHONPATH=src python3 demos/04_prompt_pipeline.py
"""

import os
import tempfile

from cilkit.pipeline import (
    BIOLOGICAL_COLUMNS,
    RealmSpec,
    ReplayChatClient,
    SolidColorImageClient,
    Transcript,
    build_generation_manifest,
    parse_description_csv,
    render_description_system_prompt,
    render_subtype_prompt,
    run_generation,
)

HERE = os.path.dirname(os.path.abspath(__file__))
TRANSCRIPTS = os.path.join(HERE, "..", "tests", "fixtures", "transcripts")

birds = RealmSpec(name="Birds", kind="biological", subtype_noun="orders")
print("subtype prompt sent once per realm:")
print(f"  {render_subtype_prompt(birds)[:72]}...")

specs, rejects = [], []
for subtype in ("Psittaciformes", "Strigiformes", "Anseriformes"):
    t = Transcript.load(os.path.join(TRANSCRIPTS, f"birds_{subtype.lower()}.json"))
    system, user = render_description_system_prompt(birds, subtype)
    response = ReplayChatClient(t).chat(system, user)
    accepted, rejected = parse_description_csv(
        response, BIOLOGICAL_COLUMNS, source_subtype=subtype
    )
    specs.extend(accepted)
    rejects.extend(rejected)
    print(f"{subtype}: {len(accepted)} species parsed")

print(f"\ncatalogue: {len(specs)} classes; {len(rejects)} lines rejected:")
for r in rejects:
    print(f"  ({r.reason}) {r.text[:60]}")

manifest = build_generation_manifest(
    birds, specs, n_per_class=2, seed=5, image_size=32
)
print(f"\nmanifest: {len(manifest.jobs)} jobs, e.g.")
print(f"  {manifest.jobs[0].prompt[:76]}...")

outdir = tempfile.mkdtemp(prefix="demo_generation_")
report = run_generation(manifest, SolidColorImageClient(), outdir)
print(f"\nfirst pass:  complete={report.count('complete')} "
      f"skipped={report.count('skipped')}")
report = run_generation(manifest, SolidColorImageClient(), outdir)
print(f"second pass: complete={report.count('complete')} "
      f"skipped={report.count('skipped')} (outputs already exist)")
print(f"images under {outdir}/<class index>/<job key>.png")
