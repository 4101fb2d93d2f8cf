"""Realm-to-dataset pipeline: prompts, parsing, manifests, generation."""

from __future__ import annotations

from .generate import (
    GenerationFailure,
    GenerationReport,
    HttpImageClient,
    JobParams,
    JobResult,
    SolidColorImageClient,
    png_bytes,
    run_generation,
    save_report,
)
from .llm import (
    ChatExchange,
    HttpChatClient,
    RecordingChatClient,
    ReplayChatClient,
    Transcript,
)
from .manifest import (
    DEFAULT_GUIDANCE,
    DEFAULT_SIZE,
    DEFAULT_STEPS,
    STYLE_CLASS_ONLY,
    STYLE_DESCRIPTION,
    GenerationJob,
    GenerationManifest,
    build_generation_manifest,
    load_manifest,
    render_image_prompt,
    save_manifest,
)
from .parsing import (
    RejectedLine,
    dedupe_class_specs,
    parse_description_csv,
    read_class_specs_csv,
    write_class_specs_csv,
)
from .prompts import (
    BIOLOGICAL_COLUMNS,
    CLASS_NAME_BATCH,
    GENERAL_COLUMNS,
    render_class_name_system_prompt,
    render_description_system_prompt,
    render_subtype_prompt,
)
from .realms import BIOLOGICAL, GENERAL, ClassSpec, RealmSpec

__all__ = [
    "BIOLOGICAL",
    "BIOLOGICAL_COLUMNS",
    "CLASS_NAME_BATCH",
    "ChatExchange",
    "ClassSpec",
    "DEFAULT_GUIDANCE",
    "DEFAULT_SIZE",
    "DEFAULT_STEPS",
    "GENERAL",
    "GENERAL_COLUMNS",
    "GenerationFailure",
    "GenerationJob",
    "GenerationManifest",
    "GenerationReport",
    "HttpChatClient",
    "HttpImageClient",
    "JobParams",
    "JobResult",
    "RealmSpec",
    "RecordingChatClient",
    "RejectedLine",
    "ReplayChatClient",
    "STYLE_CLASS_ONLY",
    "STYLE_DESCRIPTION",
    "SolidColorImageClient",
    "Transcript",
    "build_generation_manifest",
    "dedupe_class_specs",
    "load_manifest",
    "parse_description_csv",
    "png_bytes",
    "read_class_specs_csv",
    "render_class_name_system_prompt",
    "render_description_system_prompt",
    "render_image_prompt",
    "render_subtype_prompt",
    "run_generation",
    "save_manifest",
    "save_report",
    "write_class_specs_csv",
]
