"""Parsing of structured chat responses into class specs.

Responses are numbered lists of ';'-separated rows.  Real transcripts
contain stray notes, headers, and duplicates despite the prompt's
instructions, so every line either becomes a ClassSpec or lands in the
reject list with a reason; nothing is silently dropped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import ConfigurationError, DataError, ParseError
from .prompts import BIOLOGICAL_COLUMNS, GENERAL_COLUMNS
from .realms import ClassSpec

# optional bullet or "1." / "1)" numbering before the first field; a bare
# "1;" is the item_id column and must survive
_NUMBERING = re.compile(r"^\s*(?:[-*]\s+)?(?:\d+\s*[.)]\s+)?")

_PLACEHOLDER_NAMES = {"", "n/a", "na", "none", "unknown", "-"}


@dataclass(frozen=True)
class RejectedLine:
    text: str
    reason: str


def _clean_name(field: str) -> str | None:
    name = field.strip()
    return None if name.lower() in _PLACEHOLDER_NAMES else name


def parse_description_csv(
    response: str, expected_columns: list[str], source_subtype: str = ""
) -> tuple[list[ClassSpec], list[RejectedLine]]:
    """Split a response into accepted ClassSpecs and rejected lines.

    expected_columns is one of the documented schemas (4 columns with
    latin and common names, or 3 with a single name).  Duplicate names
    (case-insensitive, latin taking precedence) keep the first record;
    later copies are rejected as duplicates.  Raises if nothing parses.
    """
    ncols = len(expected_columns)
    if ncols == len(BIOLOGICAL_COLUMNS):
        biological = True
    elif ncols == len(GENERAL_COLUMNS):
        biological = False
    else:
        raise ConfigurationError(f"unsupported column schema {expected_columns}")
    if not response.strip():
        raise ParseError("empty response", rejects=[])

    accepted: list[ClassSpec] = []
    rejects: list[RejectedLine] = []
    seen: set[str] = set()
    for raw in response.splitlines():
        line = raw.strip()
        if not line:
            continue
        fields = [f.strip() for f in _NUMBERING.sub("", line).split(";")]
        if len(fields) != ncols:
            rejects.append(RejectedLine(raw, "column count"))
            continue
        if fields == expected_columns:
            rejects.append(RejectedLine(raw, "header"))
            continue
        try:
            item_id = int(fields[0])
        except ValueError:
            rejects.append(RejectedLine(raw, "item id"))
            continue
        if biological:
            latin = _clean_name(fields[1])
            common = _clean_name(fields[2])
            description = fields[3].strip()
        else:
            latin = None
            common = _clean_name(fields[1])
            description = fields[2].strip()
        if not (latin or common):
            rejects.append(RejectedLine(raw, "name missing"))
            continue
        if not description:
            rejects.append(RejectedLine(raw, "description missing"))
            continue
        if len(description) > 300:
            rejects.append(RejectedLine(raw, "description length"))
            continue
        key = latin.casefold() if latin else f"\x00{common.casefold()}"
        if key in seen:
            rejects.append(RejectedLine(raw, "duplicate"))
            continue
        try:
            spec = ClassSpec(
                item_id=item_id,
                latin_name=latin,
                common_name=common,
                description=description,
                source_subtype=source_subtype,
            )
        except DataError as exc:
            rejects.append(RejectedLine(raw, str(exc)))
            continue
        seen.add(key)
        accepted.append(spec)
    if not accepted:
        raise ParseError("no parseable class lines in response", rejects=rejects)
    return accepted, rejects


def dedupe_class_specs(
    specs: list[ClassSpec],
) -> tuple[list[ClassSpec], list[ClassSpec]]:
    """Keep-first dedup across subtypes; returns (kept, dropped)."""
    seen: set[str] = set()
    kept, dropped = [], []
    for spec in specs:
        key = (
            spec.latin_name.casefold()
            if spec.latin_name
            else f"\x00{spec.common_name.casefold()}"
        )
        if key in seen:
            dropped.append(spec)
        else:
            seen.add(key)
            kept.append(spec)
    return kept, dropped


def write_class_specs_csv(specs: list[ClassSpec], path: str) -> None:
    """Persist specs as ';'-separated rows under the documented schema."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("; ".join(BIOLOGICAL_COLUMNS) + "\n")
        for spec in specs:
            fh.write(
                f"{spec.item_id}; {spec.latin_name or ''}; "
                f"{spec.common_name or ''}; {spec.description}\n"
            )


def read_class_specs_csv(path: str) -> list[ClassSpec]:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    specs, _ = parse_description_csv(text, BIOLOGICAL_COLUMNS)
    return specs
