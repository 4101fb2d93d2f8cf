"""Realm and class descriptors for the synthetic-data pipeline."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ConfigurationError, DataError

BIOLOGICAL = "biological"
GENERAL = "general"


@dataclass(frozen=True)
class RealmSpec:
    """A semantic domain ("Birds", "Food") plus its prompt template family.

    kind selects between the biological templates (latin names, species)
    and the general object/concept templates; subtype_noun is the plural
    grouping noun used by the biological templates ("orders").
    """

    name: str
    kind: str = BIOLOGICAL
    subtype_noun: str = "orders"

    def __post_init__(self):
        if not self.name:
            raise ConfigurationError("realm name must be non-empty")
        if self.kind not in (BIOLOGICAL, GENERAL):
            raise ConfigurationError(f"unknown realm kind {self.kind!r}")


@dataclass(frozen=True)
class ClassSpec:
    """One generated class: names, a visual description, and its subtype."""

    item_id: int
    latin_name: str | None
    common_name: str | None
    description: str
    source_subtype: str = ""

    def __post_init__(self):
        if not (self.latin_name or self.common_name):
            raise DataError("class spec needs a latin or common name")
        if not self.description:
            raise DataError("class spec needs a description")
        for piece in (self.latin_name, self.common_name, self.description):
            if piece and ";" in piece:
                raise DataError("';' is reserved as the field separator")
        if len(self.description) > 300:
            raise DataError("description exceeds 300 characters")

    def display_name(self) -> str:
        """Preferred rendering: "latin (common)" when both names exist."""
        if self.latin_name and self.common_name:
            return f"{self.latin_name} ({self.common_name})"
        return self.latin_name or self.common_name
