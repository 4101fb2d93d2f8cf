"""Prompt templates for the two-stage class-generation conversation.

Stage one asks for a realm's subtypes; stage two asks, per subtype, for
a structured ';'-separated list of classes with visual descriptions.
A separate template covers the case where class names are already known.
Every function here is a pure template fill: same inputs, same text.
"""

from __future__ import annotations

from ..errors import ConfigurationError
from .realms import BIOLOGICAL, RealmSpec

BIOLOGICAL_COLUMNS = [
    "item_id",
    "species_latin_name",
    "species_common_name",
    "species_description",
]
GENERAL_COLUMNS = ["item_id", "item_name", "item_description"]

CLASS_NAME_BATCH = 10

_IRREGULAR_SINGULARS = {"species": "species", "genera": "genus", "taxa": "taxon"}


def singularize(noun: str) -> str:
    """Best-effort singular of a grouping noun ("orders" -> "order")."""
    low = noun.lower()
    if low in _IRREGULAR_SINGULARS:
        return _IRREGULAR_SINGULARS[low]
    if low.endswith("ies"):
        return noun[:-3] + "y"
    if low.endswith("sses"):
        return noun[:-2]
    if low.endswith("s") and not low.endswith("ss"):
        return noun[:-1]
    return noun


def indefinite_article(word: str) -> str:
    return "an" if word[:1].lower() in "aeiou" else "a"


def render_subtype_prompt(realm: RealmSpec) -> str:
    """The opening prompt that asks for a realm's subtypes."""
    if realm.kind == BIOLOGICAL:
        return (
            f"List the latin names of all scientific {realm.subtype_noun} of "
            f"{realm.name}, ensuring every item in the list is unique. Do not "
            "use extra explanations like 'Please note that this is not an "
            "exhaustive list.' If the provided scientific "
            f"{singularize(realm.subtype_noun)} was already asked of you, "
            "simply repeat your previous answer for it."
        )
    return (
        "For each provided prompt, provide a list of 20 of the most common "
        "subcategories, ensuring every item in the list is unique. Do not "
        "use extra explanations like 'Please note that this is not an "
        "exhaustive list.' If the provided prompt was already asked of you, "
        "simply repeat your previous answer for it."
    )


def render_description_system_prompt(
    realm: RealmSpec, subtype: str
) -> tuple[str, str]:
    """System prompt asking for 20 described classes of one subtype.

    Returns (system text, user text); the user text is just the subtype.
    """
    if not subtype:
        raise ConfigurationError("subtype must be non-empty")
    if realm.kind == BIOLOGICAL:
        unit = singularize(realm.subtype_noun)
        article = indefinite_article(unit)
        system = (
            "I want you to act as an input text prompt for the generative "
            "image model called Stable Diffusion. I will give you the "
            f"scientific name of {article} {unit} of {realm.name}. Your job "
            "is to provide a numbered list of 20 unique randomly chosen "
            f"*non-extinct* species from the provided {unit}, and for each "
            "species give a detailed descriptions in 180 characters or less "
            "of the visual characteristics that will help to tell it from "
            "other species in a photograph. Also provide each species' latin "
            "scientific name, and if known, the common name. Provide them in "
            "csv format using ; as the separator with the following columns: "
            f"{', '.join(BIOLOGICAL_COLUMNS)}. Do not use ; within any text "
            f"fields. If the {unit} has less than 20 species, list all the "
            "species using a shorter list. Do not list extinct species or "
            f"any species from {realm.subtype_noun} different to the one I "
            f"provide. Do not explain if the {unit} has less than 20 "
            "species. Ensure every listed species is only listed once. Do "
            "not explain using a note of the form 'Note: The X "
            f"{unit} only contains these Y species.' Do not use ** in the "
            "result. If the same species was already asked of you, simply "
            "repeat your previous answer for it. Describe the visual "
            "characteristics and leave out how they sound or smell."
        )
    else:
        system = (
            "I want you to act as an input text prompt for the generative "
            "image model called Stable Diffusion. I will give you the name "
            "of a physical object/concept related to the theme of "
            f"{realm.name}. Your job is to provide a numbered list of 20 "
            "unique randomly chosen types/kinds/examples of the "
            "object/concept, and for each species give a detailed "
            "descriptions in 180 characters or less of the visual "
            "characteristics that will help to tell it from other related "
            "items in a photograph. Provide them in csv format using ; as "
            "the separator with the following columns: "
            f"{', '.join(GENERAL_COLUMNS)}. Do not use ; within any text "
            "fields. If the object/concept has less than 20 unique "
            "types/kinds/examples, list all of them using a shorter list. "
            "Do not list items unrelated to the object/concept to the one I "
            "provide. Do not explain if the object/concept has less than 20 "
            "type/kind/example. Ensure every listed item is only listed "
            "once. Do not use ** in the result. If the same item was asked "
            "of you, simply repeat your previous answer for it. Describe "
            "the visual characteristics and leave out how they sound, "
            "smell, taste or feel."
        )
    return system, subtype


def render_class_name_system_prompt(
    realm: RealmSpec, class_names: list[str]
) -> list[tuple[str, str]]:
    """Prompts for describing already-known class names, 10 per call.

    Returns one (system, user) pair per batch, batched in input order.
    """
    if not class_names:
        raise ConfigurationError("class name list is empty")
    unit = singularize(realm.name).lower()
    if realm.kind == BIOLOGICAL:
        system = (
            "I want you to act as an input text prompt for the generative "
            "image model called Stable Diffusion. I will give you a list of "
            f"the English name of ten {unit} species. Your job is to provide "
            "a detailed descriptions in 250 characters or less of the visual "
            "characteristics of each species that will help to tell it from "
            "other species in a photograph. Provide them in csv format using "
            "; as the separator with the following columns: "
            f"{', '.join(GENERAL_COLUMNS)}. Do not use ; within any text "
            "fields. Do not use ** in the result. If the same species was "
            "already asked of you, simply repeat your previous answer for it. "
            "Describe the visual characteristics and leave out how they "
            "sound or smell."
        )
    else:
        system = (
            "I want you to act as an input text prompt for the generative "
            "image model called Stable Diffusion. I will give you a list of "
            f"the names of ten kinds of {unit}. Your job is to provide a "
            "detailed descriptions in 250 characters or less of the visual "
            "characteristics of each kind that will help to tell it from "
            "other related items in a photograph. Provide them in csv format "
            "using ; as the separator with the following columns: "
            f"{', '.join(GENERAL_COLUMNS)}. Do not use ; within any text "
            "fields. Do not use ** in the result. If the same item was "
            "already asked of you, simply repeat your previous answer for "
            "it. Describe the visual characteristics and leave out how they "
            "sound, smell, taste or feel."
        )
    pairs = []
    for start in range(0, len(class_names), CLASS_NAME_BATCH):
        batch = class_names[start:start + CLASS_NAME_BATCH]
        user = "\n".join(f"{i + 1}. {name}" for i, name in enumerate(batch))
        pairs.append((system, user))
    return pairs
