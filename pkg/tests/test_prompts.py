from __future__ import annotations

import pytest

from cilkit.errors import ConfigurationError
from cilkit.pipeline import (
    BIOLOGICAL_COLUMNS,
    RealmSpec,
    render_class_name_system_prompt,
    render_description_system_prompt,
    render_subtype_prompt,
)
from cilkit.pipeline.prompts import indefinite_article, singularize

BIRDS = RealmSpec(name="Birds", kind="biological", subtype_noun="orders")
FOOD = RealmSpec(name="Food", kind="general")


def test_subtype_prompt_biological():
    text = render_subtype_prompt(BIRDS)
    assert text.startswith(
        "List the latin names of all scientific orders of Birds"
    )
    assert "ensuring every item in the list is unique" in text
    assert "not an exhaustive list" in text
    assert "simply repeat your previous answer" in text


def test_subtype_prompt_general():
    text = render_subtype_prompt(FOOD)
    assert "20 of the most common subcategories" in text
    assert "Food" not in text  # realm goes in the user prompt


def test_subtype_prompt_pure():
    assert render_subtype_prompt(BIRDS) == render_subtype_prompt(BIRDS)


def test_description_prompt_biological():
    system, user = render_description_system_prompt(BIRDS, "Psittaciformes")
    assert user == "Psittaciformes"
    assert "20 unique randomly chosen *non-extinct* species" in system
    assert "180 characters or less" in system
    assert "the scientific name of an order of Birds" in system
    assert ", ".join(BIOLOGICAL_COLUMNS) in system
    assert "Do not use ; within any text fields" in system
    assert "Ensure every listed species is only listed once" in system


def test_description_prompt_general():
    system, user = render_description_system_prompt(FOOD, "cheese")
    assert user == "cheese"
    assert "item_id, item_name, item_description" in system
    assert "related to the theme of Food" in system
    assert "taste or feel" in system


def test_description_prompt_requires_subtype():
    with pytest.raises(ConfigurationError):
        render_description_system_prompt(BIRDS, "")


def test_description_prompt_deterministic():
    a = render_description_system_prompt(BIRDS, "Strigiformes")
    b = render_description_system_prompt(BIRDS, "Strigiformes")
    assert a == b


def test_class_name_prompt_batching():
    names10 = [f"Bird {i}" for i in range(10)]
    pairs = render_class_name_system_prompt(BIRDS, names10)
    assert len(pairs) == 1
    system, user = pairs[0]
    assert "ten bird species" in system
    assert "250 characters or less" in system
    assert user.splitlines()[0] == "1. Bird 0"

    names200 = [f"Bird {i}" for i in range(200)]
    pairs = render_class_name_system_prompt(BIRDS, names200)
    assert len(pairs) == 20
    assert all(len(u.splitlines()) == 10 for _, u in pairs)
    assert pairs[3][1].splitlines()[0] == "1. Bird 30"  # input order kept

    pairs = render_class_name_system_prompt(BIRDS, [f"B{i}" for i in range(7)])
    assert len(pairs) == 1
    assert len(pairs[0][1].splitlines()) == 7


def test_class_name_prompt_empty_is_error():
    with pytest.raises(ConfigurationError):
        render_class_name_system_prompt(BIRDS, [])


def test_realm_validation():
    with pytest.raises(ConfigurationError):
        RealmSpec(name="")
    with pytest.raises(ConfigurationError):
        RealmSpec(name="X", kind="mineral")


@pytest.mark.parametrize(
    "plural,singular",
    [
        ("orders", "order"),
        ("families", "family"),
        ("species", "species"),
        ("classes", "class"),
        ("genera", "genus"),
    ],
)
def test_singularize(plural, singular):
    assert singularize(plural) == singular


def test_indefinite_article():
    assert indefinite_article("order") == "an"
    assert indefinite_article("family") == "a"
