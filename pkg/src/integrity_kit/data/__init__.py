"""Bundled example instrument: a 25-question supply-chain AI-readiness survey,
its canonical contradiction rules, and persona tables for synthetic respondents."""
from __future__ import annotations

import json
from importlib import resources

from ..schema import SurveySchema, schema_from_dict


def _read(name: str) -> dict:
    return json.loads(resources.files(__name__).joinpath(name).read_text(encoding="utf-8"))


def example_schema() -> SurveySchema:
    return schema_from_dict(_read("example_schema.json"))


def example_rules_doc() -> dict:
    return _read("example_rules.json")


def example_rules():
    from ..rules import RuleSet

    return RuleSet.from_dict(example_rules_doc(), example_schema())


def personas_doc() -> dict:
    return _read("personas.json")


def path(name: str):
    """Filesystem path of a bundled file (``example_schema.json``, ``example_rules.json``, ``personas.json``)."""
    return resources.files(__name__).joinpath(name)
