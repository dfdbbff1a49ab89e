import pytest

from integrity_kit import data
from integrity_kit.pipeline import PipelineConfig, run_training
from integrity_kit.models import ForestConfig
from integrity_kit.synth import SynthConfig, generate_dataset

# criterion number -> (passed, detail); filled in by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def schema():
    return data.example_schema()


@pytest.fixture(scope="session")
def rules():
    return data.example_rules()


@pytest.fixture(scope="session")
def corpus(schema, rules):
    """Labeled 200-response synthetic survey (seed 42)."""
    return generate_dataset(schema, SynthConfig(n=200, fake_fraction=0.15, seed=42), rules=rules)


@pytest.fixture(scope="session")
def trained_forest(schema, rules, corpus):
    raws, labels = corpus
    config = PipelineConfig(model_kind="rf", model_config=ForestConfig(n_trees=30, seed=42), seed=42)
    return run_training(schema, raws, labels, rules, config)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
