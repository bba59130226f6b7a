import os
from pathlib import Path

import hypothesis
import pytest

from instance import gen_lower_bound

hypothesis.settings.register_profile("default", deadline=None, max_examples=100)
hypothesis.settings.register_profile("fast", deadline=None, max_examples=10)
hypothesis.settings.register_profile("ci", deadline=None, max_examples=300, derandomize=True)
hypothesis.settings.register_profile("debugger", deadline=None, report_multiple_bugs=False)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))

SAMPLES = Path(__file__).parent / "samples"


@pytest.fixture
def samples_dir() -> Path:
    return SAMPLES


@pytest.fixture
def lower_bound_k3_m2():
    return gen_lower_bound(3, 2)


@pytest.fixture(autouse=True)
def _isolated_env(monkeypatch, tmp_path):
    """Keep a developer's .env or exported settings out of the tests."""
    for name in list(os.environ):
        if name in {"LOG_LEVEL", "TIE_BREAK_POLICY", "MASTER_SEED", "CAMPAIGN_WORKERS", "LOWER_BOUND_EPSILON"}:
            monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)
