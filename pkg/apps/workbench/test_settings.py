import io

import pytest

from errors import DomainError
from settings import Settings


def test_defaults():
    settings = Settings()
    assert settings.TIE_BREAK_POLICY == "highest_site_index"
    assert settings.FLOAT_TOLERANCE == 1e-9
    assert settings.CAMPAIGN_INSTANCES == 500
    settings.validate_required_fields()


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("TIE_BREAK_POLICY", "lowest_site_index")
    monkeypatch.setenv("MASTER_SEED", "42")
    settings = Settings()
    assert settings.TIE_BREAK_POLICY == "lowest_site_index"
    assert settings.MASTER_SEED == 42


def test_dotenv_file_is_read(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / ".env").write_text("CAMPAIGN_WORKERS=7\n")
    assert Settings().CAMPAIGN_WORKERS == 7


def test_all_problems_are_reported_together():
    settings = Settings(LOG_LEVEL="LOUD", CAMPAIGN_WORKERS=0, CAMPAIGN_CAPACITY_MAX=0)
    with pytest.raises(DomainError) as excinfo:
        settings.validate_required_fields()
    assert len(excinfo.value.context["errors"]) == 3


def test_summary_banner():
    stream = io.StringIO()
    Settings().print_summary(stream)
    text = stream.getvalue()
    assert "Tie-break policy: highest_site_index" in text
    assert "Master seed: 0" in text
