import pytest

from hyperdomain.config import SEED_VAR, load_settings


def test_default_seed(monkeypatch, tmp_path):
    monkeypatch.delenv(SEED_VAR, raising=False)
    assert load_settings(env_file=tmp_path / "missing.env").seed == 0


def test_env_file(monkeypatch, tmp_path):
    monkeypatch.delenv(SEED_VAR, raising=False)
    p = tmp_path / "hd.env"
    p.write_text("# comment\nOTHER=1\nHYPERDOMAIN_SEED='42'\n")
    assert load_settings(env_file=p).seed == 42


def test_env_file_export_and_last_assignment(monkeypatch, tmp_path):
    monkeypatch.delenv(SEED_VAR, raising=False)
    p = tmp_path / "hd.env"
    p.write_text('HYPERDOMAIN_SEED=1\n# HYPERDOMAIN_SEED=2\nexport HYPERDOMAIN_SEED="3"\nHYPERDOMAIN_SEEDS=4\n')
    assert load_settings(env_file=p).seed == 3


def test_environment_wins(monkeypatch, tmp_path):
    p = tmp_path / "hd.env"
    p.write_text("HYPERDOMAIN_SEED=42\n")
    monkeypatch.setenv(SEED_VAR, "7")
    assert load_settings(env_file=p).seed == 7


def test_bad_seed(monkeypatch):
    monkeypatch.setenv(SEED_VAR, "abc")
    with pytest.raises(ValueError, match=SEED_VAR):
        load_settings()
