import json
import time

import pytest

from sextic.config import CONFIG_PATH, REPO_ROOT, Settings, env_overrides, load_settings, read_yaml
from sextic.errors import BoundExceeded, ConfigError, DomainError, WorkBudget
from sextic.events import append_jsonl, run_record


def test_shipped_config_loads():
    settings = load_settings(CONFIG_PATH, env={})
    assert settings.max_group_order > 0
    assert settings.jobs >= 1


def test_precedence(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("max_work: 100\nseed: 7\njobs: 2\n", encoding="utf-8")
    settings = load_settings(path, env={"SEXTIC_SEED": "11", "SEXTIC_DEBUG_FULL_ROOT_CHECK": "yes"}, jobs=3)
    assert settings.max_work == 100
    assert settings.seed == 11
    assert settings.debug_full_root_check is True
    assert settings.jobs == 3


def test_none_overrides_are_ignored(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("seed: 5\n", encoding="utf-8")
    assert load_settings(path, env={}, seed=None).seed == 5


def test_env_overrides_only_known_keys():
    found = env_overrides({"SEXTIC_MAX_WORK": "10", "SEXTIC_UNKNOWN": "1", "OTHER": "2"})
    assert found == {"max_work": "10"}


@pytest.mark.parametrize("text", ["jobs: 0\n", "max_group_order: -1\n", "seed: abc\n"])
def test_invalid_values(tmp_path, text):
    path = tmp_path / "config.yaml"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ConfigError):
        load_settings(path, env={})


def test_read_yaml_errors(tmp_path):
    with pytest.raises(ConfigError, match="Missing file"):
        read_yaml(tmp_path / "absent.yaml")
    listing = tmp_path / "list.yaml"
    listing.write_text("- 1\n- 2\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        read_yaml(listing)
    empty = tmp_path / "empty.yaml"
    empty.write_text("", encoding="utf-8")
    assert read_yaml(empty) == {}


def test_config_error_is_invalid_input():
    assert issubclass(ConfigError, DomainError)
    assert ConfigError.exit_code == 1


def test_events_file_resolution(tmp_path):
    assert Settings(events_path=None).events_file() is None
    assert Settings(events_path="logs/x.jsonl").events_file() == REPO_ROOT / "logs" / "x.jsonl"
    absolute = tmp_path / "e.jsonl"
    assert Settings(events_path=str(absolute)).events_file() == absolute


def test_append_jsonl(tmp_path):
    path = tmp_path / "nested" / "events.jsonl"
    started = time.perf_counter()
    append_jsonl(path, run_record("brown", "<1/2>", started, 0))
    append_jsonl(path, run_record("brown", "<1/3>", started, 1, error="bad block"))
    records = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]
    assert len(records) == 2
    assert records[0]["event_id"] != records[1]["event_id"]
    assert records[1]["error"] == "bad block"
    assert records[0]["latency_ms"] >= 0


def test_work_budget():
    budget = WorkBudget(3)
    budget.tick(3)
    with pytest.raises(BoundExceeded) as info:
        budget.tick()
    assert info.value.limit == 3
    assert BoundExceeded.exit_code == 2
    with pytest.raises(DomainError):
        WorkBudget(0)
