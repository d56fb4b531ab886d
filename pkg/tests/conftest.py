import pytest

from hsisim.config import config_from_dict


def make_config(**overrides):
    """Session config with short-task-friendly defaults for tests."""
    base = {
        "seed": 11,
        "task_duration_s": 120.0,
        "hazard_kind": "spr",
        "pauses": {"windows": [[0.30, 0.40], [0.65, 0.75]], "min_gap_s": 20.0},
    }
    base.update(overrides)
    return config_from_dict(base)


@pytest.fixture
def quick_config():
    return make_config()
