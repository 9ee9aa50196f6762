import json

import pytest

from conftest import experiment_dict
from core.config import (
    AcceptanceThresholds,
    ExperimentConfig,
    dumps_experiment,
    load_experiment,
    loads_experiment,
)
from core.errors import ConfigError


def test_default_experiment_loads(default_experiment):
    assert default_experiment.scheme == "inversion"
    assert default_experiment.n == 8
    assert default_experiment.seed == 42
    assert default_experiment.acceptance.points == (20.0,)
    assert default_experiment.build_codec().dim == 8


def test_serialization_round_trip(default_experiment):
    text = dumps_experiment(default_experiment)
    assert loads_experiment(text) == default_experiment
    assert dumps_experiment(loads_experiment(text)) == text


def test_defaults_fill_optional_keys():
    config = ExperimentConfig.from_dict(experiment_dict())
    assert config.channel_dist == "gaussian"
    assert config.norm_mode == "ensemble_average"
    assert config.attacks == ("whitened", "babai")
    assert config.acceptance == AcceptanceThresholds()


def test_unknown_key_reports_field_and_line():
    text = json.dumps(experiment_dict(sed=3), indent=2)
    with pytest.raises(ConfigError) as excinfo:
        loads_experiment(text)
    assert excinfo.value.field == "sed"
    assert excinfo.value.line == text.splitlines().index('  "sed": 3') + 1


def test_unknown_codec_key_rejected():
    data = experiment_dict()
    data["codec"]["window_size"] = 2
    with pytest.raises(ConfigError) as excinfo:
        ExperimentConfig.from_dict(data)
    assert excinfo.value.field == "codec.window_size"


def test_unknown_acceptance_key_rejected():
    with pytest.raises(ConfigError) as excinfo:
        ExperimentConfig.from_dict(experiment_dict(acceptance={"min_ration": 10}))
    assert excinfo.value.field == "acceptance.min_ration"


@pytest.mark.parametrize("trials", [0, -1, 2.5, True])
def test_trials_must_be_positive_integer(trials):
    with pytest.raises(ConfigError) as excinfo:
        ExperimentConfig.from_dict(experiment_dict(trials_per_point=trials))
    assert excinfo.value.field == "trials_per_point"


@pytest.mark.parametrize("key, value", [
    ("scheme", "zero-forcing"),
    ("snr_grid", []),
    ("snr_grid", [10, -1]),
    ("attacks", ["whitened", "whitened"]),
    ("attacks", ["sieve"]),
    ("norm_mode", "peak"),
    ("power", 0),
    ("seed", -4),
    ("n", 6),
    ("g_equals_h", "yes"),
])
def test_invalid_values_rejected(key, value):
    with pytest.raises(ConfigError) as excinfo:
        ExperimentConfig.from_dict(experiment_dict(**{key: value}))
    assert excinfo.value.field == key


def test_missing_required_key():
    data = experiment_dict()
    del data["snr_grid"]
    with pytest.raises(ConfigError, match="snr_grid"):
        ExperimentConfig.from_dict(data)


def test_invalid_codec_parameters_reported_as_config_error():
    data = experiment_dict()
    data["codec"]["p"] = 4
    with pytest.raises(ConfigError) as excinfo:
        ExperimentConfig.from_dict(data)
    assert excinfo.value.field == "codec"


def test_malformed_json_reports_line():
    with pytest.raises(ConfigError) as excinfo:
        loads_experiment('{\n  "scheme": "svd",\n  "n": 4,,\n}')
    assert excinfo.value.line == 3


def test_overrides_are_validated(default_experiment):
    changed = default_experiment.with_overrides(seed=7, trials=3)
    assert (changed.seed, changed.trials_per_point) == (7, 3)
    assert changed.codec == default_experiment.codec
    with pytest.raises(ConfigError):
        default_experiment.with_overrides(trials=0)


def test_load_experiment_from_file(tmp_path):
    path = tmp_path / "experiment.json"
    path.write_text(json.dumps(experiment_dict(scheme="svd", threshold_t=0.4)))
    config = load_experiment(str(path))
    assert config.scheme == "svd"
    assert config.threshold_t == 0.4


def test_non_finite_numbers_rejected():
    text = json.dumps(experiment_dict()).replace('"snr_grid": [10, 40]', '"snr_grid": [10, Infinity]')
    with pytest.raises(ConfigError, match="Infinity"):
        loads_experiment(text)


def test_unknown_codec_kind_rejected():
    data = experiment_dict()
    data["codec"] = {"kind": "spherical", "p": 3}
    with pytest.raises(ConfigError) as excinfo:
        ExperimentConfig.from_dict(data)
    assert excinfo.value.field == "codec.kind"


def test_plain_codec_keys_checked_against_plain_schema():
    data = experiment_dict(n=2)
    data["codec"] = {"kind": "plain", "basis": "hexagonal", "q": 4, "p": 5}
    with pytest.raises(ConfigError) as excinfo:
        ExperimentConfig.from_dict(data)
    assert excinfo.value.field == "codec.p"


def test_random_codec_with_more_rows_than_columns_fails_fast():
    data = experiment_dict()
    data["codec"] = {"kind": "blocktri", "p": 5, "l": 2, "b": 2, "r": 3}
    with pytest.raises(ConfigError) as excinfo:
        ExperimentConfig.from_dict(data)
    assert excinfo.value.field == "codec"
