import json
import os
import shlex

import pytest

import latticewire
from conftest import DEFAULT_EXPERIMENT, experiment_dict
from core.app import RUN_CONFIG, RUN_PLOTDATA, RUN_RECORDS, RUN_REPORT, RUN_SUMMARY, LatticeWireApp
from core.commands import (
    EXIT_ACCEPTANCE,
    EXIT_OK,
    EXIT_RUNTIME,
    EXIT_VALIDATION,
    CommandProcessor,
)


@pytest.fixture
def app(tmp_path):
    return LatticeWireApp(config_path=str(tmp_path / "settings" / "config.json"))


@pytest.fixture
def processor(app):
    return CommandProcessor(app)


def write_experiment(tmp_path, **overrides):
    path = tmp_path / "experiment.json"
    path.write_text(json.dumps(experiment_dict(**overrides), indent=2))
    return shlex.quote(str(path))


def test_missing_settings_are_written(app):
    assert os.path.exists(app.config_path)
    with open(app.config_path) as f:
        assert json.load(f) == LatticeWireApp.DEFAULT_CONFIG


def test_saved_settings_are_merged_with_defaults(app):
    with open(app.config_path, "w") as f:
        json.dump({"threads": 3}, f)
    reloaded = LatticeWireApp(config_path=app.config_path)
    assert reloaded.config["threads"] == 3
    assert reloaded.config["history_size"] == 100


def test_thread_count_precedence(app, monkeypatch):
    monkeypatch.delenv("LATTICEWIRE_THREADS", raising=False)
    assert app.thread_count() == 1
    monkeypatch.setenv("LATTICEWIRE_THREADS", "6")
    assert app.thread_count() == 6
    assert app.thread_count(2) == 2


def test_help_lists_builtins_and_plugins(processor):
    text = processor.process("help")
    assert processor.last_status == EXIT_OK
    for name in ("run", "report", "validate", "selftest", "merit", "probe"):
        assert f"  {name} - " in text


def test_unknown_command(processor):
    assert processor.process("launch").startswith("Unknown command")
    assert processor.last_status == EXIT_VALIDATION


def test_bad_arguments_are_validation_errors(processor):
    assert processor.process("run --trials many").startswith("Error")
    assert processor.last_status == EXIT_VALIDATION
    processor.process("report")
    assert processor.last_status == EXIT_VALIDATION


def test_invalid_experiment_is_validation_error(processor, tmp_path):
    config = write_experiment(tmp_path, trials_per_point=0)
    text = processor.process(f"run --config {config} --out {tmp_path / 'out'}")
    assert "trials_per_point" in text
    assert processor.last_status == EXIT_VALIDATION


def test_missing_run_directory_is_runtime_error(processor, tmp_path):
    processor.process(f"report --in {tmp_path / 'nowhere'}")
    assert processor.last_status == EXIT_RUNTIME


def test_run_report_validate(processor, tmp_path):
    config = write_experiment(tmp_path, g_equals_h=True, trials_per_point=5)
    out = tmp_path / "out"

    text = processor.process(f"run --config {config} --out {out} --threads 2")
    assert processor.last_status == EXIT_OK, text
    assert text.startswith("Wrote 10 trials")
    for name in (RUN_CONFIG, RUN_RECORDS, RUN_REPORT, RUN_PLOTDATA, RUN_SUMMARY):
        assert (out / name).exists()
    summary = json.loads((out / RUN_SUMMARY).read_text())
    assert "numpy" in summary["environment"]["packages"]

    report = processor.process(f"report --in {out}")
    assert processor.last_status == EXIT_OK
    assert report + "\n" == (out / RUN_REPORT).read_text()
    plot = processor.process(f"report --in {out} --format plotdata")
    assert plot.startswith("# bob")

    verdict = processor.process(f"validate --in {out}")
    assert processor.last_status == EXIT_ACCEPTANCE
    assert "note: no asymmetry" in verdict
    assert verdict.endswith("FAIL")


def test_seed_override_is_stored(processor, tmp_path):
    config = write_experiment(tmp_path, trials_per_point=2)
    out = tmp_path / "seeded"
    processor.process(f"run --config {config} --out {out} --seed 99 --trials 3")
    stored = json.loads((out / RUN_CONFIG).read_text())
    assert stored["seed"] == 99 and stored["trials_per_point"] == 3


def test_selftest_single_check(processor):
    text = processor.process(f"selftest --config {shlex.quote(DEFAULT_EXPERIMENT)} "
                             "--only svd-structure")
    assert processor.last_status == EXIT_OK, text
    assert text.splitlines()[-1] == "1 passed, 0 failed"


def test_selftest_rejects_unknown_check(processor):
    processor.process("selftest --only lattice-sieve")
    assert processor.last_status == EXIT_VALIDATION


def test_merit_plugin(processor):
    text = processor.process("merit integer 2 --samples 20000")
    assert processor.last_status == EXIT_OK
    assert text.startswith("Z^2 (dimension 2)")
    assert "NSM: 0.08" in text


def test_merit_plugin_usage(processor):
    assert "Usage: merit" in processor.process("merit dodecahedral")
    assert processor.last_status == EXIT_VALIDATION


def test_merit_with_too_few_samples_is_validation_error(processor):
    text = processor.process("merit hexagonal --samples 1")
    assert processor.last_status == EXIT_VALIDATION
    assert "two samples" in text


def test_unexpected_exceptions_become_runtime_errors(processor, monkeypatch):
    def broken(args):
        raise KeyError("lost")
    monkeypatch.setitem(processor.builtin_commands, "info", broken)
    assert processor.process("info").startswith("Error executing info")
    assert processor.last_status == EXIT_RUNTIME


def test_malformed_records_are_validation_errors(processor, tmp_path):
    config = write_experiment(tmp_path, trials_per_point=2)
    out = tmp_path / "out"
    processor.process(f"run --config {config} --out {out}")
    records = (out / RUN_RECORDS).read_text().splitlines()
    (out / RUN_RECORDS).write_text("\n".join(records[:1] + ["0,10,maybe"]) + "\n")
    text = processor.process(f"report --in {out}")
    assert processor.last_status == EXIT_VALIDATION
    assert "line 2" in text

    (out / RUN_RECORDS).write_text("trial_id,snr\n0,10\n")
    assert "missing column" in processor.process(f"validate --in {out}")
    assert processor.last_status == EXIT_VALIDATION


def test_reloaded_run_keeps_points_with_long_grid_values(processor, tmp_path):
    third = 1 / 3
    config = write_experiment(tmp_path, g_equals_h=True, trials_per_point=4, snr_grid=[third, 20],
                              acceptance={"points": [third]})
    out = tmp_path / "out"
    processor.process(f"run --config {config} --out {out}")
    assert processor.last_status == EXIT_OK

    report = processor.process(f"report --in {out}")
    assert report + "\n" == (out / RUN_REPORT).read_text()
    assert sum(line.startswith("0.3333333333,") for line in report.splitlines()) == 3

    verdict = processor.process(f"validate --in {out}")
    assert processor.last_status == EXIT_ACCEPTANCE, verdict
    assert verdict.splitlines()[1].startswith("0.333333 ")


def test_probe_plugin(processor):
    text = processor.process("probe --n 4 --pairs 20 --seed 1")
    assert processor.last_status == EXIT_OK
    assert text.startswith("20 gaussian channel pairs, n=4")
    assert "- both:" in text


def test_plugins_can_be_disabled(app):
    app.config["plugins_enabled"] = False
    processor = CommandProcessor(app)
    assert processor.plugins == {}
    assert "merit" not in processor.command_names()


def test_history_and_info(processor):
    processor.process("info")
    processor.process("system")
    history = processor.process("history")
    assert "1. [" in history and "] info" in history
    assert "LatticeWire" in processor.process("info")
    assert "Python Version" in processor.process("system")


def test_main_runs_one_command():
    assert latticewire.main(["info"]) == EXIT_OK
    assert latticewire.main(["frobnicate"]) == EXIT_VALIDATION
