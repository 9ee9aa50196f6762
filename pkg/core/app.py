"""
LatticeWire Core Application
"""

import json
import logging
import os
import platform
from datetime import datetime

import importlib_metadata

from core.config import dumps_experiment, load_experiment, loads_experiment
from core.harness import run
from core.records import dumps_records, loads_records
from core.report import sweep_report, validate_asymmetry

logger = logging.getLogger(__name__)

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
TRACKED_PACKAGES = ("numpy", "scipy", "galois", "jsonschema", "rich", "prompt_toolkit")

RUN_CONFIG = "config.json"
RUN_RECORDS = "records.csv"
RUN_REPORT = "report.csv"
RUN_PLOTDATA = "plotdata.dat"
RUN_SUMMARY = "summary.json"


def environment_fingerprint():
    """Python and library versions, stored next to every run"""
    versions = {}
    for name in TRACKED_PACKAGES:
        try:
            versions[name] = importlib_metadata.version(name)
        except importlib_metadata.PackageNotFoundError:
            versions[name] = None
    return {
        "python": platform.python_version(),
        "platform": f"{platform.system()} {platform.machine()}",
        "packages": versions,
    }


class LatticeWireApp:
    """
    Main application class that manages settings, command history
    and the experiment output directories.
    """

    DEFAULT_CONFIG = {
        'log_level': 'INFO',
        'threads': 1,
        'history_size': 100,
        'plugins_enabled': True,
        'prompt_style': 'default',
        'default_experiment': 'experiments/default.json',
        'default_out': 'runs/default'
    }

    def __init__(self, config_path=None):
        self.start_time = datetime.now()
        self.command_history = []
        self.config_path = config_path or os.path.join(ROOT, 'config.json')
        self.config = self.load_config()
        self.current_directory = os.getcwd()

    def load_config(self):
        """Load settings from the config file, writing the defaults when it is missing"""
        if os.path.exists(self.config_path):
            with open(self.config_path, 'r', encoding='utf-8') as f:
                return {**self.DEFAULT_CONFIG, **json.load(f)}

        logger.info("No settings at %s; writing defaults", self.config_path)
        default_config = dict(self.DEFAULT_CONFIG)
        os.makedirs(os.path.dirname(self.config_path) or '.', exist_ok=True)
        with open(self.config_path, 'w', encoding='utf-8') as f:
            json.dump(default_config, f, indent=2)
        return default_config

    def add_to_history(self, command):
        """Add a command to history"""
        self.command_history.append({
            'command': command,
            'timestamp': datetime.now().isoformat(),
            'directory': self.current_directory
        })

        max_history = self.config.get('history_size', 100)
        if len(self.command_history) > max_history:
            self.command_history = self.command_history[-max_history:]

    def get_history(self):
        """Get command history"""
        return self.command_history

    def get_uptime(self):
        """Get application uptime"""
        return datetime.now() - self.start_time

    def resolve(self, path):
        """Paths in settings are relative to the repository root"""
        return path if os.path.isabs(path) else os.path.join(ROOT, path)

    def thread_count(self, requested=None):
        """CLI flag, then LATTICEWIRE_THREADS, then settings"""
        if requested is not None:
            return max(1, int(requested))
        env = os.environ.get('LATTICEWIRE_THREADS')
        if env:
            return max(1, int(env))
        return max(1, int(self.config.get('threads', 1)))

    def run_experiment(self, config_path, out_dir, seed=None, trials=None, threads=None):
        """Run an experiment file and write its output directory"""
        experiment = load_experiment(config_path).with_overrides(seed=seed, trials=trials)
        result = run(experiment, self.thread_count(threads))

        os.makedirs(out_dir, exist_ok=True)
        report_csv, plotdata = sweep_report(result.records, experiment.attacks,
                                            experiment.snr_grid)
        summary = {**result.summary, "environment": environment_fingerprint()}
        files = {
            RUN_CONFIG: dumps_experiment(experiment),
            RUN_RECORDS: dumps_records(result.records, experiment.attacks),
            RUN_REPORT: report_csv,
            RUN_PLOTDATA: plotdata,
            RUN_SUMMARY: json.dumps(summary, indent=2, sort_keys=True) + "\n",
        }
        for name, text in files.items():
            with open(os.path.join(out_dir, name), 'w', encoding='utf-8', newline='\n') as f:
                f.write(text)
        logger.info("Wrote %d records to %s", len(result.records), out_dir)
        return result

    def load_run(self, in_dir):
        """(experiment config, records, attacks) of a finished run directory"""
        with open(os.path.join(in_dir, RUN_CONFIG), 'r', encoding='utf-8') as f:
            experiment = loads_experiment(f.read())
        with open(os.path.join(in_dir, RUN_RECORDS), 'r', encoding='utf-8') as f:
            records, attacks = loads_records(f.read())
        return experiment, records, attacks

    def report(self, in_dir, fmt="csv"):
        """Regenerate the report of a run directory in the requested format"""
        experiment, records, attacks = self.load_run(in_dir)
        report_csv, plotdata = sweep_report(records, attacks, experiment.snr_grid)
        return report_csv if fmt == "csv" else plotdata

    def validate(self, in_dir):
        """Asymmetry verdict for a run directory"""
        experiment, records, attacks = self.load_run(in_dir)
        return validate_asymmetry(records, experiment.acceptance, attacks, experiment.snr_grid)
