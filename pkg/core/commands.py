"""
Command processing module for LatticeWire
"""

import argparse
import importlib
import logging
import os
import platform
import shlex
import sys
from datetime import datetime

from core.app import environment_fingerprint
from core.config import load_experiment
from core.errors import (
    ConfigError,
    EmptyInput,
    InsufficientTrials,
    LatticeWireError,
    MalformedRecords,
)
from core.selftest import checks_for, run_selftest

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_ACCEPTANCE = 2
EXIT_RUNTIME = 3


class CommandUsageError(Exception):
    """Bad arguments to a command"""


class CommandParser(argparse.ArgumentParser):
    """ArgumentParser that reports problems instead of exiting the process"""

    def error(self, message):
        raise CommandUsageError(f"{self.prog}: {message}")

    def exit(self, status=0, message=None):
        raise CommandUsageError(message or self.format_usage())


class CommandProcessor:
    """
    Processes and executes LatticeWire commands.
    Handles built-in commands and provides extension points for plugins.
    """

    def __init__(self, app=None):
        self.app = app
        self.last_status = EXIT_OK
        self.builtin_commands = {
            'help': self.cmd_help,
            'run': self.cmd_run,
            'report': self.cmd_report,
            'validate': self.cmd_validate,
            'selftest': self.cmd_selftest,
            'info': self.cmd_info,
            'system': self.cmd_system,
            'history': self.cmd_history,
            'clear': self.cmd_clear
        }
        enabled = app.config.get('plugins_enabled', True) if app else True
        self.plugins = self.load_plugins() if enabled else {}

    def load_plugins(self, plugin_folder="plugins"):
        """Load command plugins from the plugins directory"""
        plugins = {}
        plugin_path = os.path.join(os.path.dirname(__file__), '..', plugin_folder)

        if not os.path.isdir(plugin_path):
            return plugins

        for filename in sorted(os.listdir(plugin_path)):
            if filename.endswith(".py") and not filename.startswith("__"):
                module_name = f"{plugin_folder}.{filename[:-3]}"
                try:
                    module = importlib.import_module(module_name)
                except ImportError as e:
                    logger.warning("Error loading plugin %s: %s", module_name, e)
                    continue
                if hasattr(module, 'command_name') and hasattr(module, 'run'):
                    plugins[module.command_name] = module
        return plugins

    def command_names(self):
        return sorted(self.builtin_commands) + sorted(self.plugins)

    def process(self, command_str):
        """Process a command string and execute the appropriate function"""
        if self.app:
            self.app.add_to_history(command_str)

        parts = command_str.strip().split(' ', 1)
        command = parts[0].lower()
        args = parts[1] if len(parts) > 1 else ""
        self.last_status = EXIT_OK

        if command in self.builtin_commands:
            handler = self.builtin_commands[command]
        elif command in self.plugins:
            handler = self.plugins[command].run
        else:
            self.last_status = EXIT_VALIDATION
            return f"Unknown command: {command}. Type 'help' for available commands."

        try:
            return handler(args)
        except (CommandUsageError, ConfigError, EmptyInput, InsufficientTrials,
                MalformedRecords) as e:
            self.last_status = EXIT_VALIDATION
            return f"Error: {e}"
        except (LatticeWireError, OSError) as e:
            logger.debug("Command %s failed", command, exc_info=True)
            self.last_status = EXIT_RUNTIME
            return f"Error executing {command}: {e}"
        except Exception as e:
            logger.exception("Unexpected failure in %s", command)
            self.last_status = EXIT_RUNTIME
            return f"Error executing {command}: {e}"

    def parse(self, prog, args, configure):
        parser = CommandParser(prog=prog, add_help=False)
        configure(parser)
        return parser.parse_args(shlex.split(args))

    def _setting(self, key, fallback):
        return self.app.resolve(self.app.config.get(key, fallback)) if self.app else fallback

    # Built-in commands
    def cmd_help(self, args):
        """Display available commands"""
        help_text = "Available commands:\n"
        help_text += "\nBuilt-in commands:\n"
        for cmd in sorted(self.builtin_commands.keys()):
            doc = self.builtin_commands[cmd].__doc__ or "No description"
            help_text += f"  {cmd} - {doc}\n"

        help_text += "\nPlugin commands:\n"
        for cmd in sorted(self.plugins.keys()):
            doc = (self.plugins[cmd].__doc__ or "No description").strip().splitlines()[0]
            help_text += f"  {cmd} - {doc}\n"

        help_text += "\nUsage:\n"
        help_text += "  run --config <path> --out <dir> [--seed N] [--trials N] [--threads N]\n"
        help_text += "  report --in <dir> [--format csv|plotdata]\n"
        help_text += "  validate --in <dir>\n"
        help_text += "  selftest [--config <path>] [--seed N] [--only NAME ...]\n"
        return help_text

    def cmd_run(self, args):
        """Run a Monte Carlo experiment and write its output directory"""
        def configure(p):
            p.add_argument("--config", default=self._setting('default_experiment',
                                                             'experiments/default.json'))
            p.add_argument("--out", default=self._setting('default_out', 'runs/default'))
            p.add_argument("--seed", type=int)
            p.add_argument("--trials", type=int)
            p.add_argument("--threads", type=int)
        opts = self.parse("run", args, configure)
        result = self.app.run_experiment(opts.config, opts.out, opts.seed, opts.trials,
                                         opts.threads)
        lines = [f"Wrote {len(result.records)} trials to {opts.out}"]
        for point in result.summary["points"]:
            eve = ", ".join(f"{name} {ser:.4g}" for name, ser in point["eve_ser"].items())
            lines.append(f"  {point['snr']:g}: bob {point['bob_ser']:.4g} | eve {eve}")
        return "\n".join(lines)

    def cmd_report(self, args):
        """Print the error-rate report of a run directory"""
        def configure(p):
            p.add_argument("--in", dest="in_dir", required=True)
            p.add_argument("--format", choices=("csv", "plotdata"), default="csv")
        opts = self.parse("report", args, configure)
        return self.app.report(opts.in_dir, opts.format).rstrip("\n")

    def cmd_validate(self, args):
        """Check the eavesdropper disadvantage of a run directory"""
        def configure(p):
            p.add_argument("--in", dest="in_dir", required=True)
        opts = self.parse("validate", args, configure)
        report = self.app.validate(opts.in_dir)

        lines = ["snr    bob_ser    eve_ser    attack      ratio      proxy   verdict"]
        for point in report.points:
            verdict = "pass" if point.passed else "FAIL: " + "; ".join(point.reasons)
            lines.append(f"{point.snr:<6g} {point.bob.ser:<10.4g} {point.eve.ser:<10.4g} "
                         f"{point.best_attack:<11} {point.ratio_text:<10} "
                         f"{point.proxy_fraction:<7.3f} {verdict}")
        lines.extend(f"note: {d}" for d in report.diagnostics)
        lines.append("PASS" if report.passed else "FAIL")
        self.last_status = report.exit_status
        return "\n".join(lines)

    def cmd_selftest(self, args):
        """Run the oracle-equivalence and structural checks"""
        def configure(p):
            p.add_argument("--config", default=self._setting('default_experiment',
                                                             'experiments/default.json'))
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--only", nargs="+")
        opts = self.parse("selftest", args, configure)
        codec = load_experiment(opts.config).build_codec()
        known = [name for name, _ in checks_for(codec)]
        for name in opts.only or []:
            if name not in known:
                raise CommandUsageError(f"unknown check '{name}'; expected one of {known}")

        results = run_selftest(codec, opts.seed, opts.only)
        lines = [f"{'ok  ' if r.passed else 'FAIL'} {r.name:<16} {r.seconds:6.1f}s  {r.detail}"
                 for r in results]
        failed = sum(1 for r in results if not r.passed)
        lines.append(f"{len(results) - failed} passed, {failed} failed")
        if failed:
            self.last_status = EXIT_ACCEPTANCE
        return "\n".join(lines)

    def cmd_clear(self, args):
        """Clear the screen"""
        os.system('cls' if os.name == 'nt' else 'clear')
        return ""

    def cmd_history(self, args):
        """Show command history"""
        if not self.app:
            return "Command history not available."

        history = self.app.get_history()
        if not history:
            return "No command history."

        history_text = "Command History:\n"
        for i, entry in enumerate(history, 1):
            cmd = entry['command']
            timestamp = datetime.fromisoformat(entry['timestamp']).strftime("%Y-%m-%d %H:%M:%S")
            history_text += f"{i}. [{timestamp}] {cmd}\n"

        return history_text

    def cmd_info(self, args):
        """Display information about LatticeWire"""
        info = "LatticeWire: lattice wiretap simulator\n"
        info += "Version: 0.1.0\n"
        info += "Description: physical-layer lattice encryption over MIMO channels\n"

        if self.app:
            uptime = self.app.get_uptime()
            hours, remainder = divmod(uptime.total_seconds(), 3600)
            minutes, seconds = divmod(remainder, 60)
            info += f"Uptime: {int(hours)}h {int(minutes)}m {int(seconds)}s\n"
            info += f"Threads: {self.app.thread_count()}\n"
        info += f"Plugins: {', '.join(sorted(self.plugins)) or 'none'}\n"
        return info

    def cmd_system(self, args):
        """Display system and library information"""
        fingerprint = environment_fingerprint()
        system_info = f"Operating System: {platform.system()} {platform.release()}\n"
        system_info += f"Architecture: {platform.machine()}\n"
        system_info += f"Python Version: {fingerprint['python']}\n"
        for name, version in fingerprint['packages'].items():
            system_info += f"{name}: {version or 'not installed'}\n"
        system_info += f"Executable: {sys.executable}\n"
        return system_info
