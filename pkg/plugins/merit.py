"""
Figure-of-merit plugin for LatticeWire
"""

import shlex

from core.commands import CommandParser, CommandUsageError
from core.config import load_experiment
from core.errors import ConfigError, InvalidParameters
from core.lattice import Lattice, estimate_nsm

# Define command name that will be used to invoke this plugin
command_name = "merit"

USAGE = "merit [integer N | hexagonal | codec <experiment.json>]"


def lattice_for(target):
    """Resolve 'integer N', 'hexagonal' or 'codec <experiment.json>' to a lattice"""
    kind = target[0] if target else "hexagonal"
    if kind == "integer":
        return f"Z^{int(target[1])}", Lattice.integer(int(target[1]))
    if kind == "hexagonal":
        return "hexagonal", Lattice.hexagonal()
    if kind == "codec":
        codec = load_experiment(target[1]).build_codec()
        return f"{codec.kind} codec", codec.lattice()
    raise ValueError(f"unknown lattice '{kind}'")


def run(args):
    """
    Normalized second moment and VNR of a lattice
    Usage: merit [integer N | hexagonal | codec <experiment.json>] [--samples N] [--seed S] [--noise-var V]
    """
    parser = CommandParser(prog="merit", add_help=False)
    parser.add_argument("target", nargs="*")
    parser.add_argument("--samples", type=int, default=20_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--noise-var", type=float)
    opts = parser.parse_args(shlex.split(args))

    try:
        name, lat = lattice_for(opts.target)
    except ConfigError:
        raise
    except (IndexError, ValueError) as e:
        raise CommandUsageError(f"Usage: {USAGE} ({e})") from e

    try:
        report = estimate_nsm(lat, opts.samples, opts.seed, opts.noise_var)
    except InvalidParameters as e:
        raise CommandUsageError(f"merit: {e}") from e
    return (
        f"{name} (dimension {lat.dim}):\n"
        f"- Volume: {report.volume:.6g}\n"
        f"- NSM: {report.nsm_estimate:.6f} ± {report.nsm_stderr:.6f}\n"
        f"- VNR at noise variance {report.noise_var:.4g}: {report.vnr:.6g}\n"
    )
