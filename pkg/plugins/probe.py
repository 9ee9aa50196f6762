"""
Channel asymmetry probe plugin for LatticeWire
"""

import shlex

from core.channel import DISTRIBUTIONS, RngStream, sample_channel_pair
from core.commands import CommandParser
from core.config import AcceptanceThresholds
from core.harness import asymmetry_proxy

# Define command name that will be used to invoke this plugin
command_name = "probe"


def probe(n, dist, pairs, seed, thresholds):
    """Fractions of sampled channel pairs passing each asymmetry test"""
    unitary = offdiag = both = 0
    for index in range(pairs):
        channel = sample_channel_pair(n, dist, RngStream(seed, index))
        u, o = asymmetry_proxy(channel.h, channel.g)
        unitary += u > thresholds.unitarity_min
        offdiag += o > thresholds.offdiag_min
        both += u > thresholds.unitarity_min and o > thresholds.offdiag_min
    return unitary / pairs, offdiag / pairs, both / pairs


def run(args):
    """
    Monte Carlo fraction of channel pairs that look different to the eavesdropper
    Usage: probe [--n N] [--dist gaussian|uniform] [--pairs N] [--seed S]
    """
    parser = CommandParser(prog="probe", add_help=False)
    parser.add_argument("--n", type=int, default=8)
    parser.add_argument("--dist", choices=DISTRIBUTIONS, default="gaussian")
    parser.add_argument("--pairs", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=0)
    opts = parser.parse_args(shlex.split(args))
    if opts.pairs < 1 or opts.n < 1:
        return "Usage: probe [--n N] [--dist gaussian|uniform] [--pairs N] [--seed S]"

    thresholds = AcceptanceThresholds()
    unitary, offdiag, both = probe(opts.n, opts.dist, opts.pairs, opts.seed, thresholds)
    return (
        f"{opts.pairs} {opts.dist} channel pairs, n={opts.n}:\n"
        f"- unitarity deviation > {thresholds.unitarity_min:g}: {unitary:.3f}\n"
        f"- covariance off-diagonal > {thresholds.offdiag_min:g}: {offdiag:.3f}\n"
        f"- both: {both:.3f}\n"
    )
