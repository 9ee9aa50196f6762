"""
Monte Carlo experiment runner

Each trial samples a channel pair, draws a uniform message, transmits it to the
receiver and the eavesdropper, and records who decoded it. Trial t at grid
point i uses the random stream (seed, i·trials + t), so the records do not
depend on the thread schedule.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from core.channel import (
    RngStream,
    WiretapChannel,
    eve_noise_covariance,
    sample_channel_pair,
    transmit,
)
from core.eavesdropper import eve_observe, run_attack
from core.errors import AllBelowThreshold, SingularMatrix
from core.linalg import invert, offdiag_ratio, unitarity_deviation
from core.records import TrialRecord
from core.report import summarize
from core.schemes import build_scheme

logger = logging.getLogger(__name__)

FIXED_CHANNEL_STREAM = 2 ** 63 - 1

# substream tags inside one trial
CHANNEL, MESSAGE, BOB_NOISE, EVE_NOISE = range(4)


@dataclass
class RunResult:
    config: object
    records: list
    summary: dict = field(default_factory=dict)


class ExperimentRunner:
    """Runs the trials of one experiment configuration"""

    def __init__(self, config):
        self.config = config
        self.codec = config.build_codec()
        self._fixed_channel = None
        if config.fixed_channel:
            self._fixed_channel = sample_channel_pair(
                config.n, config.channel_dist, RngStream(config.seed, FIXED_CHANNEL_STREAM)
            )

    def channel_for(self, rng):
        config = self.config
        channel = self._fixed_channel or sample_channel_pair(
            config.n, config.channel_dist, rng.substream(CHANNEL)
        )
        if config.g_equals_h:
            channel = WiretapChannel(h=channel.h, g=channel.h,
                                     resample_count=channel.resample_count)
        return channel

    def noise_levels(self, value, scheme, c):
        """σ_B and σ_E for one grid value"""
        config = self.config
        if config.noise_reference == "dmin":
            sigma_b = c * scheme.codec.min_distance() / value
        else:
            sigma_b = math.sqrt(config.power / value)
        if config.g_equals_h:
            return sigma_b, sigma_b
        return sigma_b, sigma_b * config.sigma_ratio

    def trial(self, trial_id, value):
        config = self.config
        started = time.perf_counter()
        rng = RngStream(config.seed, trial_id)
        channel = self.channel_for(rng)

        unitarity, offdiag = asymmetry_proxy(channel.h, channel.g)
        eve_correct = {name: False for name in config.attacks}
        try:
            scheme = build_scheme(config.scheme, self.codec, channel.h, config.power,
                                  config.norm_mode, config.threshold_t)
        except (AllBelowThreshold, SingularMatrix) as e:
            logger.warning("Trial %d cannot transmit: %s", trial_id, e)
            return TrialRecord(trial_id, value, False, eve_correct, unitarity, offdiag,
                               channel.resample_count, time.perf_counter() - started)

        message = scheme.codec.random_message(rng.substream(MESSAGE).generator())
        ct = scheme.encode(message)
        channel = channel.with_noise(*self.noise_levels(value, scheme, ct.c))

        y_b = transmit(channel.h, ct.x, channel.sigma_b, rng.substream(BOB_NOISE))
        decoded = scheme.decode_bob(y_b, ct.c, channel.sigma_b)
        bob_correct = scheme.codec.same_message(decoded, message)

        # the equal-channel control gives Eve Bob's exact observation
        eve_stream = rng.substream(BOB_NOISE if config.g_equals_h else EVE_NOISE)
        y_e = eve_observe(scheme, channel.g, ct, channel.sigma_e, eve_stream)
        for name in config.attacks:
            result = run_attack(name, y_e, scheme, channel.g, ct.c, channel.sigma_e,
                                config.eve_knows_c)
            eve_correct[name] = scheme.codec.same_message(result.message, message)

        return TrialRecord(
            trial_id=trial_id,
            snr=value,
            bob_correct=bool(bob_correct),
            eve_correct=eve_correct,
            unitarity_dev=unitarity,
            cov_offdiag_ratio=offdiag,
            resample_count=channel.resample_count,
            wall_time=time.perf_counter() - started,
        )

    def jobs(self):
        trials = self.config.trials_per_point
        for index, value in enumerate(self.config.snr_grid):
            for t in range(trials):
                yield index * trials + t, value

    def run(self, threads=1):
        jobs = list(self.jobs())
        logger.info("Running %d trials (%s scheme, %d grid points, %d threads)",
                    len(jobs), self.config.scheme, len(self.config.snr_grid), threads)
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                records = list(pool.map(lambda job: self.trial(*job), jobs))
        else:
            records = [self.trial(*job) for job in jobs]
        records.sort(key=lambda r: r.trial_id)
        return records


def asymmetry_proxy(h, g):
    """Unitarity deviation of G·H⁻¹ and off-diagonal mass of the whitened noise covariance"""
    if np.array_equal(h, g):
        return 0.0, 0.0
    try:
        unitarity = unitarity_deviation(g @ invert(h))
        offdiag = offdiag_ratio(eve_noise_covariance(h, g, 1.0))
    except SingularMatrix:
        return math.inf, math.inf
    return unitarity, offdiag


def run(config, threads=1):
    """Run every trial of ``config`` and summarize the outcome"""
    records = ExperimentRunner(config).run(threads)
    return RunResult(config=config, records=records, summary=summarize(records, config))
