"""
Wiretap channel model: Y_B = H X + N_B at the receiver, Y_E = G X + N_E at the eavesdropper
"""

import logging
from dataclasses import dataclass

import numpy as np

from core.errors import ConditioningFailure, DimensionMismatch, InvalidParameters
from core.linalg import condition_estimate, invert

logger = logging.getLogger(__name__)

CHANNEL_CONDITION_CAP = 1e8
MAX_RESAMPLES = 100
DISTRIBUTIONS = ("gaussian", "uniform")


@dataclass(frozen=True)
class RngStream:
    """
    Reproducible random stream identified by (seed, stream_id).

    ``substream`` derives independent children, so one trial can draw its
    channel, message and noise from separate streams.
    """
    seed: int
    stream_id: int = 0
    path: tuple = ()

    def generator(self):
        sequence = np.random.SeedSequence(
            entropy=self.seed, spawn_key=(self.stream_id, *self.path)
        )
        return np.random.default_rng(sequence)

    def substream(self, tag):
        return RngStream(self.seed, self.stream_id, (*self.path, int(tag)))


@dataclass(frozen=True)
class WiretapChannel:
    h: np.ndarray
    g: np.ndarray
    sigma_b: float = 1.0
    sigma_e: float = 1.0
    resample_count: int = 0

    def __post_init__(self):
        if self.h.shape != self.g.shape or self.h.shape[0] != self.h.shape[1]:
            raise DimensionMismatch(f"channel matrices must be square and equal in size, "
                                    f"got {self.h.shape} and {self.g.shape}")
        if not (self.sigma_b > 0 and self.sigma_e > 0):
            raise InvalidParameters("noise standard deviations must be positive")

    @property
    def n(self):
        return self.h.shape[0]

    def with_noise(self, sigma_b, sigma_e):
        return WiretapChannel(self.h, self.g, sigma_b, sigma_e, self.resample_count)


def _draw(rng, n, dist):
    if dist == "gaussian":
        return rng.standard_normal((n, n))
    if dist == "uniform":
        return rng.uniform(-1.0, 1.0, size=(n, n))
    raise InvalidParameters(
        f"unknown channel distribution '{dist}'; expected one of {DISTRIBUTIONS}")


def sample_channel_pair(n, dist, rng, condition_cap=CHANNEL_CONDITION_CAP,
                        max_resamples=MAX_RESAMPLES):
    """
    Draw H and G with i.i.d. entries.

    H is redrawn while its condition estimate exceeds ``condition_cap``; noise
    levels are left at 1 for the caller to set.
    """
    if n < 1:
        raise InvalidParameters("channel dimension must be positive")
    gen = rng.generator()
    h = _draw(gen, n, dist)
    g = _draw(gen, n, dist)

    resamples = 0
    while condition_estimate(h) > condition_cap:
        if resamples >= max_resamples:
            raise ConditioningFailure(
                f"no channel below condition {condition_cap:g} after {max_resamples} resamples"
            )
        logger.warning("Resampling H (stream %s): condition estimate %.3g above %.3g",
                       rng.stream_id, condition_estimate(h), condition_cap)
        h = _draw(gen, n, dist)
        resamples += 1

    return WiretapChannel(h=h, g=g, resample_count=resamples)


def transmit(m, x, sigma, rng):
    """
    M·x plus i.i.d. Gaussian noise of standard deviation sigma.

    ``x`` may be a single signal or a matrix whose columns are signals.
    """
    m = np.asarray(m, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if sigma < 0:
        raise InvalidParameters("noise standard deviation must be nonnegative")
    if m.ndim != 2 or x.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"cannot apply {m.shape} channel to signal of shape {x.shape}")
    clean = m @ x
    if sigma == 0:
        return clean
    return clean + sigma * rng.generator().standard_normal(clean.shape)


def eve_noise_covariance(h, g, sigma_e):
    """Covariance of H·G⁻¹·N_E, symmetrized"""
    m = np.asarray(h, dtype=np.float64) @ invert(g)
    cov = sigma_e ** 2 * (m @ m.T)
    return (cov + cov.T) / 2
