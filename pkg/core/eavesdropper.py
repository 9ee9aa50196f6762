"""
Eavesdropper observation and the attack suite
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from core.channel import eve_noise_covariance, transmit
from core.errors import DimensionCap, DimensionMismatch, InvalidParameters, SingularMatrix
from core.lattice import Lattice, cvp_exact
from core.linalg import invert, offdiag_ratio

logger = logging.getLogger(__name__)

ATTACKS = ("whitened", "babai", "exhaustive")


@dataclass(frozen=True)
class AttackResult:
    message: object
    dist: float = 0.0
    residual_cov: object = None
    residual_cov_offdiag: float = 0.0


def eve_observe(scheme, g, ct, sigma_e, rng):
    g = np.asarray(g, dtype=np.float64)
    if g.shape != (scheme.n, scheme.n):
        raise DimensionMismatch(f"eavesdropper channel must be {scheme.n} x {scheme.n}")
    return transmit(g, ct.x, sigma_e, rng)


def whitening_transform(h, g):
    """H·G⁻¹, exactly the identity when the channels coincide"""
    if np.array_equal(h, g):
        return np.eye(h.shape[0])
    return np.asarray(h, dtype=np.float64) @ invert(g)


def estimate_constant(scheme, whitened, sigma_e, transform):
    """Ĉ from received energy, for an eavesdropper who does not know C"""
    moment = scheme.codec.second_moment()
    lam_energy = float(np.trace(moment))
    noise_energy = sigma_e ** 2 * float(np.sum(transform ** 2))
    signal = max(float(whitened @ whitened) - noise_energy, np.finfo(np.float64).tiny)
    return math.sqrt(signal / lam_energy)


def eve_attack_whitened(y_e, scheme, g, c, sigma_e=0.0, knows_c=True):
    """
    Undo the eavesdropper channel with H·G⁻¹ and run Bob's receiver.

    The residual noise H·G⁻¹·N_E is colored; its covariance off-diagonal mass is
    reported alongside the decision.
    """
    transform = whitening_transform(scheme.h, g)
    whitened = transform @ np.asarray(y_e, dtype=np.float64)
    if not knows_c:
        c = estimate_constant(scheme, whitened, sigma_e, transform)
    message = scheme.decode_bob(whitened, c, sigma_e)
    cov = eve_noise_covariance(scheme.h, g, sigma_e)
    offdiag = offdiag_ratio(eve_noise_covariance(scheme.h, g, 1.0))
    return AttackResult(message=message, residual_cov=cov, residual_cov_offdiag=offdiag)


def _rounding_coords(eff_basis, y_e):
    eff_basis = np.asarray(eff_basis, dtype=np.float64)
    if eff_basis.shape[0] == eff_basis.shape[1]:
        return np.rint(invert(eff_basis) @ y_e)
    # rectangular generator (SVD scheme): round the least-squares coordinates
    coords, _, rank, _ = np.linalg.lstsq(eff_basis, y_e, rcond=None)
    if rank < eff_basis.shape[1]:
        raise SingularMatrix("effective generator does not have full column rank")
    return np.rint(coords)


def eve_attack_babai(y_e, eff_basis, codec):
    """
    Babai rounding against the scrambled generator C·G·precoder·B.

    Recovered coordinates are mapped back through the codec lattice basis; the
    message is None when the recovered point is not a codeword.
    """
    y_e = np.asarray(y_e, dtype=np.float64)
    coords = _rounding_coords(eff_basis, y_e).astype(np.int64)
    dist = float(np.linalg.norm(y_e - np.asarray(eff_basis) @ coords))
    point = codec.lattice().basis @ coords
    return AttackResult(message=codec.message_from_point(point), dist=dist)


def eve_attack_exhaustive(y_e, eff_basis, codec):
    """
    Exact CVP on the scrambled lattice; only feasible at small dimension.

    A search beyond the enumeration budget counts as a failed attack.
    """
    eff_basis = np.asarray(eff_basis, dtype=np.float64)
    if eff_basis.shape[0] != eff_basis.shape[1]:
        logger.debug("Exhaustive attack skipped: rectangular effective generator")
        return AttackResult(message=None, dist=math.inf)
    try:
        result = cvp_exact(Lattice(eff_basis), y_e)
    except (DimensionCap, SingularMatrix) as e:
        logger.debug("Exhaustive attack abandoned: %s", e)
        return AttackResult(message=None, dist=math.inf)
    point = codec.lattice().basis @ result.coords
    return AttackResult(message=codec.message_from_point(point), dist=result.dist)


def run_attack(name, y_e, scheme, g, c, sigma_e=0.0, knows_c=True):
    """Dispatch one of the attacks in ``ATTACKS``"""
    if name == "whitened":
        return eve_attack_whitened(y_e, scheme, g, c, sigma_e, knows_c)
    eff_basis = c * scheme.effective_generator(g)
    if name == "babai":
        return eve_attack_babai(y_e, eff_basis, scheme.codec)
    if name == "exhaustive":
        return eve_attack_exhaustive(y_e, eff_basis, scheme.codec)
    raise InvalidParameters(f"unknown attack '{name}'; expected one of {ATTACKS}")
