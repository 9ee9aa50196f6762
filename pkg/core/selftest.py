"""
Oracle-equivalence and structural checks behind the `selftest` command

Each check is a plain function taking a numpy Generator and returning a
detail string; it raises CheckFailed on failure.
"""

import logging
import math
import time
from collections import Counter
from dataclasses import dataclass

import numpy as np

from core import blocktri
from core.channel import RngStream, sample_channel_pair
from core.errors import CheckFailed, DimensionCap, SingularMatrix
from core.lattice import Lattice, babai_round, cvp_exact, estimate_nsm
from core.schemes import InversionScheme, SvdScheme, svd_setup

logger = logging.getLogger(__name__)

HEXAGONAL_NSM = 5 / (36 * math.sqrt(3))
ORACLE_INSTANCES = 100
ORACLE_RESIDUE_BUDGET = 200_000
CVP_PAIRS = 1000
CVP_CHECK_ENUM_CAP = 1_000_000
NSM_SAMPLES = 100_000
ROUND_TRIP_MESSAGES = 100
POWER_MESSAGES = 10_000
BASIS_KINDS = ("near-orthogonal", "hexagonal", "gaussian")


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def random_instance(rng):
    """Random small block-triangular parameters the brute-force oracle can scan"""
    while True:
        p = int(rng.choice([2, 3, 5]))
        b = int(rng.integers(2, 5))
        l = int(rng.integers(1, 4))
        if p ** (l * b) <= ORACLE_RESIDUE_BUDGET:
            break
    r = int(rng.integers(1, b))
    z = int(rng.integers(0, r))
    return blocktri.BlockTriParams.random(p, l, b, r, z, seed=int(rng.integers(2 ** 31)))


def check_encoder_oracle(rng, instances=ORACLE_INSTANCES):
    """encode and the exhaustive oracle agree, and F·x reproduces the padded syndrome"""
    for _ in range(instances):
        params = random_instance(rng)
        m = blocktri.BlockMessage(rng.integers(0, params.p, size=params.message_length))
        fast = blocktri.encode(params, m)
        slow = blocktri.encode_oracle(params, m)
        if not np.array_equal(fast.x_int, slow.x_int):
            raise CheckFailed(
                f"encoder mismatch for {params.to_dict()}: {fast.x_int} vs {slow.x_int}")
        synd = blocktri.syndrome(params, fast.x_int)
        if not np.array_equal(synd, blocktri.padded_syndrome(params, m)):
            raise CheckFailed(f"congruence broken for {params.to_dict()}")
    return f"{instances} instances agree"


def cvp_test_basis(rng, attempt):
    """Near-orthogonal, hexagonal and Gaussian bases in turn, as (kind, basis)"""
    kind = BASIS_KINDS[attempt % len(BASIS_KINDS)]
    if kind == "near-orthogonal":
        dim = int(rng.integers(2, 7))
        return kind, np.eye(dim) + 0.15 * rng.standard_normal((dim, dim))
    if kind == "hexagonal":
        return kind, rng.uniform(0.5, 2.0) * Lattice.hexagonal().basis
    dim = int(rng.integers(2, 4))
    return kind, rng.standard_normal((dim, dim))


def check_cvp_ordering(rng, pairs=CVP_PAIRS):
    """Exact CVP never loses to Babai rounding, and ties it on orthogonal bases"""
    compared = Counter()
    attempt = 0
    while sum(compared.values()) < pairs:
        kind, basis = cvp_test_basis(rng, attempt)
        attempt += 1
        target = 3 * rng.standard_normal(basis.shape[0])
        try:
            lat = Lattice(basis)
            exact = cvp_exact(lat, target, enum_cap=CVP_CHECK_ENUM_CAP)
        except (DimensionCap, SingularMatrix):
            continue
        approx = babai_round(lat, target)
        if exact.dist > approx.dist + 1e-12:
            raise CheckFailed(f"exact {exact.dist} worse than Babai {approx.dist} "
                              f"on a {kind} basis of dimension {lat.dim}")

        diagonal = Lattice(np.diag(rng.uniform(0.5, 2.0, size=lat.dim)))
        d_exact = cvp_exact(diagonal, target).dist
        d_babai = babai_round(diagonal, target).dist
        if not math.isclose(d_exact, d_babai, rel_tol=1e-12, abs_tol=1e-12):
            raise CheckFailed(f"orthogonal basis: exact {d_exact} != Babai {d_babai}")
        compared[kind] += 1
    return f"{pairs} pairs ordered ({', '.join(f'{compared[k]} {k}' for k in BASIS_KINDS)})"


def check_nsm_calibration(rng, samples=NSM_SAMPLES):
    """NSM estimates of Zⁿ and the hexagonal lattice land within 3 standard errors"""
    details = []
    for name, lat, expected in [
        *[(f"Z^{n}", Lattice.integer(n), 1 / 12) for n in range(1, 5)],
        ("A2", Lattice.hexagonal(), HEXAGONAL_NSM),
    ]:
        merit = estimate_nsm(lat, samples, seed=int(rng.integers(2 ** 31)))
        gap = abs(merit.nsm_estimate - expected)
        if gap > 3 * merit.nsm_stderr:
            raise CheckFailed(
                f"{name}: NSM {merit.nsm_estimate:.6f} is {gap / merit.nsm_stderr:.1f} "
                f"standard errors from {expected:.6f}")
        details.append(f"{name} {merit.nsm_estimate:.5f}")
    return ", ".join(details)


def _channel(rng, n):
    return sample_channel_pair(n, "gaussian", RngStream(int(rng.integers(2 ** 31)))).h


def check_round_trips(rng, codec, messages=ROUND_TRIP_MESSAGES):
    """Both schemes decode exactly at zero noise"""
    h = _channel(rng, codec.dim)
    median = float(np.median(svd_setup(h, 0.0).singular_values))
    for scheme in (InversionScheme(codec, h), SvdScheme(codec, h, median)):
        for _ in range(messages):
            message = scheme.codec.random_message(rng)
            ct = scheme.encode(message)
            decoded = scheme.decode_bob(h @ ct.x, ct.c)
            if not scheme.codec.same_message(decoded, message):
                raise CheckFailed(f"{scheme.name} scheme failed to round-trip {message}")
    return f"{messages} messages per scheme"


def check_svd_structure(rng, codec):
    """Zero padding, pipeline identity and the threshold partition"""
    part = svd_setup(np.diag([3.0, 2.0, 0.5]), 1.0)
    if part.k != 2 or not np.allclose(part.d1, [3.0, 2.0]):
        raise CheckFailed(f"partition gave k={part.k}")

    h = _channel(rng, codec.dim)
    median = float(np.median(svd_setup(h, 0.0).singular_values))
    scheme = SvdScheme(codec, h, median)
    for _ in range(ROUND_TRIP_MESSAGES):
        ct = scheme.encode(scheme.codec.random_message(rng))
        gains = scheme.scaled_inverse_gains(ct.lam)
        if gains[scheme.k:].any():
            raise CheckFailed("inverse gains leak past the kept dimensions")
        rotated = scheme.partition.u.T @ (h @ ct.x) / ct.c
        if not np.allclose(rotated, scheme.padded(ct.lam), atol=1e-9):
            raise CheckFailed("Uᵗ·H·x/C differs from λ̃")
    return f"k={scheme.k} of {scheme.n}"


def check_power_contract(rng, codec, messages=POWER_MESSAGES):
    """Per-codeword power never exceeds P; the ensemble mean stays within 5%"""
    h = _channel(rng, codec.dim)
    per_codeword = InversionScheme(codec, h, power=1.0, norm_mode="per_codeword")
    ensemble = InversionScheme(codec, h, power=1.0, norm_mode="ensemble_average")
    worst, total = 0.0, 0.0
    for _ in range(messages):
        message = codec.random_message(rng)
        x = per_codeword.encode(message).x
        worst = max(worst, float(x @ x) / codec.dim)
        y = ensemble.encode(message).x
        total += float(y @ y) / codec.dim
    mean = total / messages
    if worst > 1.0 + 1e-9:
        raise CheckFailed(f"per-codeword power reached {worst}")
    if abs(mean - 1.0) > 0.05:
        raise CheckFailed(f"ensemble mean power {mean:.4f}")
    return f"max {worst:.6f}, ensemble mean {mean:.4f}"


def checks_for(codec):
    return [
        ("encoder-oracle", check_encoder_oracle),
        ("cvp-ordering", check_cvp_ordering),
        ("nsm-calibration", check_nsm_calibration),
        ("round-trips", lambda rng: check_round_trips(rng, codec)),
        ("svd-structure", lambda rng: check_svd_structure(rng, codec)),
        ("power-contract", lambda rng: check_power_contract(rng, codec)),
    ]


def run_selftest(codec, seed=0, only=None):
    """Run every check (or those named in ``only``) with independent streams"""
    results = []
    for index, (name, check) in enumerate(checks_for(codec)):
        if only and name not in only:
            continue
        rng = RngStream(seed, index).generator()
        started = time.perf_counter()
        try:
            detail = check(rng)
            passed = True
        except CheckFailed as e:
            detail, passed = str(e), False
        seconds = time.perf_counter() - started
        logger.info("Check %s %s in %.1fs", name, "passed" if passed else "FAILED", seconds)
        results.append(CheckResult(name, passed, detail, seconds))
    return results
