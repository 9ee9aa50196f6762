import os

import numpy as np
import pytest

from core.blocktri import BlockTriParams
from core.codecs import BlockTriCodec
from core.config import load_experiment

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
DEFAULT_EXPERIMENT = os.path.join(ROOT, "experiments", "default.json")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def default_experiment():
    return load_experiment(DEFAULT_EXPERIMENT)


@pytest.fixture(scope="session")
def default_codec(default_experiment):
    return default_experiment.build_codec()


@pytest.fixture(scope="session")
def small_params():
    """p=3, b=2, r=1, l=2: small enough for exhaustive oracles"""
    return BlockTriParams(p=3, l=2, k_check=[[1, 1]], a_blocks={(2, 1): [[2, 1]]})


@pytest.fixture(scope="session")
def small_codec(small_params):
    return BlockTriCodec(small_params)


def experiment_dict(**overrides):
    """Small, fast experiment document for harness and config tests"""
    data = {
        "scheme": "inversion",
        "n": 4,
        "seed": 5,
        "trials_per_point": 20,
        "snr_grid": [10, 40],
        "noise_reference": "dmin",
        "codec": {"kind": "blocktri", "p": 3, "l": 2, "b": 2, "r": 1, "z": 0,
                  "k": [1, 1], "a": {"2,1": [2, 1]}},
    }
    data.update(overrides)
    return data
