import itertools
import math

import numpy as np
import pytest

from core.codecs import BlockTriCodec, PlainLatticeCodec, codec_from_dict
from core.errors import AllBelowThreshold, InvalidParameters
from core.lattice import Lattice


def test_every_message_survives_the_lattice(small_codec):
    for symbols in itertools.product(range(3), repeat=2):
        message = np.array(symbols)
        point = small_codec.encode(message)
        assert np.array_equal(small_codec.message_from_point(point), message)
        assert np.array_equal(small_codec.decode(point), message)


def test_point_off_the_lattice_has_no_message(small_codec):
    assert small_codec.message_from_point(np.full(4, 0.1)) is None


def test_lattice_basis_generates_codewords(small_codec, rng):
    basis = small_codec.lattice().basis
    for _ in range(10):
        point = small_codec.encode(small_codec.random_message(rng))
        coords = np.linalg.solve(basis, point)
        assert np.allclose(coords, np.rint(coords), atol=1e-9)


def test_truncation(small_codec):
    assert small_codec.truncated(4) is small_codec
    half = small_codec.truncated(3)
    assert half.dim == 2 and half.params.l == 1
    assert small_codec.truncated(3) is half
    with pytest.raises(AllBelowThreshold):
        small_codec.truncated(1)


def test_blocktri_dict_round_trip(small_codec):
    rebuilt = codec_from_dict(small_codec.to_dict())
    assert isinstance(rebuilt, BlockTriCodec)
    assert rebuilt.params == small_codec.params


def test_random_blocktri_codec_from_dict():
    codec = codec_from_dict({"kind": "blocktri", "p": 3, "l": 2, "b": 3, "r": 2, "seed": 4})
    assert codec.dim == 6
    assert codec.params.message_length == 4


def test_plain_codec_dict_round_trip():
    codec = PlainLatticeCodec(Lattice.hexagonal(), q=3, decoder="exact")
    rebuilt = codec_from_dict(codec.to_dict())
    assert np.allclose(rebuilt.lattice().basis, codec.lattice().basis)
    assert (rebuilt.q, rebuilt.decoder) == (3, "exact")


def test_plain_codec_validation():
    with pytest.raises(InvalidParameters):
        PlainLatticeCodec(Lattice.integer(2), q=1)
    with pytest.raises(InvalidParameters):
        PlainLatticeCodec(Lattice.integer(2), q=2, decoder="sphere")
    codec = PlainLatticeCodec(Lattice.integer(2), q=2)
    with pytest.raises(InvalidParameters):
        codec.encode([0, 2])
    with pytest.raises(InvalidParameters):
        codec_from_dict({"kind": "spherical"})


def test_hexagonal_minimum_distance():
    assert PlainLatticeCodec(Lattice.hexagonal(), q=2).min_distance() == pytest.approx(1.0)


def test_second_moment_is_cached_and_symmetric(small_codec):
    moment = small_codec.second_moment(samples=2000)
    assert small_codec.second_moment(samples=2000) is moment
    assert np.allclose(moment, moment.T)
    assert np.trace(moment) > 0
    assert math.isfinite(float(moment.sum()))
