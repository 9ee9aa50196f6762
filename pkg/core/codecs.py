"""
Codec adapters used by the transmission schemes

A codec maps integer message vectors to lattice points and back. Two kinds are
available: the block-triangular Construction-A codec and a plain lattice with
coordinates drawn from Z_q.
"""

import itertools
from functools import cached_property

import numpy as np

from core import blocktri, modp
from core.errors import AllBelowThreshold, DimensionCap, InvalidParameters
from core.lattice import (
    CVP_ENUM_CAP,
    ConstructionA,
    Lattice,
    babai_round,
    construction_a_basis,
    cvp_exact,
    default_search_radius,
)

ENSEMBLE_SAMPLES = 10_000
ENSEMBLE_SEED = 0


class Codec:
    """Base class for codecs"""
    kind = None

    def __init__(self):
        self._truncations = {}

    @property
    def dim(self):
        raise NotImplementedError("Subclasses must implement dim")

    def random_message(self, rng):
        raise NotImplementedError("Subclasses must implement random_message")

    def encode(self, message):
        raise NotImplementedError("Subclasses must implement encode")

    def decode(self, y, noise_std=0.0):
        raise NotImplementedError("Subclasses must implement decode")

    def lattice(self):
        raise NotImplementedError("Subclasses must implement lattice")

    def message_from_point(self, point):
        raise NotImplementedError("Subclasses must implement message_from_point")

    def min_distance(self):
        raise NotImplementedError("Subclasses must implement min_distance")

    def _truncate(self, k):
        raise NotImplementedError("Subclasses must implement _truncate")

    def to_dict(self):
        raise NotImplementedError("Subclasses must implement to_dict")

    def truncated(self, k):
        """Codec of dimension at most k built from the leading part of this one"""
        if k >= self.dim:
            return self
        if k not in self._truncations:
            self._truncations[k] = self._truncate(k)
        return self._truncations[k]

    def same_message(self, a, b):
        return a is not None and b is not None and np.array_equal(a, b)

    def second_moment(self, samples=ENSEMBLE_SAMPLES, seed=ENSEMBLE_SEED):
        """E[λλᵗ] over uniformly drawn messages, estimated once per codec"""
        key = (samples, seed)
        cache = self.__dict__.setdefault("_second_moments", {})
        if key not in cache:
            rng = np.random.default_rng(seed)
            points = np.stack([self.encode(self.random_message(rng)) for _ in range(samples)])
            cache[key] = points.T @ points / samples
        return cache[key]


class BlockTriCodec(Codec):
    """Block-lower-triangular Construction-A codec"""
    kind = "blocktri"

    def __init__(self, params, window=1):
        super().__init__()
        self.params = params
        self.window = window

    @property
    def dim(self):
        return self.params.n

    def random_message(self, rng):
        return rng.integers(0, self.params.p, size=self.params.message_length)

    def encode(self, message):
        return blocktri.encode(self.params, blocktri.BlockMessage(message)).lattice_point

    def decode(self, y, noise_std=0.0):
        return blocktri.decode(self.params, y, noise_std, self.window).symbols

    @cached_property
    def _lattice(self):
        p = self.params.p
        gen = modp.null_space(blocktri.pinned_rows(self.params), p).T
        return construction_a_basis(ConstructionA(gen=gen, p=p))

    def lattice(self):
        return self._lattice

    def message_from_point(self, point):
        p = self.params.p
        scaled = p * np.asarray(point, dtype=np.float64)
        x_int = np.rint(scaled)
        if np.max(np.abs(scaled - x_int)) > 1e-6:
            return None
        synd = blocktri.syndrome(self.params, x_int.astype(np.int64))
        pinned = synd.reshape(self.params.l, self.params.r)[:, :self.params.z]
        if pinned.any():
            return None
        return blocktri.message_from_syndrome(self.params, synd).symbols

    @cached_property
    def _min_distance(self):
        return blocktri.min_distance_estimate(self.params)

    def min_distance(self):
        return self._min_distance

    def _truncate(self, k):
        blocks = min(self.params.l, k // self.params.b)
        if blocks < 1:
            raise AllBelowThreshold(
                f"{k} usable dimensions cannot hold a block of size {self.params.b}"
            )
        return BlockTriCodec(self.params.truncated(blocks), self.window)

    def to_dict(self):
        return {"kind": self.kind, "window": self.window, **self.params.to_dict()}


class PlainLatticeCodec(Codec):
    """Lattice points B·m with m in {0..q-1}^n"""
    kind = "plain"

    def __init__(self, lattice, q, decoder="babai"):
        super().__init__()
        if q < 2:
            raise InvalidParameters("message alphabet q must be at least 2")
        if decoder not in ("babai", "exact"):
            raise InvalidParameters(f"unknown decoder '{decoder}'")
        self.lat = lattice
        self.q = q
        self.decoder = decoder

    @property
    def dim(self):
        return self.lat.dim

    def random_message(self, rng):
        return rng.integers(0, self.q, size=self.dim)

    def encode(self, message):
        message = np.asarray(message, dtype=np.int64)
        if message.shape != (self.dim,) or message.min() < 0 or message.max() >= self.q:
            raise InvalidParameters(f"message must be {self.dim} symbols in 0..{self.q - 1}")
        return self.lat.basis @ message

    def decode(self, y, noise_std=0.0):
        if self.decoder == "exact":
            return cvp_exact(self.lat, y).coords
        return babai_round(self.lat, y).coords

    def lattice(self):
        return self.lat

    def message_from_point(self, point):
        coords = np.linalg.solve(self.lat.basis, np.asarray(point, dtype=np.float64))
        rounded = np.rint(coords)
        if np.max(np.abs(coords - rounded)) > 1e-6:
            return None
        rounded = rounded.astype(np.int64)
        if rounded.min() < 0 or rounded.max() >= self.q:
            return None
        return rounded

    @cached_property
    def _min_distance(self):
        radius = default_search_radius(self.lat)
        count = (2 * radius + 1) ** self.dim
        if count > CVP_ENUM_CAP:
            raise DimensionCap(f"shortest-vector search over {count} candidates refused")
        span = range(-radius, radius + 1)
        coords = np.array([c for c in itertools.product(span, repeat=self.dim) if any(c)])
        return float(np.linalg.norm(coords @ self.lat.basis.T, axis=1).min())

    def min_distance(self):
        return self._min_distance

    def _truncate(self, k):
        return PlainLatticeCodec(Lattice(self.lat.basis[:k, :k]), self.q, self.decoder)

    def to_dict(self):
        return {
            "kind": self.kind,
            "basis": self.lat.basis.T.tolist(),
            "q": self.q,
            "decoder": self.decoder,
        }


def codec_from_dict(data):
    """Build a codec from its configuration section"""
    data = dict(data)
    kind = data.pop("kind", "blocktri")
    if kind == "blocktri":
        window = int(data.pop("window", 1))
        if "k" not in data:
            params = blocktri.BlockTriParams.random(
                p=int(data["p"]), l=int(data["l"]), b=int(data["b"]), r=int(data["r"]),
                z=int(data.get("z", 0)), seed=int(data.get("seed", 0)),
            )
        else:
            params = blocktri.BlockTriParams.from_dict(data)
        return BlockTriCodec(params, window)
    if kind == "plain":
        basis = data.get("basis", "identity")
        if basis == "identity":
            lat = Lattice.integer(int(data["n"]))
        elif basis == "hexagonal":
            lat = Lattice.hexagonal()
        else:
            lat = Lattice.from_vectors(basis)
        lat = lat.scaled(float(data.get("scale", 1.0)))
        return PlainLatticeCodec(lat, int(data.get("q", 2)), data.get("decoder", "babai"))
    raise InvalidParameters(f"unknown codec kind '{kind}'")
