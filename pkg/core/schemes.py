"""
Transmission schemes: channel inversion and SVD truncated inverse water-filling

Alice pre-distorts the lattice point so that Bob, who knows H, observes the
structured lattice scaled by C plus white noise.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from core.errors import AllBelowThreshold, DimensionMismatch, InvalidParameters, ZeroPower
from core.linalg import as_matrix, invert, svd

NORM_MODES = ("per_codeword", "ensemble_average")


@dataclass(frozen=True)
class SchemeCiphertext:
    x: np.ndarray
    c: float
    lam: np.ndarray


@dataclass(frozen=True)
class SvdPartition:
    u: np.ndarray
    v: np.ndarray
    d1: np.ndarray
    k: int
    singular_values: np.ndarray


class TransmissionScheme:
    """
    Shared encode / receive logic.

    Subclasses provide ``precoder`` (n x dim(codec)) so that x = C·precoder·λ,
    and ``front_end`` which maps Bob's observation to C·λ plus noise.
    """
    name = None

    def __init__(self, codec, h, power=1.0, norm_mode="ensemble_average"):
        if not power > 0:
            raise ZeroPower(f"transmit power must be positive, got {power}")
        if norm_mode not in NORM_MODES:
            raise InvalidParameters(f"unknown normalization mode '{norm_mode}'")
        self.h = as_matrix(h, "h")
        if self.h.shape[0] != self.h.shape[1]:
            raise DimensionMismatch(f"channel matrix must be square, got {self.h.shape}")
        self.power = power
        self.norm_mode = norm_mode
        self.codec = codec

    @property
    def n(self):
        return self.h.shape[0]

    @property
    def precoder(self):
        raise NotImplementedError("Subclasses must implement precoder")

    def front_end(self, y):
        raise NotImplementedError("Subclasses must implement front_end")

    @cached_property
    def ensemble_constant(self):
        """C = sqrt(n·P / E‖precoder·λ‖²) over the codec's message ensemble"""
        moment = self.codec.second_moment()
        mean_power = float(np.trace(self.precoder @ moment @ self.precoder.T))
        if mean_power <= 0:
            raise ZeroPower("codec ensemble has zero average power")
        return math.sqrt(self.n * self.power / mean_power)

    def normalization(self, lam):
        if self.norm_mode == "ensemble_average":
            return self.ensemble_constant
        energy = float(np.linalg.norm(self.precoder @ lam))
        if energy == 0:
            return 1.0
        return math.sqrt(self.n * self.power) / energy

    def encode(self, message):
        lam = self.codec.encode(message)
        c = self.normalization(lam)
        return SchemeCiphertext(x=c * (self.precoder @ lam), c=c, lam=lam)

    def decode_bob(self, y_b, c, noise_std=0.0):
        if not c > 0:
            raise InvalidParameters("normalization constant must be positive")
        return self.codec.decode(self.front_end(y_b) / c, noise_std / c)

    def effective_generator(self, g):
        """Basis of the lattice the eavesdropper observes, up to the factor C"""
        return np.asarray(g, dtype=np.float64) @ self.precoder @ self.codec.lattice().basis


class InversionScheme(TransmissionScheme):
    """X = C·H⁻¹·λ"""
    name = "inversion"

    def __init__(self, codec, h, power=1.0, norm_mode="ensemble_average"):
        super().__init__(codec, h, power, norm_mode)
        if codec.dim != self.n:
            raise DimensionMismatch(f"codec dimension {codec.dim} does not match channel size {self.n}")
        self.h_inv = invert(self.h)

    @property
    def precoder(self):
        return self.h_inv

    def front_end(self, y):
        return np.asarray(y, dtype=np.float64)


class SvdScheme(TransmissionScheme):
    """X = C·Vᵗ·D̃⁻¹·λ̃ over the singular dimensions above the threshold"""
    name = "svd"

    def __init__(self, codec, h, t, power=1.0, norm_mode="ensemble_average"):
        super().__init__(codec, h, power, norm_mode)
        if codec.dim != self.n:
            raise DimensionMismatch(f"codec dimension {codec.dim} does not match channel size {self.n}")
        self.t = t
        self.partition = svd_setup(self.h, t)
        self.k = self.partition.k
        # the message codec may use fewer than k dimensions; the rest are zero padded
        self.codec = codec.truncated(self.k)
        self.used = self.codec.dim

    @property
    def precoder(self):
        part = self.partition
        return part.v.T[:, :self.used] / part.d1[:self.used]

    def front_end(self, y):
        return (self.partition.u.T @ np.asarray(y, dtype=np.float64))[:self.used]

    def padded(self, lam):
        """λ̃: the codec point zero padded to n dimensions"""
        out = np.zeros(self.n)
        out[:len(lam)] = lam
        return out

    def scaled_inverse_gains(self, lam):
        """D̃⁻¹·λ̃"""
        gains = np.zeros(self.n)
        gains[:self.k] = 1.0 / self.partition.d1
        return gains * self.padded(lam)


def inv_encode(scheme, message):
    return scheme.encode(message)


def inv_decode_bob(scheme, y_b, c, noise_std=0.0):
    return scheme.decode_bob(y_b, c, noise_std)


def svd_setup(h, t):
    """Factor H = U·D·V and keep the singular values strictly above t"""
    factorization = svd(h)
    s = factorization.singular_values
    k = int(np.count_nonzero(s > t))
    if k == 0:
        raise AllBelowThreshold(f"no singular value exceeds threshold {t:g} (max {s[0]:.4g})")
    return SvdPartition(u=factorization.u, v=factorization.v, d1=s[:k].copy(), k=k,
                        singular_values=s)


def svd_encode(scheme, message):
    return scheme.encode(message)


def svd_decode_bob(scheme, y_b, c, noise_std=0.0):
    return scheme.decode_bob(y_b, c, noise_std)


def build_scheme(name, codec, h, power=1.0, norm_mode="ensemble_average", t=0.0):
    if name == "inversion":
        return InversionScheme(codec, h, power, norm_mode)
    if name == "svd":
        return SvdScheme(codec, h, t, power, norm_mode)
    raise InvalidParameters(f"unknown scheme '{name}'")
