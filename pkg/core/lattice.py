"""
General lattices: point generation, exact and approximate quantization,
Construction-A embedding and the VNR / NSM figures of merit
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from core import modp
from core.errors import (
    DimensionCap,
    DimensionMismatch,
    InvalidParameters,
    NonPositiveVariance,
    ReductionFailure,
    SingularMatrix,
)
from core.linalg import as_matrix, as_vector, invert

CVP_DIM_CAP = 10
CVP_ENUM_CAP = 2_000_000
CVP_CHUNK_BYTES = 64 * 1024 * 1024


@dataclass(frozen=True)
class Lattice:
    """Lattice generated by the columns of ``basis``"""
    basis: np.ndarray

    def __post_init__(self):
        basis = as_matrix(self.basis, "basis")
        if basis.shape[0] != basis.shape[1]:
            raise DimensionMismatch(f"basis must be square, got {basis.shape}")
        if abs(np.linalg.det(basis)) <= 0:
            raise SingularMatrix("basis is not full rank")
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @classmethod
    def from_vectors(cls, vectors):
        """Build a lattice whose basis vectors are the given rows"""
        return cls(np.asarray(vectors, dtype=np.float64).T)

    @classmethod
    def integer(cls, n):
        return cls(np.eye(n))

    @classmethod
    def hexagonal(cls):
        return cls.from_vectors([[1.0, 0.0], [0.5, math.sqrt(3) / 2]])

    @property
    def dim(self):
        return self.basis.shape[0]

    @property
    def volume(self):
        return float(abs(np.linalg.det(self.basis)))

    def scaled(self, c):
        return Lattice(self.basis * c)


@dataclass(frozen=True)
class ConstructionA:
    """Λ = p⁻¹·gen·Z_p^k + Zⁿ"""
    gen: np.ndarray
    p: int

    def __post_init__(self):
        gen = np.asarray(self.gen, dtype=np.int64)
        if gen.ndim == 1:
            gen = gen.reshape(-1, 1)
        modp.field(self.p)
        if gen.ndim != 2 or gen.shape[1] > gen.shape[0]:
            raise InvalidParameters(f"generator must be n x k with k <= n, got {gen.shape}")
        if gen.size and (gen.min() < 0 or gen.max() >= self.p):
            raise InvalidParameters(f"generator entries must lie in 0..{self.p - 1}")
        object.__setattr__(self, "gen", gen)

    @property
    def n(self):
        return self.gen.shape[0]

    @property
    def k(self):
        return self.gen.shape[1]


@dataclass(frozen=True)
class QuantizeResult:
    point: np.ndarray
    coords: np.ndarray
    dist: float


@dataclass(frozen=True)
class MeritReport:
    volume: float
    nsm_estimate: float
    nsm_stderr: float
    vnr: float
    noise_var: float


def point_at(lat, coords):
    coords = np.asarray(coords)
    if coords.shape != (lat.dim,):
        raise DimensionMismatch(f"expected {lat.dim} coordinates, got shape {coords.shape}")
    return lat.basis @ coords.astype(np.float64)


def default_search_radius(lat):
    inverse = invert(lat.basis)
    kappa = np.linalg.norm(lat.basis, np.inf) * np.linalg.norm(inverse, np.inf)
    return int(math.ceil(kappa)) + 1


def _search_offsets(dim, radius, enum_cap):
    count = (2 * radius + 1) ** dim
    if count > enum_cap:
        raise DimensionCap(
            f"exact search over {count} candidates exceeds the enumeration cap {enum_cap}"
        )
    span = range(-radius, radius + 1)
    return np.array(list(itertools.product(span, repeat=dim)), dtype=np.int64)


def cvp_batch(lat, targets, search_radius=None, dim_cap=CVP_DIM_CAP, enum_cap=CVP_ENUM_CAP):
    """
    Exact closest lattice points for each row of ``targets``.

    Every coordinate vector in the box round(B⁻¹t) ± radius is examined; ties
    resolve to the lexicographically smallest coordinates. Returns
    (points, coords, dists).
    """
    if lat.dim > dim_cap:
        raise DimensionCap(f"exact CVP refused for dimension {lat.dim} > cap {dim_cap}")
    targets = np.atleast_2d(np.asarray(targets, dtype=np.float64))
    if targets.shape[1] != lat.dim:
        raise DimensionMismatch(f"targets must have {lat.dim} columns, got {targets.shape}")
    if search_radius is None:
        search_radius = default_search_radius(lat)
    if search_radius < 1:
        raise InvalidParameters("search_radius must be at least 1")

    offsets = _search_offsets(lat.dim, search_radius, enum_cap)
    offset_points = offsets @ lat.basis.T
    inverse = invert(lat.basis)
    centers = np.rint(targets @ inverse.T).astype(np.int64)
    rel = targets - centers @ lat.basis.T

    chunk = max(1, CVP_CHUNK_BYTES // (8 * len(offsets) * (lat.dim + 1)))
    best = np.empty(len(targets), dtype=np.int64)
    for start in range(0, len(targets), chunk):
        stop = start + chunk
        diff = rel[start:stop, None, :] - offset_points[None, :, :]
        d2 = np.einsum("tkd,tkd->tk", diff, diff)
        floor = d2.min(axis=1, keepdims=True)
        ties = d2 <= floor + 1e-12 * np.maximum(floor, 1.0)
        # offsets are in lexicographic order, so the first tie is the smallest
        best[start:stop] = np.argmax(ties, axis=1)

    coords = centers + offsets[best]
    points = coords @ lat.basis.T
    dists = np.linalg.norm(targets - points, axis=1)
    return points, coords, dists


def cvp_exact(lat, target, search_radius=None, dim_cap=CVP_DIM_CAP, enum_cap=CVP_ENUM_CAP):
    target = as_vector(target, "target")
    points, coords, dists = cvp_batch(lat, target[None, :], search_radius, dim_cap, enum_cap)
    return QuantizeResult(point=points[0], coords=coords[0], dist=float(dists[0]))


def babai_round(lat, target):
    """Coordinate rounding in the basis as given"""
    target = as_vector(target, "target")
    if target.shape[0] != lat.dim:
        raise DimensionMismatch(f"target must have length {lat.dim}")
    coords = np.rint(invert(lat.basis) @ target).astype(np.int64)
    point = lat.basis @ coords
    return QuantizeResult(point=point, coords=coords, dist=float(np.linalg.norm(target - point)))


def construction_a_contains(ca, x, tol=1e-9):
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (ca.n,):
        raise DimensionMismatch(f"point must have length {ca.n}")
    scaled = ca.p * x
    rounded = np.rint(scaled)
    if np.max(np.abs(scaled - rounded)) > tol:
        return False
    return modp.in_column_span(ca.gen, rounded.astype(np.int64), ca.p)


def construction_a_basis(ca):
    """
    Real basis of p⁻¹·gen·Z_p^k + Zⁿ.

    The code is brought to reduced echelon form mod p; each code row with a pivot
    contributes p⁻¹·row, and every non-pivot coordinate contributes a unit vector.
    """
    try:
        rref = modp.row_reduce(ca.gen.T, ca.p) if ca.k else np.zeros((0, ca.n), dtype=np.int64)
    except (ValueError, TypeError) as e:
        raise ReductionFailure(f"cannot column-reduce generator mod {ca.p}: {e}") from e

    rows = rref[np.any(rref != 0, axis=1)] if rref.size else rref
    pivots = modp.pivot_columns(rows)
    if len(set(pivots)) != len(pivots):
        raise ReductionFailure("echelon form has repeated pivots")

    columns = [row / ca.p for row in rows.astype(np.float64)]
    eye = np.eye(ca.n)
    columns += [eye[:, j] for j in range(ca.n) if j not in pivots]
    return Lattice(np.stack(columns, axis=1))


def compute_vnr(lat, noise_var):
    if not noise_var > 0:
        raise NonPositiveVariance(f"noise variance must be positive, got {noise_var}")
    return lat.volume ** (2.0 / lat.dim) / (2 * math.pi * math.e * noise_var)


def estimate_nsm(lat, samples, seed, noise_var=None, dim_cap=CVP_DIM_CAP):
    """
    Monte Carlo normalized second moment.

    Targets are uniform over the parallelepiped spanned by the basis and are
    quantized exactly.
    """
    if lat.dim > dim_cap:
        raise DimensionCap(f"NSM estimation refused for dimension {lat.dim} > cap {dim_cap}")
    if samples < 2:
        raise InvalidParameters("at least two samples are needed for a standard error")
    if noise_var is None:
        noise_var = 1.0 / (2 * math.pi * math.e)

    rng = np.random.default_rng(seed)
    u = rng.random((samples, lat.dim))
    targets = u @ lat.basis.T
    _, _, dists = cvp_batch(lat, targets, dim_cap=dim_cap)

    norm = lat.volume ** (2.0 / lat.dim)
    per_sample = dists ** 2 / lat.dim / norm
    return MeritReport(
        volume=lat.volume,
        nsm_estimate=float(per_sample.mean()),
        nsm_stderr=float(per_sample.std(ddof=1) / math.sqrt(samples)),
        vnr=compute_vnr(lat, noise_var),
        noise_var=noise_var,
    )
