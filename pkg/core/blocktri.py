"""
Block-lower-triangular Construction-A lattice codec

The parity check F has the small check matrix K on its block diagonal and the
coupling blocks A_ij below it. A message is encoded block by block as the
shortest centered lift of the coset {x : K x = [0_z; m_i] - sum_j A_ij X_j mod p},
and decoded by a sequential nearest-candidate search with interference
cancellation.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from core import modp
from core.errors import (
    CandidateCap,
    DimensionMismatch,
    InvalidParameters,
    KernelTooLarge,
    NoSolution,
    SizeCap,
)

logger = logging.getLogger(__name__)

KERNEL_CAP = 1_000_000
CANDIDATE_CAP = 1_000_000
ORACLE_MAX_DIM = 12
ORACLE_MAX_RESIDUES = 10_000_000
ORACLE_CHUNK = 200_000
RANK_REDRAWS = 1000


def _lex_first(ints, sqnorms):
    """Index of the row with the smallest squared norm, ties broken lexicographically"""
    keys = [ints[:, c] for c in range(ints.shape[1] - 1, -1, -1)]
    keys.append(sqnorms)
    return int(np.lexsort(keys)[0])


@dataclass(frozen=True, eq=False)
class BlockTriParams:
    p: int
    l: int
    k_check: np.ndarray
    a_blocks: dict = field(default_factory=dict)
    zero_rows: int = 0

    def __post_init__(self):
        k_check = np.asarray(self.k_check, dtype=np.int64)
        if k_check.ndim != 2:
            raise InvalidParameters("K must be a 2-D matrix")
        r, b = k_check.shape
        modp.field(self.p)
        if self.l < 1:
            raise InvalidParameters("at least one diagonal block is required")
        if not r < b:
            raise InvalidParameters(f"K must have fewer rows than columns, got {r} x {b}")
        if not 0 <= self.zero_rows < r:
            raise InvalidParameters(f"zero_rows must satisfy 0 <= z < r={r}, got {self.zero_rows}")
        if k_check.min() < 0 or k_check.max() >= self.p:
            raise InvalidParameters(f"K entries must lie in 0..{self.p - 1}")
        if modp.rank(k_check, self.p) != r:
            raise InvalidParameters("K does not have full row rank mod p")

        blocks = {}
        for key, value in dict(self.a_blocks).items():
            i, j = (int(v) for v in key)
            if not 1 <= j < i <= self.l:
                raise InvalidParameters(f"A block ({i},{j}) is not strictly below the diagonal")
            block = np.asarray(value, dtype=np.int64)
            if block.shape != (r, b):
                raise InvalidParameters(f"A block ({i},{j}) has shape {block.shape}, expected {(r, b)}")
            if block.size and (block.min() < 0 or block.max() >= self.p):
                raise InvalidParameters(f"A block ({i},{j}) entries must lie in 0..{self.p - 1}")
            block.setflags(write=False)
            blocks[(i, j)] = block

        k_check.setflags(write=False)
        object.__setattr__(self, "k_check", k_check)
        object.__setattr__(self, "a_blocks", blocks)

    @classmethod
    def random(cls, p, l, b, r, z=0, seed=0):
        """K with full row rank and i.i.d. uniform A_ij, reproducible from seed"""
        modp.field(p)
        if l < 1:
            raise InvalidParameters("at least one diagonal block is required")
        if not 1 <= r < b:
            raise InvalidParameters(f"K must have 1 <= r < b rows, got r={r}, b={b}")
        if not 0 <= z < r:
            raise InvalidParameters(f"zero_rows must satisfy 0 <= z < r={r}, got {z}")
        rng = np.random.default_rng(seed)
        for _ in range(RANK_REDRAWS):
            k_check = rng.integers(0, p, size=(r, b))
            if modp.rank(k_check, p) == r:
                break
        else:
            raise InvalidParameters(f"no full-rank {r} x {b} K mod {p} after {RANK_REDRAWS} draws")
        a_blocks = {(i, j): rng.integers(0, p, size=(r, b))
                    for i in range(2, l + 1) for j in range(1, i)}
        return cls(p=p, l=l, k_check=k_check, a_blocks=a_blocks, zero_rows=z)

    @property
    def r(self):
        return self.k_check.shape[0]

    @property
    def b(self):
        return self.k_check.shape[1]

    @property
    def z(self):
        return self.zero_rows

    @property
    def n(self):
        return self.l * self.b

    @property
    def symbols_per_block(self):
        return self.r - self.z

    @property
    def message_length(self):
        return self.l * self.symbols_per_block

    def a_block(self, i, j):
        return self.a_blocks.get((i, j), np.zeros((self.r, self.b), dtype=np.int64))

    def truncated(self, blocks):
        """The same construction restricted to its first ``blocks`` diagonal blocks"""
        kept = {key: value for key, value in self.a_blocks.items() if key[0] <= blocks}
        return BlockTriParams(p=self.p, l=blocks, k_check=self.k_check, a_blocks=kept,
                              zero_rows=self.zero_rows)

    def to_dict(self):
        return {
            "p": self.p,
            "l": self.l,
            "b": self.b,
            "r": self.r,
            "z": self.z,
            "k": self.k_check.ravel().tolist(),
            "a": {f"{i},{j}": block.ravel().tolist()
                  for (i, j), block in sorted(self.a_blocks.items())},
        }

    @classmethod
    def from_dict(cls, data):
        p, l, b, r = int(data["p"]), int(data["l"]), int(data["b"]), int(data["r"])
        k_entries = np.asarray(data["k"], dtype=np.int64)
        if k_entries.size != r * b:
            raise InvalidParameters(f"'k' needs {r * b} entries, got {k_entries.size}")
        a_blocks = {}
        for key, entries in data.get("a", {}).items():
            i, j = (int(v) for v in key.split(","))
            entries = np.asarray(entries, dtype=np.int64)
            if entries.size != r * b:
                raise InvalidParameters(f"A block {key} needs {r * b} entries, got {entries.size}")
            a_blocks[(i, j)] = entries.reshape(r, b)
        return cls(p=p, l=l, k_check=k_entries.reshape(r, b), a_blocks=a_blocks,
                   zero_rows=int(data.get("z", 0)))

    def __eq__(self, other):
        if not isinstance(other, BlockTriParams):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(repr(self.to_dict()))

    # Tables shared by encode and decode; they depend only on the parameters.

    @cached_property
    def _right_inverse(self):
        return modp.right_inverse(self.k_check, self.p)

    @cached_property
    def _kernel_members(self):
        size = self.p ** (self.b - self.r)
        if size > KERNEL_CAP:
            raise KernelTooLarge(f"coset size {size} exceeds the enumeration cap {KERNEL_CAP}")
        kernel = modp.null_space(self.k_check, self.p)
        return modp.span_members(kernel, self.p)

    @cached_property
    def _free_table(self):
        """Residues R·[0_z; f] + kernel for every free syndrome f, with f alongside"""
        free = modp.residues(self.p, self.symbols_per_block, 0, self.p ** self.symbols_per_block)
        shifts = modp.reduce(free @ self._right_inverse[:, self.z:].T, self.p)
        members = self._kernel_members
        table = modp.reduce(shifts[:, None, :] + members[None, :, :], self.p).reshape(-1, self.b)
        labels = np.repeat(free, len(members), axis=0)
        return table, labels


@dataclass(frozen=True)
class BlockMessage:
    symbols: np.ndarray

    def __post_init__(self):
        symbols = np.asarray(self.symbols, dtype=np.int64).ravel()
        symbols.setflags(write=False)
        object.__setattr__(self, "symbols", symbols)

    def block(self, params, i):
        s = params.symbols_per_block
        return self.symbols[(i - 1) * s:i * s]

    def __eq__(self, other):
        if not isinstance(other, BlockMessage):
            return NotImplemented
        return np.array_equal(self.symbols, other.symbols)

    def __hash__(self):
        return hash(self.symbols.tobytes())


@dataclass(frozen=True)
class BlockCodeword:
    x_int: np.ndarray
    lattice_point: np.ndarray


def check_message(params, m):
    if m.symbols.shape != (params.message_length,):
        raise DimensionMismatch(
            f"message must have {params.message_length} symbols, got {m.symbols.shape[0]}"
        )
    if m.symbols.size and (m.symbols.min() < 0 or m.symbols.max() >= params.p):
        raise InvalidParameters(f"message symbols must lie in 0..{params.p - 1}")


def assemble_f(params):
    r, b = params.r, params.b
    f = np.zeros((params.l * r, params.l * b), dtype=np.int64)
    for i in range(1, params.l + 1):
        rows = slice((i - 1) * r, i * r)
        f[rows, (i - 1) * b:i * b] = params.k_check
        for j in range(1, i):
            f[rows, (j - 1) * b:j * b] = params.a_block(i, j)
    return f


def padded_syndrome(params, m):
    """[0_z; m_i] stacked over every block"""
    target = np.zeros(params.l * params.r, dtype=np.int64)
    for i in range(1, params.l + 1):
        start = (i - 1) * params.r + params.z
        target[start:(i * params.r)] = m.block(params, i)
    return target


def syndrome(params, x_int):
    """F·x mod p, one row per check"""
    return modp.reduce(assemble_f(params) @ np.asarray(x_int, dtype=np.int64), params.p)


def message_from_syndrome(params, synd):
    """Message symbols read off the unpinned rows of every block"""
    synd = np.asarray(synd, dtype=np.int64).reshape(params.l, params.r)
    return BlockMessage(synd[:, params.z:].ravel())


def _interference(params, i, blocks):
    total = np.zeros(params.r, dtype=np.int64)
    for j in range(1, i):
        total += params.a_block(i, j) @ blocks[j - 1]
    return modp.reduce(total, params.p)


def encode(params, m):
    check_message(params, m)
    p = params.p
    members = params._kernel_members
    blocks = []
    for i in range(1, params.l + 1):
        target = np.zeros(params.r, dtype=np.int64)
        target[params.z:] = m.block(params, i)
        residual = modp.reduce(target - _interference(params, i, blocks), p)
        particular = modp.reduce(params._right_inverse @ residual, p)
        lifts = modp.centered(particular[None, :] + members, p)
        best = _lex_first(lifts, np.einsum("kb,kb->k", lifts, lifts))
        blocks.append(lifts[best])

    x_int = np.concatenate(blocks)
    return BlockCodeword(x_int=x_int, lattice_point=x_int / p)


def _enumerate_congruence(params, f_rows, target, max_residues):
    """All centered x in Z_p^n with f_rows @ x = target mod p, by exhaustive scan"""
    n, p = params.n, params.p
    if n > ORACLE_MAX_DIM or p ** n > max_residues:
        raise SizeCap(f"exhaustive scan of {p}^{n} residues exceeds the oracle cap")
    total = p ** n
    found = []
    for start in range(0, total, ORACLE_CHUNK):
        xs = modp.residues(p, n, start, min(total, start + ORACLE_CHUNK))
        ok = np.all(modp.reduce(xs @ f_rows.T, p) == target, axis=1)
        if ok.any():
            found.append(xs[ok])
    if not found:
        return np.zeros((0, n), dtype=np.int64)
    return modp.centered(np.concatenate(found), p)


def encode_oracle(params, m, max_residues=ORACLE_MAX_RESIDUES):
    """
    Brute-force reference encoder.

    Scans every residue vector of Z_p^n, keeps those satisfying the full
    congruence F·x = padded syndrome, and orders the centered solutions by
    (|X_1|², X_1, |X_2|², X_2, ...).
    """
    check_message(params, m)
    solutions = _enumerate_congruence(params, assemble_f(params), padded_syndrome(params, m),
                                      max_residues)
    if len(solutions) == 0:
        raise NoSolution("no residue vector satisfies the congruence")

    b = params.b
    keys = []
    for i in range(params.l - 1, -1, -1):
        block = solutions[:, i * b:(i + 1) * b]
        keys.extend(block[:, c] for c in range(b - 1, -1, -1))
        keys.append(np.einsum("kb,kb->k", block, block))
    x_int = solutions[np.lexsort(keys)[0]]
    return BlockCodeword(x_int=x_int, lattice_point=x_int / params.p)


def pinned_rows(params):
    """Rows of F whose syndrome is fixed to zero"""
    f = assemble_f(params)
    keep = [(i - 1) * params.r + t for i in range(1, params.l + 1) for t in range(params.z)]
    return f[keep]


def decode(params, y, noise_std=0.0, window=1):
    """
    Sequential block decoder.

    For each block, every residue consistent with the pinned rows and the
    already decided blocks is lifted (within ``window`` periods of its centered
    representative) to the integer point nearest p·y_i; the closest candidate
    wins, ties going to the lexicographically smallest integer vector.
    """
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (params.n,):
        raise DimensionMismatch(f"received vector must have length {params.n}, got {y.shape}")
    p, b, z = params.p, params.b, params.z
    window = max(int(window), int(np.ceil(6 * noise_std)))

    count = p ** (b - z) * (2 * window + 1) ** b
    if count > CANDIDATE_CAP:
        raise CandidateCap(f"{count} candidates per block exceeds the cap {CANDIDATE_CAP}")

    table, labels = params._free_table
    pinned_shift = params._right_inverse[:, :z]
    blocks, symbols = [], []
    for i in range(1, params.l + 1):
        u = _interference(params, i, blocks)
        base = modp.reduce(pinned_shift @ (-u[:z]), p)
        residues = modp.centered(table + base[None, :], p)

        target = p * y[(i - 1) * b:i * b]
        shift = np.ceil((target[None, :] - residues) / p - 0.5)
        shift = np.clip(shift, -window, window).astype(np.int64)
        lifts = residues + p * shift
        err = target[None, :] - lifts
        best = _lex_first(lifts, np.einsum("kb,kb->k", err, err))

        blocks.append(lifts[best])
        symbols.append(modp.reduce(labels[best] + u[z:], p))

    return BlockMessage(np.concatenate(symbols))


def min_distance_estimate(params, max_residues=ORACLE_MAX_RESIDUES):
    """
    Shortest nonzero vector of the decoding lattice p⁻¹{x : pinned rows of F·x = 0} + Zⁿ.

    Integer vectors are lattice points, so the result never exceeds 1.
    """
    rows = pinned_rows(params)
    solutions = _enumerate_congruence(params, rows, np.zeros(len(rows), dtype=np.int64),
                                      max_residues)
    sq = np.einsum("kn,kn->k", solutions, solutions)
    sq = sq[sq > 0]
    shortest = np.sqrt(sq.min()) / params.p if sq.size else np.inf
    return float(min(1.0, shortest))
