"""MAP hyperdimensional-computing algebra and codebooks.

Hypervectors are bipolar numpy arrays (entries in {-1, +1}); bundles are
plain integer arrays (unthresholded sums). Binding is elementwise
multiplication, bundling elementwise addition, permutation a circular
shift, similarity the normalized dot product.

The bipolar/bit correspondence used throughout the quantum side maps
+1 -> 0 and -1 -> 1, under which binding becomes XOR of bit strings.
"""

from __future__ import annotations

import itertools
import struct
from dataclasses import dataclass

import numpy as np

from .rng import stream

__all__ = [
    "CodebookSet",
    "bind",
    "bind_all",
    "bipolar_to_bits",
    "bits_to_bipolar",
    "brute_force_factorize",
    "bundle",
    "gen_codebooks",
    "load_codebooks",
    "pack_bits",
    "permute",
    "save_codebooks",
    "sign_threshold",
    "similarity",
    "unpack_bits",
]

_MAGIC = b"HDQF"
_HEADER = struct.Struct("<4sHHIIQ")  # magic, version, F, N, D, seed
_FORMAT_VERSION = 1


def _check_bipolar(h: np.ndarray, name: str = "hypervector") -> np.ndarray:
    h = np.asarray(h)
    if h.ndim != 1 or h.size < 1:
        raise ValueError(f"{name} must be a nonempty 1-d array")
    if not np.all(np.abs(h) == 1):
        raise ValueError(f"{name} entries must be -1 or +1")
    return h


def _check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")


@dataclass
class CodebookSet:
    """F codebooks of N candidate factor vectors each, dimension D.

    tensor has shape (F, N, D) with bipolar entries; regenerating from
    (seed, F, N, D) reproduces it bit-exactly.
    """

    tensor: np.ndarray
    seed: int

    def __post_init__(self) -> None:
        self.tensor = np.asarray(self.tensor, dtype=np.int8)
        if self.tensor.ndim != 3:
            raise ValueError("codebook tensor must have shape (F, N, D)")
        if not np.all(np.abs(self.tensor) == 1):
            raise ValueError("codebook entries must be -1 or +1")

    @property
    def num_factors(self) -> int:
        return self.tensor.shape[0]

    @property
    def book_size(self) -> int:
        return self.tensor.shape[1]

    @property
    def dim(self) -> int:
        return self.tensor.shape[2]

    def row(self, f: int, i: int) -> np.ndarray:
        return self.tensor[f, i]

    def packed_rows(self) -> np.ndarray:
        """(F, N) array of rows packed as little-endian bit integers."""
        return np.array(
            [[pack_bits(bipolar_to_bits(r)) for r in book] for book in self.tensor],
            dtype=np.uint64,
        )

    def has_distinct_rows(self) -> bool:
        """True when every codebook is duplicate-free."""
        packed = self.packed_rows()
        return all(len(set(book.tolist())) == self.book_size for book in packed)


def gen_codebooks(seed: int, F: int, N: int, D: int) -> CodebookSet:
    """Draw an (F, N, D) codebook tensor i.i.d. uniform over {-1, +1}.

    Duplicate rows within a codebook are permitted; they are simply what
    the random stream produced.
    """
    if F < 1 or N < 1 or D < 1:
        raise ValueError("F, N, D must all be >= 1")
    rng = stream(seed, 0)
    tensor = rng.integers(0, 2, size=(F, N, D), dtype=np.int8) * 2 - 1
    return CodebookSet(tensor=tensor, seed=seed)


def bind(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise product of two bipolar vectors (self-inverse)."""
    a = _check_bipolar(a, "a")
    b = _check_bipolar(b, "b")
    _check_same_dim(a, b)
    return (a * b).astype(np.int8)


def bind_all(indices, books: CodebookSet) -> np.ndarray:
    """Product of the selected codevectors, one per factor."""
    indices = list(indices)
    if len(indices) != books.num_factors:
        raise ValueError(f"expected {books.num_factors} indices, got {len(indices)}")
    for f, i in enumerate(indices):
        if not 0 <= i < books.book_size:
            raise IndexError(f"factor {f}: index {i} out of range [0, {books.book_size})")
    out = books.tensor[0, indices[0]].astype(np.int8)
    for f in range(1, books.num_factors):
        out = out * books.tensor[f, indices[f]]
    return out.astype(np.int8)


def bundle(vs) -> np.ndarray:
    """Elementwise integer sum of bipolar vectors (unthresholded)."""
    vs = list(vs)
    if not vs:
        raise ValueError("bundle of empty list")
    arrs = [_check_bipolar(v) for v in vs]
    for v in arrs[1:]:
        _check_same_dim(arrs[0], v)
    return np.sum(np.stack(arrs).astype(np.int64), axis=0)


def sign_threshold(v: np.ndarray) -> np.ndarray:
    """Sign of an integer vector with ties (zeros) broken to +1."""
    return np.where(np.asarray(v) >= 0, 1, -1).astype(np.int8)


def permute(h: np.ndarray, k: int) -> np.ndarray:
    """Circular shift: result[i] = h[(i - k) mod D]."""
    h = _check_bipolar(h)
    return np.roll(h, k).astype(np.int8)


def similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Normalized dot product in [-1, 1]."""
    a = _check_bipolar(a, "a")
    b = _check_bipolar(b, "b")
    _check_same_dim(a, b)
    return float(np.dot(a.astype(np.int64), b.astype(np.int64))) / a.size


def bipolar_to_bits(h: np.ndarray) -> np.ndarray:
    """Map +1 -> 0 and -1 -> 1; binding corresponds to XOR of bits."""
    h = _check_bipolar(h)
    return (h == -1).astype(np.uint8)


def bits_to_bipolar(bits: np.ndarray) -> np.ndarray:
    bits = np.asarray(bits)
    if not np.all((bits == 0) | (bits == 1)):
        raise ValueError("bit vector entries must be 0 or 1")
    return (1 - 2 * bits.astype(np.int8)).astype(np.int8)


def pack_bits(bits: np.ndarray) -> int:
    """Little-endian packing: bit d carries weight 2**d."""
    bits = np.asarray(bits, dtype=np.uint64)
    return int((bits << np.arange(bits.size, dtype=np.uint64)).sum())


def unpack_bits(value: int, dim: int) -> np.ndarray:
    return ((int(value) >> np.arange(dim)) & 1).astype(np.uint8)


def brute_force_factorize(
    target: np.ndarray, books: CodebookSet, first_hit_only: bool = False
) -> tuple[list[tuple[int, ...]], int]:
    """Exhaustive search for assignments whose product equals the target.

    Enumerates assignments in lexicographic order (last factor fastest).
    Returns (assignments, comparisons) where comparisons counts candidate
    evaluations: the full N**F in oracle mode, or the position of the
    first hit in search mode (first_hit_only=True).
    """
    target = _check_bipolar(target, "target")
    if target.size != books.dim:
        raise ValueError(f"target dimension {target.size} != codebook dimension {books.dim}")
    target_int = pack_bits(bipolar_to_bits(target))
    packed = books.packed_rows().tolist()
    hits: list[tuple[int, ...]] = []
    comparisons = 0
    for assignment in itertools.product(range(books.book_size), repeat=books.num_factors):
        comparisons += 1
        acc = 0
        for f, i in enumerate(assignment):
            acc ^= packed[f][i]
        if acc == target_int:
            hits.append(assignment)
            if first_hit_only:
                break
    return hits, comparisons


def save_codebooks(books: CodebookSet, path) -> None:
    """Write the binary codebook file (bit-packed rows, bit 1 = -1)."""
    header = _HEADER.pack(
        _MAGIC,
        _FORMAT_VERSION,
        books.num_factors,
        books.book_size,
        books.dim,
        books.seed,
    )
    payload = bytearray()
    for f in range(books.num_factors):
        for i in range(books.book_size):
            bits = bipolar_to_bits(books.tensor[f, i])
            payload += np.packbits(bits, bitorder="little").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(bytes(payload))


def load_codebooks(path) -> CodebookSet:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise ValueError("codebook file truncated")
    magic, version, F, N, D, seed = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise ValueError("bad magic: not a codebook file")
    if version != _FORMAT_VERSION:
        raise ValueError(f"unsupported codebook format version {version}")
    row_bytes = (D + 7) // 8
    expected = _HEADER.size + F * N * row_bytes
    if len(raw) != expected:
        raise ValueError(f"codebook payload length {len(raw)} != expected {expected}")
    tensor = np.empty((F, N, D), dtype=np.int8)
    offset = _HEADER.size
    for f in range(F):
        for i in range(N):
            chunk = np.frombuffer(raw, dtype=np.uint8, count=row_bytes, offset=offset)
            bits = np.unpackbits(chunk, bitorder="little")[:D]
            tensor[f, i] = bits_to_bipolar(bits)
            offset += row_bytes
    return CodebookSet(tensor=tensor, seed=seed)
