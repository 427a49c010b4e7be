import hashlib
import numpy as np
from ..utils.errors import DimensionMismatchError


WORD_BITS = 64


def _n_words(dim: int) -> int:
    return (dim + WORD_BITS - 1) // WORD_BITS


def _n_bytes(dim: int) -> int:
    return (dim + 7) // 8


class BinaryCodeMatrix:
    """Bit-packed matrix of +/-1 codes, one row per user or item.

    Bit 1 encodes +1 and bit 0 encodes -1. Bits are laid out row-major and
    LSB-first within each byte; each row occupies ceil(dim / 64) little-endian
    uint64 words and all padding bits beyond dim are zero, so xor/popcount over
    whole words is exact.
    """

    def __init__(self, words: np.ndarray, dim: int):
        """Initializes a BinaryCodeMatrix from packed words. Most callers
        should use BinaryCodeMatrix.from_signs instead.

        Parameters
        ----------
        words : np.ndarray ~ (rows, ceil(dim / 64))
            Packed little-endian uint64 words.

        dim : int
            Number of bits per code. Must be >= 1.
        """
        if dim < 1:
            raise ValueError(f"Invalid input: dim = {dim}. Must be >= 1.")
        words = np.ascontiguousarray(words, dtype="<u8")
        if words.ndim != 2 or words.shape[1] != _n_words(dim):
            raise ValueError(
                f"Invalid input: words has shape {words.shape}, expected "
                f"(rows, {_n_words(dim)}) for dim = {dim}."
            )
        tail = dim % WORD_BITS
        if tail and len(words) and np.any(words[:, -1] >> np.uint64(tail)):
            raise ValueError("Padding bits beyond dim must be zero.")
        words.flags.writeable = False
        self._words = words
        self._dim = int(dim)

    @classmethod
    def from_signs(cls, signs: np.ndarray) -> "BinaryCodeMatrix":
        """Packs a (rows, dim) matrix of +/-1 entries. A 1-D input is treated
        as a single row."""
        signs = np.asarray(signs)
        if signs.ndim == 1:
            signs = signs[None, :]
        if signs.ndim != 2 or signs.shape[1] < 1:
            raise ValueError(f"Invalid input: signs has shape {signs.shape}.")
        if not np.all((signs == 1) | (signs == -1)):
            raise ValueError("Invalid input: every entry must be +1 or -1.")
        rows, dim = signs.shape
        packed = np.packbits(signs > 0, axis=1, bitorder="little")
        buffer = np.zeros((rows, _n_words(dim) * 8), dtype=np.uint8)
        buffer[:, : packed.shape[1]] = packed
        return cls(buffer.view("<u8"), dim)

    @classmethod
    def from_bytes(cls, payload: np.ndarray, dim: int) -> "BinaryCodeMatrix":
        """Builds a matrix from (rows, ceil(dim / 8)) LSB-first row bytes."""
        payload = np.asarray(payload, dtype=np.uint8)
        buffer = np.zeros((payload.shape[0], _n_words(dim) * 8), dtype=np.uint8)
        buffer[:, : payload.shape[1]] = payload
        return cls(buffer.view("<u8"), dim)

    # --------------------------------------------------------------------------
    # GETTERS
    # --------------------------------------------------------------------------
    @property
    def rows(self) -> int:
        return self._words.shape[0]

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def words(self) -> np.ndarray:
        """Read-only packed storage ~ (rows, ceil(dim / 64))."""
        return self._words

    def to_bytes(self) -> np.ndarray:
        """Returns the (rows, ceil(dim / 8)) LSB-first row payload."""
        return self._words.view(np.uint8)[:, : _n_bytes(self._dim)]

    def to_signs(self) -> np.ndarray:
        """Returns the codes as an int8 (rows, dim) matrix of +/-1."""
        bits = np.unpackbits(
            self._words.view(np.uint8), axis=1, count=self._dim, bitorder="little"
        )
        return bits.astype(np.int8) * 2 - 1

    def row(self, i: int) -> "BinaryCodeMatrix":
        """Returns row i as a one-row matrix."""
        return BinaryCodeMatrix(self._words[i : i + 1], self._dim)

    def take(self, indices: np.ndarray) -> "BinaryCodeMatrix":
        """Returns the rows at the given indices."""
        return BinaryCodeMatrix(self._words[np.asarray(indices)], self._dim)

    def checksum(self) -> str:
        """Returns a short SHA-256 digest of dim and the packed rows."""
        digest = hashlib.sha256()
        digest.update(np.uint32(self._dim).tobytes())
        digest.update(self.to_bytes().tobytes())
        return digest.hexdigest()[:16]

    def __len__(self) -> int:
        return self.rows

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryCodeMatrix):
            return NotImplemented
        return self._dim == other._dim and np.array_equal(self._words, other._words)

    def __repr__(self) -> str:
        return f"BinaryCodeMatrix(rows={self.rows}, dim={self._dim})"


def _aligned_words(a: BinaryCodeMatrix, b: BinaryCodeMatrix):
    if not isinstance(a, BinaryCodeMatrix) or not isinstance(b, BinaryCodeMatrix):
        raise TypeError("Both operands must be BinaryCodeMatrix instances.")
    if a.dim != b.dim:
        raise DimensionMismatchError(f"Code dimensions differ: {a.dim} vs {b.dim}.")
    if a.rows != b.rows and 1 not in (a.rows, b.rows):
        raise DimensionMismatchError(
            f"Row counts {a.rows} and {b.rows} do not broadcast."
        )
    return a.words, b.words


def hamming_distance(a: BinaryCodeMatrix, b: BinaryCodeMatrix) -> int | np.ndarray:
    """Number of differing bits between aligned rows of a and b. A one-row
    operand broadcasts against the other.

    Returns
    -------
    int | np.ndarray
        A Python int when both operands are single rows, else an int64 array.
    """
    wa, wb = _aligned_words(a, b)
    dist = np.bitwise_count(wa ^ wb).sum(axis=1, dtype=np.int64)
    if a.rows == 1 and b.rows == 1:
        return int(dist[0])
    return dist


def inner_product(a: BinaryCodeMatrix, b: BinaryCodeMatrix) -> int | np.ndarray:
    """Inner product of aligned +/-1 rows, d - 2 * hamming_distance(a, b)."""
    dist = hamming_distance(a, b)
    return a.dim - 2 * dist


def angle(a: BinaryCodeMatrix, b: BinaryCodeMatrix) -> float | np.ndarray:
    """Angle arccos(a^T b / d) between aligned rows, in radians."""
    cos = np.clip(np.asarray(inner_product(a, b), dtype=float) / a.dim, -1.0, 1.0)
    out = np.arccos(cos)
    return float(out) if out.ndim == 0 else out


def sign_quantize(embeddings) -> BinaryCodeMatrix:
    """Entry-wise sign of an EmbeddingMatrix (or array); zero maps to +1."""
    values = getattr(embeddings, "values", embeddings)
    values = np.asarray(values, dtype=float)
    return BinaryCodeMatrix.from_signs(np.where(values >= 0, 1, -1).astype(np.int8))
