from pathlib import Path
import numpy as np
from .binary import BinaryCodeMatrix
from .embedding import EmbeddingMatrix
from ..utils.errors import CodeFileError


CODE_MAGIC = b"DSML"
EMBEDDING_MAGIC = b"DSMR"
FORMAT_VERSION = 1

# 20 bytes, no alignment padding
HEADER_DTYPE = np.dtype(
    [("magic", "S4"), ("version", "<u4"), ("rows", "<u8"), ("dim", "<u4")]
)


def _header(magic: bytes, rows: int, dim: int) -> bytes:
    return np.array([(magic, FORMAT_VERSION, rows, dim)], dtype=HEADER_DTYPE).tobytes()


def _read_header(raw: bytes, magic: bytes, path) -> tuple[int, int]:
    if len(raw) < HEADER_DTYPE.itemsize:
        raise CodeFileError(f"{path}: truncated header ({len(raw)} bytes).")
    header = np.frombuffer(raw[: HEADER_DTYPE.itemsize], dtype=HEADER_DTYPE)[0]
    if header["magic"] != magic:
        raise CodeFileError(
            f"{path}: bad magic {bytes(header['magic'])!r}, expected {magic!r}."
        )
    if int(header["version"]) != FORMAT_VERSION:
        raise CodeFileError(
            f"{path}: version {int(header['version'])} is not supported "
            f"(expected {FORMAT_VERSION})."
        )
    rows, dim = int(header["rows"]), int(header["dim"])
    if dim < 1:
        raise CodeFileError(f"{path}: dim must be >= 1, found {dim}.")
    return rows, dim


def _payload(raw: bytes, expected: int, path) -> bytes:
    payload = raw[HEADER_DTYPE.itemsize :]
    if len(payload) < expected:
        raise CodeFileError(
            f"{path}: truncated payload ({len(payload)} of {expected} bytes)."
        )
    if len(payload) > expected:
        raise CodeFileError(
            f"{path}: {len(payload) - expected} trailing byte(s) after payload."
        )
    return payload


def serialize(codes: BinaryCodeMatrix, path: Path | str) -> None:
    """Writes a code matrix in the DSML format: a 20-byte header (magic,
    version, rows, dim; little-endian) followed by rows * ceil(dim / 8)
    LSB-first payload bytes with zero padding."""
    with open(path, "wb") as f:
        f.write(_header(CODE_MAGIC, codes.rows, codes.dim))
        f.write(np.ascontiguousarray(codes.to_bytes()).tobytes())


def deserialize(path: Path | str) -> BinaryCodeMatrix:
    """Reads a DSML code file.

    Raises
    ------
    CodeFileError
        On bad magic, version mismatch, truncation, trailing bytes or
        non-zero padding bits.
    """
    raw = Path(path).read_bytes()
    rows, dim = _read_header(raw, CODE_MAGIC, path)
    n_bytes = (dim + 7) // 8
    payload = _payload(raw, rows * n_bytes, path)
    matrix = np.frombuffer(payload, dtype=np.uint8).reshape(rows, n_bytes)
    if dim % 8 and rows and np.any(matrix[:, -1] >> (dim % 8)):
        raise CodeFileError(f"{path}: non-zero padding bits.")
    return BinaryCodeMatrix.from_bytes(matrix, dim)


def save_embeddings(embeddings: EmbeddingMatrix, path: Path | str) -> None:
    """Writes an embedding matrix in the DSMR format: the DSML header layout
    followed by rows * dim little-endian float64 values, row-major."""
    with open(path, "wb") as f:
        f.write(_header(EMBEDDING_MAGIC, embeddings.rows, embeddings.dim))
        f.write(embeddings.values.astype("<f8").tobytes())


def load_embeddings(path: Path | str) -> EmbeddingMatrix:
    """Reads a DSMR embedding file."""
    raw = Path(path).read_bytes()
    rows, dim = _read_header(raw, EMBEDDING_MAGIC, path)
    payload = _payload(raw, rows * dim * 8, path)
    values = np.frombuffer(payload, dtype="<f8").reshape(rows, dim)
    try:
        return EmbeddingMatrix(values)
    except ValueError as e:
        raise CodeFileError(f"{path}: {e}")
