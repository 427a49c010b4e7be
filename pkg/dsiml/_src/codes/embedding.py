import hashlib
import numpy as np


class EmbeddingMatrix:
    """Real-valued user or item vectors of the continuous model."""

    def __init__(self, values: np.ndarray):
        values = np.array(values, dtype=np.float64)
        if values.ndim == 1:
            values = values[None, :]
        if values.ndim != 2 or values.shape[1] < 1:
            raise ValueError(f"Invalid input: values has shape {values.shape}.")
        if not np.all(np.isfinite(values)):
            raise ValueError("Invalid input: embeddings must be finite.")
        values.flags.writeable = False
        self._values = values

    @classmethod
    def random(
        cls, rows: int, dim: int, scale: float, rng: np.random.Generator
    ) -> "EmbeddingMatrix":
        """Draws entries i.i.d. from N(0, scale^2)."""
        return cls(rng.normal(0.0, scale, size=(rows, dim)))

    @property
    def rows(self) -> int:
        return self._values.shape[0]

    @property
    def dim(self) -> int:
        return self._values.shape[1]

    @property
    def values(self) -> np.ndarray:
        """Read-only (rows, dim) float64 view."""
        return self._values

    def row(self, i: int) -> np.ndarray:
        return self._values[i]

    def checksum(self) -> str:
        digest = hashlib.sha256()
        digest.update(np.asarray(self._values.shape, dtype="<u8").tobytes())
        digest.update(self._values.astype("<f8").tobytes())
        return digest.hexdigest()[:16]

    def __len__(self) -> int:
        return self.rows

    def __eq__(self, other) -> bool:
        if not isinstance(other, EmbeddingMatrix):
            return NotImplemented
        return np.array_equal(self._values, other._values)

    def __repr__(self) -> str:
        return f"EmbeddingMatrix(rows={self.rows}, dim={self.dim})"
