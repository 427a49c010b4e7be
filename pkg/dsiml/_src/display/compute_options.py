import os


THREADS_ENV_VAR = "DSIML_THREADS"


class _ComputeOptions:
    """Class for setting and tracking the worker budget of data-parallel
    phases (per-user BQP solves, per-user evaluation)."""

    def __init__(self):
        self._cpu_count = os.cpu_count() or 1
        self._n_threads: int | None = None

    def _threads_from_env(self) -> int:
        value = os.environ.get(THREADS_ENV_VAR)
        if value is None:
            return 1
        try:
            n_threads = int(value)
        except ValueError:
            raise ValueError(
                f"Invalid input: {THREADS_ENV_VAR} = {value!r}. Must be an integer."
            )
        if n_threads < 1:
            raise ValueError(f"Invalid input: {THREADS_ENV_VAR} = {value!r}.")
        return n_threads

    def set_n_threads(self, n_threads: int | None):
        """Caps the number of worker threads.

        Parameters
        ----------
        n_threads : int | None
            If None, re-reads the DSIML_THREADS environment variable
            (default 1 when unset).
        """
        if n_threads is None:
            self._n_threads = self._threads_from_env()
            return
        if n_threads < 1:
            raise ValueError(f"Invalid input: n_threads = {n_threads}.")
        self._n_threads = min(n_threads, self._cpu_count)

    @property
    def n_threads(self) -> int:
        # DSIML_THREADS is read on first use, not at import
        if self._n_threads is None:
            self._n_threads = self._threads_from_env()
        return self._n_threads


compute_options = _ComputeOptions()
