import numpy as np


SERIES_CUTOFF = 1e-4


def _as_float(value):
    return float(value) if np.ndim(value) == 0 else value


def pi(xi):
    """Curvature of the Jaakkola-Jordan bound, (sigmoid(xi) - 1/2) / (2 xi).

    Evaluated as tanh(xi / 2) / (4 xi), with the series
    1/8 - xi^2/96 + xi^4/960 for |xi| < 1e-4. Even, positive and decreasing
    in |xi|, with limit 1/8 at zero.
    """
    xi = np.asarray(xi, dtype=float)
    small = np.abs(xi) < SERIES_CUTOFF
    safe = np.where(small, 1.0, xi)
    xi2 = xi * xi
    out = np.where(
        small, 0.125 - xi2 / 96.0 + xi2 * xi2 / 960.0, np.tanh(safe / 2) / (4 * safe)
    )
    return _as_float(out)


def jj_offset(xi):
    """Part of the bound that depends on xi only,
    -pi(xi) xi^2 - xi / 2 + softplus(xi)."""
    xi = np.asarray(xi, dtype=float)
    return _as_float(-pi(xi) * xi * xi - xi / 2 + np.logaddexp(0.0, xi))


def jj_bound(t, xi):
    """Quadratic upper bound of softplus(t), tight at xi = +/-t:
    pi(xi) (t^2 - xi^2) + (t - xi) / 2 + softplus(xi).
    """
    t = np.asarray(t, dtype=float)
    xi = np.asarray(xi, dtype=float)
    return _as_float(
        pi(xi) * (t * t - xi * xi) + (t - xi) / 2 + np.logaddexp(0.0, xi)
    )
