"""Deterministic special functions and seeded sampling primitives.

All randomness in the package flows through :class:`SeededRng`, a frozen
(seed, stream_id) pair that maps deterministically onto a NumPy
``Generator``.  Substreams are derived by counter mixing, never by
splitting a stream mid-sequence, so replicate-level parallelism gives
results independent of worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import special

from .errors import DomainError, NumericError

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(x: int) -> int:
    x = (x + _GOLDEN) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


@dataclass(frozen=True)
class SeededRng:
    """Reproducible RNG handle: equal (seed, stream_id) give identical draws.

    ``generator()`` builds a fresh ``numpy.random.Generator`` so functions
    taking a SeededRng are pure; pass the Generator itself when a stateful
    stream is wanted inside a loop.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or not 0 <= int(v) <= _MASK64:
                raise DomainError(f"{name} must be an unsigned 64-bit integer, got {v!r}")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=int(self.seed), spawn_key=(int(self.stream_id),))
        return np.random.default_rng(ss)

    def substream(self, counter: int) -> "SeededRng":
        """Independent stream derived from ``counter``; collision odds ~2**-64."""
        if counter < 0:
            raise DomainError("substream counter must be nonnegative")
        mixed = _splitmix64(int(self.stream_id) ^ (((counter + 1) * _GOLDEN) & _MASK64))
        return SeededRng(self.seed, mixed)


RngLike = Union[SeededRng, np.random.Generator]


def as_generator(rng: RngLike) -> np.random.Generator:
    """Accept a SeededRng or a live Generator and return a Generator."""
    if isinstance(rng, SeededRng):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise DomainError(f"expected SeededRng or numpy Generator, got {type(rng).__name__}")


def psd_factor(matrix: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Factor F with F @ F.T == matrix for a PSD matrix.

    Tries Cholesky first; on failure falls back to an eigendecomposition
    with eigenvalues in [-tol*scale, 0] clipped to zero, which keeps exact
    linear degeneracies (rank-deficient covariances) intact instead of
    blurring them with diagonal jitter.
    """
    a = np.asarray(matrix, dtype=float)
    try:
        return np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        pass
    w, v = np.linalg.eigh(a)
    scale = max(1.0, float(np.max(np.abs(w)))) if w.size else 1.0
    if w.size and float(np.min(w)) < -tol * scale:
        raise NumericError("matrix is not positive semidefinite within tolerance")
    return v * np.sqrt(np.clip(w, 0.0, None))


@dataclass(frozen=True)
class CovarianceMatrix:
    """Symmetric positive-semidefinite matrix wrapper with a cached factor."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=float, copy=True)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise DomainError("covariance must be a square matrix")
        if not np.all(np.isfinite(a)):
            raise DomainError("covariance entries must be finite")
        if not np.array_equal(a, a.T):
            raise DomainError("covariance must be exactly symmetric")
        a.flags.writeable = False
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def factor(self) -> np.ndarray:
        return psd_factor(self.entries)


def normal_cdf(x):
    """Standard normal CDF; total function, absolute error well under 1e-12."""
    return special.ndtr(x)


def student_cdf(x, dof: float):
    """Student-t CDF with ``dof`` (> 0, possibly non-integer) degrees of freedom."""
    if not dof > 0:
        raise DomainError(f"degrees of freedom must be positive, got {dof}")
    return special.stdtr(dof, x)


def reg_inc_beta(a: float, b: float, x):
    """Regularized incomplete beta, i.e. the Beta(a, b) CDF at x in [0, 1]."""
    if not (a > 0 and b > 0):
        raise DomainError(f"beta parameters must be positive, got a={a}, b={b}")
    xx = np.asarray(x, dtype=float)
    if np.any(xx < 0) or np.any(xx > 1) or not np.all(np.isfinite(xx)):
        raise DomainError("beta argument must lie in [0, 1]")
    out = special.betainc(a, b, xx)
    return float(out) if np.isscalar(x) or xx.ndim == 0 else out


def sample_positive_stable(alpha: float, rng: RngLike, size=None):
    """Draw S >= 0 with Laplace transform E[exp(-t S)] = exp(-t**alpha).

    Kanter / Chambers--Mallows--Stuck representation for the one-sided
    stable law, 0 < alpha < 1:

        S = [sin((1-a)U)/E]**((1-a)/a) * sin(aU) / sin(U)**(1/a),

    with U ~ Uniform(0, pi) and E ~ Exp(1).
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"stable exponent must lie in (0, 1), got {alpha}")
    g = as_generator(rng)
    shape = () if size is None else size
    u = g.uniform(0.0, np.pi, size=shape)
    e = g.standard_exponential(size=shape)
    s = (np.sin((1.0 - alpha) * u) / e) ** ((1.0 - alpha) / alpha) \
        * np.sin(alpha * u) / np.sin(u) ** (1.0 / alpha)
    return float(s) if size is None else s


def gaussian_vector(cov: CovarianceMatrix, rng: RngLike, size=None):
    """Zero-mean Gaussian draws with the given covariance.

    Returns shape (dim,) for size=None, else (size, dim).  Exact linear
    degeneracies in ``cov`` are reproduced exactly (see :func:`psd_factor`).
    """
    g = as_generator(rng)
    f = cov.factor()
    if size is None:
        return f @ g.standard_normal(cov.dim)
    z = g.standard_normal((int(size), cov.dim))
    return z @ f.T


def log_binom_ratio(d, m: int, n: int):
    """C(d, m-1) / C(n, m) evaluated in log space; exactly 0 when d < m-1.

    ``d`` may be a scalar or an integer array; requires 1 <= m <= n and
    0 <= d <= n-1.
    """
    m = int(m)
    n = int(n)
    if m < 1 or m > n:
        raise DomainError(f"need 1 <= m <= n, got m={m}, n={n}")
    d_arr = np.asarray(d)
    if not np.issubdtype(d_arr.dtype, np.integer):
        if not np.all(d_arr == np.floor(d_arr)):
            raise DomainError("d must be integer-valued")
        d_arr = d_arr.astype(np.int64)
    if np.any(d_arr < 0) or np.any(d_arr > n - 1):
        raise DomainError(f"need 0 <= d <= n-1 = {n - 1}")
    dd = d_arr.astype(float)
    log_den = special.gammaln(n + 1) - special.gammaln(m + 1) - special.gammaln(n - m + 1)
    ok = d_arr >= m - 1
    safe = np.where(ok, dd, float(m - 1))
    log_num = special.gammaln(safe + 1) - special.gammaln(m) - special.gammaln(safe - m + 2)
    out = np.where(ok, np.exp(log_num - log_den), 0.0)
    if np.isscalar(d) or d_arr.ndim == 0:
        return float(out)
    return out


def log_ndtr(x):
    """log of the standard normal CDF (stable far into the left tail)."""
    return special.log_ndtr(x)


def gamma_fn(x):
    """Euler gamma function (re-export for callers avoiding a scipy import)."""
    return special.gamma(x)


def gammaln(x):
    return special.gammaln(x)


def logsumexp(a, axis=None):
    return special.logsumexp(a, axis=axis)


def unit_ball_volume(d: int, radius: float = 1.0) -> float:
    """Volume of the d-dimensional Euclidean ball."""
    if d < 1:
        raise DomainError("dimension must be a positive integer")
    cd = math.pi ** (d / 2.0) / math.gamma(1.0 + d / 2.0)
    return cd * radius ** d
