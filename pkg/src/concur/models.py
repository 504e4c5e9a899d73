"""Max-stable model specifications, exponent functions, and spectral samplers.

Every model is a frozen dataclass; the union type :data:`ModelSpec` is what
the rest of the package dispatches on.  Two surfaces matter downstream:

* ``exponent_V(model, sites, z)`` -- the exponent function V with
  P{eta(s_j) <= z_j for all j} = exp(-V(z)); homogeneous of order -1.
* ``spectral_sampler(model, sites)`` -- mean-one spectral profiles Y with
  eta(s) = max_i zeta_i Y_i(s), plus an almost-sure bound on sup Y when one
  exists (indicator supports, moving Gaussian maxima, interval processes).

Conventions: unit Frechet margins everywhere.  The interval max-increment
process is normalized per site (values divided by the site coordinate),
which is a monotone marginal transform and therefore leaves hitting
scenarios and concurrence probabilities untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .errors import CapabilityError, DomainError
from .specfun import (
    CovarianceMatrix,
    RngLike,
    as_generator,
    logsumexp,
    normal_cdf,
    psd_factor,
    reg_inc_beta,
    student_cdf,
    unit_ball_volume,
)

_SMITH_BUFFER_SIGMAS = 8.0  # truncated Gaussian mass < 1e-14


# ---------------------------------------------------------------------------
# sites

@dataclass(frozen=True)
class SiteSet:
    """k pairwise-distinct sites in R^d, stored as a (k, d) array."""

    coords: np.ndarray

    def __post_init__(self):
        a = np.array(self.coords, dtype=float, copy=True)
        if a.ndim == 1:
            a = a[:, None]
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise DomainError("sites must form a (k, d) array with k, d >= 1")
        if not np.all(np.isfinite(a)):
            raise DomainError("site coordinates must be finite")
        k = a.shape[0]
        for i in range(k):
            for j in range(i + 1, k):
                if np.array_equal(a[i], a[j]):
                    raise DomainError(f"sites {i} and {j} coincide")
        a.flags.writeable = False
        object.__setattr__(self, "coords", a)

    @property
    def k(self) -> int:
        return self.coords.shape[0]

    @property
    def ndim(self) -> int:
        return self.coords.shape[1]

    def lags_from(self, i: int = 0) -> np.ndarray:
        return self.coords - self.coords[i]

    def distance_matrix(self) -> np.ndarray:
        diff = self.coords[:, None, :] - self.coords[None, :, :]
        return np.sqrt((diff ** 2).sum(axis=-1))


def as_sites(sites) -> SiteSet:
    if isinstance(sites, SiteSet):
        return sites
    return SiteSet(np.asarray(sites, dtype=float))


# ---------------------------------------------------------------------------
# variogram / correlation families

@dataclass(frozen=True)
class FractionalVariogram:
    """gamma(h) = scale * ||h||**exponent with scale > 0, 0 < exponent <= 2."""

    scale: float
    exponent: float

    def __post_init__(self):
        if not self.scale > 0:
            raise DomainError("variogram scale must be positive")
        if not 0 < self.exponent <= 2:
            raise DomainError("variogram exponent must lie in (0, 2]")

    def __call__(self, lags):
        h = np.asarray(lags, dtype=float)
        r = np.abs(h) if h.ndim == 0 else np.sqrt((h * h).sum(axis=-1))
        return self.scale * r ** self.exponent


@dataclass(frozen=True)
class QuadraticVariogram:
    """gamma(h) = h' M h / 2 for PSD M (Gaussian moving-maximum geometry)."""

    matrix: np.ndarray

    def __post_init__(self):
        a = np.array(self.matrix, dtype=float, copy=True)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DomainError("quadratic variogram matrix must be square")
        if not np.array_equal(a, a.T):
            raise DomainError("quadratic variogram matrix must be symmetric")
        psd_factor(a)  # raises NumericError when not PSD
        a.flags.writeable = False
        object.__setattr__(self, "matrix", a)

    def __call__(self, lags):
        h = np.asarray(lags, dtype=float)
        if h.ndim == 0:
            h = h[None]
        if h.shape[-1] != self.matrix.shape[0]:
            raise DomainError("lag dimension does not match variogram matrix")
        return 0.5 * np.einsum("...i,ij,...j->...", h, self.matrix, h)


Variogram = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ExponentialCorrelation:
    """rho(h) = exp(-h / scale), scale > 0, on nonnegative distances."""

    scale: float

    def __post_init__(self):
        if not self.scale > 0:
            raise DomainError("correlation scale must be positive")

    def __call__(self, dist):
        return np.exp(-np.asarray(dist, dtype=float) / self.scale)


@dataclass(frozen=True)
class PoweredExponentialCorrelation:
    """rho(h) = exp(-(h / scale)**power), 0 < power <= 2."""

    scale: float
    power: float

    def __post_init__(self):
        if not self.scale > 0:
            raise DomainError("correlation scale must be positive")
        if not 0 < self.power <= 2:
            raise DomainError("correlation power must lie in (0, 2]")

    def __call__(self, dist):
        return np.exp(-((np.asarray(dist, dtype=float) / self.scale) ** self.power))


Correlation = Callable[[np.ndarray], np.ndarray]


# ---------------------------------------------------------------------------
# model specifications

@dataclass(frozen=True)
class Logistic:
    """Symmetric logistic dependence, alpha in (0, 1]; alpha=1 is independence."""

    alpha: float

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise DomainError(f"logistic alpha must lie in (0, 1], got {self.alpha}")


@dataclass(frozen=True)
class MaxLinear:
    """eta(s_j) = max_m phi[m, j] * Z_m with unit Frechet Z and column sums 1."""

    phi: np.ndarray

    def __post_init__(self):
        a = np.array(self.phi, dtype=float, copy=True)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise DomainError("phi must be a (components, sites) matrix")
        if np.any(a < 0) or not np.all(np.isfinite(a)):
            raise DomainError("phi entries must be finite and nonnegative")
        if np.any(np.abs(a.sum(axis=0) - 1.0) > 1e-12):
            raise DomainError("phi column sums must equal 1 (tolerance 1e-12)")
        a.flags.writeable = False
        object.__setattr__(self, "phi", a)

    @property
    def n_components(self) -> int:
        return self.phi.shape[0]

    @property
    def n_sites(self) -> int:
        return self.phi.shape[1]


@dataclass(frozen=True)
class BrownResnick:
    """Log-Gaussian spectral profiles exp{W(s) - gamma(s)} anchored at the first site."""

    variogram: Variogram


@dataclass(frozen=True)
class ExtremalT:
    """Profiles c_nu * max(0, W(s))**nu for stationary standard Gaussian W.

    nu = 1 is the Schlather model.
    """

    correlation: Correlation
    nu: float = 1.0

    def __post_init__(self):
        if not self.nu >= 1:
            raise DomainError(f"extremal-t nu must be >= 1, got {self.nu}")


def schlather(correlation: Correlation) -> "ExtremalT":
    return ExtremalT(correlation=correlation, nu=1.0)


@dataclass(frozen=True)
class Smith:
    """Gaussian moving-maximum storms: eta(s) = max_i zeta_i * phi_Sigma(s - u_i)."""

    sigma: CovarianceMatrix


@dataclass(frozen=True)
class ExtremalProcess:
    """Stationary independent max-increments on (0, 1], normalized per site."""


@dataclass(frozen=True)
class BallIndicator:
    """Moving indicator of a radius-r ball in R^d (Chentsov-type field)."""

    radius: float
    dim: int = 1

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError("ball radius must be positive")
        if not (isinstance(self.dim, (int, np.integer)) and self.dim >= 1):
            raise DomainError("ball dimension must be a positive integer")


ModelSpec = Union[Logistic, MaxLinear, BrownResnick, ExtremalT, Smith,
                  ExtremalProcess, BallIndicator]


# ---------------------------------------------------------------------------
# site-handling helpers per model

def _max_linear_columns(model: MaxLinear, sites) -> np.ndarray:
    """Max-linear sites are column indices into phi (given as integers)."""
    if isinstance(sites, SiteSet):
        coords = sites.coords
        if coords.shape[1] != 1:
            raise DomainError("max-linear sites are 1-d column indices")
        raw = coords[:, 0]
    else:
        raw = np.asarray(sites, dtype=float).reshape(-1)
    cols = raw.astype(np.int64)
    if np.any(cols != raw):
        raise DomainError("max-linear sites must be integer column indices")
    if np.any(cols < 0) or np.any(cols >= model.n_sites):
        raise DomainError(f"max-linear site index out of range [0, {model.n_sites})")
    if len(set(cols.tolist())) != len(cols):
        raise DomainError("max-linear site indices must be distinct")
    return cols


def _interval_sites(sites) -> np.ndarray:
    """Sites of the max-increment process: strictly increasing, in (0, 1]."""
    s = as_sites(sites)
    if s.ndim != 1:
        raise DomainError("interval max-increment process lives on (0, 1]")
    x = s.coords[:, 0]
    if np.any(x <= 0) or np.any(x > 1):
        raise DomainError("sites must lie in (0, 1]")
    if np.any(np.diff(x) <= 0):
        raise DomainError("sites must be strictly increasing")
    return x


def _pair_lag(sites: SiteSet) -> np.ndarray:
    if sites.k != 2:
        raise CapabilityError("only the bivariate closed form is available for this model")
    return sites.coords[1] - sites.coords[0]


def smith_to_brown_resnick(model: Smith) -> BrownResnick:
    """Equivalent degenerate Brown--Resnick form, gamma(h) = h' Sigma^{-1} h / 2."""
    inv = np.linalg.inv(model.sigma.entries)
    inv = 0.5 * (inv + inv.T)
    return BrownResnick(variogram=QuadraticVariogram(inv))


# ---------------------------------------------------------------------------
# exponent functions

def _V_logistic(alpha: float, z: np.ndarray) -> np.ndarray:
    if alpha == 1.0:
        return (1.0 / z).sum(axis=-1)
    return np.exp(alpha * logsumexp(-np.log(z) / alpha, axis=-1))


def _V_max_linear(phi_cols: np.ndarray, z: np.ndarray) -> np.ndarray:
    ratios = phi_cols / z[..., None, :]
    return ratios.max(axis=-1).sum(axis=-1)


def _V_brown_resnick_pair(gamma_h: float, z: np.ndarray) -> np.ndarray:
    z1, z2 = z[..., 0], z[..., 1]
    if gamma_h < 0:
        raise DomainError("variogram must be nonnegative")
    if gamma_h == 0.0:
        return np.maximum(1.0 / z1, 1.0 / z2)
    a = math.sqrt(2.0 * gamma_h)
    lr = np.log(z2 / z1)
    return normal_cdf(a / 2.0 + lr / a) / z1 + normal_cdf(a / 2.0 - lr / a) / z2


def _V_extremal_t_pair(rho: float, nu: float, z: np.ndarray) -> np.ndarray:
    z1, z2 = z[..., 0], z[..., 1]
    if rho >= 1.0:
        return np.maximum(1.0 / z1, 1.0 / z2)
    if rho <= -1.0:
        return 1.0 / z1 + 1.0 / z2
    sig = math.sqrt((1.0 - rho * rho) / (1.0 + nu))
    r = (z2 / z1) ** (1.0 / nu)
    t1 = student_cdf(-rho / sig + r / sig, nu + 1.0)
    t2 = student_cdf(-rho / sig + 1.0 / (r * sig), nu + 1.0)
    return t1 / z1 + t2 / z2


def _V_extremal_process(s: np.ndarray, z: np.ndarray) -> np.ndarray:
    sz = s * z
    suffix_min = np.minimum.accumulate(sz[..., ::-1], axis=-1)[..., ::-1]
    widths = np.diff(s, prepend=0.0)
    return (widths / suffix_min).sum(axis=-1)


def ball_overlap_fraction(h: float, radius: float, dim: int) -> float:
    """|B cap (h + B)| / |B| for balls of the given radius; 0 beyond 2r."""
    if h < 0:
        raise DomainError("lag must be nonnegative")
    if h >= 2.0 * radius:
        return 0.0
    return float(reg_inc_beta((dim + 1) / 2.0, 0.5, 1.0 - h * h / (4.0 * radius * radius)))


def _V_ball_pair(h: float, radius: float, dim: int, z: np.ndarray) -> np.ndarray:
    q = ball_overlap_fraction(h, radius, dim)
    z1, z2 = z[..., 0], z[..., 1]
    return (1.0 - q) * (1.0 / z1 + 1.0 / z2) + q * np.maximum(1.0 / z1, 1.0 / z2)


def _ball_segments_1d(x: np.ndarray, radius: float):
    """Segments of the union of intervals [x_j - r, x_j + r] with active-site masks."""
    pts = np.unique(np.concatenate([x - radius, x + radius]))
    segments = []
    for lo, hi in zip(pts[:-1], pts[1:]):
        mid = 0.5 * (lo + hi)
        active = np.abs(x - mid) <= radius
        if active.any():
            segments.append((hi - lo, active))
    return segments


def _V_ball_1d(x: np.ndarray, radius: float, z: np.ndarray) -> np.ndarray:
    inv = 1.0 / z
    out = np.zeros(z.shape[:-1])
    for length, active in _ball_segments_1d(x, radius):
        out = out + length * inv[..., active].max(axis=-1)
    return out / (2.0 * radius)


def exponent_V(model: ModelSpec, sites, z):
    """Exponent function: P{eta(s_j) <= z_j, all j} = exp(-V(z)).

    ``z`` is a strictly positive vector of length k, or a batch shaped
    (..., k); the result drops the final axis.  Bivariate-only models
    (Brown--Resnick, extremal-t, Smith in d >= 2 likewise the ball
    indicator beyond d = 1) raise :class:`CapabilityError` for k > 2.
    """
    z = np.asarray(z, dtype=float)
    if z.ndim == 0:
        raise DomainError("z must have at least one site")
    if np.any(z <= 0) or not np.all(np.isfinite(z)):
        raise DomainError("z must be strictly positive and finite")
    k = z.shape[-1]

    if isinstance(model, Logistic):
        _check_k(as_sites(sites).k, k)
        return _scalarize(_V_logistic(model.alpha, z))
    if isinstance(model, MaxLinear):
        cols = _max_linear_columns(model, sites)
        _check_k(len(cols), k)
        return _scalarize(_V_max_linear(model.phi[:, cols], z))
    if isinstance(model, BrownResnick):
        s = as_sites(sites)
        _check_k(s.k, k)
        gamma_h = float(np.asarray(model.variogram(_pair_lag(s))).reshape(()))
        return _scalarize(_V_brown_resnick_pair(gamma_h, z))
    if isinstance(model, Smith):
        s = as_sites(sites)
        _check_k(s.k, k)
        return exponent_V(smith_to_brown_resnick(model), s, z)
    if isinstance(model, ExtremalT):
        s = as_sites(sites)
        _check_k(s.k, k)
        lag = _pair_lag(s)
        rho = float(np.asarray(model.correlation(math.sqrt(float((lag * lag).sum())))).reshape(()))
        if abs(rho) > 1:
            raise DomainError("correlation values must lie in [-1, 1]")
        return _scalarize(_V_extremal_t_pair(rho, model.nu, z))
    if isinstance(model, ExtremalProcess):
        x = _interval_sites(sites)
        _check_k(len(x), k)
        return _scalarize(_V_extremal_process(x, z))
    if isinstance(model, BallIndicator):
        s = as_sites(sites)
        _check_k(s.k, k)
        if s.ndim != model.dim:
            raise DomainError("site dimension does not match the ball dimension")
        if model.dim == 1:
            return _scalarize(_V_ball_1d(s.coords[:, 0], model.radius, z))
        if s.k == 2:
            h = float(np.linalg.norm(s.coords[1] - s.coords[0]))
            return _scalarize(_V_ball_pair(h, model.radius, model.dim, z))
        raise CapabilityError("ball-indicator exponent beyond pairs requires d = 1")
    raise CapabilityError(f"unsupported model {type(model).__name__}")


def _check_k(k_sites: int, k_z: int):
    if k_sites != k_z:
        raise DomainError(f"z has {k_z} entries but there are {k_sites} sites")


def _scalarize(a):
    a = np.asarray(a)
    return float(a) if a.ndim == 0 else a


def extremal_coefficient(model: ModelSpec, sites) -> float:
    """Pairwise extremal coefficient theta = V(1, 1), in [1, 2]."""
    s = as_sites(sites) if not isinstance(model, MaxLinear) else sites
    theta = float(exponent_V(model, s, np.ones(2)))
    return theta


# ---------------------------------------------------------------------------
# spectral samplers (mean-one profiles)

@dataclass(frozen=True)
class SpectralSampler:
    """Vectorized profile sampler: draw(g, n) -> (n, k) mean-one profiles.

    ``bound`` is an almost-sure upper bound on sup_j Y(s_j) when one exists
    (enables exact stopping in the max-stable simulator), else None.
    """

    draw: Callable[[np.random.Generator, int], np.ndarray]
    k: int
    bound: float | None = None


def _logistic_sampler(alpha: float, k: int) -> SpectralSampler:
    if alpha == 1.0:
        def draw(g, n):
            y = np.zeros((n, k))
            y[np.arange(n), g.integers(0, k, size=n)] = float(k)
            return y
        return SpectralSampler(draw, k, bound=float(k))

    c = math.gamma(1.0 - alpha)

    def draw(g, n):
        w = g.standard_exponential((n, k))
        return w ** (-alpha) / c

    return SpectralSampler(draw, k, bound=None)


def _max_linear_sampler(model: MaxLinear, cols: np.ndarray) -> SpectralSampler:
    phi_cols = model.phi[:, cols]
    m = model.n_components
    k = len(cols)

    def draw(g, n):
        idx = g.integers(0, m, size=n)
        return m * phi_cols[idx]

    return SpectralSampler(draw, k, bound=float(m * phi_cols.max()))


def _brown_resnick_sampler(model: BrownResnick, sites: SiteSet) -> SpectralSampler:
    lags = sites.lags_from(0)
    gamma0 = np.asarray(model.variogram(lags), dtype=float)
    if np.any(gamma0 < 0):
        raise DomainError("variogram must be nonnegative")
    k = sites.k
    if k == 1:
        def draw_one(g, n):
            return np.ones((n, 1))
        return SpectralSampler(draw_one, 1, bound=None)
    # increments W(s_j) - W(s_1) for j >= 2; W(s_1) = 0 by anchoring
    g0 = gamma0[1:]
    pair_lags = sites.coords[1:, None, :] - sites.coords[None, 1:, :]
    gamma_pair = np.asarray(model.variogram(pair_lags), dtype=float)
    cov = g0[:, None] + g0[None, :] - gamma_pair
    cov = 0.5 * (cov + cov.T)
    fac = psd_factor(cov)

    def draw(g, n):
        w = np.zeros((n, k))
        w[:, 1:] = g.standard_normal((n, k - 1)) @ fac.T
        return np.exp(w - gamma0)

    return SpectralSampler(draw, k, bound=None)


def extremal_t_weight(nu: float) -> float:
    """c_nu with E[c_nu * max(0, W)**nu] = 1 for standard Gaussian W."""
    return math.sqrt(math.pi) * 2.0 ** (-(nu - 2.0) / 2.0) / math.gamma((nu + 1.0) / 2.0)


def _extremal_t_sampler(model: ExtremalT, sites: SiteSet) -> SpectralSampler:
    corr = np.asarray(model.correlation(sites.distance_matrix()), dtype=float)
    np.fill_diagonal(corr, 1.0)
    if np.any(np.abs(corr) > 1 + 1e-12):
        raise DomainError("correlation values must lie in [-1, 1]")
    fac = psd_factor(corr)
    c = extremal_t_weight(model.nu)
    nu = model.nu
    k = sites.k

    def draw(g, n):
        w = g.standard_normal((n, k)) @ fac.T
        return c * np.maximum(w, 0.0) ** nu

    return SpectralSampler(draw, k, bound=None)


def _smith_sampler(model: Smith, sites: SiteSet) -> SpectralSampler:
    d = model.sigma.dim
    if sites.ndim != d:
        raise DomainError("site dimension does not match Sigma")
    sig = model.sigma.entries
    inv = np.linalg.inv(sig)
    _, logdet = np.linalg.slogdet(sig)
    stds = np.sqrt(np.diag(sig))
    lo = sites.coords.min(axis=0) - _SMITH_BUFFER_SIGMAS * stds
    hi = sites.coords.max(axis=0) + _SMITH_BUFFER_SIGMAS * stds
    vol = float(np.prod(hi - lo))
    lognorm = math.log(vol) - 0.5 * (d * math.log(2.0 * math.pi) + logdet)
    k = sites.k
    coords = sites.coords

    def draw(g, n):
        u = g.uniform(lo, hi, size=(n, d))
        diff = coords[None, :, :] - u[:, None, :]
        quad = np.einsum("nkd,de,nke->nk", diff, inv, diff)
        return np.exp(lognorm - 0.5 * quad)

    return SpectralSampler(draw, k, bound=math.exp(lognorm))


def _extremal_process_sampler(sites) -> SpectralSampler:
    x = _interval_sites(sites)
    k = len(x)

    def draw(g, n):
        u = g.uniform(0.0, 1.0, size=(n, 1))
        return (u <= x[None, :]) / x[None, :]

    return SpectralSampler(draw, k, bound=float(1.0 / x.min()))


def _ball_sampler(model: BallIndicator, sites: SiteSet) -> SpectralSampler:
    if sites.ndim != model.dim:
        raise DomainError("site dimension does not match the ball dimension")
    r = model.radius
    lo = sites.coords.min(axis=0) - r
    hi = sites.coords.max(axis=0) + r
    vol = float(np.prod(hi - lo))
    weight = vol / unit_ball_volume(model.dim, r)
    k = sites.k
    coords = sites.coords
    d = model.dim

    def draw(g, n):
        u = g.uniform(lo, hi, size=(n, d))
        diff = coords[None, :, :] - u[:, None, :]
        hit = (diff ** 2).sum(axis=-1) <= r * r
        return weight * hit

    return SpectralSampler(draw, k, bound=weight)


def spectral_sampler(model: ModelSpec, sites) -> SpectralSampler:
    """Mean-one spectral profile sampler for the model at the given sites."""
    if isinstance(model, Logistic):
        return _logistic_sampler(model.alpha, as_sites(sites).k)
    if isinstance(model, MaxLinear):
        return _max_linear_sampler(model, _max_linear_columns(model, sites))
    if isinstance(model, BrownResnick):
        return _brown_resnick_sampler(model, as_sites(sites))
    if isinstance(model, ExtremalT):
        return _extremal_t_sampler(model, as_sites(sites))
    if isinstance(model, Smith):
        return _smith_sampler(model, as_sites(sites))
    if isinstance(model, ExtremalProcess):
        return _extremal_process_sampler(sites)
    if isinstance(model, BallIndicator):
        return _ball_sampler(model, as_sites(sites))
    raise CapabilityError(f"no spectral sampler for {type(model).__name__}")


def spectral_sample(model: ModelSpec, sites, rng: RngLike, size: int | None = None):
    """Draw spectral profiles Y(s_1..k); shape (k,) or (size, k).

    E[Y(s_j)] = 1 at every site.  For the Brown--Resnick model the profile
    is anchored at the first site (Y(s_1) = 1 almost surely).
    """
    sampler = spectral_sampler(model, sites)
    g = as_generator(rng)
    y = sampler.draw(g, 1 if size is None else int(size))
    return y[0] if size is None else y


def logistic_angular_sampler(alpha: float, k: int) -> SpectralSampler:
    """Bounded spectral representation of the logistic model on the simplex.

    Profiles k * Y / ||Y||_1 under the size-biased law (uniform coordinate
    tilted to Gamma(1 - alpha)); sup of the profile is k, enabling exact
    stopping in the simulator where the heavy-tailed noise representation
    would require astronomically many atoms for alpha near 1.
    """
    if not 0 < alpha <= 1:
        raise DomainError("alpha must lie in (0, 1]")
    if alpha == 1.0:
        return _logistic_sampler(1.0, k)

    def draw(g, n):
        w = g.standard_exponential((n, k))
        w[np.arange(n), g.integers(0, k, size=n)] = g.gamma(1.0 - alpha, size=n)
        y = w ** (-alpha)
        y *= k / y.sum(axis=1, keepdims=True)
        return y

    return SpectralSampler(draw, k, bound=float(k))


# ---------------------------------------------------------------------------
# JSON (de)serialization of model specifications

def model_to_dict(model: ModelSpec) -> dict:
    if isinstance(model, Logistic):
        return {"model": "logistic", "alpha": model.alpha}
    if isinstance(model, MaxLinear):
        return {"model": "max_linear", "phi": model.phi.tolist()}
    if isinstance(model, BrownResnick):
        v = model.variogram
        if isinstance(v, FractionalVariogram):
            vd = {"family": "fractional", "scale": v.scale, "exponent": v.exponent}
        elif isinstance(v, QuadraticVariogram):
            vd = {"family": "quadratic", "matrix": v.matrix.tolist()}
        else:
            raise DomainError("only fractional/quadratic variograms are serializable")
        return {"model": "brown_resnick", "variogram": vd}
    if isinstance(model, ExtremalT):
        c = model.correlation
        if isinstance(c, ExponentialCorrelation):
            cd = {"family": "exponential", "scale": c.scale}
        elif isinstance(c, PoweredExponentialCorrelation):
            cd = {"family": "powered_exponential", "scale": c.scale, "power": c.power}
        else:
            raise DomainError("only exponential-family correlations are serializable")
        return {"model": "extremal_t", "correlation": cd, "nu": model.nu}
    if isinstance(model, Smith):
        return {"model": "smith", "sigma": model.sigma.entries.tolist()}
    if isinstance(model, ExtremalProcess):
        return {"model": "extremal_process"}
    if isinstance(model, BallIndicator):
        return {"model": "ball_indicator", "radius": model.radius, "dim": model.dim}
    raise DomainError(f"unknown model {type(model).__name__}")


def model_from_dict(spec: dict) -> ModelSpec:
    if not isinstance(spec, dict) or "model" not in spec:
        raise DomainError("model spec must be an object with a 'model' field")
    name = spec["model"]
    if name == "logistic":
        return Logistic(alpha=float(spec["alpha"]))
    if name == "max_linear":
        return MaxLinear(phi=np.asarray(spec["phi"], dtype=float))
    if name == "brown_resnick":
        vd = spec["variogram"]
        if vd.get("family") == "fractional":
            vario = FractionalVariogram(scale=float(vd["scale"]), exponent=float(vd["exponent"]))
        elif vd.get("family") == "quadratic":
            vario = QuadraticVariogram(matrix=np.asarray(vd["matrix"], dtype=float))
        else:
            raise DomainError(f"unknown variogram family {vd.get('family')!r}")
        return BrownResnick(variogram=vario)
    if name == "extremal_t":
        cd = spec["correlation"]
        if cd.get("family") == "exponential":
            corr = ExponentialCorrelation(scale=float(cd["scale"]))
        elif cd.get("family") == "powered_exponential":
            corr = PoweredExponentialCorrelation(scale=float(cd["scale"]), power=float(cd["power"]))
        else:
            raise DomainError(f"unknown correlation family {cd.get('family')!r}")
        return ExtremalT(correlation=corr, nu=float(spec.get("nu", 1.0)))
    if name == "smith":
        return Smith(sigma=CovarianceMatrix(np.asarray(spec["sigma"], dtype=float)))
    if name == "extremal_process":
        return ExtremalProcess()
    if name == "ball_indicator":
        return BallIndicator(radius=float(spec["radius"]), dim=int(spec.get("dim", 1)))
    raise DomainError(f"unknown model name {name!r}")
