"""Scaled modified Bessel functions and their large-order asymptotics.

The workhorse is the exponentially scaled modified Bessel function of the
first kind,

    ibar(nu, t) = exp(-t) * I_nu(t),

which stays in [0, 1] for every order and argument and therefore survives the
huge arguments produced by the Green-function quadratures.  A log variant is
provided because products of many scaled factors with orders up to ~1e3
underflow in linear space.

Evaluation strategy (three regions, overlap-tested):

* power series, summed entirely in log space, for ``t <= max(crossover, nu)``
  and for the moderate-order gap below;
* the large-argument (Hankel) expansion once ``t`` dominates ``nu**2``;
* the large-order uniform (Debye) expansion otherwise, using the standard
  polynomials ``u_k`` through fifth order.

Also here: the modified Bessel function of the second kind ``K_alpha`` via its
symmetric integral representation (double-exponential quadrature, valid for
all real orders), and the exponent/amplitude pair ``psi`` / ``uniform_l`` of
the large-order scaling form for ``ibar``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import AccuracyError, ConfigError, DomainError
from .quadrature import QuadratureConfig, log_integral_semi_infinite

__all__ = [
    "BesselEvalConfig",
    "DEFAULT_BESSEL_CONFIG",
    "scaled_bessel_i",
    "log_scaled_bessel_i",
    "bessel_k",
    "log_bessel_k",
    "psi",
    "psi_d1",
    "psi_d2",
    "psi_d3",
    "uniform_l",
    "log_uniform_l",
]


@dataclass(frozen=True)
class BesselEvalConfig:
    """Evaluation knobs for the scaled-Bessel routines.

    ``asymptotic_crossover`` is the argument threshold below which the power
    series is always used; the series also covers the moderate-order gap where
    neither asymptotic expansion is accurate yet.
    """

    series_term_cap: int = 50_000
    asymptotic_crossover: float = 30.0
    target_rel_tol: float = 1e-13

    def __post_init__(self):
        if self.series_term_cap < 10:
            raise ConfigError("series_term_cap must be >= 10")
        if not (0.0 < self.target_rel_tol <= 1e-6):
            raise ConfigError("target_rel_tol must lie in (0, 1e-6]")
        if self.asymptotic_crossover <= 0.0:
            raise ConfigError("asymptotic_crossover must be positive")


DEFAULT_BESSEL_CONFIG = BesselEvalConfig()

# Minimum order for the uniform large-order expansion; below this the series
# region is extended (t < nu**2 / 2 stays affordable for nu < 50).
_UNIFORM_MIN_ORDER = 50.0

# Debye polynomials u_k, coefficients highest degree first over one common
# denominator (standard recurrence u_{k+1} = t^2(1-t^2)u_k'/2 +
# int_0^t (1-5s^2) u_k(s) ds / 8).
_DEBYE_U = (
    (np.array([1.0]), 1.0),
    (np.array([-5.0, 0.0, 3.0, 0.0]), 24.0),
    (np.array([385.0, 0.0, -462.0, 0.0, 81.0, 0.0, 0.0]), 1152.0),
    (
        np.array([-425425.0, 0.0, 765765.0, 0.0, -369603.0, 0.0, 30375.0, 0, 0, 0]),
        414720.0,
    ),
    (
        np.array(
            [185910725.0, 0, -446185740.0, 0, 349922430.0, 0, -94121676.0, 0,
             4465125.0, 0, 0, 0, 0]
        ),
        39813120.0,
    ),
    (
        np.array(
            [-188699385875.0, 0, 566098157625.0, 0, -614135872350.0, 0,
             284499769554.0, 0, -49286948607.0, 0, 1519035525.0, 0, 0, 0, 0, 0]
        ),
        6688604160.0,
    ),
)


def psi(t):
    """Exponent of the large-order scaling of the scaled Bessel function.

    ``psi(t) = -t + sqrt(1+t^2) + log(t / (1 + sqrt(1+t^2)))``, evaluated in
    the cancellation-free form ``1/(t + sqrt(1+t^2)) - arcsinh(1/t)``.
    Negative for all t > 0 and tends to 0 from below as t -> infinity.
    """
    t = _check_positive(t, "t")
    return 1.0 / (t + np.sqrt(1.0 + t * t)) - np.arcsinh(1.0 / t)


def psi_d1(t):
    """First derivative of :func:`psi`: ``-1 + sqrt(1 + t^-2)`` (positive)."""
    t = _check_positive(t, "t")
    # expm1/log1p form avoids the cancellation of sqrt(1+s) - 1 for large t.
    return np.expm1(0.5 * np.log1p(t ** -2.0))


def psi_d2(t):
    """Second derivative of :func:`psi` (negative for t > 0)."""
    t = _check_positive(t, "t")
    return -(t ** -3.0) / np.sqrt(1.0 + t ** -2.0)


def psi_d3(t):
    """Third derivative of :func:`psi` (positive for t > 0)."""
    t = _check_positive(t, "t")
    return (2.0 * t ** -6.0 + 3.0 * t ** -4.0) / (1.0 + t ** -2.0) ** 1.5


def log_uniform_l(nu, t):
    """log of the large-order amplitude ``L_nu(t)``.

    Exactly ``nu*psi(t) - log(2*pi*nu)/2 - log(1+t^2)/4``; the scaled Bessel
    function ``ibar(nu, nu*t)`` converges to ``L_nu(t)`` uniformly in t as the
    order grows.
    """
    nu = _check_positive(nu, "nu")
    t = _check_positive(t, "t")
    return nu * psi(t) - 0.5 * np.log(2.0 * np.pi * nu) - 0.25 * np.log1p(t * t)


def uniform_l(nu, t):
    """Linear-space variant of :func:`log_uniform_l`."""
    return np.exp(log_uniform_l(nu, t))


def _check_positive(x, name):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError(f"{name} must be finite")
    if np.any(x <= 0.0):
        raise DomainError(f"{name} must be positive")
    return x


def _series_log_ibar(nu, t, config):
    """Log-space power series for ibar; exact for any (nu, t), cost O(t+nu)."""
    out = np.empty_like(t)
    tmax = float(t.max())
    k_peak = 0.5 * (np.hypot(nu, tmax) - nu)
    n_terms = int(k_peak + 12.0 * np.sqrt(k_peak + 1.0) + 25.0)
    if n_terms > config.series_term_cap:
        raise AccuracyError(
            f"series needs {n_terms} terms, above the cap "
            f"{config.series_term_cap}"
        )
    k = np.arange(n_terms, dtype=float)
    log_fact = gammaln(k + 1.0) + gammaln(k + nu + 1.0)
    # Chunk to keep the (n_terms, len(t)) matrix small.
    chunk = max(1, int(4e6) // n_terms)
    for start in range(0, len(t), chunk):
        ts = t[start : start + chunk]
        log_half_t = np.log(0.5 * ts)
        terms = (2.0 * k[:, None] + nu) * log_half_t[None, :] - log_fact[:, None]
        out[start : start + chunk] = logsumexp(terms, axis=0) - ts
    return out


def _hankel_log_ibar(nu, t):
    """Large-argument expansion; requires t >= max(30, nu^2/2)."""
    s = np.ones_like(t)
    term = np.ones_like(t)
    four_nu2 = 4.0 * nu * nu
    prev = np.inf
    for k in range(1, 64):
        term = -term * (four_nu2 - (2.0 * k - 1.0) ** 2) / (8.0 * k * t)
        mag = float(np.max(np.abs(term)))
        if mag > prev:
            break
        s += term
        prev = mag
        if mag < 1e-17:
            break
    else:
        raise AccuracyError("large-argument Bessel expansion did not converge")
    if np.any(s <= 0.0):
        raise AccuracyError("large-argument Bessel expansion lost accuracy")
    return -0.5 * np.log(2.0 * np.pi * t) + np.log(s)


def _uniform_log_ibar(nu, t):
    """Large-order (Debye) expansion with u_0..u_5; requires nu >= 50."""
    z = t / nu
    p = 1.0 / np.sqrt(1.0 + z * z)
    series = np.zeros_like(t)
    for k, (coeffs, den) in enumerate(_DEBYE_U):
        series += np.polyval(coeffs, p) / (den * nu ** k)
    return (
        nu * psi(z)
        - 0.5 * np.log(2.0 * np.pi * nu)
        - 0.25 * np.log1p(z * z)
        + np.log(series)
    )


def log_scaled_bessel_i(nu, t, config=DEFAULT_BESSEL_CONFIG):
    """log of ``exp(-t) * I_nu(t)`` without overflow or underflow.

    Parameters
    ----------
    nu : float
        Order, >= 0 (integer orders are what the lattice representation
        consumes; real orders are accepted).
    t : float or ndarray
        Argument(s), >= 0.
    config : BesselEvalConfig

    Returns
    -------
    float or ndarray
        ``log(ibar)``; ``-inf`` where the value is exactly zero
        (``t = 0`` with ``nu > 0``).
    """
    if not np.isscalar(nu) or not np.isfinite(nu) or nu < 0:
        raise DomainError("nu must be a finite nonnegative scalar")
    nu = float(nu)
    t_arr = np.asarray(t, dtype=float)
    scalar = t_arr.ndim == 0
    t_arr = np.atleast_1d(t_arr)
    if not np.all(np.isfinite(t_arr)):
        raise DomainError("t must be finite")
    if np.any(t_arr < 0.0):
        raise DomainError("t must be nonnegative")

    out = np.empty_like(t_arr)
    zero = t_arr == 0.0
    out[zero] = 0.0 if nu == 0.0 else -np.inf

    live = ~zero
    tv = t_arr[live]
    res = np.empty_like(tv)
    series_gate = max(config.asymptotic_crossover, nu)
    m_series = tv <= series_gate
    m_hankel = (~m_series) & (tv >= 0.5 * nu * nu)
    if nu >= _UNIFORM_MIN_ORDER:
        m_uniform = ~(m_series | m_hankel)
    else:
        m_uniform = np.zeros_like(m_series)
        m_series = m_series | ~(m_series | m_hankel)
    if np.any(m_series):
        res[m_series] = _series_log_ibar(nu, tv[m_series], config)
    if np.any(m_hankel):
        res[m_hankel] = _hankel_log_ibar(nu, tv[m_hankel])
    if np.any(m_uniform):
        res[m_uniform] = _uniform_log_ibar(nu, tv[m_uniform])
    out[live] = res
    return float(out[0]) if scalar else out


def scaled_bessel_i(nu, t, config=DEFAULT_BESSEL_CONFIG):
    """``exp(-t) * I_nu(t)``, always in [0, 1].

    See :func:`log_scaled_bessel_i` for the evaluation strategy; this is its
    exponential and underflows to 0.0 once the log drops below ~-745.
    """
    return np.exp(log_scaled_bessel_i(nu, t, config))


def log_bessel_k(alpha, z, config=DEFAULT_BESSEL_CONFIG):
    """log of the modified Bessel function of the second kind.

    Uses the symmetric integral
    ``K_alpha(z) = (1/2) (z/2)^alpha  int_0^inf t^(-alpha-1) e^(-t - z^2/4t) dt``
    (valid for every real ``alpha``, with ``K_{-alpha} = K_alpha``), evaluated
    by double-exponential quadrature.  No recurrences are involved, so
    accuracy is uniform in the order.
    """
    if not np.isfinite(alpha):
        raise DomainError("alpha must be finite")
    z = float(z)
    if not np.isfinite(z) or z <= 0.0:
        raise DomainError("z must be positive")
    alpha = float(alpha)
    quarter_z2 = 0.25 * z * z

    def log_f(t):
        return -(alpha + 1.0) * np.log(t) - t - quarter_z2 / t

    qcfg = QuadratureConfig(
        transform="double_exponential",
        rel_tol=min(config.target_rel_tol, 1e-12),
    )
    log_i, _ = log_integral_semi_infinite(log_f, qcfg)
    return np.log(0.5) + alpha * np.log(0.5 * z) + log_i


def bessel_k(alpha, z, config=DEFAULT_BESSEL_CONFIG):
    """Modified Bessel function of the second kind, positive real order/argument.

    Linear-space variant of :func:`log_bessel_k`.
    """
    return np.exp(log_bessel_k(alpha, z, config))
