"""The stretched-exponential waiting-time law and its closed forms.

Density on (0, inf):

    f(tau) = C * exp(-(a*tau)**nu),    C = a * nu / gamma(1/nu)

Substituting u = (a*tau)**nu turns every integral into a gamma integral,
which gives exact expressions for the normalization, the survival
function, the quantile function and all moments:

    S(t)        = Q(1/nu, (a*t)**nu)          (regularized upper gamma)
    quantile(q) = gammainccinv(1/nu, q)**(1/nu) / a
    <tau**m>    = gamma((m+1)/nu) / (a**m * gamma(1/nu))

For nu = 1/2 these reduce to C = a/2, S(t) = (1+u)*exp(-u) with
u = sqrt(a*t), <tau> = 6/a, <tau^2> = 120/a^2, so the dispersion ratio
<tau^2>/<tau>^2 equals 10/3.  For nu = 1 the law is the plain
exponential with mean 1/a.
"""
from __future__ import annotations

import numpy as np
from scipy import special


def normalization(a: float, nu: float) -> float:
    """Constant C making the density integrate to one."""
    _check(a, nu)
    return a * nu / special.gamma(1.0 / nu)


def pdf(tau, a: float, nu: float):
    """Density C * exp(-(a*tau)**nu) evaluated elementwise."""
    _check(a, nu)
    tau = np.asarray(tau, dtype=float)
    return normalization(a, nu) * np.exp(-np.power(a * tau, nu))


def survival(t, a: float, nu: float):
    """P(tau > t) for the continuous law."""
    _check(a, nu)
    t = np.asarray(t, dtype=float)
    return special.gammaincc(1.0 / nu, np.power(a * t, nu))


def quantile(q, a: float, nu: float):
    """Inverse of the survival function: t such that S(t) = q."""
    _check(a, nu)
    q = np.asarray(q, dtype=float)
    return np.power(special.gammainccinv(1.0 / nu, q), 1.0 / nu) / a


def moment(m: int, a: float, nu: float) -> float:
    """Exact m-th moment of the law."""
    _check(a, nu)
    return special.gamma((m + 1.0) / nu) / (a**m * special.gamma(1.0 / nu))


def dispersion_ratio(nu: float) -> float:
    """<tau^2>/<tau>^2, a function of the shape alone (10/3 at nu=1/2)."""
    _check(1.0, nu)
    g1 = special.gamma(1.0 / nu)
    g2 = special.gamma(2.0 / nu)
    g3 = special.gamma(3.0 / nu)
    return g3 * g1 / (g2 * g2)


def sample(rng: np.random.Generator, size: int, a: float, nu: float) -> np.ndarray:
    """Draw ``size`` gaps by inverse-CDF sampling from uniform variates."""
    return quantile(rng.random(size), a, nu)


def _check(a: float, nu: float) -> None:
    if not a > 0:
        raise ValueError(f"scale a must be positive, got {a}")
    if not 0 < nu <= 2:
        raise ValueError(f"shape nu must lie in (0, 2], got {nu}")
