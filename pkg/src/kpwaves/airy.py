"""Airy function and the transverse Green's kernel of the linear KP flow.

``airy_eval`` combines the convergent power series around the origin with
the two asymptotic expansions (decaying for x -> +inf, oscillatory for
x -> -inf). The switch points were picked where series and expansion agree to
better than 1e-8 relative; the positive side switches earlier than the
negative one because the series cancels catastrophically against the
exponentially small value of Ai there.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "SERIES_MIN",
    "SERIES_MAX",
    "airy_series",
    "airy_asymptotic",
    "airy_eval",
    "tail_kernel",
]

#: series used on SERIES_MIN < x < SERIES_MAX, asymptotics outside
SERIES_MIN = -8.0
SERIES_MAX = 5.5

_CBRT3 = 3.0 ** (1.0 / 3.0)
_SERIES_PREFACTOR = 1.0 / (3.0 ** (2.0 / 3.0) * math.pi)


def airy_series(x: float, max_terms: int = 400) -> float:
    """Power series ``sum Gamma((n+1)/3)/n! (3^(1/3) x)^n sin(2(n+1)pi/3)``."""
    x = float(x)
    if x == 0.0:
        return _SERIES_PREFACTOR * math.gamma(1.0 / 3.0) * math.sin(2 * math.pi / 3)
    log_z = math.log(_CBRT3 * abs(x))
    sign_x = -1.0 if x < 0 else 1.0
    total = 0.0
    peak = 0.0
    for n in range(max_terms):
        r = (n + 1) % 3
        if r == 0:
            continue
        # sin(2(n+1)pi/3) is +sqrt(3)/2 for (n+1) = 1 mod 3 and -sqrt(3)/2 for 2 mod 3
        s = math.sqrt(3.0) / 2.0 if r == 1 else -math.sqrt(3.0) / 2.0
        mag = math.exp(math.lgamma((n + 1) / 3.0) - math.lgamma(n + 1.0) + n * log_z)
        term = s * mag * sign_x**n
        total += term
        peak = max(peak, mag)
        if n > 3 and mag < 1e-18 * max(abs(total), 1e-300) and mag < peak:
            break
    return _SERIES_PREFACTOR * total


def _u_coefficients(n: int) -> list[float]:
    u = [1.0]
    for k in range(1, n):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / (216.0 * k * (2 * k - 1)))
    return u


_U = _u_coefficients(60)


def _optimal_sum(terms):
    # sum an asymptotic series up to (not including) its smallest term
    total = 0.0
    prev = math.inf
    for t in terms:
        if abs(t) >= prev:
            break
        total += t
        prev = abs(t)
    return total


def airy_asymptotic(x: float, terms: int | None = None) -> float:
    """Asymptotic expansion of Ai for large |x|.

    ``terms=1`` gives the leading-order formulas
    ``exp(-2/3 x^(3/2)) / (2 sqrt(pi) x^(1/4))`` for x > 0 and
    ``cos(2/3 |x|^(3/2) - pi/4) / (sqrt(pi) |x|^(1/4))`` for x < 0.
    ``terms=None`` truncates the series optimally.
    """
    x = float(x)
    if x == 0.0:
        raise ValueError("asymptotic expansion is undefined at x = 0")
    n = len(_U) if terms is None else terms
    z = abs(x)
    zeta = 2.0 / 3.0 * z**1.5
    if x > 0:
        series = [(-1) ** k * _U[k] / zeta**k for k in range(n)]
        s = _optimal_sum(series) if terms is None else sum(series)
        return math.exp(-zeta) / (2.0 * math.sqrt(math.pi) * z**0.25) * s
    even = [(-1) ** k * _U[2 * k] / zeta ** (2 * k) for k in range((n + 1) // 2)]
    odd = [(-1) ** k * _U[2 * k + 1] / zeta ** (2 * k + 1) for k in range(n // 2)]
    if terms is None:
        p, q = _optimal_sum(even), _optimal_sum(odd)
    else:
        p, q = sum(even), sum(odd)
    phase = zeta - math.pi / 4.0
    return (math.cos(phase) * p + math.sin(phase) * q) / (math.sqrt(math.pi) * z**0.25)


def _airy_scalar(x: float) -> float:
    if SERIES_MIN < x < SERIES_MAX:
        return airy_series(x)
    return airy_asymptotic(x)


def airy_eval(x):
    """Ai(x) for a scalar or array argument, about 1e-9 relative accuracy."""
    if np.ndim(x) == 0:
        return _airy_scalar(float(x))
    arr = np.asarray(x, dtype=float)
    return np.array([_airy_scalar(v) for v in arr.ravel()]).reshape(arr.shape)


def tail_kernel(t: float, x, y, lam: int):
    """Inverse transform of ``exp(-i t lam ky^2 / kx)`` for t > 0.

    ``4 sqrt(t) / (4 x t + lam y^2)^(3/2)`` inside the cone
    ``4 x t + lam y^2 > 0`` and 0 outside.
    """
    if not t > 0:
        raise ValueError(f"tail kernel is only defined for t > 0, got t={t!r}")
    if lam not in (-1, 1):
        raise ValueError(f"lambda must be +1 or -1, got {lam!r}")
    s = 4.0 * np.asarray(x, dtype=float) * t + lam * np.asarray(y, dtype=float) ** 2
    if s.ndim == 0:
        return 4.0 * math.sqrt(t) / float(s) ** 1.5 if s > 0 else 0.0
    out = np.zeros(s.shape)
    inside = s > 0
    out[inside] = 4.0 * math.sqrt(t) / s[inside] ** 1.5
    return out
