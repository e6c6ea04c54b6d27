"""Carleman-weight-function coefficients of the layer-stripping system.

On interval ``(s_n, s_{n-1}]`` the unknown ``q`` is frozen to ``q_n`` and
``int_s^{s_max} grad q = (s_{n-1} - s) grad q_n + G`` with
``G = h * sum_{j<n} grad q_j``.  Multiplying the integral-differential
equation by ``exp(lam (s - s_{n-1}))`` and averaging over the interval
turns every ``s``-dependent factor into a weighted mean ``<.>``:

    A2 = <2 s>
    A1 = <2 s^2 - 4 s a>                      a = s_{n-1} - s
    I1/I0 = <s^2 a - s a^2>                   (coefficient of the dropped
                                               term 2 (I1/I0) |grad q_n|^2)
    I0 = int exp(lam (s - s_{n-1})) ds

With ``a`` as variable the weight is ``exp(-lam a)`` on ``[0, h]`` and the
means reduce to the truncated exponential moments ``M_k = <a^k>``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import ConfigurationError
from .laplace import PseudoFreqGrid

__all__ = ["CwfCoeffs", "compute_cwf", "cwf_by_quadrature", "truncated_moments"]


@dataclass(frozen=True)
class CwfCoeffs:
    n: int
    A1: float
    A2: float
    I1_over_I0: float
    I0: float
    lam: float
    h: float
    s_prev: float


def truncated_moments(lam: float, h: float, kmax: int = 3) -> np.ndarray:
    """``[<a^0>, ..., <a^kmax>]`` under the weight ``exp(-lam a)`` on ``[0, h]``.

    Uses ``int_0^h a^k e^{-lam a} da = k! lam^{-k-1} P(k+1, lam h)`` with the
    regularised lower incomplete gamma ``P`` (no cancellation for small ``lam h``).
    """
    x = lam * h
    raw = np.array(
        [math.factorial(k) / lam ** (k + 1) * special.gammainc(k + 1, x) for k in range(kmax + 1)]
    )
    return raw / raw[0]


def compute_cwf(n: int, sgrid: PseudoFreqGrid, lam: float) -> CwfCoeffs:
    """Closed-form CWF coefficients for interval ``n``; requires ``lam * h >= 1``."""
    h = sgrid.h
    if lam * h < 1.0 - 1e-12:
        raise ConfigurationError(f"lambda*h = {lam * h:.4g} < 1")
    S = sgrid.s(n - 1)
    _, M1, M2, M3 = truncated_moments(lam, h)
    I0 = -math.expm1(-lam * h) / lam
    A2 = 2.0 * (S - M1)
    A1 = 2.0 * S**2 - 8.0 * S * M1 + 6.0 * M2
    I1 = S**2 * M1 - 3.0 * S * M2 + 2.0 * M3
    return CwfCoeffs(n, A1, A2, I1, I0, lam, h, S)


def cwf_by_quadrature(n: int, sgrid: PseudoFreqGrid, lam: float) -> CwfCoeffs:
    """Same coefficients by adaptive quadrature of the raw ``s``-integrals."""
    lo, S = sgrid.interval(n)

    def mean(g):
        num, _ = integrate.quad(lambda s: g(s) * math.exp(lam * (s - S)), lo, S, epsabs=0, epsrel=1e-13, limit=200)
        return num

    I0 = mean(lambda s: 1.0)
    A2 = mean(lambda s: 2.0 * s) / I0
    A1 = mean(lambda s: 2.0 * s * s - 4.0 * s * (S - s)) / I0
    I1 = mean(lambda s: s * s * (S - s) - s * (S - s) ** 2) / I0
    return CwfCoeffs(n, A1, A2, I1, I0, lam, sgrid.h, S)
