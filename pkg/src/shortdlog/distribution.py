"""Exact output distribution of the quantum step for a known logarithm ``d``.

A pair ``(j, k)`` yields the argument ``alpha = {d j + 2^m k}_{2^(m+l)}`` and
the angle ``theta = 2 pi alpha / 2^(m+l)``. The probability of a pair depends
on ``alpha`` only, through

    P(theta) = 2^(-2(m+2l)) * sum_e zeta(theta, #b(e))

where ``#b(e)`` is the number of ``b`` in ``[0, 2^l)`` with ``0 <= e + b d < 2^(m+l)``.
Those counts are ``2^l`` for ``2^(m+l) - (2^l - 1) d`` values of ``e`` and
every ``n`` in ``[1, 2^l)`` exactly ``2d`` times, which collapses the sum to
two Dirichlet-kernel terms evaluated here in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ParameterError
from .numutil import signed_residue, signed_residue_real, trigamma

# Float kernels use 2^l as a float; keep well inside the double range.
MAX_ELL = 960

# Power series of y - sin(y) up to y^21 for |y| < 1 (next term < 1e-22).
_Y_MINUS_SIN_COEFFS = [(-1) ** k / math.factorial(2 * k + 1) for k in range(1, 11)]
# 1 - sin(x)/x up to x^20 for |x| < 1.
_ONE_MINUS_SINC_COEFFS = [(-1) ** (k + 1) / math.factorial(2 * k + 1) for k in range(1, 11)]


def _check_params(m: int, ell: int):
    if m < 1 or ell < 1:
        raise ParameterError(f"need m >= 1 and l >= 1, got m={m}, l={ell}")


def alpha_of(d: int, j: int, k: int, m: int, ell: int) -> int:
    """The argument ``{d j + 2^m k}_{2^(m+l)}`` of the pair ``(j, k)``."""
    _check_params(m, ell)
    if not 0 <= j < (1 << (m + ell)):
        raise ParameterError(f"j must lie in [0, 2^(m+l)), got {j}")
    if not 0 <= k < (1 << ell):
        raise ParameterError(f"k must lie in [0, 2^l), got {k}")
    return signed_residue(d * j + (k << m), 1 << (m + ell))


def theta_of(alpha: int, m: int, ell: int) -> float:
    """The angle ``2 pi alpha / 2^(m+l)``; the dyadic ratio is formed exactly first."""
    return 2.0 * math.pi * float(Fraction(alpha, 1 << (m + ell)))


def zeta(theta: float, n: int) -> float:
    """``|sum_{b<n} exp(i theta b)|^2 = sin^2(n theta/2) / sin^2(theta/2)``."""
    if n < 0:
        raise ParameterError("n must be non-negative")
    half = 0.5 * theta
    s = math.sin(half)
    if s == 0.0:
        return float(n * n)
    return (math.sin(n * half) / s) ** 2


def count_b(e: int, d: int, m: int, ell: int) -> int:
    """Number of ``b`` in ``[0, 2^l)`` with ``e + b d`` in ``[0, 2^(m+l))``."""
    top = 1 << (m + ell)
    M = 1 << ell
    if d == 0:
        return M if 0 <= e < top else 0
    lo = max(0, -(e // d))  # ceil(-e / d)
    hi = min(M - 1, (top - 1 - e) // d)
    return max(0, hi - lo + 1)


def _y_minus_sin(y):
    y2 = y * y
    out = np.zeros_like(y)
    power = y * y2
    for c in _Y_MINUS_SIN_COEFFS:
        out = out - c * power
        power = power * y2
    return out


def _one_minus_sinc(x):
    x2 = x * x
    out = np.zeros_like(x)
    power = x2
    for c in _ONE_MINUS_SINC_COEFFS:
        out = out + c * power
        power = power * x2
    return out


def _kernel_terms(u, frac, M: float, ell: int):
    """Normalized ``zeta(theta, 2^l) / 4^l`` and ``sum_{n<2^l} zeta(theta, n) / 8^l``.

    ``u`` is ``alpha / 2^m`` and ``frac`` its signed fractional part
    ``{u}_1``, both supplied as floats computed from exact rationals.
    """
    u = np.asarray(u, dtype=float)
    frac = np.broadcast_to(np.asarray(frac, dtype=float), u.shape)
    full = np.ones_like(u)
    partial = np.full_like(u, (M - 1.0) * (2.0 * M - 1.0) / (6.0 * M * M))
    nz = u != 0.0
    if not np.any(nz):
        return full, partial
    un, fn = u[nz], frac[nz]
    x = math.pi * un / M
    sx = np.sin(x)
    msx = M * sx  # ~ pi u, no overflow for moderate l
    full[nz] = (np.sin(math.pi * fn) / msx) ** 2

    y = (2.0 * M - 1.0) * x
    small = np.abs(y) < 1.0
    num = np.empty_like(un)
    if np.any(small):
        ys, xs = y[small], x[small]
        num[small] = _y_minus_sin(ys) - ys * _one_minus_sinc(xs)
    big = ~small
    if np.any(big):
        # sin(y) = sin(2 pi u - x) = sin(2 pi {u}_1 - x)
        num[big] = (2.0 * M - 1.0) * sx[big] - np.sin(2.0 * math.pi * fn[big] - x[big])
    partial[nz] = num / (4.0 * msx ** 3)
    return full, partial


def _weights(d: int, m: int, ell: int):
    # 1 - (2^l - 1) d / 2^(m+l) and 2 d / 2^m, formed exactly
    a = float(1 - Fraction(((1 << ell) - 1) * d, 1 << (m + ell)))
    b = float(Fraction(2 * d, 1 << m))
    return a, b


def conditional_prob_of_alpha(d: int, m: int, ell: int, alpha) -> float:
    """``2^(m+l) P(theta(alpha))``: the probability of ``k`` given ``j`` for this argument."""
    _check_params(m, ell)
    if ell > MAX_ELL:
        raise ParameterError(f"l > {MAX_ELL} is outside the floating-point kernel range")
    if not 0 <= d < (1 << m):
        raise ParameterError("d must lie in [0, 2^m)")
    half = 1 << (m + ell - 1)
    if not -half <= alpha < half:
        raise ParameterError("alpha outside [-2^(m+l-1), 2^(m+l-1))")
    u = Fraction(alpha, 1 << m)
    frac = signed_residue_real(u, 1)
    full, partial = _kernel_terms(np.array([float(u)]), np.array([float(frac)]), float(1 << ell), ell)
    a, b = _weights(d, m, ell)
    return float(a * full[0] + b * partial[0])


def prob_of_angle(d: int, m: int, ell: int, alpha: int) -> float:
    """``P(theta_d)``: the probability of observing one given pair with argument ``alpha``."""
    return conditional_prob_of_alpha(d, m, ell, alpha) / float(1 << (m + ell))


def prob_of_angle_sum(d: int, m: int, ell: int, alpha: int) -> float:
    """``P(theta_d)`` by summing ``zeta`` over every ``e`` (feasible at toy sizes only)."""
    theta = theta_of(alpha, m, ell)
    total = math.fsum(zeta(theta, count_b(e, d, m, ell))
                      for e in range(-((1 << ell) - 1) * d, 1 << (m + ell)))
    return total / float(1 << (2 * (m + 2 * ell)))


def k0_of_j(d: int, j: int, m: int, ell: int) -> int:
    """The ``k`` for which ``alpha(j, k) = d j mod 2^m``."""
    return (-((d * j) >> m)) % (1 << ell)


def conditional_probs_for_offsets(d: int, j: int, m: int, ell: int, offsets) -> np.ndarray:
    """Probability of ``k = (k0(j) + t) mod 2^l`` given ``j`` for each offset ``t``.

    Offsets must lie in ``[-2^(l-1), 2^(l-1))``, where the argument is exactly
    ``alpha0 + 2^m t`` with ``alpha0 = d j mod 2^m``.
    """
    _check_params(m, ell)
    if ell > MAX_ELL:
        raise ParameterError(f"l > {MAX_ELL} is outside the floating-point kernel range")
    t = np.asarray(offsets, dtype=np.int64)
    half = 1 << (ell - 1)
    if t.size and (t.min() < -half or t.max() >= half):
        raise ParameterError("offsets outside [-2^(l-1), 2^(l-1))")
    alpha0 = (d * j) % (1 << m)
    f0 = Fraction(alpha0, 1 << m)
    u = t.astype(float) + float(f0)
    # near zero the float sum loses the low bits of f0; redo those exactly
    u[t == 0] = float(f0)
    u[t == -1] = float(f0 - 1)
    frac = float(signed_residue_real(f0, 1))
    full, partial = _kernel_terms(u, frac, float(1 << ell), ell)
    a, b = _weights(d, m, ell)
    return a * full + b * partial


@dataclass
class OffsetDistribution:
    j: int
    k0: int
    alpha0: int
    window: int
    offsets: np.ndarray
    probs: np.ndarray
    tail_mass: float

    def entries(self):
        return list(zip(self.offsets.tolist(), self.probs.tolist()))

    def mass_within(self, radius: int) -> float:
        return float(self.probs[np.abs(self.offsets) <= radius].sum())


def offset_distribution(d: int, j: int, m: int, ell: int, window: int) -> OffsetDistribution:
    """Distribution of the offset ``t`` of ``k`` from ``k0(j)`` restricted to ``|t| <= window``."""
    _check_params(m, ell)
    half = 1 << (ell - 1)
    if not 1 <= window <= half:
        raise ParameterError(f"window must lie in [1, 2^(l-1)] = [1, {half}], got {window}")
    offsets = np.arange(-window, min(window, half - 1) + 1, dtype=np.int64)
    probs = conditional_probs_for_offsets(d, j, m, ell, offsets)
    if window == half:
        tail = 0.0
    else:
        tail = max(0.0, 1.0 - math.fsum(probs))
    return OffsetDistribution(j=j, k0=k0_of_j(d, j, m, ell), alpha0=(d * j) % (1 << m),
                              window=window, offsets=offsets, probs=probs, tail_mass=tail)


def is_tau_good(d: int, j: int, k: int, m: int, ell: int, tau: int) -> bool:
    """Whether ``|alpha(j, k)| <= 2^(m + tau)``."""
    if not 0 <= tau <= ell:
        raise ParameterError(f"tau must lie in [0, l], got {tau}")
    return abs(alpha_of(d, j, k, m, ell)) <= (1 << (m + tau))


def min_tau(alpha: int, m: int) -> int:
    """Smallest ``tau >= 0`` with ``|alpha| <= 2^(m + tau)``."""
    a = abs(alpha)
    if a <= (1 << m):
        return 0
    # smallest s with a <= 2^s
    return (a - 1).bit_length() - m


def not_tau_good_mass(d: int, j: int, m: int, ell: int, tau: int) -> float:
    """Exact probability, given ``j``, that the observed ``k`` is not tau-good.

    Enumerates every ``k`` so it is meant for small ``l``.
    """
    half = 1 << (ell - 1)
    offsets = np.arange(-half, half, dtype=np.int64)
    probs = conditional_probs_for_offsets(d, j, m, ell, offsets)
    alpha0 = (d * j) % (1 << m)
    alphas = [alpha0 + (int(t) << m) for t in offsets]
    bad = np.array([abs(a) > (1 << (m + tau)) for a in alphas])
    return float(probs[bad].sum())


def tail_bound(window: int) -> float:
    """Upper bound ``psi'(window)`` on the mass outside ``|t| <= window``."""
    return trigamma(window)
