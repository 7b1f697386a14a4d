"""Exact integer and real helpers: signed residues, tie-broken rounding, trigamma."""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from .errors import ParameterError

# Below this argument the trigamma series is shifted up by recurrence before
# the asymptotic expansion is applied. At y >= 20 the first omitted term is
# 5/(66 y^11), i.e. relative error < 1e-14.
_TRIGAMMA_SHIFT = 20.0

# Bernoulli-number coefficients of the asymptotic expansion beyond 1/y + 1/(2y^2):
# B_{2k} / y^{2k+1} for k = 1..4.
_TRIGAMMA_TAIL = (1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0)


def signed_residue(u: int, n: int) -> int:
    """Return ``u`` reduced modulo ``n`` into ``[-n/2, n/2)``.

    Works on arbitrary-precision integers.

    >>> signed_residue(5, 8)
    -3
    >>> signed_residue(4, 8)
    -4
    """
    if n <= 0:
        raise ParameterError(f"modulus must be positive, got {n}")
    r = u % n
    # r in [0, n); values with 2r >= n wrap to the negative half
    if 2 * r >= n:
        r -= n
    return r


def signed_residue_real(u, n=1):
    """Real/rational variant of :func:`signed_residue`.

    Rationals (``int`` or ``Fraction``) are reduced exactly; floats fall back
    to floating point.
    """
    if n <= 0:
        raise ParameterError(f"modulus must be positive, got {n}")
    if isinstance(u, Rational) and isinstance(n, Rational):
        u = Fraction(u)
        r = u - n * math.floor(u / n)
        if 2 * r >= n:
            r -= n
        return r
    r = math.fmod(float(u), float(n))
    if r < 0:
        r += n
    if 2 * r >= n:
        r -= n
    return r


def round_half_up(u) -> int:
    """Round to the closest integer, ties toward +infinity.

    Defined as ``u - {u}_1``; for rationals this is ``floor(u + 1/2)`` and is
    computed exactly.
    """
    if isinstance(u, int):
        return u
    # floats convert to Fraction exactly, so 0.49999999999999994 stays below the tie
    u = Fraction(u)
    return (2 * u.numerator + u.denominator) // (2 * u.denominator)


def round_half_up_ratio(num: int, den: int) -> int:
    """``round_half_up(num / den)`` for integers, without building a Fraction."""
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    if den < 0:
        num, den = -num, -den
    return (2 * num + den) // (2 * den)


def trigamma(x: float) -> float:
    """The trigamma function ``psi'(x) = sum_{k>=0} 1/(x+k)^2`` for ``x > 0``.

    Small arguments are shifted by the recurrence ``psi'(x) = 1/x^2 + psi'(x+1)``
    until the asymptotic expansion is accurate to well below 1e-12.
    """
    x = float(x)
    if not x > 0 or math.isinf(x):
        raise ParameterError(f"trigamma requires finite x > 0, got {x}")
    head = 0.0
    y = x
    if y < _TRIGAMMA_SHIFT:
        k = math.ceil(_TRIGAMMA_SHIFT - y)
        # sum smallest terms first
        head = math.fsum(1.0 / (x + i) ** 2 for i in reversed(range(k)))
        y = x + k
    inv = 1.0 / y
    inv2 = inv * inv
    tail = inv + 0.5 * inv2
    power = inv * inv2
    for coeff in _TRIGAMMA_TAIL:
        tail += coeff * power
        power *= inv2
    return head + tail


def trigamma_upper_bound(x: float) -> float:
    """Polynomial upper bound ``1/x + 1/(2x^2) + 1/(6x^3)`` on ``psi'(x)``."""
    x = float(x)
    if not x > 0:
        raise ParameterError(f"x must be positive, got {x}")
    return 1.0 / x + 1.0 / (2.0 * x * x) + 1.0 / (6.0 * x ** 3)


def isqrt_floor_ratio(num: int, den: int) -> int:
    """``floor(sqrt(num / den))`` for non-negative integers, exactly."""
    if num < 0 or den <= 0:
        raise ParameterError("isqrt_floor_ratio needs num >= 0 and den > 0")
    return math.isqrt(num // den)


def round_sqrt_ratio(num: int, den: int) -> int:
    """``floor(sqrt(num / den) + 1/2)`` computed exactly.

    The largest ``n`` with ``(2n - 1)^2 <= 4 num / den`` is ``(s + 1) // 2``
    where ``s = floor(sqrt(4 num / den))``.
    """
    s = isqrt_floor_ratio(4 * num, den)
    return (s + 1) // 2
