"""The rank-2 lattice generated by ``(j, 2^tau)`` and ``(2^(m+l), 0)``.

All decisions are exact: squared norms and determinants are integers, the
Gram-Schmidt coefficient ``mu`` and the Babai residuals are Fractions.
Floats only appear in the ``lambda*`` diagnostic properties.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

from .errors import ParameterError
from .numutil import isqrt_floor_ratio, round_half_up, round_half_up_ratio, signed_residue

Vec = Tuple[int, int]


def _dot(a: Vec, b: Vec) -> int:
    return a[0] * b[0] + a[1] * b[1]


def _sub(a: Vec, b: Vec, q: int = 1) -> Vec:
    return (a[0] - q * b[0], a[1] - q * b[1])


@dataclass(frozen=True)
class LatticeSpec:
    j: int
    tau: int
    m: int
    ell: int

    def __post_init__(self):
        if self.m < 1 or self.ell < 1:
            raise ParameterError("need m >= 1 and l >= 1")
        if not 0 <= self.tau <= self.ell:
            raise ParameterError(f"tau must lie in [0, l], got {self.tau}")
        if not 0 <= self.j < (1 << (self.m + self.ell)):
            raise ParameterError("j must lie in [0, 2^(m+l))")

    @property
    def generators(self) -> Tuple[Vec, Vec]:
        return (self.j, 1 << self.tau), (1 << (self.m + self.ell), 0)

    @property
    def determinant(self) -> int:
        return 1 << (self.m + self.ell + self.tau)


@dataclass(frozen=True)
class ReducedBasis:
    s1: Vec
    s2: Vec
    spec: LatticeSpec

    @property
    def norm1_sq(self) -> int:
        return _dot(self.s1, self.s1)

    @property
    def norm2_sq(self) -> int:
        return _dot(self.s2, self.s2)

    @property
    def det(self) -> int:
        return abs(self.s1[0] * self.s2[1] - self.s1[1] * self.s2[0])

    @property
    def mu(self) -> Fraction:
        return Fraction(_dot(self.s1, self.s2), self.norm1_sq)

    @property
    def lambda2_perp_sq(self) -> Fraction:
        # lambda1 * lambda2_perp = |det|
        return Fraction(self.det ** 2, self.norm1_sq)

    @property
    def lambda1(self) -> float:
        return math.sqrt(self.norm1_sq)

    @property
    def lambda2(self) -> float:
        return math.sqrt(self.norm2_sq)

    @property
    def lambda2_perp(self) -> float:
        return self.det / self.lambda1

    @property
    def lambda2_par(self) -> float:
        return abs(float(self.mu)) * self.lambda1

    def coefficients(self, v: Vec) -> Tuple[int, int]:
        """Integer ``(a, b)`` with ``v = a s1 + b s2``; raises if ``v`` is not in the lattice."""
        D = self.s1[0] * self.s2[1] - self.s1[1] * self.s2[0]
        a_num = v[0] * self.s2[1] - v[1] * self.s2[0]
        b_num = self.s1[0] * v[1] - self.s1[1] * v[0]
        if a_num % D or b_num % D:
            raise ParameterError(f"{v} is not a lattice vector")
        return a_num // D, b_num // D


def _normalize_sign(v: Vec) -> Vec:
    if v[0] < 0 or (v[0] == 0 and v[1] < 0):
        return (-v[0], -v[1])
    return v


def lagrange_reduce_vectors(b1: Vec, b2: Vec) -> Tuple[Vec, Vec]:
    """Lagrange (Gauss) reduction of a 2-D integer basis.

    Returns ``(s1, s2)`` with ``|s1| <= |s2|`` and ``|<s1, s2>| <= |s1|^2 / 2``.
    """
    a, b = b1, b2
    if _dot(a, a) > _dot(b, b):
        a, b = b, a
    if _dot(a, a) == 0:
        raise ParameterError("basis vectors must be non-zero")
    while True:
        q = round_half_up_ratio(_dot(a, b), _dot(a, a))
        b = _sub(b, a, q)
        if _dot(b, b) < _dot(a, a):
            a, b = b, a
        else:
            return a, b


def lagrange_reduce(spec: LatticeSpec) -> ReducedBasis:
    b1, b2 = spec.generators
    s1, s2 = lagrange_reduce_vectors(b1, b2)
    return ReducedBasis(s1=_normalize_sign(s1), s2=s2, spec=spec)


@dataclass(frozen=True)
class BabaiResult:
    o: Vec
    nu1: int
    nu2: int
    delta1: Fraction
    delta2: Fraction


def babai_nearest_plane(basis: ReducedBasis, v: Vec) -> BabaiResult:
    """Nearest-plane rounding of ``v`` onto the lattice.

    ``o - v = delta1 s1 + delta2 s2_perp`` with ``|delta1|, |delta2| <= 1/2``.
    """
    s1, s2 = basis.s1, basis.s2
    n1 = basis.norm1_sq
    # s2_perp scaled by n1 stays integral
    w = (n1 * s2[0] - _dot(s1, s2) * s1[0], n1 * s2[1] - _dot(s1, s2) * s1[1])
    c2_exact = Fraction(n1 * _dot(v, w), _dot(w, w))
    nu2 = round_half_up(c2_exact)
    r = _sub(v, s2, nu2)
    c1_exact = Fraction(_dot(r, s1), n1)
    nu1 = round_half_up(c1_exact)
    o = (nu1 * s1[0] + nu2 * s2[0], nu1 * s1[1] + nu2 * s2[1])
    # with s2 = mu s1 + s2_perp: o - v = (nu1 - c1) s1 + (nu2 - c2) s2_perp
    return BabaiResult(o=o, nu1=nu1, nu2=nu2, delta1=nu1 - c1_exact, delta2=nu2 - c2_exact)


def target_vector(k: int, m: int, ell: int) -> Vec:
    """The known vector ``({-2^m k}_{2^(m+l)}, 0)``."""
    return (signed_residue(-(k << m), 1 << (m + ell)), 0)


def enum_bounds(basis: ReducedBasis, m: int, tau: int) -> Tuple[int, int]:
    """``B1 = floor(2^(m+tau) sqrt2 / lambda1 + 1)``, ``B2 = floor(2^(m+tau) sqrt2 / lambda2_perp + 1/2)``.

    Both floors are taken exactly via integer square roots.
    """
    radius_sq = 1 << (2 * (m + tau) + 1)  # (2^(m+tau) sqrt 2)^2
    n1 = basis.norm1_sq
    B1 = isqrt_floor_ratio(radius_sq, n1) + 1
    # (radius / lambda2_perp)^2 = radius_sq * n1 / det^2
    s = isqrt_floor_ratio(4 * radius_sq * n1, basis.det ** 2)
    B2 = (s + 1) // 2
    return B1, B2


def is_t_balanced(basis: ReducedBasis, m: int, t: int) -> bool:
    """Whether the shortest vector has norm at least ``2^(m - t)``."""
    if t < 0:
        raise ParameterError("t must be non-negative")
    if t >= m:
        return True
    return basis.norm1_sq >= 1 << (2 * (m - t))


def min_balanced_t(basis: ReducedBasis, m: int) -> int:
    """Smallest ``t >= 0`` for which the lattice is t-balanced."""
    n1 = basis.norm1_sq
    # need 2(m - t) <= log2(n1), i.e. t >= m - floor(log2(n1)) / 2
    return max(0, m - (n1.bit_length() - 1) // 2)


def work_parameter(delta: int, tau: int, t: int) -> int:
    """``N = 2^(delta+tau+1) + 2^(tau+t+2) + 2``."""
    return (1 << (delta + tau + 1)) + (1 << (tau + t + 2)) + 2
