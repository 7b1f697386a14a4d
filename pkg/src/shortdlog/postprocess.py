"""Recover ``d`` from a single pair ``(j, k)``.

The pair fixes a target vector close to an unknown lattice vector whose
second coordinate is ``2^tau d``. Babai rounding gives a nearby lattice point
``o = nu1 s1 + nu2 s2``; the vectors

    o + (m1 - round(m2 mu)) s1 + m2 s2,   |m1| <= B1, |m2| <= B2

are then searched with a two-stage meet-in-the-middle over group elements so
that only about ``2^3 c sqrt(B1 (B2 + 1))`` multiplications are spent.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Optional

from .errors import ParameterError
from .group import GroupContext, GroupElement
from .lattice import (LatticeSpec, babai_nearest_plane, enum_bounds, lagrange_reduce,
                      min_balanced_t, target_vector)
from .numutil import round_half_up, round_sqrt_ratio


@dataclass(frozen=True)
class RecoveryParams:
    tau: int
    c: int = 1
    verify_range: bool = True

    def __post_init__(self):
        if self.c < 1:
            raise ParameterError(f"c must be a positive integer, got {self.c}")
        if self.tau < 0:
            raise ParameterError(f"tau must be non-negative, got {self.tau}")


@dataclass
class SearchResult:
    d: Optional[int]
    group_ops: int
    table_entries: int
    n: int
    stage1_ops: int
    stage2_ops: int
    points_tested: int = 0


@dataclass
class RecoveryReport:
    found: bool
    d: Optional[int]
    group_ops_used: int
    table_entries: int
    B1: int
    B2: int
    n: int
    tau: int
    c: int
    tau_good: Optional[bool] = None
    t_balanced_at: Optional[int] = None

    def to_record(self) -> dict:
        rec = {"found": self.found, "ops": str(self.group_ops_used),
               "table": str(self.table_entries), "B1": str(self.B1), "B2": str(self.B2),
               "n": str(self.n), "tau": str(self.tau), "c": str(self.c)}
        if self.found:
            rec["d"] = str(self.d)
        return rec

    def to_json(self) -> str:
        return json.dumps(self.to_record())


def ops_within_bound(ops: int, B1: int, B2: int, c: int) -> bool:
    """``ops <= 2^3 c sqrt(B1 (B2 + 1))``, compared exactly."""
    return ops * ops <= 64 * c * c * B1 * (B2 + 1)


def table_within_bound(entries: int, B1: int, B2: int, c: int) -> bool:
    """``entries <= 2^3 sqrt(B1 (B2 + 1)) / c + 3``, compared exactly."""
    excess = entries - 3
    return excess <= 0 or (excess * c) ** 2 <= 64 * B1 * (B2 + 1)


def stride(B1: int, B2: int, c: int) -> int:
    """``n = c round(sqrt(B1 / (B2 + 1)))``."""
    return c * round_sqrt_ratio(B1, B2 + 1)


def _accept(g: GroupElement, x: GroupElement, cand: int, m: Optional[int]) -> bool:
    if m is not None and not 0 <= cand < (1 << m):
        return False
    # free verification exponentiation, outside the op budget
    return g.ctx.pow(g, cand) == x


def meet_in_the_middle(g: GroupElement, x: GroupElement, nu1: int, nu2: int, B1: int, B2: int,
                       s1: int, s2: int, mu: Fraction, c: int, m: Optional[int] = None) -> SearchResult:
    """Two-stage search for ``d = (nu1 + m1 - round(m2 mu)) s1 + (nu2 + m2) s2``.

    Stage 1 tabulates ``g^(n i s1)`` for ``|i| <= ceil(B1 / n)``; stage 2 walks
    ``g^((nu1 + i - round(+-j mu)) s1 + (nu2 +- j) s2) x^-1`` for ``i < n``,
    ``0 <= j <= B2`` and looks each element up in the table. A hit is accepted
    when its ``m1 = i - k n`` lies in ``[-B1, B1]``, ``g^d = x`` and, if ``m``
    is given, ``0 <= d < 2^m``; otherwise the scan continues.
    """
    if B1 < 1 or not 0 <= B2 < 2 * B1:
        raise ParameterError(f"need B1 >= 1 and 2 B1 > B2 >= 0, got B1={B1}, B2={B2}")
    if c < 1:
        raise ParameterError("c must be positive")
    ctx: GroupContext = g.ctx
    mu = Fraction(mu)
    start_ops = ctx.op_counter
    mul = ctx.mul

    # precomputation (not charged)
    g1 = ctx.pow(g, s1)
    g2 = ctx.pow(g, s2)
    g1i, g2i = ctx.inv(g1), ctx.inv(g2)
    w = mul(mul(ctx.pow(g1, nu1), ctx.pow(g2, nu2), count=False), ctx.inv(x), count=False)
    n = stride(B1, B2, c)
    N1 = -(-B1 // n)
    s = ctx.pow(g1, n)
    si = ctx.inv(s)
    step = {
        (1, 1): mul(g2, g1, count=False), (1, -1): mul(g2, g1i, count=False),
        (-1, 1): mul(g2i, g1, count=False), (-1, -1): mul(g2i, g1i, count=False),
        (1, 0): g2, (-1, 0): g2i,
    }

    # stage 1
    table = {1: [0]}
    entries = 1
    zp, zm = s, si
    i = 1
    while True:
        table.setdefault(zp.residue, []).append(i)
        table.setdefault(zm.residue, []).append(-i)
        entries += 2
        i += 1
        if i > N1:
            break
        zp = mul(zp, s)
        zm = mul(zm, si)
    stage1_ops = ctx.op_counter - start_ops

    # stage 2
    found = None
    tested = 0
    zp, zm = w, w
    jj = 0
    drift_p = drift_m = 0  # round(j mu) and round(-j mu) tracked alongside z+ and z-
    while found is None:
        zpp, zmm = zp, zm
        i = 0
        while True:
            tested += 1 if jj == 0 else 2
            for sign, z, drift in ((1, zpp, drift_p), (-1, zmm, drift_m)):
                if sign < 0 and jj == 0:
                    continue
                hits = table.get(z.residue)
                if hits is None:
                    continue
                for kk in hits:
                    m1 = i - kk * n
                    if abs(m1) > B1:
                        continue
                    cand = (nu1 + m1 - drift) * s1 + (nu2 + sign * jj) * s2
                    if _accept(g, x, cand, m):
                        found = cand
                        break
                if found is not None:
                    break
            if found is not None:
                break
            i += 1
            if i >= n:
                break
            zpp = mul(zpp, g1)
            zmm = mul(zmm, g1)
        if found is not None:
            break
        jj += 1
        if jj > B2:
            break
        new_p = round_half_up(jj * mu)
        new_m = round_half_up(-jj * mu)
        # the s1 exponent moves opposite to the rounded drift
        zp = mul(zp, step[(1, drift_p - new_p)])
        zm = mul(zm, step[(-1, drift_m - new_m)])
        drift_p, drift_m = new_p, new_m

    total = ctx.op_counter - start_ops
    return SearchResult(d=found, group_ops=total, table_entries=entries, n=n,
                        stage1_ops=stage1_ops, stage2_ops=total - stage1_ops, points_tested=tested)


def naive_enumerate(g: GroupElement, x: GroupElement, nu1: int, nu2: int, B1: int, B2: int,
                    s1: int, s2: int, mu: Fraction, m: Optional[int] = None):
    """Test every grid point ``(m1, m2)`` by direct exponentiation (oracle, small grids only).

    Returns ``(d or None, points_visited)``.
    """
    mu = Fraction(mu)
    visited = 0
    found = None
    for m2 in range(-B2, B2 + 1):
        shift = round_half_up(m2 * mu)
        for m1 in range(-B1, B1 + 1):
            visited += 1
            cand = (nu1 + m1 - shift) * s1 + (nu2 + m2) * s2
            if found is None and _accept(g, x, cand, m):
                found = cand
    return found, visited


def bsgs_line(g: GroupElement, x: GroupElement, base_exp: int, step_exp: int, lo: int, hi: int):
    """Baby-step giant-step for ``x = g^(base_exp + a step_exp)`` with ``lo <= a <= hi``.

    Returns every such ``a`` in increasing order (more than one only when
    ``g^step_exp`` has small order). Independent oracle for the single-line case.
    """
    ctx = g.ctx
    width = hi - lo + 1
    if width <= 0:
        return []
    h = ctx.pow(g, step_exp)
    target = ctx.mul(x, ctx.pow(g, -(base_exp + lo * step_exp)), count=False)  # = h^(a - lo)
    size = math.isqrt(width - 1) + 1
    baby = {}
    cur = ctx.identity()
    for b in range(size):
        baby.setdefault(cur.residue, []).append(b)
        cur = ctx.mul(cur, h, count=False)
    giant = ctx.inv(ctx.pow(h, size))
    cur = target
    out = set()
    for a_hi in range(size + 1):
        for b in baby.get(cur.residue, ()):
            a = a_hi * size + b
            if a < width:
                out.add(lo + a)
        cur = ctx.mul(cur, giant, count=False)
    return sorted(out)


def recover_d(g: GroupElement, x: GroupElement, j: int, k: int, m: int, ell: int,
              params: RecoveryParams, d_true: Optional[int] = None) -> RecoveryReport:
    """Recover ``d`` with ``x = g^d`` from one pair ``(j, k)``.

    ``d_true`` is only used to fill the tau-good diagnostic.
    """
    if not 0 <= params.tau <= ell:
        raise ParameterError(f"tau must lie in [0, l] = [0, {ell}], got {params.tau}")
    if not 0 <= j < (1 << (m + ell)):
        raise ParameterError("j must lie in [0, 2^(m+l))")
    if not 0 <= k < (1 << ell):
        raise ParameterError("k must lie in [0, 2^l)")
    tau = params.tau
    basis = lagrange_reduce(LatticeSpec(j=j, tau=tau, m=m, ell=ell))
    v = target_vector(k, m, ell)
    babai = babai_nearest_plane(basis, v)
    B1, B2 = enum_bounds(basis, m, tau)
    s1 = basis.s1[1] >> tau
    s2 = basis.s2[1] >> tau
    res = meet_in_the_middle(g, x, babai.nu1, babai.nu2, B1, B2, s1, s2, basis.mu, params.c,
                             m=m if params.verify_range else None)
    if res.d is not None and g.ctx.pow(g, res.d) != x:
        raise AssertionError("search returned an unverified logarithm")
    tau_good = None
    if d_true is not None:
        from .distribution import alpha_of

        tau_good = abs(alpha_of(d_true, j, k, m, ell)) <= (1 << (m + tau))
    return RecoveryReport(found=res.d is not None, d=res.d, group_ops_used=res.group_ops,
                          table_entries=res.table_entries, B1=B1, B2=B2, n=res.n, tau=tau,
                          c=params.c, tau_good=tau_good, t_balanced_at=min_balanced_t(basis, m))
