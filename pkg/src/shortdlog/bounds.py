"""Success-probability and work bounds for the post-processing, and the tables built from them.

For parameters ``(delta, tau, t)`` the probability of recovering ``d`` from
one run is at least

    max(0, 1 - 2^-tau - 2^-2tau / 2 - 2^-3tau / 6) * max(0, 1 - 2^(delta - 2(t-1) - tau))

with at most ``2^3 c sqrt(N)`` group operations, where
``N = 2^(delta+tau+1) + 2^(tau+t+2) + 2``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

from .errors import ParameterError
from .lattice import work_parameter
from .numutil import round_half_up

Number = Union[int, float, Fraction]

# Reduction factors for RSA moduli: lower bounds on the probability that a
# random generator has large enough order (tabulated constants, not derived).
F_DELTA = {
    20: Fraction("0.999867"),
    9: Fraction("0.9288"),
    10: Fraction("0.95817"),
    13: Fraction("0.99200"),
    17: Fraction("0.999208"),
    21: Fraction("0.9999278"),
}

# The targets used in the published tables, as exact rationals.
STANDARD_TARGETS = [Fraction("0.9"), Fraction("0.95"), Fraction("0.99"), Fraction("0.999")] + [
    1 - Fraction(1, 10 ** e) for e in range(4, 11)
]


def _check_nonneg(**kw):
    for name, v in kw.items():
        if v < 0:
            raise ParameterError(f"{name} must be non-negative, got {v}")


def tau_factor(tau: int) -> Fraction:
    """``max(0, 1 - 2^-tau - 2^-2tau / 2 - 2^-3tau / 6)``: probability mass of tau-good pairs."""
    e = Fraction(1, 1 << tau)
    return max(Fraction(0), 1 - e - e * e / 2 - e ** 3 / 6)


def balance_factor(delta: int, tau: int, t: int) -> Fraction:
    """``max(0, 1 - 2^(delta - 2(t-1) - tau))``: probability the lattice is t-balanced."""
    ex = delta - 2 * (t - 1) - tau
    p = Fraction(1 << ex) if ex >= 0 else Fraction(1, 1 << -ex)
    return max(Fraction(0), 1 - p)


def success_lower_bound(delta: int, tau: int, t: int, exact: bool = False):
    """Lower bound on the single-run success probability (a Fraction if ``exact``)."""
    _check_nonneg(delta=delta, tau=tau, t=t)
    p = tau_factor(tau) * balance_factor(delta, tau, t)
    return p if exact else float(p)


def work_log2(delta: int, tau: int, t: int, c: int = 1) -> float:
    """``3 + log2(c) + log2(N) / 2``."""
    _check_nonneg(delta=delta, tau=tau, t=t)
    if c < 1:
        raise ParameterError("c must be positive")
    return 3 + math.log2(c) + 0.5 * math.log2(work_parameter(delta, tau, t))


def round_up_tenth(x: float) -> float:
    """Round a float up to one decimal."""
    return math.ceil(round(x * 10, 9)) / 10


def work_display(delta: int, tau: int, t: int, c: int = 1) -> float:
    """Work bound rounded up to one decimal, decided exactly.

    ``3 + log2(c) + log2(N)/2 <= k/10`` iff ``(64 c^2 N)^5 <= 2^k``.
    """
    X = (64 * c * c * work_parameter(delta, tau, t)) ** 5
    return ((X - 1).bit_length()) / 10


@dataclass
class BoundRow:
    delta: int
    tau: int
    t: int
    c: int
    success_lb: float
    N: int
    work_log2: float
    table_size_bound: float
    target: Optional[float] = None

    @property
    def work_display(self) -> float:
        return work_display(self.delta, self.tau, self.t, self.c)

    def to_record(self) -> dict:
        rec = asdict(self)
        rec["N"] = str(self.N)
        rec["work_display"] = self.work_display
        return rec


def bound_row(delta: int, tau: int, t: int, c: int = 1, target=None) -> BoundRow:
    N = work_parameter(delta, tau, t)
    return BoundRow(delta=delta, tau=tau, t=t, c=c, success_lb=success_lower_bound(delta, tau, t),
                    N=N, work_log2=work_log2(delta, tau, t, c),
                    table_size_bound=8 * math.sqrt(N) / c + 3,
                    target=None if target is None else float(target))


def parse_target(text) -> Fraction:
    """Parse a probability target: ``0.99``, ``1-1e-10`` or ``1e-10-complement``."""
    if isinstance(text, (Fraction, int)):
        val = Fraction(text)
    elif isinstance(text, float):
        val = Fraction(repr(text))
    else:
        s = str(text).strip().replace(" ", "")
        try:
            if s.endswith("-complement"):
                val = 1 - Fraction(s[: -len("-complement")])
            elif s.startswith("1-"):
                val = 1 - Fraction(s[2:])
            else:
                val = Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParameterError(f"cannot parse target {text!r}") from exc
    if not 0 < val < 1:
        raise ParameterError(f"target must lie in (0, 1), got {text!r}")
    return val


def default_t_max(delta: int) -> int:
    # the balance factor needs t > (delta - tau)/2 + 1, so a fixed cap of 64 cuts off large delta
    return 64 + delta


def optimize_params(delta: int, target, c: int = 1, tau_max: int = 64, t_max: Optional[int] = None,
                    factor=1) -> Optional[Tuple[int, int, BoundRow]]:
    """The ``(tau, t)`` of least work whose bound (times ``factor``) reaches ``target``.

    ``t_max`` defaults to ``64 + delta``. Ties go to the smaller ``tau``, then
    the smaller ``t``. Returns ``None`` when no pair within the limits qualifies.
    """
    if t_max is None:
        t_max = default_t_max(delta)
    _check_nonneg(delta=delta, tau_max=tau_max, t_max=t_max)
    target = parse_target(target)
    factor = Fraction(factor) if not isinstance(factor, float) else Fraction(repr(factor))
    best = None
    for tau in range(tau_max + 1):
        a = tau_factor(tau) * factor
        if a < target:
            continue
        for t in range(t_max + 1):
            if a * balance_factor(delta, tau, t) >= target:
                # N grows in t, so the first qualifying t is the cheapest for this tau
                key = (work_parameter(delta, tau, t), tau, t)
                if best is None or key < best:
                    best = key
                break
    if best is None:
        return None
    _, tau, t = best
    return tau, t, bound_row(delta, tau, t, c, target)


@dataclass
class FfdhRow:
    l: int
    z: int
    m: int
    delta: int
    ops_eh: int
    ops_shor: int
    advantage: Fraction
    bound: BoundRow

    @property
    def advantage_display(self) -> float:
        return round_half_up(self.advantage * 10) / 10


def ffdh_row(l: int, z: int, delta: int, tau: int, t: int, c: int = 1) -> FfdhRow:
    """Quantum operation counts for a ``2z``-bit exponent modulo an ``l``-bit safe prime."""
    m = 2 * z
    if not 0 <= delta < m:
        raise ParameterError(f"delta must lie in [0, m) = [0, {m})")
    ops_eh = 3 * m - 2 * delta  # m + 2l with l = m - delta
    ops_shor = 2 * (l - 1) - delta
    return FfdhRow(l=l, z=z, m=m, delta=delta, ops_eh=ops_eh, ops_shor=ops_shor,
                   advantage=Fraction(ops_shor, ops_eh), bound=bound_row(delta, tau, t, c))


@dataclass
class RsaRow:
    delta: int
    f: Fraction
    target: Fraction
    result: Optional[BoundRow]

    @property
    def feasible(self) -> bool:
        return self.result is not None


def rsa_rows(entries: Iterable[Tuple[int, Number]], targets: Sequence, c: int = 1,
             tau_max: int = 64, t_max: Optional[int] = None) -> List[RsaRow]:
    """Optimize ``(tau, t)`` so that ``f(delta)`` times the bound reaches each target."""
    rows = []
    for delta, f in entries:
        f = Fraction(repr(f)) if isinstance(f, float) else Fraction(f)
        for target in targets:
            tgt = parse_target(target)
            res = optimize_params(delta, tgt, c, tau_max, t_max, factor=f)
            rows.append(RsaRow(delta=delta, f=f, target=tgt, result=None if res is None else res[2]))
    return rows


def default_schedule(m: int) -> Tuple[int, int, int]:
    """``tau = ceil(log2 m)``, ``delta = t = 2``."""
    return max(0, (m - 1).bit_length()), 2, 2


def asymptotic_check(m_list: Sequence[int], schedule: Callable[[int], Tuple[int, int, int]] = default_schedule,
                     c: int = 1, guard_degree: int = 4) -> List[Tuple[int, float]]:
    """Evaluate the bound along ``m`` for ``schedule(m) = (tau, delta, t)``.

    The work stays polynomial in ``m`` only if ``tau`` grows like a logarithm,
    so schedules with ``2^tau > m^guard_degree`` (for ``m >= 2``) are rejected.
    """
    out = []
    for m in m_list:
        tau, delta, t = schedule(m)
        if m >= 2 and tau > guard_degree * math.log2(m):
            raise ParameterError(f"schedule gives tau={tau} at m={m}: work no longer polynomial in m")
        out.append((m, success_lower_bound(delta, tau, t)))
    return out


def format_target(target) -> str:
    target = Fraction(target)
    rest = 1 - target
    if rest.numerator == 1 and rest.denominator >= 10 ** 4:
        e = round(math.log10(rest.denominator))
        if 10 ** e == rest.denominator:
            return f"1-10^-{e}"
    return str(float(target))


def format_table(rows: Sequence[BoundRow]) -> str:
    """Aligned text table of optimized rows."""
    head = f"{'delta':>5} {'tau':>4} {'t':>4} {'target':>10} {'bound':>14} {'work':>7}"
    lines = [head, "-" * len(head)]
    for r in rows:
        tgt = "" if r.target is None else format_target(Fraction(repr(r.target)))
        lines.append(f"{r.delta:>5} {r.tau:>4} {r.t:>4} {tgt:>10} {r.success_lb:>14.12f} "
                     f"{'<= ' + format(r.work_display, '.1f'):>7}")
    return "\n".join(lines)


def format_csv(rows: Sequence[BoundRow]) -> str:
    """CSV with columns ``delta, tau, t, target, bound, work_log2``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["delta", "tau", "t", "target", "bound", "work_log2"])
    for r in rows:
        w.writerow([r.delta, r.tau, r.t, "" if r.target is None else repr(r.target),
                    repr(r.success_lb), f"{r.work_display:.1f}"])
    return buf.getvalue()
