"""Classical sampling of quantum-step outcomes ``(j, k)`` for a known logarithm.

``j`` is uniform on ``[0, 2^(m+l))``; ``k`` is then drawn given ``j`` by
inverse transform over the offset distribution around ``k0(j)``, truncated
to a window of ``|t| <= W``. Offsets are visited by increasing ``|t|`` and
their probabilities computed lazily, so the cost per draw does not grow with ``W``. Mass outside the window is handled by the
configured tail policy.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .distribution import (OffsetDistribution, conditional_probs_for_offsets, k0_of_j, min_tau,
                           offset_distribution)
from .errors import ParameterError
from .group import ProblemInstance

DEFAULT_WINDOW = 1 << 22
TAIL_POLICIES = ("fail", "uniform-tail")


@dataclass(frozen=True)
class SimulatorConfig:
    window: int = DEFAULT_WINDOW
    tail_policy: str = "fail"
    seed: int = 0

    def __post_init__(self):
        if self.window < 1:
            raise ParameterError("window must be positive")
        if self.tail_policy not in TAIL_POLICIES:
            raise ParameterError(f"tail_policy must be one of {TAIL_POLICIES}, got {self.tail_policy!r}")

    def effective_window(self, ell: int) -> int:
        return min(self.window, 1 << (ell - 1))


@dataclass
class Sample:
    j: int
    k: Optional[int]
    t: Optional[int]
    tau_min: Optional[int]
    tail: bool = False

    def to_record(self, trial: Optional[int] = None) -> dict:
        enc = lambda v: None if v is None else str(v)
        rec = {"j": enc(self.j), "k": enc(self.k), "t": enc(self.t),
               "tau_min": enc(self.tau_min), "tail": self.tail}
        if trial is not None:
            rec = {"trial": str(trial), **rec}
        return rec

    def to_json(self, trial: Optional[int] = None) -> str:
        return json.dumps(self.to_record(trial))


class TailEvent(Exception):
    """Raised internally when the sampled offset falls outside the window under ``fail``."""


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent generator for one trial, keyed by ``(seed, trial)``."""
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(int(trial),)))


def random_bits(rng: np.random.Generator, bits: int) -> int:
    """Uniform integer on ``[0, 2^bits)`` of arbitrary size."""
    if bits <= 0:
        return 0
    nbytes = (bits + 7) // 8
    return int.from_bytes(rng.bytes(nbytes), "little") >> (8 * nbytes - bits)


def random_below(rng: np.random.Generator, n: int) -> int:
    """Uniform integer on ``[0, n)`` by rejection."""
    if n <= 0:
        raise ParameterError("upper bound must be positive")
    bits = (n - 1).bit_length()
    while True:
        v = random_bits(rng, bits)
        if v < n:
            return v


def sample_j(m: int, ell: int, rng: np.random.Generator) -> int:
    return random_bits(rng, m + ell)


def _require_secret(instance: ProblemInstance):
    if instance.d is None:
        raise ParameterError("simulation requires an instance with a known logarithm d")
    if instance.is_short is False:
        raise ParameterError("instance violates the shortness condition r >= 2^(m+l) + (2^l - 1) d")


def draw_offset(dist: OffsetDistribution, rng: np.random.Generator, size=None):
    """Inverse-transform draw(s) from ``dist``; tail draws come back as ``None``.

    With ``size`` given, returns an int64 array where tail draws are marked by
    the sentinel ``np.iinfo(np.int64).min``.
    """
    cdf = np.cumsum(dist.probs)
    total = cdf[-1]
    u = rng.random(size)
    if dist.tail_mass == 0.0:
        # window covers the support; absorb float rounding of the total
        u = u * total
    idx = np.searchsorted(cdf, u, side="right")
    if size is None:
        if idx >= len(cdf):
            return None
        return int(dist.offsets[idx])
    out = np.full(np.shape(u), np.iinfo(np.int64).min, dtype=np.int64)
    inside = idx < len(cdf)
    out[inside] = dist.offsets[idx[inside]]
    return out


FIRST_CHUNK = 64


def offsets_by_radius(r_lo: int, r_hi: int, top: int) -> np.ndarray:
    """Offsets with ``r_lo <= |t| <= r_hi`` in the order ``-r, +r`` by increasing ``r``.

    Positive offsets above ``top`` are left out.
    """
    rs = np.arange(max(r_lo, 1), r_hi + 1, dtype=np.int64)
    pair = np.stack([-rs, rs], axis=1).ravel()
    pair = pair[pair <= top]
    if r_lo == 0:
        pair = np.concatenate([np.zeros(1, dtype=np.int64), pair])
    return pair


def draw_offset_lazy(d: int, j: int, m: int, ell: int, window: int, rng: np.random.Generator):
    """Inverse-transform draw of the offset, walking outwards from ``t = 0``.

    Offsets are ordered by ``|t|`` and their probabilities computed in doubling
    chunks only as far as the uniform variate requires, so a typical draw
    touches a few dozen offsets even for a large window. Returns ``None`` for
    a draw beyond the window.
    """
    half = 1 << (ell - 1)
    top = min(window, half - 1)
    u = rng.random()
    for attempt in range(2):
        cum = 0.0
        r_lo, r_hi = 0, min(FIRST_CHUNK, window)
        while r_lo <= window:
            offs = offsets_by_radius(r_lo, r_hi, top)
            probs = conditional_probs_for_offsets(d, j, m, ell, offs)
            cdf = cum + np.cumsum(probs)
            idx = int(np.searchsorted(cdf, u, side="right"))
            if idx < len(cdf):
                return int(offs[idx])
            cum = float(cdf[-1]) if len(cdf) else cum
            r_lo, r_hi = r_hi + 1, min(2 * r_hi + 1, window)
        if window < half:
            return None
        # the window is the whole support: absorb float rounding of the total
        u *= cum
    return top


def _uniform_tail_offset(ell: int, window: int, rng: np.random.Generator) -> int:
    half = 1 << (ell - 1)
    left = half - window          # t in [-half, -window)
    right = half - 1 - window     # t in (window, half)
    pick = random_below(rng, left + right)
    if pick < left:
        return -half + pick
    return window + 1 + (pick - left)


def sample_k_given_j(instance: ProblemInstance, j: int, config: SimulatorConfig,
                     rng: np.random.Generator, dist: Optional[OffsetDistribution] = None):
    """Draw ``k`` given ``j``; returns ``(k, t)`` or raises :class:`TailEvent`."""
    _require_secret(instance)
    m, ell, d = instance.m, instance.ell, instance.d
    window = config.effective_window(ell)
    if dist is None:
        t = draw_offset_lazy(d, j, m, ell, window, rng)
        k0 = k0_of_j(d, j, m, ell)
    else:
        t = draw_offset(dist, rng)
        k0, window = dist.k0, dist.window
    if t is None:
        if config.tail_policy == "fail":
            raise TailEvent(j)
        t = _uniform_tail_offset(ell, window, rng)
    k = (k0 + t) % (1 << ell)
    return k, t


def sample_pair(instance: ProblemInstance, config: SimulatorConfig, rng: np.random.Generator) -> Sample:
    """One simulated run: ``j`` uniform, then ``k`` given ``j``, with diagnostics."""
    _require_secret(instance)
    m, ell, d = instance.m, instance.ell, instance.d
    j = sample_j(m, ell, rng)
    window = config.effective_window(ell)
    try:
        k, t = sample_k_given_j(instance, j, config, rng)
    except TailEvent:
        return Sample(j=j, k=None, t=None, tau_min=None, tail=True)
    alpha = (d * j) % (1 << m) + (t << m)
    tail = abs(t) > window
    return Sample(j=j, k=k, t=t, tau_min=min_tau(alpha, m), tail=tail)


def sample_stream(instance: ProblemInstance, config: SimulatorConfig, n: int, start: int = 0):
    """Samples for trials ``start .. start + n - 1``; each trial has its own keyed stream."""
    for trial in range(start, start + n):
        yield trial, sample_pair(instance, config, trial_rng(config.seed, trial))
