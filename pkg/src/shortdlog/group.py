"""Arithmetic in Z_N^* with an operation counter, and problem-instance generation.

Only multiplications issued through :meth:`GroupContext.mul` with counting
enabled are charged to ``op_counter``; exponentiation and inversion are
treated as classical precomputation and are free.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Optional

from .errors import NontrivialGcdError, ParameterError, ReductionFailure

_SMALL_PRIMES = [p for p in range(3, 10_000, 2) if all(p % q for q in range(3, math.isqrt(p) + 1, 2))]
_SMALL_PRIME_SET = frozenset(_SMALL_PRIMES)
_SMALL_PRIMORIAL = math.prod(_SMALL_PRIMES)
MILLER_RABIN_ROUNDS = 64


class GroupContext:
    """The group Z_N^* for an odd modulus ``N >= 3``."""

    def __init__(self, modulus: int):
        modulus = int(modulus)
        if modulus < 3 or modulus % 2 == 0:
            raise ParameterError(f"modulus must be odd and >= 3, got {modulus}")
        self.modulus = modulus
        self.op_counter = 0

    def __repr__(self):
        return f"GroupContext(N={self.modulus}, ops={self.op_counter})"

    def element(self, residue: int) -> "GroupElement":
        residue = int(residue) % self.modulus
        g = math.gcd(residue, self.modulus)
        if g != 1:
            raise NontrivialGcdError(residue, self.modulus, g)
        return GroupElement(residue, self)

    def identity(self) -> "GroupElement":
        return GroupElement(1, self)

    def _check(self, *elems):
        for e in elems:
            if e.ctx is not self and e.ctx.modulus != self.modulus:
                raise ParameterError("group elements belong to different contexts")

    def mul(self, a: "GroupElement", b: "GroupElement", count: bool = True) -> "GroupElement":
        self._check(a, b)
        if count:
            self.op_counter += 1
        return GroupElement(a.residue * b.residue % self.modulus, self)

    def inv(self, a: "GroupElement") -> "GroupElement":
        self._check(a)
        g = math.gcd(a.residue, self.modulus)
        if g != 1:
            raise NontrivialGcdError(a.residue, self.modulus, g)
        return GroupElement(pow(a.residue, -1, self.modulus), self)

    def pow(self, a: "GroupElement", e: int) -> "GroupElement":
        self._check(a)
        e = int(e)
        if e < 0:
            return GroupElement(pow(self.inv(a).residue, -e, self.modulus), self)
        return GroupElement(pow(a.residue, e, self.modulus), self)

    def reset_counter(self) -> int:
        used, self.op_counter = self.op_counter, 0
        return used


@dataclass(frozen=True, eq=False)
class GroupElement:
    residue: int
    ctx: GroupContext = field(repr=False)

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.residue == other.residue and self.ctx.modulus == other.ctx.modulus

    def __hash__(self):
        return hash(self.residue)

    def __mul__(self, other):
        return self.ctx.mul(self, other)

    def __pow__(self, e):
        return self.ctx.pow(self, e)

    def inverse(self):
        return self.ctx.inv(self)


def mul(a: GroupElement, b: GroupElement) -> GroupElement:
    return a.ctx.mul(a, b)


def inv(a: GroupElement) -> GroupElement:
    return a.ctx.inv(a)


def gpow(a: GroupElement, e: int) -> GroupElement:
    return a.ctx.pow(a, e)


# -- primality ---------------------------------------------------------------

def is_probable_prime(n: int, rounds: int = MILLER_RABIN_ROUNDS, rng: Optional[random.Random] = None) -> bool:
    """Trial division below 10^4 followed by ``rounds`` Miller-Rabin rounds."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    if n < 10_000:
        return n in _SMALL_PRIME_SET
    if math.gcd(n, _SMALL_PRIMORIAL) != 1:
        return False
    if n < 10_000 ** 2:
        return True
    rng = rng or random.Random(n)
    s, r = 0, n - 1
    while r % 2 == 0:
        s += 1
        r //= 2
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        y = pow(a, r, n)
        if y in (1, n - 1):
            continue
        for _ in range(s - 1):
            y = y * y % n
            if y == n - 1:
                break
        else:
            return False
    return True


def random_prime(bits: int, rng: random.Random) -> int:
    """A uniformly random prime with exactly ``bits`` bits."""
    if bits < 2:
        raise ParameterError("need at least 2 bits")
    if bits == 2:
        return rng.choice((2, 3))
    while True:
        cand = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        if is_probable_prime(cand):
            return cand


def random_safe_prime(bits: int, rng: random.Random, min_value: int = 0) -> int:
    """A random ``bits``-bit safe prime ``p = 2r + 1`` with ``p >= min_value``."""
    if bits < 3:
        raise ParameterError("safe primes need at least 3 bits")
    lo = max(1 << (bits - 1), min_value)
    hi = (1 << bits) - 1
    if lo > hi:
        raise ParameterError(f"no {bits}-bit integer is >= {min_value}")
    while True:
        p = rng.randrange(lo, hi + 1) | 3  # p = 3 mod 4 so that r is odd
        if p > hi:
            continue
        r = (p - 1) // 2
        if math.gcd(r * p, _SMALL_PRIMORIAL) != 1 and r > 10_000:
            continue
        # cheap base-2 Fermat filter on p before the full tests
        if p > 10_000 and pow(2, p - 1, p) != 1:
            continue
        if is_probable_prime(r) and is_probable_prime(p):
            return p


# -- instances ---------------------------------------------------------------

def shortness_bound(m: int, ell: int, d: int) -> int:
    """Smallest group order for which ``d`` counts as short: ``2^(m+l) + (2^l - 1) d``."""
    return (1 << (m + ell)) + ((1 << ell) - 1) * d


@dataclass
class ProblemInstance:
    """A short discrete logarithm instance ``x = g^d`` in Z_N^*.

    ``d`` and ``r`` (the order of ``g``) are only present for simulated
    instances; the post-processing never reads them.
    """

    N: int
    g: int
    x: int
    m: int
    delta: int
    kind: str = "safe_prime"
    d: Optional[int] = None
    r: Optional[int] = None
    factors: Optional[tuple] = None

    def __post_init__(self):
        if not 0 <= self.delta < self.m:
            raise ParameterError(f"delta must lie in [0, m), got delta={self.delta}, m={self.m}")
        if self.d is not None and not 0 <= self.d < (1 << self.m):
            raise ParameterError("d must lie in [0, 2^m)")

    @property
    def ell(self) -> int:
        return self.m - self.delta

    @property
    def is_short(self) -> Optional[bool]:
        if self.r is None or self.d is None:
            return None
        return self.r >= shortness_bound(self.m, self.ell, self.d)

    def context(self) -> GroupContext:
        return GroupContext(self.N)

    def elements(self, ctx: Optional[GroupContext] = None):
        ctx = ctx or self.context()
        return ctx, ctx.element(self.g), ctx.element(self.x)

    def to_dict(self) -> dict:
        out = {
            "N": str(self.N),
            "g": str(self.g),
            "x": str(self.x),
            "m": str(self.m),
            "delta": str(self.delta),
            "kind": self.kind,
        }
        if self.d is not None:
            out["d"] = str(self.d)
        if self.r is not None:
            out["r"] = str(self.r)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "ProblemInstance":
        try:
            kind = data.get("kind", "safe_prime")
            if kind not in ("safe_prime", "rsa"):
                raise ParameterError(f"unknown instance kind {kind!r}")
            opt = lambda key: int(data[key]) if data.get(key) is not None else None
            return cls(
                N=int(data["N"]),
                g=int(data["g"]),
                x=int(data["x"]),
                m=int(data["m"]),
                delta=int(data["delta"]),
                kind=kind,
                d=opt("d"),
                r=opt("r"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ParameterError):
                raise
            raise ParameterError(f"malformed instance: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "ProblemInstance":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParameterError(f"malformed instance JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ParameterError("instance JSON must be an object")
        return cls.from_dict(data)


def _as_rng(seed) -> random.Random:
    if isinstance(seed, random.Random):
        return seed
    return random.Random(seed)


def sample_logarithm(m: int, rng: random.Random, mode: str = "uniform_mbit") -> int:
    """Draw a logarithm ``d < 2^m``.

    ``uniform_mbit`` draws from ``[2^(m-1), 2^m)`` so ``m`` is the exact bit
    length; ``uniform`` draws from all of ``[0, 2^m)``.
    """
    if mode == "uniform_mbit":
        return rng.randrange(1 << (m - 1), 1 << m)
    if mode == "uniform":
        return rng.randrange(0, 1 << m)
    raise ParameterError(f"unknown logarithm distribution {mode!r}")


def make_safe_prime_instance(prime_bits: int, m: int, delta: int, seed=None,
                             d: Optional[int] = None, d_mode: str = "uniform_mbit") -> ProblemInstance:
    """Short DLP instance in the order-``r`` subgroup of Z_p^*, ``p = 2r + 1`` a safe prime.

    The prime is drawn so that the order satisfies the shortness condition
    for the chosen ``d``.
    """
    if m < 1 or not 0 <= delta < m:
        raise ParameterError(f"need m >= 1 and 0 <= delta < m (m={m}, delta={delta})")
    ell = m - delta
    if prime_bits < m + ell + 2:
        raise ParameterError(f"prime_bits must be >= m + l + 2 = {m + ell + 2}, got {prime_bits}")
    rng = _as_rng(seed)
    if d is None:
        d = sample_logarithm(m, rng, d_mode)
    elif not 0 <= d < (1 << m):
        raise ParameterError("d must lie in [0, 2^m)")
    need = shortness_bound(m, ell, d)
    p = random_safe_prime(prime_bits, rng, min_value=2 * need + 1)
    r = (p - 1) // 2
    while True:
        h = rng.randrange(2, p - 1)
        g = h * h % p
        if g != 1:
            break
    return ProblemInstance(N=p, g=g, x=pow(g, d, p), m=m, delta=delta,
                           kind="safe_prime", d=d, r=r, factors=(p,))


def _prime_factors(n: int):
    import sympy

    return list(sympy.factorint(n))


def multiplicative_order(g: int, p: int, q: int) -> int:
    """Order of ``g`` in Z_{pq}^* from the factorization of ``p - 1`` and ``q - 1``."""

    def order_mod(prime):
        r = prime - 1
        for f in _prime_factors(prime - 1):
            while r % f == 0 and pow(g, r // f, prime) == 1:
                r //= f
        return r

    rp, rq = order_mod(p), order_mod(q)
    return rp * rq // math.gcd(rp, rq)


def make_rsa_instance(l: int, delta: int, seed=None, max_generator_tries: int = 1000) -> ProblemInstance:
    """Short DLP instance obtained from an RSA modulus ``N = pq``.

    ``d = (p + q) / 2`` and ``x = g^((N + 1) / 2)``; ``g`` is resampled until
    its order meets the shortness condition.
    """
    if l < 16:
        raise ParameterError(f"l must be >= 16, got {l}")
    m = l + 1
    if not 0 <= delta < m:
        raise ParameterError(f"delta must lie in [0, {m}), got {delta}")
    ell = m - delta
    rng = _as_rng(seed)
    for _ in range(100):
        p = random_prime(l, rng)
        q = random_prime(l, rng)
        if p == q:
            continue
        N = p * q
        d = (p + q) // 2
        need = shortness_bound(m, ell, d)
        # lcm(p-1, q-1) bounds every element order
        if (p - 1) * (q - 1) // math.gcd(p - 1, q - 1) < need:
            continue
        for _ in range(max_generator_tries):
            g = rng.randrange(2, N - 1)
            if math.gcd(g, N) != 1:
                continue
            r = multiplicative_order(g, p, q)
            if r >= need:
                x = pow(g, (N + 1) // 2, N)
                return ProblemInstance(N=N, g=g, x=x, m=m, delta=delta, kind="rsa",
                                       d=d, r=r, factors=(p, q))
    raise ParameterError(
        f"no generator of order >= 2^(m+l) + (2^l-1)d found for l={l}, delta={delta}; increase delta")


def factor_from_short_dlog(N: int, d: int):
    """Recover ``(p, q)`` from ``N = pq`` and ``d = (p + q) / 2``."""
    N, d = int(N), int(d)
    disc = d * d - N
    if disc < 0:
        raise ReductionFailure(f"d^2 < N for N={N}, d={d}")
    s = math.isqrt(disc)
    if s * s != disc:
        raise ReductionFailure(f"d^2 - N = {disc} is not a perfect square")
    p, q = d - s, d + s
    if p * q != N or p <= 1:
        raise ReductionFailure(f"d={d} does not factor N={N}")
    return p, q
