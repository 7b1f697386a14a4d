import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import shortest_vector_sq
from shortdlog.errors import ParameterError
from shortdlog.lattice import (LatticeSpec, babai_nearest_plane, enum_bounds, is_t_balanced, lagrange_reduce,
                               lagrange_reduce_vectors, min_balanced_t, target_vector, work_parameter)


def specs(max_m=40, max_ell=40):
    return st.integers(1, max_m).flatmap(lambda m: st.integers(1, max_ell).flatmap(
        lambda ell: st.tuples(st.integers(0, (1 << (m + ell)) - 1), st.integers(0, ell), st.just(m), st.just(ell))))


@given(specs())
@settings(max_examples=500)
def test_reduced_basis_identities(spec_args):
    j, tau, m, ell = spec_args
    b = lagrange_reduce(LatticeSpec(j, tau, m, ell))
    assert b.det == 1 << (m + ell + tau)
    assert abs(b.mu) <= Fraction(1, 2)
    assert b.norm1_sq <= b.norm2_sq
    assert 4 * b.lambda2_perp_sq >= 3 * b.norm2_sq
    assert b.s1[1] % (1 << tau) == 0 and b.s2[1] % (1 << tau) == 0
    # both vectors are integer combinations of the generators
    gens = LatticeSpec(j, tau, m, ell).generators
    for v in (b.s1, b.s2):
        a = v[1] >> tau
        assert (v[0] - a * j) % (1 << (m + ell)) == 0
    assert b.s1[0] > 0 or (b.s1[0] == 0 and b.s1[1] > 0)


def test_degenerate_j_zero():
    b = lagrange_reduce(LatticeSpec(0, 0, 5, 5))
    assert b.s1 == (0, 1) and b.lambda1 == 1


def test_shortest_vector_matches_brute_force():
    rng = random.Random(0)
    for _ in range(60):
        m, ell = rng.randint(1, 6), rng.randint(1, 6)
        tau = rng.randint(0, ell)
        j = rng.randrange(1 << (m + ell))
        b = lagrange_reduce(LatticeSpec(j, tau, m, ell))
        assert b.norm1_sq == shortest_vector_sq(j, tau, m, ell)


def test_spec_example_small():
    b = lagrange_reduce(LatticeSpec(3, 0, 2, 2))
    assert b.norm1_sq == shortest_vector_sq(3, 0, 2, 2)


def test_reduce_vectors_rejects_zero():
    with pytest.raises(ParameterError):
        lagrange_reduce_vectors((0, 0), (1, 0))


@pytest.mark.parametrize("args", [(-1, 0, 3, 3), (64, 0, 3, 3), (1, 4, 3, 3), (0, 0, 0, 3)])
def test_spec_validation(args):
    with pytest.raises(ParameterError):
        LatticeSpec(*args)


@given(specs(30, 30), st.integers(-10**12, 10**12), st.integers(-10**12, 10**12))
@settings(max_examples=500)
def test_babai_residuals(spec_args, vx, vy):
    b = lagrange_reduce(LatticeSpec(*spec_args))
    r = babai_nearest_plane(b, (vx, vy))
    assert r.o == (r.nu1 * b.s1[0] + r.nu2 * b.s2[0], r.nu1 * b.s1[1] + r.nu2 * b.s2[1])
    assert abs(r.delta1) <= Fraction(1, 2) and abs(r.delta2) <= Fraction(1, 2)
    # o - v = delta1 s1 + delta2 s2_perp, checked exactly
    mu = b.mu
    perp = (b.s2[0] - mu * b.s1[0], b.s2[1] - mu * b.s1[1])
    assert r.o[0] - vx == r.delta1 * b.s1[0] + r.delta2 * perp[0]
    assert r.o[1] - vy == r.delta1 * b.s1[1] + r.delta2 * perp[1]


def test_babai_on_lattice_vector_and_tie():
    b = lagrange_reduce(LatticeSpec(12345, 3, 10, 8))
    v = (3 * b.s1[0] - 2 * b.s2[0], 3 * b.s1[1] - 2 * b.s2[1])
    r = babai_nearest_plane(b, v)
    assert r.o == v and r.delta1 == 0 and r.delta2 == 0
    assert b.coefficients(v) == (3, -2)
    with pytest.raises(ParameterError):
        b.coefficients((1, 0))
    # half of an even s1 sits exactly on the tie
    b2 = lagrange_reduce(LatticeSpec(0, 1, 4, 4))
    assert b2.s1 == (0, 2)
    half = babai_nearest_plane(b2, (0, 1))
    assert abs(half.delta1) == Fraction(1, 2)


def test_target_vector():
    assert target_vector(0, 5, 3) == (0, 0)
    assert target_vector(1, 5, 3) == (-32, 0)
    assert target_vector(4, 5, 3) == (-128, 0)


@given(specs(30, 30))
@settings(max_examples=500)
def test_enum_bounds_claim(spec_args):
    j, tau, m, ell = spec_args
    b = lagrange_reduce(LatticeSpec(j, tau, m, ell))
    B1, B2 = enum_bounds(b, m, tau)
    assert B1 >= 1 and 2 * B1 > B2 >= 0
    # exact floors: B1 - 1 <= 2^(m+tau) sqrt2 / lambda1 < B1
    r2 = 1 << (2 * (m + tau) + 1)
    assert (B1 - 1) ** 2 * b.norm1_sq <= r2 < B1 ** 2 * b.norm1_sq
    # 2 B2 - 1 <= 2 radius / lambda2_perp < 2 B2 + 1
    lhs = 4 * r2 * b.norm1_sq
    assert (2 * B2 - 1) ** 2 * b.det ** 2 <= lhs or B2 == 0
    assert lhs < (2 * B2 + 1) ** 2 * b.det ** 2
    # the work parameter is defined for delta = m - l >= 0
    for t in range(0, m if ell <= m else 0):
        if is_t_balanced(b, m, t):
            assert B1 * (B2 + 1) < work_parameter(m - ell, tau, t)


def test_enum_bounds_direct_example():
    # lambda1 = 2^(m+tau) gives B1 = floor(sqrt2 + 1) = 2
    b = lagrange_reduce(LatticeSpec(0, 4, 4, 4))
    assert b.norm1_sq == 1 << 8
    assert enum_bounds(b, 0, 4)[0] == 2


def test_t_balanced_rules():
    m, ell, tau = 8, 8, 3
    b = lagrange_reduce(LatticeSpec(0, tau, m, ell))
    for t in range(m):
        assert is_t_balanced(b, m, t) == (tau >= m - t)
    rng = random.Random(4)
    for _ in range(200):
        b = lagrange_reduce(LatticeSpec(rng.randrange(1 << 16), rng.randint(0, 8), 8, 8))
        flags = [is_t_balanced(b, 8, t) for t in range(8)]
        assert flags == sorted(flags)  # once balanced, stays balanced
        t0 = min_balanced_t(b, 8)
        assert is_t_balanced(b, 8, t0) and (t0 == 0 or not is_t_balanced(b, 8, t0 - 1))
    with pytest.raises(ParameterError):
        is_t_balanced(b, 8, -1)


def test_unbalanced_fraction_exhaustive_small():
    m, delta, tau, t = 6, 0, 2, 2
    ell = m - delta
    total = 1 << (m + ell)
    bad = sum(not is_t_balanced(lagrange_reduce(LatticeSpec(j, tau, m, ell)), m, t) for j in range(total))
    assert Fraction(bad, total) <= Fraction(2) ** (delta - 2 * (t - 1) - tau)


def test_work_parameter():
    assert work_parameter(0, 7, 2) == 2**8 + 2**11 + 2
