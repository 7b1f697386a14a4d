"""Shared inputs for the enumeration tests."""

from shortdlog.group import make_safe_prime_instance
from shortdlog.lattice import LatticeSpec, babai_nearest_plane, enum_bounds, lagrange_reduce, target_vector
from shortdlog.simulator import SimulatorConfig, sample_pair, trial_rng


def search_inputs(inst, j, k, tau):
    m, ell = inst.m, inst.ell
    basis = lagrange_reduce(LatticeSpec(j, tau, m, ell))
    bab = babai_nearest_plane(basis, target_vector(k, m, ell))
    B1, B2 = enum_bounds(basis, m, tau)
    return bab.nu1, bab.nu2, B1, B2, basis.s1[1] >> tau, basis.s2[1] >> tau, basis.mu


def random_case(rng):
    """A tiny instance with either a simulated or a uniformly random pair, and a random tau."""
    m = rng.randint(3, 10)
    delta = rng.randint(0, m - 1)
    ell = m - delta
    inst = make_safe_prime_instance(m + ell + 2 + rng.randint(0, 3), m, delta, seed=rng.randrange(1 << 30),
                                    d_mode="uniform")
    tau = rng.randint(0, ell)
    if rng.random() < 0.6:
        s = sample_pair(inst, SimulatorConfig(), trial_rng(rng.randrange(1 << 30), 0))
        j, k = s.j, s.k
    else:
        j, k = rng.randrange(1 << (m + ell)), rng.randrange(1 << ell)
    return inst, j, k, tau
