import random
from fractions import Fraction

import pytest

from drinfeld.core import (DrinfeldModule, carlitz, bn_enumerated, bn_series,
                           compose_q_series, log_deformation, shadowed_partitions)
from drinfeld.errors import RadiusError
from drinfeld.fields import get_config
from drinfeld.laurent import LaurentNum
from drinfeld.tate import TateSeries, residue_at_theta

T = 10


@pytest.fixture(scope="module")
def phi52(F9):
    th = LaurentNum.theta(F9)
    one = LaurentNum.one(F9)
    nu = (LaurentNum.theta_power(F9, 3) - th - one).sqrt(sign_target=F9.one())
    return DrinfeldModule(F9, [nu ** 3 + nu, one])


def rand_small(cfg, rng):
    return LaurentNum.from_terms(
        cfg, [(rng.randrange(2, 24), rng.randrange(1, cfg.card)) for _ in range(3)])


# -- module action -----------------------------------------------------------

def test_phi_identity_and_carlitz(F9, phi52):
    rng = random.Random(31)
    x = rand_small(F9, rng)
    assert phi52.phi([1], x) == x
    C = carlitz(F9)
    th = LaurentNum.theta(F9)
    assert C.phi_t(x) == th * x + x.frobenius()


def test_phi_composition(F9, phi52):
    rng = random.Random(32)
    for _ in range(5):
        x = rand_small(F9, rng)
        assert phi52.phi([0, 0, 1], x) == phi52.phi_t(phi52.phi_t(x))
        a = [rng.randrange(3) for _ in range(3)] + [1]
        b = [rng.randrange(3) for _ in range(2)] + [1]
        ab = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            for j, bj in enumerate(b):
                ab[i + j] = (ab[i + j] + ai * bj) % 3
        lhs = phi52.phi(ab, x)
        rhs = phi52.phi(a, phi52.phi(b, x))
        assert lhs == rhs


# -- exponential / logarithm ---------------------------------------------------

def test_exp_log_base_coefficients(F9, phi52):
    assert phi52.exp_coeffs(0)[0] == LaurentNum.one(F9)
    assert phi52.log_coeffs(0)[0] == LaurentNum.one(F9)
    C = carlitz(F9)
    th = LaurentNum.theta(F9)
    assert C.exp_coeffs(1)[1] == (th.frobenius() - th).inv()
    assert C.log_coeffs(1)[1] == (th - th.frobenius()).inv()


def test_composition_inverse_through_q3(F9, phi52):
    comp = compose_q_series(F9, phi52.log_coeffs(3), phi52.exp_coeffs(3))
    assert comp[0] == LaurentNum.one(F9)
    assert all(c.is_zero() for c in comp[1:])
    comp2 = compose_q_series(F9, phi52.exp_coeffs(3), phi52.log_coeffs(3))
    assert comp2[0] == LaurentNum.one(F9)
    assert all(c.is_zero() for c in comp2[1:])


def test_log_radius_and_isometry(F9, phi52):
    rng = random.Random(33)
    rad = phi52.radius()
    for _ in range(5):
        z = rand_small(F9, rng)
        if z.is_zero() or z.deg >= rad.logq_radius:
            continue
        x = phi52.exp_eval(z)
        lx = phi52.log_eval(x)
        assert lx == z
        assert lx.deg == x.deg    # isometry
    assert phi52.log_eval(LaurentNum.zero(F9)).is_zero()
    too_big = LaurentNum.theta_power(F9, rad.logq_radius)
    with pytest.raises(RadiusError):
        phi52.log_eval(too_big)


# -- Anderson generating functions ---------------------------------------------

def test_agf_zero_and_functional_equation(F9, phi52):
    rng = random.Random(34)
    assert phi52.agf(LaurentNum.zero(F9), T).is_zero()
    u = rand_small(F9, rng)
    f = phi52.agf(u, T)
    lhs = phi52.phi_t_series(f, cap=4 * F9.prec)
    rhs = f.shift_t(1) + TateSeries(F9, [phi52.exp_eval(u)], T, "polynomial")
    # the t^T coefficient of t*f is lost to truncation; compare below it
    assert all((lhs.coeffs[k] - rhs.coeffs[k]).is_zero() for k in range(T))


def test_agf_scalar_equation(F9, phi52):
    rng = random.Random(35)
    th = LaurentNum.theta(F9)
    u = rand_small(F9, rng)
    f = phi52.agf(u, T)
    # phi_t(f(u)) = f(theta u)
    lhs = phi52.phi_t_series(f, cap=4 * F9.prec)
    rhs = phi52.agf(th * u, T)
    assert all((lhs.coeffs[k] - rhs.coeffs[k]).is_zero() for k in range(T))
    # a = t^2
    lhs2 = phi52.phi_t_series(lhs, cap=4 * F9.prec)
    rhs2 = phi52.agf(th * th * u, T)
    assert all((lhs2.coeffs[k] - rhs2.coeffs[k]).is_zero() for k in range(T - 1))


def test_agf_partial_fractions_agree(F9, phi52):
    rng = random.Random(36)
    u = rand_small(F9, rng)
    assert (phi52.agf(u, T) - phi52.agf_partial_fractions(u, T)).is_zero()


def test_agf_residue(F9, phi52):
    rng = random.Random(37)
    th = LaurentNum.theta(F9)
    u = rand_small(F9, rng)
    f = phi52.agf(u, T)
    tmth = TateSeries.from_poly(F9, [-th, LaurentNum.one(F9)], T)
    res = residue_at_theta((tmth * f).with_tail("theta-disk"))
    assert (res + u).is_zero()


def test_carlitz_agf_of_period_is_omega(carlitz_rank1):
    cfg = carlitz_rank1["cfg"]
    C = carlitz_rank1["C"]
    f = C.agf(carlitz_rank1["pi_tilde"], 12)
    omega = carlitz_rank1["omega"].truncate_t(12)
    assert all((f.coeffs[k] - omega.coeffs[k]).is_zero() for k in range(13))


# -- shadowed partitions and the deformation ------------------------------------

def test_shadowed_partition_counts():
    assert all(len(shadowed_partitions(1, n)) == 1 for n in range(8))
    assert len(shadowed_partitions(2, 2)) == 2
    fib = [len(shadowed_partitions(2, n)) for n in range(11)]
    for n in range(2, 11):
        assert fib[n] == fib[n - 1] + fib[n - 2]
    assert shadowed_partitions(3, 0) == [(frozenset(), frozenset(), frozenset())]


def test_shadowed_partitions_are_tilings():
    for r, n in ((2, 4), (3, 5)):
        for tup in shadowed_partitions(r, n):
            cells = []
            for i, S in enumerate(tup, start=1):
                for j in S:
                    cells.extend(range(j, j + i))
            assert sorted(cells) == list(range(n))


def test_bn_base_cases(F9, phi52):
    bns = bn_series(phi52, 1, T)
    assert (bns[0] - TateSeries.one(F9, T)).is_zero()
    geo = TateSeries.geometric_inverse(F9, LaurentNum.theta(F9).frobenius(), T)
    assert (bns[1] - geo.scale(phi52.A[0])).is_zero()


def test_bn_recursion_equals_enumeration(F9, phi52):
    # rank 2 through n = 6
    bns = bn_series(phi52, 6, T)
    for n in range(7):
        assert (bns[n] - bn_enumerated(phi52, n, T)).is_zero()
    # rank 3 through n = 6
    th = LaurentNum.theta(F9)
    phi3 = DrinfeldModule(F9, [th, LaurentNum.one(F9), th + LaurentNum.one(F9)])
    bns3 = bn_series(phi3, 6, 6)
    for n in range(7):
        assert (bns3[n] - bn_enumerated(phi3, n, 6)).is_zero()


def test_log_deformation_identities(F9, phi52):
    rng = random.Random(38)
    th = LaurentNum.theta(F9)
    assert log_deformation(phi52, LaurentNum.zero(F9), T).is_zero()
    z = rand_small(F9, rng)
    xi = phi52.exp_eval(z)
    L = log_deformation(phi52, xi, T)
    # L(xi; theta) = log(xi)
    assert (L.eval_at_theta() - phi52.log_eval(xi)).is_zero()
    # L(xi; t) = -(t - theta) f(u; t) with exp(u) = xi
    f = phi52.agf(z, T)
    LL = -(TateSeries.from_poly(F9, [-th, LaurentNum.one(F9)], T) * f)
    assert all((LL.coeffs[k] - L.coeffs[k]).is_zero() for k in range(T))
    with pytest.raises(RadiusError):
        log_deformation(phi52, LaurentNum.theta(F9), T)


# -- radius ----------------------------------------------------------------------

def test_radius_golden(F9, phi52):
    rad = phi52.radius()
    assert rad.mu == {1: Fraction(3, 4), 2: Fraction(-9, 8)}
    assert rad.m_star == 1
    assert rad.logq_radius == Fraction(-3, 4)


def test_radius_carlitz(F9):
    rad = carlitz(F9).radius()
    assert rad.mu == {1: Fraction(-3, 2)}
    assert rad.logq_radius == Fraction(3, 2)


def test_radius_skips_vanishing_coefficients(F9):
    th = LaurentNum.theta(F9)
    phi = DrinfeldModule(F9, [LaurentNum.zero(F9), th])
    rad = phi.radius()
    assert set(rad.mu) == {2}
    assert phi.support() == [2]
