import pytest
from fractions import Fraction

from drinfeld.core import DrinfeldModule, carlitz
from drinfeld.fields import get_config
from drinfeld.laurent import LaurentNum
from drinfeld.rat import RatConfig, carlitz_reference, trivialize


@pytest.fixture(scope="session")
def F9():
    """q = 3, working field F_9 = F_3(i), lattice e = 4, depth theta^-30."""
    return get_config(3, 1, 2, 4, 120)


@pytest.fixture(scope="session")
def ex52(F9):
    """The golden rank-2 CM module: phi_t = theta + (nu^3 + nu) tau + tau^2,
    nu^2 = theta^3 - theta - 1 with sign +1; everything pinned to the source
    example's displayed branch choices (leading signs -i, i)."""
    th = LaurentNum.theta(F9)
    one = LaurentNum.one(F9)
    i = F9.gen()
    nu = (LaurentNum.theta_power(F9, 3) - th - one).sqrt(sign_target=F9.one())
    phi = DrinfeldModule(F9, [nu ** 3 + nu, one])
    config = RatConfig(t_trunc=24, epsilon_logq=Fraction(-24), factor_budget=64)
    report = trivialize(phi, config, sign_targets=[-i, i])
    pi_tilde, omega = carlitz_reference(F9, config.t_trunc, i_choice=i)
    return {"cfg": F9, "i": i, "nu": nu, "phi": phi, "config": config,
            "report": report, "sel": report.selection,
            "pi_tilde": pi_tilde, "omega": omega}


def make_ex51(q):
    """phi_t = theta + (theta^(q/2) + theta^(1/2)) tau + tau^2 for even q."""
    p, m = 2, {4: 2, 8: 3}[q]
    e = 2 * q - 2
    cfg = get_config(p, m, 1, e, 24 * e)
    th_half = LaurentNum.theta_power(cfg, Fraction(1, 2))
    th_qhalf = LaurentNum.theta_power(cfg, Fraction(q, 2))
    phi = DrinfeldModule(cfg, [th_qhalf + th_half, LaurentNum.one(cfg)])
    config = RatConfig(t_trunc=12, epsilon_logq=Fraction(-12), factor_budget=64)
    report = trivialize(phi, config)
    return {"cfg": cfg, "q": q, "phi": phi, "config": config,
            "report": report, "sel": report.selection}


@pytest.fixture(scope="session")
def ex51_q4():
    return make_ex51(4)


@pytest.fixture(scope="session")
def ex51_q8():
    return make_ex51(8)


@pytest.fixture(scope="session")
def carlitz_rank1(F9):
    """Rank-1 pipeline on the Carlitz module, branch-matched to the reference
    products."""
    C = carlitz(F9)
    config = RatConfig(t_trunc=24, epsilon_logq=Fraction(-24), factor_budget=64)
    root = (-F9.one()).nth_root(2)
    report = trivialize(C, config, sign_targets=[root])
    pi_tilde, omega = carlitz_reference(F9, config.t_trunc)
    return {"cfg": F9, "C": C, "config": config, "report": report,
            "pi_tilde": pi_tilde, "omega": omega, "root": root}
