import random
from fractions import Fraction

import pytest

from drinfeld.errors import RamificationNeeded, ZeroInversionError
from drinfeld.fields import get_config
from drinfeld.laurent import NEG_INF, LaurentNum, compare_mod_scalar


def rand_val(cfg, rng, lo=-8, hi=40, terms=5):
    return LaurentNum.from_terms(
        cfg, [(rng.randrange(lo, hi), rng.randrange(cfg.card)) for _ in range(terms)])


def test_geometric_inverse(F9):
    one = LaurentNum.one(F9)
    x = one - LaurentNum.theta_power(F9, -1)
    xi = x.inv()
    assert xi * x == one
    # 1 + theta^-1 + theta^-2 + ... up to precision
    expect = LaurentNum.from_terms(F9, [(4 * k, 1) for k in range(40)])
    assert xi == expect


def test_zero_inversion(F9):
    with pytest.raises(ZeroInversionError):
        LaurentNum.zero(F9).inv()


def test_ultrametric_degree_laws(F9):
    rng = random.Random(2)
    for _ in range(60):
        a, b = rand_val(F9, rng), rand_val(F9, rng)
        if a.is_zero() or b.is_zero():
            continue
        assert (a * b).deg == a.deg + b.deg
        s = a + b
        if not s.is_zero():
            assert s.deg <= max(a.deg, b.deg)
        if a.deg != b.deg:
            assert s.deg == max(a.deg, b.deg)


def test_frobenius_ring_morphism_and_degree(F9):
    rng = random.Random(3)
    for _ in range(40):
        a, b = rand_val(F9, rng), rand_val(F9, rng)
        assert (a + b).frobenius() == a.frobenius() + b.frobenius()
        assert (a * b).frobenius(2) == a.frobenius(2) * b.frobenius(2)
        if not a.is_zero():
            assert a.frobenius().deg == 3 * a.deg
            assert a.frobenius(2).root_q(2) == a


def test_frobenius_on_ramified_monomial(F9):
    # (i theta^(3/4))^q = -i theta^(9/4) for q = 3 (i^3 = -i)
    i = F9.gen()
    v = LaurentNum.theta_power(F9, Fraction(3, 4)).scale(i)
    assert v.frobenius() == LaurentNum.theta_power(F9, Fraction(9, 4)).scale(-i)


def test_root_q_requires_divisible_exponents(F9):
    v = LaurentNum.theta_power(F9, Fraction(1, 2))   # u^-2, not divisible by q=3
    with pytest.raises(RamificationNeeded):
        v.root_q()
    w = LaurentNum.theta_power(F9, Fraction(3, 4))   # u^-3 is fine
    assert w.root_q().frobenius() == w


def test_sqrt_golden_nu(F9):
    th = LaurentNum.theta(F9)
    one = LaurentNum.one(F9)
    val = LaurentNum.theta_power(F9, 3) - th - one
    nu = val.sqrt(sign_target=F9.one())
    assert nu * nu == val
    assert nu.sign() == F9.one()
    assert nu.deg == Fraction(3, 2)
    # both branches exist; the other has sign -1
    other = val.sqrt(sign_target=-F9.one())
    assert other == -nu
    with pytest.raises(ValueError):
        val.sqrt(sign_target=F9.gen())   # sign i unreachable: roots have signs +-1


def test_sqrt_odd_valuation_needs_refit(F9):
    v = LaurentNum.from_terms(F9, [(1, 1), (3, 2)])
    with pytest.raises(RamificationNeeded):
        v.sqrt()


def test_sqrt_char2():
    F4 = get_config(2, 2, 1, 6, 120)
    g = F4.gen()
    a = LaurentNum.from_terms(F4, [(0, 1), (2, g), (6, 1)])
    s = a.sqrt()
    assert s * s == a


def test_refit_commutes_with_arithmetic(F9):
    rng = random.Random(4)
    for _ in range(20):
        a, b = rand_val(F9, rng), rand_val(F9, rng)
        assert (a * b).refit(8) == a.refit(8) * b.refit(8)
        assert (a + b).refit(8) == a.refit(8) + b.refit(8)
    assert LaurentNum.zero(F9).refit(8).is_zero()
    v = LaurentNum.theta_power(F9.with_e(2), Fraction(1, 2))
    assert v.refit(4).lead == -2


def test_precision_semantics(F9):
    rng = random.Random(6)
    a, b = rand_val(F9, rng), rand_val(F9, rng)
    assert (a + b).prec == min(a.prec, b.prec)
    assert (a * b).prec == min(a.prec + b.lead, b.prec + a.lead)
    # inversion preserves relative precision
    inv = a.inv()
    assert inv.prec - inv.lead >= a.prec - a.lead
    # frobenius multiplies absolute precision by q^k
    assert a.frobenius(2).prec == a.prec * 9


def test_theta_power_ramification_error(F9):
    with pytest.raises(RamificationNeeded) as exc:
        LaurentNum.theta_power(F9, Fraction(1, 3))
    assert exc.value.e_needed == 12


def test_json_roundtrip_spec_encoding(F9):
    i = F9.gen()
    v = LaurentNum.from_terms(F9, [(-3, i), (1, -i)], prec=60)
    js = v.to_json()
    assert js == {"e": 4, "prec": 60, "terms": [[-3, "i"], [1, "-i"]]}
    assert LaurentNum.from_json(F9, js) == v


def test_compare_mod_scalar(F9):
    rng = random.Random(8)
    v = rand_val(F9, rng)
    assert compare_mod_scalar(v, v.scale(F9.elem(2))) == F9.elem(2)
    assert compare_mod_scalar(v, v.scale(F9.gen())) is None  # i is not in F_3


def test_zero_degree_sentinel(F9):
    z = LaurentNum.zero(F9)
    assert z.deg == NEG_INF
    assert z.deg < Fraction(-10 ** 9)
