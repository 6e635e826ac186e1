import random
from fractions import Fraction

import pytest

from drinfeld.errors import DecayCertificationError, NonUnitSeriesError
from drinfeld.fields import get_config
from drinfeld.laurent import LaurentNum
from drinfeld.tate import TateMatrix, TateSeries, residue_at_theta

T = 12


def rand_series(cfg, rng, terms=4):
    coeffs = [LaurentNum.from_terms(
        cfg, [(rng.randrange(-8, 40), rng.randrange(cfg.card)) for _ in range(terms)])
        for _ in range(T + 1)]
    return TateSeries(cfg, coeffs, T)


def test_unit_inv_geometric(F9):
    th = LaurentNum.theta(F9)
    one = TateSeries.one(F9, T)
    f = TateSeries(F9, [LaurentNum.one(F9), -th.inv()], T)   # 1 - t/theta
    g = f.unit_inv()
    assert (f * g - one).is_zero()
    for k in range(T + 1):
        assert g.coeffs[k] == th.inv() ** k


def test_one_over_t_minus_theta(F9):
    th = LaurentNum.theta(F9)
    geo = TateSeries.geometric_inverse(F9, th, T)
    tmth = TateSeries.from_poly(F9, [-th, LaurentNum.one(F9)], T)
    assert (geo * tmth - TateSeries.one(F9, T)).is_zero()
    for k in range(4):
        assert geo.coeffs[k] == -(th.inv() ** (k + 1))


def test_unit_inv_rejects_nonunits(F9):
    th = LaurentNum.theta(F9)
    bad = TateSeries(F9, [LaurentNum.one(F9), th], T)   # ||t theta|| > 1
    with pytest.raises(NonUnitSeriesError) as exc:
        bad.unit_inv()
    assert exc.value.index == 1
    with pytest.raises(NonUnitSeriesError):
        TateSeries(F9, [LaurentNum.zero(F9), th], T).unit_inv()


def test_gauss_norm_multiplicative(F9):
    rng = random.Random(21)
    for _ in range(15):
        f, g = rand_series(F9, rng), rand_series(F9, rng)
        if f.is_zero() or g.is_zero():
            continue
        # equality holds when the first norm-attaining indices survive the
        # t-truncation; in general truncation can only lose norm
        kf = min(k for k, c in enumerate(f.coeffs)
                 if not c.is_zero() and c.deg == f.gauss_deg())
        kg = min(k for k, c in enumerate(g.coeffs)
                 if not c.is_zero() and c.deg == g.gauss_deg())
        if kf + kg <= T:
            assert (f * g).gauss_deg() == f.gauss_deg() + g.gauss_deg()
        else:
            assert (f * g).gauss_deg() <= f.gauss_deg() + g.gauss_deg()
        assert (f + g).gauss_deg() <= max(f.gauss_deg(), g.gauss_deg())


def test_twist_laws(F9):
    rng = random.Random(22)
    f, g = rand_series(F9, rng), rand_series(F9, rng)
    assert (f * g).twist(1) == f.twist(1) * g.twist(1)
    assert (f + g).twist(1) == f.twist(1) + g.twist(1)
    assert f.twist(1).gauss_deg() == 3 * f.gauss_deg()


def test_contraction_norm_law(F9):
    th = LaurentNum.theta(F9)
    Z = LaurentNum.zero(F9)
    one = TateSeries.one(F9, T)
    ident = TateMatrix.identity(F9, 2, T)
    E = TateMatrix(F9, [[one + TateSeries(F9, [Z, th.inv()], T),
                         TateSeries(F9, [Z, th.inv() ** 2], T)],
                        [TateSeries(F9, [Z, th.inv() ** 3], T), one]])
    delta = (E - ident).gauss_deg()
    assert delta < 0
    for n in range(1, 4):
        assert (E.twist(n, cap=3000) - ident).gauss_deg() == delta * 3 ** n


def test_eval_at_theta_polynomial_exact(F9):
    th = LaurentNum.theta(F9)
    poly = TateSeries.from_poly(F9, [th, LaurentNum.one(F9), th.inv()], T)
    v = poly.eval_at_theta()
    expect = th + th * LaurentNum.one(F9) + (th * th) * th.inv()
    assert v == expect


def test_eval_rejects_unit_disk_series(F9):
    geo = TateSeries.geometric_inverse(F9, LaurentNum.theta(F9), T)
    assert geo.tail == "unit-disk"
    with pytest.raises(DecayCertificationError):
        geo.eval_at_theta()


def test_eval_theta_disk_geo(F9):
    th = LaurentNum.theta(F9)
    g3 = TateSeries.geometric_inverse(F9, LaurentNum.theta_power(F9, 3), T)
    assert g3.tail == "theta-disk"
    v = g3.eval_at_theta()
    assert v == (th - LaurentNum.theta_power(F9, 3)).inv()


def test_residue_of_polynomial_is_zero(F9):
    th = LaurentNum.theta(F9)
    poly = TateSeries.from_poly(F9, [th, th * th], T)
    tmth = TateSeries.from_poly(F9, [-th, LaurentNum.one(F9)], T)
    assert residue_at_theta(tmth * poly).is_zero()


def test_matrix_inverse(F9):
    th = LaurentNum.theta(F9)
    Z = LaurentNum.zero(F9)
    one = TateSeries.one(F9, T)
    ident = TateMatrix.identity(F9, 2, T)
    m = TateMatrix(F9, [[one + TateSeries(F9, [Z, th.inv()], T),
                         TateSeries(F9, [Z, th.inv() ** 2], T)],
                        [TateSeries(F9, [Z, th.inv()], T), one]])
    mi = m.inv()
    assert (m @ mi - ident).is_zero()
    assert (mi @ m - ident).is_zero()
    assert (ident.inv() - ident).is_zero()


def test_series_json_roundtrip(F9):
    rng = random.Random(23)
    f = rand_series(F9, rng).with_tail("theta-disk")
    js = f.to_json()
    assert js["t_trunc"] == T and js["tail"] == "theta-disk"
    assert TateSeries.from_json(F9, js) == f
