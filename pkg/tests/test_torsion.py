import random
from fractions import Fraction

import pytest

from drinfeld.core import DrinfeldModule, carlitz
from drinfeld.fields import get_config
from drinfeld.laurent import LaurentNum, compare_mod_scalar
from drinfeld.torsion import (build_xi, classify_and_lift, compute_N, moore_det,
                              newton_polygon, prescribed_next_degree,
                              strict_t_basis)


# -- Newton polygon -----------------------------------------------------------

def test_polygon_golden(ex52):
    poly = ex52["sel"].polygon
    assert poly.s == 2
    assert poly.d == [0, 1, 2]
    assert poly.slopes == [Fraction(-7, 4), Fraction(3, 4)]
    # a_1 = mu_m; intercepts strictly decreasing; a_s + lambda_s <= -1
    assert poly.intercepts[0] == ex52["phi"].radius().mu[1]
    assert poly.intercepts[0] > poly.intercepts[1]
    assert poly.intercepts[-1] + poly.slopes[-1] <= -1


def test_polygon_carlitz(F9):
    poly = newton_polygon(carlitz(F9))
    assert poly.s == 1
    assert poly.slopes == [Fraction(1, 2)]


def test_rank2_case_split(F9):
    # single edge iff deg A_1 <= (q + deg A_2)/(q + 1)
    th = LaurentNum.theta(F9)
    one = LaurentNum.one(F9)
    q = F9.q
    for a1, a2 in (([(0, 1)], [(0, 1)]),                 # deg 0 vs 0
                   ([(-4 * 2, 1)], [(0, 1)]),            # deg 2 vs 0
                   ([(-4, 1)], [(-4 * 3, 1)]),           # deg 1 vs 3
                   ([(-4 * 3, 1)], [(-4 * 2, 1)])):      # deg 3 vs 2
        A1 = LaurentNum.from_terms(F9, a1)
        A2 = LaurentNum.from_terms(F9, a2)
        poly = newton_polygon(DrinfeldModule(F9, [A1, A2]))
        single = A1.deg <= Fraction(q + A2.deg, q + 1)
        assert (poly.s == 1) == single


def test_prescribed_degree_case_i(ex52):
    # for -deg y above a_1 the next degree is deg y - 1
    poly = ex52["sel"].polygon
    assert prescribed_next_degree(poly, Fraction(-11, 4), 3) == Fraction(-15, 4)


def test_compute_N_golden(ex52):
    poly = ex52["sel"].polygon
    N1, it1 = compute_N(poly, Fraction(-7, 4), 3)
    N2, it2 = compute_N(poly, Fraction(3, 4), 3)
    assert (N1, N2) == (1, 2)
    assert it2 == [Fraction(3, 4), Fraction(-5, 4)]
    assert ex52["sel"].N == 2


def test_compute_N_iterate_closed_form(ex52):
    # u_n^(k)(z) = z/q^(nk) - ((q^(nk)-1)/(q^n-1)) deg A_n / q^(nk)
    phi = ex52["phi"]
    poly = ex52["sel"].polygon
    q = 3
    n = 1
    dA = phi.A[0].deg
    z = Fraction(3, 4)
    u = z
    for k in range(1, 4):
        u = (u - dA) / q ** n
        closed = Fraction(z, q ** (n * k)) - Fraction(q ** (n * k) - 1, q ** n - 1) * dA / q ** (n * k)
        assert u == closed


def test_rank2_ell_bounds(ex51_q4, ex51_q8):
    for ex in (ex51_q4, ex51_q8):
        q = ex["q"]
        phi = ex["sel"].phi
        dA1, dA2 = phi.A[0].deg, phi.A[1].deg
        ell = ex["sel"].N
        assert Fraction(q ** ell + dA2, q + 1) <= dA1 < Fraction(q ** (ell + 1) + dA2, q + 1)
        assert ell == 1


# -- strict bases ----------------------------------------------------------------

def test_strict_basis_golden_series(ex52):
    x1, x2 = ex52["sel"].basis
    i = ex52["i"]
    F9 = ex52["cfg"]
    expect_x1 = LaurentNum.from_terms(
        F9, [(7, -i), (19, -i), (27, -i), (31, i), (35, -i), (39, i), (43, i)], prec=51)
    expect_x2 = LaurentNum.from_terms(
        F9, [(-3, i), (1, -i), (5, i), (9, i), (13, -i), (17, -i), (21, i),
             (33, i), (37, -i), (41, i)], prec=45)
    assert (x1 - expect_x1).is_zero()
    assert (x2 - expect_x2).is_zero()
    assert x1.deg == Fraction(-7, 4) and x2.deg == Fraction(3, 4)


def test_strict_basis_algebraic_certificate(ex52):
    # x_1^2 = theta^(1/2)(theta+1) - sqrt(-(theta-1) nu theta^(1/2) - theta (theta+1)^2)
    F9 = ex52["cfg"]
    th = LaurentNum.theta(F9)
    one = LaurentNum.one(F9)
    nu = ex52["nu"]
    x1, x2 = ex52["sel"].basis
    lead = th.sqrt(sign_target=F9.one()) * (th + one)
    inner = -(th - one) * nu * th.sqrt(sign_target=F9.one()) - th * (th + one) ** 2
    s1 = x1 * x1 - lead
    s2 = x2 * x2 - lead
    assert (s1 * s1 - inner).is_zero()
    assert (s2 * s2 - inner).is_zero()
    assert (s1 + s2).is_zero()      # opposite branches


def test_strict_basis_ex51_closed_form(ex51_q4):
    # x_1 = zeta * beta, x_2 = zeta with zeta = theta^(1/(2q-2)),
    # beta = sum_n theta^(-q^n / 2)
    cfg = ex51_q4["cfg"]
    q = ex51_q4["q"]
    e = cfg.e
    zeta = LaurentNum.theta_power(cfg, Fraction(1, 2 * q - 2))
    beta_terms = []
    n = 0
    while (q ** n) * e // 2 < cfg.prec:
        beta_terms.append(((q ** n) * e // 2, 1))
        n += 1
    beta = LaurentNum.from_terms(cfg, beta_terms)
    x1, x2 = ex51_q4["sel"].basis
    assert x1.deg == Fraction(-(q - 2), 2 * q - 2)
    assert x2.deg == Fraction(1, 2 * q - 2)
    c1 = compare_mod_scalar(zeta * beta, x1)
    c2 = compare_mod_scalar(zeta, x2)
    assert c1 is not None and c2 is not None


def test_moore_determinant_formula(ex52):
    basis = ex52["sel"].basis
    det = moore_det(basis)
    want = sum(Fraction(3 ** j) * x.deg for j, x in enumerate(basis))
    assert det.deg == want


def test_basis_is_torsion(ex52):
    phi = ex52["sel"].phi
    for x in ex52["sel"].basis:
        assert phi.phi_t(x).is_zero()


def test_sign_targets_unreachable(ex52):
    phi = ex52["phi"]
    F9 = ex52["cfg"]
    with pytest.raises(ValueError):
        strict_t_basis(phi, sign_targets=[F9.one(), F9.one()])


# -- division chains ---------------------------------------------------------------

def test_chain_invariants(ex52):
    sel = ex52["sel"]
    phi = sel.phi
    rad = phi.radius()
    for chain, itin in zip(sel.chains, sel.itineraries):
        for k in range(1, len(chain)):
            assert (phi.phi_t(chain[k]) - chain[k - 1]).is_zero()
            assert chain[k].deg <= chain[k - 1].deg - 1
        assert chain[-1].deg < rad.logq_radius
        assert [y.deg for y in chain[:len(itin)]] == itin


def test_golden_xi(ex52):
    xi1, xi2 = ex52["sel"].xi
    i = ex52["i"]
    F9 = ex52["cfg"]
    assert xi1.deg == Fraction(-11, 4) and xi2.deg == Fraction(-5, 4)
    expect_xi1 = LaurentNum.from_terms(
        F9, [(11, -i), (19, -i), (23, -i), (31, i), (35, i), (39, i), (43, i)], prec=51)
    expect_xi2 = LaurentNum.from_terms(
        F9, [(5, -i), (9, i), (13, i), (17, -i), (21, i), (25, i),
             (29, -i), (33, -i), (37, -i), (45, -i)], prec=53)
    assert (xi1 - expect_xi1).is_zero()
    assert (xi2 - expect_xi2).is_zero()


def test_lift_uniqueness_in_contraction_zone(ex52):
    # once deg y < -a_1, alternatives shifted by torsion have strictly larger degree
    sel = ex52["sel"]
    phi = sel.phi
    y = sel.chains[0][0]          # x_1, already inside the zone
    nxt, want = classify_and_lift(phi, sel.polygon, y)
    assert nxt.deg == want
    for x in sel.basis:
        for c in (1, 2):
            alt = nxt + x.scale(phi.cfg.elem(c))
            assert alt.deg > nxt.deg
            assert (phi.phi_t(alt) - y).is_zero()


def test_phi_h_relation(ex52):
    # phi_t(h_j) - t h_j = -xi_j t^N as an exact series identity
    from drinfeld.tate import TateSeries
    sel = ex52["sel"]
    phi = sel.phi
    cfg = phi.cfg
    T = 8
    for j in range(phi.r):
        h = TateSeries.from_poly(cfg, sel.h_coeffs(j), T)
        lhs = phi.phi_t_series(h, cap=4 * cfg.prec) - h.shift_t(1)
        expect = TateSeries.from_poly(cfg, [LaurentNum.zero(cfg)] * sel.N + [-sel.xi[j]], T)
        assert (lhs - expect).is_zero()


def test_h_congruent_to_agf(ex52):
    # h_j = f(pi_j; t) mod t^N
    sel = ex52["sel"]
    phi = sel.phi
    report = ex52["report"]
    for j in range(phi.r):
        f = phi.agf(report.periods[j], sel.N)
        for m in range(sel.N):
            assert (f.coeffs[m] - sel.h_coeffs(j)[m]).is_zero()


def test_random_rank2_table_and_chains():
    # prescribed degrees on random rank-2 modules match the closed forms
    from drinfeld.verify import build_module, rank2_table
    from drinfeld.errors import ExtensionNeeded, BudgetExceededError
    rng = random.Random(99)
    done = 0
    while done < 6:
        a1 = [(rng.randrange(0, 4), rng.randrange(1, 3))]
        a2 = [(rng.randrange(0, 3), rng.randrange(1, 3))]
        M = 1
        while True:
            try:
                phi = build_module(3, 1, M, 1, 18, [a1, a2])
                sel = build_xi(phi, e_cap=48)
                break
            except ExtensionNeeded as exc:
                M = exc.M_needed if exc.M_needed > M else M + 1
            except BudgetExceededError:
                sel = None
                break
        if sel is None:
            continue
        N, d1, d2 = rank2_table(phi)
        assert sel.N == N
        assert [sel.xi[0].deg, sel.xi[1].deg] == [d1, d2]
        done += 1
