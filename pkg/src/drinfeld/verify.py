"""Randomized property suites over small Drinfeld modules.

Modules are drawn with integral theta-polynomial coefficients of small degree
(ranks 2-3), run through the full trivialization pipeline, and checked against
every structural identity of the construction.  Draws whose torsion tower
would outgrow the desk-scale field cap are skipped and redrawn; extension
hints are honored by rebuilding the module at the larger M.
"""

import random
from fractions import Fraction

from .core import DrinfeldModule
from .errors import BudgetExceededError, ExtensionNeeded
from .fields import TABLE_CAP, get_config
from .laurent import NEG_INF, LaurentNum
from .rat import RatConfig, trivialize
from .torsion import compute_N, newton_polygon


def random_coeff_data(rng, rank, max_deg=3):
    """Coefficient data: A_i as lists of (theta-power, prime-field int)."""
    while True:
        data = []
        for i in range(1, rank + 1):
            if i < rank and rng.random() < 0.2:
                data.append([])
                continue
            deg = rng.randrange(0, max_deg + 1)
            terms = [(deg, rng.randrange(1, 3))]
            for d in range(deg):
                c = rng.randrange(0, 3)
                if c:
                    terms.append((d, c))
            data.append(terms)
        if data[-1]:
            return data


def build_module(p, m, M, e, prec, coeff_data):
    cfg = get_config(p, m, M, e, prec)
    A = []
    for terms in coeff_data:
        if not terms:
            A.append(LaurentNum.zero(cfg))
        else:
            A.append(LaurentNum.from_terms(cfg, [(-d * e, c % p) for d, c in terms]))
    return DrinfeldModule(cfg, A)


def rank2_table(phi):
    """(N, deg xi_1, deg xi_2) closed forms for rank 2."""
    q = phi.cfg.q
    dA1 = phi.A[0].deg if not phi.A[0].is_zero() else NEG_INF
    dA2 = phi.A[1].deg
    if dA1 == NEG_INF or dA1 <= Fraction(q + dA2, q + 1):
        d = Fraction(1 - dA2, q * q - 1)
        return 1, d, d
    ell = 1
    while not (Fraction(q ** ell + dA2, q + 1) <= dA1 < Fraction(q ** (ell + 1) + dA2, q + 1)):
        ell += 1
    d1 = Fraction(1 - dA1, q - 1) - (ell - 1)
    d2 = Fraction((-q ** ell + q + 1) * dA1 - dA2, q ** ell * (q - 1))
    return ell, d1, d2


def check_module(phi, config, e_cap=None):
    """Run the pipeline and return the measured properties (raises on any
    violated invariant; the pipeline itself enforces most of them)."""
    report = trivialize(phi, config, e_cap=e_cap)
    sel = report.selection
    phi = sel.phi
    out = {
        "rank": phi.r,
        "N": sel.N,
        "e": phi.cfg.e,
        "delta_logq": report.delta_logq,
        "residual_logq": report.diagnostics.residual_logq,
        "residual_bound_logq": report.diagnostics.residual_bound_logq,
        "factors_used": report.diagnostics.factors_used,
        "agreement_logq": report.agreement_logq,
    }
    # (a) strict contraction
    assert report.delta_logq < 0
    # (b) functional-equation residual below its bound
    assert report.diagnostics.residual_logq <= report.diagnostics.residual_bound_logq
    # (c) three-way agreement (already enforced; record the bound)
    # (d) period oracle agreement is enforced inside periods_and_quasi
    # (e) |pi_1| = R
    rad = phi.radius()
    assert report.periods[0].deg == rad.logq_radius, \
        "deg pi_1 = %s, logq R = %s" % (report.periods[0].deg, rad.logq_radius)
    out["logq_radius"] = rad.logq_radius
    # (f) Moore-determinant and det B certificates are enforced in build_xi/build_B
    # (g) rank-2 closed forms
    if phi.r == 2:
        N, d1, d2 = rank2_table(phi)
        assert sel.N == N, "N = %d, table says %d" % (sel.N, N)
        assert sel.xi[0].deg == d1 and sel.xi[1].deg == d2, \
            "xi degrees %s, table %s" % ([sel.xi[0].deg, sel.xi[1].deg], [d1, d2])
        out["rank2_table"] = (N, d1, d2)
    # norms of the factors follow the contraction law (recorded by rat_product)
    for n, v in enumerate(report.diagnostics.factor_norms_logq):
        if v != NEG_INF:
            assert v == report.delta_logq * phi.cfg.q ** n
    return out


def property_suite(seed=0, count=50, ranks=(2, 3), p=3, m=1, prec_theta=18,
                   t_trunc=8, max_deg=3, e_cap=48, verbose=False):
    """Deterministic randomized suite; returns one record per accepted module.

    prec_theta is the working depth in theta-units (the u-unit precision is
    prec_theta * e after the pipeline picks its lattice).  Draws needing a
    ramification index beyond e_cap or a field beyond the table cap are
    skipped and redrawn: the suite is a desk-scale corpus by design.
    """
    from .torsion import required_ramification
    rng = random.Random(seed)
    config = RatConfig(t_trunc=t_trunc,
                       epsilon_logq=Fraction(-2 * prec_theta, 3), factor_budget=96)
    records = []
    skipped = 0
    while len(records) < count:
        rank = ranks[rng.randrange(len(ranks))]
        data = random_coeff_data(rng, rank, max_deg=max_deg)
        probe = build_module(p, m, 1, 1, prec_theta, data)
        if required_ramification(probe) > e_cap:
            skipped += 1
            continue
        M = 1
        while True:
            if (p ** m) ** M > TABLE_CAP:
                skipped += 1
                break
            try:
                phi = build_module(p, m, M, 1, prec_theta, data)
                rec = check_module(phi, config, e_cap=e_cap)
                rec["coeffs"] = data
                rec["M"] = M
                records.append(rec)
                if verbose:
                    print("ok  rank=%d M=%d N=%d e=%d delta=q^%s" %
                          (rec["rank"], M, rec["N"], rec["e"], rec["delta_logq"]))
                break
            except ExtensionNeeded as exc:
                M = exc.M_needed if exc.M_needed > M else M + 1
            except BudgetExceededError:
                skipped += 1
                break
    return {"seed": seed, "count": len(records), "skipped": skipped, "records": records}
