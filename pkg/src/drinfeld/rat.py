"""Rigid analytic trivializations as convergent Frobenius-twisted products.

From a torsion selection (strict basis, lifting depth N, xi's) this builds the
polynomial matrix B, certifies the strict contraction of the product seed
F = B^-1 Theta^-1 B^(1), accumulates the right-multiplied infinite product,
and extracts periods and quasi-periods from the factored entry forms.  Three
independent routes to the same matrix (iterated product, deformation closed
form, Anderson generating functions) cross-validate every run.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .core import frob_capped, log_deformation
from .errors import BudgetExceededError, ContractionError
from .laurent import NEG_INF, LaurentNum
from .tate import TateMatrix, TateSeries
from .torsion import moore_det


@dataclass
class RatConfig:
    t_trunc: int = 24
    epsilon_logq: Fraction = Fraction(-24)   # Gauss-norm target for the product tail
    factor_budget: int = 64
    deformation_terms: int = 24

    def __post_init__(self):
        if self.epsilon_logq >= 0:
            raise ValueError("epsilon must be < 1, i.e. epsilon_logq < 0")


def _twist_cap(mat_or_series, k, cfg):
    d = mat_or_series.gauss_deg()
    extra = 0
    if d != NEG_INF and d > 0:
        f = Fraction(d) * (cfg.q ** k)
        extra = -(-f.numerator * cfg.e // f.denominator)
    return 2 * cfg.prec + extra


def companion_matrix(phi, T):
    """Theta: identity superdiagonal; bottom row ((t-theta)/A_r, -A_1/A_r, ...)."""
    cfg = phi.cfg
    r = phi.r
    Ar_inv = phi.A[-1].inv()
    rows = [[TateSeries.zero(cfg, T) for _ in range(r)] for _ in range(r)]
    for i in range(r - 1):
        rows[i][i + 1] = TateSeries.one(cfg, T)
    rows[r - 1][0] = TateSeries.from_poly(cfg, [-phi.theta * Ar_inv, Ar_inv], T)
    for j in range(1, r):
        rows[r - 1][j] = TateSeries.from_poly(cfg, [-phi.A[j - 1] * Ar_inv], T)
    return TateMatrix(cfg, rows)


def companion_inverse(phi, T):
    """Theta^-1 = M/(t-theta): first row A_1..A_r over (t-theta), unit subdiagonal."""
    cfg = phi.cfg
    r = phi.r
    geo = TateSeries.geometric_inverse(cfg, phi.theta, T)
    rows = [[TateSeries.zero(cfg, T) for _ in range(r)] for _ in range(r)]
    for k in range(r):
        rows[0][k] = geo.scale(phi.A[k]) if not phi.A[k].is_zero() else TateSeries.zero(cfg, T)
    for i in range(1, r):
        rows[i][i - 1] = TateSeries.one(cfg, T)
    return TateMatrix(cfg, rows)


def build_B(sel, T):
    """B = (h_j^(i-1)) from the torsion selection, with the unit certificate
    det B = det X + y t, ||y|| < |det X|."""
    phi = sel.phi
    cfg = phi.cfg
    r = phi.r
    cols = []
    for j in range(r):
        h = TateSeries.from_poly(cfg, sel.h_coeffs(j), T)
        cols.append([h.twist(i, cap=_twist_cap(h, i, cfg)) for i in range(r)])
    B = TateMatrix(cfg, [[cols[j][i] for j in range(r)] for i in range(r)])
    detX = moore_det(sel.basis)
    detB = B.det()
    if not (detB.coeffs[0] - detX).is_zero():
        raise ContractionError("det B constant term differs from the Moore determinant")
    ydeg = max((c.deg for c in detB.coeffs[1:] if not c.is_zero()), default=NEG_INF)
    if not (ydeg < detX.deg):
        raise ContractionError("det B = det X + y t with ||y|| = q^%s >= |det X| = q^%s"
                               % (ydeg, detX.deg))
    return B


def xi_row_matrix(sel, T):
    """W: the xi's across the first row, zero elsewhere."""
    cfg = sel.phi.cfg
    r = sel.phi.r
    rows = [[TateSeries.zero(cfg, T) for _ in range(r)] for _ in range(r)]
    for j, xi in enumerate(sel.xi):
        rows[0][j] = TateSeries.from_poly(cfg, [xi], T)
    return TateMatrix(cfg, rows)


def contraction_factor(sel, B, T):
    """F = B^-1 Theta^-1 B^(1), computed directly and through the closed form
    I - t^N/(t-theta) B^-1 W; returns (F, delta_logq, B^-1)."""
    phi = sel.phi
    cfg = phi.cfg
    ident = TateMatrix.identity(cfg, phi.r, T)
    Binv = B.inv()
    F = Binv @ companion_inverse(phi, T) @ B.twist(1, cap=_twist_cap(B, 1, cfg))
    BinvW = Binv @ xi_row_matrix(sel, T)
    geo = TateSeries.geometric_inverse(cfg, phi.theta, T)
    closed = ident - _shift_matrix(BinvW.scale(geo), sel.N)
    dev = F - ident
    if not (F - closed).is_zero():
        raise ContractionError("direct and closed forms of the product seed disagree")
    # ||B^-1 W|| < q, equivalently delta < 1
    bw = BinvW.gauss_deg()
    if not (bw < 1):
        raise ContractionError("||B^-1 W|| = q^%s is not < q" % bw)
    delta = dev.gauss_deg()
    if not (delta < 0):
        raise ContractionError("||F - I|| = q^%s is not < 1" % delta)
    order = min(e.t_order() for row in dev.rows for e in row if not e.is_zero())
    if order < sel.N:
        raise ContractionError("F - I has t-order %d < N = %d" % (order, sel.N))
    return F, delta, Binv


def _shift_matrix(mat, n):
    return TateMatrix(mat.cfg, [[e.shift_t(n) for e in row] for row in mat.rows])


@dataclass
class ProductDiagnostics:
    factors_used: int
    factor_norms_logq: list
    tail_bound_logq: Fraction
    residual_logq: object
    residual_bound_logq: object


def rat_product(sel, B, F, delta, config):
    """Pi = B * prod_n F^(n) with the two-part stopping rule: the first omitted
    index n satisfies delta^(q^n) < epsilon and n*N > t_trunc."""
    phi = sel.phi
    cfg = phi.cfg
    q = cfg.q
    T = config.t_trunc
    n_omit = 0
    while not (delta * q ** n_omit < config.epsilon_logq and n_omit * sel.N > T):
        n_omit += 1
        if n_omit > config.factor_budget:
            raise BudgetExceededError(
                "factor budget %d exhausted before both stopping conditions "
                "(delta = q^%s, epsilon = q^%s, N = %d, t_trunc = %d)"
                % (config.factor_budget, delta, config.epsilon_logq, sel.N, T))
    ident = TateMatrix.identity(cfg, phi.r, T)
    Pi = B
    Fn = F
    norms = []
    for n in range(n_omit):
        dev = Fn - ident
        measured = dev.gauss_deg()
        norms.append(measured)
        if measured != NEG_INF:
            if measured != delta * q ** n:
                raise ContractionError("||F^(%d) - I|| = q^%s, expected q^%s"
                                       % (n, measured, delta * q ** n))
            Pi = Pi @ Fn
        if n + 1 < n_omit:
            Fn = Fn.twist(1, cap=2 * cfg.prec)
    tail = delta * q ** n_omit
    # functional-equation residual: its nonzero part must come from the omitted
    # product tail; the rest is zero at the propagated precision of the operands
    Theta = companion_matrix(phi, T)
    ThetaPi = Theta @ Pi
    R = Pi.twist(1, cap=_twist_cap(Pi, 1, cfg)) - ThetaPi
    resid_upper = R.gauss_deg_upper()
    resid_nonzero = R.gauss_deg()
    tail_bound = ThetaPi.gauss_deg() + tail
    if resid_nonzero != NEG_INF and not (resid_nonzero <= tail_bound):
        raise ContractionError("functional-equation residual q^%s exceeds the "
                               "truncation bound q^%s" % (resid_nonzero, tail_bound))
    bound = max(tail_bound, resid_upper)
    diag = ProductDiagnostics(factors_used=n_omit, factor_norms_logq=norms,
                              tail_bound_logq=tail, residual_logq=resid_upper,
                              residual_bound_logq=bound)
    return Pi, diag


def entrywise_closed_form(sel, config):
    """[Pi]_{ij} = (h_j - t^N/(t-theta) L(xi_j; t))^(i-1), assembled from the
    logarithm deformation; also returns the factored pieces per column."""
    phi = sel.phi
    cfg = phi.cfg
    r = phi.r
    T = config.t_trunc
    cols = []
    factored = []
    for j in range(r):
        h = TateSeries.from_poly(cfg, sel.h_coeffs(j), T)
        L = log_deformation(phi, sel.xi[j], T, n_max=config.deformation_terms)
        factored.append((h, L))
        col = []
        for i in range(r):
            hi = h.twist(i, cap=_twist_cap(h, i, cfg))
            Li = L.twist(i, cap=_twist_cap(L, i, cfg))
            geo = TateSeries.geometric_inverse(cfg, phi.theta.frobenius(i, cap=4 * cfg.prec), T)
            col.append(hi - (geo * Li).shift_t(sel.N))
        cols.append(col)
    Pi = TateMatrix(cfg, [[cols[j][i] for j in range(r)] for i in range(r)])
    return Pi, factored


def periods_and_quasi(sel, factored, config):
    """Periods pi_j = -((t-theta)[Pi]_{1j})|_theta = theta^N L(xi_j; theta),
    cross-checked against theta^N log(xi_j); quasi-periods eta_{i,j} =
    ([Pi]_{ij})|_theta for 2 <= i <= r, cross-checked against the twisted
    partial-fraction values sum_n alpha_n^(q^i) pi^(q^(n+i)) / (theta^(q^(n+i)) - theta)."""
    phi = sel.phi
    cfg = phi.cfg
    thN = LaurentNum.theta(cfg) ** sel.N
    periods = []
    for j in range(phi.r):
        _, L = factored[j]
        pj = thN * L.eval_at_theta()
        alt = thN * phi.log_eval(sel.xi[j])
        if not (pj - alt).is_zero():
            raise ContractionError("period %d: residue route and theta^N log route disagree" % j)
        periods.append(pj)
    quasi = []
    for i in range(1, phi.r):
        row = []
        for j in range(phi.r):
            h, L = factored[j]
            hi = h.twist(i, cap=_twist_cap(h, i, cfg))
            Li = L.twist(i, cap=_twist_cap(L, i, cfg))
            geo = TateSeries.geometric_inverse(cfg, phi.theta.frobenius(i, cap=4 * cfg.prec),
                                               config.t_trunc)
            val = hi.eval_at_theta() - ((geo * Li).shift_t(sel.N)).eval_at_theta()
            alt = _quasi_partial_fractions(phi, periods[j], i)
            if not (val - alt).is_zero():
                raise ContractionError("quasi-period (%d,%d): entry evaluation and "
                                       "partial-fraction oracle disagree" % (i + 1, j + 1))
            row.append(val)
        quasi.append(row)
    return periods, quasi


def _quasi_partial_fractions(phi, period, i, budget=64):
    cfg = phi.cfg
    q = cfg.q
    acc = LaurentNum.zero(cfg, period.prec)
    floor = Fraction(-min(period.prec, 2 * cfg.prec), cfg.e)
    below = 0
    for n in range(budget):
        # |alpha_n^(q^i) pi^(q^(n+i)) / (theta^(q^(n+i)) - theta)|
        term_bound = (q ** i * phi.exp_norm_bounds(n)[n]
                      + q ** (n + i) * period.deg - q ** (n + i))
        if term_bound <= floor:
            below += 1
            if below >= 2:
                return acc.truncate(min(acc.prec, int(-floor * cfg.e)))
            continue
        below = 0
        alpha_n = phi.exp_coeffs(n)[n]
        num = alpha_n.frobenius(i, cap=4 * cfg.prec) \
            * frob_capped(period, n + i, alpha_n.deg * cfg.q ** i)
        den = phi.theta_qn_minus_theta(n + i, window=4 * cfg.prec + max(0, -num.lead))
        term = num / den
        if term.is_zero() and term.prec_deg > term_bound:
            acc = acc.truncate(min(acc.prec, int(-term_bound * cfg.e)))
        else:
            acc = acc + term
    raise BudgetExceededError("quasi-period partial fractions did not settle")


def upsilon_matrix(phi, periods, T):
    """Pellarin's matrix from Anderson generating functions of the periods."""
    cfg = phi.cfg
    r = phi.r
    fs = [phi.agf(p, T) for p in periods]
    rows = []
    for i in range(r):
        rows.append([f.twist(i, cap=_twist_cap(f, i, cfg)) for f in fs])
    U = TateMatrix(cfg, rows)
    Theta = companion_matrix(phi, T)
    resid = (U.twist(1, cap=_twist_cap(U, 1, cfg)) - Theta @ U).gauss_deg_upper()
    return U, resid


# ---------------------------------------------------------------------------
# references: the rank-1 products

def carlitz_reference(cfg, T, i_choice=None, budget=64):
    """The rank-1 period as a truncated product, and the product expansion of
    the associated generating series (pi_tilde, omega)."""
    q = cfg.q
    if cfg.e % (q - 1):
        from .errors import RamificationNeeded
        raise RamificationNeeded(_lcm(cfg.e, q - 1), "(q-1)-st root of -theta needs a finer lattice")
    i_elem = i_choice if i_choice is not None else (-cfg.one()).nth_root(q - 1)
    root = LaurentNum.theta_power(cfg, Fraction(1, q - 1)).scale(i_elem)  # (-theta)^(1/(q-1))
    # pi_tilde = -root^q * prod_{n>=1} (1 - theta^(1-q^n))^-1
    acc = -(root ** q)
    for n in range(1, budget):
        if q ** n - 1 > cfg.prec / cfg.e:
            break
        factor = LaurentNum.one(cfg) - LaurentNum.theta_power(cfg, 1 - q ** n)
        acc = acc * factor.inv()
    pi_tilde = acc
    # omega = root * prod_{n>=0} (1 - t/theta^(q^n))^-1
    omega = TateSeries.from_poly(cfg, [root], T).with_tail("unit-disk")
    for n in range(0, budget):
        if q ** n > cfg.prec / cfg.e + 1:
            break
        thqn_inv = LaurentNum.theta_power(cfg, -(q ** n))
        fac = TateSeries(cfg, [LaurentNum.one(cfg), -thqn_inv], T, "unit-disk")
        omega = omega * fac.unit_inv()
    return pi_tilde, omega


def legendre_check(periods, quasi, pi_tilde):
    """(pi_1 eta_2 - pi_2 eta_1)/pi_tilde; asserts the ratio is a constant of
    the quadratic extension and returns it as a LaurentNum."""
    pi1, pi2 = periods
    eta1, eta2 = quasi[0]
    ratio = (pi1 * eta2 - pi2 * eta1) / pi_tilde
    if ratio.is_zero() or ratio.deg != 0:
        raise ContractionError("Legendre ratio is not a unit constant (deg %s)"
                               % (ratio.deg if not ratio.is_zero() else NEG_INF))
    c = ratio.sign()
    rest = ratio - LaurentNum.monomial(ratio.cfg, c, 0, ratio.prec)
    if not rest.is_zero():
        raise ContractionError("Legendre ratio has lower-order terms (deg %s)" % rest.deg)
    cfg = ratio.cfg
    if c.pow_q(2) != c:
        raise ContractionError("Legendre constant %s is not in F_{q^2}" % c)
    return ratio


def nonstrict_regression(sel, T):
    """det B' for the sheared (non-strict) basis x_1' = x_1 + x_2, x_2' = x_2
    with xi_1' = xi_1 + xi_2 + x_1, xi_2' = xi_2: the t-coefficient norm equals
    the constant-term norm, breaking the strict-basis determinant shape."""
    cfg = sel.phi.cfg
    x1, x2 = sel.basis
    xi1, xi2 = sel.xi
    h1p = TateSeries.from_poly(cfg, [x1 + x2, xi1 + xi2 + x1], T)
    h2p = TateSeries.from_poly(cfg, [x2, xi2], T)
    Bp = TateMatrix(cfg, [[h1p, h2p],
                          [h1p.twist(1, cap=_twist_cap(h1p, 1, cfg)),
                           h2p.twist(1, cap=_twist_cap(h2p, 1, cfg))]])
    return Bp.det()


def basis_change_check(phi, periods, T, shears):
    """Upsilon built on a sheared period basis satisfies U' = U * E(t) with
    det E in F_q^*; verifies the product identity for a concrete unimodular E.

    shears: (i, j, coeffs) with i != j and prime-field integer coefficients,
    each contributing an elementary matrix I + poly(t) E_ij.
    """
    cfg = phi.cfg
    r = phi.r
    ident = TateMatrix.identity(cfg, r, T)
    E = ident
    for (i, j, coeffs) in shears:
        S = TateMatrix.identity(cfg, r, T)
        rows = [list(row) for row in S.rows]
        rows[i][j] = TateSeries.from_poly(cfg, [LaurentNum.monomial(cfg, c, 0) for c in coeffs], T)
        E = E @ TateMatrix(cfg, rows)
    # new periods: omega_j = sum_i E_ij(theta) pi_i
    th = phi.theta
    new_periods = []
    for j in range(r):
        acc = LaurentNum.zero(cfg)
        for i in range(r):
            val = LaurentNum.zero(cfg)
            for k, c in enumerate(E.rows[i][j].coeffs):
                if not c.is_zero():
                    val = val + c * th ** k
            acc = acc + val * periods[i]
        new_periods.append(acc)
    U, _ = upsilon_matrix(phi, periods, T)
    U2, _ = upsilon_matrix(phi, new_periods, T)
    detE = E.det()
    c0 = detE.coeffs[0]
    unit = (not c0.is_zero()) and c0.deg == 0 and all(c.is_zero() for c in detE.coeffs[1:])
    return (U2 - U @ E), detE, unit


def partial_product_closed(sel, n, T):
    """Pi_n = B - t^N sum_{m=0}^n R_m W^(m) with
    R_m = Theta^-1 (Theta^-1)^(1) ... (Theta^-1)^(m-1) / (t - theta^(q^m))."""
    phi = sel.phi
    cfg = phi.cfg
    B = build_B(sel, T)
    W = xi_row_matrix(sel, T)
    Thinv = companion_inverse(phi, T)
    acc = B
    prodR = TateMatrix.identity(cfg, phi.r, T)
    for m in range(n + 1):
        if m > 0:
            prodR = prodR @ Thinv.twist(m - 1, cap=_twist_cap(Thinv, m - 1, cfg))
        geo = TateSeries.geometric_inverse(cfg, phi.theta.frobenius(m, cap=4 * cfg.prec), T)
        Rm = prodR.scale(geo)
        term = _shift_matrix(Rm @ W.twist(m, cap=_twist_cap(W, m, cfg)), sel.N)
        acc = acc - term
    return acc


def _lcm(a, b):
    from math import gcd
    return a * b // gcd(a, b)


# ---------------------------------------------------------------------------
# one-stop driver

@dataclass
class RatReport:
    selection: object
    companion: TateMatrix
    basis_matrix: TateMatrix
    delta_logq: Fraction
    product: TateMatrix
    closed_form: TateMatrix
    upsilon: TateMatrix
    periods: list
    quasi: list
    diagnostics: ProductDiagnostics
    upsilon_residual_logq: object
    agreement_logq: object

    def to_json(self):
        frac = lambda x: ([x.numerator, x.denominator] if isinstance(x, Fraction)
                          else [int(x), 1] if isinstance(x, int) else None)
        d = self.diagnostics
        return {
            "polygon": self.selection.polygon.to_json(),
            "torsion": self.selection.to_json(),
            "delta_logq": frac(self.delta_logq),
            "companion": self.companion.to_json(),
            "basis_matrix": self.basis_matrix.to_json(),
            "product": self.product.to_json(),
            "periods": [p.to_json() for p in self.periods],
            "period_degrees": [frac(p.deg) for p in self.periods],
            "quasi": [[v.to_json() for v in row] for row in self.quasi],
            "residual_logq": frac(d.residual_logq),
            "residual_bound_logq": frac(d.residual_bound_logq),
            "factors_used": d.factors_used,
            "factor_norms_logq": [frac(v) if v != NEG_INF else None
                                  for v in d.factor_norms_logq],
            "upsilon_residual_logq": frac(self.upsilon_residual_logq),
            "agreement_logq": frac(self.agreement_logq) if self.agreement_logq != NEG_INF else None,
        }


def trivialize(phi, config=None, sign_targets=None, e_cap=None):
    """Full pipeline: torsion selection, product, closed form, periods and
    quasi-periods, Anderson-generating-function oracle; every cross-check on.

    The returned report's selection may live on a finer ramification lattice
    than the input module (automatic refits).
    """
    config = config or RatConfig()
    from .torsion import build_xi
    sel = build_xi(phi, sign_targets=sign_targets, e_cap=e_cap)
    phi = sel.phi
    T = config.t_trunc
    B = build_B(sel, T)
    F, delta, _ = contraction_factor(sel, B, T)
    Pi, diag = rat_product(sel, B, F, delta, config)
    closed, factored = entrywise_closed_form(sel, config)
    d1 = Pi - closed
    if not d1.is_zero():
        agree = d1.gauss_deg()
        if not (agree <= Pi.gauss_deg() + diag.tail_bound_logq):
            raise ContractionError("product and closed form disagree at q^%s" % agree)
    periods, quasi = periods_and_quasi(sel, factored, config)
    U, u_resid = upsilon_matrix(phi, periods, T)
    d2 = Pi - U
    agreement = max(d1.gauss_deg_upper(), d2.gauss_deg_upper())
    if not d2.is_zero():
        agree = d2.gauss_deg()
        if not (agree <= Pi.gauss_deg() + diag.tail_bound_logq):
            raise ContractionError("product and AGF oracle disagree at q^%s" % agree)
    return RatReport(selection=sel, companion=companion_matrix(phi, T), basis_matrix=B,
                     delta_logq=delta, product=Pi, closed_form=closed, upsilon=U,
                     periods=periods, quasi=quasi, diagnostics=diag,
                     upsilon_residual_logq=u_resid, agreement_logq=agreement)
