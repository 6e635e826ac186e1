"""Drinfeld modules and their analytic companions.

phi_t = theta + A_1 tau + ... + A_r tau^r acts on the computational K and on
truncated Tate series.  This module carries the exponential/logarithm
coefficient recursions (forced by exp(theta z) = phi_t(exp z)), Anderson
generating functions, shadowed partitions with the rational functions they
index, the logarithm deformation, and the convergence radius data.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import BudgetExceededError, RadiusError
from .laurent import NEG_INF, LaurentNum
from .tate import TateSeries


class DrinfeldModule:
    """Rank-r module given by the coefficients A_1..A_r (A_r nonzero)."""

    def __init__(self, cfg, A):
        A = list(A)
        if not A or A[-1].is_zero():
            raise ValueError("rank coefficient A_r must be nonzero")
        self.cfg = cfg
        self.A = tuple(A)
        self.r = len(A)
        self.theta = LaurentNum.theta(cfg)
        self._alpha = [LaurentNum.one(cfg)]
        self._beta = [LaurentNum.one(cfg)]
        self._alpha_bounds = [Fraction(0)]
        self._beta_bounds = [Fraction(0)]

    def support(self):
        """N(phi): indices i with A_i nonzero."""
        return [i for i, a in enumerate(self.A, start=1) if not a.is_zero()]

    def refit(self, e_new):
        """The same module over the finer lattice u = theta^(-1/e_new)."""
        if e_new == self.cfg.e:
            return self
        return DrinfeldModule(self.cfg.with_e(e_new), [a.refit(e_new) for a in self.A])

    def coeff(self, i):
        """A_i, with A_0 := theta."""
        return self.theta if i == 0 else self.A[i - 1]

    def operator_terms(self):
        """phi_t as q-power terms [(0, theta), (i, A_i)...]."""
        return [(0, self.theta)] + [(i, a) for i, a in enumerate(self.A, start=1)
                                    if not a.is_zero()]

    # -- module action -------------------------------------------------------

    def phi_t(self, x):
        acc = self.theta * x
        for i, a in enumerate(self.A, start=1):
            if not a.is_zero():
                acc = acc + a * x.frobenius(i, cap=4 * self.cfg.prec + max(0, -a.lead))
        return acc

    def phi_t_pow(self, k, x):
        for _ in range(k):
            x = self.phi_t(x)
        return x

    def phi(self, a_coeffs, x):
        """phi_a(x) for a = sum a_k t^k with a_k integers mod p (or FFElem)."""
        acc = LaurentNum.zero(self.cfg, x.prec)
        y = x
        for c in a_coeffs:
            acc = acc + y * (self.cfg.elem(c) if isinstance(c, int) else c)
            y = self.phi_t(y)
        return acc

    def phi_t_series(self, f, cap=None):
        """phi_t as the operator theta f + sum A_i f^(i) on Tate series."""
        acc = f.scale(self.theta)
        for i, a in enumerate(self.A, start=1):
            if not a.is_zero():
                acc = acc + f.twist(i, cap=cap).scale(a)
        return acc

    def theta_qn_minus_theta(self, n, window=None):
        """theta^(q^n) - theta to a bounded relative window (the full lattice
        window would be e*q^n wide)."""
        cfg = self.cfg
        window = window or 4 * cfg.prec
        lead = -cfg.e * cfg.q ** n
        thqn = self.theta.frobenius(n, cap=lead + window)
        return thqn - self.theta.truncate(lead + window)

    # -- exponential / logarithm ----------------------------------------------

    def exp_coeffs(self, n_max):
        """alpha_0..alpha_n with exp(z) = sum alpha_n z^(q^n).

        Matching q^n-coefficients in exp(theta z) = phi_t(exp z) gives
        alpha_n (theta^(q^n) - theta) = sum_{i=1}^{min(n,r)} A_i alpha_{n-i}^(q^i).
        """
        alpha = self._alpha
        cap = 4 * self.cfg.prec
        for n in range(len(alpha), n_max + 1):
            acc = LaurentNum.zero(self.cfg)
            for i in range(1, min(n, self.r) + 1):
                a = self.A[i - 1]
                if not a.is_zero():
                    acc = acc + a * alpha[n - i].frobenius(i, cap=cap + max(0, -a.lead))
            alpha.append(acc / self.theta_qn_minus_theta(n))
        return alpha[:n_max + 1]

    def log_coeffs(self, n_max):
        """beta_0..beta_n with log(z) = sum beta_n z^(q^n);
        beta_n (theta - theta^(q^n)) = sum beta_{n-i} A_i^(q^(n-i))."""
        beta = self._beta
        cap = 4 * self.cfg.prec
        for n in range(len(beta), n_max + 1):
            acc = LaurentNum.zero(self.cfg)
            for i in range(1, min(n, self.r) + 1):
                a = self.A[i - 1]
                if not a.is_zero():
                    acc = acc + beta[n - i] * a.frobenius(n - i, cap=cap + max(0, -a.lead))
            beta.append(acc / (-self.theta_qn_minus_theta(n)))
        return beta[:n_max + 1]

    def exp_norm_bounds(self, n_max):
        """Rigorous upper bounds on deg alpha_n (ultrametric bound on the
        defining recursion); exact rationals, no field arithmetic."""
        q = self.cfg.q
        a = self._alpha_bounds
        degs = {i: self.coeff(i).deg for i in self.support()}
        for n in range(len(a), n_max + 1):
            cands = [degs[i] + q ** i * a[n - i] for i in degs if i <= n]
            a.append((max(cands) if cands else NEG_INF) - q ** n)
        return a[:n_max + 1]

    def log_norm_bounds(self, n_max):
        """Rigorous upper bounds on deg beta_n."""
        q = self.cfg.q
        b = self._beta_bounds
        degs = {i: self.coeff(i).deg for i in self.support()}
        for n in range(len(b), n_max + 1):
            cands = [b[n - i] + q ** (n - i) * degs[i] for i in degs if i <= n]
            b.append((max(cands) if cands else NEG_INF) - q ** n)
        return b[:n_max + 1]

    def exp_eval(self, z, budget=64):
        """exp(z), summed until terms sink below the precision floor."""
        return self._qseries_eval(self.exp_coeffs, self.exp_norm_bounds, z, budget, "exp")

    def log_eval(self, z, budget=64):
        """log(z) for |z| strictly inside the convergence radius; an isometry there."""
        rad = self.radius()
        if not z.is_zero() and z.deg >= rad.logq_radius:
            raise RadiusError("|z| = q^%s is not inside the radius q^%s of the logarithm"
                              % (z.deg, rad.logq_radius))
        out = self._qseries_eval(self.log_coeffs, self.log_norm_bounds, z, budget, "log")
        if not z.is_zero():
            assert out.deg == z.deg, "logarithm failed to be an isometry"
        return out

    def _qseries_eval(self, coeff_fn, bound_fn, z, budget, label):
        if z.is_zero():
            return z
        cfg = self.cfg
        q = cfg.q
        floor = Fraction(-min(z.prec, 2 * cfg.prec), cfg.e)
        acc = LaurentNum.zero(cfg, z.prec)
        below = 0
        for n in range(budget + 1):
            term_bound = bound_fn(n)[n] + q ** n * z.deg
            if term_bound <= floor:
                below += 1
                if below >= 2:
                    return acc.truncate(min(acc.prec, int(-floor * cfg.e)))
                continue
            below = 0
            c = coeff_fn(n)[n]
            term = c * frob_capped(z, n, c.deg)
            if term.is_zero() and term.prec_deg > term_bound:
                # the stored precision is weaker than the a-priori bound
                acc = acc.truncate(min(acc.prec, int(-term_bound * cfg.e)))
            else:
                acc = acc + term
        raise BudgetExceededError("%s series did not settle within %d terms" % (label, budget))

    # -- Anderson generating functions ------------------------------------------

    def agf(self, u, T):
        """f(u;t) = sum_m exp(u/theta^(m+1)) t^m."""
        cfg = self.cfg
        coeffs = []
        thinv = self.theta.inv()
        z = u * thinv
        for _ in range(T + 1):
            coeffs.append(self.exp_eval(z))
            z = z * thinv
        return TateSeries(cfg, coeffs, T, "theta-disk")

    def agf_partial_fractions(self, u, T, budget=64):
        """The same function as sum_n alpha_n u^(q^n) / (theta^(q^n) - t)."""
        cfg = self.cfg
        q = cfg.q
        cap = cfg.prec * 4
        acc = TateSeries.zero(cfg, T, "theta-disk")
        if u.is_zero():
            return acc
        floor = Fraction(-min(u.prec, 2 * cfg.prec), cfg.e)
        below = 0
        for n in range(budget + 1):
            # term Gauss norm <= |alpha_n| |u|^(q^n) q^(-q^n)
            term_bound = self.exp_norm_bounds(n)[n] + q ** n * u.deg - q ** n
            if term_bound <= floor:
                below += 1
                if below >= 2:
                    return acc
                continue
            below = 0
            alpha_n = self.exp_coeffs(n)[n]
            num = alpha_n * frob_capped(u, n, alpha_n.deg)
            geo = TateSeries.geometric_inverse(cfg, self.theta.frobenius(n, cap=cap), T)
            acc = acc + geo.scale(-num)
        raise BudgetExceededError("partial fraction tail did not settle")

    # -- radius ------------------------------------------------------------------

    def radius(self):
        """mu_i data and the convergence radius R of the logarithm."""
        mus = {}
        for i in self.support():
            q_i = self.cfg.q ** i
            mus[i] = Fraction(self.coeff(i).deg - q_i, q_i - 1)
        m_star = min(i for i in mus if all(mus[i] >= mus[j] for j in mus))
        return RadiusData(mu=mus, m_star=m_star, logq_radius=-mus[m_star])

    # -- i/o -----------------------------------------------------------------------

    def to_json(self):
        return {"r": self.r, "A": [a.to_json() for a in self.A]}

    @classmethod
    def from_json(cls, cfg, obj):
        return cls(cfg, [LaurentNum.from_json(cfg, a) for a in obj["A"]])

    def __repr__(self):
        return "<DrinfeldModule r=%d over q=%d, deg A = %s>" % (
            self.r, self.cfg.q, [a.deg for a in self.A])


@dataclass
class RadiusData:
    mu: dict
    m_star: int
    logq_radius: Fraction


def frob_capped(z, n, against_deg, slack=2):
    """z^(q^n) with precision capped adaptively: enough that a product with a
    multiplier of degree `against_deg` still certifies smallness down to the
    working precision floor."""
    cfg = z.cfg
    extra = 0
    if against_deg not in (NEG_INF,) and against_deg > 0:
        frac = Fraction(against_deg)
        extra = -(-frac.numerator * cfg.e // frac.denominator)
    return z.frobenius(n, cap=slack * cfg.prec + extra)


def carlitz(cfg):
    """The Carlitz module C_t(x) = theta x + x^q."""
    return DrinfeldModule(cfg, [LaurentNum.one(cfg)])


# -------------------------------------------------------------------------------
# shadowed partitions and the rational functions they index

def shadowed_partitions(r, n):
    """All r-tuples (S_1..S_r) of subsets of {0..n-1} such that the shifted
    copies S_i + j (0 <= j < i) tile {0..n-1}.  Equivalently: tilings of a row
    of n cells by blocks of length 1..r, S_i holding the start of each i-block.
    """
    if n == 0:
        return [tuple(frozenset() for _ in range(r))]
    out = []

    def place(pos, blocks):
        if pos == n:
            tup = [set() for _ in range(r)]
            for start, size in blocks:
                tup[size - 1].add(start)
            out.append(tuple(frozenset(s) for s in tup))
            return
        for size in range(1, min(r, n - pos) + 1):
            place(pos + size, blocks + [(pos, size)])

    place(0, [])
    return out


def bn_enumerated(phi, n, T):
    """B_n(t) by direct summation over shadowed partitions (test oracle)."""
    cfg = phi.cfg
    acc = TateSeries.zero(cfg, T, "theta-disk")
    one = TateSeries.one(cfg, T)
    cap = cfg.prec * 4
    for tup in shadowed_partitions(phi.r, n):
        term = one
        ok = True
        for i, S in enumerate(tup, start=1):
            for j in S:
                a = phi.coeff(i)
                if a.is_zero():
                    ok = False
                    break
                geo = TateSeries.geometric_inverse(cfg, phi.theta.frobenius(i + j, cap=cap), T)
                term = term * geo.scale(a.frobenius(j, cap=cap))
            if not ok:
                break
        if ok:
            acc = acc + term
    return acc.with_tail("theta-disk")


def bn_norm_bounds(phi, n_max):
    """Rigorous upper bounds on the Gauss norms of the B_n (ultrametric bound
    on the recursion; each 1/(t - theta^(q^k)) contributes q^(-q^k))."""
    q = phi.cfg.q
    degs = {i: phi.coeff(i).deg for i in phi.support()}
    out = [Fraction(0)]
    for mth in range(1, n_max + 1):
        cands = [degs[k] + q ** k * out[mth - k] - q ** k for k in degs if k <= mth]
        out.append(max(cands) if cands else NEG_INF)
    return out


def bn_series(phi, n_max, T):
    """B_0..B_n by the linear recursion
    B_m = sum_{k=1}^{min(m,r)} A_k B_{m-k}^(k) / (t - theta^(q^k))."""
    cfg = phi.cfg
    cap = cfg.prec * 4
    out = [TateSeries.one(cfg, T).with_tail("theta-disk")]
    geos = {}
    for mth in range(1, n_max + 1):
        acc = TateSeries.zero(cfg, T, "theta-disk")
        for k in range(1, min(mth, phi.r) + 1):
            a = phi.coeff(k)
            if a.is_zero():
                continue
            if k not in geos:
                geos[k] = TateSeries.geometric_inverse(cfg, phi.theta.frobenius(k, cap=cap), T)
            acc = acc + (out[mth - k].twist(k, cap=cap) * geos[k]).scale(a)
        out.append(acc.with_tail("theta-disk"))
    return out


def log_deformation(phi, xi, T, n_max=24):
    """L(xi;t) = sum_n B_n(t) xi^(q^n), for |xi| inside the log radius.

    Gauss norms of the terms are required to decrease before n_max is spent.
    """
    rad = phi.radius()
    if not xi.is_zero() and xi.deg >= rad.logq_radius:
        raise RadiusError("|xi| = q^%s not inside the radius q^%s"
                          % (xi.deg, rad.logq_radius))
    cfg = phi.cfg
    q = cfg.q
    acc = TateSeries.zero(cfg, T, "theta-disk")
    if xi.is_zero():
        return acc
    bns = bn_series(phi, n_max, T)
    bounds = bn_norm_bounds(phi, n_max)
    floor = Fraction(-min(xi.prec, 2 * cfg.prec), cfg.e)
    below = 0
    for n in range(n_max + 1):
        term_bound = bounds[n] + q ** n * xi.deg
        if term_bound <= floor:
            below += 1
            if below >= 2:
                return acc
            continue
        below = 0
        term = bns[n].scale(frob_capped(xi, n, bns[n].gauss_deg()))
        if term.is_zero() and term.gauss_deg_upper() > term_bound:
            # fold the sharper a-priori bound instead of the junk precision
            pu = int(-term_bound * cfg.e)
            acc = TateSeries(cfg, [c.truncate(min(c.prec, pu)) for c in acc.coeffs],
                             T, acc.tail)
        else:
            acc = acc + term
    raise BudgetExceededError("deformation did not settle within n_max=%d terms "
                              "(terms still above the precision floor)" % n_max)


def compose_q_series(cfg, f, g):
    """Coefficients of f(g(z)) for q-power series f = sum f_k z^(q^k)."""
    n = min(len(f), len(g))
    out = [LaurentNum.zero(cfg) for _ in range(n)]
    for k, fk in enumerate(f):
        if fk.is_zero():
            continue
        for i, gi in enumerate(g):
            if i + k >= n:
                break
            if not gi.is_zero():
                out[i + k] = out[i + k] + fk * gi.frobenius(k)
    return out
