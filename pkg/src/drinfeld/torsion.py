"""Newton polygon of phi_t(x), t-division sequences, strict torsion bases.

The polygon data (vertices, slopes, intercepts) is exact rational arithmetic
on coefficient degrees.  Root-finding for the additive polynomial phi_t(X) - y
proceeds term by term: each step solves the leading-coefficient equation of
the minimal-slope edge of the current residual's polygon (an F_p-linear system
over F_{q^M}), which kills the residual's leading term; additivity makes the
residual update a handful of monomial evaluations.  Once the residual degree
drops below the contraction threshold, division by the linear coefficient
converges superlinearly and finishes the root.

Every lift is canonicalized by reducing against previously found torsion
elements of strictly smaller degree (coset representative with the canonical
coefficient at each such element's leading slot), which pins the otherwise
free t-torsion summands deterministically.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (BudgetExceededError, ContractionError, ExtensionNeeded,
                     RamificationNeeded, StrictnessError)
from .fields import minimal_extension_for, solve_qlinear
from .laurent import NEG_INF, LaurentNum


# ---------------------------------------------------------------------------
# polygon machinery (pure rational arithmetic)

@dataclass
class PolygonData:
    s: int
    d: list                    # vertex exponents d_0 = 0 < d_1 < ... < d_s = r
    slopes: list               # lambda_1 < ... < lambda_s
    intercepts: list           # a_1 > ... > a_s
    points: list = field(default_factory=list)   # all (i, -deg A_i) incl. (0, -1)

    def slope_multiplicity(self, j):
        """Number of torsion-basis vectors of degree slopes[j-1] (1-indexed edge)."""
        return self.d[j] - self.d[j - 1]

    def to_json(self):
        frac = lambda x: [x.numerator, x.denominator]
        return {"edges": self.s, "vertex_exponents": list(self.d),
                "slopes": [frac(l) for l in self.slopes],
                "intercepts": [frac(a) for a in self.intercepts]}


def _lower_hull(points):
    """points: [(x, y)] sorted by x, distinct x; returns hull vertices with
    strictly increasing slopes (collinear interior points absorbed)."""
    hull = []
    for pt in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x2) >= (pt[1] - y2) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def newton_polygon(phi):
    """Lower convex hull of {(q^0, -1)} U {(q^i, -deg A_i) : A_i != 0}."""
    q = phi.cfg.q
    pts = [(0, Fraction(-1))]
    for i in phi.support():
        pts.append((i, -phi.coeff(i).deg))
    hull = _lower_hull([(q ** i, y) for i, y in pts])
    xs = {q ** i: i for i, _ in pts}
    d = [xs[x] for x, _ in hull]
    slopes, intercepts = [], []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        lam = Fraction(y2 - y1, x2 - x1)
        slopes.append(lam)
        intercepts.append(y1 - lam * x1)
    poly = PolygonData(s=len(slopes), d=d, slopes=slopes, intercepts=intercepts,
                       points=pts)
    assert all(a > b for a, b in zip(poly.intercepts, poly.intercepts[1:]))
    assert poly.intercepts[-1] + poly.slopes[-1] <= -1
    return poly


def prescribed_next_degree(poly, deg_y, q):
    """Degree of the next division-sequence element below y.

    -deg y in (a_1, oo): unique root of degree deg y - 1;
    -deg y in (a_{j+1}, a_j]: q^{d_j} roots of degree (deg y - deg A_{d_j})/q^{d_j}.
    """
    if deg_y > poly.slopes[-1]:
        raise ValueError("deg y = %s exceeds the largest torsion degree %s"
                         % (deg_y, poly.slopes[-1]))
    neg = -deg_y
    if neg > poly.intercepts[0]:
        return deg_y - 1
    # locate the interval (a_{j+1}, a_j]
    for j in range(1, poly.s):
        if poly.intercepts[j] < neg <= poly.intercepts[j - 1]:
            dj = poly.d[j]
            deg_A = -[y for i, y in poly.points if i == dj][0]
            return Fraction(deg_y - deg_A, q ** dj)
    raise ValueError("-deg y = %s is not above the lowest intercept %s"
                     % (neg, poly.intercepts[-1]))


def compute_N(poly, deg_y1, q):
    """Lifting depth N (first index with deg y_N < -a_1) and the full degree
    itinerary deg y_1, ..., deg y_N."""
    itinerary = [Fraction(deg_y1)]
    while -itinerary[-1] <= poly.intercepts[0]:
        itinerary.append(prescribed_next_degree(poly, itinerary[-1], q))
    return len(itinerary), itinerary


# ---------------------------------------------------------------------------
# additive operators and term-by-term root lifting

class AdditiveOperator:
    """g(X) = sum_i g_i X^(q^i) over the working field."""

    def __init__(self, cfg, terms):
        self.cfg = cfg
        self.terms = [(i, c) for i, c in sorted(terms) if not c.is_zero()]
        if not self.terms:
            raise ValueError("zero operator")

    @classmethod
    def of_module(cls, phi):
        return cls(phi.cfg, phi.operator_terms())

    def eval(self, x, cap=None):
        cap = cap or 4 * self.cfg.prec
        acc = LaurentNum.zero(self.cfg, x.prec)
        for i, c in self.terms:
            acc = acc + c * (x if i == 0 else x.frobenius(i, cap=cap + max(0, -c.lead)))
        return acc

    def hull_points(self):
        return [(i, -c.deg) for i, c in self.terms]

    def min_slope(self):
        q = self.cfg.q
        hull = _lower_hull([(q ** i, y) for i, y in self.hull_points()])
        (x1, y1), (x2, y2) = hull[0], hull[1]
        return Fraction(y2 - y1, x2 - x1)

    def slopes(self):
        q = self.cfg.q
        hull = _lower_hull([(q ** i, y) for i, y in self.hull_points()])
        return [Fraction(y2 - y1, x2 - x1) for (x1, y1), (x2, y2) in zip(hull, hull[1:])]

    def edge_indices_at(self, slope, extra_point=None):
        """Term indices whose polygon point lies on the support line of `slope`
        for the polygon of g(X) (with (0, -deg rhs) adjoined when given)."""
        q = self.cfg.q
        pts = [(q ** i, -c.deg, i) for i, c in self.terms]
        if extra_point is not None:
            pts.append((0, extra_point, None))
        best = min(y - slope * x for x, y, _ in pts)
        return [i for x, y, i in pts if i is not None and y - slope * x == best]

    def contraction_threshold(self):
        """Residual degrees strictly below this make division by the linear
        coefficient a contraction."""
        i0, g0 = self.terms[0]
        assert i0 == 0, "operator needs a linear term for the fast path"
        ths = [Fraction(self.cfg.q ** i * g0.deg - c.deg, self.cfg.q ** i - 1)
               for i, c in self.terms[1:]]
        return min(ths) if ths else None


def _canonical_slot_key(elem):
    return elem.val


def solve_additive(g, y, seed=None, budget=None):
    """A root x of g(X) = y continuing `seed` (or the minimal-degree root).

    Term-by-term: each step reads the minimal-slope edge of the Newton polygon
    of g(X) - r, solves its leading-coefficient equation, and subtracts.  Below
    the contraction threshold, switches to division by the linear coefficient
    (superlinear), with the residual-contraction check enforced each step.
    """
    cfg = g.cfg
    q = cfg.q
    if seed is None:
        x = LaurentNum.zero(cfg, y.prec)
        r = y
        prev_slope = None
    else:
        x = seed
        r = y - g.eval(seed)
        prev_slope = seed.deg
    thresh = g.contraction_threshold()
    i0, g0 = g.terms[0]
    budget = budget if budget is not None else 8 * cfg.prec + 64
    steps = 0
    while not r.is_zero():
        steps += 1
        if steps > budget:
            raise BudgetExceededError("root lifting exceeded %d steps" % budget)
        if thresh is not None and r.deg < thresh:
            # fast path: x <- x - r/g_0; residual r' = -sum_{i>=1} g_i (r/g_0)^(q^i)
            while not r.is_zero():
                steps += 1
                if steps > budget:
                    raise BudgetExceededError("division iteration exceeded %d steps" % budget)
                corr = r / g0
                x = x + corr
                nr = LaurentNum.zero(cfg, r.prec)
                for i, c in g.terms[1:]:
                    nr = nr - c * corr.frobenius(i, cap=2 * cfg.prec + max(0, -c.lead))
                if not nr.is_zero() and nr.deg >= r.deg:
                    raise ContractionError("residual degree failed to contract: %s -> %s"
                                           % (r.deg, nr.deg))
                r = nr
            break
        # minimal-slope edge of polygon(g(X) - r)
        pts = [(q ** i, -c.deg) for i, c in g.terms] + [(0, -r.deg)]
        hull = _lower_hull(sorted(pts))
        (x1, y1), (x2, y2) = hull[0], hull[1]
        slope = Fraction(y2 - y1, x2 - x1)
        if prev_slope is not None and slope >= prev_slope:
            raise ContractionError("correction degrees failed to decrease (%s then %s)"
                                   % (prev_slope, slope))
        prev_slope = slope
        u_exp_frac = -slope * cfg.e
        if u_exp_frac.denominator != 1:
            need = _lcm(cfg.e, slope.denominator)
            raise RamificationNeeded(need, "root lives on the 1/%d lattice" % need)
        u_exp = int(u_exp_frac)
        active = g.edge_indices_at(slope, extra_point=-r.deg)
        eq_terms = [(i, dict(g.terms)[i].sign()) for i in active]
        c = solve_qlinear(cfg, eq_terms, r.sign())
        if c is None:
            raise ExtensionNeeded(minimal_extension_for(cfg, eq_terms, r.sign()),
                                  "leading-coefficient equation has no root in F_%d" % cfg.card)
        mon_prec = r.prec + max(0, max(-cc.lead for _, cc in g.terms))
        x = x + LaurentNum.monomial(cfg, c, u_exp, mon_prec)
        r = r - g.eval(LaurentNum.monomial(cfg, c, u_exp, mon_prec))
    return x


def homogeneous_root(g, slope):
    """A nonzero root of g(X) = 0 of the given polygon slope (canonical kernel
    choice for the leading coefficient)."""
    cfg = g.cfg
    u_exp_frac = -slope * cfg.e
    if u_exp_frac.denominator != 1:
        raise RamificationNeeded(_lcm(cfg.e, slope.denominator),
                                 "torsion root lives on a finer lattice")
    active = g.edge_indices_at(slope)
    eq_terms = [(i, dict(g.terms)[i].sign()) for i in active]
    c = solve_qlinear(cfg, eq_terms, cfg.zero(), nonzero=True)
    if c is None:
        raise ExtensionNeeded(minimal_extension_for(cfg, eq_terms, cfg.zero(), nonzero=True),
                              "edge equation has no nonzero root in F_%d" % cfg.card)
    seed = LaurentNum.monomial(cfg, c, int(u_exp_frac))
    return solve_additive(g, LaurentNum.zero(cfg), seed=seed)


def twisted_right_divide(g, c_rho):
    """Quotient terms of g by rho = tau - c_rho (right division; remainder must
    vanish at precision, i.e. ker rho included in ker g)."""
    cfg = g.cfg
    n = max(i for i, _ in g.terms)
    gd = {i: coeff for i, coeff in g.terms}
    zero = LaurentNum.zero(cfg)
    qcoefs = {n - 1: gd.get(n, zero)}
    for i in range(n - 1, 0, -1):
        qcoefs[i - 1] = gd.get(i, zero) + qcoefs[i] * c_rho.frobenius(i, cap=4 * cfg.prec + max(0, -c_rho.lead) * cfg.q ** i)
    rem = gd.get(0, zero) + qcoefs[0] * c_rho
    if not rem.is_zero():
        raise StrictnessError("twisted division left a nonzero remainder (degree %s)" % rem.deg)
    return AdditiveOperator(cfg, list(qcoefs.items()))


# ---------------------------------------------------------------------------
# canonical reduction against smaller torsion

def reduce_against(x, smaller):
    """Canonical coset representative of x modulo F_q-multiples of each torsion
    element of strictly smaller degree: at each such element's leading slot,
    pick the representative with the canonical (zero-preferred) coefficient."""
    cfg = x.cfg
    # F_q inside F_{q^M}: powers of the (q-1)-st power of the primitive element
    subfield = [cfg.zero()]
    gq = cfg.primitive() ** ((cfg.card - 1) // (cfg.q - 1))
    cur = cfg.one()
    for _ in range(cfg.q - 1):
        subfield.append(cur)
        cur = cur * gq
    for b in sorted(smaller, key=lambda v: v.deg, reverse=True):
        if b.is_zero() or x.is_zero() or b.deg >= x.deg:
            continue
        slot = b.lead
        cur = x.coeff_at(slot)
        sb = b.sign()
        best = None
        for c in subfield:
            cand = cur - c * sb
            key = _canonical_slot_key(cand)
            if best is None or key < best[0]:
                best = (key, c)
        if best[1].val:
            x = x - b.scale(best[1])
    return x


# ---------------------------------------------------------------------------
# strict bases and the torsion selection

def moore_det(vals):
    """Determinant of the Moore matrix (x_j^(q^(i-1)))_{ij}."""
    cfg = vals[0].cfg
    r = len(vals)
    rows = [[x.frobenius(i, cap=8 * cfg.prec + 8 * max(0, -x.lead) * cfg.q ** r) for x in vals]
            for i in range(r)]
    return _det_laurent(rows)


def _det_laurent(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    acc = None
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * _det_laurent(minor)
        if j % 2:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def strict_t_basis(phi, poly=None, sign_targets=None):
    """A strict F_q-basis of the t-torsion: degrees match the polygon slopes
    with their multiplicities; certified by the Moore determinant degree."""
    poly = poly or newton_polygon(phi)
    cfg = phi.cfg
    g = AdditiveOperator.of_module(phi)
    levels = []
    basis = []
    for _ in range(phi.r):
        lam = g.min_slope()
        w = homogeneous_root(g, lam)
        v = w
        for c_rho in reversed(levels):
            rho = AdditiveOperator(cfg, [(0, -c_rho), (1, LaurentNum.one(cfg))])
            v = solve_additive(rho, v)
        basis.append(v)
        if len(basis) < phi.r:
            c_rho = w ** (cfg.q - 1)
            levels.append(c_rho)
            g = twisted_right_divide(g, c_rho)
    basis.sort(key=lambda x: x.deg)
    basis = [reduce_against(x, basis[:k]) for k, x in enumerate(basis)]
    basis = _normalize_signs(basis, cfg, sign_targets)
    certify_strict(phi, poly, basis)
    return basis


def _normalize_signs(basis, cfg, sign_targets):
    out = []
    units = [cfg.one()]
    full, qm1 = cfg.card - 1, cfg.q - 1
    gq = cfg.primitive() ** (full // qm1)
    for _ in range(qm1 - 1):
        units.append(units[-1] * gq)
    for j, x in enumerate(basis):
        if sign_targets is not None:
            tgt = sign_targets[j]
            for c in units:
                if x.sign() * c == tgt:
                    out.append(x.scale(c))
                    break
            else:
                raise ValueError("sign target %s unreachable from %s by F_q scaling"
                                 % (tgt, x.sign()))
        else:
            best = min(units, key=lambda c: (x.sign() * c).val)
            out.append(x.scale(best))
    return out


def certify_strict(phi, poly, basis):
    expected = []
    for j in range(1, poly.s + 1):
        expected += [poly.slopes[j - 1]] * poly.slope_multiplicity(j)
    got = [x.deg for x in basis]
    if got != expected:
        raise StrictnessError("degree multiset %s does not match the slopes %s"
                              % (got, expected))
    det = moore_det(basis)
    want = sum(Fraction(phi.cfg.q ** j) * d for j, d in enumerate(got))
    if det.is_zero() or det.deg != want:
        raise StrictnessError("Moore determinant degree %s, expected %s"
                              % (det.deg if not det.is_zero() else NEG_INF, want))
    for x in basis:
        res = phi.phi_t(x)
        if not res.is_zero():
            raise StrictnessError("basis vector fails phi_t(x) = 0 at precision (deg %s)"
                                  % res.deg)


@dataclass
class TorsionSelection:
    phi: object
    polygon: PolygonData
    basis: list               # strict basis x_1..x_r, increasing degree
    N: int
    chains: list              # chains[j] = [y_1 .. y_N], y_1 = x_j, phi_t(y_k) = y_{k-1}
    itineraries: list         # exact prescribed degrees per chain
    N_per_vector: list

    @property
    def xi(self):
        return [c[-1] for c in self.chains]

    def h_coeffs(self, j):
        """Coefficients of h_j: [phi_{t^(N-1)}(xi_j), ..., xi_j] = the chain."""
        return list(self.chains[j])

    def to_json(self):
        frac = lambda x: [x.numerator, x.denominator]
        return {"N": self.N,
                "polygon": self.polygon.to_json(),
                "basis": [x.to_json() for x in self.basis],
                "basis_degrees": [frac(x.deg) for x in self.basis],
                "xi": [x.to_json() for x in self.xi],
                "xi_degrees": [frac(x.deg) for x in self.xi],
                "itineraries": [[frac(d) for d in it] for it in self.itineraries]}


def classify_and_lift(phi, poly, y):
    """One division-sequence step: the canonical root of phi_t(X) = y whose
    degree is prescribed by the interval of -deg y."""
    want = prescribed_next_degree(poly, y.deg, phi.cfg.q)
    g = AdditiveOperator.of_module(phi)
    x = solve_additive(g, y)
    if x.deg != want:
        raise ContractionError("lift degree %s, prescribed %s" % (x.deg, want))
    return x, want


def required_ramification(phi, poly=None):
    """lcm of the denominators of all slopes and itinerary degrees: the lattice
    the torsion construction needs (corrections may refine it further)."""
    poly = poly or newton_polygon(phi)
    e = phi.cfg.e
    for lam in poly.slopes:
        e = _lcm(e, lam.denominator)
        _, itin = compute_N(poly, lam, phi.cfg.q)
        for dgr in itin:
            e = _lcm(e, dgr.denominator)
    return e


def build_xi(phi, sign_targets=None, max_refits=8, e_cap=None):
    """Full torsion selection: polygon, strict basis, global lifting depth N,
    division chains with canonical reduction.  Handles ramification refits
    internally (the returned selection's module may live on a finer lattice);
    an e_cap bounds how wild the tower may grow before giving up."""
    for _ in range(max_refits):
        try:
            return _build_xi_once(phi, sign_targets)
        except RamificationNeeded as exc:
            e_new = _lcm(phi.cfg.e, exc.e_needed)
            if e_cap is not None and e_new > e_cap:
                raise BudgetExceededError(
                    "torsion tower needs ramification index %d > cap %d" % (e_new, e_cap))
            phi = phi.refit(e_new)
    raise BudgetExceededError("ramification kept refining beyond %d refits" % max_refits)


def _build_xi_once(phi, sign_targets):
    poly = newton_polygon(phi)
    e_needed = required_ramification(phi, poly)
    if e_needed != phi.cfg.e:
        raise RamificationNeeded(e_needed)
    basis = strict_t_basis(phi, poly, sign_targets)
    q = phi.cfg.q
    Ns, itins = [], []
    for x in basis:
        N_j, itin = compute_N(poly, x.deg, q)
        Ns.append(N_j)
        itins.append(itin)
    N = max(Ns)
    chains = []
    for j, x in enumerate(basis):
        chain = [x]
        for _ in range(1, N):
            nxt, _ = classify_and_lift(phi, poly, chain[-1])
            nxt = reduce_against(nxt, basis)
            chain.append(nxt)
        chains.append(chain)
        got = [v.deg for v in chain]
        want = compute_itinerary_to(poly, basis[j].deg, q, N)
        if got != want:
            raise ContractionError("chain degrees %s do not match the itinerary %s"
                                   % (got, want))
    rad = phi.radius()
    for chain in chains:
        if chain[-1].deg >= rad.logq_radius:
            raise ContractionError("|xi| = q^%s is not inside the radius q^%s"
                                   % (chain[-1].deg, rad.logq_radius))
        degs = [v.deg for v in chain]
        assert all(a > b for a, b in zip(degs, degs[1:]))
        assert all(a - 1 >= b for a, b in zip(degs, degs[1:]))
    return TorsionSelection(phi=phi, polygon=poly, basis=basis, N=N, chains=chains,
                            itineraries=itins, N_per_vector=Ns)


def compute_itinerary_to(poly, deg_y1, q, N):
    out = [Fraction(deg_y1)]
    for _ in range(N - 1):
        out.append(prescribed_next_degree(poly, out[-1], q))
    return out


def _lcm(a, b):
    from math import gcd
    return a * b // gcd(a, b)
