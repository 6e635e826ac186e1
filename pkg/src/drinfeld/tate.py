"""Truncated power series in t over LaurentNum: the computational Tate algebra.

A TateSeries stores coefficients c_0..c_T (series known modulo t^(T+1)), the
Gauss norm is max |c_i|, and a `tail` tag records the convergence domain
claimed for the untruncated object:

    'polynomial'  -- no tail at all,
    'unit-disk'   -- |c_i| -> 0 (membership in T),
    'theta-disk'  -- |c_i| |theta|^i -> 0 (membership in T_theta, so the
                     series may be evaluated at t = theta).

The t-truncation T is a run parameter; operations never extend it.
"""

from fractions import Fraction

import numpy as np

from .errors import DecayCertificationError, NonUnitSeriesError
from .laurent import NEG_INF, LaurentNum


def _join_tail(a, b):
    order = {"polynomial": 0, "theta-disk": 1, "unit-disk": 2}
    return a if order[a] >= order[b] else b


class TateSeries:

    __slots__ = ("cfg", "coeffs", "t_trunc", "tail")

    def __init__(self, cfg, coeffs, t_trunc, tail="unit-disk"):
        coeffs = list(coeffs)
        if len(coeffs) > t_trunc + 1:
            coeffs = coeffs[:t_trunc + 1]
        if len(coeffs) < t_trunc + 1:
            # structural zeros: exact, so well below the working precision
            pad = LaurentNum.zero(cfg, 4 * cfg.prec)
            coeffs.extend([pad] * (t_trunc + 1 - len(coeffs)))
        self.cfg = cfg
        self.coeffs = tuple(coeffs)
        self.t_trunc = t_trunc
        self.tail = tail

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, cfg, T, tail="polynomial"):
        return cls(cfg, [], T, tail)

    @classmethod
    def one(cls, cfg, T):
        return cls(cfg, [LaurentNum.one(cfg)], T, "polynomial")

    @classmethod
    def from_poly(cls, cfg, coeffs, T):
        return cls(cfg, coeffs, T, "polynomial")

    @classmethod
    def geometric_inverse(cls, cfg, c, T, prec=None):
        """1/(t - c) for |c| > 1, as its expansion -sum c^-(k+1) t^k.

        theta-disk when |c| > |theta| (poles t = theta^(q^k), k >= 1);
        unit-disk when c = theta itself.
        """
        ci = c.inv()
        if prec is not None:
            ci = ci.truncate(ci.lead + prec)
        out = []
        acc = -ci
        for _ in range(T + 1):
            out.append(acc)
            acc = acc * ci
        tail = "theta-disk" if c.deg > 1 else "unit-disk"
        return cls(cfg, out, T, tail)

    # -- structure -------------------------------------------------------------

    def gauss_deg(self):
        """log_q of the Gauss norm (exact Fraction; -inf for zero at precision)."""
        return max((c.deg for c in self.coeffs), default=NEG_INF)

    def gauss_deg_upper(self):
        """Upper bound on log_q||.||, counting precision floors of zero coeffs."""
        best = NEG_INF
        for c in self.coeffs:
            d = c.deg if not c.is_zero() else c.prec_deg
            if d > best:
                best = d
        return best

    def is_zero(self):
        return all(c.is_zero() for c in self.coeffs)

    def t_order(self):
        for k, c in enumerate(self.coeffs):
            if not c.is_zero():
                return k
        return None

    def __eq__(self, other):
        return isinstance(other, TateSeries) and (self - other).is_zero()

    __hash__ = None

    # -- arithmetic --------------------------------------------------------------

    def __add__(self, other):
        T = min(self.t_trunc, other.t_trunc)
        return TateSeries(self.cfg, [a + b for a, b in zip(self.coeffs, other.coeffs)],
                          T, _join_tail(self.tail, other.tail))

    def __neg__(self):
        return TateSeries(self.cfg, [-a for a in self.coeffs], self.t_trunc, self.tail)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, LaurentNum):
            return self.scale(other)
        if not isinstance(other, TateSeries):
            return NotImplemented
        # zero-at-precision coefficients still participate: they carry the
        # uncertainty that caps the product's precision
        T = min(self.t_trunc, other.t_trunc)
        out = [None] * (T + 1)
        for i, a in enumerate(self.coeffs[:T + 1]):
            for j in range(0, T + 1 - i):
                term = a * other.coeffs[j]
                k = i + j
                out[k] = term if out[k] is None else out[k] + term
        return TateSeries(self.cfg, out, T, _join_tail(self.tail, other.tail))

    __rmul__ = __mul__

    def scale(self, c):
        return TateSeries(self.cfg, [a * c for a in self.coeffs], self.t_trunc, self.tail)

    def shift_t(self, n):
        """Multiply by t^n (truncating)."""
        return TateSeries(self.cfg, [LaurentNum.zero(self.cfg)] * n + list(self.coeffs),
                          self.t_trunc, self.tail)

    def twist(self, k=1, cap=None):
        """Frobenius twist: q^k-th power on each coefficient."""
        return TateSeries(self.cfg, [c.frobenius(k, cap=cap) for c in self.coeffs],
                          self.t_trunc, self.tail)

    def unit_inv(self):
        """Inverse of a unit of the Tate algebra: c_0 != 0 and ||f/c_0 - 1|| < 1."""
        c0 = self.coeffs[0]
        if c0.is_zero():
            raise NonUnitSeriesError(0, "constant coefficient vanishes at precision")
        d0 = c0.deg
        for k, c in enumerate(self.coeffs[1:], start=1):
            if not c.is_zero() and c.deg >= d0:
                raise NonUnitSeriesError(k, "coefficient %d has norm >= the constant term" % k)
        T = self.t_trunc
        c0i = c0.inv()
        g = self.scale(c0i)  # 1 + (small)
        # Newton: h <- h(2 - gh); t-order of (1 - gh) doubles per step
        h = TateSeries.one(self.cfg, T)
        order = 1
        while order <= T:
            gh = g * h
            one_minus = TateSeries.one(self.cfg, T) - gh
            h = h + h * one_minus
            order *= 2
        return h.scale(c0i)

    def truncate_t(self, T):
        if T >= self.t_trunc:
            return self
        return TateSeries(self.cfg, self.coeffs[:T + 1], T, self.tail)

    def with_tail(self, tail):
        return TateSeries(self.cfg, self.coeffs, self.t_trunc, tail)

    # -- evaluation ---------------------------------------------------------------

    def eval_at_theta(self, decay_window=5):
        """Value at t = theta.

        Polynomials evaluate exactly.  A theta-disk series is summed over its
        stored nonzero coefficients; the weights deg(c_i) + i of the last
        `decay_window` of those must be strictly decreasing (the empirical
        decay certificate), and the ultrametric tail bound -- the last included
        term's norm times |theta| -- is folded into the result's precision.
        Coefficients that are zero at their stored precision are taken to lie
        under the certified decay envelope, which is what the theta-disk tail
        claim asserts.
        """
        cfg = self.cfg
        if self.tail == "unit-disk":
            raise DecayCertificationError(
                "series is only claimed on the unit disk; cannot evaluate at theta")
        th = LaurentNum.theta(cfg)
        if self.tail == "polynomial":
            acc = LaurentNum.zero(cfg)
            pw = LaurentNum.one(cfg)
            for c in self.coeffs:
                acc = acc + c * pw
                pw = pw * th
            return acc
        nz = [(k, c) for k, c in enumerate(self.coeffs) if not c.is_zero()]
        # error sources: stored zeros are bounded by their precision floors;
        # the tail beyond t^T by the last included term's norm times |theta|
        # under the certified decay (the empirical theta-disk certificate)
        T = self.t_trunc
        cT = self.coeffs[T]
        bound = (cT.deg if not cT.is_zero() else cT.prec_deg) + T + 1
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                bound = max(bound, c.prec_deg + k)
        if not nz:
            return LaurentNum.zero(cfg, int(-bound * cfg.e))
        weights = [c.deg + k for k, c in nz]
        tail_w = weights[-decay_window:]
        for a, b in zip(tail_w, tail_w[1:]):
            if b >= a:
                raise DecayCertificationError(
                    "no certified decay near the truncation (weights %s)" % tail_w)
        acc = LaurentNum.zero(cfg)
        for k, c in nz:
            acc = acc + c * th ** k
        return acc.truncate(min(acc.prec, int(-bound * cfg.e)))

    # -- i/o -------------------------------------------------------------------------

    def to_json(self):
        return {"t_trunc": self.t_trunc, "tail": self.tail,
                "coeffs": [c.to_json() for c in self.coeffs]}

    @classmethod
    def from_json(cls, cfg, obj):
        return cls(cfg, [LaurentNum.from_json(cfg, c) for c in obj["coeffs"]],
                   int(obj["t_trunc"]), obj["tail"])

    def __str__(self):
        bits = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            body = "(%s)" % c
            bits.append(body if k == 0 else ("%s*t^%d" % (body, k) if k > 1 else "%s*t" % body))
            if len(bits) >= 4:
                bits.append("...")
                break
        head = " + ".join(bits) if bits else "0"
        return head + " + O(t^%d)" % (self.t_trunc + 1)

    def __repr__(self):
        return "<TateSeries T=%d tail=%s norm deg=%s>" % (self.t_trunc, self.tail, self.gauss_deg())


def residue_at_theta(tf):
    """Res_{t=theta} f = ((t-theta)f)(theta), given (t-theta)*f as a polynomial
    or theta-disk series."""
    return tf.eval_at_theta()


# -----------------------------------------------------------------------------------

class TateMatrix:
    """Dense matrix over the Tate algebra."""

    __slots__ = ("cfg", "rows", "t_trunc")

    def __init__(self, cfg, rows):
        self.cfg = cfg
        self.rows = tuple(tuple(r) for r in rows)
        self.t_trunc = self.rows[0][0].t_trunc

    @classmethod
    def identity(cls, cfg, r, T):
        return cls(cfg, [[TateSeries.one(cfg, T) if i == j else TateSeries.zero(cfg, T)
                          for j in range(r)] for i in range(r)])

    @property
    def shape(self):
        return (len(self.rows), len(self.rows[0]))

    def __getitem__(self, ij):
        return self.rows[ij[0]][ij[1]]

    def __add__(self, other):
        return TateMatrix(self.cfg, [[a + b for a, b in zip(ra, rb)]
                                     for ra, rb in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return TateMatrix(self.cfg, [[a - b for a, b in zip(ra, rb)]
                                     for ra, rb in zip(self.rows, other.rows)])

    def __neg__(self):
        return TateMatrix(self.cfg, [[-a for a in r] for r in self.rows])

    def __matmul__(self, other):
        n, k = self.shape
        k2, m = other.shape
        assert k == k2
        T = min(self.t_trunc, other.t_trunc)
        out = []
        for i in range(n):
            row = []
            for j in range(m):
                acc = TateSeries.zero(self.cfg, T)
                for l in range(k):
                    acc = acc + self.rows[i][l] * other.rows[l][j]
                row.append(acc)
            out.append(row)
        return TateMatrix(self.cfg, out)

    def scale(self, f):
        """Entrywise multiplication by a TateSeries or LaurentNum."""
        return TateMatrix(self.cfg, [[a * f for a in r] for r in self.rows])

    def twist(self, k=1, cap=None):
        return TateMatrix(self.cfg, [[a.twist(k, cap=cap) for a in r] for r in self.rows])

    def gauss_deg(self):
        return max(a.gauss_deg() for r in self.rows for a in r)

    def gauss_deg_upper(self):
        return max(a.gauss_deg_upper() for r in self.rows for a in r)

    def is_zero(self):
        return all(a.is_zero() for r in self.rows for a in r)

    def det(self):
        n, m = self.shape
        assert n == m
        if n == 1:
            return self.rows[0][0]
        acc = None
        for j in range(n):
            minor = TateMatrix(self.cfg, [r[:j] + r[j + 1:] for r in self.rows[1:]])
            term = self.rows[0][j] * minor.det()
            if j % 2:
                term = -term
            acc = term if acc is None else acc + term
        return acc

    def adjugate(self):
        n, _ = self.shape
        if n == 1:
            return TateMatrix(self.cfg, [[TateSeries.one(self.cfg, self.t_trunc)]])
        out = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                rows = [r[:j] + r[j + 1:] for k, r in enumerate(self.rows) if k != i]
                c = TateMatrix(self.cfg, rows).det()
                if (i + j) % 2:
                    c = -c
                out[j][i] = c
        return TateMatrix(self.cfg, out)

    def inv(self):
        """Adjugate over unit-inverted determinant (r <= 4 at desk scale)."""
        d = self.det().unit_inv()
        return self.adjugate().scale(d)

    def to_json(self):
        return [[a.to_json() for a in r] for r in self.rows]

    def __repr__(self):
        return "<TateMatrix %dx%d T=%d>" % (*self.shape, self.t_trunc)
