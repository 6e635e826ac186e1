"""Truncated ramified Laurent series over F_{q^M}: the computational K.

A value is  sum_{j>=0} c_j u^(lead+j)  with u = theta^(-1/e), known modulo
u^prec (absolute precision, tracked through every operation).  Degrees are
exact Fractions in theta-units: deg(u^n) = -n/e, |x| = q^deg(x).

Coefficients are stored as an F_p digit matrix of shape (dim, L); column j is
the digit vector of c_j.  Convolutions run through numpy, Frobenius twists and
scalar multiplications are F_p-linear maps on the digit rows.
"""

from fractions import Fraction

import numpy as np

from .errors import (PrecisionExhaustedError, RamificationNeeded,
                     ZeroInversionError)
from .fields import FFElem, format_elem, parse_elem

NEG_INF = float("-inf")


def _conv(cfg, a, b, out_len):
    """Coefficient convolution of two digit matrices, truncated to out_len."""
    p, D = cfg.p, cfg.dim
    a = a[:, :out_len].astype(np.int64, copy=False)
    b = b[:, :out_len].astype(np.int64, copy=False)
    La, Lb = a.shape[1], b.shape[1]
    if La == 0 or Lb == 0 or out_len <= 0:
        return np.zeros((D, 0), dtype=np.int8)
    Lout = min(La + Lb - 1, out_len)
    full = np.zeros((2 * D - 1, Lout), dtype=np.int64)
    for da in range(D):
        ra = a[da]
        if not ra.any():
            continue
        for db in range(D):
            rb = b[db]
            if not rb.any():
                continue
            c = np.convolve(ra, rb)[:Lout]
            full[da + db, :c.shape[0]] += c
    full %= p
    if D > 1:
        red = cfg.reduction_matrix()
        low = (full[:D] + red.T @ full[D:]) % p
    else:
        low = full[:1]
    return low.astype(np.int8)


class LaurentNum:
    """Immutable truncated Laurent number."""

    __slots__ = ("cfg", "lead", "digits", "prec")

    def __init__(self, cfg, lead, digits, prec, _canonical=False):
        if not _canonical:
            digits = np.ascontiguousarray(digits, dtype=np.int8) % cfg.p
            # drop terms at or beyond the precision
            keep = min(digits.shape[1], prec - lead)
            digits = digits[:, :max(keep, 0)]
            # advance past leading zero columns
            nz = np.flatnonzero(digits.any(axis=0))
            if nz.size == 0:
                lead, digits = prec, digits[:, :0]
            else:
                lead += int(nz[0])
                digits = digits[:, int(nz[0]):int(nz[-1]) + 1]
        digits.setflags(write=False)
        self.cfg, self.lead, self.digits, self.prec = cfg, lead, digits, prec

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, cfg, prec=None):
        prec = cfg.prec if prec is None else prec
        return cls(cfg, prec, np.zeros((cfg.dim, 0), dtype=np.int8), prec, _canonical=True)

    @classmethod
    def monomial(cls, cfg, coeff, u_exp, prec=None):
        prec = cfg.prec if prec is None else prec
        if isinstance(coeff, int):
            coeff = cfg.elem(coeff)
        col = np.array(coeff.digits(), dtype=np.int8).reshape(cfg.dim, 1)
        return cls(cfg, u_exp, col, prec)

    @classmethod
    def one(cls, cfg, prec=None):
        return cls.monomial(cfg, 1, 0, prec)

    @classmethod
    def from_terms(cls, cfg, terms, prec=None):
        """terms: iterable of (u_exponent, coefficient)."""
        prec = cfg.prec if prec is None else prec
        terms = [(int(n), cfg.elem(c) if isinstance(c, int) else c) for n, c in terms]
        terms = [(n, c) for n, c in terms if not c.is_zero() and n < prec]
        if not terms:
            return cls.zero(cfg, prec)
        lead = min(n for n, _ in terms)
        top = max(n for n, _ in terms)
        digits = np.zeros((cfg.dim, top - lead + 1), dtype=np.int8)
        for n, c in terms:
            digits[:, n - lead] = (digits[:, n - lead] + np.array(c.digits())) % cfg.p
        return cls(cfg, lead, digits, prec)

    @classmethod
    def theta_power(cls, cfg, exponent, prec=None):
        """theta^exponent for a rational exponent on the 1/e lattice."""
        exponent = Fraction(exponent)
        n = -exponent * cfg.e
        if n.denominator != 1:
            need = _lcm(cfg.e, exponent.denominator)
            raise RamificationNeeded(need, "theta^(%s) needs e divisible by %d"
                                     % (exponent, exponent.denominator))
        return cls.monomial(cfg, 1, int(n), prec)

    @classmethod
    def theta(cls, cfg, prec=None):
        return cls.theta_power(cfg, 1, prec)

    # -- structure ---------------------------------------------------------

    def is_zero(self):
        return self.digits.shape[1] == 0

    @property
    def deg(self):
        """Degree in theta-units (exact Fraction), -inf for zero mod precision."""
        if self.is_zero():
            return NEG_INF
        return Fraction(-self.lead, self.cfg.e)

    @property
    def prec_deg(self):
        """Everything below q^prec_deg is unknown."""
        return Fraction(-self.prec, self.cfg.e)

    def sign(self):
        """Leading coefficient (the paper-style sign); None for zero."""
        if self.is_zero():
            return None
        return self.cfg.from_digits([int(d) for d in self.digits[:, 0]])

    def coeff_at(self, u_exp):
        j = u_exp - self.lead
        if j < 0 or j >= self.digits.shape[1]:
            return self.cfg.zero()
        return self.cfg.from_digits([int(d) for d in self.digits[:, j]])

    def terms(self):
        out = []
        for j in range(self.digits.shape[1]):
            if self.digits[:, j].any():
                out.append((self.lead + j, self.cfg.from_digits([int(d) for d in self.digits[:, j]])))
        return out

    def __eq__(self, other):
        """Equality to the common precision."""
        if not isinstance(other, LaurentNum):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def _align(self, other):
        """Refit both operands onto a common ramification lattice."""
        a, b = self.cfg, other.cfg
        if a.e == b.e:
            return self, other
        if (a.p, a.m, a.M) != (b.p, b.m, b.M):
            raise ValueError("values from incompatible field towers")
        e = _lcm(a.e, b.e)
        return self.refit(e), other.refit(e)

    # -- arithmetic --------------------------------------------------------

    def __neg__(self):
        return LaurentNum(self.cfg, self.lead, (-self.digits.astype(np.int16)) % self.cfg.p, self.prec)

    def __add__(self, other):
        if self.cfg.e != other.cfg.e:
            a, b = self._align(other)
            return a + b
        cfg = self.cfg
        prec = min(self.prec, other.prec)
        if self.is_zero():
            return other.truncate(prec)
        if other.is_zero():
            return self.truncate(prec)
        lead = min(self.lead, other.lead)
        width = prec - lead
        if width <= 0:
            return LaurentNum.zero(cfg, prec)
        acc = np.zeros((cfg.dim, width), dtype=np.int16)
        for x in (self, other):
            o = x.lead - lead
            seg = x.digits[:, :max(0, width - o)]
            acc[:, o:o + seg.shape[1]] += seg
        return LaurentNum(cfg, lead, acc % cfg.p, prec)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, FFElem):
            return self.scale(other)
        if isinstance(other, int):
            return self.scale(self.cfg.elem(other % self.cfg.p))
        if not isinstance(other, LaurentNum):
            return NotImplemented
        if self.cfg.e != other.cfg.e:
            a, b = self._align(other)
            return a * b
        cfg = self.cfg
        if self.is_zero() or other.is_zero():
            return LaurentNum.zero(cfg, min(self.prec + other.lead, other.prec + self.lead))
        lead = self.lead + other.lead
        prec = min(self.prec + other.lead, other.prec + self.lead)
        out = _conv(cfg, self.digits, other.digits, prec - lead)
        return LaurentNum(cfg, lead, out, prec)

    __rmul__ = __mul__

    def scale(self, c):
        if c.is_zero():
            return LaurentNum.zero(self.cfg, self.prec)
        if self.is_zero():
            return self
        mat = self.cfg.mul_matrix(c)
        return LaurentNum(self.cfg, self.lead, (mat @ self.digits) % self.cfg.p, self.prec)

    def shift_u(self, n):
        """Multiply by u^n (exact exponent shift)."""
        if self.is_zero():
            return LaurentNum.zero(self.cfg, self.prec + n)
        return LaurentNum(self.cfg, self.lead + n, self.digits, self.prec + n, _canonical=False)

    def inv(self):
        if self.is_zero():
            raise ZeroInversionError("inverse of a value that is zero at precision "
                                     "(prec %d u-units)" % self.prec)
        cfg = self.cfg
        if self.digits.shape[1] == 1:
            return LaurentNum.monomial(cfg, self.sign().inv(), -self.lead,
                                       prec=self.prec - 2 * self.lead)
        rel = self.prec - self.lead
        c0 = self.sign()
        c0i = c0.inv()
        # w = self normalized to 1 + g; invert by Newton doubling
        w = self.scale(c0i).digits
        h = np.zeros((cfg.dim, 1), dtype=np.int8)
        h[:, 0] = np.array(cfg.one().digits(), dtype=np.int8)
        klen = 1
        while klen < rel:
            klen = min(2 * klen, rel)
            wh = _conv(cfg, w, h, klen)
            # h <- h(2 - wh) = 2h - wh^2, computed as h + h(1 - wh)
            one_minus = (-wh.astype(np.int16)) % cfg.p
            one_minus[:, 0] = (one_minus[:, 0] + np.array(cfg.one().digits())) % cfg.p
            corr = _conv(cfg, h, one_minus, klen)
            pad = np.zeros((cfg.dim, klen), dtype=np.int16)
            pad[:, :h.shape[1]] += h
            pad[:, :corr.shape[1]] += corr
            h = (pad % cfg.p).astype(np.int8)
        res = LaurentNum(cfg, -self.lead, h, rel - self.lead)
        return res.scale(c0i)

    def __truediv__(self, other):
        if isinstance(other, FFElem):
            return self.scale(other.inv())
        return self * other.inv()

    def __pow__(self, n):
        if n < 0:
            return self.inv() ** (-n)
        r = LaurentNum.one(self.cfg, self.prec + max(0, (n - 1)) * self.lead if not self.is_zero() else self.prec)
        b = self
        while n:
            if n & 1:
                r = r * b
            n >>= 1
            if n:
                b = b * b
        return r

    def truncate(self, prec):
        if prec >= self.prec:
            return self
        return LaurentNum(self.cfg, self.lead, self.digits, prec)

    # -- Frobenius structure ------------------------------------------------

    def frobenius(self, k=1, cap=None):
        """x -> x^(q^k); exact: exponents scale by q^k, precision too (then cap).

        A materialization guard keeps the stretched window at most ~16*cfg.prec
        entries wide by dropping precision instead of allocating q^k-strided
        gigabyte arrays (relevant only for very deep twists of tiny values).
        """
        cfg = self.cfg
        s = cfg.q ** k
        prec = self.prec * s
        if cap is not None:
            prec = min(prec, cap)
        if self.is_zero():
            return LaurentNum.zero(cfg, prec)
        lead = self.lead * s
        if lead >= prec:
            return LaurentNum.zero(cfg, prec)
        keep = -(-(prec - lead) // s)  # ceil: source cols that land below prec
        max_len = 16 * cfg.prec
        if keep > 1 and (keep - 1) * s + 1 > max_len:
            keep = max(1, (max_len - 1) // s + 1)
            prec = min(prec, lead + keep * s)
        mat = cfg.qfrob_matrix(k)
        newd = (mat @ self.digits[:, :keep]) % cfg.p
        spread = np.zeros((cfg.dim, (newd.shape[1] - 1) * s + 1), dtype=np.int8)
        spread[:, ::s] = newd
        return LaurentNum(cfg, lead, spread, prec)

    def root_q(self, k=1):
        """Inverse of frobenius(k); exponents must be divisible by q^k."""
        cfg = self.cfg
        s = cfg.q ** k
        if self.is_zero():
            return LaurentNum.zero(cfg, -(-self.prec // s))
        if self.lead % s:
            raise RamificationNeeded(cfg.e * s, "q^%d-th root needs exponent divisible by %d" % (k, s))
        cols = np.flatnonzero(self.digits.any(axis=0))
        if ((cols % s) != 0).any():
            raise RamificationNeeded(cfg.e * s, "q^%d-th root needs all exponents divisible by %d" % (k, s))
        sub = self.digits[:, ::s]
        back = (cfg.M - (k % cfg.M)) % cfg.M
        mat = cfg.qfrob_matrix(back) if back else np.eye(cfg.dim, dtype=np.int64)
        newd = (mat @ sub.astype(np.int64)) % cfg.p
        return LaurentNum(cfg, self.lead // s, newd, -(-self.prec // s))

    def sqrt(self, sign_target=None):
        """Square root; branch picked by `sign_target` (an FFElem) when given,
        else the one with the canonically smaller leading coefficient."""
        cfg = self.cfg
        if self.is_zero():
            return LaurentNum.zero(cfg, -(-self.prec // 2))
        if self.lead % 2:
            raise RamificationNeeded(2 * cfg.e, "sqrt of odd u-valuation; refit e")
        if cfg.p == 2:
            cols = np.flatnonzero(self.digits.any(axis=0))
            if ((cols % 2) != 0).any():
                raise RamificationNeeded(2 * cfg.e, "sqrt needs even exponents in char 2; refit e")
            mat = cfg.pfrob_matrix(cfg.dim - 1) if cfg.dim > 1 else np.eye(1, dtype=np.int64)
            newd = (mat @ self.digits[:, ::2].astype(np.int64)) % 2
            y = LaurentNum(cfg, self.lead // 2, newd, -(-self.prec // 2))
        else:
            c0 = self.sign()
            s0 = c0.nth_root(2)
            rel = self.prec - self.lead
            w = self.scale(c0.inv()).shift_u(-self.lead).truncate(rel)  # 1 + g
            y = LaurentNum.one(cfg, rel)
            half = cfg.elem(pow(2, cfg.p - 2, cfg.p))
            for _ in range(64):
                err = y * y - w
                if err.is_zero():
                    break
                y = (y + w * y.inv()).scale(half)
            else:
                raise PrecisionExhaustedError("sqrt iteration did not settle")
            y = y.scale(s0).shift_u(self.lead // 2)
        if sign_target is not None:
            if y.sign() == sign_target:
                return y
            if (-y).sign() == sign_target:
                return -y
            raise ValueError("sqrt branch with sign %s does not exist (roots have sign %s)"
                             % (sign_target, y.sign()))
        alt = -y
        return y if y.sign().val <= alt.sign().val else alt

    # -- ramification --------------------------------------------------------

    def refit(self, e_new):
        """Same value expressed over u' = theta^(-1/e_new); e | e_new."""
        cfg = self.cfg
        if e_new == cfg.e:
            return self
        if e_new % cfg.e:
            raise RamificationNeeded(_lcm(cfg.e, e_new), "e_new must be a multiple of e")
        f = e_new // cfg.e
        cfg2 = cfg.with_e(e_new)
        if self.is_zero():
            return LaurentNum.zero(cfg2, self.prec * f)
        spread = np.zeros((cfg.dim, (self.digits.shape[1] - 1) * f + 1), dtype=np.int8)
        spread[:, ::f] = self.digits
        return LaurentNum(cfg2, self.lead * f, spread, self.prec * f)

    # -- i/o ------------------------------------------------------------------

    def to_json(self):
        return {"e": self.cfg.e, "prec": self.prec,
                "terms": [[n, format_elem(c)] for n, c in self.terms()]}

    @classmethod
    def from_json(cls, cfg, obj):
        if obj["e"] != cfg.e:
            cfg = cfg.with_e(obj["e"]) if obj["e"] % cfg.e == 0 else cfg
            if cfg.e != obj["e"]:
                raise RamificationNeeded(obj["e"], "encoded value lives on a finer lattice")
        terms = [(int(n), parse_elem(cfg, s)) for n, s in obj["terms"]]
        return cls.from_terms(cfg, terms, prec=int(obj["prec"]))

    def __str__(self):
        if self.is_zero():
            return "O(theta^(%s))" % self.prec_deg
        bits = []
        for n, c in self.terms():
            expo = Fraction(-n, self.cfg.e)
            cs = format_elem(c)
            neg = cs.startswith("-")
            if neg:
                cs = cs[1:]
            if "+" in cs or "-" in cs[1:]:
                cs = "(%s)" % cs
            if expo == 0:
                body = cs
            else:
                power = "theta^(%s)" % expo if expo.denominator != 1 or expo < 0 else (
                    "theta" if expo == 1 else "theta^%s" % expo)
                body = power if cs == "1" else "%s*%s" % (cs, power)
            bits.append(("- " if neg else "+ ") + body)
        s = " ".join(bits)
        s = s[2:] if s.startswith("+ ") else "-" + s[2:]
        return s + " + O(theta^(%s))" % self.prec_deg

    def __repr__(self):
        return "<LaurentNum %s>" % self


def _lcm(a, b):
    from math import gcd
    return a * b // gcd(a, b)


def compare_mod_scalar(a, b, subgroup_q=None):
    """If b = c*a for a scalar c of F_q^* (the prime Drinfeld field), return c.

    Returns None when no such scalar matches to the common precision.
    """
    if a.is_zero() or b.is_zero():
        return None
    cfg = a.cfg
    q = subgroup_q or cfg.q
    sa, sb = a.sign(), b.sign()
    if sa is None or sb is None:
        return None
    c = sb / sa
    if (c ** (q - 1)) != cfg.one():
        return None
    return c if (a.scale(c) - b).is_zero() else None
