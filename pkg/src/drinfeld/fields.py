"""Finite field tower F_{q^M}, q = p^m.

Elements are residues of F_p[x]/(f) for a fixed monic irreducible f of degree
D = m*M.  Scalars (`FFElem`) carry a packed base-p integer and multiply through
exp/log tables; bulk coefficient arrays (see laurent.py) use digit matrices, for
which this module supplies the F_p-linear maps (Frobenius powers, multiply-by-c,
reduction of overflow monomials).

Everything is immutable after `FieldConfig` construction; the tables are
read-only caches.
"""

from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import ExtensionNeeded, ZeroInversionError

TABLE_CAP = 1 << 16  # largest q^M we allow; desk-scale guard


# ---------------------------------------------------------------------------
# F_p[x] helpers on plain coefficient lists (ascending, no trailing zeros)

def _trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _polymul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _trim(out)


def _polymod(a, f, p):
    # f monic
    a = list(a)
    df = len(f) - 1
    while len(a) > df:
        top = a.pop()
        if top:
            k = len(a) - df
            for i in range(df):
                a[k + i] = (a[k + i] - top * f[i]) % p
    return _trim(a)


def _powmod(a, n, f, p):
    r = [1]
    b = _polymod(a, f, p)
    while n:
        if n & 1:
            r = _polymod(_polymul(r, b, p), f, p)
        b = _polymod(_polymul(b, b, p), f, p)
        n >>= 1
    return r


def _polysub(a, b, p):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def _polygcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        inv = pow(b[-1], p - 2, p)
        b_monic = [(c * inv) % p for c in b]
        a = _polymod(a, b_monic, p)
        a, b = b, a
    return a


def _is_irreducible(f, p):
    d = len(f) - 1
    if d <= 0:
        return False
    x = [0, 1]
    if _polysub(_powmod(x, p ** d, f, p), x, p):
        return False
    for ell in _prime_factors(d):
        g = _polygcd(_polysub(_powmod(x, p ** (d // ell), f, p), x, p), f, p)
        if len(g) - 1 != 0:
            return False
    return True


def _prime_factors(n):
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _find_modulus(p, D):
    """Smallest monic irreducible of degree D over F_p, by packed value of the
    non-leading coefficients.  For p = 3, D = 2 this is x^2 + 1, so the residue
    of x is a square root of -1."""
    if D == 1:
        return (0, 1)
    for packed in range(1, p ** D):
        coeffs = []
        v = packed
        for _ in range(D):
            coeffs.append(v % p)
            v //= p
        f = coeffs + [1]
        if _is_irreducible(f, p):
            return tuple(f)
    raise AssertionError("no irreducible polynomial found")  # unreachable


# ---------------------------------------------------------------------------

class FieldConfig:
    """Parameters of the computation field F_{q^M}((theta^{-1/e})).

    p prime, q = p^m the Drinfeld base field size, M the working extension
    degree, e the ramification index, prec the default absolute precision of
    Laurent values in u-units (u = theta^{-1/e}).
    """

    def __init__(self, p, m=1, M=1, e=1, prec=64):
        if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
            raise ValueError("p must be prime, got %r" % (p,))
        if m < 1 or M < 1 or e < 1 or prec < 1:
            raise ValueError("m, M, e, prec must be positive")
        self.p, self.m, self.M, self.e, self.prec = p, m, M, e, prec
        self.q = p ** m
        self.card = self.q ** M
        if self.card > TABLE_CAP:
            raise ValueError("q^M = %d exceeds the desk-scale cap %d" % (self.card, TABLE_CAP))
        self.dim = m * M  # digits over F_p
        self.modulus = _find_modulus(p, self.dim)
        self.gen_name = "i" if self.modulus == (1, 0, 1) else "g"
        self._build_tables()
        self._matcache = {}

    # -- construction helpers --------------------------------------------

    def _build_tables(self):
        p, D, f = self.p, self.dim, list(self.modulus)
        n = self.card - 1
        # primitive element: smallest packed value of full multiplicative order
        gen = None
        start = p if D > 1 else 2
        for cand in range(start, self.card):
            digs = self._unpack(cand)
            ok = _powmod(digs, n, f, p) == [1]
            for ell in _prime_factors(n):
                if not ok:
                    break
                if _powmod(digs, n // ell, f, p) == [1]:
                    ok = False
            if ok:
                gen = cand
                break
        if gen is None:
            gen = 1  # F_2: the only unit
        self.g_val = gen
        gd = self._unpack(gen)
        exp = np.empty(n, dtype=np.int64)
        log = {}
        t = [1]
        for k in range(n):
            v = self._pack(t)
            exp[k] = v
            log[v] = k
            t = _polymod(_polymul(t, gd, p), f, p)
        exp.setflags(write=False)
        self.exp_table, self.log_table = exp, log

    def _unpack(self, val):
        p, D = self.p, self.dim
        out = []
        for _ in range(D):
            out.append(val % p)
            val //= p
        return _trim(out) or []

    def _pack(self, digs):
        v = 0
        for d in reversed(digs):
            v = v * self.p + d
        return v

    # -- linear maps on digit columns -------------------------------------

    def reduction_matrix(self):
        """RED[j] = digits of x^(D+j) mod f, j = 0..D-2; reduces products."""
        key = "red"
        if key not in self._matcache:
            p, D, f = self.p, self.dim, list(self.modulus)
            rows = []
            for j in range(max(D - 1, 0)):
                r = _polymod([0] * (D + j) + [1], f, p)
                rows.append(r + [0] * (D - len(r)))
            mat = np.array(rows, dtype=np.int64).reshape(max(D - 1, 0), D)
            mat.setflags(write=False)
            self._matcache[key] = mat
        return self._matcache[key]

    def pfrob_matrix(self, j):
        """Matrix of a -> a^(p^j) acting on digit columns."""
        j %= self.dim
        key = ("pfrob", j)
        if key not in self._matcache:
            p, D, f = self.p, self.dim, list(self.modulus)
            cols = []
            for i in range(D):
                r = _powmod([0] * i + [1], p ** j, f, p)
                cols.append(r + [0] * (D - len(r)))
            mat = np.array(cols, dtype=np.int64).T.copy()
            mat.setflags(write=False)
            self._matcache[key] = mat
        return self._matcache[key]

    def qfrob_matrix(self, k):
        """Matrix of a -> a^(q^k)."""
        return self.pfrob_matrix((self.m * k) % self.dim)

    def mul_matrix(self, elem):
        """Matrix of multiplication by `elem` on digit columns."""
        p, D, f = self.p, self.dim, list(self.modulus)
        ed = self._unpack(elem.val)
        cols = []
        for i in range(D):
            r = _polymod(_polymul([0] * i + [1], ed, p), f, p) if ed else []
            cols.append(r + [0] * (D - len(r)))
        return np.array(cols, dtype=np.int64).T

    # -- derived configs ---------------------------------------------------

    def _derived(self, M, e, prec):
        return get_config(self.p, self.m, M, e, prec)

    def with_e(self, e_new):
        if e_new == self.e:
            return self
        return self._derived(self.M, e_new, self.prec * e_new // self.e)

    def with_M(self, M_new):
        return self if M_new == self.M else self._derived(M_new, self.e, self.prec)

    def with_prec(self, prec):
        return self if prec == self.prec else self._derived(self.M, self.e, prec)

    # -- elements ----------------------------------------------------------

    def elem(self, val):
        """Element from an integer: packed digit value if already reduced,
        otherwise an integer of the prime field."""
        if 0 <= val < self.card:
            return FFElem(self, val)
        return FFElem(self, val % self.p)

    def zero(self):
        return FFElem(self, 0)

    def one(self):
        return FFElem(self, 1)

    def gen(self):
        """The residue of x (the ring generator named `gen_name`)."""
        return FFElem(self, self.p if self.dim > 1 else 1)

    def from_digits(self, digs):
        return FFElem(self, self._pack([d % self.p for d in digs]))

    def primitive(self):
        return FFElem(self, self.g_val)

    def sqrt_minus_one(self):
        """Canonical i with i^2 = -1, if it exists in F_{q^M}."""
        try:
            return (-self.one()).nth_root(2)
        except ExtensionNeeded:
            return None

    def all_elements(self):
        return [FFElem(self, v) for v in range(self.card)]

    def __repr__(self):
        return "FieldConfig(p=%d, m=%d, M=%d, e=%d, prec=%d)" % (
            self.p, self.m, self.M, self.e, self.prec)

    def describe(self):
        return {"p": self.p, "m": self.m, "M": self.M, "e": self.e, "prec": self.prec,
                "q": self.q, "card": self.card,
                "modulus": list(self.modulus), "generator": self.gen_name}


_CONFIG_CACHE = {}


def get_config(p, m=1, M=1, e=1, prec=64):
    """Canonicalized FieldConfig instances (table reuse across the pipeline)."""
    key = (p, m, M, e, prec)
    if key not in _CONFIG_CACHE:
        _CONFIG_CACHE[key] = FieldConfig(p, m, M, e, prec)
    return _CONFIG_CACHE[key]


class FFElem:
    """Element of F_{q^M}, hashable and immutable."""

    __slots__ = ("cfg", "val")

    def __init__(self, cfg, val):
        self.cfg = cfg
        self.val = val

    # -- basics --

    def is_zero(self):
        return self.val == 0

    def log(self):
        return None if self.val == 0 else self.cfg.log_table[self.val]

    def digits(self):
        d = self.cfg._unpack(self.val)
        return tuple(d + [0] * (self.cfg.dim - len(d)))

    def __eq__(self, other):
        return isinstance(other, FFElem) and self.val == other.val and self.cfg.card == other.cfg.card

    def __hash__(self):
        return hash((self.cfg.card, self.val))

    def __bool__(self):
        return self.val != 0

    # -- ring ops --

    def __add__(self, other):
        p = self.cfg.p
        a, b = self.digits(), other.digits()
        return self.cfg.from_digits([(x + y) % p for x, y in zip(a, b)])

    def __neg__(self):
        p = self.cfg.p
        return self.cfg.from_digits([(-x) % p for x in self.digits()])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            other = self.cfg.elem(other % self.cfg.p)
        if self.val == 0 or other.val == 0:
            return self.cfg.zero()
        n = self.cfg.card - 1
        k = (self.cfg.log_table[self.val] + self.cfg.log_table[other.val]) % n
        return FFElem(self.cfg, int(self.cfg.exp_table[k]))

    __rmul__ = __mul__

    def inv(self):
        if self.val == 0:
            raise ZeroInversionError("inverse of zero in F_{q^M}")
        n = self.cfg.card - 1
        return FFElem(self.cfg, int(self.cfg.exp_table[(-self.cfg.log_table[self.val]) % n]))

    def __truediv__(self, other):
        return self * other.inv()

    def __pow__(self, n):
        if self.val == 0:
            if n <= 0:
                raise ZeroInversionError("0 ** nonpositive")
            return self
        k = self.cfg.log_table[self.val]
        card1 = self.cfg.card - 1
        return FFElem(self.cfg, int(self.cfg.exp_table[(k * n) % card1]))

    # -- Frobenius structure --

    def pow_q(self, k=1):
        return self ** (self.cfg.q ** k) if self.val else self

    def root_q(self, k=1):
        # Frobenius is bijective: a^(1/q) = a^(q^(M-1)) since a^(q^M) = a
        if self.val == 0:
            return self
        back = (self.cfg.M - (k % self.cfg.M)) % self.cfg.M
        return self.pow_q(back) if back else self

    def order(self):
        if self.val == 0:
            raise ZeroInversionError("order of zero")
        n = self.cfg.card - 1
        return n // _gcd(self.cfg.log_table[self.val], n)

    def nth_root(self, n):
        """Canonical n-th root (smallest discrete log); ExtensionNeeded if absent."""
        if self.val == 0:
            return self
        card1 = self.cfg.card - 1
        a = self.cfg.log_table[self.val]
        g = _gcd(n, card1)
        if a % g:
            raise ExtensionNeeded(self._root_extension(n),
                                  "no %d-th root of %s in F_%d" % (n, self, self.cfg.card))
        b = (a // g) * pow(n // g, -1, card1 // g) % (card1 // g)
        return FFElem(self.cfg, int(self.cfg.exp_table[b % card1]))

    def nth_roots(self, n):
        """All n-th roots present in the field."""
        if self.val == 0:
            return [self]
        card1 = self.cfg.card - 1
        g = _gcd(n, card1)
        a = self.cfg.log_table[self.val]
        if a % g:
            return []
        b0 = (a // g) * pow(n // g, -1, card1 // g) % (card1 // g)
        return [FFElem(self.cfg, int(self.cfg.exp_table[(b0 + j * (card1 // g)) % card1]))
                for j in range(g)]

    def _root_extension(self, n):
        # smallest multiple M' of M with ord(self) | (q^M'-1)/gcd(n, q^M'-1)
        q, M = self.cfg.q, self.cfg.M
        o = self.order()
        for k in range(2, 65):
            Mp = M * k
            n1 = q ** Mp - 1
            if (n1 // _gcd(n, n1)) % o == 0:
                return Mp
        raise ExtensionNeeded(M * 64, "root extension search exceeded cap")

    # -- display --

    def __repr__(self):
        return "FFElem(%s)" % self

    def __str__(self):
        return format_elem(self)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


# ---------------------------------------------------------------------------
# element <-> string, balanced-digit polynomials in the ring generator

def format_elem(x):
    p = x.cfg.p
    name = x.cfg.gen_name
    parts = []
    for k, d in reversed(list(enumerate(x.digits()))):
        if d == 0:
            continue
        c = d - p if (p > 2 and d > p // 2) else d
        sign = "-" if c < 0 else "+"
        c = abs(c)
        if k == 0:
            body = str(c)
        else:
            mono = name if k == 1 else "%s^%d" % (name, k)
            body = mono if c == 1 else "%d*%s" % (c, mono)
        parts.append((sign, body))
    if not parts:
        return "0"
    first_sign, first_body = parts[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in parts[1:]:
        out += sign + body
    return out


def parse_elem(cfg, text):
    """Inverse of format_elem; accepts e.g. '-i', '2*g^2+g-1', '1', '0'."""
    from .errors import SpecParseError
    s = text.replace(" ", "")
    if not s:
        raise SpecParseError("empty field element")
    digs = [0] * cfg.dim
    i = 0
    sign = 1
    if s[0] in "+-":
        sign = -1 if s[0] == "-" else 1
        i = 1
    coef, power, have = 1, None, False
    def flush():
        nonlocal coef, power, have, sign
        if not have:
            raise SpecParseError("malformed field element %r" % text)
        k = power if power is not None else 0
        if k >= cfg.dim:
            raise SpecParseError("generator power %d out of range in %r" % (k, text))
        digs[k] = (digs[k] + sign * coef) % cfg.p
        coef, power, have, sign = 1, None, False, 1
    while i < len(s):
        ch = s[i]
        if ch.isdigit():
            j = i
            while j < len(s) and s[j].isdigit():
                j += 1
            coef = int(s[i:j]) % cfg.p
            have = True
            i = j
            if i < len(s) and s[i] == "*":
                i += 1
                continue
        elif s[i:i + len(cfg.gen_name)] == cfg.gen_name:
            i += len(cfg.gen_name)
            power = 1
            have = True
            if i < len(s) and s[i] == "^":
                j = i + 1
                k = j
                while k < len(s) and s[k].isdigit():
                    k += 1
                if k == j:
                    raise SpecParseError("malformed power in %r" % text)
                power = int(s[j:k])
                i = k
        elif ch in "+-":
            flush()
            sign = -1 if ch == "-" else 1
            i += 1
        else:
            raise SpecParseError("unexpected %r in field element %r" % (ch, text))
    flush()
    return cfg.from_digits(digs)


# ---------------------------------------------------------------------------
# F_p-linear solver for q-polynomial equations  sum_i  c_i * v^(q^i) = rhs

def qlinear_matrix(cfg, terms):
    D = cfg.dim
    mat = np.zeros((D, D), dtype=np.int64)
    for i, c in terms:
        if c.is_zero():
            continue
        mat = (mat + cfg.mul_matrix(c) @ cfg.qfrob_matrix(i)) % cfg.p
    return mat % cfg.p


def solve_qlinear(cfg, terms, rhs, nonzero=False):
    """One solution v of sum c_i v^(q^i) = rhs over F_{q^M}, or None.

    Canonical: Gaussian elimination with free variables pinned to zero, so a
    zero right-hand side yields zero (unless `nonzero`, which returns the
    canonical kernel vector instead).
    """
    p, D = cfg.p, cfg.dim
    A = qlinear_matrix(cfg, terms)
    b = np.array(rhs.digits(), dtype=np.int64)
    mat = np.concatenate([A, b.reshape(D, 1)], axis=1) % p
    piv_cols = []
    r = 0
    for c in range(D):
        piv = None
        for rr in range(r, D):
            if mat[rr, c] % p:
                piv = rr
                break
        if piv is None:
            continue
        mat[[r, piv]] = mat[[piv, r]]
        mat[r] = (mat[r] * pow(int(mat[r, c]), p - 2, p)) % p
        for rr in range(D):
            if rr != r and mat[rr, c]:
                mat[rr] = (mat[rr] - mat[rr, c] * mat[r]) % p
        piv_cols.append(c)
        r += 1
    if nonzero:
        return _canonical_kernel(mat, piv_cols, cfg)
    for rr in range(r, D):
        if mat[rr, D] % p:
            return None
    sol = [0] * D
    for k, c in enumerate(piv_cols):
        sol[c] = int(mat[k, D]) % p
    return cfg.from_digits(sol)


def _canonical_kernel(mat, piv_cols, cfg):
    D = cfg.dim
    free = [c for c in range(D) if c not in piv_cols]
    if not free:
        return None
    c0 = free[0]
    vec = [0] * D
    vec[c0] = 1
    for k, c in enumerate(piv_cols):
        vec[c] = int(-mat[k, c0]) % cfg.p
    return cfg.from_digits(vec)


def minimal_extension_for(cfg, terms, rhs, nonzero=False, cap=64):
    """Smallest M' (multiple of M) in which the q-polynomial equation gains a
    solution (a nonzero one if `nonzero`).  Uses gcd with v^(q^M')-v on the
    q-polynomial written as an ordinary polynomial; degrees stay tiny."""
    # ordinary polynomial P(v) = sum c_i v^(q^i) - rhs over F_{q^M}
    deg = max(cfg.q ** i for i, c in terms if not c.is_zero())
    P = [cfg.zero()] * (deg + 1)
    for i, c in terms:
        if not c.is_zero():
            P[cfg.q ** i] = P[cfg.q ** i] + c
    P[0] = P[0] - rhs
    if nonzero:
        # quotient by v: valid since P(0)=0 for homogeneous equations
        P = P[1:]
    for k in range(2, cap + 1):
        if _has_root_in(P, cfg, cfg.M * k):
            return cfg.M * k
    raise ExtensionNeeded(cfg.M * cap, "extension search exceeded cap")


def _has_root_in(P, cfg, Mp):
    # gcd(v^(q^Mp) - v, P) nontrivial?
    P = _ff_trim(list(P))
    if len(P) <= 1:
        return False
    x = [cfg.zero(), cfg.one()]
    t = _ff_mod(x, P, cfg)
    for _ in range(cfg.m * Mp):
        t = _ff_mod(_ff_pow_p(t, cfg), P, cfg)
    g = _ff_gcd(_ff_sub(t, x, cfg), P, cfg)
    return len(g) - 1 >= 1


def _ff_trim(f):
    while f and f[-1].is_zero():
        f.pop()
    return f


def _ff_sub(a, b, cfg):
    n = max(len(a), len(b))
    a = list(a) + [cfg.zero()] * (n - len(a))
    b = list(b) + [cfg.zero()] * (n - len(b))
    return _ff_trim([x - y for x, y in zip(a, b)])


def _ff_pow_p(f, cfg):
    # (sum a_j v^j)^p = sum a_j^p v^(jp)
    if not f:
        return []
    out = [cfg.zero()] * ((len(f) - 1) * cfg.p + 1)
    for j, a in enumerate(f):
        if not a.is_zero():
            out[j * cfg.p] = a ** cfg.p
    return out


def _ff_mod(a, f, cfg):
    a = _ff_trim(list(a))
    df = len(f) - 1
    finv = f[-1].inv()
    while len(a) - 1 >= df:
        top = a.pop()
        if not top.is_zero():
            c = top * finv
            k = len(a) - df
            for i in range(df):
                a[k + i] = a[k + i] - c * f[i]
        _ff_trim(a)
    return a


def _ff_gcd(a, b, cfg):
    a, b = _ff_trim(list(a)), _ff_trim(list(b))
    while b:
        a = _ff_mod(a, b, cfg)
        a, b = b, a
    return a
