"""Coefficient expression language and run specifications.

Grammar (whitespace-insensitive):

    expr     :=  ['-'] term (('+' | '-') term)*
    term     :=  factor ('*' factor)*
    factor   :=  atom ['^' exponent]
    atom     :=  'theta' | name | integer | '(' expr ')'
              |  'sqrt' '(' expr [',' 'sign' '=' expr] ')'
    exponent :=  integer | '{' rational '}' | '(' rational ')'
    rational :=  ['-'] (integer | 'q') ['/' integer]

Values are LaurentNum at the configured precision.  Built-in names: `i` (a
square root of -1 when the working field has one; the residue of the modulus
generator when that generator squares to -1), `g` (the ring generator of
F_{q^M}), plus any user definitions evaluated in order.
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import SpecParseError
from .fields import get_config
from .laurent import LaurentNum

_TOKEN_CHARS = set("+-*^(){},=/")


def _tokenize(text):
    toks = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in _TOKEN_CHARS:
            toks.append((c, i))
            i += 1
        elif c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append((("int", int(text[i:j])), i))
            i = j
        elif c.isalpha() or c == "_" or c == "θ":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_" or text[j] == "θ"):
                j += 1
            toks.append((("name", text[i:j]), i))
            i = j
        else:
            raise SpecParseError("unexpected character %r" % c, i)
    return toks


class _Parser:
    def __init__(self, cfg, text, names):
        self.cfg = cfg
        self.text = text
        self.toks = _tokenize(text)
        self.pos = 0
        self.names = names

    def peek(self):
        return self.toks[self.pos][0] if self.pos < len(self.toks) else None

    def next(self):
        if self.pos >= len(self.toks):
            raise SpecParseError("unexpected end of expression %r" % self.text,
                                 len(self.text))
        tok, at = self.toks[self.pos]
        self.pos += 1
        return tok, at

    def expect(self, symbol):
        tok, at = self.next()
        if tok != symbol:
            raise SpecParseError("expected %r in %r" % (symbol, self.text), at)

    def parse(self):
        v = self.expr()
        if self.pos != len(self.toks):
            raise SpecParseError("trailing input in %r" % self.text, self.toks[self.pos][1])
        return v

    def expr(self):
        neg = False
        if self.peek() == "-":
            self.next()
            neg = True
        v = self.term()
        if neg:
            v = -v
        while self.peek() in ("+", "-"):
            op, _ = self.next()
            w = self.term()
            v = v + w if op == "+" else v - w
        return v

    def term(self):
        v = self.factor()
        while self.peek() == "*":
            self.next()
            v = v * self.factor()
        return v

    def factor(self):
        v = self.atom()
        if self.peek() == "^":
            self.next()
            e = self.exponent()
            if isinstance(e, int):
                return v ** e
            # rational exponent: only the bare variable supports it
            if not self._is_theta(v):
                raise SpecParseError("rational exponents apply to theta only, in %r" % self.text)
            return LaurentNum.theta_power(self.cfg, e)
        return v

    def _is_theta(self, v):
        return (not v.is_zero()) and v.digits.shape[1] == 1 and v.lead == -self.cfg.e \
            and v.sign() == self.cfg.one()

    def exponent(self):
        tok, at = self.next()
        if isinstance(tok, tuple) and tok[0] == "int":
            return tok[1]
        if tok == "-":
            tok2, _ = self.next()
            if isinstance(tok2, tuple) and tok2[0] == "int":
                return -tok2[1]
            raise SpecParseError("malformed exponent in %r" % self.text, at)
        if tok in ("{", "("):
            close = "}" if tok == "{" else ")"
            val = self.rational()
            self.expect(close)
            return val
        raise SpecParseError("malformed exponent in %r" % self.text, at)

    def rational(self):
        neg = False
        if self.peek() == "-":
            self.next()
            neg = True
        tok, at = self.next()
        if isinstance(tok, tuple) and tok[0] == "int":
            num = tok[1]
        elif isinstance(tok, tuple) and tok[0] == "name" and tok[1] == "q":
            num = self.cfg.q
        else:
            raise SpecParseError("malformed rational exponent in %r" % self.text, at)
        den = 1
        if self.peek() == "/":
            self.next()
            tok2, at2 = self.next()
            if not (isinstance(tok2, tuple) and tok2[0] == "int"):
                raise SpecParseError("malformed rational denominator in %r" % self.text, at2)
            den = tok2[1]
            if den == 0:
                raise SpecParseError("zero denominator in exponent of %r" % self.text, at2)
        val = Fraction(num, den)
        return -val if neg else val

    def atom(self):
        tok, at = self.next()
        if isinstance(tok, tuple) and tok[0] == "int":
            return LaurentNum.monomial(self.cfg, tok[1] % self.cfg.p, 0)
        if tok == "(":
            v = self.expr()
            self.expect(")")
            return v
        if isinstance(tok, tuple) and tok[0] == "name":
            name = tok[1]
            if name == "sqrt":
                return self.sqrt_atom()
            if name in ("theta", "θ"):
                return LaurentNum.theta(self.cfg)
            if name in self.names:
                return self.names[name]
            raise SpecParseError("unknown name %r in %r" % (name, self.text), at)
        raise SpecParseError("unexpected token in %r" % self.text, at)

    def sqrt_atom(self):
        self.expect("(")
        v = self.expr()
        sign = None
        if self.peek() == ",":
            self.next()
            tok, at = self.next()
            if not (isinstance(tok, tuple) and tok == ("name", "sign")):
                raise SpecParseError("expected sign= selector in %r" % self.text, at)
            self.expect("=")
            sv = self.expr()
            if sv.is_zero() or sv.deg != 0:
                raise SpecParseError("sign selector must be a nonzero constant, in %r" % self.text)
            sign = sv.sign()
        self.expect(")")
        if sign is None:
            roots_differ = self.cfg.p != 2
            if roots_differ:
                raise SpecParseError(
                    "sqrt is sign-ambiguous here; add a sign=... selector, in %r" % self.text)
        return v.sqrt(sign_target=sign)


def builtin_names(cfg):
    names = {}
    if cfg.dim > 1:
        names["g"] = LaurentNum.monomial(cfg, cfg.gen(), 0)
    i_elem = cfg.sqrt_minus_one()
    if cfg.gen_name == "i":
        i_elem = cfg.gen()
    if i_elem is not None:
        names["i"] = LaurentNum.monomial(cfg, i_elem, 0)
    return names


def evaluate(cfg, text, names=None):
    """Evaluate one coefficient expression to a LaurentNum."""
    env = builtin_names(cfg)
    if names:
        env.update(names)
    return _Parser(cfg, text, env).parse()


# ---------------------------------------------------------------------------

_PRECISION_KEYS = {"prec", "t_trunc", "epsilon_logq", "factor_budget"}
_TOP_KEYS = {"field", "defs", "module", "precision", "sign_targets", "seed"}
_FIELD_KEYS = {"p", "m", "M", "e"}
_MODULE_KEYS = {"r", "A"}


@dataclass
class RunSpec:
    field: dict
    module_exprs: list
    defs: dict = None
    prec: int = 120
    t_trunc: int = 24
    epsilon_logq: Fraction = Fraction(-24)
    factor_budget: int = 64
    sign_targets: list = None
    seed: int = 0

    def config(self):
        f = self.field
        return get_config(f["p"], f.get("m", 1), f.get("M", 1), f.get("e", 1), self.prec)

    def build_module(self):
        from .core import DrinfeldModule
        cfg = self.config()
        names = dict(builtin_names(cfg))
        for k, v in (self.defs or {}).items():
            names[k] = _Parser(cfg, v, names).parse()
        A = [_Parser(cfg, s, names).parse() for s in self.module_exprs]
        return DrinfeldModule(cfg, A)

    def build_sign_targets(self):
        if not self.sign_targets:
            return None
        cfg = self.config()
        names = builtin_names(cfg)
        out = []
        for s in self.sign_targets:
            v = _Parser(cfg, s, names).parse()
            if v.is_zero() or v.deg != 0:
                raise SpecParseError("sign target %r is not a nonzero constant" % s)
            out.append(v.sign())
        return out

    def rat_config(self):
        from .rat import RatConfig
        return RatConfig(t_trunc=self.t_trunc, epsilon_logq=Fraction(self.epsilon_logq),
                         factor_budget=self.factor_budget)


def parse_runspec(obj):
    """Validate a decoded run-spec dict (unknown keys rejected)."""
    if not isinstance(obj, dict):
        raise SpecParseError("run spec must be a JSON object")
    unknown = set(obj) - _TOP_KEYS
    if unknown:
        raise SpecParseError("unknown run-spec keys: %s" % ", ".join(sorted(unknown)))
    if "field" not in obj or "module" not in obj:
        raise SpecParseError("run spec needs 'field' and 'module' sections")
    fld = obj["field"]
    if set(fld) - _FIELD_KEYS or "p" not in fld:
        raise SpecParseError("field section takes keys p, m, M, e (p required)")
    mod = obj["module"]
    if set(mod) - _MODULE_KEYS or "A" not in mod:
        raise SpecParseError("module section takes keys r, A (A required)")
    A = list(mod["A"])
    if "r" in mod and mod["r"] != len(A):
        raise SpecParseError("module rank %r does not match %d coefficients"
                             % (mod["r"], len(A)))
    prec_section = obj.get("precision", {})
    if set(prec_section) - _PRECISION_KEYS:
        raise SpecParseError("unknown precision keys: %s"
                             % ", ".join(sorted(set(prec_section) - _PRECISION_KEYS)))
    eps = prec_section.get("epsilon_logq", -24)
    if isinstance(eps, list):
        eps = Fraction(eps[0], eps[1])
    return RunSpec(field=dict(fld), module_exprs=A, defs=dict(obj.get("defs", {})),
                   prec=int(prec_section.get("prec", 120)),
                   t_trunc=int(prec_section.get("t_trunc", 24)),
                   epsilon_logq=Fraction(eps),
                   factor_budget=int(prec_section.get("factor_budget", 64)),
                   sign_targets=list(obj["sign_targets"]) if obj.get("sign_targets") else None,
                   seed=int(obj.get("seed", 0)))
