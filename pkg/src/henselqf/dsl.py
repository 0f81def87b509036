"""Text syntax for fields, elements and forms, plus canonical rendering.

Grammar (full EBNF in ``docs/grammar.ebnf``)::

    field   := base level*
    base    := "GF(" int ")" | "RCF" | "QC" | "Qp(" int ")"
    level   := "((" ident "))" | "((" ident ":Q))"
    form    := "<" [expr ("," expr)*] ">" | ["gram"] "[[" ... "]]" | "poly" string
    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := ("-" | "+") unary | power
    power   := atom ["^" exponent]
    exponent:= ["-"] int | "(" expr ")"        (a rational constant)
    atom    := int | ident | "(" expr ")"

Rendering is canonical: ``parse_element(render_element(a), K) == a`` and the
rendered text is stable, so it doubles as the golden-test format.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .basefields import ExtensionField
from .fieldtower import (
    Element,
    FieldDesc,
    FieldError,
    FiniteField,
    Level,
    PadicBottom,
    QuadClosed,
    RealClosed,
)

MAX_POLY_POWER = 64
MAX_MONO_POWER = 10_000
MAX_DEPTH = 100
MAX_SOURCE = 100_000
MAX_MODULUS = 10**6
MAX_BITS = 100_000


class DslError(ValueError):
    """Structured parse/evaluation diagnostic with a 1-based source span."""

    def __init__(self, code: str, message: str, line: int = 1, col: int = 1):
        super().__init__(f"{code} at {line}:{col}: {message}")
        self.code = code
        self.message = message
        self.line = line
        self.col = col

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "span": {"line": self.line, "col": self.col}}


# ---------------------------------------------------------------- lexer


@dataclass(frozen=True)
class Tok:
    kind: str  # INT IDENT STRING OP EOF
    text: str
    pos: int


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\"[^\"]*\")|(.))", re.S)


class _Src:
    def __init__(self, text: str, base_line: int = 1, base_col: int = 1):
        self.text = text
        self.base_line = base_line
        self.base_col = base_col

    def span(self, pos: int) -> tuple[int, int]:
        before = self.text[:pos]
        line = before.count("\n")
        if line:
            return self.base_line + line, pos - before.rfind("\n")
        return self.base_line, self.base_col + pos

    def error(self, code, message, pos) -> DslError:
        return DslError(code, message, *self.span(pos))


def _tokenize(src: _Src) -> list[Tok]:
    text = src.text
    if len(text) > MAX_SOURCE:
        raise DslError("too_long", f"input longer than {MAX_SOURCE} characters")
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1):
            toks.append(Tok("INT", m.group(1), m.start(1)))
        elif m.group(2):
            toks.append(Tok("IDENT", m.group(2), m.start(2)))
        elif m.group(3):
            toks.append(Tok("STRING", m.group(3)[1:-1], m.start(3) + 1))
        elif m.group(4):
            ch = m.group(4)
            if ch == '"':
                raise src.error("syntax", "unterminated string", m.start(4))
            if ch not in "+-*/^()<>,[]:":
                raise src.error("syntax", f"unexpected character {ch!r}", m.start(4))
            toks.append(Tok("OP", ch, m.start(4)))
        pos = m.end()
    toks.append(Tok("EOF", "", len(text)))
    return toks


# ---------------------------------------------------------------- parser


class _Parser:
    def __init__(self, src: _Src):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0
        self.depth = 0

    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def err(self, code, message, tok=None):
        return self.src.error(code, message, (tok or self.tok).pos)

    def next(self) -> Tok:
        t = self.tok
        if t.kind != "EOF":
            self.i += 1
        return t

    def at(self, text, kind="OP") -> bool:
        return self.tok.kind == kind and self.tok.text == text

    def expect(self, text, kind="OP") -> Tok:
        if not self.at(text, kind):
            found = self.tok.text or "end of input"
            raise self.err("syntax", f"expected {text!r}, found {found!r}")
        return self.next()

    def expect_kind(self, kind) -> Tok:
        if self.tok.kind != kind:
            found = self.tok.text or "end of input"
            raise self.err("syntax", f"expected {kind.lower()}, found {found!r}")
        return self.next()

    def done(self):
        if self.tok.kind != "EOF":
            raise self.err("syntax", f"trailing input {self.tok.text!r}")

    # expressions -----------------------------------------------------------
    def _enter(self):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise self.err("too_deep", f"nesting deeper than {MAX_DEPTH}")

    def expr(self):
        self._enter()
        node = self.term()
        while self.at("+") or self.at("-"):
            op = self.next()
            node = ("add" if op.text == "+" else "sub", node, self.term(), op.pos)
        self.depth -= 1
        return node

    def term(self):
        node = self.unary()
        while self.at("*") or self.at("/"):
            op = self.next()
            node = ("mul" if op.text == "*" else "div", node, self.unary(), op.pos)
        return node

    def unary(self):
        if self.at("-"):
            t = self.next()
            self._enter()
            node = ("neg", self.unary(), t.pos)
            self.depth -= 1
            return node
        if self.at("+"):
            self.next()
            self._enter()
            node = self.unary()
            self.depth -= 1
            return node
        return self.power()

    def power(self):
        base = self.atom()
        if self.at("^"):
            t = self.next()
            return ("pow", base, self.exponent(), t.pos)
        return base

    def exponent(self) -> Fraction:
        if self.at("("):
            t = self.next()
            node = self.expr()
            self.expect(")")
            return _eval_rational(node, self.src, t.pos)
        sign = 1
        if self.at("-"):
            self.next()
            sign = -1
        return Fraction(sign * int(self.expect_kind("INT").text))

    def atom(self):
        t = self.tok
        if t.kind == "INT":
            self.next()
            return ("int", int(t.text), t.pos)
        if t.kind == "IDENT":
            self.next()
            return ("var", t.text, t.pos)
        if self.at("("):
            self.next()
            node = self.expr()
            self.expect(")")
            return node
        found = t.text or "end of input"
        raise self.err("syntax", f"expected a number, variable or '(', found {found!r}")

    # fields ----------------------------------------------------------------
    def field(self) -> FieldDesc:
        t = self.expect_kind("IDENT")
        if t.text in ("GF", "Qp"):
            self.expect("(")
            nt = self.expect_kind("INT")
            n = int(nt.text)
            self.expect(")")
            if n > MAX_MODULUS:
                raise self.src.error("invalid_field", f"{t.text}({n}): modulus above {MAX_MODULUS}", nt.pos)
            try:
                base = FiniteField(n) if t.text == "GF" else PadicBottom(n)
            except FieldError as e:
                raise self.src.error("invalid_field", str(e), t.pos) from None
        elif t.text == "RCF":
            base = RealClosed()
        elif t.text == "QC":
            base = QuadClosed()
        else:
            raise self.src.error("syntax", f"unknown base field {t.text!r}", t.pos)
        levels = []
        while self.at("("):
            start = self.next()
            self.expect("(")
            name = self.expect_kind("IDENT").text
            puiseux = False
            if self.at(":"):
                self.next()
                q = self.expect_kind("IDENT")
                if q.text != "Q":
                    raise self.src.error("syntax", "only ':Q' level annotations exist", q.pos)
                puiseux = True
            self.expect(")")
            self.expect(")")
            levels.append((Level(name, puiseux), start.pos))
        try:
            return FieldDesc(base, tuple(lv for lv, _ in levels))
        except FieldError as e:
            pos = levels[-1][1] if levels else t.pos
            raise self.src.error("invalid_field", str(e), pos) from None


# ---------------------------------------------------------------- evaluation


def _eval_rational(node, src: _Src, pos: int) -> Fraction:
    kind = node[0]
    if kind == "int":
        return Fraction(node[1])
    if kind == "var":
        raise src.error("bad_exponent", f"variable {node[1]!r} inside an exponent", node[2])
    if kind == "neg":
        return -_eval_rational(node[1], src, pos)
    if kind == "pow":
        b = _eval_rational(node[1], src, pos)
        e = node[2]
        if e.denominator != 1 or abs(e) > MAX_MONO_POWER:
            raise src.error("bad_exponent", "exponents of exponents must be small integers", node[3])
        if b == 0 and e < 0:
            raise src.error("division_by_zero", "zero to a negative power", node[3])
        _check_size(b, e, src, node[3])
        return b ** int(e)
    a = _eval_rational(node[1], src, pos)
    b = _eval_rational(node[2], src, pos)
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if b == 0:
        raise src.error("division_by_zero", "division by zero", node[3])
    return a / b


def _check_size(b: Fraction, e: Fraction, src: _Src, pos: int):
    bits = max(b.numerator.bit_length(), b.denominator.bit_length())
    if bits * abs(e) > MAX_BITS:
        raise src.error("power_too_large", "result would exceed the size limit", pos)


class QPoly:
    """Polynomial of degree <= 2 in x1, x2, ... with coefficients in a field."""

    __slots__ = ("K", "terms")

    def __init__(self, K: FieldDesc, terms: dict):
        self.K = K
        self.terms = {m: c for m, c in terms.items() if not c.is_zero()}

    @classmethod
    def const(cls, c: Element):
        return cls(c.field, {(): c})

    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=0)

    def __add__(self, other):
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return QPoly(self.K, out)

    def __neg__(self):
        return QPoly(self.K, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(sorted(m1 + m2))
                if len(m) > 2:
                    raise ArithmeticError("degree above 2")
                out[m] = out[m] + c1 * c2 if m in out else c1 * c2
        return QPoly(self.K, out)


class _Evaluator:
    def __init__(self, K: FieldDesc, src: _Src, poly_vars: bool = False):
        self.K = K
        self.src = src
        self.poly_vars = poly_vars

    def err(self, code, message, pos):
        return self.src.error(code, message, pos)

    def __call__(self, node):
        try:
            return self.eval(node)
        except DslError:
            raise
        except ZeroDivisionError as e:
            raise self.err("division_by_zero", str(e) or "division by zero", _pos(node)) from None
        except (ArithmeticError, FieldError) as e:
            raise self.err("arithmetic", str(e), _pos(node)) from None

    def eval(self, node):
        kind = node[0]
        K = self.K
        if kind == "int":
            return K.element(node[1])
        if kind == "var":
            return self.var(node[1], node[2])
        if kind == "neg":
            return -self.eval(node[1])
        if kind == "pow":
            return self.power(self.eval(node[1]), node[2], node[3])
        a, b = self.eval(node[1]), self.eval(node[2])
        if isinstance(a, QPoly) or isinstance(b, QPoly):
            a, b = _as_q(a), _as_q(b)
            if kind == "div":
                if b.degree() > 0:
                    raise self.err("not_quadratic", "division by a polynomial in x-variables", node[3])
                b = b.terms.get((), K.zero())
                if b.is_zero():
                    raise self.err("division_by_zero", "division by zero", node[3])
                return QPoly(K, {m: c / b for m, c in a.terms.items()})
            if kind == "mul" and a.degree() + b.degree() > 2:
                raise self.err("not_quadratic", "polynomial of degree above 2", node[3])
            return {"add": a.__add__, "sub": a.__sub__, "mul": a.__mul__}[kind](b)
        if kind == "add":
            return a + b
        if kind == "sub":
            return a - b
        if kind == "mul":
            return a * b
        if b.is_zero():
            raise self.err("division_by_zero", "division by zero", node[3])
        return a / b

    def var(self, name, pos):
        K = self.K
        if self.poly_vars:
            m = re.fullmatch(r"x([1-9][0-9]*)", name)
            if m:
                idx = int(m.group(1)) - 1
                if idx >= 64:
                    raise self.err("syntax", f"variable index of {name!r} too large", pos)
                return QPoly(K, {(idx,): K.one()})
        if name == "z" and isinstance(K.ring, ExtensionField):
            return K.generator()
        try:
            return K.var(name)
        except FieldError:
            raise self.err("unbound_variable", f"variable {name!r} is not bound by {K}", pos) from None

    def power(self, base, e: Fraction, pos):
        K = self.K
        if isinstance(base, QPoly):
            if e.denominator != 1 or e < 0:
                raise self.err("not_quadratic", "x-variables take nonnegative integer powers", pos)
            if base.degree() * int(e) > 2:
                raise self.err("not_quadratic", "polynomial of degree above 2", pos)
            out = QPoly.const(K.one())
            for _ in range(int(e)):
                out = out * base
            return out
        if base.is_zero():
            if e <= 0:
                raise self.err("division_by_zero", "zero to a non-positive power", pos)
            return base
        if base.is_monomial():
            (ne, nc), = base.num.items()
            (de, dc), = base.den.items()
            R = K.ring
            coeff = R.mul(nc, R.inv(dc))
            if e.denominator != 1 and not R.is_zero(R.sub(coeff, R.one)):
                raise self.err("bad_exponent", "fractional powers need a monomial with coefficient 1", pos)
            if abs(e) > MAX_MONO_POWER:
                raise self.err("power_too_large", f"exponent {e} exceeds {MAX_MONO_POWER}", pos)
            exps = tuple((a - b) * e for a, b in zip(ne, de))
            for x, lv in zip(exps, K.top_first):
                if not lv.puiseux and x.denominator != 1:
                    raise self.err(
                        "nonintegral_exponent", f"non-integer exponent {x} at Laurent level {lv.name}", pos
                    )
            if isinstance(coeff, Fraction):
                _check_size(coeff, e, self.src, pos)
            c = K.element(coeff) ** int(e) if e.denominator == 1 else K.one()
            return K.monomial(exps, 1) * c
        if e.denominator != 1:
            raise self.err("bad_exponent", "fractional powers need a monomial with coefficient 1", pos)
        if abs(e) > MAX_POLY_POWER:
            raise self.err("power_too_large", f"exponent {e} exceeds {MAX_POLY_POWER} for a non-monomial", pos)
        return base ** int(e)


def _as_q(v):
    return v if isinstance(v, QPoly) else QPoly.const(v)


def _pos(node):
    return node[-1] if isinstance(node[-1], int) else 0


# ---------------------------------------------------------------- public API


def _guard_depth(fn):
    """Turn interpreter recursion limits (very long sums) into a diagnostic."""

    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except RecursionError:
            raise DslError("too_deep", "expression too deeply nested") from None

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_guard_depth
def parse_field(src: str) -> FieldDesc:
    s = _Src(src)
    p = _Parser(s)
    K = p.field()
    p.done()
    return K


@_guard_depth
def parse_element(src: str, K: FieldDesc) -> Element:
    s = _Src(src)
    p = _Parser(s)
    node = p.expr()
    p.done()
    return _Evaluator(K, s)(node)


@_guard_depth
def parse_rational(src: str) -> Fraction:
    s = _Src(src)
    p = _Parser(s)
    node = p.expr()
    p.done()
    return _eval_rational(node, s, 0)


@_guard_depth
def parse_form(src: str, K: FieldDesc):
    """Parse ``<...>``, ``gram[[...]]`` / ``[[...]]`` or ``poly"..."``."""
    from .qform import DiagForm, FormError, GramForm

    s = _Src(src)
    p = _Parser(s)
    ev = _Evaluator(K, s)
    t = p.tok
    try:
        if p.at("<"):
            p.next()
            entries = []
            if not p.at(">"):
                entries.append((p.tok.pos, ev(p.expr())))
                while p.at(","):
                    p.next()
                    entries.append((p.tok.pos, ev(p.expr())))
            p.expect(">")
            p.done()
            for pos, a in entries:
                if a.is_zero():
                    raise s.error("zero_entry", "zero diagonal entry: the form is not regular", pos)
            return DiagForm(tuple(a for _, a in entries), K)
        if p.at("gram", "IDENT") or p.at("["):
            if p.at("gram", "IDENT"):
                p.next()
            rows = _matrix(p, ev)
            p.done()
            return GramForm.from_symmetric(rows, K)
        if p.at("poly", "IDENT"):
            p.next()
            st = p.expect_kind("STRING")
            p.done()
            line, col = s.span(st.pos)
            inner = _Src(st.text, line, col)
            ip = _Parser(inner)
            node = ip.expr()
            ip.done()
            q = _as_q(_Evaluator(K, inner, poly_vars=True)(node))
            if any(len(m) != 2 for m in q.terms):
                raise inner.error("not_quadratic", "polynomial is not homogeneous of degree 2", 0)
            n = 1 + max((i for m in q.terms for i in m), default=-1)
            return GramForm(n, dict(q.terms), K)
    except FormError as e:
        raise s.error("form", str(e), t.pos) from None
    raise p.err("syntax", "expected a form: '<...>', 'gram[[...]]' or 'poly\"...\"'")


def _matrix(p: _Parser, ev) -> list[list]:
    p.expect("[")
    rows = []
    while True:
        start = p.expect("[")
        row = [ev(p.expr())]
        while p.at(","):
            p.next()
            row.append(ev(p.expr()))
        p.expect("]")
        rows.append((start, row))
        if not p.at(","):
            break
        p.next()
    p.expect("]")
    n = len(rows)
    for start, row in rows:
        if len(row) != n:
            raise p.src.error("form", f"Gram matrix must be square, got a row of length {len(row)}", start.pos)
    return [row for _, row in rows]


# ---------------------------------------------------------------- rendering


def render_field(K: FieldDesc) -> str:
    return str(K)


def _render_monomial(exps, K: FieldDesc) -> str:
    parts = []
    for x, lv in reversed(list(zip(exps, K.top_first))):
        if x == 0:
            continue
        if x == 1:
            parts.append(lv.name)
        elif isinstance(x, int) and x > 1:
            parts.append(f"{lv.name}^{x}")
        else:
            parts.append(f"{lv.name}^({x})")
    return "*".join(parts)


def render_poly(f: dict, K: FieldDesc) -> str:
    if not f:
        return "0"
    R = K.ring
    rational = not isinstance(K.base, FiniteField)
    out = ""
    for i, e in enumerate(sorted(f, reverse=True)):
        c = f[e]
        neg = rational and c < 0
        if neg:
            c = -c
        mono = _render_monomial(e, K)
        if not mono:
            body = R.render(c)
        elif c == R.one:
            body = mono
        else:
            body = f"{R.render(c)}*{mono}"
        if i == 0:
            out = ("-" if neg else "") + body
        else:
            out += (" - " if neg else " + ") + body
    return out


def render_element(a: Element) -> str:
    K = a.field
    num = render_poly(a.num, K)
    if len(a.den) == 1 and a.den.get((0,) * K.nvars) == K.ring.one:
        return num
    return f"({num})/({render_poly(a.den, K)})"


def render_form(phi) -> str:
    from .qform import DiagForm

    if isinstance(phi, DiagForm):
        return "<" + ", ".join(render_element(a) for a in phi.entries) + ">"
    S = phi.symmetric_matrix()
    return "gram[" + ", ".join("[" + ", ".join(render_element(x) for x in row) + "]" for row in S) + "]"
