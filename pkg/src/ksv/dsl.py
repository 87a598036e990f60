"""Lexer and recursive-descent parser for ``.ksv`` input files.

A file declares a coefficient field, a graded base ring R = k[x..]/(q..), the
Koszul data f, named DG modules, and directives::

    field Fp 5
    ring [x, y]
    koszul f = [x^2, y^2]
    kmodule M { gens: one:(0,0) a:(1,1) b:(1,2) ab:(2,3);
                d: a -> x*one  b -> y^2*one  ab -> x*b - y^2*a;
                sigma1: one -> x*a  b -> x*ab;
                sigma2: one -> b  a -> -1*ab; }
    verify theorem M N window 6

Polynomials use ``^`` for powers and an explicit ``*``.  Entries ``src -> p*tgt``
give the image of basis element ``src``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .polyring import Polynomial, PolyRing
from .scalars import GF, QQ, Field

KEYWORDS_HYPHEN = {"tensor-support", "rhom-support", "tor-bound"}

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<arrow>->)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>[\[\](){},;:+\-*^/=])
""", re.VERBOSE)


class ParseError(Exception):
    def __init__(self, message, line, col):
        super().__init__(f"line {line}, column {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str   # ident, int, sym, arrow, eof
    text: str
    line: int
    col: int

    def __str__(self):
        return "end of input" if self.kind == "eof" else repr(self.text)


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, col, i = 1, 1, 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {text[i]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            line, col = line + 1, 1
        elif kind in ("ws", "comment"):
            col += len(s)
        else:
            tokens.append(Token("sym" if kind == "sym" else kind, s, line, col))
            col += len(s)
        i = m.end()
    tokens.append(Token("eof", "", line, col))
    # glue hyphenated directive keywords
    out = []
    k = 0
    while k < len(tokens):
        t = tokens[k]
        if (t.kind == "ident" and k + 2 < len(tokens) and tokens[k + 1].text == "-"
                and tokens[k + 2].kind == "ident"
                and f"{t.text}-{tokens[k + 2].text}" in KEYWORDS_HYPHEN
                and tokens[k + 1].col == t.col + len(t.text)
                and tokens[k + 2].col == tokens[k + 1].col + 1):
            out.append(Token("ident", f"{t.text}-{tokens[k + 2].text}", t.line, t.col))
            k += 3
        else:
            out.append(t)
            k += 1
    return out


# session data -----------------------------------------------------------------

@dataclass(frozen=True)
class Entry:
    """Image of basis element ``src``: sum of coeff * tgt."""
    src: str
    terms: tuple  # ((coeff, tgt), ...); coeff a Polynomial over the base ring


@dataclass(frozen=True)
class LambdaDecl:
    name: str
    basis: tuple          # ((name, degree), ...)
    d: tuple              # entries
    actions: tuple        # ((index, entries), ...)
    line: int = dc_field(default=0, compare=False)


@dataclass(frozen=True)
class KoszulDecl:
    name: str
    gens: tuple           # ((name, hdeg, intdeg), ...)
    d: tuple
    sigmas: tuple         # ((index, entries), ...)
    line: int = dc_field(default=0, compare=False)


@dataclass(frozen=True)
class Directive:
    verb: str             # compute | verify
    what: str
    args: tuple
    window: int | None = None
    line: int = dc_field(default=0, compare=False)
    col: int = dc_field(default=0, compare=False)

    def label(self):
        s = " ".join((self.verb, self.what) + self.args)
        if self.window is not None:
            s += f" window {self.window}"
        return s


@dataclass
class Session:
    field: Field = QQ
    ring_vars: tuple = ()
    relations: tuple = ()
    koszul: tuple | None = None
    modules: dict = dc_field(default_factory=dict)
    directives: list = dc_field(default_factory=list)
    assumptions: tuple = ()

    def base_ring(self) -> PolyRing:
        return PolyRing(self.ring_vars, None, self.field)

    def __eq__(self, other):
        if not isinstance(other, Session):
            return NotImplemented
        return (self.field == other.field and self.ring_vars == other.ring_vars
                and _polys(self.relations) == _polys(other.relations)
                and _polys(self.koszul) == _polys(other.koszul)
                and self.modules == other.modules
                and self.directives == other.directives
                and self.assumptions == other.assumptions)


def _polys(ps):
    return None if ps is None else tuple(str(p) for p in ps)


COMPUTE_ONE = {"support", "ext", "hilbert"}
COMPUTE_TWO = {"tensor-support", "join", "rhom-support"}
VERIFY = {"theorem": (2, 2), "dual": (1, 1), "hopf": (2, 2), "tor-bound": (2, 2), "nak": (2, 2)}


class Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0
        self.session = Session()
        self.ring = PolyRing((), None, QQ)
        self.basis_names: set[str] = set()

    # token helpers
    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k=1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def error(self, expected, tok=None):
        tok = tok or self.tok
        raise ParseError(f"expected {expected}, got {tok}", tok.line, tok.col)

    def accept(self, text):
        if self.tok.text == text and self.tok.kind != "eof":
            self.i += 1
            return True
        return False

    def expect(self, text, what=None):
        if not self.accept(text):
            self.error(what or repr(text))
        return self.tokens[self.i - 1]

    def close(self, opener: Token, text, what):
        """Expect a closing token; at end of input blame the unclosed opener."""
        if self.accept(text):
            return
        if self.tok.kind == "eof":
            raise ParseError(f"unclosed {opener.text!r}: expected {what}", opener.line, opener.col)
        self.error(what)

    def expect_ident(self, what="identifier"):
        if self.tok.kind != "ident":
            self.error(what)
        t = self.tok
        self.i += 1
        return t.text

    def expect_int(self, what="integer", signed=False):
        neg = signed and self.accept("-")
        if self.tok.kind != "int":
            self.error(what)
        v = int(self.tok.text)
        self.i += 1
        return -v if neg else v

    # top level
    def parse(self) -> Session:
        while self.tok.kind != "eof":
            self.statement()
        return self.session

    def statement(self):
        t = self.tok
        if t.kind != "ident":
            self.error("a statement keyword")
        kw = t.text
        if kw == "field":
            self.i += 1
            self.field_stmt()
        elif kw == "ring":
            self.i += 1
            self.ring_stmt()
        elif kw == "koszul":
            self.i += 1
            self.koszul_stmt()
        elif kw == "lmodule":
            self.i += 1
            self.lambda_module(t.line)
        elif kw == "kmodule":
            self.i += 1
            self.koszul_module(t.line)
        elif kw in ("compute", "verify"):
            self.i += 1
            self.directive(kw, t)
        elif kw == "assume":
            self.i += 1
            what = self.expect_ident("'gorenstein'")
            if what != "gorenstein":
                self.error("'gorenstein'", self.tokens[self.i - 1])
            self.session.assumptions = tuple(sorted(set(self.session.assumptions) | {what}))
        else:
            self.error("one of field, ring, koszul, lmodule, kmodule, compute, verify, assume")

    def field_stmt(self):
        t = self.tok
        name = self.expect_ident("'Q' or 'Fp'")
        if name == "Q":
            F = QQ
        elif name == "Fp":
            pt = self.tok
            p = self.expect_int("a prime")
            try:
                F = GF(p)
            except ValueError as exc:
                raise ParseError(str(exc), pt.line, pt.col) from None
        else:
            self.error("'Q' or 'Fp'", t)
        self.session.field = F
        self.ring = PolyRing(self.session.ring_vars, None, F)

    def ring_stmt(self):
        opener = self.expect("[")
        names = [self.expect_ident("a variable name")]
        while self.accept(","):
            names.append(self.expect_ident("a variable name"))
        self.close(opener, "]", "',' or ']'")
        if len(set(names)) != len(names):
            t = self.tokens[self.i - 1]
            raise ParseError("variable names must be distinct", t.line, t.col)
        self.session.ring_vars = tuple(names)
        self.ring = PolyRing(names, None, self.session.field)
        rels = []
        if self.accept("/"):
            opener = self.expect("(")
            rels.append(self.poly())
            while self.accept(","):
                rels.append(self.poly())
            self.close(opener, ")", "',' or ')'")
        self.session.relations = tuple(rels)

    def koszul_stmt(self):
        self.expect("f")
        self.expect("=")
        opener = self.expect("[")
        fs = [self.poly()]
        while self.accept(","):
            fs.append(self.poly())
        self.close(opener, "]", "',' or ']'")
        self.session.koszul = tuple(fs)

    def _new_module_name(self):
        t = self.tok
        name = self.expect_ident("a module name")
        if name in self.session.modules:
            raise ParseError(f"module {name!r} already defined", t.line, t.col)
        if name in self.ring.names:
            raise ParseError(f"module name {name!r} clashes with a ring variable", t.line, t.col)
        return name

    def _basis_name(self, seen):
        t = self.tok
        name = self.expect_ident("a basis element name")
        if name in seen:
            raise ParseError(f"duplicate basis element {name!r}", t.line, t.col)
        if name in self.ring.names:
            raise ParseError(f"basis name {name!r} clashes with a ring variable", t.line, t.col)
        seen.add(name)
        return name

    def lambda_module(self, line):
        name = self._new_module_name()
        opener = self.expect("{")
        self.expect("basis")
        self.expect(":")
        basis, seen = [], set()
        while self.tok.kind == "ident":
            b = self._basis_name(seen)
            self.expect(":")
            basis.append((b, self.expect_int("a degree", signed=True)))
        if not basis:
            self.error("a basis element")
        self.expect(";", "';' after the basis")
        self.basis_names = seen
        self.expect("d", "'d:'")
        self.expect(":")
        d = self.entries()
        actions = []
        while self.tok.kind == "ident" and re.fullmatch(r"e\d+", self.tok.text):
            t = self.tok
            idx = int(self.tok.text[1:])
            if idx < 1 or any(a[0] == idx for a in actions):
                raise ParseError(f"invalid or repeated action e{idx}", t.line, t.col)
            self.i += 1
            self.expect(":")
            actions.append((idx, self.entries()))
        if not actions:
            self.error("'e1:'")
        self.close(opener, "}", "'}' or another 'eN:' section")
        self.basis_names = set()
        self.session.modules[name] = LambdaDecl(name, tuple(basis), d, tuple(actions), line)

    def koszul_module(self, line):
        name = self._new_module_name()
        opener = self.expect("{")
        self.expect("gens")
        self.expect(":")
        gens, seen = [], set()
        while self.tok.kind == "ident":
            g = self._basis_name(seen)
            self.expect(":")
            self.expect("(")
            h = self.expect_int("a homological degree", signed=True)
            self.expect(",")
            q = self.expect_int("an internal degree", signed=True)
            self.expect(")")
            gens.append((g, h, q))
        if not gens:
            self.error("a generator")
        self.expect(";", "';' after the generators")
        self.basis_names = seen
        self.expect("d", "'d:'")
        self.expect(":")
        d = self.entries()
        sigmas = []
        while self.tok.kind == "ident" and re.fullmatch(r"sigma\d+", self.tok.text):
            t = self.tok
            idx = int(self.tok.text[5:])
            if idx < 1 or any(s[0] == idx for s in sigmas):
                raise ParseError(f"invalid or repeated operator sigma{idx}", t.line, t.col)
            self.i += 1
            self.expect(":")
            sigmas.append((idx, self.entries()))
        if not sigmas:
            self.error("'sigma1:'")
        self.close(opener, "}", "'}' or another 'sigmaN:' section")
        self.basis_names = set()
        self.session.modules[name] = KoszulDecl(name, tuple(gens), d, tuple(sigmas), line)

    def entries(self):
        out = []
        seen = set()
        while self.tok.kind == "ident":
            t = self.tok
            src = self.expect_ident()
            if src not in self.basis_names:
                raise ParseError(f"unknown basis element {src!r}", t.line, t.col)
            if src in seen:
                raise ParseError(f"repeated entry for {src!r}", t.line, t.col)
            seen.add(src)
            self.expect("->", "'->'")
            out.append(Entry(src, self.polycomb()))
        self.expect(";", "';' or another entry")
        return tuple(out)

    def polycomb(self):
        terms = []
        sign = -1 if self.accept("-") else 1
        terms.append(self.comb_term(sign))
        while self.tok.text in ("+", "-"):
            sign = -1 if self.tok.text == "-" else 1
            self.i += 1
            terms.append(self.comb_term(sign))
        return tuple(terms)

    def comb_term(self, sign):
        coeff = self.ring.constant(sign)
        while True:
            t = self.tok
            if t.kind == "ident" and t.text in self.basis_names:
                self.i += 1
                return (coeff, t.text)
            coeff = coeff * self.factor()
            self.expect("*", "'*' followed by a basis element")

    # polynomials
    def poly(self):
        sign = -1 if self.accept("-") else 1
        if sign == 1:
            self.accept("+")
        p = self.term().scale(sign)
        while self.tok.text in ("+", "-") and self.tok.kind == "sym":
            s = -1 if self.tok.text == "-" else 1
            self.i += 1
            p = p + self.term().scale(s)
        return p

    def term(self):
        p = self.factor()
        while self.tok.text == "*" and not (self.peek().kind == "ident" and self.peek().text in self.basis_names):
            self.i += 1
            p = p * self.factor()
        return p

    def factor(self):
        base = self.atom()
        if self.accept("^"):
            base = base ** self.expect_int("an exponent")
        return base

    def atom(self):
        t = self.tok
        if t.kind == "int":
            self.i += 1
            num = int(t.text)
            if self.tok.text == "/" and self.peek().kind == "int":
                self.i += 1
                den = int(self.tok.text)
                self.i += 1
                if den == 0:
                    raise ParseError("zero denominator", t.line, t.col)
                val = Fraction(num, den)
            else:
                val = num
            try:
                return self.ring.constant(val)
            except ZeroDivisionError as exc:
                raise ParseError(str(exc), t.line, t.col) from None
        if t.kind == "ident":
            if t.text in self.ring.names:
                self.i += 1
                return self.ring.var(t.text)
            raise ParseError(f"unknown variable {t.text!r}", t.line, t.col)
        if self.tok.text == "(":
            opener = self.expect("(")
            p = self.poly()
            self.close(opener, ")", "')'")
            return p
        self.error("a number, variable or '('")

    def directive(self, verb, t0):
        t = self.tok
        what = self.expect_ident("a directive name")
        if verb == "compute":
            if what in COMPUTE_ONE:
                n = (1, 1)
            elif what in COMPUTE_TWO:
                n = (2, 2)
            else:
                self.error("support, ext, hilbert, tensor-support, join or rhom-support", t)
        else:
            if what not in VERIFY:
                self.error("theorem, dual, hopf, tor-bound or nak", t)
            n = VERIFY[what]
        args = []
        while (len(args) < n[1] and self.tok.kind == "ident" and self.tok.text != "window"
               and self.tok.text not in ("compute", "verify", "field", "ring", "koszul",
                                         "lmodule", "kmodule", "assume")):
            args.append(self.expect_ident())
        if len(args) < n[0]:
            self.error("a module name")
        window = None
        if self.accept("window"):
            window = self.expect_int("a window size")
        self.session.directives.append(Directive(verb, what, tuple(args), window, t0.line, t0.col))


def parse(text: str) -> Session:
    """Parse ``.ksv`` source into a :class:`Session` (syntax only)."""
    return Parser(text).parse()


def parse_polynomial(text: str, ring: PolyRing) -> Polynomial:
    p = Parser(text)
    p.ring = ring
    out = p.poly()
    if p.tok.kind != "eof":
        p.error("end of polynomial")
    return out


# pretty printing --------------------------------------------------------------

def _fmt_poly(p):
    s = str(p)
    return f"({s})" if (" " in s or s.startswith("-")) else s


def _fmt_entries(entries):
    parts = []
    for e in entries:
        terms = []
        for k, (c, tgt) in enumerate(e.terms):
            terms.append(f"{'' if k == 0 else '+ '}{_fmt_poly(c)}*{tgt}")
        parts.append(f"{e.src} -> {' '.join(terms)}")
    return " ".join(parts)


def pretty(session: Session) -> str:
    lines = []
    F = session.field
    lines.append("field Q" if F == QQ else f"field Fp {F.p}")
    if session.ring_vars:
        s = f"ring [{', '.join(session.ring_vars)}]"
        if session.relations:
            s += " / (" + ", ".join(map(str, session.relations)) + ")"
        lines.append(s)
    if session.koszul is not None:
        lines.append("koszul f = [" + ", ".join(map(str, session.koszul)) + "]")
    for a in session.assumptions:
        lines.append(f"assume {a}")
    for m in session.modules.values():
        if isinstance(m, LambdaDecl):
            basis = " ".join(f"{b}:{d}" for b, d in m.basis)
            body = [f"basis: {basis};", f"d: {_fmt_entries(m.d)};"]
            body += [f"e{i}: {_fmt_entries(es)};" for i, es in m.actions]
            lines.append(f"lmodule {m.name} {{ " + " ".join(body) + " }")
        else:
            gens = " ".join(f"{g}:({h},{q})" for g, h, q in m.gens)
            body = [f"gens: {gens};", f"d: {_fmt_entries(m.d)};"]
            body += [f"sigma{i}: {_fmt_entries(es)};" for i, es in m.sigmas]
            lines.append(f"kmodule {m.name} {{ " + " ".join(body) + " }")
    for d in session.directives:
        lines.append(d.label())
    return "\n".join(lines) + "\n"
