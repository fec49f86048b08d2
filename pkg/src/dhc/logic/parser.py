"""Recursive-descent parser for formulas.

Binding strength, loosest first: ``chop`` (right-associative), ``or``,
``and``, then the prefix forms ``not``, ``exists v :``, ``forall v :``.
Quantifier bodies are unary-level, so ``not exists c : pc(c) and not pa(E)``
reads as ``(not (exists c : pc(c))) and (not pa(E))``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from . import formula as F


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class UnboundVariableError(FormulaSyntaxError):
    pass


KEYWORDS = {
    "true", "false", "free", "cs", "re", "sg", "pc", "pa", "ob", "l",
    "not", "and", "or", "chop", "exists", "forall", "size", "dc",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:/\d+|\.\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><<|>>|>=|[():])
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str  # 'num', 'ident', 'kw', 'op', 'eof'
    text: str
    line: int
    col: int


def tokenize(text: str, line0: int = 1, col0: int = 1) -> list[Token]:
    toks = []
    pos, line, col = 0, line0, col0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        lexeme = m.group()
        if kind != "ws":
            if kind == "ident" and lexeme in KEYWORDS:
                kind = "kw"
            toks.append(Token(kind, lexeme, line, col))
        for ch in lexeme:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        pos = m.end()
    toks.append(Token("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, tokens, somewhere_brackets: bool, closed: bool):
        self.toks = tokens
        self.i = 0
        self.somewhere_brackets = somewhere_brackets
        self.closed = closed
        self.bound: list[str] = []

    @property
    def cur(self) -> Token:
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.cur
        raise FormulaSyntaxError(msg, tok.line, tok.col)

    def accept(self, text) -> bool:
        if self.cur.kind in ("kw", "op") and self.cur.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text) -> Token:
        tok = self.cur
        if not self.accept(text):
            found = tok.text or "end of input"
            self.error(f"expected {text!r}, found {found!r}")
        return tok

    def parse(self) -> F.Formula:
        f = self.chop()
        if self.cur.kind != "eof":
            self.error(f"unexpected {self.cur.text!r}")
        return f

    def chop(self):
        left = self.disj()
        if self.accept("chop"):
            return F.Chop(left, self.chop())
        return left

    def disj(self):
        f = self.conj()
        while self.accept("or"):
            f = F.Or(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.accept("and"):
            f = F.And(f, self.unary())
        return f

    def unary(self):
        tok = self.cur
        if self.accept("not"):
            return F.Not(self.unary())
        if tok.text in ("exists", "forall") and tok.kind == "kw":
            self.i += 1
            var = self.cur
            if var.kind != "ident":
                self.error("expected a variable name after quantifier")
            self.i += 1
            self.expect(":")
            self.bound.append(var.text)
            body = self.unary()
            self.bound.pop()
            cls = F.Exists if tok.text == "exists" else F.Forall
            return cls(var.text, body)
        if self.accept("("):
            f = self.chop()
            self.expect(")")
            return f
        if self.accept("<<"):
            f = self.chop()
            self.expect(">>")
            return F.Somewhere(f) if self.somewhere_brackets else f
        return self.atom()

    def car_ref(self) -> F.CarRef:
        self.expect("(")
        tok = self.cur
        if tok.kind != "ident":
            self.error("expected a car identifier or variable")
        self.i += 1
        self.expect(")")
        name = tok.text
        if name in self.bound:
            return F.Var(name)
        if name[0].isupper():
            return F.CarId(name)
        if self.closed:
            raise UnboundVariableError(f"unbound variable {name!r}", tok.line, tok.col)
        return F.Var(name)

    def atom(self):
        tok = self.cur
        if tok.kind != "kw":
            self.error(f"expected a formula, found {tok.text or 'end of input'!r}")
        self.i += 1
        t = tok.text
        simple = {"true": F.TrueF, "false": F.FalseF, "free": F.Free, "cs": F.Cs}
        if t in simple:
            return simple[t]()
        car_atoms = {"re": F.Re, "sg": F.Sg, "pc": F.Pc, "pa": F.Pa}
        if t in car_atoms:
            return car_atoms[t](self.car_ref())
        if t == "ob":
            self.expect("(")
            kind = self.cur
            if kind.kind != "ident":
                self.error("expected a sign kind")
            self.i += 1
            self.expect(")")
            return F.Ob(kind.text)
        if t == "l":
            self.expect(">=")
            return F.LengthGE(self.length_expr())
        self.error(f"unexpected keyword {t!r}", tok)

    def length_expr(self) -> F.LengthExpr:
        tok = self.cur
        if tok.kind == "num":
            self.i += 1
            return F.Const(Fraction(tok.text))
        if self.accept("size"):
            return F.Size(self.car_ref())
        if self.accept("dc"):
            return F.ApproachDistance()
        self.error("expected a rational, size(...) or dc after 'l >='")


def parse_formula(
    text: str,
    *,
    somewhere_brackets: bool = True,
    closed: bool = False,
    origin: tuple[int, int] = (1, 1),
) -> F.Formula:
    """Parse ``text`` into a formula tree.

    With ``closed=True`` a lowercase identifier that no quantifier binds is
    an error. ``somewhere_brackets=False`` treats ``<< >>`` as plain
    grouping. ``origin`` shifts reported positions, for formulas embedded in
    other files.
    """
    toks = tokenize(text, *origin)
    return _Parser(toks, somewhere_brackets, closed).parse()
