"""Checker for the XTA subset emitted by :mod:`dhc.export.xta`.

Subset grammar::

    model    := decl* process+ system
    decl     := "clock" ids ";" | "bool" init ("," init)* ";" | "const" "int" ID "=" INT ";"
    init     := ID ["=" ("true" | "false")]
    process  := "process" ID "(" ")" "{" decl* states "init" ID ";" [trans] "}"
    states   := "state" state ("," state)* ";"
    state    := ID ["{" expr "}"]
    trans    := "trans" edge ("," edge)* ";"
    edge     := ID "->" ID "{" ["guard" expr ";"] ["assign" assign ("," assign)* ";"] "}"
    assign   := ID ":=" (INT | "true" | "false")
    expr     := conj ("||" conj)*
    conj     := unary ("&&" unary)*
    unary    := "!" unary | "(" expr ")" | atom [relop atom]
    atom     := ID | INT | "true" | "false"
    system   := "system" ids ";"

Beyond syntax it checks that names are declared before use, that clocks
are only compared with integers or integer constants, and that every
process named in ``system`` exists.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

_TOK = re.compile(
    r"(?P<ws>\s+)|(?P<lc>//[^\n]*)|(?P<bc>/\*.*?\*/)|(?P<int>\d+)|(?P<id>[A-Za-z_]\w*)"
    r"|(?P<op>->|:=|&&|\|\||<=|>=|==|!=|[<>!(){};,=])",
    re.S,
)


class XtaSyntaxError(ValueError):
    def __init__(self, message, line):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class ProcessInfo:
    name: str
    clocks: list = field(default_factory=list)
    locations: list = field(default_factory=list)
    edges: list = field(default_factory=list)  # (source, target)
    initial: str = ""


@dataclass
class XtaSummary:
    clocks: list = field(default_factory=list)
    bools: list = field(default_factory=list)
    processes: dict = field(default_factory=dict)
    system: list = field(default_factory=list)


def _tokens(text):
    pos, line = 0, 1
    out = []
    while pos < len(text):
        m = _TOK.match(text, pos)
        if not m:
            raise XtaSyntaxError(f"unexpected character {text[pos]!r}", line)
        if m.lastgroup in ("int", "id", "op"):
            out.append((m.lastgroup, m.group(), line))
        line += m.group().count("\n")
        pos = m.end()
    out.append(("eof", "", line))
    return out


class _Checker:
    def __init__(self, text):
        self.toks = _tokens(text)
        self.i = 0
        self.summary = XtaSummary()

    def peek(self, k=0):
        return self.toks[self.i + k]

    def fail(self, msg):
        raise XtaSyntaxError(msg, self.peek()[2])

    def take(self, text=None, kind=None):
        k, t, _ = self.peek()
        if (text is not None and t != text) or (kind is not None and k != kind):
            self.fail(f"expected {text or kind}, found {t or 'end of input'!r}")
        self.i += 1
        return t

    def at(self, text):
        return self.peek()[1] == text and self.peek()[0] != "eof"

    def ident(self):
        return self.take(kind="id")

    def decls(self, scope):
        while True:
            if self.at("clock"):
                self.take()
                scope["clocks"].append(self.ident())
                while self.at(","):
                    self.take()
                    scope["clocks"].append(self.ident())
                self.take(";")
            elif self.at("bool"):
                self.take()
                while True:
                    scope["bools"].append(self.ident())
                    if self.at("="):
                        self.take()
                        if self.peek()[1] not in ("true", "false"):
                            self.fail("boolean initialiser must be true or false")
                        self.take()
                    if not self.at(","):
                        break
                    self.take()
                self.take(";")
            elif self.at("const"):
                self.take()
                self.take("int")
                scope["ints"].append(self.ident())
                self.take("=")
                self.take(kind="int")
                self.take(";")
            else:
                return

    def expr(self, scope):
        self.conj(scope)
        while self.at("||"):
            self.take()
            self.conj(scope)

    def conj(self, scope):
        self.unary(scope)
        while self.at("&&"):
            self.take()
            self.unary(scope)

    def unary(self, scope):
        if self.at("!"):
            self.take()
            self.unary(scope)
            return
        if self.at("("):
            self.take()
            self.expr(scope)
            self.take(")")
            return
        left = self.atom(scope)
        if self.peek()[1] in ("<", "<=", "==", "!=", ">=", ">"):
            self.take()
            right = self.atom(scope)
            if left == "clock" and right not in ("int", "const"):
                self.fail("clocks may only be compared with integers")
            if left != "clock" and right == "clock":
                self.fail("clock on the right-hand side of a comparison")
        elif left not in ("bool",):
            self.fail("non-boolean expression used as a condition")

    def atom(self, scope):
        k, t, _ = self.peek()
        if k == "int":
            self.take()
            return "int"
        if t in ("true", "false"):
            self.take()
            return "bool"
        name = self.ident()
        if name in scope["clocks"]:
            return "clock"
        if name in scope["ints"]:
            return "const"
        if name in scope["bools"]:
            return "bool"
        self.fail(f"undeclared identifier {name!r}")

    def process(self, glob):
        self.take("process")
        info = ProcessInfo(self.ident())
        self.take("(")
        self.take(")")
        self.take("{")
        scope = {k: list(v) for k, v in glob.items()}
        self.decls(scope)
        info.clocks = scope["clocks"][len(glob["clocks"]):]
        self.take("state")
        while True:
            name = self.ident()
            if name in info.locations:
                self.fail(f"duplicate location {name!r}")
            info.locations.append(name)
            if self.at("{"):
                self.take()
                self.expr(scope)
                self.take("}")
            if not self.at(","):
                break
            self.take()
        self.take(";")
        self.take("init")
        info.initial = self.ident()
        if info.initial not in info.locations:
            self.fail(f"initial location {info.initial!r} not declared")
        self.take(";")
        if self.at("trans"):
            self.take()
            while True:
                src = self.ident()
                self.take("->")
                dst = self.ident()
                for n in (src, dst):
                    if n not in info.locations:
                        self.fail(f"edge uses undeclared location {n!r}")
                self.take("{")
                if self.at("guard"):
                    self.take()
                    self.expr(scope)
                    self.take(";")
                if self.at("assign"):
                    self.take()
                    while True:
                        target = self.ident()
                        if target not in scope["clocks"] + scope["bools"]:
                            self.fail(f"assignment to undeclared {target!r}")
                        self.take(":=")
                        k, t, _ = self.peek()
                        if k != "int" and t not in ("true", "false"):
                            self.fail("assigned value must be a literal")
                        self.take()
                        if not self.at(","):
                            break
                        self.take()
                    self.take(";")
                self.take("}")
                info.edges.append((src, dst))
                if not self.at(","):
                    break
                self.take()
            self.take(";")
        self.take("}")
        if info.name in self.summary.processes:
            self.fail(f"duplicate process {info.name!r}")
        self.summary.processes[info.name] = info

    def run(self) -> XtaSummary:
        glob = {"clocks": [], "bools": [], "ints": []}
        self.decls(glob)
        self.summary.clocks = glob["clocks"]
        self.summary.bools = glob["bools"]
        while self.at("process"):
            self.process(glob)
        if not self.summary.processes:
            self.fail("no process declared")
        self.take("system")
        names = [self.ident()]
        while self.at(","):
            self.take()
            names.append(self.ident())
        line = self.peek()[2]
        self.take(";")
        self.take(kind="eof")
        for n in names:
            if n not in self.summary.processes:
                raise XtaSyntaxError(f"system uses undeclared process {n!r}", line)
        self.summary.system = names
        return self.summary


def check_xta(text: str) -> XtaSummary:
    """Parse ``text`` against the subset grammar; raises :class:`XtaSyntaxError`."""
    return _Checker(text).run()
