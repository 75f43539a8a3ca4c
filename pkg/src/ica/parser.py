"""
Recursive-descent parser for ICA source text.

Precedence, loosest first: λ / new / if, `;`, `||`, `:=`, `+ -`, `*`,
application (with `fix` and `!` prefixes), atoms. `{M}@Node` places a
subterm on a node.
"""
import re
from dataclasses import dataclass
from typing import List

from src.errors import ParseError
from src.hram.engine import wrap64
from src.ica.syntax import (
    App, Assign, At, BinOp, Deref, Fix, If, Lam, Lit, New, Par, Seq, Skip, Var,
)
from src.ica.types import COM, EXP, SEM, VAR, Arrow, Prod

KEYWORDS = {"fix", "if", "then", "else", "new", "skip", "exp", "com", "var", "sem", "fun"}

TOKEN_RE = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op>:=|\|\||->|→|[λ\\.:;+\-−*×!(){}@])
""", re.VERBOSE)


@dataclass
class Token:
    kind: str
    text: str
    pos: int


def tokenize(source: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = TOKEN_RE.match(source, pos)
        if not m:
            raise ParseError(f"unexpected character {source[pos]!r}", pos)
        kind = m.lastgroup
        text = m.group()
        if kind == "ident" and text in KEYWORDS:
            kind = "kw"
        if kind != "ws":
            tokens.append(Token(kind, text, pos))
        pos = m.end()
    tokens.append(Token("eof", "", len(source)))
    return tokens


class Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.index = 0

    # token helpers

    @property
    def peek(self) -> Token:
        return self.tokens[self.index]

    def at(self, *texts):
        return self.peek.kind in ("op", "kw") and self.peek.text in texts

    def advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, text):
        if not self.at(text):
            self.fail(f"expected {text!r}")
        return self.advance()

    def ident(self) -> str:
        if self.peek.kind != "ident":
            self.fail("expected an identifier")
        return self.advance().text

    def fail(self, message):
        token = self.peek
        found = "end of input" if token.kind == "eof" else repr(token.text)
        raise ParseError(f"{message}, found {found}", token.pos)

    # terms

    def parse(self):
        term = self.expr()
        if self.peek.kind != "eof":
            self.fail("unexpected trailing input")
        return term

    def expr(self):
        if self.at("λ", "\\", "fun"):
            self.advance()
            name = self.ident()
            self.expect(":")
            ty = self.type()
            self.expect(".")
            return Lam(name, ty, self.expr())
        if self.at("new"):
            self.advance()
            name = self.ident()
            self.expect(".")
            return New(name, self.expr())
        if self.at("if"):
            self.advance()
            cond = self.expr()
            self.expect("then")
            then = self.expr()
            self.expect("else")
            return If(cond, then, self.expr())
        return self.seq()

    def seq(self):
        first = self.par()
        if self.at(";"):
            self.advance()
            return Seq(first, self.expr())
        return first

    def par(self):
        left = self.assign()
        while self.at("||"):
            self.advance()
            left = Par(left, self.assign())
        return left

    def assign(self):
        target = self.add()
        if self.at(":="):
            self.advance()
            return Assign(target, self.add())
        return target

    def add(self):
        left = self.mul()
        while self.at("+", "-", "−"):
            op = "+" if self.advance().text == "+" else "-"
            left = BinOp(op, left, self.mul())
        return left

    def mul(self):
        left = self.app()
        while self.at("*"):
            self.advance()
            left = BinOp("*", left, self.app())
        return left

    def app(self):
        if self.at("fix"):
            self.advance()
            term = Fix(self.atom())
        elif self.at("!"):
            self.advance()
            term = Deref(self.atom())
        else:
            term = self.atom()
        while self.starts_atom():
            term = App(term, self.atom())
        return term

    def starts_atom(self):
        token = self.peek
        return token.kind in ("int", "ident") or self.at("skip", "(", "{")

    def atom(self):
        token = self.peek
        if token.kind == "int":
            self.advance()
            return Lit(wrap64(int(token.text)))
        if token.kind == "ident":
            self.advance()
            return Var(token.text)
        if self.at("skip"):
            self.advance()
            return Skip()
        if self.at("("):
            self.advance()
            term = self.expr()
            self.expect(")")
            return term
        if self.at("{"):
            self.advance()
            term = self.expr()
            self.expect("}")
            self.expect("@")
            return At(term, self.ident())
        self.fail("expected a term")

    # types

    def type(self):
        left = self.prod_type()
        if self.at("->", "→"):
            self.advance()
            return Arrow(left, self.type())
        return left

    def prod_type(self):
        left = self.base_type()
        while self.at("×", "*"):
            self.advance()
            left = Prod(left, self.base_type())
        return left

    def base_type(self):
        simple = {"exp": EXP, "com": COM, "var": VAR, "sem": SEM}
        if self.peek.kind == "kw" and self.peek.text in simple:
            return simple[self.advance().text]
        if self.at("("):
            self.advance()
            ty = self.type()
            self.expect(")")
            return ty
        self.fail("expected a type")


def parse(source: str):
    return Parser(source).parse()


def parse_type(source: str):
    parser = Parser(source)
    ty = parser.type()
    if parser.peek.kind != "eof":
        parser.fail("unexpected trailing input")
    return ty
