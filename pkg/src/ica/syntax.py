"""
Terms of ICA with placement annotations.
"""
from dataclasses import dataclass

from src.ica.types import Type


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Lam:
    name: str
    type: Type
    body: "Term"


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"


@dataclass(frozen=True)
class Fix:
    body: "Term"


@dataclass(frozen=True)
class Lit:
    value: int


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class BinOp:
    op: str          # one of + - *
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class If:
    cond: "Term"
    then: "Term"     # taken when cond is 0
    orelse: "Term"


@dataclass(frozen=True)
class Seq:
    first: "Term"
    second: "Term"


@dataclass(frozen=True)
class Assign:
    var: "Term"
    value: "Term"


@dataclass(frozen=True)
class Deref:
    var: "Term"


@dataclass(frozen=True)
class New:
    name: str
    body: "Term"


@dataclass(frozen=True)
class Par:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class At:
    body: "Term"
    node: str


Term = object


def children(t):
    if isinstance(t, (Lam, New)):
        return (t.body,)
    if isinstance(t, (Fix, At)):
        return (t.body,)
    if isinstance(t, App):
        return (t.fn, t.arg)
    if isinstance(t, (BinOp, Par)):
        return (t.left, t.right)
    if isinstance(t, If):
        return (t.cond, t.then, t.orelse)
    if isinstance(t, Seq):
        return (t.first, t.second)
    if isinstance(t, Assign):
        return (t.var, t.value)
    if isinstance(t, Deref):
        return (t.var,)
    return ()


def free_vars(t) -> set:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, (Lam, New)):
        return free_vars(t.body) - {t.name}
    out = set()
    for c in children(t):
        out |= free_vars(c)
    return out


def placements(t) -> dict:
    """Node name → number of annotated subterms placed there."""
    out = {}
    stack = [t]
    while stack:
        term = stack.pop()
        if isinstance(term, At):
            out[term.node] = out.get(term.node, 0) + 1
        stack.extend(children(term))
    return out


def show(t) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Lam):
        return f"(λ{t.name}:{t.type}. {show(t.body)})"
    if isinstance(t, App):
        return f"({show(t.fn)} {show(t.arg)})"
    if isinstance(t, Fix):
        return f"(fix {show(t.body)})"
    if isinstance(t, Lit):
        return str(t.value)
    if isinstance(t, Skip):
        return "skip"
    if isinstance(t, BinOp):
        return f"({show(t.left)} {t.op} {show(t.right)})"
    if isinstance(t, If):
        return f"(if {show(t.cond)} then {show(t.then)} else {show(t.orelse)})"
    if isinstance(t, Seq):
        return f"({show(t.first)}; {show(t.second)})"
    if isinstance(t, Assign):
        return f"({show(t.var)} := {show(t.value)})"
    if isinstance(t, Deref):
        return f"!{show(t.var)}"
    if isinstance(t, New):
        return f"(new {t.name}. {show(t.body)})"
    if isinstance(t, Par):
        return f"({show(t.left)} || {show(t.right)})"
    if isinstance(t, At):
        return f"{{{show(t.body)}}}@{t.node}"
    return repr(t)
