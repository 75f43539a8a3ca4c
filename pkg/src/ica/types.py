"""
ICA types and their arenas.
"""
from dataclasses import dataclass
from typing import Union

from src.gametrace.arena import GameInterface, com_arena, exp_arena, game_arrow, game_tensor
from src.nominal import NameMinter


@dataclass(frozen=True)
class Exp:
    def __str__(self):
        return "exp"


@dataclass(frozen=True)
class Com:
    def __str__(self):
        return "com"


@dataclass(frozen=True)
class Arrow:
    dom: "Type"
    cod: "Type"

    def __str__(self):
        left = f"({self.dom})" if isinstance(self.dom, Arrow) else str(self.dom)
        return f"{left} -> {self.cod}"


@dataclass(frozen=True)
class Prod:
    left: "Type"
    right: "Type"

    def __str__(self):
        if self == VAR:
            return "var"
        if self == SEM:
            return "sem"
        return f"({self.left} × {self.right})"


Type = Union[Exp, Com, Arrow, Prod]

EXP = Exp()
COM = Com()
VAR = Prod(EXP, Arrow(EXP, COM))
SEM = Prod(COM, COM)
BASE_TYPES = (EXP, COM)


def arrows(*types) -> Type:
    """arrows(A, B, C) = A -> B -> C."""
    *args, result = types
    for t in reversed(args):
        result = Arrow(t, result)
    return result


def arena_of(t: Type, minter: NameMinter) -> GameInterface:
    """A fresh arena for `t`: two ports per base type, arrows and products per the arena rules."""
    if isinstance(t, Exp):
        return exp_arena(minter)
    if isinstance(t, Com):
        return com_arena(minter)
    if isinstance(t, Arrow):
        return game_arrow(arena_of(t.dom, minter), arena_of(t.cod, minter))
    if isinstance(t, Prod):
        return game_tensor(arena_of(t.left, minter), arena_of(t.right, minter))
    raise TypeError(f"not a type: {t!r}")


def arena_size(t: Type) -> int:
    if isinstance(t, (Exp, Com)):
        return 2
    if isinstance(t, Arrow):
        return arena_size(t.dom) + arena_size(t.cod)
    return arena_size(t.left) + arena_size(t.right)
