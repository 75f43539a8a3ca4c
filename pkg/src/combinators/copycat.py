"""
Copycat engines.

A copycat over X ⇒ X′ answers every O-message by the same message on the
other side, justified by the copy of its justifier. The links between
the two sides live in the heap: a question's fresh pointer maps to the
pointer it copies.
"""
from typing import Dict

from src.combinators.gamnet import GamNet, wrap_engine
from src.combinators.macros import CCA, CCI, CCQ
from src.errors import InterfaceError
from src.gametrace.arena import GameInterface, fresh_arena, game_arrow, game_iso
from src.hram.code import Code, Spark, block
from src.hram.engine import Engine
from src.nominal import NameMinter, Permutation, Polarity


def copycat_clauses(source: GameInterface, target: GameInterface, pi: Permutation,
                    init=CCI) -> Dict[int, Code]:
    """
    Port map of a copycat from `source` (on the dual side) to `target`.

    `pi` maps source ports to target ports; `init` runs on initial
    questions of the target.
    """
    inverse = pi.inverse()
    clauses = {}
    for t in target.ports():
        if target.polarity(t) is not Polarity.O:
            continue
        back = inverse.port(t)
        if t in target.initials:
            clauses[t] = block(init, Spark(back))
        elif target.is_question(t):
            clauses[t] = block(CCQ, Spark(back))
        else:
            clauses[t] = block(CCA, Spark(back))
    for s in source.ports():
        # P-ports of the source are the engine's O-ports
        if source.polarity(s) is not Polarity.P:
            continue
        ahead = pi.port(s)
        if source.is_question(s):
            clauses[s] = block(CCQ, Spark(ahead))
        else:
            clauses[s] = block(CCA, Spark(ahead))
    return clauses


def copycat_engine(init, pi: Permutation, a: GameInterface, label="cc") -> Engine:
    """CC_{init,π,A} over A ⇒ π·A."""
    target = a.rename(pi)
    game_iso(a, target)
    if set(pi.ports) != set(a.ports()):
        raise InterfaceError("copycat renaming must cover the whole arena")
    arena = game_arrow(a, target)
    return Engine(arena.base, copycat_clauses(a, target, pi, init), label=label)


def copycat_net(a: GameInterface, minter: NameMinter, init=CCI) -> GamNet:
    """CC_A: the singleton copycat GAM net on A ⇒ A′ for a fresh copy A′."""
    target, pi = fresh_arena(a, minter)
    engine = copycat_engine(init, pi, a)
    return wrap_engine(engine, a, target, minter)
