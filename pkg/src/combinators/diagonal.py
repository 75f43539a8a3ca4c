"""
The diagonal δ : A1 ⇒ A2 ⊗ A3 and the fixpoint engine built from it.

The diagonal is a copycat from A1 to both copies at once. Links record in
their second slot which copy a thread came from (Int 0 for A2, Int 1 for
A3), and replies out of A1 are routed back by testing that tag.
"""
from src.combinators.gamnet import GamNet, wrap_engine
from src.combinators.macros import CCA, CCI, CCQ_TAGGED
from src.gametrace.arena import GameInterface, fresh_arena, game_arrow, game_tensor
from src.hram.code import IfZero, SetLit, Spark, block
from src.hram.engine import Engine
from src.nominal import NameMinter, Permutation, Polarity

TAGS = (0, 1)


def diagonal_clauses(a1: GameInterface, a2: GameInterface, a3: GameInterface,
                     pi12: Permutation, pi13: Permutation):
    clauses = {}
    for tag, side, pi in ((TAGS[0], a2, pi12), (TAGS[1], a3, pi13)):
        inverse = pi.inverse()
        for t in side.ports():
            if side.polarity(t) is not Polarity.O:
                continue
            back = Spark(inverse.port(t))
            if t in side.initials:
                clauses[t] = block(SetLit(3, tag), CCI, back)
            elif side.is_question(t):
                clauses[t] = block(CCQ_TAGGED, back)
            else:
                clauses[t] = block(CCA, back)
    for s in a1.ports():
        if a1.polarity(s) is not Polarity.P:
            continue
        route = IfZero(3, Spark(pi12.port(s)), Spark(pi13.port(s)))
        if a1.is_question(s):
            clauses[s] = block(CCQ_TAGGED, route)
        else:
            clauses[s] = block(CCA, route)
    return clauses


def diagonal(pi12: Permutation, pi13: Permutation, a: GameInterface) -> Engine:
    """δ over A ⇒ π12·A ⊗ π13·A."""
    a2, a3 = a.rename(pi12), a.rename(pi13)
    interface = game_arrow(a, game_tensor(a2, a3)).base
    return Engine(interface, diagonal_clauses(a, a2, a3, pi12, pi13), label="delta")


def diagonal_net(a: GameInterface, minter: NameMinter) -> GamNet:
    """δ_A as a GAM net on A ⇒ A′ ⊗ A″ for fresh copies."""
    a2, pi12 = fresh_arena(a, minter)
    a3, pi13 = fresh_arena(a, minter)
    return wrap_engine(diagonal(pi12, pi13, a), a, game_tensor(a2, a3), minter)


def fixpoint(a: GameInterface, minter: NameMinter) -> GamNet:
    """
    Fix_A on (A2 ⇒ A1) ⇒ A3: the diagonal engine unchanged, seen through
    an arena where A2 has moved to the argument side.
    """
    a2, pi12 = fresh_arena(a, minter)
    a3, pi13 = fresh_arena(a, minter)
    engine = diagonal(pi12, pi13, a)
    engine = Engine(engine.interface, engine.port_map, label="fix")
    return wrap_engine(engine, game_arrow(a2, a), a3, minter)
