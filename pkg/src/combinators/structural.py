"""
Evaluation and projections.
"""
from typing import Sequence

from src.combinators.copycat import copycat_clauses
from src.combinators.gamnet import GamNet, wrap_engine
from src.errors import InterfaceError
from src.gametrace.arena import GameInterface, empty_arena, fresh_arena, game_arrow, game_tensor
from src.hram.code import End
from src.hram.engine import Engine
from src.nominal import NameMinter


def eval_net(a: GameInterface, b: GameInterface, minter: NameMinter) -> GamNet:
    """
    eval_{A,B} : (A ⇒ B) ⊗ A′ ⇒ B′, the copycat on A ⇒ B with its copy's
    argument moved to the source.
    """
    fn = game_arrow(a, b)
    a2, pi_a = fresh_arena(a, minter)
    b2, pi_b = fresh_arena(b, minter)
    copy = game_arrow(a2, b2)
    pi = pi_b.compose(pi_a)
    engine = Engine(game_arrow(fn, copy).base, copycat_clauses(fn, copy, pi), label="eval")
    return wrap_engine(engine, game_tensor(fn, a2), b2, minter)


def game_projection(components: Sequence[GameInterface], i: int, minter: NameMinter) -> GamNet:
    """
    Π_i : A1 ⊗ … ⊗ An ⇒ Ai′, a copycat on component i that ignores every
    other component.
    """
    if not 0 <= i < len(components):
        raise InterfaceError(f"projection index {i} out of range")
    source = empty_arena()
    for c in components:
        source = game_tensor(source, c)
    target, pi = fresh_arena(components[i], minter)
    clauses = copycat_clauses(components[i], target, pi)
    for j, c in enumerate(components):
        if j != i:
            for port in c.base.p_ports():
                clauses[port] = End()
    engine = Engine(game_arrow(source, target).base, clauses, label=f"proj{i}")
    return wrap_engine(engine, source, target, minter)
