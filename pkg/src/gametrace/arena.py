"""
Game interfaces (arenas): a polarised interface with questions, initial
moves and an enabling relation between ports.
"""
from dataclasses import dataclass, field
from typing import FrozenSet, Tuple

from src.errors import InterfaceError
from src.nominal import (
    Interface, NameMinter, Permutation, Polarity, arrow, fresh_copy, tensor,
)


@dataclass(frozen=True)
class GameInterface:
    base: Interface
    questions: FrozenSet[int] = frozenset()
    initials: FrozenSet[int] = frozenset()
    enabling: FrozenSet[Tuple[int, int]] = frozenset()
    valued: FrozenSet[int] = field(default=frozenset())   # answers that carry an Int

    def __post_init__(self):
        support = self.base.support()
        if not self.questions <= support or not self.initials <= self.questions:
            raise InterfaceError("questions and initials must be ports of the arena")
        for a, b in self.enabling:
            if a not in self.questions:
                raise InterfaceError(f"enabler {a:#x} is not a question")
            if b in self.initials:
                raise InterfaceError(f"initial move {b:#x} cannot be enabled")
            if self.base.polarity(a) is self.base.polarity(b):
                raise InterfaceError(f"{a:#x} ⊢ {b:#x} joins ports of equal polarity")

    def ports(self):
        return self.base.names()

    def polarity(self, port) -> Polarity:
        return self.base.polarity(port)

    def is_question(self, port):
        return port in self.questions

    def is_answer(self, port):
        return port in self.base and port not in self.questions

    def enables(self, a, b):
        return (a, b) in self.enabling

    def enabled_by(self, a):
        return [b for (x, b) in self.enabling if x == a]

    def __contains__(self, port):
        return port in self.base

    def __len__(self):
        return len(self.base)

    def rename(self, perm: Permutation) -> "GameInterface":
        return GameInterface(
            self.base.rename(perm),
            frozenset(perm.port(q) for q in self.questions),
            frozenset(perm.port(i) for i in self.initials),
            frozenset((perm.port(a), perm.port(b)) for a, b in self.enabling),
            frozenset(perm.port(v) for v in self.valued),
        )

    def restrict(self, names) -> "GameInterface":
        keep = set(names)
        return GameInterface(
            self.base.restrict(keep),
            self.questions & keep,
            self.initials & keep,
            frozenset((a, b) for a, b in self.enabling if a in keep and b in keep),
            self.valued & keep,
        )

    def __repr__(self):
        return f"GameInterface({len(self.base)} ports, initials={len(self.initials)})"


def empty_arena():
    return GameInterface(Interface())


def base_arena(minter: NameMinter, valued: bool) -> GameInterface:
    """One O-question and its P-answer."""
    q, a = minter.fresh_port(), minter.fresh_port()
    return GameInterface(
        Interface.of((Polarity.O, q), (Polarity.P, a)),
        questions=frozenset({q}),
        initials=frozenset({q}),
        enabling=frozenset({(q, a)}),
        valued=frozenset({a}) if valued else frozenset(),
    )


def exp_arena(minter: NameMinter):
    return base_arena(minter, valued=True)


def com_arena(minter: NameMinter):
    return base_arena(minter, valued=False)


def game_tensor(a: GameInterface, b: GameInterface) -> GameInterface:
    return GameInterface(
        tensor(a.base, b.base),
        a.questions | b.questions,
        a.initials | b.initials,
        a.enabling | b.enabling,
        a.valued | b.valued,
    )


def game_arrow(a: GameInterface, b: GameInterface) -> GameInterface:
    """A ⇒ B: A dualised, B's initials enable A's, only B's initials stay initial."""
    return GameInterface(
        arrow(a.base, b.base),
        a.questions | b.questions,
        b.initials,
        a.enabling | b.enabling | frozenset((ib, ia) for ib in b.initials for ia in a.initials),
        a.valued | b.valued,
    )


def fresh_arena(a: GameInterface, minter: NameMinter):
    """A renamed copy of `a` on fresh port names, with the renaming."""
    _, perm = fresh_copy(a.base, minter)
    return a.rename(perm), perm


def game_iso(a: GameInterface, b: GameInterface) -> Permutation:
    """
    Match the ports of two arenas by position.

    Raises InterfaceError unless the positional matching preserves
    polarity, questions, initial moves, values and enabling.
    """
    left, right = a.ports(), b.ports()
    if len(left) != len(right):
        raise InterfaceError(f"arenas differ in size: {len(left)} vs {len(right)}")
    mapping = dict(zip(left, right))
    for x, y in mapping.items():
        if a.polarity(x) is not b.polarity(y):
            raise InterfaceError(f"ports {x:#x} and {y:#x} differ in polarity")
        if (x in a.questions) != (y in b.questions) or (x in a.initials) != (y in b.initials):
            raise InterfaceError(f"ports {x:#x} and {y:#x} play different roles")
        if (x in a.valued) != (y in b.valued):
            raise InterfaceError(f"ports {x:#x} and {y:#x} carry different data")
    perm = Permutation(mapping)
    if frozenset((perm.port(x), perm.port(y)) for x, y in a.enabling) != b.enabling:
        raise InterfaceError("enabling relations do not match")
    return perm


def arena_to_json(a: GameInterface):
    return {
        "ports": [[str(pol), f"{name:#x}"] for name, pol in a.base.items()],
        "questions": [f"{q:#x}" for q in a.ports() if q in a.questions],
        "initials": [f"{i:#x}" for i in a.ports() if i in a.initials],
        "enabling": sorted([f"{x:#x}", f"{y:#x}"] for x, y in a.enabling),
        "valued": [f"{v:#x}" for v in a.ports() if v in a.valued],
    }


def arena_from_json(doc) -> GameInterface:
    parse = lambda text: int(text, 16)
    try:
        base = Interface.of(*((Polarity(pol), parse(name)) for pol, name in doc["ports"]))
        return GameInterface(
            base,
            frozenset(map(parse, doc.get("questions", []))),
            frozenset(map(parse, doc.get("initials", []))),
            frozenset((parse(x), parse(y)) for x, y in doc.get("enabling", [])),
            frozenset(map(parse, doc.get("valued", []))),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise InterfaceError(f"malformed arena document: {e}") from None
