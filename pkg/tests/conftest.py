import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.config import COMPILE_TAG, OPPONENT_TAG  # noqa: E402
from src.gametrace.arena import com_arena, fresh_arena, game_arrow  # noqa: E402
from src.hram.code import regs  # noqa: E402
from src.hram.engine import Thread, execute  # noqa: E402
from src.hramnet.trace import move  # noqa: E402
from src.nominal import NameMinter, Polarity, atom  # noqa: E402

O, P = Polarity.O, Polarity.P


@pytest.fixture
def minter():
    return NameMinter(COMPILE_TAG)


def ptr(n):
    """Pointer atoms for hand-written traces."""
    return atom(OPPONENT_TAG, n)


def om(port, j=None, own=None, value=None):
    return move(O, port, j, own, value)


def pm(port, j=None, own=None, value=None):
    return move(P, port, j, own, value)


@pytest.fixture
def cc_arena(minter):
    """
    The copycat arena (com1 ⇒ com2) ⇒ (com3 ⇒ com4), the inner arena
    com1 ⇒ com2 with its renaming onto com3 ⇒ com4, and ports by name.
    """
    inner = game_arrow(com_arena(minter), com_arena(minter))
    outer, pi = fresh_arena(inner, minter)
    names = {}
    for i, port in enumerate(inner.ports()):
        names[("r", "d")[i % 2] + str(i // 2 + 1)] = port
        names[("r", "d")[i % 2] + str(i // 2 + 3)] = pi.port(port)
    return game_arrow(inner, outer), names, inner, pi


def copycat_play(n):
    """The complete single-threaded copycat play over `cc_arena`."""
    return (
        om(n["r4"], ptr(0), ptr(1)),
        pm(n["r2"], ptr(1), ptr(2)),
        om(n["r1"], ptr(2), ptr(3)),
        pm(n["r3"], ptr(1), ptr(4)),
        om(n["d3"], ptr(4)),
        pm(n["d1"], ptr(3)),
        om(n["d2"], ptr(2)),
        pm(n["d4"], ptr(1)),
    )


def drive(e, heap, m, minter):
    """Run the thread started by `m` on engine `e` until it leaves the engine."""
    chi = {p: p for p in e.p_ports()}
    thread = Thread(e.port_map[m.port], regs(m.payload))
    while True:
        outcome = execute(thread, heap, e, chi, minter)
        assert outcome.fault is None, outcome.fault
        if outcome.output is not None:
            return outcome.output
        thread = outcome.thread
