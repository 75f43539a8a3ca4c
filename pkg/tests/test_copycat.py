import pytest

from conftest import drive
from src.combinators.copycat import copycat_clauses, copycat_engine, copycat_net
from src.combinators.gamnet import gam_curry, gam_uncurry, validate_gamnet, wrap_engine
from src.combinators.macros import CCI, MACROS
from src.errors import InterfaceError
from src.gametrace.algebra import cc_traces
from src.gametrace.arena import exp_arena, game_arrow, game_iso
from src.gametrace.implements import implements_check, strategy_traces
from src.gametrace.legality import check_legal
from src.hram.code import EMPTY, Flip, Message, New, Pointer, Spark, block
from src.hram.engine import Engine
from src.nominal import NameMinter, atom

HEAP_TAG = 7


def test_macros_expand_to_their_instructions():
    assert MACROS["cci"] == (Flip(0, 1), New(1, 0, 3))
    assert set(MACROS) == {"cci", "ccq", "cca", "exi", "exq"}


def test_copycat_engine_links(cc_arena):
    _, n, inner, pi = cc_arena
    e = copycat_engine(CCI, pi, inner)
    minter = NameMinter(HEAP_TAG)
    heap = {}
    p0, p1, p3 = Pointer(1), Pointer(2), Pointer(3)
    k1, k2 = Pointer(atom(HEAP_TAG, 0)), Pointer(atom(HEAP_TAG, 1))

    out = drive(e, heap, Message(n["r4"], (p0, p1, EMPTY)), minter)
    assert out == Message(n["r2"], (p1, k1, EMPTY))
    assert heap == {k1.name: (p1, EMPTY)}

    out = drive(e, heap, Message(n["r1"], (k1, p3, EMPTY)), minter)
    assert out == Message(n["r3"], (p1, k2, EMPTY))
    assert heap[k2.name] == (p3, EMPTY)

    out = drive(e, heap, Message(n["d3"], (k2, EMPTY, EMPTY)), minter)
    assert out == Message(n["d1"], (p3, EMPTY, EMPTY))
    assert k2.name not in heap

    out = drive(e, heap, Message(n["d2"], (k1, EMPTY, EMPTY)), minter)
    assert out == Message(n["d4"], (p1, EMPTY, EMPTY))
    assert heap == {}


def test_copycat_needs_a_matching_renaming(cc_arena, minter):
    _, _, inner, _ = cc_arena
    with pytest.raises(InterfaceError):
        copycat_engine(CCI, game_iso(exp_arena(minter), exp_arena(minter)), inner)


def test_copycat_net_implements_copycat(cc_arena, minter):
    _, _, inner, _ = cc_arena
    f = copycat_net(inner, minter)
    assert validate_gamnet(f).ok
    strategy = cc_traces(f.source, game_iso(f.source, f.target), 6)
    report = implements_check(f, strategy, k=6)
    assert report.ok, str(report)


def test_copycat_plays_are_legal(minter):
    f = copycat_net(exp_arena(minter), minter)
    plays = strategy_traces(f, 4, values=(0, 3))
    assert len(plays) > 1
    for t in plays:
        assert check_legal(t, f.arena).ok


def test_broken_copycat_is_caught(cc_arena, minter):
    _, n, inner, pi = cc_arena
    target = inner.rename(pi)
    clauses = copycat_clauses(inner, target, pi)
    # forward the non-initial question without translating its justifier
    clauses[n["r1"]] = block(New(1, 1, 3), Spark(n["r3"]))
    broken = wrap_engine(Engine(game_arrow(inner, target).base, clauses, label="broken"),
                         inner, target, minter)
    report = implements_check(broken, cc_traces(inner, pi, 6), k=6)
    assert not report.ok
    assert report.extra
    assert set(report.to_frame()["kind"]) >= {"extra"}


def test_curry_moves_the_argument_into_the_target(minter):
    a = exp_arena(minter)
    f = copycat_net(a, minter)
    curried = gam_curry(f, 0)
    assert len(curried.source) == 0
    assert curried.target.ports() == a.ports() + f.target.ports()
    back = gam_uncurry(curried, a, f.target)
    assert back.source.ports() == f.source.ports()
    assert back.target == f.target
    assert implements_check(back, cc_traces(a, game_iso(a, f.target), 4), k=4).ok
    with pytest.raises(InterfaceError):
        gam_uncurry(curried, a, exp_arena(minter))
