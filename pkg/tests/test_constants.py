import pytest

from src.combinators.gamnet import validate_gamnet
from src.config import ROOT_QUESTION_TAG
from src.errors import TypeCheckError
from src.gametrace.implements import strategy_traces
from src.gametrace.legality import LEGAL, check_legal
from src.hram.code import EMPTY, Int, Message, Pointer
from src.ica.compiler import compile_term
from src.ica.constants import constant_net, lit_net, skip_net
from src.ica.parser import parse
from src.ica.types import COM, EXP, VAR, Arrow
from src.nominal import atom
from src.runtime.scheduler import Seeded, run_program


def test_literal_answers_its_question(minter):
    f = lit_net(5, minter)
    assert validate_gamnet(f).ok
    q, a = f.target.ports()
    result = run_program(f)
    assert result.answer == Message(a, (Pointer(atom(ROOT_QUESTION_TAG, 1)), EMPTY, Int(5)))
    assert result.value == 5
    assert result.audit.empty


def test_skip_answers_done(minter):
    assert run_program(skip_net(minter)).value == "done"


@pytest.mark.parametrize("name, params", [
    ("lit", (3,)), ("skip", ()), ("if", (EXP,)), ("if", (COM,)), ("seq", (EXP,)),
    ("op", ("+",)), ("op", ("*",)), ("newvar", (COM,)), ("par", ()),
])
def test_constants_are_valid_and_legal(name, params, minter):
    f = constant_net(name, params, minter)
    assert validate_gamnet(f).ok
    assert len(f.source) == 0
    for t in strategy_traces(f, 4, values=(0, 1)):
        assert check_legal(t, f.arena, LEGAL).ok


@pytest.mark.parametrize("name, params", [
    ("if", (VAR,)),
    ("newvar", (Arrow(EXP, EXP),)),
    ("op", ("/",)),
    ("while", ()),
])
def test_unknown_constants_are_rejected(name, params, minter):
    with pytest.raises(TypeCheckError):
        constant_net(name, params, minter)


@pytest.mark.parametrize("source, value", [
    ("if 0 then 1 else 2", 1),
    ("if 3 then 1 else 2", 2),
    ("if 0 then skip else skip", "done"),
    ("skip; 4", 4),
    ("7 - 10", -3),
    ("6 * 7", 42),
    ("new x. x := 8; !x", 8),
    ("new x. !x", 0),
    ("new x. x := 1; x := !x + 1; !x", 2),
])
def test_constants_through_programs(source, value):
    f, _ = compile_term(parse(source))
    result = run_program(f)
    assert result.value == value
    assert result.audit.empty


@pytest.mark.parametrize("seed", range(4))
def test_parallel_assignments_race(seed):
    f, _ = compile_term(parse("new x. (x := 1 || x := 2); !x"))
    assert run_program(f, Seeded(seed)).value in (1, 2)
