import pytest

from src.errors import EvaluationTimeout
from src.ica.interpreter import DONE, reference_interpret
from src.ica.parser import parse


@pytest.mark.parametrize("source, value", [
    ("1+2", 3),
    ("new x. x := 8; !x", 8),
    ("skip", DONE),
    ("if 0 then 10 else 20", 10),
    ("if 4 then 10 else 20", 20),
    ("(λx:exp. x + x) 21", 42),
    ("fix (λf:exp -> exp. λn:exp. if n then 1 else n * f (n - 1)) 5", 120),
    ("new x. (x := 1 || x := !x + 1); !x", 2),
    ("9223372036854775807 + 1", -2**63),
])
def test_reference_values(source, value):
    assert reference_interpret(parse(source)) == value


def test_omega_times_out():
    with pytest.raises(EvaluationTimeout):
        reference_interpret(parse("fix (λx:com. x)"), fuel=10_000)


def test_free_variables_from_env():
    assert reference_interpret(parse("x * x"), env={"x": 7}) == 49


def test_call_by_name():
    # the argument is evaluated once per use
    source = "new c. (λx:exp. x + x) (c := !c + 1; !c)"
    assert reference_interpret(parse(source)) == 3


def test_storage_is_released():
    source = "new x. new y. x := 1; y := 2; !x + !y"
    assert reference_interpret(parse(source)) == 3
