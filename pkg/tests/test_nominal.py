import pytest

from src.errors import InterfaceError, NameExhausted
from src.nominal import (
    COUNTER_LIMIT, Interface, NameMinter, Permutation, Polarity, arrow, atom, counter_of,
    dual, fresh_copy, fresh_port_name, node_tag_of, same_shape, tensor,
)

O, P = Polarity.O, Polarity.P


def test_atoms_carry_node_tag():
    a = atom(3, 17)
    assert node_tag_of(a) == 3
    assert counter_of(a) == 17


def test_minters_on_different_nodes_never_collide():
    m1, m2 = NameMinter(1), NameMinter(2)
    names = {m1.fresh() for _ in range(50)} | {m2.fresh() for _ in range(50)}
    assert len(names) == 100


def test_minter_exhaustion():
    m = NameMinter(1, start=COUNTER_LIMIT - 1)
    m.fresh()
    with pytest.raises(NameExhausted):
        m.fresh()


def test_tensor_rejects_overlap():
    a = Interface.of((O, 1), (P, 2))
    with pytest.raises(InterfaceError):
        tensor(a, Interface.of((O, 2)))
    assert len(tensor(a, Interface.of((O, 3)))) == 3


def test_arrow_dualises_the_argument():
    a = Interface.of((O, 1), (P, 2))
    b = Interface.of((O, 3), (P, 4))
    c = arrow(a, b)
    assert c.polarity(1) is P and c.polarity(2) is O
    assert c.polarity(3) is O and c.polarity(4) is P
    assert dual(dual(a)) == a


def test_equality_ignores_order():
    assert Interface.of((O, 1), (P, 2)) == Interface.of((P, 2), (O, 1))


def test_permutation_compose_and_inverse():
    first = Permutation({1: 2, 2: 1})
    second = Permutation({2: 3, 3: 2})
    both = second.compose(first)
    assert both.port(1) == 3
    assert both.port(2) == 1
    assert first.compose(first.inverse()).is_identity()


def test_permutation_must_be_injective():
    with pytest.raises(InterfaceError):
        Permutation({1: 5, 2: 5})


def test_fresh_copy_has_same_shape():
    m = NameMinter(0)
    a = Interface.of((O, m.fresh()), (P, m.fresh()))
    copy, perm = fresh_copy(a, m)
    assert not (copy.support() & a.support())
    assert a.rename(perm) == copy
    assert same_shape(a, copy) is not None
    assert same_shape(a, Interface.of((O, 99))) is None


def test_fresh_port_names_are_distinct_atoms():
    m = NameMinter(4)
    a, b = fresh_port_name(m), fresh_port_name(m)
    assert a != b
    assert node_tag_of(a) == node_tag_of(b) == 4
