import numpy as np
import pytest

from src.combinators.compose import naive_compose
from src.combinators.copycat import copycat_net
from src.combinators.gamnet import gam_tensor
from src.errors import InterfaceError, ValidationError
from src.gametrace.arena import com_arena, exp_arena, fresh_arena
from src.gametrace.opponent import GameOpponent
from src.hram.code import EMPTY, End, Int, Message, Pointer, Spark
from src.hram.engine import Engine, Input, Output
from src.hramnet.equivalence import structurally_equivalent
from src.hramnet.net import (
    Net, combine_engines, compose_nets, curry, identity_net, singleton, sink, tensor_nets, uncurry,
    validate_net, with_placement,
)
from src.hramnet.semantics import (
    AlphabetOpponent, ScriptedOpponent, denotation_upto, initial_net, net_step, receive_external,
    settle,
)
from src.hramnet.serialize import net_from_json, net_to_json
from src.hramnet.trace import Move
from src.ica.constants import binop_net, if_net, lit_net, skip_net
from src.ica.types import EXP
from src.nominal import Interface, Permutation, Polarity, fresh_copy

O, P = Polarity.O, Polarity.P


def question(port, n=0):
    return Message(port, (Pointer(1000 + 2 * n), Pointer(1001 + 2 * n), EMPTY))


def lit_ports(f):
    q, a = f.target.ports()
    return q, a


def test_singleton_wiring(minter):
    q, a = minter.fresh_port(), minter.fresh_port()
    q2, a2 = minter.fresh_port(), minter.fresh_port()
    e = Engine(Interface.of((O, q), (P, a)), {q: Spark(a)})
    net = singleton(e, minter, rename=Permutation({q: q2, a: a2}))
    assert net.external == Interface.of((O, q2), (P, a2))
    assert dict(net.chi) == {a: a2, q2: q}
    assert validate_net(net).ok


def test_validate_net_reports_bad_wiring(minter):
    f = lit_net(5, minter).net
    assert validate_net(f).ok
    (q_ext,) = f.external.o_ports()
    (a_int,) = f.engines[0].p_ports()
    bad_chi = dict(f.chi)
    bad_chi[a_int] = bad_chi[q_ext]
    assert not validate_net(Net(f.engines, bad_chi, f.external)).ok
    (q_int,) = f.engines[0].o_ports()
    clash = Interface.of((O, q_int), (P, minter.fresh_port()))
    assert not validate_net(Net(f.engines, f.chi, clash)).ok


def test_lit_denotation(minter):
    f = lit_net(5, minter)
    q, a = lit_ports(f)
    m = question(q)
    traces = denotation_upto(f.net, 2, ScriptedOpponent([m]))
    answer = Message(a, (m.payload[1], EMPTY, Int(5)))
    assert () in traces
    assert (Move(O, m),) in traces
    assert (Move(O, m), Move(P, answer)) in traces
    assert not traces.partial


def test_depth_zero_denotation_is_the_empty_trace(minter):
    f = lit_net(1, minter)
    assert set(denotation_upto(f.net, 0, ScriptedOpponent([question(lit_ports(f)[0])]))) == {()}


def test_alphabet_opponent_asks_once(minter):
    f = lit_net(5, minter)
    traces = denotation_upto(f.net, 3, AlphabetOpponent(max_inputs=1))
    assert len(traces) == 3
    assert max(len(t) for t in traces) == 2


def test_net_step_input_then_output(minter):
    f = lit_net(5, minter)
    q, a = lit_ports(f)
    label, config = receive_external(initial_net(f.net), f.net, question(q))
    assert isinstance(label, Input)
    assert len(config.pending) == 1
    config, steps, exhausted = settle(config, f.net, minter)
    assert not exhausted and steps > 0
    outputs = [label for label, _ in net_step(config, f.net, minter) if isinstance(label, Output)]
    assert [o.message.port for o in outputs] == [a]


def test_identity_is_pure_wiring(minter):
    q, a = minter.fresh_port(), minter.fresh_port()
    ident = identity_net(Interface.of((O, q), (P, a)), minter)
    assert ident.engines == ()
    assert validate_net(ident).ok
    (q2,) = [p for p in ident.external.o_ports() if p != a]
    _, config = receive_external(initial_net(ident), ident, question(q2))
    assert config.pending[0].port == q


def test_identity_composition_is_identity(minter):
    a = Interface.of((O, minter.fresh_port()), (P, minter.fresh_port()))
    f = identity_net(a, minter)
    middle = f.external.restrict(f.codomain)
    copy, rho = fresh_copy(middle, minter)
    g = identity_net(copy, minter)
    composite = compose_nets(f, g, rho)
    assert len(composite.external) == 4
    assert structurally_equivalent(composite, identity_net(a, minter)) is not None


def test_compose_rejects_equal_polarity(minter):
    a = Interface.of((O, minter.fresh_port()), (P, minter.fresh_port()))
    f = identity_net(a, minter)
    g = identity_net(Interface.of((O, minter.fresh_port()), (P, minter.fresh_port())), minter)
    f_out = sorted(f.external.restrict(f.codomain).o_ports())[0]
    g_in = sorted(g.external.restrict(g.domain).o_ports())[0]
    with pytest.raises(InterfaceError):
        compose_nets(f, g, Permutation({f_out: g_in}))


def test_tensor_of_overlapping_nets_fails(minter):
    f = lit_net(5, minter).net
    with pytest.raises(InterfaceError):
        tensor_nets(f, f)
    g = lit_net(6, minter).net
    both = tensor_nets(f, g)
    assert len(both.engines) == 2
    assert validate_net(both).ok


def test_uncurry_undoes_curry(minter):
    a = Interface.of((O, minter.fresh_port()), (P, minter.fresh_port()))
    f = identity_net(a, minter)
    curried, pi = curry(f, f.domain, minter)
    assert curried.domain == frozenset()
    back, _ = uncurry(curried, {pi.port(p) for p in f.domain}, minter)
    assert structurally_equivalent(back, f) is not None
    with pytest.raises(InterfaceError):
        curry(curried, {pi.port(p) for p in f.domain}, minter)


def test_structural_equivalence(minter):
    f = lit_net(5, minter).net
    assert structurally_equivalent(f, f) is not None
    assert structurally_equivalent(f, lit_net(5, minter).net) is not None
    assert structurally_equivalent(f, lit_net(6, minter).net) is None
    two = tensor_nets(lit_net(1, minter).net, lit_net(2, minter).net)
    assert structurally_equivalent(f, two) is None


def test_combined_engines_answer_alike(minter):
    f, g = lit_net(5, minter), lit_net(7, minter)
    both = tensor_nets(f.net, g.net)
    merged = combine_engines(both)
    assert len(merged.engines) == 1
    assert validate_net(merged).ok
    for net in (both, merged):
        config = initial_net(net)
        for n, port in enumerate((lit_ports(f)[0], lit_ports(g)[0])):
            _, config = receive_external(config, net, question(port, n))
        config, _, _ = settle(config, net, minter)
        values = sorted(m.payload[2].value for m in config.pending)
        assert values == [5, 7]


def two_engine_net(seed, minter):
    """Two single-engine nets side by side, or one wired into the other; flags a closed pair."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(0, 9))
    if seed % 3 == 0:
        closed = (lambda: lit_net(int(rng.integers(0, 9)), minter), lambda: skip_net(minter))
        f, g = (closed[int(rng.integers(2))]() for _ in range(2))
        return gam_tensor(f, g), True
    if seed % 3 == 1:
        constants = (lambda: lit_net(n, minter), lambda: skip_net(minter),
                     lambda: binop_net("+-*"[n % 3], minter), lambda: if_net(EXP, minter))
        f = constants[int(rng.integers(len(constants)))]()
    else:
        f = copycat_net((exp_arena, com_arena)[n % 2](minter), minter)
    g = copycat_net(fresh_arena(f.target, minter)[0], minter)
    return naive_compose(f, g), False


@pytest.mark.parametrize("seed", range(10))
def test_combining_engines_keeps_every_play(seed, minter):
    f, closed = two_engine_net(seed, minter)
    assert len(f.net.engines) == 2
    merged = combine_engines(f.net)
    assert validate_net(merged).ok
    opponent = GameOpponent(f.arena, values=(0, 4), single_threaded=not closed,
                            alternating=not closed)
    before = denotation_upto(f.net, 6, opponent)
    after = denotation_upto(merged, 6, opponent)
    assert before.max_length() >= 2
    assert before.canonical() <= after.canonical()


def test_with_placement_keeps_inner_annotations(minter):
    f = lit_net(5, minter).net
    inner = with_placement(f, "B")
    outer = with_placement(tensor_nets(inner, lit_net(6, minter).net), "A")
    assert [e.placement for e in outer.engines] == ["B", "A"]


def test_net_json_form(minter):
    f = with_placement(lit_net(5, minter).net, "A")
    back = net_from_json(net_to_json(f))
    assert back.engines == f.engines
    assert dict(back.chi) == dict(f.chi)
    assert back.external == f.external
    with pytest.raises(ValidationError):
        net_from_json({"engines": [{"interface": "nonsense"}]})
    with pytest.raises(ValidationError):
        net_from_json({"version": 99, "engines": [], "chi": {}, "external": []})


def test_sink_ends_every_thread(minter):
    a = Interface.of((O, minter.fresh_port()), (P, minter.fresh_port()))
    s = sink(a, minter)
    (port,) = s.external.o_ports()
    _, config = receive_external(initial_net(s), s, question(port))
    config, _, _ = settle(config, s, minter)
    assert config.quiescent()
    assert End() in s.engines[0].port_map.values()
