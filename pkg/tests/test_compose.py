import numpy as np
import pytest

from conftest import drive
from src.combinators.compose import (
    composition_operator_K, gam_compose, gam_compose_split, k_arena, k_ports, naive_compose,
)
from src.combinators.copycat import copycat_net
from src.combinators.gamnet import GamNet, gam_tensor
from src.errors import InterfaceError
from src.gametrace.algebra import cc_traces, game_compose, interleave, trace_compose
from src.gametrace.arena import com_arena, exp_arena, fresh_arena, game_iso
from src.gametrace.implements import implements_check, strategy_traces
from src.gametrace.legality import JUSTIFIED, check_legal
from src.gametrace.opponent import GameOpponent
from src.hram.code import EMPTY, Message, Pointer
from src.hramnet.equivalence import structurally_equivalent
from src.hramnet.net import compose_nets, identity_net, rename_net, validate_net
from src.hramnet.semantics import AlphabetOpponent, denotation_upto
from src.ica.compiler import compile_term
from src.ica.constants import binop_net, if_net, lit_net, skip_net
from src.ica.interpreter import reference_interpret
from src.ica.parser import parse
from src.ica.types import EXP
from src.runtime.scheduler import RoundRobin, root_question, run_local, run_program
from src.nominal import NameMinter, Permutation, atom, fresh_copy

HEAP_TAG = 9
DEPTH = 6

CLOSED = (
    lambda n, m: lit_net(n, m),
    lambda n, m: skip_net(m),
)
SINGLE = CLOSED + (
    lambda n, m: binop_net("+-*"[n % 3], m),
    lambda n, m: if_net(EXP, m),
    lambda n, m: copycat_net(exp_arena(m), m),
    lambda n, m: copycat_net(com_arena(m), m),
)
BODIES = ("x + {n}", "x * {n}", "x - {n}", "if x then {n} else x", "x + x", "{n}")


def pick(rng, pool, minter):
    return pool[int(rng.integers(len(pool)))](int(rng.integers(0, 9)), minter)


def open_net(rng, minter):
    """A compiled net on exp ⇒ exp with a randomly chosen body over x."""
    body = BODIES[int(rng.integers(len(BODIES)))].format(n=int(rng.integers(1, 9)))
    return compile_term(parse(body), [("x", EXP)], minter=minter)[0]


def plays(f, values=(0,), threads=False, k=DEPTH):
    opponent = GameOpponent(f.arena, values=values, single_threaded=not threads,
                            alternating=not threads)
    return denotation_upto(f.net, k, opponent)


def equivalent(f, g, k=4):
    """Same bounded plays, matching the two arenas port by port."""
    perm = game_iso(f.arena, g.arena)
    left = strategy_traces(f, k).canonical(perm)
    right = strategy_traces(g, k).canonical()
    return left == right


def chain(minter, a):
    f = copycat_net(a, minter)
    g = copycat_net(fresh_arena(f.target, minter)[0], minter)
    return f, g


def test_k_links_initial_questions(minter):
    a, b, b2, c = (com_arena(minter) for _ in range(4))
    ports = k_ports(a, b, b2, c, minter)
    k = composition_operator_K(ports)
    assert set(k.interface) == set(k_arena(ports).base)
    heap_minter = NameMinter(HEAP_TAG)
    heap = {}
    outer_j, outer_own, g_own, f_own = (Pointer(n) for n in (1, 2, 3, 4))
    k1, k2, k3 = (Pointer(atom(HEAP_TAG, n)) for n in range(3))

    # the outer question enters and goes to g
    out = drive(k, heap, Message(ports.c2.ports()[0], (outer_j, outer_own, EMPTY)), heap_minter)
    assert out == Message(ports.kc.ports()[0], (outer_own, k1, EMPTY))

    # g's question to f keeps the outer justifier next to the link
    out = drive(k, heap, Message(ports.kb2.ports()[0], (k1, g_own, EMPTY)), heap_minter)
    assert out == Message(ports.kb.ports()[0], (outer_own, k2, EMPTY))
    assert heap[k2.name] == (g_own, outer_own)

    # f's initial question leaves justified by the outer name
    out = drive(k, heap, Message(ports.ka.ports()[0], (k2, f_own, EMPTY)), heap_minter)
    assert out == Message(ports.a2.ports()[0], (outer_own, k3, EMPTY))
    assert heap[k3.name] == (f_own, EMPTY)


def test_k_copies_answers_like_a_copycat(minter):
    a, b, b2, c = (exp_arena(minter) for _ in range(4))
    ports = k_ports(a, b, b2, c, minter)
    k = composition_operator_K(ports)
    heap_minter = NameMinter(HEAP_TAG)
    heap = {}
    drive(k, heap, Message(ports.c2.ports()[0], (Pointer(1), Pointer(2), EMPTY)), heap_minter)
    link = Pointer(atom(HEAP_TAG, 0))
    out = drive(k, heap, Message(ports.kc.ports()[1], (link, EMPTY, EMPTY)), heap_minter)
    assert out == Message(ports.c2.ports()[1], (Pointer(2), EMPTY, EMPTY))
    assert heap == {}


def test_compose_rejects_mismatched_arenas(minter):
    f = copycat_net(exp_arena(minter), minter)
    g = copycat_net(com_arena(minter), minter)
    with pytest.raises(InterfaceError):
        gam_compose(f, g, minter)


def test_composing_copycats_implements_copycat(minter):
    f, g = chain(minter, exp_arena(minter))
    h = gam_compose(f, g, minter)
    assert validate_net(h.net).ok
    assert len(h.net.engines) == 3
    strategy = cc_traces(h.source, game_iso(h.source, h.target), 6)
    report = implements_check(h, strategy, k=6)
    assert report.ok, str(report)


def test_naive_composition_leaks_hidden_names(minter):
    f, g = chain(minter, exp_arena(minter))
    naive = naive_compose(f, g)
    (question,) = naive.target.initials
    result = run_local(naive.net, root_question(question), RoundRobin())
    report = check_legal(result.trace, naive.arena, [JUSTIFIED])
    assert not report.ok

    composed = gam_compose(f, g, minter)
    (question,) = composed.target.initials
    result = run_local(composed.net, root_question(question), RoundRobin())
    assert len(result.trace) == 2
    assert check_legal(result.trace, composed.arena).ok


def test_split_operator_behaves_like_single_engine(minter):
    lit = lit_net(5, minter)
    cc = copycat_net(fresh_arena(lit.target, minter)[0], minter)
    single = gam_compose(lit, cc, minter)
    split = gam_compose_split(lit, cc, minter)
    assert len(split.net.engines) == len(single.net.engines) + 2
    assert run_program(single).value == 5
    assert run_program(split).value == 5
    assert equivalent(single, split)


def test_gam_identity_laws_up_to_plays(minter):
    f, _ = chain(minter, com_arena(minter))
    before = copycat_net(fresh_arena(f.source, minter)[0], minter)
    after = copycat_net(fresh_arena(f.target, minter)[0], minter)
    assert equivalent(gam_compose(before, f, minter), f)
    assert equivalent(gam_compose(f, after, minter), f)


def test_gam_composition_is_associative_up_to_plays(minter):
    f, g = chain(minter, com_arena(minter))
    h = copycat_net(fresh_arena(g.target, minter)[0], minter)
    one = gam_compose(gam_compose(f, g, minter), h, minter)
    two = gam_compose(f, gam_compose(g, h, minter), minter)
    assert len(one.net.engines) == len(two.net.engines) == 5
    assert equivalent(one, two)


@pytest.mark.parametrize("seed", range(10))
def test_identity_laws_hold_up_to_structure(seed, minter):
    rng = np.random.default_rng(seed)
    f = pick(rng, SINGLE, minter)

    a, rho = fresh_copy(f.source.base, minter)
    before = identity_net(a, minter)
    copy_of = {}
    for x, y in before.chi.items():
        if x in a:
            copy_of[x] = y
        else:
            copy_of[y] = x
    pi = Permutation({copy_of[rho.port(p)]: p for p in f.source.ports()})
    assert structurally_equivalent(compose_nets(before, f.net, pi), f.net) is not None

    b, rho = fresh_copy(f.target.base, minter)
    after = identity_net(b, minter)
    pi = Permutation({p: rho.port(p) for p in f.target.ports()})
    assert structurally_equivalent(compose_nets(f.net, after, pi), f.net) is not None


@pytest.mark.parametrize("seed", range(20))
def test_net_composition_is_associative(seed, minter):
    rng = np.random.default_rng(seed)
    f, g, h = (open_net(rng, minter) for _ in range(3))
    fg, gh = game_iso(f.target, g.source), game_iso(g.target, h.source)
    left = compose_nets(compose_nets(f.net, g.net, fg), h.net, gh)
    right = compose_nets(f.net, compose_nets(g.net, h.net, gh), fg)
    assert left.engines == right.engines
    assert dict(left.chi) == dict(right.chi)
    assert left.external == right.external
    assert left.domain == right.domain
    assert validate_net(left).ok


@pytest.mark.parametrize("seed", range(10))
def test_tensor_denotes_interleaving(seed, minter):
    rng = np.random.default_rng(seed)
    f, g = pick(rng, CLOSED, minter), pick(rng, CLOSED, minter)
    both = plays(gam_tensor(f, g), threads=True)
    assert not both.partial
    expected = interleave(plays(f, threads=True), plays(g, threads=True), DEPTH)
    assert both.canonical() == expected.canonical()


@pytest.mark.parametrize("seed", range(10))
def test_net_composition_denotes_trace_composition(seed, minter):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(0, 9))
    f = lit_net(n, minter)
    if seed % 2:
        g = open_net(rng, minter)
    else:
        g = copycat_net(fresh_arena(f.target, minter)[0], minter)
    # g may ask for its argument twice under one justifier
    left = denotation_upto(f.net, DEPTH, AlphabetOpponent())
    expected = trace_compose(left, plays(g, values=(n,)), game_iso(f.target, g.source), DEPTH)
    composite = plays(naive_compose(f, g))
    assert any(len(t) == 2 for t in composite)
    assert composite.canonical() == expected.canonical()


@pytest.mark.parametrize("seed", range(5))
def test_denotation_follows_renaming(seed, minter):
    rng = np.random.default_rng(seed)
    f = open_net(rng, minter)
    names = sorted(set(f.net.external) | set(f.net.owner))
    perm = Permutation({p: minter.fresh_port() for p in names})
    renamed = GamNet(rename_net(f.net, perm), f.source.rename(perm), f.target.rename(perm))
    assert plays(renamed, values=(0, 3)).canonical() == plays(f, values=(0, 3)).canonical(perm)


def lit_then_copycat(minter):
    f = lit_net(5, minter)
    return f, copycat_net(fresh_arena(f.target, minter)[0], minter), (0,), (0, 5)


def lit_then_if(n):
    def build(minter):
        f = lit_net(n, minter)
        g, _ = compile_term(parse("if x then 1 else 2"), [("x", EXP)], minter=minter)
        return f, g, (0,), tuple(sorted({0, n}))
    return build


def if_then_copycat(minter):
    f, _ = compile_term(parse("if x then 7 else x"), [("x", EXP)], minter=minter)
    return f, copycat_net(fresh_arena(f.target, minter)[0], minter), (0, 3), (0, 3, 7)


def composed_strategy(f, g, h, f_values, g_values):
    """S_f ;G S_g, moved onto the ports of the composite h."""
    s = game_compose(strategy_traces(f, DEPTH, values=f_values),
                     strategy_traces(g, DEPTH, values=g_values),
                     game_iso(f.target, g.source), DEPTH)
    ports = dict(game_iso(f.source, h.source).ports)
    ports.update(game_iso(g.target, h.target).ports)
    return s.canonical(Permutation(ports))


@pytest.mark.parametrize("build", [lit_then_copycat, lit_then_if(0), lit_then_if(3), if_then_copycat],
                         ids=["lit;cc", "lit0;if", "lit3;if", "if;cc"])
def test_composite_implements_composed_strategies(build, minter):
    f, g, f_values, g_values = build(minter)
    h = gam_compose(f, g, minter)
    strategy = composed_strategy(f, g, h, f_values, g_values)
    assert max(len(t) for t in strategy) >= 2
    report = implements_check(h, strategy, k=DEPTH)
    assert report.ok, str(report)


@pytest.mark.parametrize("n", [0, 3])
def test_lit_into_if_answers_like_the_interpreter(n, minter):
    f = lit_net(n, minter)
    g, _ = compile_term(parse("if x then 1 else 2"), [("x", EXP)], minter=minter)
    expected = reference_interpret(parse(f"if {n} then 1 else 2"))
    assert run_program(gam_compose(f, g, minter)).value == expected
