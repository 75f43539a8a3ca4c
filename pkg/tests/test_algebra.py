from conftest import copycat_play, om, pm, ptr
from src.gametrace.algebra import (
    cc_traces, delete, game_compose, hereditary_restrict, interleave, is_pclosed,
    reindex_delete, same_traces, saturate, trace_compose,
)
from src.gametrace.arena import com_arena, fresh_arena, game_iso
from src.gametrace.legality import check_legal
from src.hramnet.trace import TraceSet, canonical, is_prefix_closed


def test_delete():
    trace = (om(1, ptr(0), ptr(1)), pm(2, ptr(1), ptr(2)), om(3, ptr(2)))
    assert delete(trace, ()) == trace
    assert delete(trace, {1, 2, 3}) == ()
    assert delete(trace, {2}) == (trace[0], trace[2])


def test_interleave_shuffles():
    x, y = om(1), pm(2)
    assert set(interleave(TraceSet(), TraceSet())) == {()}
    both = interleave({(x,)}, {(y,)})
    assert (x, y) in both and (y, x) in both
    assert len(both) == 5
    assert is_prefix_closed(both.traces)


def test_reindex_delete_extends_pointers():
    visible_c, hidden_b, visible_a = 10, 20, 30
    trace = (
        om(visible_c, ptr(0), ptr(1)),
        pm(hidden_b, ptr(1), ptr(2)),
        pm(visible_a, ptr(2), ptr(3)),
    )
    assert reindex_delete(trace, ()) == trace
    assert reindex_delete(trace, {visible_c, hidden_b, visible_a}) == ()
    extended = reindex_delete(trace, {hidden_b})
    assert extended[1].justifier == ptr(1)
    # plain deletion leaves the survivor justified by a hidden name
    assert delete(trace, {hidden_b})[1].justifier == ptr(2)


def test_hereditary_restrict(cc_arena):
    _, n, _, _ = cc_arena
    play = copycat_play(n)
    assert hereditary_restrict(play, {ptr(0)}) == play
    assert hereditary_restrict(play, ()) == ()
    thread = hereditary_restrict(play, {ptr(2)})
    assert [m.port for m in thread] == [n["r1"], n["d1"], n["d2"]]


def test_saturate():
    alternating = (om(1, ptr(0), ptr(1)), pm(2, ptr(1)))
    assert set(saturate({alternating}).traces) == set(TraceSet(frozenset(
        {(), alternating[:1], alternating})).traces)

    po = (pm(1, ptr(0), ptr(1)), om(2, ptr(2), ptr(3)))
    saturated = saturate({po})
    assert (po[1], po[0]) in saturated
    assert set(saturate(saturated).traces) == set(saturated.traces)


def test_pclosure():
    o = om(1, ptr(0), ptr(1))
    good, rogue = pm(2, ptr(1)), pm(3, ptr(1))
    s2 = {(), (o,), (o, good)}
    assert is_pclosed({(), (o,)}, s2)
    assert is_pclosed(s2, s2 | {(o, good, o)})
    assert not is_pclosed({(), (o,), (o, rogue)}, s2)


def test_cc_traces(cc_arena):
    arena, n, inner, pi = cc_arena
    assert set(cc_traces(inner, pi, 0)) == {()}
    plays = cc_traces(inner, pi, 8)
    canon = {canonical(t) for t in plays}
    assert canonical(copycat_play(n)[:4]) in canon
    assert canonical(copycat_play(n)) in canon
    for t in plays:
        assert check_legal(t, arena).ok


def test_copycat_composition_is_copycat(minter):
    a = com_arena(minter)
    b, _ = fresh_arena(a, minter)
    b2, _ = fresh_arena(a, minter)
    c, _ = fresh_arena(a, minter)
    s1 = cc_traces(a, game_iso(a, b), 4)
    s2 = cc_traces(b2, game_iso(b2, c), 4)
    pi = game_iso(b, b2)
    expected = cc_traces(a, game_iso(a, c), 4)

    composed = game_compose(s1, s2, pi, k=4)
    assert same_traces(composed, expected)
    for trace in composed:
        assert all(m.port not in set(b.ports()) for m in trace)

    # without pointer extension the copied question points at a hidden name
    plain = trace_compose(s1, s2, pi, k=4)
    assert not same_traces(plain, expected)


def test_compose_with_empty_right_side(minter):
    a = com_arena(minter)
    b, _ = fresh_arena(a, minter)
    b2, _ = fresh_arena(a, minter)
    s1 = cc_traces(a, game_iso(a, b), 4)
    composed = game_compose(s1, TraceSet(), game_iso(b, b2), k=4)
    assert set(composed) == {()}
