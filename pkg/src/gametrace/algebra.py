"""
Operations on traces and finite trace sets: deletion, interleaving,
composition (plain and with pointer extension), hereditary restriction,
saturation, P-closure and the copycat strategy.

Trace sets are finite, depth-bounded approximations, so every operator
prefix-closes what it returns.
"""
import itertools
import logging
from collections import defaultdict
from typing import Iterable, Optional

from src.config import STRATEGY_TAG, SYNC_BUDGET
from src.gametrace.arena import GameInterface, game_arrow
from src.gametrace.legality import is_legal
from src.gametrace.opponent import opponent_moves
from src.hram.code import EMPTY, Message, Pointer
from src.hramnet.trace import Move, TraceSet, canonical, prefix_close
from src.nominal import Permutation, Polarity, atom

# Pointer offset for the right operand of binary operators, so its names
# never meet the left operand's canonical names.
APART = 1 << 40


def _traces(s):
    return s.traces if isinstance(s, TraceSet) else frozenset(s)


def _partial(*sets):
    return any(getattr(s, "partial", False) for s in sets)


def delete(trace, ports) -> tuple:
    """s − A: drop every message on a port of A."""
    ports = set(ports)
    return tuple(m for m in trace if m.port not in ports)


def _rejustify(m: Move, justifier) -> Move:
    _, own, value = m.message.payload
    first = Pointer(justifier) if justifier is not None else EMPTY
    return Move(m.polarity, Message(m.port, (first, own, value)))


def reindex_delete(trace, ports) -> tuple:
    """
    s ⇂ X: drop messages on X, re-pointing survivors that were justified
    by a dropped message to that message's own justifier.
    """
    ports = set(ports)
    rho = {}
    out = []
    for m in trace:
        justifier = rho.get(m.justifier, m.justifier)
        if m.port in ports:
            if m.own is not None:
                rho[m.own] = justifier
            continue
        out.append(_rejustify(m, justifier) if justifier != m.justifier else m)
    return tuple(out)


def hereditary_restrict(trace, names) -> tuple:
    """s ↾ X: the messages hereditarily justified by a name in X."""
    keep = set(names)
    out = []
    for m in trace:
        if m.justifier in keep:
            out.append(m)
            if m.own is not None:
                keep.add(m.own)
    return tuple(out)


def _shuffles(t1, t2):
    n = len(t1) + len(t2)
    for slots in itertools.combinations(range(n), len(t1)):
        chosen = set(slots)
        left, right = iter(t1), iter(t2)
        yield tuple(next(left) if i in chosen else next(right) for i in range(n))


def interleave(s1, s2, k: Optional[int] = None) -> TraceSet:
    """S1 ⊗ S2: every shuffle of a trace of S1 with a trace of S2, up to length k."""
    out = set()
    for t1 in _traces(s1):
        for t2 in _traces(s2):
            if k is not None and len(t1) + len(t2) > k:
                continue
            out.update(_shuffles(canonical(t1), canonical(t2, base=APART)))
    return TraceSet(prefix_close(out), _partial(s1, s2))


def _children(traces):
    table = defaultdict(list)
    for t in traces:
        if t:
            table[t[:-1]].append(t[-1])
    return table


def _unify(m1: Move, m2: Move, sigma, inverse):
    sigma, inverse = dict(sigma), dict(inverse)
    for d1, d2 in zip(m1.message.payload, m2.message.payload):
        if isinstance(d1, Pointer) and isinstance(d2, Pointer):
            a, b = d1.name, d2.name
            if a in sigma:
                if sigma[a] != b:
                    return None
            elif b in inverse:
                return None
            else:
                sigma[a] = b
                inverse[b] = a
        elif d1 != d2:
            return None
    return sigma, inverse


def _rename_pointers(m: Move, table) -> Move:
    payload = tuple(Pointer(table.get(d.name, d.name)) if isinstance(d, Pointer) else d
                    for d in m.message.payload)
    return Move(m.polarity, Message(m.port, payload))


def interactions(s1, s2, pi: Permutation, k: Optional[int] = None, budget=SYNC_BUDGET):
    """
    Interaction sequences of S1 (over A ⇒ B) and S2 (over B′ ⇒ C).

    A B-message of S1 synchronises with the message of S2 on its image
    under `pi` when polarities are opposite and payloads unify; pointer
    names of S1 are mapped onto S2's as they synchronise. Yields
    (interaction, hidden ports) pairs; at most `budget` hidden messages
    and `k` visible ones per interaction.
    """
    hidden1 = set(pi.ports)
    hidden2 = set(pi.ports.values())
    left = frozenset(canonical(t) for t in _traces(s1))
    right = frozenset(canonical(t, base=APART) for t in _traces(s2))
    ch1, ch2 = _children(left), _children(right)

    stack = [((), (), {}, {}, (), 0, 0)]
    while stack:
        u1, u2, sigma, inverse, steps, hidden, visible = stack.pop()
        yield tuple(_rename_pointers(m, sigma) if side == 1 else m for m, side in steps), hidden1
        if k is not None and visible >= k:
            continue
        for m in ch1[u1]:
            if m.port not in hidden1:
                stack.append((u1 + (m,), u2, sigma, inverse, steps + ((m, 1),), hidden, visible + 1))
                continue
            if hidden >= budget:
                continue
            target = pi.port(m.port)
            for m2 in ch2[u2]:
                if m2.port != target or m2.polarity is m.polarity:
                    continue
                bound = _unify(m, m2, sigma, inverse)
                if bound is not None:
                    stack.append((u1 + (m,), u2 + (m2,), bound[0], bound[1],
                                  steps + ((m, 1),), hidden + 1, visible))
        for m2 in ch2[u2]:
            if m2.port not in hidden2:
                stack.append((u1, u2 + (m2,), sigma, inverse, steps + ((m2, 2),), hidden, visible + 1))


def trace_compose(s1, s2, pi: Permutation, k: Optional[int] = None, budget=SYNC_BUDGET) -> TraceSet:
    """S1 ; S2 by synchronisation on B and hiding."""
    out = {canonical(delete(u, hidden)) for u, hidden in interactions(s1, s2, pi, k, budget)}
    return TraceSet(prefix_close(out), _partial(s1, s2))


def game_compose(s1, s2, pi: Permutation, k: Optional[int] = None, budget=SYNC_BUDGET) -> TraceSet:
    """S1 ;_G S2: like trace_compose, hiding with pointer extension."""
    out = {canonical(reindex_delete(u, hidden)) for u, hidden in interactions(s1, s2, pi, k, budget)}
    return TraceSet(prefix_close(out), _partial(s1, s2))


def _swappable(x: Move, y: Move):
    """May y move in front of x?"""
    order_ok = y.polarity is Polarity.O or x.polarity is Polarity.P
    return order_ok and (y.own is None or y.own != x.justifier)


def swaps(trace):
    """Every trace one ≼-step below `trace`."""
    for i in range(len(trace) - 1):
        x, y = trace[i], trace[i + 1]
        if _swappable(x, y):
            yield trace[:i] + (y, x) + trace[i + 2:]


def _unique_pointers(trace):
    seen = set()
    for m in trace:
        if m.own is not None and m.own in seen:
            return False
        seen.update(m.pointers())
    return True


def saturate(s, arena: Optional[GameInterface] = None) -> TraceSet:
    """Smallest superset closed under swapping O-messages earlier and P-messages later."""
    out = set(_traces(s))
    work = list(out)
    while work:
        trace = work.pop()
        for swapped in swaps(trace):
            if swapped in out:
                continue
            if arena is not None and not is_legal(swapped, arena):
                continue
            if arena is None and not _unique_pointers(swapped):
                continue
            out.add(swapped)
            work.append(swapped)
    return TraceSet(prefix_close(out), _partial(s))


def is_pclosed(s1, s2) -> bool:
    """Is S1 P-closed with respect to S2 (compared up to pointer names)?"""
    c1 = {canonical(t) for t in _traces(s1)}
    c2 = {canonical(t) for t in _traces(s2)}
    for t in c1:
        if t and t[-1].polarity is Polarity.P and t[:-1] in c2 and t not in c2:
            logging.debug(f"not P-closed at {t}")
            return False
    return True


def cc_traces(a: GameInterface, pi: Permutation, k: int, values=(0,)) -> TraceSet:
    """
    Single-threaded alternating copycat plays on A ⇒ π·A up to length k.

    Each O-move is answered at once by its copy on the other side,
    justified by the copy of its justifier.
    """
    arena = game_arrow(a, a.rename(pi))
    source = set(a.ports())
    inverse = pi.inverse()
    out = {()}
    stack = [((), {})]
    while stack:
        trace, link = stack.pop()
        if len(trace) >= k:
            continue
        for o in opponent_moves(arena, trace, values):
            played = trace + (o,)
            out.add(played)
            if len(played) >= k:
                continue
            port = pi.port(o.port) if o.port in source else inverse.port(o.port)
            if o.port in arena.initials:
                justifier = o.own
            else:
                justifier = link[o.justifier]
            links = dict(link)
            own = EMPTY
            if o.own is not None:
                own = Pointer(atom(STRATEGY_TAG, len(played)))
                links[o.own] = own.name
                links[own.name] = o.own
            reply = Move(Polarity.P, Message(port, (Pointer(justifier), own, o.value)))
            out.add(played + (reply,))
            stack.append((played + (reply,), links))
    return TraceSet(frozenset(out))


def same_traces(s1: Iterable, s2: Iterable) -> bool:
    """Set equality up to pointer names."""
    return {canonical(t) for t in _traces(s1)} == {canonical(t) for t in _traces(s2)}
