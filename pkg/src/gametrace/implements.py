"""
Checking a GAM net against a strategy given as a finite trace set.

The net implements S when S ⊆ ⟦f⟧ and ⟦f⟧ is P-closed with respect to S.
Both are tested by replaying the trie of S against the net: O-messages of
S are fed in, P-messages must be among the net's outputs, and every
output the net offers must continue some trace of S.
"""
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import List, Optional

import pandas as pd

from src.config import DEFAULT_DEPTH, EXPLORE_STATE_BUDGET, SILENT_BUDGET
from src.gametrace.legality import LEGAL, is_legal
from src.gametrace.opponent import GameOpponent
from src.hram.code import Message, Pointer
from src.hramnet.semantics import (
    apply_action, denotation_upto, emit_actions, initial_net, opponent_name,
    receive_external, settle,
)
from src.hramnet.trace import Move, TraceSet, canonical, format_trace_line
from src.nominal import NameMinter, Polarity


@dataclass
class ImplementsReport:
    nodes: int = 0
    missing: List[tuple] = field(default_factory=list)   # traces of S the net cannot play
    extra: List[tuple] = field(default_factory=list)     # net outputs S does not allow
    partial: bool = False

    @property
    def ok(self):
        return not self.missing and not self.extra

    def to_frame(self) -> pd.DataFrame:
        rows = [{"kind": "missing", "trace": format_trace_line(t)} for t in self.missing]
        rows += [{"kind": "extra", "trace": format_trace_line(t)} for t in self.extra]
        return pd.DataFrame(rows, columns=["kind", "trace"])

    def __str__(self):
        status = "implements" if self.ok else "does not implement"
        return f"{status}: {self.nodes} prefixes checked, {len(self.missing)} missing, {len(self.extra)} extra"


def strategy_traces(gamnet, k=DEFAULT_DEPTH, values=(0,), minter: Optional[NameMinter] = None,
                    state_budget=EXPLORE_STATE_BUDGET) -> TraceSet:
    """Legal single-threaded alternating plays of a GAM net up to length k."""
    opponent = GameOpponent(gamnet.arena, values=values)
    found = denotation_upto(gamnet.net, k, opponent, minter, state_budget=state_budget)
    legal = frozenset(t for t in found if is_legal(t, gamnet.arena, LEGAL))
    if len(legal) != len(found):
        logging.warning(f"{len(found) - len(legal)} illegal plays dropped from the strategy")
    return TraceSet(legal, found.partial)


def _match(pattern: Move, offered: Move, sigma, inverse):
    """Unify a P-move of S with an output of the net; unbound names of S bind fresh."""
    if pattern.port != offered.port or pattern.value != offered.value:
        return None
    sigma, inverse = dict(sigma), dict(inverse)
    for d1, d2 in zip(pattern.message.payload[:2], offered.message.payload[:2]):
        if isinstance(d1, Pointer) and isinstance(d2, Pointer):
            if d1.name in sigma:
                if sigma[d1.name] != d2.name:
                    return None
            elif d2.name in inverse:
                return None
            else:
                sigma[d1.name] = d2.name
                inverse[d2.name] = d1.name
        elif d1 != d2:
            return None
    return sigma, inverse


def _feed(move: Move, sigma, inverse, position):
    """Translate an O-move of S into an input for the net, minting names as needed."""
    sigma, inverse = dict(sigma), dict(inverse)
    payload = []
    for slot, d in enumerate(move.message.payload):
        if isinstance(d, Pointer):
            if d.name not in sigma:
                name = opponent_name(position, slot)
                sigma[d.name] = name
                inverse[name] = d.name
            payload.append(Pointer(sigma[d.name]))
        else:
            payload.append(d)
    return Message(move.port, tuple(payload)), sigma, inverse


def implements_check(gamnet, strategy, k: Optional[int] = None, minter: Optional[NameMinter] = None,
                     budget=SILENT_BUDGET) -> ImplementsReport:
    """
    Bounded test of S ⊆ ⟦f⟧ and P-closure of ⟦f⟧ with respect to S.

    The net is settled eagerly before each comparison, so outputs that
    only some schedules produce are not explored.
    """
    s = gamnet.net
    minter = minter or NameMinter(1)
    traces = {canonical(t) for t in strategy}
    if k is not None:
        traces = {t for t in traces if len(t) <= k}
    children = defaultdict(list)
    for t in traces:
        if t:
            children[t[:-1]].append(t[-1])
    report = ImplementsReport(partial=getattr(strategy, "partial", False))

    stack = [(initial_net(s), (), {}, {})]
    while stack:
        config, prefix, sigma, inverse = stack.pop()
        report.nodes += 1
        config, _, exhausted = settle(config, s, minter, budget)
        report.partial |= exhausted
        offered = []
        for action in emit_actions(config, s):
            label, nxt = apply_action(config, s, action, minter)
            offered.append((Move(Polarity.P, label.message), nxt))

        matched = set()
        for child in children[prefix]:
            if child.polarity is Polarity.O:
                message, sigma2, inverse2 = _feed(child, sigma, inverse, len(prefix))
                _, nxt = receive_external(config, s, message)
                stack.append((nxt, prefix + (child,), sigma2, inverse2))
                continue
            for index, (out, nxt) in enumerate(offered):
                bound = _match(child, out, sigma, inverse)
                if bound is not None:
                    matched.add(index)
                    stack.append((nxt, prefix + (child,), bound[0], bound[1]))
                    break
            else:
                report.missing.append(prefix + (child,))

        if k is not None and len(prefix) >= k:
            continue
        for index, (out, _) in enumerate(offered):
            if index in matched:
                continue
            if not any(_match(c, out, sigma, inverse) for c in children[prefix]
                       if c.polarity is Polarity.P):
                report.extra.append(prefix + (_unmap(out, inverse),))
    if not report.ok:
        logging.info(str(report))
    return report


def _unmap(m: Move, inverse):
    payload = tuple(Pointer(inverse.get(d.name, d.name)) if isinstance(d, Pointer) else d
                    for d in m.message.payload)
    return Move(m.polarity, Message(m.port, payload))
