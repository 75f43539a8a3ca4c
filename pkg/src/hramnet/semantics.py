"""
Reference semantics of HRAM nets: configurations, the net transition
relation and bounded trace denotations.
"""
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

from tqdm import tqdm

from src.config import EXPLORE_STATE_BUDGET, OPPONENT_TAG, SILENT_BUDGET
from src.errors import RoutingError
from src.hram.code import EMPTY, Message, Pointer
from src.hram.engine import (
    SILENT, EngineConfig, Input, Output, engine_receive, initial_engine, step_thread,
)
from src.hramnet.net import Net
from src.hramnet.trace import Move, TraceSet, prefix_close
from src.nominal import NameMinter, Polarity, atom


@dataclass(frozen=True)
class NetConfig:
    engines: Tuple[EngineConfig, ...]
    pending: Tuple[Message, ...] = ()

    def quiescent(self):
        return not self.pending and not any(k.threads for k in self.engines)

    def faults(self):
        return [f for k in self.engines for f in k.faults]


@dataclass(frozen=True)
class RunThread:
    engine: int
    thread: int


@dataclass(frozen=True)
class Deliver:
    index: int


@dataclass(frozen=True)
class Emit:
    index: int


def initial_net(s: Net) -> NetConfig:
    return NetConfig(tuple(initial_engine(e) for e in s.engines))


def silent_actions(n: NetConfig, s: Net):
    for i, k in enumerate(n.engines):
        for t in range(len(k.threads)):
            yield RunThread(i, t)
    for index, m in enumerate(n.pending):
        if m.port in s.owner:
            yield Deliver(index)


def emit_actions(n: NetConfig, s: Net):
    seen = set()
    for index, m in enumerate(n.pending):
        if m.port not in s.owner and m.port in s.external and m not in seen:
            seen.add(m)
            yield Emit(index)


def apply_action(n: NetConfig, s: Net, action, minter: NameMinter):
    if isinstance(action, RunThread):
        engine = s.engines[action.engine]
        label, k = step_thread(n.engines[action.engine], engine, s.chi, minter, action.thread)
        engines = n.engines[:action.engine] + (k,) + n.engines[action.engine + 1:]
        pending = n.pending + (label.message,) if isinstance(label, Output) else n.pending
        return SILENT, NetConfig(engines, pending)
    if isinstance(action, Deliver):
        m = n.pending[action.index]
        index = s.owner[m.port]
        k = engine_receive(n.engines[index], s.engines[index], m)
        engines = n.engines[:index] + (k,) + n.engines[index + 1:]
        return SILENT, NetConfig(engines, n.pending[:action.index] + n.pending[action.index + 1:])
    if isinstance(action, Emit):
        m = n.pending[action.index]
        return Output(m), NetConfig(n.engines, n.pending[:action.index] + n.pending[action.index + 1:])
    raise TypeError(f"unknown action {action!r}")


def receive_external(n: NetConfig, s: Net, m: Message):
    if m.port not in s.external or s.external.polarity(m.port) is not Polarity.O:
        raise RoutingError(f"{m.port:#x} is not an external O-port")
    return Input(m), replace(n, pending=n.pending + (Message(s.chi[m.port], m.payload),))


def net_step(n: NetConfig, s: Net, minter: NameMinter, inputs: Sequence[Message] = ()):
    """All successors of `n`, including one Input step per candidate input."""
    out = [apply_action(n, s, a, minter) for a in silent_actions(n, s)]
    out.extend(apply_action(n, s, a, minter) for a in emit_actions(n, s))
    out.extend(receive_external(n, s, m) for m in inputs)
    return out


def settle(n: NetConfig, s: Net, minter: NameMinter, budget=SILENT_BUDGET):
    """
    Take the first silent step until none is left.

    Returns the settled configuration, the number of steps taken and
    whether the budget ran out first.
    """
    steps = 0
    while steps < budget:
        action = next(silent_actions(n, s), None)
        if action is None:
            return n, steps, False
        _, n = apply_action(n, s, action, minter)
        steps += 1
    logging.debug(f"silent budget of {budget} exhausted")
    return n, steps, True


def opponent_name(position, slot):
    return atom(OPPONENT_TAG, 2 * position + slot)


def known_pointers(trace):
    names = []
    for m in trace:
        for name in m.pointers():
            if name not in names:
                names.append(name)
    return names


class Opponent(ABC):
    """Chooses the candidate inputs the environment may send next."""

    @abstractmethod
    def inputs(self, s: Net, trace) -> List[Message]:
        pass


class ScriptedOpponent(Opponent):
    def __init__(self, script: Sequence[Message]):
        self.script = list(script)

    def inputs(self, s, trace):
        played = sum(1 for m in trace if m.polarity is Polarity.O)
        return self.script[played:played + 1]


class AlphabetOpponent(Opponent):
    """
    Any external O-port, justified by a known pointer or one fresh name,
    carrying a fresh own pointer and a value from `values`.
    """
    def __init__(self, values=(EMPTY,), ports=None, max_inputs=None):
        self.values = tuple(values)
        self.ports = ports
        self.max_inputs = max_inputs

    def inputs(self, s, trace):
        if self.max_inputs is not None:
            if sum(1 for m in trace if m.polarity is Polarity.O) >= self.max_inputs:
                return []
        ports = self.ports if self.ports is not None else s.external.o_ports()
        position = len(trace)
        justifiers = known_pointers(trace) + [opponent_name(position, 0)]
        own = Pointer(opponent_name(position, 1))
        out = []
        for port in ports:
            for j in justifiers:
                for value in self.values:
                    out.append(Message(port, (Pointer(j), own, value)))
        return out


def denotation_upto(s: Net, k: int, opponent: Opponent, minter: Optional[NameMinter] = None,
                    silent="eager", budget=SILENT_BUDGET, state_budget=EXPLORE_STATE_BUDGET,
                    progress=False) -> TraceSet:
    """
    Every observable trace of length ≤ k, by depth-first search.

    In "eager" mode silent steps are taken canonically until the net is
    stuck before each observable step; "full" mode branches on every
    silent step as well.
    """
    minter = minter or NameMinter(1)
    found = {()}
    partial = False
    stack = [(initial_net(s), ())]
    states = 0
    bar = tqdm(desc="Exploring", unit="state", disable=not progress)
    while stack:
        config, trace = stack.pop()
        states += 1
        bar.update(1)
        if states > state_budget:
            partial = True
            break
        found.add(trace)
        if len(trace) >= k:
            continue
        if silent == "eager":
            config, _, exhausted = settle(config, s, minter, budget)
            partial |= exhausted
        else:
            for action in silent_actions(config, s):
                _, nxt = apply_action(config, s, action, minter)
                stack.append((nxt, trace))
        for action in emit_actions(config, s):
            label, nxt = apply_action(config, s, action, minter)
            stack.append((nxt, trace + (Move(Polarity.P, label.message),)))
        for m in opponent.inputs(s, trace):
            label, nxt = receive_external(config, s, m)
            stack.append((nxt, trace + (Move(Polarity.O, m),)))
    bar.close()
    if partial:
        logging.warning(f"exploration stopped early after {states} states")
    return TraceSet(prefix_close(found), partial)
