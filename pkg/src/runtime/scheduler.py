"""
Local execution of nets under a scheduling policy.

Seeded and RoundRobin pick one enabled action of the reference semantics
at a time; Exhaustive enumerates every interleaving up to a bound and
collects all answers reached.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from tqdm import tqdm

from src.config import (
    EXPLORE_STATE_BUDGET, OBSERVABLE_BUDGET, ROOT_QUESTION_TAG, SILENT_BUDGET,
)
from src.combinators.gamnet import GamNet
from src.errors import InterfaceError
from src.hram.code import EMPTY, Int, Message, Pointer
from src.hram.engine import Fault, Output
from src.hramnet.net import Net
from src.hramnet.semantics import (
    Emit, NetConfig, apply_action, emit_actions, initial_net, receive_external,
    silent_actions,
)
from src.hramnet.trace import Move
from src.nominal import NameMinter, Polarity, atom


@dataclass(frozen=True)
class Seeded:
    seed: int = 0


@dataclass(frozen=True)
class RoundRobin:
    pass


@dataclass(frozen=True)
class Exhaustive:
    depth: int = 8


SchedulerPolicy = Union[Seeded, RoundRobin, Exhaustive]


@dataclass
class HeapAudit:
    """Residual heap cells per engine once a run has stopped."""
    rows: List[Tuple[int, str, Optional[str], int]] = field(default_factory=list)

    @property
    def residual(self) -> int:
        return sum(row[3] for row in self.rows)

    @property
    def empty(self) -> bool:
        return self.residual == 0

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=["engine", "label", "node", "cells"])

    def __str__(self):
        if self.empty:
            return "heaps: empty"
        busy = [f"{label or '?'}#{index}@{node or 'root'}: {cells}"
                for index, label, node, cells in self.rows if cells]
        return "heaps: " + ", ".join(busy)


def heap_audit(config: NetConfig, net: Net) -> HeapAudit:
    rows = [(i, e.label, e.placement, len(k.heap))
            for i, (e, k) in enumerate(zip(net.engines, config.engines))]
    return HeapAudit(rows)


@dataclass
class RunResult:
    answer: Optional[Message]
    trace: Tuple[Move, ...]
    audit: HeapAudit
    faults: List[Fault] = field(default_factory=list)
    exhausted: bool = False
    steps: int = 0
    answers: FrozenSet = frozenset()

    @property
    def value(self):
        """The answer as an int, "done" for a com answer, None without one."""
        return answer_value(self.answer)


def answer_value(answer: Optional[Message]):
    if answer is None:
        return None
    data = answer.payload[2]
    return data.value if isinstance(data, Int) else "done"


def root_question(port) -> Message:
    """The initial question, justified and named by the reserved root tag."""
    return Message(port, (Pointer(atom(ROOT_QUESTION_TAG, 0)),
                          Pointer(atom(ROOT_QUESTION_TAG, 1)), EMPTY))


def answers_question(question: Message, m: Message):
    own = question.payload[1]
    return m.payload[0] == own and m.payload[1] is EMPTY


class _Picker:
    def __init__(self, policy):
        self.rng = np.random.default_rng(policy.seed) if isinstance(policy, Seeded) else None
        self.turn = 0

    def pick(self, count):
        if self.rng is not None:
            return int(self.rng.integers(count))
        index = self.turn % count
        self.turn += 1
        return index


def run_local(net: Net, question: Message, policy: SchedulerPolicy = Seeded(),
              silent_budget=SILENT_BUDGET, observable_budget=OBSERVABLE_BUDGET,
              minter: Optional[NameMinter] = None) -> RunResult:
    """
    Inject `question` and drive the net until it answers and settles, or
    until a budget runs out.
    """
    if question.port not in net.external or net.external.polarity(question.port) is not Polarity.O:
        raise InterfaceError(f"{question.port:#x} is not an external O-port of the net")
    minter = minter or NameMinter(1)
    if isinstance(policy, Exhaustive):
        return _run_exhaustive(net, question, policy.depth, silent_budget, minter)

    picker = _Picker(policy)
    _, config = receive_external(initial_net(net), net, question)
    trace = [Move(Polarity.O, question)]
    answer = None
    steps = 0
    exhausted = False
    while True:
        actions = list(silent_actions(config, net)) + list(emit_actions(config, net))
        if not actions:
            break
        if steps >= silent_budget or len(trace) >= observable_budget:
            exhausted = True
            break
        label, config = apply_action(config, net, actions[picker.pick(len(actions))], minter)
        steps += 1
        if isinstance(label, Output):
            trace.append(Move(Polarity.P, label.message))
            if answer is None and answers_question(question, label.message):
                answer = label.message
                logging.debug(f"answer after {steps} steps: {answer!r}")
    if exhausted:
        logging.warning(f"run stopped by its budget after {steps} steps")
    faults = config.faults()
    for fault in faults:
        logging.warning(f"thread fault {fault.kind}: {fault.detail}")
    return RunResult(answer, tuple(trace), heap_audit(config, net), faults, exhausted, steps,
                     frozenset({answer}) if answer else frozenset())


def _run_exhaustive(net: Net, question: Message, depth: int, silent_budget, minter) -> RunResult:
    _, start = receive_external(initial_net(net), net, question)
    first = (Move(Polarity.O, question),)
    stack = [(start, first, 0)]
    answers = set()
    result = None
    states = 0
    exhausted = False
    bar = tqdm(desc="Schedules", unit="state", disable=not logging.getLogger().isEnabledFor(logging.DEBUG))
    while stack:
        config, trace, silent = stack.pop()
        states += 1
        bar.update(1)
        if states > EXPLORE_STATE_BUDGET or silent > silent_budget:
            exhausted = True
            break
        actions = list(silent_actions(config, net))
        if len(trace) < depth:
            actions.extend(emit_actions(config, net))
        if not actions:
            answer = next((m.message for m in trace if m.polarity is Polarity.P
                           and answers_question(question, m.message)), None)
            if answer is not None:
                answers.add(answer)
                if result is None:
                    result = RunResult(answer, trace, heap_audit(config, net), config.faults())
            continue
        for action in actions:
            label, nxt = apply_action(config, net, action, minter)
            if isinstance(action, Emit):
                stack.append((nxt, trace + (Move(Polarity.P, label.message),), silent))
            else:
                stack.append((nxt, trace, silent + 1))
    bar.close()
    if result is None:
        result = RunResult(None, first, HeapAudit(), exhausted=exhausted)
    result.answers = frozenset(answers)
    result.exhausted = exhausted
    result.steps = states
    return result


def run_program(f: GamNet, policy: SchedulerPolicy = Seeded(), **budgets) -> RunResult:
    """Ask a closed GAM net its initial question and run it locally."""
    if len(f.source):
        raise InterfaceError("only closed nets can be run; supply the context first")
    initials = [p for p in f.target.ports() if p in f.target.initials]
    if len(initials) != 1:
        raise InterfaceError(f"expected one initial question, found {len(initials)}")
    return run_local(f.net, root_question(initials[0]), policy, **budgets)


def summarize(results: Dict[str, RunResult]) -> pd.DataFrame:
    """One row per named run, for CSV export of corpus runs."""
    rows = [{"program": name, "answer": r.value, "steps": r.steps, "exhausted": r.exhausted,
             "faults": len(r.faults), "residual_cells": r.audit.residual}
            for name, r in results.items()]
    return pd.DataFrame(rows)
