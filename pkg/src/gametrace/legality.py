"""
Legality of nominal traces over an arena.

A move's justification arrow is encoded by sharing pointer names: the
first payload slot names the justifier, the second is the move's own
fresh name.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import pandas as pd

from src.gametrace.arena import GameInterface

UNIQUE = "unique-pointers"
LABELLED = "correctly-labelled"
JUSTIFIED = "justified"
WELL_OPENED = "well-opened"
SCOPED = "strictly-scoped"
NESTED = "strictly-nested"
ALTERNATING = "alternating"

CONDITIONS = (UNIQUE, LABELLED, JUSTIFIED, WELL_OPENED, SCOPED, NESTED, ALTERNATING)

# Conditions defining the legal traces P_A; well-opened and alternating are
# extra restrictions for single-threaded alternating plays.
LEGAL = (UNIQUE, LABELLED, JUSTIFIED, SCOPED, NESTED)


def cp(trace):
    """Coabstracted pointers: every own name in the trace."""
    return {m.own for m in trace if m.own is not None}


def fp(trace):
    """Free pointers: justifiers not coabstracted earlier."""
    bound, free = set(), set()
    for m in trace:
        if m.justifier is not None and m.justifier not in bound:
            free.add(m.justifier)
        if m.own is not None:
            bound.add(m.own)
    return free


def ptrs(trace):
    return cp(trace) | fp(trace)


def enabled(trace, arena: GameInterface):
    out = set()
    for m in trace:
        if m.own is not None:
            out.update((b, m.own) for b in arena.enabled_by(m.port))
    return out


@dataclass
class LegalityReport:
    conditions: List[str]
    violations: Dict[str, Optional[int]] = field(default_factory=dict)
    error: Optional[str] = None

    def passed(self, condition):
        return self.error is None and self.violations.get(condition) is None

    @property
    def ok(self):
        return self.error is None and all(self.passed(c) for c in self.conditions)

    def failed(self):
        return [c for c in self.conditions if not self.passed(c)]

    def to_frame(self) -> pd.DataFrame:
        rows = [{
            "condition": c,
            "passed": self.passed(c),
            "first_violation": self.violations.get(c),
        } for c in self.conditions]
        return pd.DataFrame(rows, columns=["condition", "passed", "first_violation"])

    def __str__(self):
        if self.error:
            return f"error: {self.error}"
        lines = []
        for c in self.conditions:
            index = self.violations.get(c)
            lines.append(f"{c}: ok" if index is None else f"{c}: FAIL at message {index}")
        return "\n".join(lines)


def _unique(trace, arena):
    seen = set()
    for i, m in enumerate(trace):
        if m.own is not None and m.own in seen:
            return i
        seen.update(m.pointers())
    return None


def _labelled(trace, arena):
    for i, m in enumerate(trace):
        if arena.polarity(m.port) is not m.polarity:
            return i
    return None


def _justified(trace, arena):
    allowed = set()
    for i, m in enumerate(trace):
        if m.port not in arena.initials and (m.port, m.justifier) not in allowed:
            return i
        if m.own is not None:
            allowed.update((b, m.own) for b in arena.enabled_by(m.port))
    return None


def _well_opened(trace, arena):
    for i, m in enumerate(trace):
        if i > 0 and m.port in arena.initials:
            return i
    return None


def _scoped(trace, arena):
    for i, m in enumerate(trace):
        if arena.is_answer(m.port) and m.justifier is not None:
            for j in range(i + 1, len(trace)):
                if trace[j].justifier == m.justifier:
                    return j
    return None


def _nested(trace, arena):
    # An answer to p′ needs every question justified by p′ before it to be
    # answered in between.
    for l, answer in enumerate(trace):
        if not arena.is_answer(answer.port) or answer.justifier is None:
            continue
        for j in range(l):
            q = trace[j]
            if q.justifier != answer.justifier or not arena.is_question(q.port) or q.own is None:
                continue
            closed = any(arena.is_answer(x.port) and x.justifier == q.own
                         for x in trace[j + 1:l])
            if not closed:
                return l
    return None


def _alternating(trace, arena):
    for i in range(1, len(trace)):
        if trace[i].polarity is trace[i - 1].polarity:
            return i
    return None


_CHECKS = {
    UNIQUE: _unique,
    LABELLED: _labelled,
    JUSTIFIED: _justified,
    WELL_OPENED: _well_opened,
    SCOPED: _scoped,
    NESTED: _nested,
    ALTERNATING: _alternating,
}


def check_legal(trace, arena: GameInterface, conditions=CONDITIONS) -> LegalityReport:
    """Evaluate each requested condition independently."""
    conditions = list(conditions)
    unknown = [c for c in conditions if c not in _CHECKS]
    if unknown:
        raise ValueError(f"unknown legality conditions: {unknown}")
    report = LegalityReport(conditions)
    trace = tuple(trace)
    strangers = [m.port for m in trace if m.port not in arena]
    if strangers:
        report.error = f"port {strangers[0]:#x} is not in the arena"
        return report
    for c in conditions:
        report.violations[c] = _CHECKS[c](trace, arena)
    return report


def is_legal(trace, arena: GameInterface, conditions=LEGAL) -> bool:
    return check_legal(trace, arena, conditions).ok


def pending_questions(trace, arena: GameInterface):
    """(port, own name) of every question with no later answer to it."""
    answered = {m.justifier for m in trace if arena.is_answer(m.port)}
    return {(m.port, m.own) for m in trace
            if arena.is_question(m.port) and m.own is not None and m.own not in answered}


def answered(trace, arena: GameInterface, name) -> bool:
    return any(arena.is_answer(m.port) and m.justifier == name for m in trace)
