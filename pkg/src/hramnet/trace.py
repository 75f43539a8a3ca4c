"""
Observable traces and their text format.

A trace line holds one event: `O|P port p p' d`, atoms in hex, `_` for
Empty and plain decimal for integers. A trace set is dumped with one trace
per line, events joined by ` :: ` and `ε` for the empty trace.
"""
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, Optional, Tuple

from src.errors import ProtocolError
from src.hram.code import EMPTY, Int, Message, Pointer
from src.nominal import Permutation, Polarity


@dataclass(frozen=True)
class Move:
    polarity: Polarity
    message: Message

    @property
    def port(self):
        return self.message.port

    @property
    def justifier(self) -> Optional[int]:
        first = self.message.payload[0]
        return first.name if isinstance(first, Pointer) else None

    @property
    def own(self) -> Optional[int]:
        second = self.message.payload[1]
        return second.name if isinstance(second, Pointer) else None

    @property
    def value(self):
        return self.message.payload[2]

    def pointers(self):
        return [d.name for d in self.message.payload if isinstance(d, Pointer)]

    def __repr__(self):
        return format_move(self)


def move(polarity, port, justifier=None, own=None, value=EMPTY) -> Move:
    """Build a game-style move from raw atoms."""
    wrap = lambda name: Pointer(name) if name is not None else EMPTY
    if isinstance(value, int) and not isinstance(value, bool):
        value = Int(value)
    return Move(polarity, Message(port, (wrap(justifier), wrap(own), value)))


Trace = Tuple[Move, ...]


@dataclass
class TraceSet:
    """A finite, prefix-closed approximation of a net's denotation."""
    traces: FrozenSet[Trace] = field(default_factory=lambda: frozenset({()}))
    partial: bool = False

    def __contains__(self, trace):
        return tuple(trace) in self.traces

    def __iter__(self):
        return iter(self.traces)

    def __len__(self):
        return len(self.traces)

    def canonical(self, ports: Optional[Permutation] = None) -> FrozenSet[Trace]:
        return frozenset(canonical(t, ports) for t in self.traces)

    def max_length(self):
        return max((len(t) for t in self.traces), default=0)


def prefix_close(traces: Iterable[Trace]) -> FrozenSet[Trace]:
    out = set()
    for trace in traces:
        trace = tuple(trace)
        for n in range(len(trace) + 1):
            out.add(trace[:n])
    out.add(())
    return frozenset(out)


def is_prefix_closed(traces) -> bool:
    traces = set(traces)
    return () in traces and all(t[:-1] in traces for t in traces if t)


def _rename_data(d, table, base):
    if isinstance(d, Pointer):
        if d.name not in table:
            table[d.name] = base + len(table)
        return Pointer(table[d.name])
    return d


def canonical(trace: Iterable[Move], ports: Optional[Permutation] = None, base: int = 0) -> Trace:
    """Rename pointers by order of first occurrence; optionally rename ports."""
    table = {}
    out = []
    for m in trace:
        payload = tuple(_rename_data(d, table, base) for d in m.message.payload)
        port = ports.port(m.port) if ports is not None else m.port
        out.append(Move(m.polarity, Message(port, payload)))
    return tuple(out)


def _format_data(d):
    if d is None:
        return "_"
    if isinstance(d, Pointer):
        return f"{d.name:#x}"
    return str(d.value)


def _parse_data(text):
    if text == "_":
        return EMPTY
    if text.lower().startswith("0x"):
        return Pointer(int(text, 16))
    return Int(int(text))


def format_move(m: Move) -> str:
    p, p2, d = m.message.payload
    return f"{m.polarity} {m.port:#x} {_format_data(p)} {_format_data(p2)} {_format_data(d)}"


def parse_move(line: str) -> Move:
    parts = line.split()
    if len(parts) != 5 or parts[0] not in ("O", "P"):
        raise ProtocolError(f"malformed trace event: {line!r}")
    try:
        payload = tuple(_parse_data(x) for x in parts[2:])
        return Move(Polarity(parts[0]), Message(int(parts[1], 16), payload))
    except ValueError as e:
        raise ProtocolError(f"malformed trace event {line!r}: {e}") from None


def format_trace(trace: Iterable[Move]) -> str:
    """One event per line."""
    return "\n".join(format_move(m) for m in trace)


def parse_trace(text: str) -> Trace:
    lines = [ln.strip() for ln in text.splitlines()]
    return tuple(parse_move(ln) for ln in lines if ln and not ln.startswith("#"))


def format_trace_line(trace: Iterable[Move]) -> str:
    trace = tuple(trace)
    return " :: ".join(format_move(m) for m in trace) if trace else "ε"


def format_trace_set(traces: Iterable[Trace]) -> str:
    return "\n".join(sorted(format_trace_line(t) for t in traces))


def write_trace(path, trace):
    with open(path, "w") as f:
        f.write(format_trace(trace) + "\n")


def read_trace(path) -> Trace:
    with open(path) as f:
        return parse_trace(f.read())
