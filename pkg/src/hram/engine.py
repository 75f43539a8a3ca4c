"""
Engines, threads, heaps and the single-engine transition relation.

One instruction-level `execute` serves both the pure reference semantics
(`engine_step`, which copies the heap) and the concurrent runtime (which
mutates the heap under a per-engine lock).
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Mapping, Optional, Tuple

from src.errors import RoutingError
from src.hram.code import (
    EMPTY, Arith, Code, Flip, Fork, Free, Get, IfZero, Int, Message, New,
    Pointer, Seq, SetLit, Spark, Update, msg, regs as pad_registers,
    register_indices, rename_code, sparked_ports,
)
from src.config import REGISTERS
from src.nominal import Interface, Permutation, Polarity

INT64_MIN = -(1 << 63)


def wrap64(value):
    return ((value - INT64_MIN) % (1 << 64)) + INT64_MIN


@dataclass
class ValidationReport:
    subject: str
    issues: List[str] = field(default_factory=list)

    @property
    def ok(self):
        return not self.issues

    def add(self, issue):
        self.issues.append(issue)

    def __str__(self):
        if self.ok:
            return f"{self.subject}: ok"
        return f"{self.subject}: " + "; ".join(self.issues)


@dataclass(frozen=True)
class Engine:
    interface: Interface
    port_map: Mapping[int, Code]
    label: str = ""
    placement: Optional[str] = None

    def o_ports(self):
        return self.interface.o_ports()

    def p_ports(self):
        return self.interface.p_ports()

    def rename(self, perm: Permutation) -> "Engine":
        return Engine(
            interface=self.interface.rename(perm),
            port_map={perm.port(a): rename_code(c, perm.port) for a, c in self.port_map.items()},
            label=self.label,
            placement=self.placement,
        )

    def placed(self, node) -> "Engine":
        return replace(self, placement=node)

    def __repr__(self):
        return f"Engine({self.label or '?'}, ports={len(self.interface)}, at={self.placement})"


def validate_engine(e: Engine) -> ValidationReport:
    report = ValidationReport(f"engine {e.label or '?'}")
    o_ports = set(e.o_ports())
    p_ports = set(e.p_ports())
    for port in sorted(o_ports - set(e.port_map)):
        report.add(f"no code for O-port {port:#x}")
    for port in sorted(set(e.port_map) - o_ports):
        report.add(f"code attached to non-O-port {port:#x}")
    for port, code in e.port_map.items():
        for target in sorted(sparked_ports(code)):
            if target not in p_ports:
                report.add(f"code at {port:#x} sparks {target:#x}, which is not a P-port")
        for index in _register_uses(code):
            if index is not None and not 0 <= index < REGISTERS:
                report.add(f"code at {port:#x} uses register {index}")
    return report


def _register_uses(code):
    stack = [code]
    while stack:
        node = stack.pop()
        if isinstance(node, Seq):
            yield from register_indices(node.instr)
            stack.append(node.rest)
        elif isinstance(node, IfZero):
            yield node.reg
            stack.extend((node.zero, node.nonzero))


@dataclass(frozen=True)
class Thread:
    code: Code
    regs: Tuple

    def __repr__(self):
        return f"Thread({type(self.code).__name__}, {self.regs})"


@dataclass(frozen=True)
class Fault:
    kind: str           # "DanglingAccess" or "TypeFault"
    detail: str
    thread: Thread


@dataclass(frozen=True)
class EngineConfig:
    threads: Tuple[Thread, ...] = ()
    heap: Mapping[int, Tuple] = field(default_factory=dict)
    faults: Tuple[Fault, ...] = ()


@dataclass(frozen=True)
class Silent:
    def __repr__(self):
        return "•"


SILENT = Silent()


@dataclass(frozen=True)
class Output:
    message: Message


@dataclass(frozen=True)
class Input:
    message: Message


def initial_engine(e: Engine) -> EngineConfig:
    return EngineConfig()


def engine_receive(k: EngineConfig, e: Engine, m: Message) -> EngineConfig:
    if m.port not in e.interface or e.interface.polarity(m.port) is not Polarity.O:
        raise RoutingError(f"{e!r} has no O-port {m.port:#x}")
    thread = Thread(e.port_map[m.port], pad_registers(m.payload))
    return replace(k, threads=k.threads + (thread,))


@dataclass
class Outcome:
    thread: Optional[Thread] = None
    spawned: List[Thread] = field(default_factory=list)
    output: Optional[Message] = None
    fault: Optional[Fault] = None


class _Fault(Exception):
    def __init__(self, kind, detail):
        super().__init__(detail)
        self.kind = kind


def _read(registers, i):
    return EMPTY if i is None else registers[i]


def _write(registers, i, value):
    if i is not None:
        registers[i] = value


def _cell(heap, value):
    if not isinstance(value, Pointer) or value.name not in heap:
        raise _Fault("DanglingAccess", f"{value!r} is not a live heap cell")
    return value.name


def _integer(value):
    if not isinstance(value, Int):
        raise _Fault("TypeFault", f"{value!r} is not an integer")
    return value.value


def _route(e: Engine, chi: Mapping[int, int], port):
    try:
        target = chi[port]
    except KeyError:
        raise RoutingError(f"{e!r} sparks unconnected port {port:#x}") from None
    local = target in e.port_map
    return target, local


def execute(thread: Thread, heap: Dict, e: Engine, chi: Mapping[int, int], minter) -> Outcome:
    """
    Run the head of `thread` once against `heap`, mutating the heap in place.

    Faults are reported in the outcome and end only this thread.
    """
    code = thread.code
    registers = list(thread.regs)
    try:
        if isinstance(code, Seq):
            instr = code.instr
            outcome = Outcome()
            if isinstance(instr, New):
                name = minter.fresh_pointer()
                while name in heap:
                    name = minter.fresh_pointer()
                heap[name] = (_read(registers, instr.j), _read(registers, instr.k))
                _write(registers, instr.dst, Pointer(name))
            elif isinstance(instr, Get):
                first, second = heap[_cell(heap, _read(registers, instr.src))]
                _write(registers, instr.dst1, first)
                _write(registers, instr.dst2, second)
            elif isinstance(instr, Update):
                name = _cell(heap, _read(registers, instr.i))
                first, second = heap[name]
                heap[name] = (first, _read(registers, instr.j))
                _write(registers, instr.i, first)
                _write(registers, instr.j, second)
            elif isinstance(instr, Free):
                del heap[_cell(heap, _read(registers, instr.i))]
                _write(registers, instr.i, EMPTY)
            elif isinstance(instr, Flip):
                left, right = _read(registers, instr.i), _read(registers, instr.j)
                _write(registers, instr.i, right)
                _write(registers, instr.j, left)
            elif isinstance(instr, SetLit):
                _write(registers, instr.dst, EMPTY if instr.value is None else Int(instr.value))
            elif isinstance(instr, Arith):
                left = _integer(_read(registers, instr.j))
                right = _integer(_read(registers, instr.k))
                if instr.op == "+":
                    value = left + right
                elif instr.op == "-":
                    value = left - right
                elif instr.op == "*":
                    value = left * right
                else:
                    raise _Fault("TypeFault", f"unknown operator {instr.op!r}")
                _write(registers, instr.dst, Int(wrap64(value)))
            elif isinstance(instr, Fork):
                target, local = _route(e, chi, instr.port)
                payload = msg(registers)
                if local:
                    outcome.spawned.append(Thread(e.port_map[target], pad_registers(payload)))
                else:
                    outcome.output = Message(target, payload)
            outcome.thread = Thread(code.rest, tuple(registers))
            return outcome
        if isinstance(code, IfZero):
            value = _integer(_read(registers, code.reg))
            _write(registers, code.reg, EMPTY)
            branch = code.zero if value == 0 else code.nonzero
            return Outcome(thread=Thread(branch, tuple(registers)))
        if isinstance(code, Spark):
            target, local = _route(e, chi, code.port)
            payload = msg(registers)
            if local:
                return Outcome(thread=Thread(e.port_map[target], pad_registers(payload)))
            return Outcome(output=Message(target, payload))
        return Outcome()
    except _Fault as fault:
        logging.debug(f"{e!r}: {fault.kind}: {fault}")
        return Outcome(fault=Fault(fault.kind, str(fault), thread))


def step_thread(k: EngineConfig, e: Engine, chi, minter, index):
    """Successor of `k` when thread `index` runs one step, with its label."""
    heap = dict(k.heap)
    outcome = execute(k.threads[index], heap, e, chi, minter)
    threads = list(k.threads[:index])
    if outcome.thread is not None:
        threads.append(outcome.thread)
    threads.extend(k.threads[index + 1:])
    threads.extend(outcome.spawned)
    faults = k.faults + ((outcome.fault,) if outcome.fault else ())
    label = Output(outcome.output) if outcome.output is not None else SILENT
    return label, EngineConfig(tuple(threads), heap, faults)


def engine_step(k: EngineConfig, e: Engine, chi, minter):
    """All successors of `k`: one per runnable thread."""
    return [step_thread(k, e, chi, minter, i) for i in range(len(k.threads))]
