"""
HRAM data items, instructions and code fragments.

Registers are indexed 0..3; `None` is the null index, which discards
writes and reads as Empty. Empty itself is represented by `None`.
"""
from dataclasses import dataclass
from typing import Optional, Tuple, Union

from src.config import MESSAGE_SIZE, REGISTERS

RegIndex = Optional[int]


@dataclass(frozen=True)
class Pointer:
    name: int

    def __repr__(self):
        return f"Ptr({self.name:#x})"


@dataclass(frozen=True)
class Int:
    value: int

    def __repr__(self):
        return f"Int({self.value})"


Data = Optional[Union[Pointer, Int]]
EMPTY: Data = None


@dataclass(frozen=True)
class Message:
    port: int
    payload: Tuple[Data, ...]

    def __post_init__(self):
        if len(self.payload) != MESSAGE_SIZE:
            raise ValueError(f"message payload must hold {MESSAGE_SIZE} items")

    def __repr__(self):
        return f"({self.port:#x}, {', '.join(map(repr, self.payload))})"


def msg(regs):
    """First MESSAGE_SIZE registers as a payload."""
    return tuple(regs[:MESSAGE_SIZE])


def regs(payload):
    """Pad a payload with Empty up to the register file size."""
    return tuple(payload) + (EMPTY,) * (REGISTERS - len(payload))


# Instructions

@dataclass(frozen=True)
class New:
    dst: RegIndex
    j: RegIndex
    k: RegIndex


@dataclass(frozen=True)
class Get:
    dst1: RegIndex
    dst2: RegIndex
    src: RegIndex


@dataclass(frozen=True)
class Update:
    i: RegIndex
    j: RegIndex


@dataclass(frozen=True)
class Free:
    i: RegIndex


@dataclass(frozen=True)
class Flip:
    i: RegIndex
    j: RegIndex


@dataclass(frozen=True)
class SetLit:
    dst: RegIndex
    value: Optional[int]


@dataclass(frozen=True)
class Arith:
    """Extension: dst ← d_j op d_k on integers, wrapping at 64 bits."""
    op: str
    dst: RegIndex
    j: RegIndex
    k: RegIndex


@dataclass(frozen=True)
class Fork:
    """Extension: a spark that keeps the current thread alive."""
    port: int


Instr = Union[New, Get, Update, Free, Flip, SetLit, Arith, Fork]

ARITH_OPS = ("+", "-", "*")


# Code fragments

@dataclass(frozen=True)
class Seq:
    instr: Instr
    rest: "Code"


@dataclass(frozen=True)
class IfZero:
    reg: RegIndex
    zero: "Code"
    nonzero: "Code"


@dataclass(frozen=True)
class Spark:
    port: int


@dataclass(frozen=True)
class End:
    pass


Code = Union[Seq, IfZero, Spark, End]


def block(*parts):
    """
    Chain instructions (or tuples of instructions, e.g. macros) in front of
    a terminating code fragment, which must come last.
    """
    *instrs, tail = parts
    flat = []
    for part in instrs:
        if isinstance(part, tuple):
            flat.extend(part)
        else:
            flat.append(part)
    code = tail
    for instr in reversed(flat):
        code = Seq(instr, code)
    return code


def instructions(code):
    """Every instruction reachable in a code fragment, in pre-order."""
    while True:
        if isinstance(code, Seq):
            yield code.instr
            code = code.rest
        elif isinstance(code, IfZero):
            yield from instructions(code.zero)
            code = code.nonzero
        else:
            return


def sparked_ports(code):
    ports = set()
    stack = [code]
    while stack:
        node = stack.pop()
        if isinstance(node, Seq):
            if isinstance(node.instr, Fork):
                ports.add(node.instr.port)
            stack.append(node.rest)
        elif isinstance(node, IfZero):
            stack.extend((node.zero, node.nonzero))
        elif isinstance(node, Spark):
            ports.add(node.port)
    return ports


def register_indices(instr):
    if isinstance(instr, New):
        return (instr.dst, instr.j, instr.k)
    if isinstance(instr, Get):
        return (instr.dst1, instr.dst2, instr.src)
    if isinstance(instr, (Update, Flip)):
        return (instr.i, instr.j)
    if isinstance(instr, Free):
        return (instr.i,)
    if isinstance(instr, SetLit):
        return (instr.dst,)
    if isinstance(instr, Arith):
        return (instr.dst, instr.j, instr.k)
    return ()


def rename_code(code, port):
    """Apply a port renaming function to every Spark/Fork target."""
    if isinstance(code, Seq):
        instr = Fork(port(code.instr.port)) if isinstance(code.instr, Fork) else code.instr
        return Seq(instr, rename_code(code.rest, port))
    if isinstance(code, IfZero):
        return IfZero(code.reg, rename_code(code.zero, port), rename_code(code.nonzero, port))
    if isinstance(code, Spark):
        return Spark(port(code.port))
    return code


# JSON form: a fragment is a list of instructions ending in a terminator,
# e.g. [["flip", 0, 1], ["new", 1, 0, 3], ["spark", 17]].

def instr_to_json(instr):
    if isinstance(instr, New):
        return ["new", instr.dst, instr.j, instr.k]
    if isinstance(instr, Get):
        return ["get", instr.dst1, instr.dst2, instr.src]
    if isinstance(instr, Update):
        return ["update", instr.i, instr.j]
    if isinstance(instr, Free):
        return ["free", instr.i]
    if isinstance(instr, Flip):
        return ["flip", instr.i, instr.j]
    if isinstance(instr, SetLit):
        return ["set", instr.dst, instr.value]
    if isinstance(instr, Arith):
        return ["arith", instr.op, instr.dst, instr.j, instr.k]
    if isinstance(instr, Fork):
        return ["fork", instr.port]
    raise TypeError(f"not an instruction: {instr!r}")


def code_to_json(code):
    out = []
    while isinstance(code, Seq):
        out.append(instr_to_json(code.instr))
        code = code.rest
    if isinstance(code, IfZero):
        out.append(["ifzero", code.reg, code_to_json(code.zero), code_to_json(code.nonzero)])
    elif isinstance(code, Spark):
        out.append(["spark", code.port])
    else:
        out.append(["end"])
    return out


_INSTR_FROM_JSON = {
    "new": lambda a: New(*a),
    "get": lambda a: Get(*a),
    "update": lambda a: Update(*a),
    "free": lambda a: Free(*a),
    "flip": lambda a: Flip(*a),
    "set": lambda a: SetLit(*a),
    "arith": lambda a: Arith(*a),
    "fork": lambda a: Fork(*a),
}


def code_from_json(items):
    if not items:
        raise ValueError("empty code fragment")
    *body, last = items
    head, args = last[0], last[1:]
    if head == "ifzero":
        tail = IfZero(args[0], code_from_json(args[1]), code_from_json(args[2]))
    elif head == "spark":
        tail = Spark(args[0])
    elif head == "end":
        tail = End()
    else:
        raise ValueError(f"code fragment must end in a terminator, got {head!r}")
    instrs = []
    for item in body:
        try:
            instrs.append(_INSTR_FROM_JSON[item[0]](item[1:]))
        except KeyError:
            raise ValueError(f"unknown instruction {item[0]!r}") from None
    return block(*instrs, tail)
