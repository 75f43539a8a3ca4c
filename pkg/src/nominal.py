"""
Atoms, polarised interfaces and renamings.

Port names and pointer names are both 64-bit atoms: a 16-bit node tag
followed by a 48-bit counter. Every node owns one NameMinter, so names
minted on different nodes never collide without any coordination.
"""
import threading
from enum import Enum
from typing import Dict, Iterable, Iterator, Mapping, NewType, Optional, Tuple

from src.config import COMPILE_TAG, COUNTER_BITS, NODE_TAG_BITS
from src.errors import InterfaceError, NameExhausted

PortName = NewType("PortName", int)
PointerName = NewType("PointerName", int)

COUNTER_LIMIT = 1 << COUNTER_BITS
NODE_TAG_LIMIT = 1 << NODE_TAG_BITS


def atom(node_tag, counter):
    return (node_tag << COUNTER_BITS) | counter


def node_tag_of(name):
    return name >> COUNTER_BITS


def counter_of(name):
    return name & (COUNTER_LIMIT - 1)


class NameMinter:
    """
    Source of fresh atoms for one node.

    Ports and pointers share one counter so the two sorts never overlap
    numerically even though they are kept apart by type.
    """
    def __init__(self, node_tag=COMPILE_TAG, start=0):
        if not 0 <= node_tag < NODE_TAG_LIMIT:
            raise ValueError(f"node tag {node_tag} out of range")
        self.node_tag = node_tag
        self._next = start
        self._lock = threading.Lock()

    def fresh(self):
        with self._lock:
            if self._next >= COUNTER_LIMIT:
                raise NameExhausted(f"node {self.node_tag} has exhausted its name space")
            name = atom(self.node_tag, self._next)
            self._next += 1
            return name

    def fresh_port(self) -> PortName:
        return PortName(self.fresh())

    def fresh_pointer(self) -> PointerName:
        return PointerName(self.fresh())

    def __repr__(self):
        return f"NameMinter(node={self.node_tag}, next={self._next})"


def fresh_port_name(minter: NameMinter) -> PortName:
    return minter.fresh_port()


class Polarity(Enum):
    O = "O"
    P = "P"

    def dual(self):
        return Polarity.P if self is Polarity.O else Polarity.O

    def __str__(self):
        return self.value


O = Polarity.O
P = Polarity.P


class Interface:
    """
    A finite set of polarised port names.

    Insertion order is kept (arenas slice their sub-interfaces by position)
    but equality ignores it.
    """
    __slots__ = ("_ports",)

    def __init__(self, ports: Optional[Mapping[int, Polarity]] = None):
        self._ports: Dict[int, Polarity] = dict(ports or {})

    @classmethod
    def of(cls, *pairs: Tuple[Polarity, int]):
        ports = {}
        for polarity, name in pairs:
            if name in ports:
                raise InterfaceError(f"port {name:#x} listed twice")
            ports[name] = polarity
        return cls(ports)

    def polarity(self, name) -> Polarity:
        return self._ports[name]

    def names(self):
        return list(self._ports)

    def support(self) -> frozenset:
        return frozenset(self._ports)

    def with_polarity(self, polarity):
        return [name for name, pol in self._ports.items() if pol is polarity]

    def o_ports(self):
        return self.with_polarity(Polarity.O)

    def p_ports(self):
        return self.with_polarity(Polarity.P)

    def items(self):
        return self._ports.items()

    def rename(self, perm: "Permutation") -> "Interface":
        return Interface({perm.port(name): pol for name, pol in self._ports.items()})

    def restrict(self, names: Iterable[int]) -> "Interface":
        keep = set(names)
        return Interface({n: p for n, p in self._ports.items() if n in keep})

    def __contains__(self, name):
        return name in self._ports

    def __iter__(self) -> Iterator[int]:
        return iter(self._ports)

    def __len__(self):
        return len(self._ports)

    def __eq__(self, other):
        return isinstance(other, Interface) and self._ports == other._ports

    def __hash__(self):
        return hash(frozenset(self._ports.items()))

    def __repr__(self):
        body = ", ".join(f"⟨{pol},{name:#x}⟩" for name, pol in self._ports.items())
        return f"{{{body}}}"


def tensor(a: Interface, b: Interface) -> Interface:
    overlap = a.support() & b.support()
    if overlap:
        raise InterfaceError(f"tensor of overlapping interfaces: {sorted(overlap)}")
    ports = dict(a.items())
    ports.update(b.items())
    return Interface(ports)


def dual(a: Interface) -> Interface:
    return Interface({name: pol.dual() for name, pol in a.items()})


def arrow(a: Interface, b: Interface) -> Interface:
    return tensor(dual(a), b)


class Permutation:
    """Finite renaming of atoms, kept as separate port and pointer maps."""

    def __init__(self, ports: Optional[Mapping[int, int]] = None,
                 pointers: Optional[Mapping[int, int]] = None):
        self.ports = dict(ports or {})
        self.pointers = dict(pointers or {})
        for table in (self.ports, self.pointers):
            if len(set(table.values())) != len(table):
                raise InterfaceError("renaming is not injective")

    def port(self, name):
        return self.ports.get(name, name)

    def pointer(self, name):
        return self.pointers.get(name, name)

    def inverse(self):
        return Permutation({v: k for k, v in self.ports.items()},
                           {v: k for k, v in self.pointers.items()})

    def compose(self, first: "Permutation") -> "Permutation":
        """The renaming that applies `first` and then `self`."""
        ports = {k: self.port(v) for k, v in first.ports.items()}
        for k, v in self.ports.items():
            ports.setdefault(k, v)
        pointers = {k: self.pointer(v) for k, v in first.pointers.items()}
        for k, v in self.pointers.items():
            pointers.setdefault(k, v)
        return Permutation(ports, pointers)

    def is_identity(self):
        return all(k == v for k, v in self.ports.items()) and \
            all(k == v for k, v in self.pointers.items())

    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        strip = lambda table: {k: v for k, v in table.items() if k != v}
        return strip(self.ports) == strip(other.ports) and \
            strip(self.pointers) == strip(other.pointers)

    def __repr__(self):
        body = ", ".join(f"{k:#x}↦{v:#x}" for k, v in self.ports.items())
        return f"Permutation([{body}])"


def same_shape(a: Interface, b: Interface) -> Optional[Permutation]:
    """Match ports in sorted-atom order per polarity, or None if the counts differ."""
    mapping = {}
    for polarity in Polarity:
        left = sorted(a.with_polarity(polarity))
        right = sorted(b.with_polarity(polarity))
        if len(left) != len(right):
            return None
        mapping.update(zip(left, right))
    return Permutation(mapping)


def fresh_copy(a: Interface, minter: NameMinter) -> Tuple[Interface, Permutation]:
    perm = Permutation({name: minter.fresh_port() for name in a})
    return a.rename(perm), perm
