"""
HRAM nets and the compact-closed operations on them.

A net is a set of engines, a connectivity bijection `chi` and an external
interface. `domain` records which external ports form the argument side of
the net, so that currying can move ports between the two sides.
"""
import itertools
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Dict, FrozenSet, Mapping, Optional, Tuple

from src.errors import InterfaceError
from src.hram.code import End
from src.hram.engine import Engine, ValidationReport, validate_engine
from src.nominal import (
    Interface, NameMinter, Permutation, Polarity, arrow, dual, fresh_copy, tensor,
)


@dataclass(frozen=True)
class Net:
    engines: Tuple[Engine, ...]
    chi: Mapping[int, int]
    external: Interface
    domain: FrozenSet[int] = frozenset()

    @cached_property
    def owner(self) -> Dict[int, int]:
        """Port name → index of the engine owning it (external ports are absent)."""
        table = {}
        for index, engine in enumerate(self.engines):
            for port in engine.interface:
                table[port] = index
        return table

    @cached_property
    def codomain(self):
        return frozenset(self.external) - self.domain

    def __repr__(self):
        return f"Net(engines={len(self.engines)}, external={len(self.external)})"


def validate_net(s: Net) -> ValidationReport:
    report = ValidationReport("net")
    seen = {}
    for index, engine in enumerate(s.engines):
        for port in engine.interface:
            if port in seen:
                report.add(f"port {port:#x} shared by engines {seen[port]} and {index}")
            seen[port] = index
    for port in s.external:
        if port in seen:
            report.add(f"external port {port:#x} clashes with engine {seen[port]}")
    if not s.domain <= s.external.support():
        report.add("domain mentions ports outside the external interface")

    sources = set(s.external.o_ports())
    targets = set(s.external.p_ports())
    for engine in s.engines:
        sources.update(engine.p_ports())
        targets.update(engine.o_ports())
    if set(s.chi) != sources:
        missing = sorted(sources - set(s.chi))
        extra = sorted(set(s.chi) - sources)
        if missing:
            report.add(f"chi undefined on {[hex(p) for p in missing]}")
        if extra:
            report.add(f"chi defined outside its domain on {[hex(p) for p in extra]}")
    images = list(s.chi.values())
    if len(set(images)) != len(images):
        report.add("chi is not injective")
    if set(images) != targets:
        report.add("chi does not map onto the input ports")

    for engine in s.engines:
        engine_report = validate_engine(engine)
        report.issues.extend(engine_report.issues)
    return report


def singleton(e: Engine, minter: NameMinter, rename: Optional[Permutation] = None,
              loops: Optional[Mapping[int, int]] = None, domain=frozenset()) -> Net:
    """
    Wrap one engine in a net with a same-shaped external interface.

    `rename` maps the engine's ports to the external names (fresh names are
    minted when it is omitted). `loops` wires engine P-ports straight back to
    engine O-ports; those ports stay off the external interface.
    """
    loops = dict(loops or {})
    looped = set(loops) | set(loops.values())
    visible = e.interface.restrict(p for p in e.interface if p not in looped)
    if rename is None:
        _, rename = fresh_copy(visible, minter)
    external = visible.rename(rename)
    chi = dict(loops)
    for port, polarity in visible.items():
        if polarity is Polarity.P:
            chi[port] = rename.port(port)
        else:
            chi[rename.port(port)] = port
    return Net((e,), chi, external, frozenset(domain))


def identity_net(a: Interface, minter: NameMinter) -> Net:
    """id_A: pure wiring between A and a fresh copy A′, no engines."""
    copy, pi = fresh_copy(a, minter)
    chi = {}
    for port, polarity in a.items():
        if polarity is Polarity.O:
            chi[pi.port(port)] = port
        else:
            chi[port] = pi.port(port)
    return Net((), chi, arrow(a, copy), a.support())


def tensor_nets(f: Net, g: Net) -> Net:
    clash = set(f.chi) & set(g.chi)
    names_f = f.external.support() | set(f.owner)
    names_g = g.external.support() | set(g.owner)
    if clash or names_f & names_g:
        raise InterfaceError("tensor of nets that share names")
    chi = dict(f.chi)
    chi.update(g.chi)
    return Net(f.engines + g.engines, chi, tensor(f.external, g.external), f.domain | g.domain)


def compose_nets(f: Net, g: Net, pi: Permutation) -> Net:
    """
    f ; g, connecting the ports of f named in `pi` to their images in g.

    Every wire of the result is found by following chi through the hidden
    interface until it lands outside it.
    """
    hidden_f = set(pi.ports)
    hidden_g = set(pi.ports.values())
    for b in hidden_f:
        b2 = pi.port(b)
        if b not in f.external or b2 not in g.external:
            raise InterfaceError(f"composition port {b:#x}↦{b2:#x} missing from the nets")
        if f.external.polarity(b) is g.external.polarity(b2):
            raise InterfaceError(f"composition ports {b:#x} and {b2:#x} have equal polarity")
    inverse = pi.inverse()
    limit = len(hidden_f) + 2

    chi = {}
    for source, target in itertools.chain(f.chi.items(), g.chi.items()):
        if source in hidden_f or source in hidden_g:
            continue
        hops = 0
        while target in hidden_f or target in hidden_g:
            if target in hidden_f:
                target = g.chi[pi.port(target)]
            else:
                target = f.chi[inverse.port(target)]
            hops += 1
            if hops > limit:
                raise InterfaceError("composition closes a wiring cycle")
        chi[source] = target

    external = tensor(
        f.external.restrict(p for p in f.external if p not in hidden_f),
        g.external.restrict(p for p in g.external if p not in hidden_g),
    )
    domain = (f.domain | g.domain) - hidden_f - hidden_g
    return Net(f.engines + g.engines, chi, external, domain)


def _rewire(f: Net, ports, minter: NameMinter) -> Tuple[Net, Permutation]:
    """
    Compose with the unit (or counit) on `ports`. Both are identities, so
    the composite is f with those ports renamed to fresh names.
    """
    copy, pi = fresh_copy(f.external.restrict(ports), minter)
    chi = {}
    for source, target in f.chi.items():
        chi[pi.port(source)] = pi.port(target)
    return Net(f.engines, chi, f.external.rename(pi), frozenset(pi.port(p) for p in f.domain)), pi


def curry(f: Net, ports, minter: NameMinter) -> Tuple[Net, Permutation]:
    """Λ: move argument-side `ports` to the result side."""
    ports = frozenset(ports)
    if not ports <= f.domain:
        raise InterfaceError("curry: ports are not on the argument side")
    net, pi = _rewire(f, ports, minter)
    return replace(net, domain=net.domain - {pi.port(p) for p in ports}), pi


def uncurry(f: Net, ports, minter: NameMinter) -> Tuple[Net, Permutation]:
    """Λ⁻¹: move result-side `ports` to the argument side."""
    ports = frozenset(ports)
    if not ports <= f.codomain:
        raise InterfaceError("uncurry: ports are not on the result side")
    net, pi = _rewire(f, ports, minter)
    return replace(net, domain=net.domain | {pi.port(p) for p in ports}), pi


def sink(a: Interface, minter: NameMinter) -> Net:
    """!_A : A ⇒ I, an engine that ends every incoming thread."""
    inner, pi = fresh_copy(dual(a), minter)
    engine = Engine(inner, {p: End() for p in inner.o_ports()}, label="sink")
    rename = pi.inverse()
    return singleton(engine, minter, rename=rename, domain=a.support())


def projection(i: int, a1: Interface, a2: Interface, minter: NameMinter) -> Net:
    """Π_i = id ⊗ ! on A1 ⊗ A2, keeping component i."""
    keep, drop = (a1, a2) if i == 1 else (a2, a1)
    return tensor_nets(identity_net(keep, minter), sink(drop, minter))


def combine_engines(s: Net) -> Net:
    """Merge a two-engine net into one engine with the same wiring."""
    if len(s.engines) != 2:
        raise InterfaceError(f"combine_engines needs exactly two engines, got {len(s.engines)}")
    e1, e2 = s.engines
    port_map = dict(e1.port_map)
    port_map.update(e2.port_map)
    merged = Engine(
        tensor(e1.interface, e2.interface),
        port_map,
        label=f"{e1.label}+{e2.label}",
        placement=e1.placement if e1.placement == e2.placement else None,
    )
    return Net((merged,), dict(s.chi), s.external, s.domain)


def rename_net(s: Net, perm: Permutation) -> Net:
    return Net(
        tuple(e.rename(perm) for e in s.engines),
        {perm.port(a): perm.port(b) for a, b in s.chi.items()},
        s.external.rename(perm),
        frozenset(perm.port(p) for p in s.domain),
    )


def with_placement(s: Net, node) -> Net:
    """Place every engine not placed yet on `node`."""
    engines = tuple(e if e.placement is not None else e.placed(node) for e in s.engines)
    return replace(s, engines=engines)
