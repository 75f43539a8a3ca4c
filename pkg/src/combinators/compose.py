"""
GAM composition through the composition operator K.

K sits between f : A ⇒ B and g : B′ ⇒ C as one engine over
(A ⇒ B) ⊗ (B′ ⇒ C) ⇒ (A′ ⇒ C′), made of three copycats:
A′ → A started by EXQ, B → B′ started by EXI and C → C′ started by CCI.
EXI stores, next to the usual link, the outer justifier of every initial
B-question, and EXQ uses it to re-justify initial A-questions, so no
external message is ever justified by a hidden name.
"""
from dataclasses import dataclass
from typing import Tuple

from src.combinators.copycat import copycat_clauses
from src.combinators.gamnet import GamNet
from src.combinators.macros import CCI, EXI, EXQ
from src.gametrace.arena import GameInterface, fresh_arena, game_arrow, game_iso, game_tensor
from src.hram.engine import Engine
from src.hramnet.net import Net, compose_nets, singleton, tensor_nets
from src.nominal import NameMinter, Permutation, Polarity, arrow, fresh_copy, tensor


@dataclass(frozen=True)
class KPorts:
    """The six arena copies K is built over."""
    ka: GameInterface
    kb: GameInterface
    kb2: GameInterface
    kc: GameInterface
    a2: GameInterface
    c2: GameInterface

    def constituents(self):
        """(source, target, start macro) of each constituent copycat."""
        return (
            (self.a2, self.ka, EXQ),
            (self.kb, self.kb2, EXI),
            (self.kc, self.c2, CCI),
        )

    def interface(self):
        left = tensor(arrow(self.ka.base, self.kb.base), arrow(self.kb2.base, self.kc.base))
        return arrow(left, arrow(self.a2.base, self.c2.base))


def k_ports(a: GameInterface, b: GameInterface, b2: GameInterface, c: GameInterface,
            minter: NameMinter) -> KPorts:
    ka, _ = fresh_arena(a, minter)
    kb, _ = fresh_arena(b, minter)
    kb2, _ = fresh_arena(b2, minter)
    kc, _ = fresh_arena(c, minter)
    a2, _ = fresh_arena(a, minter)
    c2, _ = fresh_arena(c, minter)
    return KPorts(ka, kb, kb2, kc, a2, c2)


def composition_operator_K(ports: KPorts) -> Engine:
    """The single engine whose port map is the union of the three copycats."""
    port_map = {}
    for source, target, init in ports.constituents():
        port_map.update(copycat_clauses(source, target, game_iso(source, target), init))
    return Engine(ports.interface(), port_map, label="K")


def composition_operator_K3(ports: KPorts) -> Tuple[Engine, Engine, Engine]:
    """K split into one engine per constituent copycat."""
    engines = []
    for (source, target, init), name in zip(ports.constituents(), ("KA", "KB", "KC")):
        interface = arrow(source.base, target.base)
        engines.append(Engine(interface, copycat_clauses(source, target, game_iso(source, target), init),
                              label=name))
    return tuple(engines)


def _hookup(f: GamNet, g: GamNet, ports: KPorts, k_net: Net, rho: Permutation) -> GamNet:
    """(f ⊗ g) ; K with f's and g's ports wired to K's left side."""
    wiring = {}
    for outer, inner in ((f.source, ports.ka), (f.target, ports.kb),
                         (g.source, ports.kb2), (g.target, ports.kc)):
        for x, y in zip(outer.ports(), inner.ports()):
            wiring[x] = rho.port(y)
    net = compose_nets(tensor_nets(f.net, g.net), k_net, Permutation(wiring))
    source = ports.a2.rename(rho)
    target = ports.c2.rename(rho)
    net = Net(net.engines, net.chi, net.external, source.base.support())
    return GamNet(net, source, target)


def gam_compose(f: GamNet, g: GamNet, minter: NameMinter) -> GamNet:
    """f ;GAM g: the curried nets side by side, mediated by K."""
    game_iso(f.target, g.source)
    ports = k_ports(f.source, f.target, g.source, g.target, minter)
    k = composition_operator_K(ports)
    _, rho = fresh_copy(k.interface, minter)
    return _hookup(f, g, ports, singleton(k, minter, rename=rho), rho)


def gam_compose_split(f: GamNet, g: GamNet, minter: NameMinter) -> GamNet:
    """f ;GAM g with the three-engine K, wired exactly like gam_compose."""
    game_iso(f.target, g.source)
    ports = k_ports(f.source, f.target, g.source, g.target, minter)
    interface = ports.interface()
    _, rho = fresh_copy(interface, minter)
    engines = composition_operator_K3(ports)
    chi = {}
    for port, polarity in interface.items():
        if polarity is Polarity.P:
            chi[port] = rho.port(port)
        else:
            chi[rho.port(port)] = port
    k_net = Net(engines, chi, interface.rename(rho))
    return _hookup(f, g, ports, k_net, rho)


def naive_compose(f: GamNet, g: GamNet) -> GamNet:
    """f ; g as plain net composition, without K."""
    pi = game_iso(f.target, g.source)
    net = compose_nets(f.net, g.net, pi)
    return GamNet(net, f.source, g.target)


def k_arena(ports: KPorts) -> GameInterface:
    """The arena K plays on."""
    left = game_tensor(game_arrow(ports.ka, ports.kb), game_arrow(ports.kb2, ports.kc))
    return game_arrow(left, game_arrow(ports.a2, ports.c2))
