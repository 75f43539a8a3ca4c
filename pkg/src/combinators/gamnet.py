"""
GAM nets: an HRAM net together with the arena A ⇒ B it plays on.
"""
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Mapping, Optional

from src.errors import InterfaceError
from src.gametrace.arena import (
    GameInterface, arena_from_json, arena_to_json, empty_arena, game_arrow, game_tensor,
)
from src.hram.engine import Engine, ValidationReport
from src.hramnet.net import Net, sink, singleton, tensor_nets, validate_net, with_placement
from src.hramnet.serialize import net_from_json, net_to_json
from src.nominal import NameMinter, fresh_copy


@dataclass(frozen=True)
class GamNet:
    net: Net
    source: GameInterface
    target: GameInterface

    @cached_property
    def arena(self) -> GameInterface:
        return game_arrow(self.source, self.target)

    def __repr__(self):
        return f"GamNet(engines={len(self.net.engines)}, source={len(self.source)}, target={len(self.target)})"


def validate_gamnet(f: GamNet) -> ValidationReport:
    report = validate_net(f.net)
    report.subject = "GAM net"
    if f.net.external != f.arena.base:
        report.add("net interface differs from the arena")
    if f.net.domain != f.source.base.support():
        report.add("argument side of the net differs from the arena's source")
    return report


def wrap_engine(e: Engine, source: GameInterface, target: GameInterface, minter: NameMinter,
                loops: Optional[Mapping[int, int]] = None) -> GamNet:
    """
    Singleton GAM net whose external ports carry the engine's port names.

    The engine itself is moved onto fresh names. `loops` wires engine
    P-ports back to engine O-ports (original names) and keeps them off
    the external interface.
    """
    _, perm = fresh_copy(e.interface, minter)
    inner = e.rename(perm)
    inner_loops = {perm.port(a): perm.port(b) for a, b in (loops or {}).items()}
    net = singleton(inner, minter, rename=perm.inverse(), loops=inner_loops,
                    domain=source.base.support())
    f = GamNet(net, source, target)
    if net.external != f.arena.base:
        raise InterfaceError(f"engine {e.label!r} does not fit its arena")
    return f


def gam_tensor(f: GamNet, g: GamNet) -> GamNet:
    return GamNet(tensor_nets(f.net, g.net),
                  game_tensor(f.source, g.source),
                  game_tensor(f.target, g.target))


def gam_curry(f: GamNet, keep: int) -> GamNet:
    """
    Λ: the last source ports (after the first `keep`) move into the
    target as the argument of an arrow. Pure metadata on the net.
    """
    ports = f.source.ports()
    gamma = f.source.restrict(ports[:keep])
    arg = f.source.restrict(ports[keep:])
    net = replace(f.net, domain=gamma.base.support())
    return GamNet(net, gamma, game_arrow(arg, f.target))


def gam_uncurry(f: GamNet, arg: GameInterface, result: GameInterface) -> GamNet:
    """Λ⁻¹: given target = arg ⇒ result, move arg to the source."""
    if set(arg.ports()) | set(result.ports()) != set(f.target.ports()):
        raise InterfaceError("uncurry: target does not split as arg ⇒ result")
    source = game_tensor(f.source, arg)
    net = replace(f.net, domain=source.base.support())
    return GamNet(net, source, result)


def sink_gamnet(a: GameInterface, minter: NameMinter) -> GamNet:
    """!_A as a GAM net over A ⇒ I."""
    return GamNet(sink(a.base, minter), a, empty_arena())


def weaken(f: GamNet, gamma: GameInterface, minter: NameMinter) -> GamNet:
    """A closed net seen in context Γ: !_Γ ⊗ f."""
    return gam_tensor(sink_gamnet(gamma, minter), f)


def place(f: GamNet, node) -> GamNet:
    return replace(f, net=with_placement(f.net, node))


def gamnet_to_json(f: GamNet):
    doc = net_to_json(f.net)
    doc["source"] = arena_to_json(f.source)
    doc["target"] = arena_to_json(f.target)
    return doc


def gamnet_from_json(doc) -> GamNet:
    return GamNet(net_from_json(doc), arena_from_json(doc["source"]), arena_from_json(doc["target"]))
