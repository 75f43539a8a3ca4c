"""Structural equivalence of nets: graph isomorphism up to port renaming."""
from typing import Dict, Optional

from src.hram.code import Fork, IfZero, Seq, Spark
from src.hramnet.net import Net, rename_net
from src.nominal import Permutation

EXTERNAL = -1


def _owners(s: Net):
    table = {p: EXTERNAL for p in s.external}
    table.update(s.owner)
    return table


def _polarity(s: Net, owner, port):
    if owner == EXTERNAL:
        return s.external.polarity(port)
    return s.engines[owner].interface.polarity(port)


class _Search:
    def __init__(self, s1: Net, s2: Net):
        self.s1, self.s2 = s1, s2
        self.own1, self.own2 = _owners(s1), _owners(s2)
        self.chi2_inv = {v: k for k, v in s2.chi.items()}

    def compatible(self, pairs, pi, used, x1, x2):
        o1, o2 = self.own1.get(x1), self.own2.get(x2)
        if o1 is None or o2 is None:
            return False
        if pairs.get(o1, EXTERNAL if o1 == EXTERNAL else None) != o2:
            return False
        if _polarity(self.s1, o1, x1) is not _polarity(self.s2, o2, x2):
            return False
        if x1 in pi:
            return pi[x1] == x2
        return x2 not in used

    def bind(self, pairs, pi, used, x1, x2):
        if not self.compatible(pairs, pi, used, x1, x2):
            return False
        pi[x1] = x2
        used.add(x2)
        return True

    def unify_code(self, pairs, pi, used, c1, c2):
        while True:
            if type(c1) is not type(c2):
                return False
            if isinstance(c1, Seq):
                i1, i2 = c1.instr, c2.instr
                if isinstance(i1, Fork) and isinstance(i2, Fork):
                    if not self.bind(pairs, pi, used, i1.port, i2.port):
                        return False
                elif i1 != i2:
                    return False
                c1, c2 = c1.rest, c2.rest
            elif isinstance(c1, IfZero):
                if c1.reg != c2.reg or not self.unify_code(pairs, pi, used, c1.zero, c2.zero):
                    return False
                c1, c2 = c1.nonzero, c2.nonzero
            elif isinstance(c1, Spark):
                return self.bind(pairs, pi, used, c1.port, c2.port)
            else:
                return True

    def match_ports(self, pairs, pi, used, e1, e2, ports):
        if not ports:
            yield pi, used
            return
        o1, rest = ports[0], ports[1:]
        for o2 in e2.port_map:
            pi2, used2 = dict(pi), set(used)
            if not self.bind(pairs, pi2, used2, o1, o2):
                continue
            if self.unify_code(pairs, pi2, used2, e1.port_map[o1], e2.port_map[o2]):
                yield from self.match_ports(pairs, pi2, used2, e1, e2, rest)

    def propagate(self, pairs, pi, used):
        changed = True
        while changed:
            changed = False
            for x1, y1 in self.s1.chi.items():
                if x1 in pi:
                    y2 = self.s2.chi.get(pi[x1])
                    if y2 is None:
                        return False
                    if y1 not in pi:
                        if not self.bind(pairs, pi, used, y1, y2):
                            return False
                        changed = True
                    elif pi[y1] != y2:
                        return False
                elif y1 in pi:
                    x2 = self.chi2_inv.get(pi[y1])
                    if x2 is None or not self.bind(pairs, pi, used, x1, x2):
                        return False
                    changed = True
        return True

    def finish(self, pairs, pi, used):
        pi, used = dict(pi), set(used)
        if not self.propagate(pairs, pi, used):
            return None
        loose = [x for x in self.own1 if x not in pi]
        if not loose:
            return pi
        x1 = loose[0]
        for x2 in self.own2:
            if x2 in used:
                continue
            pi2, used2 = dict(pi), set(used)
            if self.bind(pairs, pi2, used2, x1, x2):
                found = self.finish(pairs, pi2, used2)
                if found is not None:
                    return found
        return None

    def engines(self, pairs, pi, used):
        todo = [i for i in range(len(self.s1.engines)) if i not in pairs]
        if not todo:
            return self.finish(pairs, pi, used)
        i1 = todo[0]
        e1 = self.s1.engines[i1]
        taken = set(pairs.values())
        for i2, e2 in enumerate(self.s2.engines):
            if i2 in taken or len(e1.interface) != len(e2.interface):
                continue
            if len(e1.port_map) != len(e2.port_map):
                continue
            pairs2 = dict(pairs)
            pairs2[i1] = i2
            for pi2, used2 in self.match_ports(pairs2, pi, used, e1, e2, list(e1.port_map)):
                found = self.engines(pairs2, pi2, used2)
                if found is not None:
                    return found
        return None


def structurally_equivalent(s1: Net, s2: Net) -> Optional[Permutation]:
    """A renaming π with π·s1 = s2, found by backtracking, or None."""
    if len(s1.engines) != len(s2.engines) or len(s1.external) != len(s2.external):
        return None
    if len(s1.chi) != len(s2.chi):
        return None
    search = _Search(s1, s2)
    found: Optional[Dict[int, int]] = search.engines({EXTERNAL: EXTERNAL}, {}, set())
    if found is None:
        return None
    perm = Permutation(found)
    renamed = rename_net(s1, perm)
    if renamed.external != s2.external or dict(renamed.chi) != dict(s2.chi):
        return None
    if renamed.domain != s2.domain:
        return None
    return perm
