"""
Compositional compiler from typed ICA terms to GAM nets.

Γ ⊢ M : A becomes a GAM net on ⟦Γ⟧ ⇒ ⟦A⟧, built by structural recursion:
variables are projections, abstraction is currying, application is
δ ;GAM (G_M ⊗ G_N) ;GAM eval, constants are weakened engines applied to
their arguments, and fix goes through the fixpoint net.
"""
import logging
from dataclasses import dataclass, field
from typing import FrozenSet, Optional, Sequence, Tuple

from src.combinators.compose import gam_compose
from src.combinators.diagonal import diagonal_net, fixpoint
from src.combinators.gamnet import GamNet, gam_curry, gam_tensor, place, weaken
from src.combinators.structural import eval_net, game_projection
from src.config import COMPILE_TAG
from src.errors import ConfigError, InterfaceError
from src.gametrace.arena import empty_arena, game_tensor
from src.ica import constants
from src.ica.syntax import (
    App, Assign, At, BinOp, Deref, Fix, If, Lam, Lit, New, Par, Seq, Skip, Var,
    free_vars, placements, show,
)
from src.ica.typecheck import typecheck
from src.ica.types import COM, EXP, VAR, Arrow, arena_of, arena_size, arrows
from src.nominal import NameMinter


@dataclass(frozen=True)
class CompilationUnit:
    term: object
    context: Tuple[Tuple[str, object], ...] = ()
    # node for engines outside every annotation; None leaves them to the runtime root
    root: Optional[str] = None
    # known node names; None skips the placement check
    nodes: Optional[FrozenSet[str]] = field(default=None)


class Compiler:
    def __init__(self, minter: Optional[NameMinter] = None):
        self.minter = minter or NameMinter(COMPILE_TAG)
        self.logger = logging.getLogger("Compiler")
        self._lifted = 0

    def compile(self, term, ctx=()) -> Tuple[GamNet, object]:
        ctx = list(ctx)
        ty = typecheck(term, ctx)
        net, _ = self._compile(term, ctx)
        self.logger.info(f"compiled {show(term)[:60]} : {ty} into {len(net.net.engines)} engines")
        return net, ty

    # context

    def _context_arena(self, ctx):
        arena = empty_arena()
        for _, ty in ctx:
            arena = game_tensor(arena, arena_of(ty, self.minter))
        return arena

    def _constant(self, net: GamNet, ctx) -> GamNet:
        if not ctx:
            return net
        return weaken(net, self._context_arena(ctx), self.minter)

    # application

    def _application(self, gm: GamNet, gn: GamNet, fn_type: Arrow, ctx) -> GamNet:
        pair = gam_tensor(gm, gn)
        if ctx:
            pair = gam_compose(diagonal_net(self._context_arena(ctx), self.minter), pair, self.minter)
        ev = eval_net(arena_of(fn_type.dom, self.minter), arena_of(fn_type.cod, self.minter), self.minter)
        return gam_compose(pair, ev, self.minter)

    def _apply(self, fn: GamNet, fn_type, args: Sequence, ctx):
        for arg in args:
            gn, _ = self._compile(arg, ctx)
            fn = self._application(fn, gn, fn_type, ctx)
            fn_type = fn_type.cod
        return fn, fn_type

    def _builtin(self, net: GamNet, ty, args, ctx):
        return self._apply(self._constant(net, ctx), ty, args, ctx)

    def _var_component(self, gx: GamNet, i: int) -> GamNet:
        parts = [arena_of(EXP, self.minter), arena_of(Arrow(EXP, COM), self.minter)]
        return gam_compose(gx, game_projection(parts, i, self.minter), self.minter)

    # recursion

    def _compile(self, t, ctx):
        m = self.minter
        if isinstance(t, Var):
            index = max(i for i, (name, _) in enumerate(ctx) if name == t.name)
            arenas = [arena_of(ty, m) for _, ty in ctx]
            return game_projection(arenas, index, m), ctx[index][1]
        if isinstance(t, Lam):
            f, body_type = self._compile(t.body, ctx + [(t.name, t.type)])
            keep = len(f.source) - arena_size(t.type)
            return gam_curry(f, keep), Arrow(t.type, body_type)
        if isinstance(t, App):
            fn, fn_type = self._compile(t.fn, ctx)
            return self._apply(fn, fn_type, [t.arg], ctx)
        if isinstance(t, Lit):
            return self._constant(constants.lit_net(t.value, m), ctx), EXP
        if isinstance(t, Skip):
            return self._constant(constants.skip_net(m), ctx), COM
        if isinstance(t, BinOp):
            return self._builtin(constants.binop_net(t.op, m), arrows(EXP, EXP, EXP),
                                 [t.left, t.right], ctx)
        if isinstance(t, If):
            ty = typecheck(t.then, ctx)
            # the constant takes the zero branch last
            return self._builtin(constants.if_net(ty, m), arrows(EXP, ty, ty, ty),
                                 [t.cond, t.orelse, t.then], ctx)
        if isinstance(t, Seq):
            ty = typecheck(t.second, ctx)
            return self._builtin(constants.seq_net(ty, m), arrows(COM, ty, ty),
                                 [t.first, t.second], ctx)
        if isinstance(t, Par):
            return self._builtin(constants.par_net(m), arrows(COM, COM, COM),
                                 [t.left, t.right], ctx)
        if isinstance(t, Deref):
            gx, _ = self._compile(t.var, ctx)
            return self._var_component(gx, 0), EXP
        if isinstance(t, Assign):
            gx, _ = self._compile(t.var, ctx)
            return self._apply(self._var_component(gx, 1), Arrow(EXP, COM), [t.value], ctx)
        if isinstance(t, New):
            ty = typecheck(t.body, ctx + [(t.name, VAR)])
            return self._builtin(constants.newvar_net(ty, m), arrows(arrows(VAR, ty), ty),
                                 [Lam(t.name, VAR, t.body)], ctx)
        if isinstance(t, Fix):
            return self._fix(t, ctx)
        if isinstance(t, At):
            f, ty = self._compile(t.body, ctx)
            return place(f, t.node), ty
        raise InterfaceError(f"cannot compile {t!r}")

    def _fix(self, t: Fix, ctx):
        ty = typecheck(t, ctx)
        bound = {}
        for name, var_type in ctx:
            bound[name] = var_type
        free = free_vars(t.body)
        params = [(name, var_type) for name, var_type in bound.items() if name in free]
        if not params:
            gm, _ = self._compile(t.body, [])
            net = gam_compose(gm, fixpoint(arena_of(ty, self.minter), self.minter), self.minter)
            return self._constant(net, ctx), ty

        # lift the free variables out so the functional is closed
        self._lifted += 1
        h = f"%rec{self._lifted}"
        call = Var(h)
        for name, _ in params:
            call = App(call, Var(name))
        body = App(t.body, call)
        for name, var_type in reversed(params):
            body = Lam(name, var_type, body)
        term = Fix(Lam(h, arrows(*[p for _, p in params], ty), body))
        for name, _ in params:
            term = App(term, Var(name))
        self.logger.debug(f"lifted fix over {[name for name, _ in params]}")
        return self._compile(term, ctx)


def compile_term(term, ctx=(), minter: Optional[NameMinter] = None) -> Tuple[GamNet, object]:
    return Compiler(minter).compile(term, ctx)


def compile_unit(unit: CompilationUnit, minter: Optional[NameMinter] = None) -> Tuple[GamNet, object]:
    """Compile a unit, checking its placement names and placing the rest on its root."""
    if unit.nodes is not None:
        unknown = set(placements(unit.term)) - set(unit.nodes)
        if unit.root is not None and unit.root not in unit.nodes:
            unknown.add(unit.root)
        if unknown:
            raise ConfigError(f"placement on unknown nodes: {sorted(unknown)}")
    net, ty = compile_term(unit.term, unit.context, minter)
    if unit.root is not None:
        net = place(net, unit.root)
    return net, ty


def supply_context(f: GamNet, args: Sequence[GamNet], minter: NameMinter) -> GamNet:
    """Close an open net by composing it with one closed net per context entry."""
    if not args:
        return f
    left = args[0]
    for g in args[1:]:
        left = gam_tensor(left, g)
    return gam_compose(left, f, minter)
