"""
Type checking for ICA terms against the standard simply-typed rules.
"""
from typing import Sequence, Tuple

from src import config
from src.errors import TypeCheckError
from src.ica.syntax import (
    App, Assign, At, BinOp, Deref, Fix, If, Lam, Lit, New, Par, Seq, Skip, Var, show,
)
from src.ica.types import BASE_TYPES, COM, EXP, VAR, Arrow

Context = Sequence[Tuple[str, object]]


def lookup(ctx: Context, name: str):
    for bound, ty in reversed(ctx):
        if bound == name:
            return ty
    return None


def typecheck(t, ctx: Context = ()):
    """The type of `t` under `ctx` (a list of (name, type), later entries shadow)."""
    ctx = list(ctx)

    def expect(term, want):
        got = typecheck(term, ctx)
        if got != want:
            raise TypeCheckError(f"expected {want}, got {got}", show(term))
        return got

    if isinstance(t, Var):
        ty = lookup(ctx, t.name)
        if ty is None:
            raise TypeCheckError(f"unbound variable {t.name!r}", show(t))
        return ty
    if isinstance(t, Lam):
        return Arrow(t.type, typecheck(t.body, ctx + [(t.name, t.type)]))
    if isinstance(t, App):
        fn = typecheck(t.fn, ctx)
        if not isinstance(fn, Arrow):
            raise TypeCheckError(f"applying a term of type {fn}", show(t))
        expect(t.arg, fn.dom)
        return fn.cod
    if isinstance(t, Fix):
        ty = typecheck(t.body, ctx)
        if not isinstance(ty, Arrow) or ty.dom != ty.cod:
            raise TypeCheckError(f"fix needs a type A -> A, got {ty}", show(t))
        return ty.cod
    if isinstance(t, Lit):
        return EXP
    if isinstance(t, Skip):
        return COM
    if isinstance(t, BinOp):
        expect(t.left, EXP)
        expect(t.right, EXP)
        return EXP
    if isinstance(t, If):
        expect(t.cond, EXP)
        ty = typecheck(t.then, ctx)
        if ty not in BASE_TYPES:
            raise TypeCheckError(f"conditional at non-base type {ty}", show(t))
        expect(t.orelse, ty)
        return ty
    if isinstance(t, Seq):
        expect(t.first, COM)
        ty = typecheck(t.second, ctx)
        if ty not in BASE_TYPES:
            raise TypeCheckError(f"sequencing into non-base type {ty}", show(t))
        return ty
    if isinstance(t, Assign):
        expect(t.var, VAR)
        expect(t.value, EXP)
        return COM
    if isinstance(t, Deref):
        expect(t.var, VAR)
        return EXP
    if isinstance(t, New):
        ty = typecheck(t.body, ctx + [(t.name, VAR)])
        if ty not in BASE_TYPES:
            raise TypeCheckError(f"block of new has non-base type {ty}", show(t))
        return ty
    if isinstance(t, Par):
        if not config.ENABLE_PARALLEL:
            raise TypeCheckError("parallel composition is disabled", show(t))
        expect(t.left, COM)
        expect(t.right, COM)
        return COM
    if isinstance(t, At):
        return typecheck(t.body, ctx)
    raise TypeCheckError(f"not a term: {t!r}")
