"""
Engines for the ICA constants.

Each constant is a single engine over the arena of its type, wrapped as a
closed GAM net (empty source). Port names below follow the arena's port
order: q1 a1 q2 a2 ... for the successive base components.
"""
from src.combinators.gamnet import GamNet, wrap_engine
from src.combinators.macros import CCA, CCI
from src.errors import TypeCheckError
from src.gametrace.arena import empty_arena
from src.hram.code import (
    End, Arith, Flip, Fork, Free, Get, IfZero, New, SetLit, Spark, Update, block,
)
from src.hram.engine import Engine, wrap64
from src.ica.types import COM, EXP, VAR, BASE_TYPES, arena_of, arrows
from src.nominal import Interface, NameMinter, Polarity, tensor


def _arena(ty, minter):
    target = arena_of(ty, minter)
    ports = target.ports()
    q = {i + 1: ports[2 * i] for i in range(len(ports) // 2)}
    a = {i + 1: ports[2 * i + 1] for i in range(len(ports) // 2)}
    return target, q, a


def _closed(label, target, clauses, minter, extra=None, loops=None) -> GamNet:
    interface = target.base if extra is None else tensor(target.base, extra)
    engine = Engine(interface, clauses, label=label)
    return wrap_engine(engine, empty_arena(), target, minter, loops=loops)


def lit_net(n: int, minter: NameMinter) -> GamNet:
    target, q, a = _arena(EXP, minter)
    n = wrap64(n)
    clauses = {q[1]: block(Flip(0, 1), SetLit(1, None), SetLit(2, n), Spark(a[1]))}
    return _closed(f"lit{n}", target, clauses, minter)


def skip_net(minter: NameMinter) -> GamNet:
    target, q, a = _arena(COM, minter)
    clauses = {q[1]: block(Flip(0, 1), SetLit(1, None), Spark(a[1]))}
    return _closed("skip", target, clauses, minter)


def if_net(ty, minter: NameMinter) -> GamNet:
    """
    if : exp → T → T → T. The second argument is taken when the condition
    is non-zero, the third when it is zero.
    """
    target, q, a = _arena(arrows(EXP, ty, ty, ty), minter)
    clauses = {
        q[4]: block(CCI, Spark(q[1])),
        a[1]: block(CCA, Flip(0, 1), CCI, IfZero(2, Spark(q[3]), Spark(q[2]))),
        a[2]: block(CCA, Spark(a[4])),
        a[3]: block(CCA, Spark(a[4])),
    }
    return _closed("if", target, clauses, minter)


def seq_net(ty, minter: NameMinter) -> GamNet:
    target, q, a = _arena(arrows(COM, ty, ty), minter)
    clauses = {
        q[3]: block(CCI, Spark(q[1])),
        a[1]: block(CCA, Flip(0, 1), CCI, Spark(q[2])),
        a[2]: block(CCA, Spark(a[3])),
    }
    return _closed("seq", target, clauses, minter)


def binop_net(op: str, minter: NameMinter) -> GamNet:
    """The left operand waits in a heap cell while the right one is evaluated."""
    target, q, a = _arena(arrows(EXP, EXP, EXP), minter)
    clauses = {
        q[3]: block(CCI, Spark(q[1])),
        a[1]: block(CCA, New(1, 0, 2), SetLit(2, None), Spark(q[2])),
        a[2]: block(Flip(0, 1), Get(0, 3, 1), Free(1), Arith(op, 2, 3, 2), Spark(a[3])),
    }
    return _closed(f"op{op}", target, clauses, minter)


def newvar_net(ty, minter: NameMinter) -> GamNet:
    """
    newvar : (var → T) → T. The variable lives in the second slot of the
    link cell created for the outer question, initialised to 0 and freed
    with the final answer.
    """
    target, q, a = _arena(arrows(arrows(VAR, ty), ty), minter)
    clauses = {
        q[5]: block(SetLit(3, 0), CCI, Spark(q[4])),
        # read
        q[1]: block(Get(None, 2, 0), Flip(0, 1), SetLit(1, None), Spark(a[1])),
        # write: fetch the argument, then store it
        q[3]: block(Flip(0, 1), New(1, 0, 1), Spark(q[2])),
        a[2]: block(Get(None, 3, 0), Update(3, 2), SetLit(2, None), CCA, Spark(a[3])),
        a[4]: block(CCA, Spark(a[5])),
    }
    return _closed("newvar", target, clauses, minter)


def par_net(minter: NameMinter) -> GamNet:
    """
    par : com → com → com. Both arguments are started at once through a
    looped auxiliary port; a join cell counts finished branches and the
    second one to finish answers.
    """
    target, q, a = _arena(arrows(COM, COM, COM), minter)
    aux_out, aux_in = minter.fresh_port(), minter.fresh_port()
    extra = Interface({aux_out: Polarity.P, aux_in: Polarity.O})
    join = block(Flip(0, 1), Get(0, 3, 1), Free(1), SetLit(2, 1), Update(0, 2),
                 IfZero(2, End(), block(Free(3), Spark(a[3]))))
    clauses = {
        q[3]: block(Flip(0, 1), SetLit(3, 0), New(2, 0, 3), Fork(aux_out),
                    New(1, 2, 2), SetLit(2, None), Spark(q[1])),
        aux_in: block(New(1, 2, 2), SetLit(2, None), Spark(q[2])),
        a[1]: join,
        a[2]: join,
    }
    return _closed("par", target, clauses, minter, extra=extra, loops={aux_out: aux_in})


def constant_net(name: str, params=(), minter: NameMinter = None) -> GamNet:
    """
    Build a constant by name: lit(n), skip, if(T), seq(T), op(+|-|*),
    newvar(T) or par. T is exp or com.
    """
    minter = minter or NameMinter()
    params = tuple(params)
    if name in ("if", "seq", "newvar"):
        ty = params[0] if params else EXP
        if ty not in BASE_TYPES:
            raise TypeCheckError(f"{name} is only defined at exp and com, not {ty}")
    if name == "lit":
        return lit_net(int(params[0]), minter)
    if name == "skip":
        return skip_net(minter)
    if name == "if":
        return if_net(ty, minter)
    if name == "seq":
        return seq_net(ty, minter)
    if name == "op":
        if not params or params[0] not in ("+", "-", "*"):
            raise TypeCheckError(f"unknown operator {params[:1]!r}")
        return binop_net(params[0], minter)
    if name == "newvar":
        return newvar_net(ty, minter)
    if name == "par":
        return par_net(minter)
    raise TypeCheckError(f"unknown constant {name!r}")
