"""
Big-step call-by-name interpreter for the sequential fragment, used as
the oracle the compiled nets are tested against.
"""
import sys
from dataclasses import dataclass
from typing import Callable, Dict

from src.errors import EvaluationTimeout, TypeCheckError
from src.hram.engine import wrap64
from src.ica.syntax import (
    App, Assign, At, BinOp, Deref, Fix, If, Lam, Lit, New, Par, Seq, Skip, Var,
)

DONE = "done"
DEFAULT_FUEL = 10**6


@dataclass
class Thunk:
    term: object
    env: Dict

    def force(self, machine):
        return machine.eval(self.term, self.env)


@dataclass
class Closure:
    name: str
    body: object
    env: Dict


@dataclass
class Cell:
    """A var value: reads and writes one store location."""
    read: Callable
    write: Callable


class Interpreter:
    def __init__(self, fuel=DEFAULT_FUEL):
        self.fuel = fuel
        self.store = {}
        self._next = 0

    def tick(self):
        self.fuel -= 1
        if self.fuel < 0:
            raise EvaluationTimeout("interpreter ran out of fuel")

    def apply(self, fn, arg: Thunk):
        if not isinstance(fn, Closure):
            raise TypeCheckError(f"applying a non-function {fn!r}")
        env = dict(fn.env)
        env[fn.name] = arg
        return self.eval(fn.body, env)

    def eval(self, t, env):
        self.tick()
        if isinstance(t, Var):
            return env[t.name].force(self)
        if isinstance(t, Lam):
            return Closure(t.name, t.body, env)
        if isinstance(t, App):
            return self.apply(self.eval(t.fn, env), Thunk(t.arg, env))
        if isinstance(t, Fix):
            return self.apply(self.eval(t.body, env), Thunk(t, env))
        if isinstance(t, Lit):
            return wrap64(t.value)
        if isinstance(t, Skip):
            return DONE
        if isinstance(t, BinOp):
            left = self.eval(t.left, env)
            right = self.eval(t.right, env)
            if t.op == "+":
                return wrap64(left + right)
            if t.op == "-":
                return wrap64(left - right)
            return wrap64(left * right)
        if isinstance(t, If):
            branch = t.then if self.eval(t.cond, env) == 0 else t.orelse
            return self.eval(branch, env)
        if isinstance(t, Seq):
            self.eval(t.first, env)
            return self.eval(t.second, env)
        if isinstance(t, Par):
            self.eval(t.left, env)
            self.eval(t.right, env)
            return DONE
        if isinstance(t, Assign):
            cell = self.eval(t.var, env)
            cell.write(self.eval(t.value, env))
            return DONE
        if isinstance(t, Deref):
            return self.eval(t.var, env).read()
        if isinstance(t, New):
            loc = self._next
            self._next += 1
            self.store[loc] = 0
            cell = Cell(lambda: self.store[loc], lambda v: self.store.__setitem__(loc, v))
            body_env = dict(env)
            body_env[t.name] = _Value(cell)
            try:
                return self.eval(t.body, body_env)
            finally:
                del self.store[loc]
        if isinstance(t, At):
            return self.eval(t.body, env)
        raise TypeCheckError(f"cannot evaluate {t!r}")


class _Value:
    """An already evaluated binding."""
    def __init__(self, value):
        self.value = value

    def force(self, machine):
        return self.value


def reference_interpret(t, fuel=DEFAULT_FUEL, env=None):
    """
    Evaluate a closed term of base type: an int for exp, "done" for com.

    Divergence shows up as EvaluationTimeout, either from the fuel or from
    Python's recursion limit.
    """
    machine = Interpreter(fuel)
    bindings = {name: _Value(value) for name, value in (env or {}).items()}
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 10000))
    try:
        return machine.eval(t, bindings)
    except RecursionError:
        raise EvaluationTimeout("interpreter recursion too deep") from None
    finally:
        sys.setrecursionlimit(limit)
