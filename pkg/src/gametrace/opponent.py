"""
Opponents that play by the rules of an arena.

Fresh opponent names are atoms under OPPONENT_TAG indexed by the trace
position, so the same play always gets the same names.
"""
from typing import List, Sequence

from src.gametrace.arena import GameInterface
from src.gametrace.legality import answered
from src.hram.code import EMPTY, Int, Message, Pointer
from src.hramnet.semantics import Opponent, opponent_name
from src.hramnet.trace import Move
from src.nominal import Polarity


def opponent_moves(arena: GameInterface, trace: Sequence[Move], values=(0,),
                   single_threaded=True, alternating=True) -> List[Move]:
    """Every legal O-move that may extend `trace`."""
    trace = tuple(trace)
    if alternating and trace and trace[-1].polarity is Polarity.O:
        return []
    position = len(trace)
    fresh_own = Pointer(opponent_name(position, 1))
    out = []

    initial_ok = not single_threaded or position == 0
    for port in arena.ports():
        if port in arena.initials and initial_ok:
            out.append(Move(Polarity.O, Message(port, (Pointer(opponent_name(position, 0)), fresh_own, EMPTY))))

    for m in trace:
        if m.own is None or not arena.is_question(m.port) or answered(trace, arena, m.own):
            continue
        for port in arena.enabled_by(m.port):
            if arena.polarity(port) is not Polarity.O:
                continue
            if arena.is_question(port):
                out.append(Move(Polarity.O, Message(port, (Pointer(m.own), fresh_own, EMPTY))))
                continue
            # answer only once every question below this one is answered
            open_children = [x for x in trace if x.justifier == m.own and arena.is_question(x.port)
                             and x.own is not None and not answered(trace, arena, x.own)]
            if open_children:
                continue
            data = [Int(v) for v in values] if port in arena.valued else [EMPTY]
            for d in data:
                out.append(Move(Polarity.O, Message(port, (Pointer(m.own), EMPTY, d))))
    return out


class GameOpponent(Opponent):
    """Feeds a net the legal O-moves of `arena` (whose ports are the net's)."""

    def __init__(self, arena: GameInterface, values=(0,), single_threaded=True, alternating=True):
        self.arena = arena
        self.values = tuple(values)
        self.single_threaded = single_threaded
        self.alternating = alternating

    def inputs(self, s, trace):
        moves = opponent_moves(self.arena, trace, self.values,
                               self.single_threaded, self.alternating)
        return [m.message for m in moves]
