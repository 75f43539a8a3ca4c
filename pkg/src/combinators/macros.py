"""
Instruction macros used by the copycat family of engines.

Register layout on arrival: 0 justifier, 1 own pointer, 2 data, 3 scratch.
"""
from src.hram.code import Flip, Free, Get, New

# initial question: fresh cell mapping the new pointer to the question's own
CCI = (Flip(0, 1), New(1, 0, 3))
# non-initial question: follow the justifier's link, record a fresh one
CCQ = (New(1, 1, 3), Get(0, 3, 0))
# answer: follow and free the link
CCA = (Flip(0, 1), Get(0, 3, 1), Free(1))
# initial question entering a composition: keep the outer justifier too
EXI = (Get(0, 3, 0), New(1, 1, 0))
# initial question leaving a composition: re-justify by the outer justifier
EXQ = (Get(None, 0, 0), New(1, 1, 3))
# like CCQ, but carries the link's second slot (a side tag) into the new link
CCQ_TAGGED = (Get(0, 3, 0), New(1, 1, 3))

MACROS = {
    "cci": CCI,
    "ccq": CCQ,
    "cca": CCA,
    "exi": EXI,
    "exq": EXQ,
}
