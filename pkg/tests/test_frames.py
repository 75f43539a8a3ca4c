import socket

import pytest

from src.errors import ConnectionLost, ProtocolError
from src.hram.code import EMPTY, Int, Message, Pointer
from src.nominal import atom
from src.runtime.frames import (
    AUDIT_DONE, FRAME_SIZE, SHUTDOWN, control, decode_frame, encode_frame, is_control, read_frame,
)

M = Message(atom(3, 17), (Pointer(atom(1, 2)), EMPTY, Int(-5)))


def test_frame_layout():
    data = encode_frame(M)
    assert len(data) == FRAME_SIZE == 39
    assert data[:4] == (35).to_bytes(4, "big")
    assert data[4:12] == atom(3, 17).to_bytes(8, "big")
    assert data[12] == 1 and data[21] == 0 and data[30] == 2
    assert decode_frame(data) == M


def test_extreme_integers():
    m = Message(atom(1, 1), (Int(-2**63), Int(2**63 - 1), EMPTY))
    assert decode_frame(encode_frame(m)) == m


@pytest.mark.parametrize("m", [
    Message(atom(1, 1), (EMPTY, EMPTY, Int(2**63))),
    Message(atom(1, 1), (Int(-2**63 - 1), EMPTY, EMPTY)),
    Message(atom(1, 1), (Pointer(2**64), EMPTY, EMPTY)),
])
def test_oversized_values_are_rejected(m):
    with pytest.raises(ProtocolError):
        encode_frame(m)


def test_bad_tag():
    data = bytearray(encode_frame(M))
    data[21] = 7
    with pytest.raises(ProtocolError):
        decode_frame(bytes(data))


@pytest.mark.parametrize("data", [
    b"",
    b"\x00" * 38,
    (34).to_bytes(4, "big") + b"\x00" * 35,
])
def test_bad_length(data):
    with pytest.raises(ProtocolError):
        decode_frame(data)


def test_control_messages():
    m = control(AUDIT_DONE, 2, 10, 9)
    assert is_control(m) and not is_control(M)
    assert m.payload == (Int(2), Int(10), Int(9))
    assert control(SHUTDOWN).payload == (EMPTY, EMPTY, EMPTY)


def test_read_frames_from_a_stream():
    a, b = socket.socketpair()
    with a, b:
        a.sendall(encode_frame(M) + encode_frame(control(SHUTDOWN)))
        a.shutdown(socket.SHUT_WR)
        assert read_frame(b) == M
        assert read_frame(b).port == SHUTDOWN
        assert read_frame(b) is None


def test_stream_closed_inside_a_frame():
    a, b = socket.socketpair()
    with a, b:
        a.sendall(encode_frame(M)[:20])
        a.shutdown(socket.SHUT_WR)
        with pytest.raises(ConnectionLost):
            read_frame(b, "B")


def test_stream_with_bad_length():
    a, b = socket.socketpair()
    with a, b:
        a.sendall((12).to_bytes(4, "big") + b"\x00" * 12)
        with pytest.raises(ProtocolError):
            read_frame(b)
