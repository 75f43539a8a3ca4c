"""
Wire frames for messages crossing node boundaries.

A frame is a u32 body length followed by the body: the u64 destination
port atom and three data slots of one tag byte (0 empty, 1 pointer,
2 integer) and an 8-byte big-endian payload. Every frame is FRAME_SIZE
bytes on the wire.
"""
import socket
import struct

from src.config import CONTROL_TAG
from src.errors import ConnectionLost, ProtocolError
from src.hram.code import EMPTY, Int, Message, Pointer
from src.nominal import atom

LENGTH = struct.Struct(">I")
PORT = struct.Struct(">Q")
SLOT_POINTER = struct.Struct(">BQ")
SLOT_INT = struct.Struct(">Bq")

TAG_EMPTY, TAG_POINTER, TAG_INT = 0, 1, 2
BODY_SIZE = PORT.size + 3 * SLOT_POINTER.size
FRAME_SIZE = LENGTH.size + BODY_SIZE

# Control ports live under their own node tag and never appear in a net.
SHUTDOWN = atom(CONTROL_TAG, 1)
AUDIT_REQUEST = atom(CONTROL_TAG, 2)
AUDIT_REPLY = atom(CONTROL_TAG, 3)
AUDIT_DONE = atom(CONTROL_TAG, 4)
FAULT_REPORT = atom(CONTROL_TAG, 5)
CONTROL_PORTS = frozenset({SHUTDOWN, AUDIT_REQUEST, AUDIT_REPLY, AUDIT_DONE, FAULT_REPORT})


def is_control(m: Message):
    return m.port in CONTROL_PORTS


def encode_frame(m: Message) -> bytes:
    try:
        parts = [LENGTH.pack(BODY_SIZE), PORT.pack(m.port)]
        for d in m.payload:
            if d is EMPTY:
                parts.append(SLOT_POINTER.pack(TAG_EMPTY, 0))
            elif isinstance(d, Pointer):
                parts.append(SLOT_POINTER.pack(TAG_POINTER, d.name))
            elif isinstance(d, Int):
                parts.append(SLOT_INT.pack(TAG_INT, d.value))
            else:
                raise ProtocolError(f"cannot encode data item {d!r}")
    except struct.error as e:
        raise ProtocolError(f"message {m} does not fit a frame: {e}") from None
    return b"".join(parts)


def decode_frame(data: bytes) -> Message:
    if len(data) != FRAME_SIZE:
        raise ProtocolError(f"frame of {len(data)} bytes, expected {FRAME_SIZE}")
    (length,) = LENGTH.unpack_from(data, 0)
    if length != BODY_SIZE:
        raise ProtocolError(f"frame announces a body of {length} bytes, expected {BODY_SIZE}")
    (port,) = PORT.unpack_from(data, LENGTH.size)
    payload = []
    offset = LENGTH.size + PORT.size
    for _ in range(3):
        tag = data[offset]
        if tag == TAG_EMPTY:
            payload.append(EMPTY)
        elif tag == TAG_POINTER:
            payload.append(Pointer(SLOT_POINTER.unpack_from(data, offset)[1]))
        elif tag == TAG_INT:
            payload.append(Int(SLOT_INT.unpack_from(data, offset)[1]))
        else:
            raise ProtocolError(f"unknown slot tag {tag}")
        offset += SLOT_POINTER.size
    return Message(port, tuple(payload))


def _recv_exactly(sock: socket.socket, size: int, node) -> bytes:
    chunks = []
    remaining = size
    while remaining:
        chunk = sock.recv(remaining)
        if not chunk:
            if remaining == size and not chunks:
                return b""
            raise ConnectionLost(node, "stream closed inside a frame")
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


def read_frame(sock: socket.socket, node="?"):
    """Next message on `sock`, or None when the peer closed cleanly."""
    head = _recv_exactly(sock, LENGTH.size, node)
    if not head:
        return None
    (length,) = LENGTH.unpack(head)
    if length != BODY_SIZE:
        raise ProtocolError(f"frame announces a body of {length} bytes, expected {BODY_SIZE}")
    body = _recv_exactly(sock, length, node)
    if len(body) != length:
        raise ConnectionLost(node, "stream closed inside a frame")
    return decode_frame(head + body)


def control(port, *values) -> Message:
    """A control message carrying up to three integers."""
    payload = [Int(v) for v in values] + [EMPTY] * (3 - len(values))
    return Message(port, tuple(payload))
