"""Byte-level codecs: varints, length-prefixed strings, and the (M, data) description layout.

All structured inputs and certificates are plain ``bytes``.  Every decoder is
strict: trailing bytes, truncated fields, and non-canonical varints raise
:class:`ParseError`, so that bit-equality coincides with value equality.
"""

from __future__ import annotations

from typing import Sequence

from .errors import ParseError

BOT = b"\x00"
TOP = b"\x01"
FALSE = b"\x00"
TRUE = b"\x01"


def varint(value: int) -> bytes:
    """Unsigned LEB128."""
    if value < 0:
        raise ValueError("varint requires a non-negative integer")
    out = bytearray()
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return bytes(out)


def lp(data: bytes) -> bytes:
    """Length-prefixed byte string."""
    return varint(len(data)) + data


class Reader:
    """Cursor over a byte string with strict field decoders."""

    __slots__ = ("buf", "pos")

    def __init__(self, buf: bytes):
        self.buf = buf
        self.pos = 0

    def varint(self) -> int:
        shift = 0
        value = 0
        start = self.pos
        while True:
            if self.pos >= len(self.buf):
                raise ParseError("truncated varint")
            byte = self.buf[self.pos]
            self.pos += 1
            value |= (byte & 0x7F) << shift
            if not byte & 0x80:
                break
            shift += 7
        # reject overlong encodings such as b"\x80\x00"
        if self.pos - start > 1 and self.buf[self.pos - 1] == 0:
            raise ParseError("non-canonical varint")
        return value

    def byte(self) -> int:
        if self.pos >= len(self.buf):
            raise ParseError("truncated byte")
        b = self.buf[self.pos]
        self.pos += 1
        return b

    def take(self, count: int) -> bytes:
        if self.pos + count > len(self.buf):
            raise ParseError("truncated field")
        out = self.buf[self.pos:self.pos + count]
        self.pos += count
        return out

    def lp(self) -> bytes:
        return self.take(self.varint())

    def done(self) -> bool:
        return self.pos == len(self.buf)

    def finish(self) -> None:
        if self.pos != len(self.buf):
            raise ParseError(f"{len(self.buf) - self.pos} trailing bytes")


def decode_varint(data: bytes) -> int:
    r = Reader(data)
    value = r.varint()
    r.finish()
    return value


def encode_uint(value: int) -> bytes:
    """Minimal big-endian encoding; zero is the empty string."""
    if value < 0:
        raise ValueError("negative integer")
    return value.to_bytes((value.bit_length() + 7) // 8, "big")


def decode_uint(data: bytes) -> int:
    """Any byte string read as a big-endian non-negative integer."""
    return int.from_bytes(data, "big")


def shortlex_rank(data: bytes) -> int:
    """Position of ``data`` in the shortlex enumeration b'', b'\\x00', ..., b'\\xff', b'\\x00\\x00', ...

    This is a bijection between byte strings and the non-negative integers.
    """
    length = len(data)
    shorter = (256 ** length - 1) // 255
    return shorter + int.from_bytes(data, "big")


def shortlex_unrank(rank: int) -> bytes:
    if rank < 0:
        raise ValueError("negative rank")
    length = 0
    while rank >= 256 ** length:
        rank -= 256 ** length
        length += 1
    return rank.to_bytes(length, "big")


def bit_length(value: int) -> int:
    """Length of the binary encoding without leading zeros; ``|0| = 1``."""
    return max(1, value.bit_length())


# -- (M, data) descriptions ------------------------------------------------
#
# Layout: varint m, ceil(m*m/8) bytes of the row-major adjacency matrix
# (most significant bit first, padding bits zero), then m length-prefixed
# data entries.  A DescriptionCert appends a varint index in 1..m.


def encode_matrix(matrix: Sequence[Sequence[int]]) -> bytes:
    m = len(matrix)
    bits = bytearray((m * m + 7) // 8)
    for i in range(m):
        for j in range(m):
            if matrix[i][j]:
                k = i * m + j
                bits[k // 8] |= 0x80 >> (k % 8)
    return bytes(bits)


def read_matrix(r: Reader, m: int) -> tuple[tuple[int, ...], ...]:
    raw = r.take((m * m + 7) // 8)
    rows = []
    for i in range(m):
        row = []
        for j in range(m):
            k = i * m + j
            row.append(1 if raw[k // 8] & (0x80 >> (k % 8)) else 0)
        rows.append(tuple(row))
    total = m * m
    if total % 8:
        # padding bits must be clear
        if raw[-1] & ((1 << (8 - total % 8)) - 1):
            raise ParseError("non-zero matrix padding")
    return tuple(rows)


def encode_md(matrix: Sequence[Sequence[int]], data: Sequence[bytes]) -> bytes:
    if len(data) != len(matrix):
        raise ValueError("matrix and data sizes differ")
    return varint(len(matrix)) + encode_matrix(matrix) + b"".join(lp(d) for d in data)


def read_md(r: Reader) -> tuple[tuple[tuple[int, ...], ...], tuple[bytes, ...]]:
    """Read an (M, data) pair and validate that M is symmetric with zero diagonal."""
    m = r.varint()
    if m == 0:
        raise ParseError("empty description")
    matrix = read_matrix(r, m)
    for i in range(m):
        if matrix[i][i]:
            raise ParseError("self-loop in description")
        for j in range(i + 1, m):
            if matrix[i][j] != matrix[j][i]:
                raise ParseError("asymmetric description matrix")
    data = tuple(r.lp() for _ in range(m))
    return matrix, data
