"""Binary file formats: encoded streams, block codes and sliding encoders.

All integers are big-endian.

Encoded stream (``.scsw``)::

    b"SCSW"  version:u8  mode:u8  sigma:u16
    block:   m:u32
    sliding: p:u8  q:u8  anticipation:u8  flush_symbols:u32
    payload_bits:u64  n_symbols:u64
    symbols, ceil(log2 sigma) bits each (at least 1), MSB first, zero padded
    optional trailer: b"SPEC" length:u32 utf-8 constraint description

Readers that only need the symbols can stop after ``n_symbols`` symbols.
Block-mode streams carry a 64-bit length header in front of the payload
inside the encoded bits; sliding-mode streams pad the payload with zeros to
a multiple of p and rely on ``payload_bits``.

Block code (``b"SCSB"``) and encoder (``b"SCSE"``) files embed the
constraint description so they can be loaded without the original spec.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .block import BlockCode, build_block_code
from .errors import DecodeError, ScsError
from .sliding import Encoder
from .specfile import parse_spec

VERSION = 1
STREAM_MAGIC = b"SCSW"
BLOCK_MAGIC = b"SCSB"
ENCODER_MAGIC = b"SCSE"
TRAILER_MAGIC = b"SPEC"
MODE_BLOCK, MODE_SLIDING = 0, 1
MODE_NAMES = {MODE_BLOCK: "block", MODE_SLIDING: "sliding"}
LENGTH_HEADER_BITS = 64
MAX_STORED_CODEWORDS = 1 << 16


def symbol_width(sigma: int) -> int:
    return max(1, (sigma - 1).bit_length())


# --- bit helpers -------------------------------------------------------------

def bytes_to_bits(data: bytes) -> list[int]:
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8)).tolist()


def bits_to_bytes(bits) -> bytes:
    if len(bits) % 8:
        raise ValueError("bit count is not a multiple of 8")
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes()


def pack_symbols(symbols, sigma: int) -> bytes:
    w = symbol_width(sigma)
    arr = np.asarray(symbols, dtype=np.int64)
    if arr.size and (arr.min() < 0 or arr.max() >= sigma):
        raise ValueError("symbol outside the alphabet")
    shifts = np.arange(w - 1, -1, -1, dtype=np.int64)
    bits = ((arr[:, None] >> shifts) & 1).astype(np.uint8).ravel()
    return np.packbits(bits).tobytes()


def unpack_symbols(data: bytes, sigma: int, n: int) -> list[int]:
    w = symbol_width(sigma)
    need = (n * w + 7) // 8
    if len(data) < need:
        raise DecodeError(f"symbol stream truncated: need {need} bytes, have {len(data)}",
                          offset=len(data))
    bits = np.unpackbits(np.frombuffer(data[:need], dtype=np.uint8))[: n * w]
    weights = 1 << np.arange(w - 1, -1, -1, dtype=np.int64)
    symbols = bits.reshape(n, w).astype(np.int64) @ weights if n else np.zeros(0, np.int64)
    if symbols.size and symbols.max() >= sigma:
        bad = int(np.argmax(symbols >= sigma))
        raise DecodeError(f"symbol value {int(symbols[bad])} outside the alphabet", offset=bad)
    return symbols.tolist()


def frame_block_payload(bits: list[int], bits_per_block: int) -> list[int]:
    """64-bit length header + payload, zero padded to whole blocks."""
    header = [(len(bits) >> (LENGTH_HEADER_BITS - 1 - i)) & 1 for i in range(LENGTH_HEADER_BITS)]
    framed = header + list(bits)
    framed += [0] * (-len(framed) % bits_per_block)
    return framed


def unframe_block_payload(bits: list[int]) -> list[int]:
    if len(bits) < LENGTH_HEADER_BITS:
        raise DecodeError("decoded stream is shorter than the length header", offset=0)
    n = 0
    for b in bits[:LENGTH_HEADER_BITS]:
        n = (n << 1) | b
    if n > len(bits) - LENGTH_HEADER_BITS:
        raise DecodeError(f"length header announces {n} bits, only "
                          f"{len(bits) - LENGTH_HEADER_BITS} present", offset=0)
    return bits[LENGTH_HEADER_BITS : LENGTH_HEADER_BITS + n]


# --- stream container ----------------------------------------------------------

@dataclass(frozen=True)
class Stream:
    mode: int
    sigma: int
    symbols: tuple[int, ...]
    payload_bits: int
    m: int = 0
    p: int = 0
    q: int = 0
    anticipation: int = 0
    flush_symbols: int = 0
    spec_text: str | None = None

    @property
    def mode_name(self) -> str:
        return MODE_NAMES[self.mode]


def write_stream(s: Stream) -> bytes:
    out = [STREAM_MAGIC, struct.pack(">BBH", VERSION, s.mode, s.sigma)]
    if s.mode == MODE_BLOCK:
        out.append(struct.pack(">I", s.m))
    elif s.mode == MODE_SLIDING:
        out.append(struct.pack(">BBBI", s.p, s.q, s.anticipation, s.flush_symbols))
    else:
        raise ValueError(f"unknown mode {s.mode}")
    out.append(struct.pack(">QQ", s.payload_bits, len(s.symbols)))
    out.append(pack_symbols(s.symbols, s.sigma))
    if s.spec_text is not None:
        text = s.spec_text.encode("utf-8")
        out.append(TRAILER_MAGIC + struct.pack(">I", len(text)) + text)
    return b"".join(out)


def _need(data: bytes, pos: int, n: int, what: str) -> None:
    if len(data) < pos + n:
        raise DecodeError(f"truncated {what}", offset=len(data))


def read_stream(data: bytes) -> Stream:
    _need(data, 0, 8, "header")
    if data[:4] != STREAM_MAGIC:
        raise DecodeError("not an encoded stream (bad magic)", offset=0)
    version, mode, sigma = struct.unpack_from(">BBH", data, 4)
    if version != VERSION:
        raise DecodeError(f"unsupported stream version {version}", offset=4)
    pos = 8
    fields = {}
    if mode == MODE_BLOCK:
        _need(data, pos, 4, "header")
        (fields["m"],) = struct.unpack_from(">I", data, pos)
        pos += 4
    elif mode == MODE_SLIDING:
        _need(data, pos, 7, "header")
        fields["p"], fields["q"], fields["anticipation"], fields["flush_symbols"] = \
            struct.unpack_from(">BBBI", data, pos)
        pos += 7
    else:
        raise DecodeError(f"unknown stream mode {mode}", offset=5)
    _need(data, pos, 16, "header")
    payload_bits, n = struct.unpack_from(">QQ", data, pos)
    pos += 16
    if sigma < 2:
        raise DecodeError(f"alphabet size {sigma} in header", offset=6)
    symbols = unpack_symbols(data[pos:], sigma, n)
    pos += (n * symbol_width(sigma) + 7) // 8
    spec_text = None
    if data[pos : pos + 4] == TRAILER_MAGIC:
        _need(data, pos, 8, "trailer")
        (length,) = struct.unpack_from(">I", data, pos + 4)
        _need(data, pos + 8, length, "trailer")
        spec_text = data[pos + 8 : pos + 8 + length].decode("utf-8")
    return Stream(mode, sigma, tuple(symbols), payload_bits, spec_text=spec_text, **fields)


# --- block code files ---------------------------------------------------------------

def write_block_code(code: BlockCode) -> bytes:
    text = code.gamma.describe().encode("utf-8")
    eps = str(code.eps).encode("ascii")
    count = code.size
    count_bytes = count.to_bytes((count.bit_length() + 7) // 8 or 1, "big")
    out = [BLOCK_MAGIC, struct.pack(">BIHH", VERSION, code.m, code.k, code.gamma.alphabet.size),
           struct.pack(">H", len(eps)), eps, struct.pack(">I", len(text)), text,
           struct.pack(">H", len(count_bytes)), count_bytes]
    if count <= MAX_STORED_CODEWORDS:
        out.append(b"\x01")
        flat = [a for w in code.codewords for a in w]
        out.append(pack_symbols(flat, code.gamma.alphabet.size))
    else:
        out.append(b"\x00")
    return b"".join(out)


def read_block_code(data: bytes) -> BlockCode:
    """Rebuild the code and check it against the stored count and list."""
    if data[:4] != BLOCK_MAGIC:
        raise ScsError("not a block code file (bad magic)")
    _need(data, 4, 9, "block code header")
    version, m, k, sigma = struct.unpack_from(">BIHH", data, 4)
    if version != VERSION:
        raise ScsError(f"unsupported block code version {version}")
    pos = 13
    (n,) = struct.unpack_from(">H", data, pos)
    eps = Fraction(data[pos + 2 : pos + 2 + n].decode("ascii"))
    pos += 2 + n
    (n,) = struct.unpack_from(">I", data, pos)
    gamma = parse_spec(data[pos + 4 : pos + 4 + n].decode("utf-8")).gamma
    pos += 4 + n
    (n,) = struct.unpack_from(">H", data, pos)
    count = int.from_bytes(data[pos + 2 : pos + 2 + n], "big")
    pos += 2 + n
    if gamma.k != k or gamma.alphabet.size != sigma:
        raise ScsError("block code header disagrees with its constraint description")
    code = build_block_code(gamma, eps, m, override=True)
    if code.size != count:
        raise ScsError(f"stored code has {count} codewords, rebuilt code has {code.size}")
    if data[pos : pos + 1] == b"\x01":
        flat = unpack_symbols(data[pos + 1 :], sigma, count * m)
        stored = [tuple(flat[i : i + m]) for i in range(0, len(flat), m)]
        if stored != list(code.codewords):
            raise ScsError("stored codeword list differs from the rebuilt code")
    return code


# --- encoder files ------------------------------------------------------------------

def write_encoder(E: Encoder, spec_text: str) -> bytes:
    text = spec_text.encode("utf-8")
    out = [ENCODER_MAGIC,
           struct.pack(">BBBIHBBBII", VERSION, E.p, E.q, E.m, E.alphabet_size, E.anticipation,
                       E.memory, E.lookahead, E.start, E.num_states)]
    for row in E.transitions:
        for label, nxt in row:
            out.append(struct.pack(f">{E.q}HI", *label, nxt))
    out.append(struct.pack(">I", len(text)))
    out.append(text)
    return b"".join(out)


_ENC_HEAD = struct.Struct(">BBBIHBBBII")


def read_encoder(data: bytes) -> tuple[Encoder, str]:
    if data[:4] != ENCODER_MAGIC:
        raise ScsError("not an encoder file (bad magic)")
    _need(data, 4, _ENC_HEAD.size, "encoder header")
    version, p, q, m, sigma, a, memory, lookahead, start, states = \
        _ENC_HEAD.unpack_from(data, 4)
    if version != VERSION:
        raise ScsError(f"unsupported encoder version {version}")
    pos = 4 + _ENC_HEAD.size
    edge = struct.Struct(f">{q}HI")
    _need(data, pos, states * (1 << p) * edge.size, "encoder edges")
    transitions = []
    for _ in range(states):
        row = []
        for _ in range(1 << p):
            *label, nxt = edge.unpack_from(data, pos)
            pos += edge.size
            if nxt >= states or any(x >= sigma for x in label):
                raise ScsError("encoder edge out of range")
            row.append((tuple(label), nxt))
        transitions.append(tuple(row))
    (n,) = struct.unpack_from(">I", data, pos)
    text = data[pos + 4 : pos + 4 + n].decode("utf-8")
    return Encoder(p, q, m, sigma, tuple(transitions), a, memory, lookahead, start), text
