"""On-disk formats: the text key file and the binary cipher frame.

Key file (ASCII): line 1 is the literal header ``SEBQ-LSQ v1``, line 2 the
decimal order, then ``n`` lines of ``n`` space-separated decimal symbols.
Loading rejects anything that is not a Latin square.

Cipher frame (big-endian): magic ``SEBQ``, version byte, ``k`` (1 byte),
``n`` (2 bytes), then for version 2 the expander length ``a`` (2 bytes) and
an expander identifier byte, then the plaintext bit length (8 bytes), the
packed IV (``ceil(n*k/8)`` bytes), and the packed ciphertext payload.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import numpy as np

from sebq import feistel
from sebq.cipher import (
    PaddingError,
    SebqKey,
    decrypt,
    encrypt,
    pack_bits,
    pad,
    unpack_bits,
    unpad,
)
from sebq.latin import LatinSquare, SeedLike, as_rng, validate_latin_square

__all__ = [
    "KEY_HEADER",
    "FRAME_MAGIC",
    "FRAME_V1",
    "FRAME_V2",
    "EXPANDER_SPONGE",
    "EXPANDER_EXTERNAL",
    "FrameError",
    "BadMagic",
    "KeyMismatch",
    "KeyFileError",
    "CipherFrame",
    "key_to_text",
    "key_from_text",
    "save_key",
    "load_key",
    "key_fingerprint",
    "encode_frame",
    "decode_frame",
    "seal_bytes",
    "open_bytes",
]

KEY_HEADER = "SEBQ-LSQ v1"
FRAME_MAGIC = b"SEBQ"
FRAME_V1 = 0x01
FRAME_V2 = 0x02
EXPANDER_SPONGE = 0x00
EXPANDER_EXTERNAL = 0x01

_FIXED_V1 = struct.Struct(">4sBBHQ")
_FIXED_V2 = struct.Struct(">4sBBHHBQ")


class FrameError(ValueError):
    """Frame bytes are structurally unusable."""


class BadMagic(FrameError):
    """Frame does not start with the SEBQ magic."""


class KeyMismatch(FrameError):
    """Frame symbol width disagrees with the supplied key."""


class KeyFileError(ValueError):
    """Key file is missing, malformed, or fails the Latin-square check."""


def key_to_text(key: SebqKey) -> str:
    lines = [KEY_HEADER, str(key.order)]
    for row in key.q.mul.to_lists():
        lines.append(" ".join(str(v) for v in row))
    return "\n".join(lines) + "\n"


def key_from_text(text: str) -> SebqKey:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != KEY_HEADER:
        raise KeyFileError(f"missing key header {KEY_HEADER!r}")
    try:
        order = int(lines[1].strip())
    except (IndexError, ValueError):
        raise KeyFileError("missing or non-numeric order line") from None
    rows = lines[2:]
    if len(rows) != order:
        raise KeyFileError(f"expected {order} table rows, found {len(rows)}")
    try:
        table = [[int(v) for v in row.split()] for row in rows]
    except ValueError:
        raise KeyFileError("non-integer table entry") from None
    if any(len(r) != order for r in table):
        raise KeyFileError("ragged table row")
    try:
        violation = validate_latin_square(table)
    except ValueError as exc:
        raise KeyFileError(str(exc)) from None
    if violation is not None:
        raise KeyFileError(
            f"not a Latin square: symbol {violation.symbol} repeats in "
            f"{violation.axis} {violation.index}"
        )
    try:
        return SebqKey.from_square(LatinSquare(table))
    except ValueError as exc:
        raise KeyFileError(str(exc)) from None


def save_key(path, key: SebqKey) -> None:
    with open(path, "w", encoding="ascii") as fp:
        fp.write(key_to_text(key))


def load_key(path) -> SebqKey:
    try:
        with open(path, "r", encoding="ascii") as fp:
            return key_from_text(fp.read())
    except OSError as exc:
        raise KeyFileError(f"cannot read key file: {exc}") from None


def key_fingerprint(key: SebqKey) -> str:
    """SHA-256 of the canonical key file text, hex-truncated to 16 chars."""
    return hashlib.sha256(key_to_text(key).encode("ascii")).hexdigest()[:16]


@dataclass(frozen=True)
class CipherFrame:
    """Parsed frame header plus payload, independent of any key."""

    version: int
    k: int
    n: int
    bit_length: int
    iv: tuple[int, ...]
    payload: bytes
    a: int = 0
    expander_id: int = 0

    @property
    def payload_blocks(self) -> int:
        # 10* padding always adds at least one bit
        return (self.bit_length + 1 + self.k - 1) // self.k


def _padded_block_count(bit_length: int, k: int) -> int:
    return (bit_length + 1 + k - 1) // k


def encode_frame(
    key: SebqKey,
    iv: tuple[int, ...] | list[int],
    bit_length: int,
    payload: bytes,
    *,
    a: int | None = None,
    expander_id: int = EXPANDER_SPONGE,
) -> bytes:
    """Assemble frame bytes; ``a`` switches the header to version 2."""
    n = len(iv)
    if not 1 <= n <= 0xFFFF:
        raise ValueError("iv block count must fit in 16 bits and be positive")
    iv_bytes = pack_bits(list(iv), key.k)
    if a is None:
        head = _FIXED_V1.pack(FRAME_MAGIC, FRAME_V1, key.k, n, bit_length)
    else:
        if not 1 < a <= 0xFFFF:
            raise ValueError("expander length a must be in 2..65535")
        head = _FIXED_V2.pack(FRAME_MAGIC, FRAME_V2, key.k, n, a, expander_id, bit_length)
    return head + iv_bytes + payload


def decode_frame(data: bytes) -> CipherFrame:
    if len(data) < 5 or data[:4] != FRAME_MAGIC:
        raise BadMagic("not a SEBQ frame")
    version = data[4]
    if version == FRAME_V1:
        if len(data) < _FIXED_V1.size:
            raise FrameError("truncated frame header")
        _, _, k, n, bit_length = _FIXED_V1.unpack_from(data)
        a = 0
        expander_id = 0
        offset = _FIXED_V1.size
    elif version == FRAME_V2:
        if len(data) < _FIXED_V2.size:
            raise FrameError("truncated frame header")
        _, _, k, n, a, expander_id, bit_length = _FIXED_V2.unpack_from(data)
        offset = _FIXED_V2.size
    else:
        raise FrameError(f"unsupported frame version {version}")
    if not 1 <= k <= 8 or n < 1:
        raise FrameError(f"bad frame parameters k={k} n={n}")
    iv_len = (n * k + 7) // 8
    blocks = _padded_block_count(bit_length, k)
    payload_len = (blocks * k + 7) // 8
    if len(data) != offset + iv_len + payload_len:
        raise FrameError(
            f"frame length {len(data)} != expected {offset + iv_len + payload_len}"
        )
    iv = tuple(unpack_bits(data[offset : offset + iv_len], k, n))
    payload = data[offset + iv_len :]
    return CipherFrame(version, k, n, bit_length, iv, payload, a, expander_id)


def seal_bytes(
    key: SebqKey,
    data: bytes,
    *,
    n: int = 8,
    seed: SeedLike = None,
    iv: list[int] | None = None,
    scheme: str = "plain",
    a: int | None = None,
) -> bytes:
    """Encrypt raw bytes into a frame.

    The IV is drawn from ``seed`` unless given explicitly; ``scheme`` is
    ``"plain"`` (version 1) or ``"cca2"`` (version 2, leader vectors pass
    through the keyed expander, ``a`` defaults to ``2*n``).
    """
    rng = as_rng(seed)
    if iv is None:
        iv = [rng.randrange(key.order) for _ in range(n)]
    else:
        iv = list(iv)
        n = len(iv)
    bits = _bytes_to_bits(data)
    blocks = pad(bits, key.k)
    if scheme == "plain":
        ct = encrypt(key, iv, blocks)
        return encode_frame(key, iv, len(bits), pack_bits(ct, key.k))
    if scheme == "cca2":
        if a is None:
            a = 2 * n
        cca2 = feistel.Cca2Key(key, feistel.QuasigroupSponge(key.q, a))
        ct = feistel.encrypt_cca2(cca2, iv, blocks)
        return encode_frame(
            key, iv, len(bits), pack_bits(ct, key.k), a=a, expander_id=EXPANDER_SPONGE
        )
    raise ValueError(f"unknown scheme {scheme!r}")


def open_bytes(key: SebqKey, frame_bytes: bytes) -> bytes:
    """Decrypt a frame produced by :func:`seal_bytes` back to raw bytes."""
    frame = decode_frame(frame_bytes)
    if frame.k != key.k:
        raise KeyMismatch(f"frame k={frame.k} but key k={key.k}")
    ct = unpack_bits(frame.payload, frame.k, frame.payload_blocks)
    if frame.version == FRAME_V1:
        blocks = decrypt(key, list(frame.iv), ct)
    else:
        if frame.expander_id != EXPANDER_SPONGE:
            raise FrameError(
                f"expander 0x{frame.expander_id:02x} requires an external plug-in"
            )
        cca2 = feistel.Cca2Key(key, feistel.QuasigroupSponge(key.q, frame.a))
        blocks = feistel.decrypt_cca2(cca2, list(frame.iv), ct)
    bits = unpad(blocks, frame.k)
    if bits.size != frame.bit_length:
        raise PaddingError(
            f"recovered {bits.size} plaintext bits, header says {frame.bit_length}"
        )
    return _bits_to_bytes(bits)


def _bytes_to_bits(data: bytes) -> np.ndarray:
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8))


def _bits_to_bytes(bits: np.ndarray) -> bytes:
    if bits.size % 8:
        raise FrameError("plaintext bit length is not byte-aligned")
    return np.packbits(bits).tobytes()
