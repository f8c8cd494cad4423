"""The SEBQ block cipher.

Key generation from random Latin squares of power-of-two order, the
per-block encrypt/decrypt maps with their chained leader state, the
whole-message double-loop kernels, and the bit-packing / padding plumbing
that connects k-bit symbols to byte streams.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from sebq.latin import LatinSquare, Quasigroup, SeedLike, random_latin_square

__all__ = [
    "MAX_SYMBOL_BITS",
    "PaddingError",
    "SebqKey",
    "CipherState",
    "keygen",
    "encrypt_block",
    "decrypt_block",
    "encrypt",
    "decrypt",
    "pack_bits",
    "unpack_bits",
    "pad",
    "unpad",
]

# an order-256 table is 64 KiB; 2**16 would be gigabytes
MAX_SYMBOL_BITS = 8


class PaddingError(ValueError):
    """Unpadding failed: no terminating 1 bit in the padded tail."""


@dataclass(frozen=True)
class SebqKey:
    """Secret key: a quasigroup of order ``2**k`` over k-bit symbols."""

    q: Quasigroup
    k: int

    def __post_init__(self):
        if not 1 <= self.k <= MAX_SYMBOL_BITS:
            raise ValueError(f"k must be in 1..{MAX_SYMBOL_BITS}, got {self.k}")
        if self.q.order != 1 << self.k:
            raise ValueError(f"key order {self.q.order} does not match k={self.k}")

    @property
    def order(self) -> int:
        return self.q.order

    @classmethod
    def from_square(cls, square: LatinSquare) -> "SebqKey":
        k = square.order.bit_length() - 1
        if square.order != 1 << k:
            raise ValueError("key square order must be a power of two")
        return cls(Quasigroup.from_square(square), k)


@dataclass(frozen=True)
class CipherState:
    """The evolving leader vector threaded through block-by-block operation."""

    leader: tuple[int, ...]

    def __post_init__(self):
        if not self.leader:
            raise ValueError("leader must hold at least one block")
        object.__setattr__(self, "leader", tuple(int(b) for b in self.leader))

    @property
    def n(self) -> int:
        return len(self.leader)


def keygen(k: int, seed: SeedLike = None) -> SebqKey:
    """Generate a random key over k-bit symbols (order ``2**k`` table).

    Deterministic for a fixed seed; ``1 <= k <= 8``.
    """
    if not 1 <= k <= MAX_SYMBOL_BITS:
        raise ValueError(f"k must be in 1..{MAX_SYMBOL_BITS}, got {k}")
    square = random_latin_square(1 << k, seed)
    return SebqKey(Quasigroup.from_square(square), k)


def _check_blocks(key: SebqKey, blocks: Sequence[int], what: str) -> None:
    if blocks and not (0 <= min(blocks) and max(blocks) < key.order):
        bad = next(b for b in blocks if not 0 <= b < key.order)
        raise ValueError(f"{what} symbol {bad} out of range 0..{key.order - 1}")


def encrypt_block(key: SebqKey, m: int, state: CipherState) -> tuple[int, CipherState]:
    """Encrypt one block: fold through the leader, then advance the leader."""
    _check_blocks(key, (m,), "message")
    _check_blocks(key, state.leader, "state")
    mul = key.q.mul_rows
    acc = m
    chain = []
    x = 0
    for r in state.leader:
        acc = mul[r][acc]
        chain.append(acc)
        x ^= acc
    chain[-1] = x
    return acc, CipherState(tuple(chain))


def decrypt_block(key: SebqKey, c: int, state: CipherState) -> tuple[int, CipherState]:
    """Invert :func:`encrypt_block`; the returned state matches the encrypt side."""
    _check_blocks(key, (c,), "ciphertext")
    _check_blocks(key, state.leader, "state")
    ldiv = key.q.ldiv_rows
    leader = state.leader
    n = len(leader)
    chain = [0] * n
    u = c
    x = c
    for i in range(n - 1, 0, -1):
        u = ldiv[leader[i]][u]
        chain[i - 1] = u
        x ^= u
    m = ldiv[leader[0]][u]
    chain[-1] = x
    return m, CipherState(tuple(chain))


def encrypt(key: SebqKey, iv: Sequence[int], message: Sequence[int]) -> list[int]:
    """Encrypt a block sequence under an initial leader vector.

    Runs the chained double loop: per message block, fold through the
    current leader while recording the chain, emit the last chain value as
    ciphertext, then XOR-checksum the chain into the next leader.  The
    ``iv`` itself is unmodified and must travel with the ciphertext.
    """
    if not iv:
        raise ValueError("iv must hold at least one block")
    _check_blocks(key, iv, "iv")
    _check_blocks(key, message, "message")
    mul = key.q.mul_rows
    state = list(iv)
    n = len(state)
    last = n - 1
    out = []
    append = out.append
    for m in message:
        acc = m
        x = 0
        for i in range(n):
            acc = mul[state[i]][acc]
            state[i] = acc
            x ^= acc
        append(acc)
        state[last] = x
    return out


def decrypt(key: SebqKey, iv: Sequence[int], ciphertext: Sequence[int]) -> list[int]:
    """Invert :func:`encrypt` for the same key and IV.

    Rebuilds the encrypt-side chain from the top down with the
    left-division table, so the internal state sequence matches the
    encrypt run block for block.
    """
    if not iv:
        raise ValueError("iv must hold at least one block")
    _check_blocks(key, iv, "iv")
    _check_blocks(key, ciphertext, "ciphertext")
    ldiv = key.q.ldiv_rows
    state = list(iv)
    n = len(state)
    out = []
    append = out.append
    for c in ciphertext:
        new = [0] * n
        u = c
        x = c
        for i in range(n - 1, 0, -1):
            u = ldiv[state[i]][u]
            new[i - 1] = u
            x ^= u
        append(ldiv[state[0]][u])
        new[n - 1] = x
        state = new
    return out


def _check_k(k: int) -> None:
    if not 1 <= k <= MAX_SYMBOL_BITS:
        raise ValueError(f"k must be in 1..{MAX_SYMBOL_BITS}, got {k}")


def pack_bits(blocks: Sequence[int], k: int) -> bytes:
    """Pack k-bit symbols into bytes, most significant bit first, contiguous."""
    _check_k(k)
    arr = np.asarray(blocks, dtype=np.int64)
    if arr.size == 0:
        return b""
    if arr.min() < 0 or arr.max() >= 1 << k:
        raise ValueError(f"block value out of range for k={k}")
    shifts = np.arange(k - 1, -1, -1)
    bits = ((arr[:, None] >> shifts) & 1).astype(np.uint8).ravel()
    return np.packbits(bits).tobytes()


def unpack_bits(data: bytes, k: int, count: int) -> list[int]:
    """Inverse of :func:`pack_bits`: read ``count`` k-bit symbols."""
    _check_k(k)
    if count < 0:
        raise ValueError("count must be non-negative")
    if count == 0:
        return []
    need = k * count
    if len(data) * 8 < need:
        raise ValueError(f"need {need} bits, have {len(data) * 8}")
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), count=need)
    weights = 1 << np.arange(k - 1, -1, -1, dtype=np.int64)
    return (bits.reshape(count, k) @ weights).tolist()


def pad(bits: Sequence[int], k: int) -> list[int]:
    """Append a 1 bit then 0 bits up to the next k-bit boundary; emit blocks.

    Always appends at least one bit, so aligned input grows by one full
    block and removal is unambiguous.
    """
    _check_k(k)
    arr = np.asarray(bits, dtype=np.uint8)
    if arr.size and arr.max() > 1:
        raise ValueError("bits must be 0 or 1")
    tail = (-(arr.size + 1)) % k
    padded = np.concatenate([arr, np.ones(1, dtype=np.uint8), np.zeros(tail, dtype=np.uint8)])
    weights = 1 << np.arange(k - 1, -1, -1, dtype=np.int64)
    return (padded.reshape(-1, k) @ weights).tolist()


def unpad(blocks: Sequence[int], k: int) -> np.ndarray:
    """Strip one ``1 0*`` suffix from the bit expansion of ``blocks``.

    Raises :class:`PaddingError` when no 1 bit terminates the data.
    """
    _check_k(k)
    arr = np.asarray(blocks, dtype=np.int64)
    if arr.size == 0:
        raise PaddingError("no data to unpad")
    if arr.min() < 0 or arr.max() >= 1 << k:
        raise ValueError(f"block value out of range for k={k}")
    shifts = np.arange(k - 1, -1, -1)
    bits = ((arr[:, None] >> shifts) & 1).astype(np.uint8).ravel()
    ones = np.nonzero(bits)[0]
    if ones.size == 0:
        raise PaddingError("malformed padding: no terminating 1 bit")
    return bits[: ones[-1]]
