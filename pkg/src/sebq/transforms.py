"""Quasigroup string transformations.

The chained block maps the cipher is built from: a forward fold that
encrypts one block under a leader vector, its reversed-fold inverse, and
the leader-update rules that thread state from block to block.  Block
symbols are plain ints in ``0..order-1``; leaders and messages are
sequences of such ints.
"""

from __future__ import annotations

from typing import Sequence

from sebq.latin import Quasigroup

__all__ = [
    "fold_apply",
    "fold_reverse",
    "xor_checksum",
    "leader_update_enc",
    "leader_update_dec",
    "e_transform",
    "d_transform",
]


def _check_symbol(q: Quasigroup, s: int, what: str) -> None:
    if not 0 <= s < q.order:
        raise ValueError(f"{what} symbol {s} out of range 0..{q.order - 1}")


def _check_vector(q: Quasigroup, v: Sequence[int], what: str) -> None:
    if v and not (0 <= min(v) and max(v) < q.order):
        for s in v:
            _check_symbol(q, s, what)


def fold_apply(q: Quasigroup, beta: Sequence[int], a: int) -> int:
    """Left-fold ``a`` through the leader: ``b_n * (... * (b_2 * (b_1 * a)))``.

    An empty leader is the identity map.
    """
    _check_symbol(q, a, "input")
    _check_vector(q, beta, "leader")
    mul = q.mul_rows
    acc = a
    for b in beta:
        acc = mul[b][acc]
    return acc


def fold_reverse(q: Quasigroup, beta: Sequence[int], c: int) -> int:
    """Inverse of :func:`fold_apply`: ``b_1 \\ (b_2 \\ (... (b_n \\ c)))``."""
    _check_symbol(q, c, "input")
    _check_vector(q, beta, "leader")
    ldiv = q.ldiv_rows
    acc = c
    for b in reversed(beta):
        acc = ldiv[b][acc]
    return acc


def xor_checksum(v: Sequence[int]) -> list[int]:
    """Copy ``v`` with the last block replaced by the XOR of all blocks."""
    if not v:
        raise ValueError("checksum of an empty vector")
    out = list(v)
    x = 0
    for b in out:
        x ^= b
    out[-1] = x
    return out


def leader_update_enc(q: Quasigroup, a: int, delta: Sequence[int]) -> list[int]:
    """Leader evolution on the encrypt side.

    Replaces the leader with the chain of partial folds of ``a`` through it
    (``d_i = b_i * d_{i-1}`` with ``d_0 = a``), then applies
    :func:`xor_checksum` to the last position.
    """
    if not delta:
        raise ValueError("empty leader")
    _check_symbol(q, a, "input")
    _check_vector(q, delta, "leader")
    mul = q.mul_rows
    acc = a
    out = []
    x = 0
    for b in delta:
        acc = mul[b][acc]
        out.append(acc)
        x ^= acc
    out[-1] = x
    return out


def leader_update_dec(q: Quasigroup, c: int, delta: Sequence[int]) -> list[int]:
    """Leader evolution on the decrypt side.

    Rebuilds the same chain values the encrypt side produced: walking the
    leader backwards, ``u_{i-1} = b_i \\ u_i`` with ``u_n = c``, the new
    leader is ``(u_1, ..., u_{n-1}, c)`` followed by :func:`xor_checksum`.
    Paired encrypt/decrypt runs therefore carry identical leaders.
    """
    if not delta:
        raise ValueError("empty leader")
    _check_symbol(q, c, "input")
    _check_vector(q, delta, "leader")
    ldiv = q.ldiv_rows
    n = len(delta)
    out = [0] * n
    u = c
    x = c
    for i in range(n - 1, 0, -1):
        u = ldiv[delta[i]][u]
        out[i - 1] = u
        x ^= u
    out[-1] = x
    return out


def e_transform(
    q: Quasigroup, leader: Sequence[int], alpha: Sequence[int]
) -> tuple[list[int], list[int]]:
    """Encrypt a block string under an evolving leader.

    Each block is folded through the current leader
    (:func:`fold_apply`) and the leader is advanced with
    :func:`leader_update_enc`.  Returns ``(cipher, final_leader)``; an
    empty input returns the leader unchanged.
    """
    if not leader:
        raise ValueError("empty leader")
    state = list(leader)
    out = []
    for a in alpha:
        out.append(fold_apply(q, state, a))
        state = leader_update_enc(q, a, state)
    return out, state


def d_transform(
    q: Quasigroup, leader: Sequence[int], gamma: Sequence[int]
) -> tuple[list[int], list[int]]:
    """Inverse of :func:`e_transform`: ``(plain, final_leader)``.

    Uses the reversed fold per block and :func:`leader_update_dec` for the
    state, so the final leader matches the paired encrypt run.
    """
    if not leader:
        raise ValueError("empty leader")
    state = list(leader)
    out = []
    for c in gamma:
        out.append(fold_reverse(q, state, c))
        state = leader_update_dec(q, c, state)
    return out, state
