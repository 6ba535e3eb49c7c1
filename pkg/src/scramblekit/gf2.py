"""Bit-packed linear algebra over GF(2).

Rows are stored as little-endian ``uint64`` words: bit ``c`` of a row lives in
word ``c >> 6`` at position ``c & 63``.
"""

from __future__ import annotations

import numba
import numpy as np


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a 2-D 0/1 array along its last axis into uint64 words."""
    bits = np.asarray(bits, dtype=np.uint8)
    rows, cols = bits.shape
    n_words = max(1, (cols + 63) // 64)
    padded = np.zeros((rows, n_words * 64), dtype=np.uint8)
    padded[:, :cols] = bits
    packed = np.packbits(padded.reshape(rows, n_words, 64), axis=2, bitorder="little")
    return packed.view("<u8").reshape(rows, n_words).astype(np.uint64)


def unpack_bits(words: np.ndarray, n_bits: int) -> np.ndarray:
    words = np.ascontiguousarray(words, dtype="<u8")
    rows = words.shape[0]
    raw = np.unpackbits(words.view(np.uint8).reshape(rows, -1), axis=1, bitorder="little")
    return raw[:, :n_bits]


@numba.njit(cache=True)
def rank_packed_inplace(m: np.ndarray, n_bits: int) -> int:
    """Rank of the packed matrix ``m`` (destroys ``m``)."""
    rows, n_words = m.shape
    rank = 0
    for col in range(n_bits):
        if rank == rows:
            break
        w = col >> 6
        bit = np.uint64(1) << np.uint64(col & 63)
        piv = -1
        for r in range(rank, rows):
            if m[r, w] & bit:
                piv = r
                break
        if piv < 0:
            continue
        if piv != rank:
            for k in range(w, n_words):
                tmp = m[piv, k]
                m[piv, k] = m[rank, k]
                m[rank, k] = tmp
        for r in range(piv + 1, rows):
            if m[r, w] & bit:
                for k in range(w, n_words):
                    m[r, k] ^= m[rank, k]
        rank += 1
    return rank


def gf2_rank(bits: np.ndarray) -> int:
    """Rank over GF(2) of a dense 0/1 matrix."""
    bits = np.atleast_2d(np.asarray(bits, dtype=np.uint8))
    if bits.size == 0:
        return 0
    return int(rank_packed_inplace(pack_bits(bits), bits.shape[1]))
