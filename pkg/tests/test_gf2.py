import itertools

import numpy as np
import pytest

from scramblekit.gf2 import gf2_rank, pack_bits, unpack_bits


def span_rank(bits):
    """log2 of the number of distinct GF(2) combinations of the rows."""
    rows = [int("".join(map(str, r)), 2) for r in bits]
    span = set()
    for coeffs in itertools.product((0, 1), repeat=len(rows)):
        v = 0
        for c, r in zip(coeffs, rows):
            if c:
                v ^= r
        span.add(v)
    return int(np.log2(len(span)))


@pytest.mark.parametrize("shape", [(1, 1), (3, 5), (6, 6), (8, 3), (9, 70), (10, 130)])
def test_rank_matches_span_enumeration(shape):
    rng = np.random.default_rng(sum(shape))
    for density in (0.1, 0.5, 0.9):
        bits = (rng.random(shape) < density).astype(np.uint8)
        assert gf2_rank(bits) == span_rank(bits)


def test_rank_of_dependent_rows():
    a = np.array([[1, 0, 1], [0, 1, 1], [1, 1, 0]], dtype=np.uint8)
    assert gf2_rank(a) == 2
    assert gf2_rank(np.zeros((4, 4), dtype=np.uint8)) == 0
    assert gf2_rank(np.eye(100, dtype=np.uint8)) == 100


def test_pack_roundtrip_across_word_boundary():
    rng = np.random.default_rng(0)
    bits = rng.integers(0, 2, size=(5, 131)).astype(np.uint8)
    packed = pack_bits(bits)
    assert packed.shape == (5, 3)
    assert np.array_equal(unpack_bits(packed, 131), bits)
    assert int(pack_bits(np.array([[0] * 64 + [1]], dtype=np.uint8))[0, 1]) == 1
