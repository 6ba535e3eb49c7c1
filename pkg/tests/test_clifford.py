import numpy as np
import pytest
from scipy import stats

from scramblekit.clifford import (
    GENERATORS,
    GROUP_ORDER,
    Clifford2,
    action_tables,
    sample_clifford2,
    symplectic_maps,
    symplectic_product,
)
from scramblekit.oracle import clifford_unitary, pauli_matrix


def test_group_sizes():
    maps = symplectic_maps()
    assert len(maps) == 720
    assert len(set(maps)) == 720
    assert maps[0] == GENERATORS


def test_index_zero_is_identity():
    g = Clifford2(0)
    for v in range(16):
        assert g.act(v) == (v, 0)


def test_actions_preserve_commutation():
    image, _ = action_tables()
    rng = np.random.default_rng(1)
    for k in rng.integers(GROUP_ORDER, size=200):
        for u in range(16):
            for v in range(16):
                assert symplectic_product(int(image[k, u]), int(image[k, v])) == symplectic_product(u, v)


def test_all_elements_distinct():
    image, sign = action_tables()
    keys = {bytes(image[k]) + bytes(sign[k]) for k in range(GROUP_ORDER)}
    assert len(keys) == GROUP_ORDER


@pytest.mark.parametrize("k", [0, 1, 17, 515, 4000, 9999, 11519])
def test_unitary_conjugation_matches_table(k):
    u = clifford_unitary(k)
    assert np.allclose(u.conj().T @ u, np.eye(4))
    g = Clifford2(k)
    for v in range(16):
        w, s = g.act(v)
        assert np.allclose(u @ pauli_matrix(v) @ u.conj().T, pauli_matrix(w, s))


def _same_up_to_phase(a, b):
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    phase = a[idx] / b[idx]
    return np.allclose(a, phase * b)


def test_composition_and_inverse():
    rng = np.random.default_rng(7)
    for _ in range(30):
        a, b = (Clifford2(int(v)) for v in rng.integers(GROUP_ORDER, size=2))
        ab = a.then(b)
        assert _same_up_to_phase(clifford_unitary(ab.index), clifford_unitary(b.index) @ clifford_unitary(a.index))
        assert a.then(a.inverse()).is_identity()
        assert a.inverse().then(a).is_identity()


def test_sampler_is_deterministic_and_bounded():
    assert sample_clifford2(5) == sample_clifford2(5)
    with pytest.raises(ValueError):
        Clifford2(GROUP_ORDER)


def test_sampler_stream_reproducible():
    a = [sample_clifford2(np.random.default_rng(3)).index for _ in range(3)]
    assert len(set(a)) == 1
    rng1, rng2 = np.random.default_rng(11), np.random.default_rng(11)
    assert [sample_clifford2(rng1).index for _ in range(50)] == [sample_clifford2(rng2).index for _ in range(50)]


def test_histogram_of_million_draws_within_poisson_bands():
    rng = np.random.default_rng(99)
    draws = np.fromiter((sample_clifford2(rng).index for _ in range(10**6)), dtype=np.int64, count=10**6)
    counts = np.bincount(draws, minlength=GROUP_ORDER)
    expected = 10**6 / GROUP_ORDER
    assert np.all(np.abs(counts - expected) < 5 * np.sqrt(expected))
    chi2 = ((counts - expected) ** 2 / expected).sum()
    assert stats.chi2.sf(chi2, GROUP_ORDER - 1) > 1e-4
