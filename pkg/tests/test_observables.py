import itertools

import numpy as np
import pytest

from scramblekit.models import CircuitSchedule, build_schedule
from scramblekit.observables import (
    PStarMode,
    RegionLayout,
    RegionSpec,
    crossing_sides,
    default_regions,
    mutual_information,
    pstar_indicator,
    tripartite_mi,
)
from scramblekit.oracle import dense_oracle_entropy, simulate, renyi2_bits
from scramblekit.tableau import InvalidRegionError, InvalidSizeError, Tableau, sample_product_axes


def schedule_from_lines(model, n, lines):
    text = f"model,N,s,t,seed,norm_J\n{model},{n},0.0,1,0,1.0\n" + "\n".join(lines) + "\n"
    return CircuitSchedule.from_text(text)


def ghz4():
    # H on 0, then CNOT 0->k as H_k CZ H_k
    lines = ["0,H,0"]
    layer = 1
    for k in (1, 2, 3):
        lines += [f"{layer},H,{k}", f"{layer + 1},CZ,0,{k},{k}", f"{layer + 2},H,{k}"]
        layer += 3
    return schedule_from_lines("WrAA", 4, lines)


def run(sched, axes=None):
    tab = Tableau.product(np.full(sched.n_qubits, 2) if axes is None else axes)
    tab.run(sched)
    return tab


def test_default_regions_examples():
    r = default_regions(32, "WrAA")
    assert (r.a, r.b, r.c) == ((0, 8), (8, 16), (16, 24))
    r = default_regions(32, "Riffle")
    assert (r.a, r.b, r.c) == ((4, 12), (12, 20), (20, 28))
    assert r.layout is RegionLayout.BULK
    for model in ("WrAA", "PWR2", "Riffle"):
        r = default_regions(16, model)
        assert all(hi - lo == 4 for lo, hi in (r.a, r.b, r.c))
    assert default_regions(32, "WrAA", layout="bulk").a == (4, 12)
    with pytest.raises(InvalidSizeError):
        default_regions(12, "WrAA")


def test_region_spec_validation():
    with pytest.raises(InvalidRegionError):
        RegionSpec((0, 4), (3, 8), (8, 12))
    with pytest.raises(InvalidRegionError):
        RegionSpec((0, 0), (1, 2), (2, 3))
    assert list(RegionSpec((0, 2), (2, 4), (4, 6)).qubits("b")) == [2, 3]


def test_mutual_information_examples():
    bell = schedule_from_lines("WrAA", 4, ["0,H,0", "1,H,1", "2,CZ,0,1,1", "3,H,1"])
    tab = run(bell)
    assert mutual_information(tab, [0], [1]) == 2
    assert tab.entropy([0]) == 1
    assert mutual_information(run(schedule_from_lines("WrAA", 4, [])), [0, 1], [2, 3]) == 0
    with pytest.raises(InvalidRegionError):
        mutual_information(tab, [0], [0, 1])


def test_ghz4_tmi_plus_one():
    sched = ghz4()
    tab = run(sched)
    r = RegionSpec((0, 1), (1, 2), (2, 3))
    assert tripartite_mi(tab, r) == 1
    psi = simulate(sched, [2, 2, 2, 2])
    # dense check of the seven entropies
    ent = lambda q: renyi2_bits(psi, q)  # noqa: E731
    dense = ent([0]) + ent([1]) + ent([2]) - ent([0, 1]) - ent([0, 2]) - ent([1, 2]) + ent([0, 1, 2])
    assert dense == pytest.approx(1.0, abs=1e-9)
    amps = psi.reshape(-1)
    assert abs(amps[0]) == pytest.approx(2**-0.5) and abs(amps[-1]) == pytest.approx(2**-0.5)


def test_tmi_zero_on_products():
    for seed in range(20):
        axes = sample_product_axes(16, "random", seed)
        assert tripartite_mi(Tableau.product(axes), default_regions(16)) == 0


@pytest.mark.parametrize("model", ["WrAA", "PWR2", "Riffle"])
def test_entropies_match_dense_oracle_n8(model):
    rng = np.random.default_rng(5)
    for trial in range(4):
        sched = build_schedule(model, 8, float(rng.uniform(-2, 1)), 2, int(rng.integers(1 << 30)))
        axes = sample_product_axes(8, "random", trial)
        tab = run(sched, axes)
        psi = simulate(sched, axes)
        for r in range(1, 256, 7):
            region = [q for q in range(8) if r >> q & 1]
            assert tab.entropy(region) == round(renyi2_bits(psi, region))
        assert dense_oracle_entropy(sched, axes, [0, 1, 2]) == pytest.approx(tab.entropy([0, 1, 2]), abs=1e-9)


def test_random_10_qubit_mi_matches_oracle():
    rng = np.random.default_rng(8)
    for trial in range(3):
        sched = build_schedule("WrAA", 10, 0.0, 3, trial)
        axes = sample_product_axes(10, "random", 100 + trial)
        tab = run(sched, axes)
        psi = simulate(sched, axes)
        perm = rng.permutation(10)
        a, b = perm[:3].tolist(), perm[3:7].tolist()
        dense = renyi2_bits(psi, a) + renyi2_bits(psi, b) - renyi2_bits(psi, a + b)
        assert mutual_information(tab, a, b) == round(dense)


def test_dense_oracle_init_kinds():
    sched = ghz4()
    assert dense_oracle_entropy(sched, "z", [0]) == pytest.approx(1.0)
    assert dense_oracle_entropy(schedule_from_lines("WrAA", 4, []), "random", [0, 1], seed=3) == pytest.approx(0.0)
    with pytest.raises(InvalidRegionError):
        dense_oracle_entropy(sched, "z", [4])


def test_oracle_size_limit():
    from scramblekit.oracle import SizeLimitError

    sched = build_schedule("WrAA", 16, 0.0, 1, 0)
    with pytest.raises(SizeLimitError):
        dense_oracle_entropy(sched, "z", [0])


def test_pstar_both_sides_true():
    # region [4, 8); qubit 5 talks to 1 (left) and 10 (right)
    sched = schedule_from_lines("Riffle", 16, ["0,CZ,1,5,4", "3,CZ,5,10,5"])
    assert pstar_indicator(sched, (4, 8))


def test_pstar_one_side_false():
    sched = schedule_from_lines("Riffle", 16, ["0,CZ,1,5,4", "3,CZ,5,2,3"])
    assert not pstar_indicator(sched, (4, 8))


def test_pstar_needs_same_qubit_per_qubit_mode():
    sched = schedule_from_lines("Riffle", 16, ["0,CZ,1,5,4", "3,CZ,6,10,4"])
    assert not pstar_indicator(sched, (4, 8))
    assert pstar_indicator(sched, (4, 8), mode=PStarMode.REGION)


def test_pstar_internal_gates_ignored():
    sched = schedule_from_lines("Riffle", 16, ["0,CZ,4,5,1", "3,CZ,5,6,1", "6,CZ,5,7,2"])
    assert not pstar_indicator(sched, (4, 8))


def test_pstar_periodic_side():
    # periodic N=16, region [0,4): partner 15 sits just across the left edge
    sched = schedule_from_lines("WrAA", 16, ["0,CZ,1,15,2", "1,CZ,1,6,5"])
    assert pstar_indicator(sched, (0, 4))
    assert not pstar_indicator(sched, (0, 4), periodic=False)


def test_pstar_errors():
    sched = schedule_from_lines("WrAA", 16, [])
    with pytest.raises(InvalidRegionError):
        pstar_indicator(sched, (5, 3))
    with pytest.raises(InvalidRegionError):
        pstar_indicator(sched, (0, 17))


def test_crossing_sides_tie():
    inside, side = crossing_sides(np.array([[2, 10]]), (0, 4), 16, True)
    assert inside.tolist() == [2] and side.tolist() == [2]
