"""Entropic observables and the gate-crossing indicator."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .models import CircuitSchedule, Model
from .tableau import InvalidRegionError, InvalidSizeError, Tableau


class RegionLayout(str, enum.Enum):
    QUARTERS = "quarters"
    BULK = "bulk"

    @classmethod
    def parse(cls, value) -> "RegionLayout":
        key = str(getattr(value, "value", value)).strip().lower()
        aliases = {"quarters": cls.QUARTERS, "quartersfromzero": cls.QUARTERS, "bulk": cls.BULK, "bulkoffset": cls.BULK}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown region layout {value!r}") from None


Interval = tuple[int, int]


@dataclass(frozen=True)
class RegionSpec:
    """Three contiguous half-open intervals A, B, C; D is the rest."""

    a: Interval
    b: Interval
    c: Interval
    layout: RegionLayout = RegionLayout.QUARTERS

    def __post_init__(self):
        spans = sorted([self.a, self.b, self.c])
        for lo, hi in spans:
            if lo < 0 or hi <= lo:
                raise InvalidRegionError(f"bad interval [{lo}, {hi})")
        for (_, hi), (lo, _) in zip(spans, spans[1:]):
            if lo < hi:
                raise InvalidRegionError("regions overlap")

    def qubits(self, name: str) -> np.ndarray:
        lo, hi = getattr(self, name)
        return np.arange(lo, hi)


def default_regions(n: int, model=None, layout=None) -> RegionSpec:
    """A, B, C of size N/4; bulk-offset by N/8 for the open-chain riffle model."""
    if n % 8:
        raise InvalidSizeError(f"N must be divisible by 8, got {n}")
    if layout is None:
        layout = RegionLayout.BULK if model is not None and Model.parse(model) is Model.RIFFLE else RegionLayout.QUARTERS
    layout = RegionLayout.parse(layout)
    q = n // 4
    off = n // 8 if layout is RegionLayout.BULK else 0
    return RegionSpec((off, off + q), (off + q, off + 2 * q), (off + 2 * q, off + 3 * q), layout)


def _as_set(region) -> np.ndarray:
    return np.unique(np.asarray(list(region), dtype=np.int64))


def mutual_information(t: Tableau, a, b) -> int:
    a, b = _as_set(a), _as_set(b)
    if np.intersect1d(a, b).size:
        raise InvalidRegionError("mutual information needs disjoint regions")
    return t.entropy(a) + t.entropy(b) - t.entropy(np.concatenate([a, b]))


def tripartite_mi(t: Tableau, r: RegionSpec) -> int:
    """I(A;B) + I(A;C) - I(A;BC) in bits."""
    a, b, c = r.qubits("a"), r.qubits("b"), r.qubits("c")
    ent = t.entropy
    return (
        ent(a) + ent(b) + ent(c)
        - ent(np.concatenate([a, b]))
        - ent(np.concatenate([a, c]))
        - ent(np.concatenate([b, c]))
        + ent(np.concatenate([a, b, c]))
    )


class PStarMode(str, enum.Enum):
    # one in-region qubit whose fired gates leave through both boundaries
    PER_QUBIT = "per_qubit"
    # any two fired gates, one through each boundary, on any in-region qubits
    REGION = "region"


def crossing_sides(pairs: np.ndarray, region: Interval, n: int, periodic: bool):
    """For each fired pair with exactly one end in ``region``.

    Returns (inside qubit, side) with side 0 = left boundary, 1 = right,
    2 = equidistant (periodic antipode, may count for either side).
    """
    lo, hi = region
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    ina = (pairs >= lo) & (pairs < hi)
    one_in = ina[:, 0] ^ ina[:, 1]
    pairs, ina = pairs[one_in], ina[one_in]
    inside = np.where(ina[:, 0], pairs[:, 0], pairs[:, 1])
    outside = np.where(ina[:, 0], pairs[:, 1], pairs[:, 0])
    if periodic:
        left = (inside - outside) % n
        right = (outside - inside) % n
        side = np.where(left < right, 0, np.where(right < left, 1, 2))
    else:
        side = np.where(outside < lo, 0, 1)
    return inside, side


def _both_sides(n_left: int, n_right: int, n_tie: int) -> bool:
    return (n_left + n_tie > 0) and (n_right + n_tie > 0) and (n_left + n_right + n_tie >= 2)


def pstar_indicator(
    sched: CircuitSchedule,
    region: Interval,
    periodic: bool | None = None,
    mode: PStarMode | str = PStarMode.PER_QUBIT,
) -> bool:
    """Whether fired gates carry a region's qubits across both of its boundaries."""
    lo, hi = (int(v) for v in region)
    n = sched.n_qubits
    if not (0 <= lo < hi <= n):
        raise InvalidRegionError(f"region [{lo}, {hi}) is not a contiguous interval of [0, {n})")
    if periodic is None:
        periodic = sched.model.periodic
    inside, side = crossing_sides(sched.fired_pairs, (lo, hi), n, periodic)
    if inside.size < 2:
        return False
    if PStarMode(mode) is PStarMode.REGION:
        counts = np.bincount(side, minlength=3)
        return _both_sides(*counts[:3])
    counts = np.zeros((hi - lo, 3), dtype=np.int64)
    np.add.at(counts, (inside - lo, side), 1)
    ok = (counts[:, 0] + counts[:, 2] > 0) & (counts[:, 1] + counts[:, 2] > 0) & (counts.sum(axis=1) >= 2)
    return bool(ok.any())
