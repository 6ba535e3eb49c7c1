"""Circuit schedules for the three tunable-range families.

* WrAA: every timestep is a round-robin tournament of N-1 perfect matchings
  under a fresh random relabeling; a matched pair at periodic distance d fires
  a random two-qubit Clifford with probability J d^s.
* PWR2: bricklayer circuit coupling only distances 2^k (periodic).
* Riffle: global H P rotations, a weighted CZ layer on physically adjacent
  atoms, then an inverse Faro shuffle of the atom positions; m even then m
  odd iterations per timestep for N = 2^m.

All probabilities are normalized so each qubit receives one two-qubit gate per
timestep on average.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterator, Optional

import numpy as np
from scipy.optimize import brentq

from .clifford import GROUP_ORDER
from .rng import SeedLike, as_generator, seed_label
from .tableau import GateEvent, GateKind, InvalidSizeError

log = logging.getLogger(__name__)


class Model(str, enum.Enum):
    WRAA = "WrAA"
    PWR2 = "PWR2"
    RIFFLE = "Riffle"

    @classmethod
    def parse(cls, value) -> "Model":
        if isinstance(value, cls):
            return value
        for m in cls:
            if str(value).strip().lower() == m.value.lower():
                return m
        raise ValueError(f"unknown model {value!r}")

    @property
    def code(self) -> int:
        return list(Model).index(self)

    @property
    def periodic(self) -> bool:
        return self is not Model.RIFFLE


def _log2_exact(n: int) -> int:
    m = int(n).bit_length() - 1
    if n < 1 or (1 << m) != n:
        raise InvalidSizeError(f"N={n} is not a power of two")
    return m


def _check_size(model: Model, n: int) -> int:
    """Validate N for ``model``; returns log2 N for the power-of-two families."""
    if model is Model.WRAA:
        if n < 4 or n % 2:
            raise InvalidSizeError(f"WrAA needs even N >= 4, got {n}")
        return 0
    m = _log2_exact(n)
    lowest = 2 if model is Model.PWR2 else 3
    if m < lowest:
        raise InvalidSizeError(f"{model.value} needs N >= {1 << lowest}, got {n}")
    return m


def periodic_distance(i, j, n: int):
    d = np.abs(np.asarray(i) - np.asarray(j))
    return np.minimum(d, n - d)


# ---------------------------------------------------------------- shuffles


@dataclass(frozen=True)
class ShuffleMap:
    """Faro shuffle on m-bit indices: the least significant bit moves to the top."""

    m: int
    inverse: bool = False

    @property
    def n_qubits(self) -> int:
        return 1 << self.m

    @property
    def direction(self) -> str:
        return "inverse" if self.inverse else "forward"

    def __call__(self, i):
        n = self.n_qubits
        arr = np.asarray(i)
        if np.any(arr < 0) or np.any(arr >= n):
            raise IndexError(f"index outside [0, {n})")
        if self.inverse:
            out = ((arr << 1) & (n - 1)) | (arr >> (self.m - 1))
        else:
            out = (arr >> 1) | ((arr & 1) << (self.m - 1))
        return int(out) if np.ndim(out) == 0 else out

    def as_array(self) -> np.ndarray:
        return self(np.arange(self.n_qubits))


def shuffle(i: int, m: int, inverse: bool = False) -> int:
    return ShuffleMap(m, inverse)(i)


# ---------------------------------------------------------- candidate sets


@lru_cache(maxsize=None)
def round_robin(n: int) -> np.ndarray:
    """Circle-method tournament: array (n-1 rounds, n/2 pairs, 2)."""
    if n < 2 or n % 2:
        raise InvalidSizeError(f"round robin needs even N, got {n}")
    rounds = np.empty((n - 1, n // 2, 2), dtype=np.int64)
    k = n - 1
    for r in range(k):
        rounds[r, 0] = (r, k)
        for p in range(1, n // 2):
            rounds[r, p] = ((r + p) % k, (r - p) % k)
    rounds.setflags(write=False)
    return rounds


@lru_cache(maxsize=None)
def pwr2_layers(n: int) -> tuple[tuple[int, np.ndarray], ...]:
    """(distance, bonds) for every layer of one PWR2 timestep, in order."""
    m = _check_size(Model.PWR2, n)
    i = np.arange(n)
    layers = []
    for parity in (0, 1):
        for k in range(m - 1):
            dist = 1 << k
            left = i[(i // dist) % 2 == parity]
            layers.append((dist, np.stack([left, (left + dist) % n], axis=1)))
    half = n // 2
    layers.append((half, np.stack([i[:half], i[:half] + half], axis=1)))
    return tuple(layers)


@lru_cache(maxsize=None)
def riffle_bonds(n: int, all_pairs: bool = False):
    """Candidate logical pairs for each of the 2m iterations of one timestep.

    Returns (pairs per iteration, logical->physical map after each iteration).
    """
    m = _check_size(Model.RIFFLE, n)
    rinv = ShuffleMap(m, inverse=True)
    pos = np.arange(n)
    per_iter, trace = [], []
    if all_pairs:
        iu, ju = np.triu_indices(n, k=1)
        everything = np.stack([iu, ju], axis=1)
    for it in range(2 * m):
        if all_pairs:
            per_iter.append(everything)
        else:
            at_site = np.argsort(pos)
            start = 0 if it < m else 1
            p = np.arange(start, n - 1, 2)
            a, b = at_site[p], at_site[p + 1]
            per_iter.append(np.stack([np.minimum(a, b), np.maximum(a, b)], axis=1))
        pos = rinv(pos)
        trace.append(pos.copy())
    return tuple(per_iter), np.array(trace)


def _riffle_distances(n: int, all_pairs: bool) -> np.ndarray:
    pairs, _ = riffle_bonds(n, all_pairs)
    return np.concatenate([p[:, 1] - p[:, 0] for p in pairs])


# ----------------------------------------------------------- normalization


@lru_cache(maxsize=4096)
def _riffle_norm(n: int, s: float, all_pairs: bool) -> tuple[float, bool]:
    w = _riffle_distances(n, all_pairs).astype(float) ** s
    target = n / 2
    j0 = target / w.sum()
    if j0 * w.max() <= 1.0:
        return j0, False
    if w.size < target:
        raise ValueError("not enough candidate bonds for a unit gate budget")
    # solve in log J: J spans many decades when s is large
    logw = np.log(w)
    budget = lambda lj: np.exp(np.minimum(0.0, lj + logw)).sum() - target  # noqa: E731
    lj = brentq(budget, np.log(j0), -logw.min(), xtol=1e-14, rtol=4 * np.finfo(float).eps)
    j = float(np.exp(lj))
    log.warning("riffle N=%d s=%g: probabilities clipped at 1, J re-solved to %.9g", n, s, j)
    return j, True


def coupling_norm(model, n: int, s: float, all_pairs: bool = False) -> float:
    """Normalization J with p(d) = J d^s giving one gate per qubit per timestep."""
    model = Model.parse(model)
    s = float(s)
    if model is Model.WRAA:
        if n % 2:
            raise InvalidSizeError(f"WrAA needs even N, got {n}")
        d = np.arange(1, n // 2, dtype=float)
        return 1.0 / ((n / 2) ** s + 2.0 * np.sum(d**s))
    m = _log2_exact(n)
    if model is Model.PWR2:
        k = np.arange(1, m, dtype=float)
        return 1.0 / ((n / 2) ** s + 2.0 * np.sum(2.0 ** ((k - 1) * s)))
    return _riffle_norm(n, s, bool(all_pairs))[0]


# ------------------------------------------------------------- schedules


KIND_LABELS = {GateKind.H: "H", GateKind.P: "P", GateKind.CZ: "CZ", GateKind.C2: "C2"}


@dataclass
class CircuitSchedule:
    """Gate events of one circuit realization, stored column-wise by layer."""

    model: Model
    n_qubits: int
    exponent: float
    timesteps: int
    norm: float
    seed: str
    layer: np.ndarray
    kind: np.ndarray
    q1: np.ndarray
    q2: np.ndarray
    distance: np.ndarray
    clifford: np.ndarray
    n_layers: int
    permutation_trace: Optional[np.ndarray] = None
    metadata: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return int(self.kind.shape[0])

    @property
    def two_qubit(self) -> np.ndarray:
        return self.kind >= GateKind.CZ

    @property
    def fired_pairs(self) -> np.ndarray:
        mask = self.two_qubit
        return np.stack([self.q1[mask], self.q2[mask]], axis=1)

    @property
    def n_two_qubit(self) -> int:
        return int(np.count_nonzero(self.two_qubit))

    def gates_per_qubit(self) -> float:
        """Two-qubit gates per qubit per timestep for this realization."""
        return 2.0 * self.n_two_qubit / (self.n_qubits * self.timesteps)

    def event(self, k: int) -> GateEvent:
        kind = GateKind(int(self.kind[k]))
        if kind.arity == 1:
            return GateEvent(int(self.layer[k]), kind, (int(self.q1[k]),))
        cl = int(self.clifford[k])
        return GateEvent(
            int(self.layer[k]),
            kind,
            (int(self.q1[k]), int(self.q2[k])),
            int(self.distance[k]),
            cl if cl >= 0 else None,
        )

    def events(self) -> Iterator[GateEvent]:
        for k in range(len(self)):
            yield self.event(k)

    @property
    def layers(self) -> list[list[GateEvent]]:
        out: list[list[GateEvent]] = [[] for _ in range(self.n_layers)]
        for ev in self.events():
            out[ev.layer].append(ev)
        return out

    # -- text format

    def to_text(self) -> str:
        lines = [
            "model,N,s,t,seed,norm_J",
            f"{self.model.value},{self.n_qubits},{self.exponent!r},{self.timesteps},"
            f"{self.seed},{self.norm!r}",
        ]
        for k in range(len(self)):
            kind = GateKind(int(self.kind[k]))
            if kind.arity == 1:
                lines.append(f"{self.layer[k]},{KIND_LABELS[kind]},{self.q1[k]}")
            else:
                label = KIND_LABELS[kind]
                if kind == GateKind.C2:
                    label += f":{self.clifford[k]}"
                lines.append(
                    f"{self.layer[k]},{label},{self.q1[k]},{self.q2[k]},{self.distance[k]}"
                )
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CircuitSchedule":
        rows = [ln for ln in text.splitlines() if ln.strip()]
        if not rows or rows[0].strip() != "model,N,s,t,seed,norm_J":
            raise ValueError("missing schedule header")
        model, n, s, t, seed, norm = rows[1].split(",")
        model, n, t = Model.parse(model), int(n), int(t)
        cols: dict[str, list[int]] = {k: [] for k in ("layer", "kind", "q1", "q2", "dist", "cl")}
        by_label = {v: k for k, v in KIND_LABELS.items()}
        for row in rows[2:]:
            parts = row.split(",")
            label, _, cl = parts[1].partition(":")
            kind = by_label[label]
            cols["layer"].append(int(parts[0]))
            cols["kind"].append(int(kind))
            cols["q1"].append(int(parts[2]))
            if kind.arity == 2:
                cols["q2"].append(int(parts[3]))
                cols["dist"].append(int(parts[4]))
            else:
                cols["q2"].append(-1)
                cols["dist"].append(0)
            cols["cl"].append(int(cl) if cl else -1)
        trace = None
        if model is Model.RIFFLE:
            _, one = riffle_bonds(n)
            trace = np.tile(one, (t, 1))
        return cls(
            model=model,
            n_qubits=n,
            exponent=float(s),
            timesteps=t,
            norm=float(norm),
            seed=seed,
            layer=np.array(cols["layer"], dtype=np.int64),
            kind=np.array(cols["kind"], dtype=np.int8),
            q1=np.array(cols["q1"], dtype=np.int64),
            q2=np.array(cols["q2"], dtype=np.int64),
            distance=np.array(cols["dist"], dtype=np.int64),
            clifford=np.array(cols["cl"], dtype=np.int64),
            n_layers=t * layers_per_timestep(model, n),
            permutation_trace=trace,
        )

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> "CircuitSchedule":
        return cls.from_text(Path(path).read_text())


def layers_per_timestep(model, n: int) -> int:
    model = Model.parse(model)
    m = _check_size(model, n)
    if model is Model.WRAA:
        return n - 1
    if model is Model.PWR2:
        return 2 * (m - 1) + 1
    return 3 * 2 * m


class _Builder:
    def __init__(self):
        self.chunks: list[tuple] = []

    def two_qubit(self, layer, pairs, dist, kind, cliff=None):
        k = pairs.shape[0]
        if k == 0:
            return
        if cliff is None:
            cliff = np.full(k, -1, dtype=np.int64)
        self.chunks.append(
            (np.broadcast_to(np.asarray(layer), (k,)), np.full(k, int(kind)), pairs[:, 0], pairs[:, 1], dist, cliff)
        )

    def single(self, layer, qubits, kind):
        k = qubits.shape[0]
        self.chunks.append(
            (np.full(k, layer), np.full(k, int(kind)), qubits, np.full(k, -1), np.zeros(k, dtype=np.int64), np.full(k, -1))
        )

    def arrays(self):
        if not self.chunks:
            empty = np.zeros(0, dtype=np.int64)
            return (empty, np.zeros(0, dtype=np.int8), empty, empty, empty, empty)
        cols = [np.concatenate([c[i] for c in self.chunks]) for i in range(6)]
        return (
            cols[0].astype(np.int64),
            cols[1].astype(np.int8),
            cols[2].astype(np.int64),
            cols[3].astype(np.int64),
            cols[4].astype(np.int64),
            cols[5].astype(np.int64),
        )


def _check_probabilities(p: np.ndarray) -> None:
    if p.size and (p.min() < 0.0 or p.max() > 1.0 + 1e-12):
        raise AssertionError(f"fire probabilities outside [0, 1]: [{p.min()}, {p.max()}]")


def _finish(model, n, s, t, norm, seed, builder, trace=None, **meta) -> CircuitSchedule:
    layer, kind, q1, q2, dist, cl = builder.arrays()
    return CircuitSchedule(
        model=model,
        n_qubits=n,
        exponent=float(s),
        timesteps=t,
        norm=float(norm),
        seed=seed_label(seed),
        layer=layer,
        kind=kind,
        q1=q1,
        q2=q2,
        distance=dist,
        clifford=cl,
        n_layers=t * layers_per_timestep(model, n),
        permutation_trace=trace,
        metadata=meta,
    )


def _check_timesteps(t: int) -> int:
    if int(t) < 1:
        raise ValueError(f"timesteps must be >= 1, got {t}")
    return int(t)


def wraa_schedule(n: int, s: float, t: int = 1, seed: SeedLike = None) -> CircuitSchedule:
    _check_size(Model.WRAA, n)
    t = _check_timesteps(t)
    rng = as_generator(seed)
    J = coupling_norm(Model.WRAA, n, s)
    d_table = np.arange(n // 2 + 1, dtype=float)
    p_table = np.zeros_like(d_table)
    p_table[1:] = J * d_table[1:] ** float(s)
    _check_probabilities(p_table)
    base = round_robin(n)
    builder = _Builder()
    per_step = n - 1
    for step in range(t):
        pairs = rng.permutation(n)[base]
        dist = periodic_distance(pairs[..., 0], pairs[..., 1], n)
        fired = rng.random(dist.shape) < p_table[dist]
        rounds, slots = np.nonzero(fired)
        cliff = rng.integers(GROUP_ORDER, size=rounds.size)
        builder.two_qubit(
            step * per_step + rounds, pairs[rounds, slots], dist[rounds, slots], GateKind.C2, cliff
        )
    return _finish(Model.WRAA, n, s, t, J, seed, builder)


def pwr2_schedule(n: int, s: float, t: int = 1, seed: SeedLike = None) -> CircuitSchedule:
    _check_size(Model.PWR2, n)
    t = _check_timesteps(t)
    rng = as_generator(seed)
    J = coupling_norm(Model.PWR2, n, s)
    layers = pwr2_layers(n)
    probs = np.array([J * float(dist) ** float(s) for dist, _ in layers])
    _check_probabilities(probs)
    sizes = [bonds.shape[0] for _, bonds in layers]
    p_flat = np.repeat(probs, sizes)
    builder = _Builder()
    per_step = len(layers)
    for step in range(t):
        fired = rng.random(p_flat.size) < p_flat
        cliff = rng.integers(GROUP_ORDER, size=int(fired.sum()))
        start = used = 0
        for li, (dist, bonds) in enumerate(layers):
            sel = fired[start : start + bonds.shape[0]]
            start += bonds.shape[0]
            k = int(sel.sum())
            builder.two_qubit(
                step * per_step + li,
                bonds[sel],
                np.full(k, dist),
                GateKind.C2,
                cliff[used : used + k],
            )
            used += k
    return _finish(Model.PWR2, n, s, t, J, seed, builder)


def riffle_schedule(
    n: int, s: float, t: int = 1, seed: SeedLike = None, all_pairs: bool = False
) -> CircuitSchedule:
    m = _check_size(Model.RIFFLE, n)
    t = _check_timesteps(t)
    rng = as_generator(seed)
    J, clipped = _riffle_norm(n, float(s), bool(all_pairs))
    pairs_per_iter, trace = riffle_bonds(n, bool(all_pairs))
    dists = [p[:, 1] - p[:, 0] for p in pairs_per_iter]
    probs = [np.minimum(1.0, J * d.astype(float) ** float(s)) for d in dists]
    _check_probabilities(np.concatenate(probs))
    qubits = np.arange(n)
    builder = _Builder()
    per_step = layers_per_timestep(Model.RIFFLE, n)
    for step in range(t):
        for it in range(2 * m):
            base = step * per_step + 3 * it
            # T = H P: phase first, then Hadamard
            builder.single(base, qubits, GateKind.P)
            builder.single(base + 1, qubits, GateKind.H)
            sel = rng.random(probs[it].size) < probs[it]
            builder.two_qubit(base + 2, pairs_per_iter[it][sel], dists[it][sel], GateKind.CZ)
    return _finish(
        Model.RIFFLE,
        n,
        s,
        t,
        J,
        seed,
        builder,
        trace=np.tile(trace, (t, 1)),
        clipped=clipped,
        pairing="all" if all_pairs else "bonds",
    )


def build_schedule(model, n: int, s: float, t: int = 1, seed: SeedLike = None, **options) -> CircuitSchedule:
    model = Model.parse(model)
    if model is Model.WRAA:
        return wraa_schedule(n, s, t, seed)
    if model is Model.PWR2:
        return pwr2_schedule(n, s, t, seed)
    return riffle_schedule(n, s, t, seed, **options)


def max_probability(model, n: int, s: float) -> float:
    """Largest single-bond fire probability for (model, N, s)."""
    model = Model.parse(model)
    J = coupling_norm(model, n, s)
    if model is Model.WRAA:
        d = np.arange(1, n // 2 + 1, dtype=float)
    elif model is Model.PWR2:
        d = np.array([dist for dist, _ in pwr2_layers(n)], dtype=float)
    else:
        return float(min(1.0, J * np.max(_riffle_distances(n, False).astype(float) ** s)))
    return float(J * np.max(d**s))


__all__ = [
    "CircuitSchedule",
    "GateEvent",
    "Model",
    "ShuffleMap",
    "build_schedule",
    "coupling_norm",
    "layers_per_timestep",
    "pwr2_schedule",
    "riffle_schedule",
    "round_robin",
    "shuffle",
    "wraa_schedule",
]
