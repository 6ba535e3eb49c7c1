"""Stabilizer tableau for pure N-qubit states.

Storage is qubit-major and bit-packed along the generator axis: ``X[q, w]``
holds, for qubit ``q``, bit ``r & 63`` of word ``w = r >> 6`` equal to the X
component of generator ``r``. A gate on qubits (a, b) then touches only rows
``a`` and ``b`` and updates 64 generators per machine word. Signs are packed
the same way.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numba
import numpy as np

from .clifford import GROUP_ORDER, kernel_tables
from .gf2 import gf2_rank, pack_bits, rank_packed_inplace, unpack_bits
from .rng import SeedLike, as_generator


class InvalidSizeError(ValueError):
    pass


class InvalidEventError(ValueError):
    pass


class InvalidRegionError(ValueError):
    pass


class InitState(str, enum.Enum):
    Z_POLARIZED = "z"
    RANDOM_PRODUCT = "random"

    @classmethod
    def parse(cls, value) -> "InitState":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {
            "z": cls.Z_POLARIZED,
            "zpolarized": cls.Z_POLARIZED,
            "z_polarized": cls.Z_POLARIZED,
            "random": cls.RANDOM_PRODUCT,
            "randompauliproduct": cls.RANDOM_PRODUCT,
            "random_product": cls.RANDOM_PRODUCT,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown initial state {value!r}") from None


class GateKind(enum.IntEnum):
    H = 0
    P = 1
    CZ = 2
    C2 = 3

    @property
    def arity(self) -> int:
        return 1 if self in (GateKind.H, GateKind.P) else 2


@dataclass(frozen=True)
class GateEvent:
    layer: int
    kind: GateKind
    qubits: tuple
    distance: int = 0
    clifford: Optional[int] = None


# single-site axis codes for product states
AXIS_X, AXIS_Y, AXIS_Z = 0, 1, 2


@numba.njit(cache=True)
def _apply_events(X, Z, S, kind, q1, q2, cliff, lin, anf):
    n_words = X.shape[1]
    for e in range(kind.shape[0]):
        k = kind[e]
        a = q1[e]
        if k == 0:
            for w in range(n_words):
                x = X[a, w]
                z = Z[a, w]
                S[w] ^= x & z
                X[a, w] = z
                Z[a, w] = x
        elif k == 1:
            for w in range(n_words):
                x = X[a, w]
                S[w] ^= x & Z[a, w]
                Z[a, w] ^= x
        elif k == 2:
            b = q2[e]
            for w in range(n_words):
                xa = X[a, w]
                xb = X[b, w]
                za = Z[a, w]
                zb = Z[b, w]
                S[w] ^= xa & xb & (za ^ zb)
                Z[a, w] = za ^ xb
                Z[b, w] = zb ^ xa
        else:
            b = q2[e]
            c = cliff[e]
            mono = np.int64(anf[c])
            for w in range(n_words):
                v0 = X[a, w]
                v1 = Z[a, w]
                v2 = X[b, w]
                v3 = Z[b, w]
                o0 = np.uint64(0)
                o1 = np.uint64(0)
                o2 = np.uint64(0)
                o3 = np.uint64(0)
                for g in range(4):
                    if g == 0:
                        v = v0
                    elif g == 1:
                        v = v1
                    elif g == 2:
                        v = v2
                    else:
                        v = v3
                    img = lin[c, g]
                    if img & 1:
                        o0 ^= v
                    if img & 2:
                        o1 ^= v
                    if img & 4:
                        o2 ^= v
                    if img & 8:
                        o3 ^= v
                t = np.uint64(0)
                for sub in range(1, 16):
                    if (mono >> sub) & 1:
                        prod = ~np.uint64(0)
                        if sub & 1:
                            prod &= v0
                        if sub & 2:
                            prod &= v1
                        if sub & 4:
                            prod &= v2
                        if sub & 8:
                            prod &= v3
                        t ^= prod
                S[w] ^= t
                X[a, w] = o0
                Z[a, w] = o1
                X[b, w] = o2
                Z[b, w] = o3


@numba.njit(cache=True)
def _region_rank(X, Z, qubits):
    k = qubits.shape[0]
    n_words = X.shape[1]
    m = np.empty((2 * k, n_words), dtype=np.uint64)
    for i in range(k):
        q = qubits[i]
        for w in range(n_words):
            m[2 * i, w] = X[q, w]
            m[2 * i + 1, w] = Z[q, w]
    return rank_packed_inplace(m, n_words * 64)


class Tableau:
    """Stabilizer generators of an N-qubit pure state."""

    def __init__(self, X: np.ndarray, Z: np.ndarray, S: np.ndarray, n_qubits: int):
        self.X = X
        self.Z = Z
        self.S = S
        self.n_qubits = n_qubits

    @classmethod
    def product(cls, axes: Sequence[int]) -> "Tableau":
        """Product state; ``axes[q]`` in {0: +X, 1: +Y, 2: +Z} stabilizes qubit q."""
        axes = np.asarray(axes, dtype=np.int64)
        n = axes.shape[0]
        if n < 2:
            raise InvalidSizeError(f"need at least 2 qubits, got {n}")
        eye = np.eye(n, dtype=np.uint8)
        x_cols = eye * (axes != AXIS_Z)[:, None]
        z_cols = eye * (axes != AXIS_X)[:, None]
        S = np.zeros((n + 63) // 64, dtype=np.uint64)
        return cls(pack_bits(x_cols), pack_bits(z_cols), S, n)

    @classmethod
    def from_bits(cls, x_bits, z_bits, signs) -> "Tableau":
        x_bits = np.asarray(x_bits, dtype=np.uint8)
        n = x_bits.shape[0]
        S = pack_bits(np.asarray(signs, dtype=np.uint8)[None, :])[0]
        return cls(pack_bits(x_bits.T), pack_bits(np.asarray(z_bits, dtype=np.uint8).T), S, n)

    def copy(self) -> "Tableau":
        return Tableau(self.X.copy(), self.Z.copy(), self.S.copy(), self.n_qubits)

    # generator-major views, row r = generator r
    @property
    def x_bits(self) -> np.ndarray:
        return unpack_bits(self.X, self.n_qubits).T.copy()

    @property
    def z_bits(self) -> np.ndarray:
        return unpack_bits(self.Z, self.n_qubits).T.copy()

    @property
    def signs(self) -> np.ndarray:
        return unpack_bits(self.S[None, :], self.n_qubits)[0].copy()

    def generator_strings(self) -> list[str]:
        x, z, s = self.x_bits, self.z_bits, self.signs
        letters = np.array(["I", "X", "Z", "Y"])
        return [
            ("-" if s[r] else "+") + "".join(letters[x[r] + 2 * z[r]])
            for r in range(self.n_qubits)
        ]

    def check_invariants(self) -> None:
        """Raise AssertionError unless generators commute and are independent."""
        x = self.x_bits.astype(np.int64)
        z = self.z_bits.astype(np.int64)
        comm = (x @ z.T + z @ x.T) % 2
        if comm.any():
            raise AssertionError("stabilizer generators do not commute")
        if gf2_rank(np.hstack([x, z])) != self.n_qubits:
            raise AssertionError("stabilizer generators are not independent")

    def _check_qubit(self, q: int) -> None:
        if not 0 <= q < self.n_qubits:
            raise InvalidEventError(f"qubit {q} outside [0, {self.n_qubits})")

    def apply(self, event: GateEvent) -> None:
        kind = GateKind(event.kind)
        qubits = tuple(int(q) for q in event.qubits)
        if len(qubits) != kind.arity:
            raise InvalidEventError(f"{kind.name} expects {kind.arity} qubit(s), got {qubits}")
        for q in qubits:
            self._check_qubit(q)
        if kind.arity == 2 and qubits[0] == qubits[1]:
            raise InvalidEventError(f"duplicate qubit in two-qubit event {qubits}")
        cliff = -1
        if kind == GateKind.C2:
            if event.clifford is None or not 0 <= event.clifford < GROUP_ORDER:
                raise InvalidEventError("Clifford2 event needs an index in [0, 11520)")
            cliff = int(event.clifford)
        self._run_arrays(
            np.array([kind], dtype=np.int8),
            np.array([qubits[0]], dtype=np.int64),
            np.array([qubits[-1] if kind.arity == 2 else -1], dtype=np.int64),
            np.array([cliff], dtype=np.int64),
        )

    def _run_arrays(self, kind, q1, q2, cliff) -> None:
        lin, anf = kernel_tables()
        _apply_events(self.X, self.Z, self.S, kind, q1, q2, cliff, lin, anf)

    def run(self, schedule) -> None:
        """Apply every event of a schedule in order."""
        self._run_arrays(schedule.kind, schedule.q1, schedule.q2, schedule.clifford)

    def entropy(self, region: Iterable[int]) -> int:
        """Renyi-2 entropy of ``region`` in bits."""
        qubits = np.unique(np.asarray(list(region), dtype=np.int64))
        if qubits.size and (qubits[0] < 0 or qubits[-1] >= self.n_qubits):
            raise InvalidRegionError(f"region outside [0, {self.n_qubits})")
        if 2 * qubits.size > self.n_qubits:
            mask = np.ones(self.n_qubits, dtype=bool)
            mask[qubits] = False
            qubits = np.flatnonzero(mask)
        if qubits.size == 0:
            return 0
        return int(_region_rank(self.X, self.Z, qubits)) - int(qubits.size)


def sample_product_axes(n: int, init, seed: SeedLike = None) -> np.ndarray:
    init = InitState.parse(init)
    if n < 2:
        raise InvalidSizeError(f"need at least 2 qubits, got {n}")
    if init == InitState.Z_POLARIZED:
        return np.full(n, AXIS_Z, dtype=np.int64)
    return as_generator(seed).integers(3, size=n).astype(np.int64)


def new_tableau(n: int, init="z", seed: SeedLike = None) -> Tableau:
    return Tableau.product(sample_product_axes(n, init, seed))


def apply_gate(t: Tableau, e: GateEvent) -> None:
    t.apply(e)


def renyi2_entropy(t: Tableau, region: Iterable[int]) -> int:
    return t.entropy(region)
