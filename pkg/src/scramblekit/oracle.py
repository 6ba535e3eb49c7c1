"""Brute-force state-vector simulation used to cross-check the tableau.

The state is a tensor with one axis per qubit (axis q = qubit q). Two-qubit
Clifford unitaries are rebuilt from the images of X1, Z1, X2, Z2 alone, so
nothing here shares code with the tableau update rules.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .clifford import GENERATORS, Clifford2
from .models import CircuitSchedule
from .tableau import AXIS_X, AXIS_Y, AXIS_Z, GateKind, InitState, InvalidRegionError, sample_product_axes

MAX_QUBITS = 12

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.diag([1, 1j]).astype(complex)
CZ = np.diag([1, 1, 1, -1]).astype(complex)


class SizeLimitError(ValueError):
    pass


def _single(x: int, z: int) -> np.ndarray:
    return [[_I, _Z], [_X, _Y]][x][z]


def pauli_matrix(v: int, sign: int = 0) -> np.ndarray:
    """Dense 4x4 Pauli for word v; basis index = bit_a + 2 * bit_b."""
    pa = _single(v & 1, (v >> 1) & 1)
    pb = _single((v >> 2) & 1, (v >> 3) & 1)
    return (-1) ** sign * np.kron(pb, pa)


@lru_cache(maxsize=None)
def clifford_unitary(index: int) -> np.ndarray:
    """A 4x4 unitary realizing Clifford ``index`` (global phase arbitrary)."""
    g = Clifford2(index)
    img = [pauli_matrix(*g.act(v)) for v in GENERATORS]
    proj = (np.eye(4) + img[1]) @ (np.eye(4) + img[3]) / 4
    col = proj[:, np.argmax(np.linalg.norm(proj, axis=0))]
    vac = col / np.linalg.norm(col)
    u = np.empty((4, 4), dtype=complex)
    for a in (0, 1):
        for b in (0, 1):
            vec = vac
            if a:
                vec = img[0] @ vec
            if b:
                vec = img[2] @ vec
            u[:, a + 2 * b] = vec
    return u


def product_state(axes: Sequence[int]) -> np.ndarray:
    kets = {
        AXIS_X: np.array([1, 1], dtype=complex) / np.sqrt(2),
        AXIS_Y: np.array([1, 1j], dtype=complex) / np.sqrt(2),
        AXIS_Z: np.array([1, 0], dtype=complex),
    }
    n = len(axes)
    if n > MAX_QUBITS:
        raise SizeLimitError(f"dense oracle limited to {MAX_QUBITS} qubits, got {n}")
    psi = np.ones((), dtype=complex)
    for ax in axes:
        psi = np.multiply.outer(psi, kets[int(ax)])
    return psi


def apply_1q(psi: np.ndarray, u: np.ndarray, q: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(u, psi, axes=([1], [q])), 0, q)


def apply_2q(psi: np.ndarray, u: np.ndarray, a: int, b: int) -> np.ndarray:
    u4 = u.reshape(2, 2, 2, 2)  # [b', a', b, a]
    out = np.tensordot(u4, psi, axes=([2, 3], [b, a]))
    return np.moveaxis(out, [0, 1], [b, a])


def simulate(sched: CircuitSchedule, axes: Sequence[int]) -> np.ndarray:
    if sched.n_qubits > MAX_QUBITS:
        raise SizeLimitError(f"dense oracle limited to {MAX_QUBITS} qubits, got {sched.n_qubits}")
    psi = product_state(axes)
    for ev in sched.events():
        if ev.kind == GateKind.H:
            psi = apply_1q(psi, H, ev.qubits[0])
        elif ev.kind == GateKind.P:
            psi = apply_1q(psi, S, ev.qubits[0])
        elif ev.kind == GateKind.CZ:
            psi = apply_2q(psi, CZ, *ev.qubits)
        else:
            psi = apply_2q(psi, clifford_unitary(ev.clifford), *ev.qubits)
    return psi


def renyi2_bits(psi: np.ndarray, region: Iterable[int]) -> float:
    """-log2 Tr rho_A^2 from the reduced density matrix."""
    n = psi.ndim
    region = sorted(set(int(q) for q in region))
    rest = [q for q in range(n) if q not in region]
    m = np.transpose(psi, region + rest).reshape(2 ** len(region), -1)
    rho = m @ m.conj().T
    purity = float(np.real(np.trace(rho @ rho)))
    return -np.log2(purity)


def dense_oracle_entropy(sched: CircuitSchedule, init, region: Iterable[int], seed=None) -> float:
    """Rényi-2 entropy (bits) of `region` after running `sched` on a dense state.

    `init` is either an explicit per-qubit axis sequence or an init-state kind
    ("z", "random"); a random kind draws its axes from `seed`.
    """
    if sched.n_qubits > MAX_QUBITS:
        raise SizeLimitError(f"dense oracle limited to {MAX_QUBITS} qubits, got {sched.n_qubits}")
    if isinstance(init, (str, InitState)):
        axes = sample_product_axes(sched.n_qubits, init, seed)
    else:
        axes = np.asarray(init, dtype=np.int64)
    if axes.shape != (sched.n_qubits,):
        raise ValueError(f"need {sched.n_qubits} initial axes, got shape {axes.shape}")
    region = list(region)
    if any(not 0 <= int(q) < sched.n_qubits for q in region):
        raise InvalidRegionError(f"region {region} out of range for N={sched.n_qubits}")
    return renyi2_bits(simulate(sched, axes), region)
