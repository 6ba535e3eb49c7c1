"""The two-qubit Clifford group, enumerated as (symplectic map, sign bits).

A two-qubit Pauli is a 4-bit word ``v = x1 | z1<<1 | x2<<2 | z2<<3`` naming
the Hermitian operator ``i^(x1 z1 + x2 z2) X1^x1 Z1^z1 X2^x2 Z2^z2`` (so
``x=z=1`` is ``+Y``). A Clifford is fixed up to global phase by the images of
the generators X1, Z1, X2, Z2: a symplectic 4x4 map (720 of them) plus one sign
bit per generator (16 choices), giving the 11520 elements of the group.

Element ``index = 16 * symplectic_index + sign_bits``; symplectic index 0 is the
identity map, so index 0 is the identity gate.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .rng import SeedLike, as_generator

GROUP_ORDER = 11520
N_SYMPLECTIC = 720
GENERATORS = (1, 2, 4, 8)  # X1, Z1, X2, Z2


def _popcount(v: int) -> int:
    return bin(v).count("1")


def symplectic_product(u: int, v: int) -> int:
    x_u, z_u = u & 0b0101, (u >> 1) & 0b0101
    x_v, z_v = v & 0b0101, (v >> 1) & 0b0101
    return (_popcount(x_u & z_v) + _popcount(z_u & x_v)) & 1


def _split(v: int) -> tuple[int, int]:
    """4-bit word -> (x bits, z bits) as 2-bit qubit masks."""
    return (v & 1) | ((v >> 1) & 2), ((v >> 1) & 1) | ((v >> 2) & 2)


def _mul(a: tuple[int, int, int], b: tuple[int, int, int]) -> tuple[int, int, int]:
    # (e, x, z) means i^e X^x Z^z
    e1, x1, z1 = a
    e2, x2, z2 = b
    return ((e1 + e2 + 2 * _popcount(z1 & x2)) & 3, x1 ^ x2, z1 ^ z2)


def _hermitian(v: int) -> tuple[int, int, int]:
    x, z = _split(v)
    return (_popcount(x & z) & 3, x, z)


def _phase_bit(p: tuple[int, int, int]) -> int:
    e, x, z = p
    k = (e - _popcount(x & z)) & 3
    if k & 1:
        raise ValueError("product is not Hermitian")
    return k >> 1


def _is_symplectic(images: tuple[int, int, int, int]) -> bool:
    for a in range(4):
        for b in range(a + 1, 4):
            if symplectic_product(images[a], images[b]) != symplectic_product(
                GENERATORS[a], GENERATORS[b]
            ):
                return False
    return True


def _linear_image(images: tuple[int, ...], v: int) -> int:
    out = 0
    for g in range(4):
        if (v >> g) & 1:
            out ^= images[g]
    return out


@lru_cache(maxsize=None)
def symplectic_maps() -> tuple[tuple[int, int, int, int], ...]:
    """All 720 symplectic maps as generator-image tuples, identity first."""
    maps = []
    for code in range(1 << 16):
        images = tuple((code >> (4 * g)) & 0xF for g in range(4))
        if _is_symplectic(images):
            maps.append(images)
    identity = GENERATORS
    maps.remove(identity)
    return (identity, *sorted(maps))


@lru_cache(maxsize=None)
def action_tables() -> tuple[np.ndarray, np.ndarray]:
    """``(image, sign)`` lookup tables of shape (11520, 16).

    ``image[k, v]`` is the Pauli word that element ``k`` maps ``v`` to and
    ``sign[k, v]`` is 1 when the image carries a minus sign.
    """
    maps = symplectic_maps()
    image = np.zeros((GROUP_ORDER, 16), dtype=np.uint8)
    sign = np.zeros((GROUP_ORDER, 16), dtype=np.uint8)
    for j, images in enumerate(maps):
        gen_images = [_hermitian(img) for img in images]
        base = np.zeros(16, dtype=np.uint8)
        out = np.zeros(16, dtype=np.uint8)
        for v in range(16):
            x, z = _split(v)
            acc = (_popcount(x & z) & 3, 0, 0)
            for g in range(4):
                if (v >> g) & 1:
                    acc = _mul(acc, gen_images[g])
            base[v] = _phase_bit(acc)
            out[v] = _linear_image(images, v)
        for bits in range(16):
            k = 16 * j + bits
            image[k] = out
            flips = np.array([_popcount(v & bits) & 1 for v in range(16)], dtype=np.uint8)
            sign[k] = base ^ flips
    return image, sign


@lru_cache(maxsize=None)
def kernel_tables() -> tuple[np.ndarray, np.ndarray]:
    """Tables for word-parallel application.

    Returns ``lin`` (11520, 4): image word of each generator, and ``anf``
    (11520,): bit ``S`` set iff the monomial ``prod_{g in S} v_g`` appears in
    the algebraic normal form of the sign function.
    """
    image, sign = action_tables()
    lin = image[:, list(GENERATORS)].copy()
    anf_tt = sign.astype(np.uint8).copy()
    for g in range(4):  # Moebius transform over subsets
        step = 1 << g
        for v in range(16):
            if v & step:
                anf_tt[:, v] ^= anf_tt[:, v ^ step]
    weights = (1 << np.arange(16)).astype(np.uint32)
    anf = (anf_tt.astype(np.uint32) * weights).sum(axis=1).astype(np.uint16)
    return lin, anf


@lru_cache(maxsize=None)
def _index_lookup() -> dict[tuple[int, ...], int]:
    return {images: j for j, images in enumerate(symplectic_maps())}


@dataclass(frozen=True)
class Clifford2:
    """One element of the two-qubit Clifford group (modulo global phase)."""

    index: int

    def __post_init__(self):
        if not 0 <= self.index < GROUP_ORDER:
            raise ValueError(f"Clifford index {self.index} outside [0, {GROUP_ORDER})")

    @classmethod
    def from_images(cls, images, signs) -> "Clifford2":
        """Build from generator images and sign bits (both length 4)."""
        j = _index_lookup()[tuple(int(v) for v in images)]
        bits = sum((int(s) & 1) << g for g, s in enumerate(signs))
        return cls(16 * j + bits)

    @property
    def images(self) -> tuple[int, int, int, int]:
        return symplectic_maps()[self.index // 16]

    @property
    def signs(self) -> tuple[int, int, int, int]:
        bits = self.index % 16
        return tuple((bits >> g) & 1 for g in range(4))

    @property
    def symplectic_matrix(self) -> np.ndarray:
        """4x4 binary matrix; column g is the image of generator g."""
        m = np.zeros((4, 4), dtype=np.uint8)
        for g, img in enumerate(self.images):
            for k in range(4):
                m[k, g] = (img >> k) & 1
        return m

    def act(self, v: int) -> tuple[int, int]:
        """Conjugate the Pauli word ``v``; returns (image word, sign bit)."""
        image, sign = action_tables()
        return int(image[self.index, v]), int(sign[self.index, v])

    def then(self, other: "Clifford2") -> "Clifford2":
        """The gate 'apply self, then other'."""
        images, signs = [], []
        for g, v in enumerate(GENERATORS):
            w, s1 = self.act(v)
            u, s2 = other.act(w)
            images.append(u)
            signs.append(s1 ^ s2)
        return Clifford2.from_images(images, signs)

    def inverse(self) -> "Clifford2":
        inv_images = []
        for v in GENERATORS:
            inv_images.append(next(u for u in range(16) if _linear_image(self.images, u) == v))
        j = _index_lookup()[tuple(inv_images)]
        for bits in range(16):
            cand = Clifford2(16 * j + bits)
            if self.then(cand).index == 0:
                return cand
        raise AssertionError("no inverse found")

    def is_identity(self) -> bool:
        return self.index == 0


def sample_clifford2(seed: SeedLike = None) -> Clifford2:
    """Uniformly random two-qubit Clifford."""
    return Clifford2(int(as_generator(seed).integers(GROUP_ORDER)))

