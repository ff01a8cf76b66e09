"""Seeded random spin-bath Hamiltonian and initial joint states.

The Hamiltonian couples every spin to every other spin:

    H = sum_m sum_g b[m,g] s_g^m  +  sum_{m<n} sum_{g,d} c[mn,g,d] s_g^m s_d^n

with all coefficients drawn i.i.d. uniform on [-0.5, 0.5]. Spins 0 and 1 are
the system pair, the rest form the bath; lifted operators put spin 0 in the
leftmost Kronecker slot so the system occupies the leading factor.

Randomness uses the counter-based Philox generator so draws are identical
across platforms, with sub-seeds derived from a master seed through
SeedSequence spawn keys (tag + indices). This keeps every model, bath state,
and system state independently reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from nested_udd.linalg import HermEig, herm_eig, kron
from nested_udd.operators import BasisConvention, SystemState

MODEL_TAG = 0
BATH_TAG = 1
STATE_TAG = 2

_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def derive_seed(master_seed: int, tag: int, *indices: int) -> int:
    """Stable 64-bit sub-seed for one (tag, index...) slot of a master seed."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(tag, *indices))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _lifted_pauli(n_spins: int, site: int, axis: int) -> np.ndarray:
    left = np.eye(2**site, dtype=complex)
    right = np.eye(2 ** (n_spins - site - 1), dtype=complex)
    return kron(kron(left, _PAULI[axis]), right)


@dataclass(frozen=True)
class SpinBathModel:
    """n-spin Hamiltonian with cached eigendecomposition."""

    n_spins: int
    seed: int | None
    b: np.ndarray
    c: np.ndarray
    h_full: np.ndarray = field(repr=False)
    eig: HermEig = field(repr=False)

    @property
    def dim(self) -> int:
        return 2**self.n_spins

    @property
    def n_bath_spins(self) -> int:
        return self.n_spins - 2

    @property
    def bath_dim(self) -> int:
        return 2**self.n_bath_spins

    @property
    def pair_indices(self) -> tuple:
        return tuple(combinations(range(self.n_spins), 2))

    def to_json(self) -> str:
        n = self.n_spins
        dense = np.zeros((n, n, 3, 3))
        for pi, (p, q) in enumerate(self.pair_indices):
            dense[p, q] = self.c[pi]
        return json.dumps(
            {
                "n_spins": n,
                "seed": self.seed,
                "b": self.b.tolist(),
                "c": dense.tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "SpinBathModel":
        doc = json.loads(text)
        n = int(doc["n_spins"])
        dense = np.asarray(doc["c"], dtype=float)
        pairs = tuple(combinations(range(n), 2))
        c = np.stack([dense[p, q] for p, q in pairs])
        return model_from_coefficients(
            n, np.asarray(doc["b"], dtype=float), c, seed=doc.get("seed")
        )


def model_from_coefficients(
    n_spins: int, b: np.ndarray, c: np.ndarray, seed: int | None = None
) -> SpinBathModel:
    """Assemble the Hamiltonian from explicit coefficient arrays."""
    if n_spins < 3:
        raise ValueError("need at least 3 spins (2 system + 1 bath)")
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    pairs = tuple(combinations(range(n_spins), 2))
    if b.shape != (n_spins, 3) or c.shape != (len(pairs), 3, 3):
        raise ValueError("coefficient arrays have wrong shape")
    dim = 2**n_spins
    h = np.zeros((dim, dim), dtype=complex)
    singles = [[_lifted_pauli(n_spins, m, g) for g in range(3)] for m in range(n_spins)]
    for m in range(n_spins):
        for g in range(3):
            h += b[m, g] * singles[m][g]
    for pi, (p, q) in enumerate(pairs):
        for g in range(3):
            for d in range(3):
                h += c[pi, g, d] * (singles[p][g] @ singles[q][d])
    return SpinBathModel(
        n_spins=n_spins, seed=seed, b=b, c=c, h_full=h, eig=herm_eig(h)
    )


def build_model(n_spins: int, seed: int) -> SpinBathModel:
    """Draw a random model: b first, then c in lexicographic pair order."""
    if n_spins < 3:
        raise ValueError("need at least 3 spins (2 system + 1 bath)")
    rng = _rng(seed)
    n_pairs = n_spins * (n_spins - 1) // 2
    b = rng.uniform(-0.5, 0.5, size=(n_spins, 3))
    c = rng.uniform(-0.5, 0.5, size=(n_pairs, 3, 3))
    return model_from_coefficients(n_spins, b, c, seed=seed)


@dataclass(frozen=True)
class JointState:
    """Normalized state vector of system plus bath."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "amplitudes", amps)
        if abs(np.linalg.norm(amps) - 1.0) > 1e-12:
            raise ValueError("joint state must be normalized")


def random_bath_state(bath_seed: int, n_bath_spins: int = 3) -> np.ndarray:
    """Haar-random pure bath state vector."""
    rng = _rng(bath_seed)
    d = 2**n_bath_spins
    bath = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return bath / np.linalg.norm(bath)


def initial_joint_state(
    sys: SystemState, bath_seed: int, n_bath_spins: int = 3
) -> JointState:
    """System state tensored with a Haar-random pure bath state."""
    joint = np.kron(sys.amplitudes, random_bath_state(bath_seed, n_bath_spins))
    return JointState(joint / np.linalg.norm(joint))


def random_protected_state(
    seed: int, basis: BasisConvention | None = None
) -> SystemState:
    """Haar-random qubit state alpha|0> + beta|1> in the encoded pair."""
    conv = basis if basis is not None else BasisConvention.default()
    rng = _rng(seed)
    z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    z /= np.linalg.norm(z)
    return SystemState.from_pair(z[0], z[1], conv)


def random_full_state(seed: int) -> SystemState:
    """Haar-random state over the full four-dimensional system space."""
    rng = _rng(seed)
    z = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    z /= np.linalg.norm(z)
    return SystemState(tuple(z))
