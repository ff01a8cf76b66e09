"""Two-qubit basis conventions, operator families, and control operators.

A BasisConvention fixes which four orthonormal two-qubit states carry the
labels |0>..|3>. Everything downstream (the Y operator families, the control
operators, protected states) is defined in terms of those labels, so switching
conventions re-expresses the same physics in a different computational-basis
representation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from nested_udd.linalg import kron

CONTROL_NAMES = ("X0", "X1", "Xphi", "X01", "Z1", "Z2", "Z3", "Z4")

_I2 = np.eye(2, dtype=complex)
_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (_I2, _SX, _SY, _SZ)

# default bath size: five spins total, two of them the system
DEFAULT_BATH_SPINS = 3


@dataclass(frozen=True)
class BasisConvention:
    """Four orthonormal label states |0>..|3>, columns of `states`.

    Column l holds the computational-basis amplitudes of label state |l>.
    The computational order is (up,up), (up,down), (down,up), (down,down)
    with qubit 1 on the slow index.
    """

    states: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        s = np.asarray(self.states, dtype=complex)
        if s.shape != (4, 4):
            raise ValueError(f"states must be 4x4, got {s.shape}")
        if np.abs(s.conj().T @ s - np.eye(4)).max() > 1e-12:
            raise ValueError("label states are not orthonormal")
        object.__setattr__(self, "states", s)

    @classmethod
    def default(cls) -> "BasisConvention":
        """|0>=(up,up), |1>=(down,down), |2>=(up,down), |3>=(down,up)."""
        return cls(np.eye(4, dtype=complex)[:, [0, 3, 1, 2]], name="default")

    @classmethod
    def local(cls) -> "BasisConvention":
        """Labels in plain computational order; makes Z1..Z4 single-qubit."""
        return cls(np.eye(4, dtype=complex), name="local")

    @classmethod
    def pair_swapped(cls) -> "BasisConvention":
        """Like default but with the |2> and |3> assignments exchanged."""
        return cls(np.eye(4, dtype=complex)[:, [0, 3, 2, 1]], name="pair_swapped")

    @classmethod
    def from_pair(cls, state0: np.ndarray, state1: np.ndarray) -> "BasisConvention":
        """Complete an orthonormal pair |0'>, |1'> to a full convention.

        The remaining two labels are filled by Gram-Schmidt over the
        computational basis states, taken in order. The completion is a
        choice; any completion gives the same X0', X1', Xphi'.
        """
        cols = [np.asarray(state0, dtype=complex), np.asarray(state1, dtype=complex)]
        for v in cols:
            if v.shape != (4,) or abs(np.linalg.norm(v) - 1) > 1e-12:
                raise ValueError("pair states must be normalized length-4 vectors")
        if abs(np.vdot(cols[0], cols[1])) > 1e-12:
            raise ValueError("pair states must be orthogonal")
        for k in range(4):
            if len(cols) == 4:
                break
            cand = np.eye(4, dtype=complex)[:, k]
            for c in cols:
                cand = cand - np.vdot(c, cand) * c
            norm = np.linalg.norm(cand)
            if norm > 1e-6:
                cols.append(cand / norm)
        return cls(np.stack(cols, axis=1), name="from_pair")

    def ket(self, label: int) -> np.ndarray:
        return self.states[:, label]

    def ketbra(self, a: int, b: int) -> np.ndarray:
        return np.outer(self.states[:, a], self.states[:, b].conj())


def get_convention(name: str) -> BasisConvention:
    if name == "default":
        return BasisConvention.default()
    if name == "local":
        return BasisConvention.local()
    raise ValueError(f"unknown basis convention {name!r} (use 'default' or 'local')")


# the two operator families over the label states: entries are
# (coefficient, bra-label, ket-label) triples summed into a matrix
_Y_TERMS = {
    1: [(1, None, None)],
    2: [(1, 0, 0), (1, 1, 1)],
    3: [(1, 2, 2), (-1, 3, 3)],
    4: [(1, 2, 3)],
    5: [(1, 3, 2)],
    6: [(1, 0, 0), (-1, 1, 1)],
    7: [(1, 1, 2)],
    8: [(1, 2, 1)],
    9: [(1, 1, 3)],
    10: [(1, 3, 1)],
    11: [(1, 0, 2)],
    12: [(1, 2, 0)],
    13: [(1, 0, 3)],
    14: [(1, 3, 0)],
    15: [(1, 0, 1), (1, 1, 0)],
    16: [(-1j, 1, 0), (1j, 0, 1)],
}

_YTILDE_TERMS = dict(_Y_TERMS)
_YTILDE_TERMS.update(
    {
        7: [(1, 0, 2), (-1, 1, 2)],
        8: [(1, 2, 0), (-1, 2, 1)],
        9: [(1, 0, 3), (-1, 1, 3)],
        10: [(1, 3, 0), (-1, 3, 1)],
        11: [(1, 0, 2), (1, 1, 2)],
        12: [(1, 2, 0), (1, 2, 1)],
        13: [(1, 0, 3), (1, 1, 3)],
        14: [(1, 3, 0), (1, 3, 1)],
    }
)


@dataclass(frozen=True)
class OperatorBasis:
    """An indexed family of 16 two-qubit operators (Y, Ytilde, or R)."""

    family: str
    elements: tuple

    def element(self, index: int) -> np.ndarray:
        """1-based access matching the conventional numbering."""
        return self.elements[index - 1]


def _terms_to_matrix(terms, conv: BasisConvention) -> np.ndarray:
    m = np.zeros((4, 4), dtype=complex)
    for coeff, a, b in terms:
        if a is None:
            m += coeff * np.eye(4)
        else:
            m += coeff * conv.ketbra(a, b)
    return m


def build_basis(family: str, basis: BasisConvention | None = None) -> OperatorBasis:
    """Build one of the three operator families.

    Y and Ytilde depend on the label convention; R is the fixed orthogonal
    Pauli-product family (Tr R_j R_k = 4 delta_jk) in the computational basis,
    independent of the convention.
    """
    conv = basis if basis is not None else BasisConvention.default()
    if family == "Y":
        els = tuple(_terms_to_matrix(_Y_TERMS[i], conv) for i in range(1, 17))
    elif family == "Ytilde":
        els = tuple(_terms_to_matrix(_YTILDE_TERMS[i], conv) for i in range(1, 17))
    elif family == "R":
        els = tuple(kron(a, b) for a in PAULIS for b in PAULIS)
    else:
        raise ValueError(f"unknown operator family {family!r}")
    return OperatorBasis(family=family, elements=els)


def lift_to_full(op: np.ndarray, n_bath_spins: int) -> np.ndarray:
    """Extend a system operator to the joint space: op (x) identity on the bath."""
    if n_bath_spins < 0:
        raise ValueError("n_bath_spins must be >= 0")
    if n_bath_spins == 0:
        return np.asarray(op, dtype=complex)
    return kron(op, np.eye(2**n_bath_spins, dtype=complex))


@dataclass(frozen=True)
class ControlOperator:
    """A named Hermitian involution acting on the two system qubits."""

    name: str
    sys_matrix: np.ndarray
    full_matrix: np.ndarray = field(repr=False)

    def lift(self, n_bath_spins: int) -> np.ndarray:
        return lift_to_full(self.sys_matrix, n_bath_spins)


def build_control(name: str, basis: BasisConvention | None = None) -> ControlOperator:
    """Construct a control operator from its label-state projector form."""
    conv = basis if basis is not None else BasisConvention.default()
    eye = np.eye(4, dtype=complex)
    kb = conv.ketbra
    if name == "X0":
        m = 2 * kb(0, 0) - eye
    elif name == "X1":
        m = 2 * kb(1, 1) - eye
    elif name == "Xphi":
        v = conv.ket(0) + conv.ket(1)
        m = np.outer(v, v.conj()) - eye
    elif name in ("X01", "Z1"):
        m = 2 * (kb(0, 0) + kb(1, 1)) - eye
    elif name == "Z2":
        m = kb(0, 0) - kb(1, 1) + kb(2, 2) - kb(3, 3)
    elif name == "Z3":
        m = kb(0, 1) + kb(1, 0) + kb(2, 3) + kb(3, 2)
    elif name == "Z4":
        m = kb(0, 2) + kb(2, 0) + kb(1, 3) + kb(3, 1)
    else:
        raise ValueError(f"unknown control operator {name!r}")
    if np.abs(m - m.conj().T).max() > 1e-14 or np.abs(m @ m - eye).max() > 1e-14:
        raise ValueError(f"control {name} violates the involution contract")
    return ControlOperator(name=name, sys_matrix=m, full_matrix=lift_to_full(m, DEFAULT_BATH_SPINS))


@dataclass(frozen=True)
class SystemState:
    """Pure two-qubit state, amplitudes in the computational basis."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.shape != (4,):
            raise ValueError(f"amplitudes must have length 4, got shape {a.shape}")
        if abs(np.linalg.norm(a) - 1) > 1e-12:
            raise ValueError("state is not normalized")
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def from_pair(cls, alpha: complex, beta: complex, basis: BasisConvention | None = None) -> "SystemState":
        """alpha|0> + beta|1> in the given label convention."""
        conv = basis if basis is not None else BasisConvention.default()
        return cls(alpha * conv.ket(0) + beta * conv.ket(1))

    def density(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())
