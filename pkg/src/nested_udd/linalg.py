"""Dense complex matrix kernels for small quantum systems.

Everything here is sized for 4x4 system operators and joint spaces up to a few
hundred dimensions (32 for the default five-spin model). Matrices are plain
complex numpy arrays; propagation uses a cached Hermitian eigendecomposition so
that each drift interval costs two dense transforms instead of a fresh matrix
exponential.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HERMITICITY_TOL = 1e-10


class NumericalFault(RuntimeError):
    """Raised when a numerical guarantee (norm, convergence) is violated."""


def _as_square(m: np.ndarray, name: str) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.view(float))):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with `a` on the slow (outer) indices."""
    a = _as_square(a, "a")
    b = _as_square(b, "b")
    return np.kron(a, b)


@dataclass(frozen=True)
class HermEig:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    # adjoint cached once; reused for every drift interval
    _vh: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_vh", self.eigenvectors.conj().T)

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]


def herm_eig(h: np.ndarray) -> HermEig:
    """Eigendecompose `h`, symmetrizing first.

    Asymmetry up to 1e-10 (relative to the largest entry) is tolerated and
    averaged away; anything larger is an input error, not floating-point noise.
    """
    h = _as_square(h, "h")
    scale = max(1.0, np.abs(h).max())
    asym = np.abs(h - h.conj().T).max()
    if asym > HERMITICITY_TOL * scale:
        raise ValueError(f"matrix is not Hermitian: asymmetry {asym:.3e}")
    h = (h + h.conj().T) / 2
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericalFault(f"eigensolver failed to converge: {exc}; matrix:\n{h!r}") from exc
    return HermEig(eigenvalues=w, eigenvectors=v)


def propagator(e: HermEig, tau: float) -> np.ndarray:
    """Unitary exp(-i H tau) from the cached eigendecomposition."""
    if not np.isfinite(tau) or tau < 0:
        raise ValueError(f"tau must be finite and >= 0, got {tau}")
    phases = np.exp(-1j * e.eigenvalues * tau)
    return (e.eigenvectors * phases) @ e._vh


def apply_propagator(e: HermEig, tau: float, psi: np.ndarray) -> np.ndarray:
    """Apply exp(-i H tau) to a state (or a stack of state columns)."""
    if not np.isfinite(tau) or tau < 0:
        raise ValueError(f"tau must be finite and >= 0, got {tau}")
    phases = np.exp(-1j * e.eigenvalues * tau)
    if psi.ndim == 1:
        return e.eigenvectors @ (phases * (e._vh @ psi))
    return e.eigenvectors @ (phases[:, None] * (e._vh @ psi))


def partial_trace_bath(rho_full: np.ndarray, sys_dim: int, bath_dim: int) -> np.ndarray:
    """Trace out the bath (fast indices) of a joint density matrix."""
    rho_full = _as_square(rho_full, "rho_full")
    if rho_full.shape[0] != sys_dim * bath_dim:
        raise ValueError(
            f"dimension mismatch: {rho_full.shape[0]} != {sys_dim} * {bath_dim}"
        )
    r = rho_full.reshape(sys_dim, bath_dim, sys_dim, bath_dim)
    return np.einsum("abcb->ac", r)


def reduced_from_state(psi: np.ndarray, sys_dim: int) -> np.ndarray:
    """Reduced system density matrix of a pure joint state, without forming
    the joint density matrix."""
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1 or psi.size % sys_dim != 0:
        raise ValueError(f"state of size {psi.size} does not factor by sys_dim {sys_dim}")
    a = psi.reshape(sys_dim, -1)
    return a @ a.conj().T


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Trace distance (1/2)||rho - sigma||_1 via eigenvalues of the difference."""
    rho = _as_square(rho, "rho")
    sigma = _as_square(sigma, "sigma")
    if rho.shape != sigma.shape:
        raise ValueError(f"shape mismatch: {rho.shape} vs {sigma.shape}")
    for name, m in (("rho", rho), ("sigma", sigma)):
        if np.abs(m - m.conj().T).max() > 1e-8:
            raise ValueError(f"{name} is not Hermitian within 1e-8")
    diff = (rho - sigma + (rho - sigma).conj().T) / 2
    return 0.5 * float(np.abs(np.linalg.eigvalsh(diff)).sum())
