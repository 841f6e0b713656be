"""
Dense operator algebra on the truncated qubit (x) cavity Hilbert space.

Operators, kets and density matrices are plain complex ``numpy`` arrays.
Basis conventions used throughout the package:

* qubit index 0 is ``|g>``, index 1 is ``|e>``; ``sigma_z = diag(-1, +1)``
  so that ``(w_q / 2) sigma_z`` puts ``|e>`` above ``|g>``;
* ``sigma_plus = |e><g|`` and ``sigma_y = -i (sigma_plus - sigma_minus)``,
  which keeps ``[sigma_x, sigma_y] = 2i sigma_z``;
* composite states are ordered qubit first, cavity second: ``|q> (x) |n>``
  lives at index ``q * n_fock + n``.
"""

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import DimensionMismatch, NotHermitian

HERMITIAN_RTOL = 1e-12


def qeye(n):
    return np.eye(n, dtype=complex)


def destroy(n_fock):
    """Cavity annihilation operator truncated to Fock levels ``0 .. n_fock-1``."""
    if n_fock < 2:
        raise ValueError(f"Fock cutoff must be >= 2, got {n_fock}")
    return np.diag(np.sqrt(np.arange(1, n_fock, dtype=float)), k=1).astype(complex)


def create(n_fock):
    return destroy(n_fock).conj().T


def num(n_fock):
    return np.diag(np.arange(n_fock, dtype=float)).astype(complex)


def sigma_minus():
    return np.array([[0, 1], [0, 0]], dtype=complex)


def sigma_plus():
    return np.array([[0, 0], [1, 0]], dtype=complex)


def sigma_x():
    return np.array([[0, 1], [1, 0]], dtype=complex)


def sigma_y():
    return -1j * (sigma_plus() - sigma_minus())


def sigma_z():
    return np.array([[-1, 0], [0, 1]], dtype=complex)


def tensor(*ops):
    """Kronecker product of the operators, first factor outermost."""
    mats = [np.asarray(op) for op in ops]
    for m in mats:
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"tensor expects square matrices, got shape {m.shape}")
    return reduce(np.kron, mats)


def basis(dim, index):
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def qubit_cavity_ket(qubit, n, n_fock):
    """``|q, n>`` with ``qubit`` either 0/1 or ``'g'``/``'e'``."""
    q = {"g": 0, "e": 1}.get(qubit, qubit)
    if q not in (0, 1) or not 0 <= n < n_fock:
        raise ValueError(f"no basis state |{qubit},{n}> for n_fock={n_fock}")
    return basis(2 * n_fock, q * n_fock + n)


def ket2dm(psi):
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def dag(a):
    return np.asarray(a).conj().T


def commutator(a, b):
    return a @ b - b @ a


def is_hermitian(a, rtol=HERMITIAN_RTOL):
    a = np.asarray(a)
    scale = np.abs(a).max() if a.size else 0.0
    return np.abs(a - a.conj().T).max() <= rtol * max(scale, np.finfo(float).tiny)


def expect(obs, rho):
    """``tr(obs @ rho)`` for a density matrix, or ``<psi|obs|psi>`` for a ket."""
    obs = np.asarray(obs)
    rho = np.asarray(rho)
    if obs.shape[0] != rho.shape[0]:
        raise DimensionMismatch(f"operator dim {obs.shape[0]} != state dim {rho.shape[0]}")
    if rho.ndim == 1:
        return complex(np.vdot(rho, obs @ rho))
    # tr(AB) = sum_ij A_ij B_ji
    return complex(np.einsum("ij,ji->", obs, rho))


def eig_hermitian(h):
    """Eigen-decomposition of a Hermitian matrix.

    Returns
    -------
    evals : ndarray
        Real eigenvalues in ascending order.
    evecs : ndarray
        Unitary matrix whose columns are the eigenvectors.
    """
    h = np.asarray(h)
    if not is_hermitian(h, rtol=1e-10):
        raise NotHermitian("eig_hermitian requires a Hermitian matrix")
    return np.linalg.eigh(0.5 * (h + h.conj().T))


def partial_trace_cavity(rho, n_fock):
    """Reduced 2x2 qubit density matrix (cavity traced out)."""
    r = np.asarray(rho).reshape(2, n_fock, 2, n_fock)
    return np.einsum("injn->ij", r)


def partial_trace_qubit(rho, n_fock):
    r = np.asarray(rho).reshape(2, n_fock, 2, n_fock)
    return np.einsum("aiaj->ij", r)


@dataclass(frozen=True)
class QubitCavityOps:
    """Standard operators embedded in the ``2 * n_fock`` composite space."""

    n_fock: int
    a: np.ndarray
    adag: np.ndarray
    n: np.ndarray
    sm: np.ndarray
    sp: np.ndarray
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    identity: np.ndarray

    @property
    def dim(self):
        return 2 * self.n_fock

    def qubit(self, op2):
        """Embed a 2x2 qubit operator."""
        return tensor(op2, qeye(self.n_fock))

    def cavity(self, op):
        return tensor(qeye(2), op)


def qubit_cavity_ops(n_fock):
    a = destroy(n_fock)
    i_c = qeye(n_fock)
    i_q = qeye(2)
    ops = dict(
        a=tensor(i_q, a),
        adag=tensor(i_q, a.conj().T),
        n=tensor(i_q, num(n_fock)),
        sm=tensor(sigma_minus(), i_c),
        sp=tensor(sigma_plus(), i_c),
        sx=tensor(sigma_x(), i_c),
        sy=tensor(sigma_y(), i_c),
        sz=tensor(sigma_z(), i_c),
        identity=qeye(2 * n_fock),
    )
    for m in ops.values():
        m.setflags(write=False)
    return QubitCavityOps(n_fock=n_fock, **ops)
