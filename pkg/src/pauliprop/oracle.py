"""Dense brute-force reference simulators for small systems.

Everything here is exponential in the number of qubits and exists to check
the sparse machinery.  Gates are simulated from their matrices and Kraus
operators, never from the Pauli look-up tables.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .gates import PAULI_MATRICES
from .overlaps import ProductStabilizerState
from .pauli_sum import PauliSum, coeff_value
from .propagation import Circuit

MAX_STATEVECTOR_QUBITS = 10
MAX_HEISENBERG_QUBITS = 6

_PAULI_STACK = np.stack(PAULI_MATRICES)  # (4, 2, 2)
_SINGLE = {"zero": np.array([1, 0], dtype=complex),
           "plus": np.array([1, 1], dtype=complex) / np.sqrt(2)}


class OracleGuardError(ValueError):
    """System too large for dense simulation."""


def _guard(n: int, limit: int) -> None:
    if n > limit:
        raise OracleGuardError(f"{n} qubits exceeds the dense limit of {limit}")


def _apply_local(tensor: np.ndarray, op: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    """Contract ``op`` (a ``2**k`` square matrix) into ``axes`` of ``tensor``."""
    k = len(axes)
    op = op.reshape((2,) * (2 * k))
    out = np.tensordot(op, tensor, axes=(list(range(k, 2 * k)), list(axes)))
    return np.moveaxis(out, list(range(k)), list(axes))


def stabilizer_vector(rho: ProductStabilizerState) -> np.ndarray:
    vecs = []
    for a, s in zip(rho.axes, rho.signs):
        vals, vecs_ = np.linalg.eigh(PAULI_MATRICES[a])
        vecs.append(vecs_[:, int(np.argmin(np.abs(vals - s)))])
    return _kron_all(vecs)


def _kron_all(vecs) -> np.ndarray:
    out = np.ones(1, dtype=complex)
    for v in vecs:
        out = np.kron(out, v)
    return out


def pauli_sum_matrix(s: PauliSum) -> np.ndarray:
    """Dense ``sum_w c_w P_w`` (site 1 is the leftmost tensor factor)."""
    n = s.nqubits
    coeffs = np.zeros(4 ** n, dtype=complex)
    for w, c in s.terms.items():
        coeffs[w] = coeff_value(c)
    return coefficients_to_matrix(coeffs, n)


def coefficients_to_matrix(coeffs: np.ndarray, n: int) -> np.ndarray:
    # axes ordered (a_n, ..., a_1) because site 1 is the least significant digit
    t = np.asarray(coeffs, dtype=complex).reshape((4,) * n)
    t = np.transpose(t, list(range(n))[::-1])  # now (a_1, ..., a_n)
    for _ in range(n):
        # contract the leading Pauli index, append (row, col) of that site
        t = np.tensordot(t, _PAULI_STACK, axes=([0], [0]))
    # axes are now (r1, c1, r2, c2, ...)
    t = np.transpose(t, [2 * i for i in range(n)] + [2 * i + 1 for i in range(n)])
    return t.reshape(2 ** n, 2 ** n)


def matrix_to_coefficients(op: np.ndarray, n: int) -> np.ndarray:
    """Real coefficients ``Tr[P_w op] / 2**n`` indexed by word value."""
    t = np.asarray(op, dtype=complex).reshape((2,) * (2 * n))
    # interleave to (r1, c1, r2, c2, ...)
    t = np.transpose(t, [x for i in range(n) for x in (i, n + i)])
    for _ in range(n):
        # Tr[P_a X] = sum_{r,c} P_a[c, r] X[r, c]
        t = np.tensordot(t, _PAULI_STACK, axes=([0, 1], [2, 1]))
    # axes now (a_1, ..., a_n); word index wants a_n most significant
    t = np.transpose(t, list(range(n))[::-1])
    c = t.reshape(-1) / 2 ** n
    if np.abs(c.imag).max(initial=0) > 1e-9:
        raise ValueError("operator is not Hermitian")
    return c.real


def _initial_state(state, n: int):
    """Return ``("vec", psi)`` or ``("rho", matrix)``."""
    if isinstance(state, ProductStabilizerState):
        if state.nqubits != n:
            raise ValueError("state size mismatch")
        return "vec", stabilizer_vector(state)
    if isinstance(state, PauliSum):
        if state.nqubits != n:
            raise ValueError("state size mismatch")
        return "rho", pauli_sum_matrix(state)
    if isinstance(state, np.ndarray):
        if state.shape == (2 ** n,):
            return "vec", state.astype(complex)
        if state.shape == (2 ** n, 2 ** n):
            return "rho", state.astype(complex)
        raise ValueError("state array has the wrong shape")
    if state in _SINGLE:
        return "vec", _kron_all([_SINGLE[state]] * n)
    bits = [int(b) for b in state]
    if len(bits) != n or any(b not in (0, 1) for b in bits):
        raise ValueError(f"bad computational basis state {state!r}")
    psi = np.zeros(2 ** n, dtype=complex)
    psi[int("".join(map(str, bits)), 2)] = 1
    return "vec", psi


def _kraus_sequence(circ: Circuit, thetas):
    angles = circ.angles(thetas)
    return [([np.asarray(k, dtype=complex) for k in g.matrix_kraus(th)], [s - 1 for s in g.sites])
            for g, th in zip(circ.gates, angles)]


def dense_expectation(circ: Circuit, thetas: Optional[Sequence[float]], observable: PauliSum,
                      state="zero") -> float:
    """``Tr[E(rho) O]`` by forward Schrödinger simulation."""
    n = circ.nqubits
    _guard(n, MAX_STATEVECTOR_QUBITS)
    if observable.nqubits != n:
        raise ValueError("observable size mismatch")
    ops = _kraus_sequence(circ, thetas)
    kind, init = _initial_state(state, n)
    obs = pauli_sum_matrix(observable)
    if kind == "vec" and all(len(ks) == 1 for ks, _ in ops):
        psi = init.reshape((2,) * n)
        for (k,), axes in ops:
            psi = _apply_local(psi, k, axes)
        psi = psi.reshape(-1)
        return float(np.real(np.vdot(psi, obs @ psi)))
    rho = np.outer(init, init.conj()) if kind == "vec" else init
    rho = rho.reshape((2,) * (2 * n))
    for ks, axes in ops:
        col_axes = [n + a for a in axes]
        new = 0
        for k in ks:
            t = _apply_local(rho, k, axes)
            new = new + _apply_local(t, k.conj(), col_axes)
        rho = new
    rho = rho.reshape(2 ** n, 2 ** n)
    return float(np.real(np.trace(rho @ obs)))


def dense_heisenberg(circ: Circuit, thetas: Optional[Sequence[float]], observable: PauliSum) -> np.ndarray:
    """All ``4**n`` Pauli coefficients of the Heisenberg-evolved observable."""
    n = circ.nqubits
    _guard(n, MAX_HEISENBERG_QUBITS)
    if observable.nqubits != n:
        raise ValueError("observable size mismatch")
    op = pauli_sum_matrix(observable).reshape((2,) * (2 * n))
    for ks, axes in reversed(_kraus_sequence(circ, thetas)):
        col_axes = [n + a for a in axes]
        new = 0
        for k in ks:
            # K^dagger O K
            t = _apply_local(op, k.conj().T, axes)
            new = new + _apply_local(t, k.T, col_axes)
        op = new
    return matrix_to_coefficients(op.reshape(2 ** n, 2 ** n), n)


def dense_sum(coeffs: np.ndarray, n: int, tol: float = 0.0) -> PauliSum:
    """Sparse view of a dense coefficient vector."""
    idx = np.flatnonzero(np.abs(coeffs) > tol)
    return PauliSum(n, {int(i): float(coeffs[i]) for i in idx})
