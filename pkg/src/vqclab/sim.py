"""Dense statevector simulation.

Convention: qubit 0 is the least-significant bit of the amplitude index.
All kernels operate on batches of states shaped (B, 2**n) so that many
parameter samples evolve through the same circuit in one vectorized pass;
``simulate`` wraps the batch of one.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .circuit import Circuit, Const, GateKind

MAX_QUBITS = 24

_SX = np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=np.complex128) / 2
_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)
_FIXED_1Q = {GateKind.SX: _SX, GateKind.H: _H}


@lru_cache(maxsize=None)
def _cx_sources(n: int, control: int, target: int) -> np.ndarray:
    idx = np.arange(1 << n)
    src = idx ^ (((idx >> control) & 1) << target)
    src.setflags(write=False)
    return src


@lru_cache(maxsize=None)
def _swap_sources(n: int, a: int, b: int) -> np.ndarray:
    idx = np.arange(1 << n)
    diff = ((idx >> a) ^ (idx >> b)) & 1
    src = idx ^ (diff << a) ^ (diff << b)
    src.setflags(write=False)
    return src


@lru_cache(maxsize=None)
def _flip_sources(n: int, q: int) -> np.ndarray:
    src = np.arange(1 << n) ^ (1 << q)
    src.setflags(write=False)
    return src


@lru_cache(maxsize=None)
def _z_signs(n: int, q: int) -> np.ndarray:
    signs = 1.0 - 2.0 * ((np.arange(1 << n) >> q) & 1)
    signs.setflags(write=False)
    return signs


def _as_column(x) -> object:
    """Shape per-batch coefficients for broadcasting over (B, outer, inner)."""
    if isinstance(x, np.ndarray) and x.ndim == 1:
        return x[:, None, None]
    return x


def _apply_matrix_1q(states: np.ndarray, n: int, q: int, m00, m01, m10, m11) -> None:
    view = states.reshape(states.shape[0], 1 << (n - 1 - q), 2, 1 << q)
    s0 = view[:, :, 0, :].copy()
    s1 = view[:, :, 1, :]
    view[:, :, 0, :] = _as_column(m00) * s0 + _as_column(m01) * s1
    view[:, :, 1, :] = _as_column(m10) * s0 + _as_column(m11) * s1


def apply_kind(
    states: np.ndarray,
    n: int,
    kind: GateKind,
    qubits: tuple[int, ...],
    angle=None,
    inverse: bool = False,
) -> np.ndarray:
    """Apply one gate to a batch of states (B, 2**n); returns the new batch.

    ``angle`` is a float or a length-B array for rotation kinds, ignored
    otherwise. Rotations and permutation gates mutate in place where
    possible; callers must treat the input buffer as consumed.
    """
    if kind is GateKind.CX:
        return states[:, _cx_sources(n, qubits[0], qubits[1])]
    if kind is GateKind.SWAP:
        return states[:, _swap_sources(n, qubits[0], qubits[1])]
    if kind is GateKind.X:
        return states[:, _flip_sources(n, qubits[0])]
    q = qubits[0]
    if kind is GateKind.RZ:
        half = np.asarray(angle) / 2.0
        if inverse:
            half = -half
        p0 = _as_column(np.exp(-1j * half))
        p1 = _as_column(np.exp(1j * half))
        view = states.reshape(states.shape[0], 1 << (n - 1 - q), 2, 1 << q)
        view[:, :, 0, :] *= p0
        view[:, :, 1, :] *= p1
        return states
    if kind in (GateKind.RX, GateKind.RY):
        half = np.asarray(angle) / 2.0
        if inverse:
            half = -half
        c, s = np.cos(half), np.sin(half)
        if kind is GateKind.RX:
            _apply_matrix_1q(states, n, q, c, -1j * s, -1j * s, c)
        else:
            _apply_matrix_1q(states, n, q, c, -s, s, c)
        return states
    m = _FIXED_1Q[kind]
    if inverse:
        m = m.conj().T
    _apply_matrix_1q(states, n, q, m[0, 0], m[0, 1], m[1, 0], m[1, 1])
    return states


def apply_pauli(states: np.ndarray, n: int, pauli: str, q: int) -> np.ndarray:
    """Return Pauli X, Y or Z applied to a batch of states (input untouched)."""
    if pauli == "Z":
        return states * _z_signs(n, q)
    flipped = states[:, _flip_sources(n, q)]
    if pauli == "X":
        return flipped
    if pauli == "Y":
        # Y|0> = i|1>, Y|1> = -i|0>: amplitude landing on bit=1 gains +i
        factors = np.where((np.arange(1 << n) >> q) & 1, 1j, -1j)
        return flipped * factors
    raise ValueError(f"unknown pauli {pauli!r}")


def zero_states(batch: int, n: int) -> np.ndarray:
    states = np.zeros((batch, 1 << n), dtype=np.complex128)
    states[:, 0] = 1.0
    return states


def simulate(circuit: Circuit, *, validate_norm: bool = False) -> np.ndarray:
    """Evolve |0...0> through a concrete circuit and return the statevector.

    With ``validate_norm`` the norm is checked after every gate against a
    1e-12 budget per gate application.
    """
    if not circuit.is_concrete:
        raise ValueError("circuit has unbound symbols; bind() it first")
    if circuit.num_qubits > MAX_QUBITS:
        raise ValueError(f"{circuit.num_qubits} qubits exceeds the {MAX_QUBITS}-qubit simulator cap")
    states = zero_states(1, circuit.num_qubits)
    for i, g in enumerate(circuit.gates, start=1):
        angle = g.param.angle if isinstance(g.param, Const) else None
        states = apply_kind(states, circuit.num_qubits, g.kind, g.qubits, angle)
        if validate_norm:
            norm = float(np.sum(np.abs(states[0]) ** 2))
            if abs(norm - 1.0) > 1e-12 * i:
                raise AssertionError(f"norm drifted to {norm} after gate {i}")
    final = float(np.sum(np.abs(states[0]) ** 2))
    if abs(final - 1.0) > 1e-12 * max(1, len(circuit.gates)):
        raise AssertionError(f"final norm {final} out of tolerance")
    return states[0]


def state_expect_z(state: np.ndarray, n: int, qubit: int) -> float:
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} out of range for {n} qubits")
    probs = np.abs(state) ** 2
    return float(probs @ _z_signs(n, qubit))


def expect_z(circuit: Circuit, qubit: int) -> float:
    """Expectation of Pauli Z on ``qubit`` after running the circuit on |0...0>."""
    if not 0 <= qubit < circuit.num_qubits:
        raise ValueError(f"qubit {qubit} out of range for {circuit.num_qubits} qubits")
    return state_expect_z(simulate(circuit), circuit.num_qubits, qubit)
