"""Parameter-shift gradients and gradient-variance statistics.

The trainability proxy is GradVar: draw parameter vectors uniformly from
[0, 2*pi), evaluate the full gradient of <Z_cost> at each draw, and
average the per-parameter sample variances. Sample i of a run draws its
angles from an independent splitmix64 stream seeded ``seed + i*GOLDEN``,
so parallel and serial evaluation orders agree bit for bit.

``param_shift_gradient`` evaluates the shift rule literally: the angle of
each symbol occurrence is shifted by +-pi/2 and the expectation values
are differenced. ``grad_variance`` computes the same values through a
forward/backward sweep over cached statevectors, which is algebraically
identical for Pauli rotations and is regression-tested against the
literal rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum, unique
from typing import Sequence

import numpy as np

from .circuit import ROTATION_KINDS, Affine, Circuit, Const, Gate, GateKind
from .rng import GOLDEN, angles_from_u64, mix64_array
from .sim import MAX_QUBITS, apply_kind, apply_pauli, state_expect_z, zero_states
from .transpiler import FromLogical, TranspiledCircuit

_PAULI_OF = {GateKind.RX: "X", GateKind.RY: "Y", GateKind.RZ: "Z"}


@unique
class ReparamMode(Enum):
    ALL_ANGLES = "all-angles"
    SYMBOL_DERIVED = "symbol-derived"


@dataclass(frozen=True)
class GradStats:
    """Gradient statistics over uniformly sampled parameter vectors.

    ``grad_var`` is the mean of the per-parameter unbiased variances.
    ``stderr`` uses the large-sample approximation for a variance
    estimate, grad_var * sqrt(2 / (samples - 1)).
    """

    per_param_var: tuple[float, ...]
    per_param_mean: tuple[float, ...]
    grad_var: float
    samples: int
    seed: int
    warning: str | None = None

    @property
    def num_params(self) -> int:
        return len(self.per_param_var)

    @property
    def stderr(self) -> float:
        return self.grad_var * math.sqrt(2.0 / (self.samples - 1))


def free_all_angles(circuit: Circuit) -> Circuit:
    """Give every rotation gate its own fresh symbol (coeff +1, offset 0)."""
    gates: list[Gate] = []
    count = 0
    for g in circuit.gates:
        if g.kind in ROTATION_KINDS:
            gates.append(replace(g, param=Affine(count, 1, 0.0)))
            count += 1
        else:
            gates.append(g)
    return Circuit(circuit.num_qubits, tuple(gates), count)


def reparameterize(t: TranspiledCircuit, mode: ReparamMode) -> Circuit:
    """Choose the trainable parameter space of a transpiled circuit.

    ALL_ANGLES frees every rotation angle, synthesized constants included,
    as an independent parameter. SYMBOL_DERIVED restores the logical
    symbol space: angles that came from a logical symbol keep their
    affine expression, synthesized angles stay constant.
    """
    if mode is ReparamMode.ALL_ANGLES:
        return free_all_angles(t.physical)
    num_logical = t.metrics_before.num_symbols
    exprs: list[Const | Affine] = []
    seen: set[int] = set()
    for origin in t.provenance:
        if isinstance(origin, FromLogical):
            exprs.append(Affine(origin.symbol, origin.coeff, origin.offset))
            seen.add(origin.symbol)
        else:
            exprs.append(Const(origin.value))
    missing = set(range(num_logical)) - seen
    if missing:
        raise ValueError(f"logical symbol(s) {sorted(missing)} did not survive transpilation")
    gates: list[Gate] = []
    it = iter(exprs)
    for g in t.physical.gates:
        gates.append(replace(g, param=next(it)) if g.kind in ROTATION_KINDS else g)
    return Circuit(t.physical.num_qubits, tuple(gates), num_logical)


# ---------------------------------------------------------------------------
# Sampling


def sample_thetas(seed: int, samples: int, num_params: int) -> np.ndarray:
    """Uniform draws from [0, 2*pi), shaped (samples, num_params).

    Sample i reads its angles from the splitmix64 stream seeded
    ``seed + i*GOLDEN`` (mod 2**64); draw j of that stream mixes state
    ``seed + (i + j + 1)*GOLDEN``, so the whole matrix vectorizes.
    """
    i = np.arange(samples, dtype=np.uint64)[:, None]
    j = np.arange(num_params, dtype=np.uint64)[None, :]
    counter = i + j + np.uint64(1)
    state = np.uint64(seed & ((1 << 64) - 1)) + counter * np.uint64(GOLDEN)
    return angles_from_u64(mix64_array(state))


# ---------------------------------------------------------------------------
# Gradients


def _resolved_angles(circuit: Circuit, theta: Sequence[float]) -> list[float | None]:
    """Concrete angle per gate (None for non-rotation gates)."""
    angles: list[float | None] = []
    for g in circuit.gates:
        if g.kind in ROTATION_KINDS:
            if isinstance(g.param, Affine):
                angles.append(g.param.coeff * float(theta[g.param.symbol]) + g.param.offset)
            else:
                angles.append(g.param.angle)
        else:
            angles.append(None)
    return angles


def _expectation(circuit: Circuit, angles: Sequence[float | None], cost_qubit: int) -> float:
    states = zero_states(1, circuit.num_qubits)
    for g, angle in zip(circuit.gates, angles):
        states = apply_kind(states, circuit.num_qubits, g.kind, g.qubits, angle)
    return state_expect_z(states[0], circuit.num_qubits, cost_qubit)


def param_shift_gradient(circuit: Circuit, theta: Sequence[float], cost_qubit: int = 0) -> np.ndarray:
    """Exact gradient of <Z_cost> via the parameter-shift rule.

    For each occurrence of a symbol, the occurrence's angle is shifted by
    +-pi/2 and the expectations differenced; occurrences are summed with
    their affine coefficients.
    """
    if len(theta) != circuit.num_symbols:
        raise ValueError(
            f"parameter count mismatch: circuit has {circuit.num_symbols} symbols, got {len(theta)}"
        )
    if not 0 <= cost_qubit < circuit.num_qubits:
        raise ValueError(f"cost qubit {cost_qubit} out of range")
    base = _resolved_angles(circuit, theta)
    grad = np.zeros(circuit.num_symbols)
    for idx, g in enumerate(circuit.gates):
        if not isinstance(g.param, Affine):
            continue
        shifted = list(base)
        shifted[idx] = base[idx] + math.pi / 2
        plus = _expectation(circuit, shifted, cost_qubit)
        shifted[idx] = base[idx] - math.pi / 2
        minus = _expectation(circuit, shifted, cost_qubit)
        grad[g.param.symbol] += g.param.coeff * (plus - minus) / 2.0
    return grad


def _gradients_batched(circuit: Circuit, thetas: np.ndarray, cost_qubit: int) -> np.ndarray:
    """Shift-rule gradients for a batch of parameter vectors, shape (B, P).

    One forward pass caches the final state; the backward pass un-applies
    each gate from both the state and the Z-projected costate, reading off
    each occurrence's shift-rule value as Im<costate|Pauli|state>.
    """
    n = circuit.num_qubits
    if n > MAX_QUBITS:
        raise ValueError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit simulator cap")
    batch = thetas.shape[0]
    angles: list[np.ndarray | float | None] = []
    for g in circuit.gates:
        if g.kind not in ROTATION_KINDS:
            angles.append(None)
        elif isinstance(g.param, Affine):
            angles.append(g.param.coeff * thetas[:, g.param.symbol] + g.param.offset)
        else:
            angles.append(g.param.angle)

    psi = zero_states(batch, n)
    for g, angle in zip(circuit.gates, angles):
        psi = apply_kind(psi, n, g.kind, g.qubits, angle)
    lam = apply_pauli(psi, n, "Z", cost_qubit)

    grads = np.zeros((batch, circuit.num_symbols))
    for g, angle in zip(reversed(circuit.gates), reversed(angles)):
        if isinstance(g.param, Affine):
            contrib = np.einsum(
                "bi,bi->b", np.conj(lam), apply_pauli(psi, n, _PAULI_OF[g.kind], g.qubits[0])
            ).imag
            grads[:, g.param.symbol] += g.param.coeff * contrib
        psi = apply_kind(psi, n, g.kind, g.qubits, angle, inverse=True)
        lam = apply_kind(lam, n, g.kind, g.qubits, angle, inverse=True)
    return grads


def grad_variance(circuit: Circuit, samples: int, seed: int, cost_qubit: int = 0) -> GradStats:
    """GradVar of a circuit: mean per-parameter gradient variance under
    uniform parameter draws. Deterministic in (circuit, samples, seed)."""
    if samples < 2:
        raise ValueError(f"need at least 2 samples, got {samples}")
    if not 0 <= cost_qubit < circuit.num_qubits:
        raise ValueError(f"cost qubit {cost_qubit} out of range")
    if circuit.num_symbols == 0:
        return GradStats(
            per_param_var=(),
            per_param_mean=(),
            grad_var=0.0,
            samples=samples,
            seed=seed,
            warning="circuit has no trainable parameters",
        )
    thetas = sample_thetas(seed, samples, circuit.num_symbols)
    grads = _gradients_batched(circuit, thetas, cost_qubit)
    per_var = grads.var(axis=0, ddof=1)
    per_mean = grads.mean(axis=0)
    return GradStats(
        per_param_var=tuple(float(v) for v in per_var),
        per_param_mean=tuple(float(m) for m in per_mean),
        grad_var=float(per_var.mean()),
        samples=samples,
        seed=seed,
    )


def delta_gradvar(phys: GradStats, log: GradStats) -> float:
    """Trainability shift: positive means amplification after transpilation."""
    return phys.grad_var - log.grad_var
