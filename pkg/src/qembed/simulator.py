"""Dense statevector simulator with the gates needed for angle-embedded QNNs.

Qubit 0 is the least-significant bit of the basis-state index, so the
amplitude of ``|q_{n-1} ... q_1 q_0>`` lives at ``sum(q_k << k)``.

Two layers live here: a small value-semantics API (:class:`StateVector`,
:class:`GateOp`, :func:`apply_gate`, ...) and batched array kernels
(``*_batch``) that act on ``(rows, 2**n)`` arrays. Training drives the
batched kernels directly, one row per sample/parameter-shift circuit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import ConfigurationError

MAX_QUBITS = 20

ONE_QUBIT_KINDS = ("RX", "RY", "RZ", "Rot")
GATE_KINDS = ONE_QUBIT_KINDS + ("CNOT",)
_N_PARAMS = {"RX": 1, "RY": 1, "RZ": 1, "Rot": 3, "CNOT": 0}

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
# 4x4 CNOT in the (control, target) two-qubit basis |c t>, control as the high bit
CNOT_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


def _check_num_qubits(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_QUBITS:
        raise ConfigurationError(f"qubit count must be an integer in [1, {MAX_QUBITS}], got {n!r}")


# ---------------------------------------------------------------------------
# gate matrices (vectorized over leading axes of the angle arrays)
# ---------------------------------------------------------------------------


def rx_matrix(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    c = np.cos(theta / 2)
    s = np.sin(theta / 2)
    out = np.empty(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c
    out[..., 0, 1] = -1j * s
    out[..., 1, 0] = -1j * s
    out[..., 1, 1] = c
    return out


def ry_matrix(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    c = np.cos(theta / 2)
    s = np.sin(theta / 2)
    out = np.empty(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c
    out[..., 0, 1] = -s
    out[..., 1, 0] = s
    out[..., 1, 1] = c
    return out


def rz_matrix(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    out = np.zeros(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = np.exp(-0.5j * theta)
    out[..., 1, 1] = np.exp(0.5j * theta)
    return out


def rot_matrix(phi, theta, omega) -> np.ndarray:
    """``RZ(omega) @ RY(theta) @ RZ(phi)``: RZ(phi) acts on the state first."""
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    omega = np.asarray(omega, dtype=float)
    c = np.cos(theta / 2)
    s = np.sin(theta / 2)
    plus = 0.5 * (phi + omega)
    minus = 0.5 * (phi - omega)
    out = np.empty(np.broadcast(phi, theta, omega).shape + (2, 2), dtype=complex)
    out[..., 0, 0] = np.exp(-1j * plus) * c
    out[..., 0, 1] = -np.exp(1j * minus) * s
    out[..., 1, 0] = np.exp(-1j * minus) * s
    out[..., 1, 1] = np.exp(1j * plus) * c
    return out


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    num_qubits: int

    def __post_init__(self):
        _check_num_qubits(self.num_qubits)
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.num_qubits,):
            raise ConfigurationError(
                f"statevector for {self.num_qubits} qubits needs {1 << self.num_qubits} "
                f"amplitudes, got shape {amps.shape}"
            )
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def fidelity(self, other: "StateVector") -> float:
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)


@dataclass(frozen=True)
class GateOp:
    kind: str
    target: int
    control: int | None = None
    params: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ConfigurationError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if len(self.params) != _N_PARAMS[self.kind]:
            raise ConfigurationError(
                f"{self.kind} takes {_N_PARAMS[self.kind]} parameter(s), got {len(self.params)}"
            )
        if self.kind == "CNOT":
            if self.control is None:
                raise ConfigurationError("CNOT needs a control qubit")
            if self.control == self.target:
                raise ConfigurationError("CNOT control and target must differ")
        elif self.control is not None:
            raise ConfigurationError(f"{self.kind} takes no control qubit")

    @classmethod
    def rx(cls, theta: float, target: int) -> "GateOp":
        return cls("RX", target, params=(theta,))

    @classmethod
    def ry(cls, theta: float, target: int) -> "GateOp":
        return cls("RY", target, params=(theta,))

    @classmethod
    def rz(cls, theta: float, target: int) -> "GateOp":
        return cls("RZ", target, params=(theta,))

    @classmethod
    def rot(cls, phi: float, theta: float, omega: float, target: int) -> "GateOp":
        return cls("Rot", target, params=(phi, theta, omega))

    @classmethod
    def cnot(cls, control: int, target: int) -> "GateOp":
        return cls("CNOT", target, control=control)

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target,) if self.control is None else (self.control, self.target)

    def matrix(self) -> np.ndarray:
        """2x2 matrix for one-qubit gates; 4x4 in the ``|control target>`` basis for CNOT."""
        if self.kind == "RX":
            return rx_matrix(self.params[0])
        if self.kind == "RY":
            return ry_matrix(self.params[0])
        if self.kind == "RZ":
            return rz_matrix(self.params[0])
        if self.kind == "Rot":
            return rot_matrix(*self.params)
        return CNOT_MATRIX.copy()


def sel_ranges(num_qubits: int, num_layers: int) -> list[int]:
    """Entangling range of each layer: ``(layer mod (n-1)) + 1``, or 0 for a single qubit."""
    if num_qubits < 2:
        return [0] * num_layers
    return [(layer % (num_qubits - 1)) + 1 for layer in range(num_layers)]


def sel_cnot_pairs(num_qubits: int, entangling_range: int) -> list[tuple[int, int]]:
    """(control, target) pairs of one CNOT ring."""
    if num_qubits == 1:
        return []
    if num_qubits == 2:
        return [(0, 1)]
    return [(q, (q + entangling_range) % num_qubits) for q in range(num_qubits)]


@dataclass(frozen=True)
class SelAnsatz:
    """Strongly entangling layers: per-qubit Rot gates followed by a CNOT ring per layer."""

    num_qubits: int
    num_layers: int
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_num_qubits(self.num_qubits)
        if self.num_layers < 0:
            raise ConfigurationError("layer count must be non-negative")
        w = np.asarray(self.weights, dtype=float)
        expected = (self.num_layers, self.num_qubits, 3)
        if w.shape != expected:
            raise ConfigurationError(f"SEL weights must have shape {expected}, got {w.shape}")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def zeros(cls, num_qubits: int, num_layers: int) -> "SelAnsatz":
        return cls(num_qubits, num_layers, np.zeros((num_layers, num_qubits, 3)))

    @property
    def ranges(self) -> list[int]:
        return sel_ranges(self.num_qubits, self.num_layers)

    def gates(self) -> Iterator[GateOp]:
        for layer, r in enumerate(self.ranges):
            for q in range(self.num_qubits):
                yield GateOp.rot(*self.weights[layer, q], target=q)
            for c, t in sel_cnot_pairs(self.num_qubits, r):
                yield GateOp.cnot(c, t)


# ---------------------------------------------------------------------------
# batched kernels on (rows, 2**n) arrays
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _flip_index(n: int, qubit: int) -> np.ndarray:
    return np.arange(1 << n) ^ (1 << qubit)


@lru_cache(maxsize=None)
def _bit_is_one(n: int, qubit: int) -> np.ndarray:
    return ((np.arange(1 << n) >> qubit) & 1).astype(bool)


@lru_cache(maxsize=None)
def _cnot_index(n: int, control: int, target: int) -> np.ndarray:
    idx = np.arange(1 << n)
    return np.where((idx >> control) & 1, idx ^ (1 << target), idx)


def zero_states(rows: int, n: int) -> np.ndarray:
    psi = np.zeros((rows, 1 << n), dtype=complex)
    psi[:, 0] = 1.0
    return psi


def apply_1q_batch(psi: np.ndarray, mat: np.ndarray, qubit: int) -> np.ndarray:
    """Apply a 2x2 matrix (shared, or one per row with shape ``(rows, 2, 2)``) to ``qubit``."""
    rows, dim = psi.shape
    lo = 1 << qubit
    view = psi.reshape(rows, dim // (2 * lo), 2, lo)
    a0 = view[:, :, 0, :]
    a1 = view[:, :, 1, :]
    if mat.ndim == 2:
        m00, m01, m10, m11 = mat[0, 0], mat[0, 1], mat[1, 0], mat[1, 1]
    else:
        m00, m01, m10, m11 = (mat[:, i, j][:, None, None] for i in (0, 1) for j in (0, 1))
    out = np.empty_like(view)
    out[:, :, 0, :] = m00 * a0 + m01 * a1
    out[:, :, 1, :] = m10 * a0 + m11 * a1
    return out.reshape(rows, dim)


def apply_cnot_batch(psi: np.ndarray, n: int, control: int, target: int) -> np.ndarray:
    return psi[:, _cnot_index(n, control, target)]


def apply_pauli_batch(psi: np.ndarray, n: int, qubit: int, codes: np.ndarray) -> np.ndarray:
    """Apply a per-row Pauli on ``qubit``: code 0 = I, 1 = X, 2 = Y, 3 = Z."""
    codes = np.asarray(codes)
    if not codes.any():
        return psi
    out = psi.copy()
    one = _bit_is_one(n, qubit)
    flip = _flip_index(n, qubit)
    for code in (1, 2, 3):
        rows = codes == code
        if not rows.any():
            continue
        sub = psi[rows]
        if code == 1:
            sub = sub[:, flip]
        elif code == 2:
            # Y|0> = i|1>, Y|1> = -i|0>
            sub = sub[:, flip] * np.where(one, 1j, -1j)
        else:
            sub = sub * np.where(one, -1.0, 1.0)
        out[rows] = sub
    return out


def sample_pauli_codes(rows: int, prob: float, rng: np.random.Generator) -> np.ndarray:
    """Per-row Pauli codes: with probability ``prob`` a uniform pick of X/Y/Z, else identity."""
    hit = rng.random(rows) < prob
    kind = rng.integers(1, 4, size=rows)
    return np.where(hit, kind, 0)


def random_pauli_batch(
    psi: np.ndarray, n: int, qubit: int, prob: float, rng: np.random.Generator
) -> np.ndarray:
    """Stochastic Pauli kick on ``qubit``. Draws nothing when ``prob`` is 0."""
    if prob <= 0.0:
        return psi
    return apply_pauli_batch(psi, n, qubit, sample_pauli_codes(psi.shape[0], prob, rng))


def expval_z_batch(psi: np.ndarray, n: int, qubit: int) -> np.ndarray:
    probs = psi.real**2 + psi.imag**2
    signs = np.where(_bit_is_one(n, qubit), -1.0, 1.0)
    return np.clip(probs @ signs, -1.0, 1.0)


# ---------------------------------------------------------------------------
# value-semantics API
# ---------------------------------------------------------------------------


def init_zero_state(n: int) -> StateVector:
    _check_num_qubits(n)
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = 1.0
    return StateVector(amps, n)


def _check_qubit(q: int, n: int, what: str = "qubit") -> None:
    if not isinstance(q, (int, np.integer)) or not 0 <= q < n:
        raise ConfigurationError(f"{what} index {q!r} out of range for {n} qubit(s)")


def apply_gate(state: StateVector, gate: GateOp) -> StateVector:
    n = state.num_qubits
    _check_qubit(gate.target, n, "target")
    psi = state.amplitudes[None, :]
    if gate.kind == "CNOT":
        _check_qubit(gate.control, n, "control")
        out = apply_cnot_batch(psi, n, gate.control, gate.target)
    else:
        out = apply_1q_batch(psi, gate.matrix(), gate.target)
    return StateVector(out[0], n)


def apply_gates(state: StateVector, gates: Sequence[GateOp]) -> StateVector:
    for gate in gates:
        state = apply_gate(state, gate)
    return state


def apply_sel(state: StateVector, ansatz: SelAnsatz) -> StateVector:
    if ansatz.num_qubits != state.num_qubits:
        raise ConfigurationError(
            f"ansatz is for {ansatz.num_qubits} qubits, state has {state.num_qubits}"
        )
    return apply_gates(state, list(ansatz.gates()))


def expval_z(state: StateVector, qubit: int) -> float:
    _check_qubit(qubit, state.num_qubits)
    return float(expval_z_batch(state.amplitudes[None, :], state.num_qubits, qubit)[0])
