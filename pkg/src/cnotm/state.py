"""Exact statevectors for two and three qubits.

Amplitude index ``i`` encodes the bit string ``b1 b2 ... bn`` with qubit 1 as
the most significant bit, so qubit labels are 1-based and qubit 1 is the
leftmost factor of every tensor product.

Rotations follow ``R_j(xi) = exp(-i xi sigma_j)``.  With this convention
``RY(xi)`` sends ``cos(p)|0> + sin(p)|1>`` to ``cos(p + xi)|0> + sin(p + xi)|1>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

NORM_TOL = 1e-12

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_PAULI = {"rx": PAULI_X, "ry": PAULI_Y, "rz": PAULI_Z}

ROTATIONS = ("rx", "ry", "rz", "ph")
GATE_KINDS = ROTATIONS + ("cnot",)


class GateError(ValueError):
    """Raised for gates that do not fit the state they are applied to."""


@dataclass(frozen=True)
class Gate:
    """One gate of a circuit.

    ``kind`` is one of ``rx``, ``ry``, ``rz``, ``ph`` (phase gate
    ``diag(1, e^{i angle})``) or ``cnot``.  Single-qubit gates carry one
    qubit label, CNOT carries ``(control, target)``.
    """

    kind: str
    qubits: tuple[int, ...]
    angle: float = 0.0

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise GateError(f"unknown gate kind {self.kind!r}")
        expected = 2 if self.kind == "cnot" else 1
        if len(self.qubits) != expected:
            raise GateError(f"{self.kind} acts on {expected} qubit(s), got {self.qubits}")
        if self.kind == "cnot" and self.qubits[0] == self.qubits[1]:
            raise GateError("CNOT control and target must differ")

    @classmethod
    def rx(cls, qubit: int, angle: float) -> Gate:
        return cls("rx", (int(qubit),), float(angle))

    @classmethod
    def ry(cls, qubit: int, angle: float) -> Gate:
        return cls("ry", (int(qubit),), float(angle))

    @classmethod
    def rz(cls, qubit: int, angle: float) -> Gate:
        return cls("rz", (int(qubit),), float(angle))

    @classmethod
    def phase(cls, qubit: int, angle: float) -> Gate:
        return cls("ph", (int(qubit),), float(angle))

    @classmethod
    def cnot(cls, control: int, target: int) -> Gate:
        return cls("cnot", (int(control), int(target)))

    @property
    def is_cnot(self) -> bool:
        return self.kind == "cnot"

    def inverse(self) -> Gate:
        if self.is_cnot:
            return self
        return Gate(self.kind, self.qubits, -self.angle)

    def matrix(self) -> np.ndarray:
        """2x2 matrix of a single-qubit gate."""
        if self.is_cnot:
            raise GateError("CNOT has no single-qubit matrix")
        return rotation_matrix(self.kind, self.angle)

    def relabel(self, mapping: Sequence[int]) -> Gate:
        """Rename qubit ``q`` to ``mapping[q - 1]``."""
        return Gate(self.kind, tuple(int(mapping[q - 1]) for q in self.qubits), self.angle)

    def __repr__(self):
        if self.is_cnot:
            return f"CNOT({self.qubits[0]},{self.qubits[1]})"
        return f"{self.kind.upper()}(q{self.qubits[0]}, {self.angle:.6g})"


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list; the first gate is applied first."""

    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))

    @property
    def cnot_count(self) -> int:
        return sum(g.is_cnot for g in self.gates)

    @property
    def cnot_pairs(self) -> list[tuple[int, int]]:
        return [g.qubits for g in self.gates if g.is_cnot]

    def __add__(self, other: Circuit) -> Circuit:
        return Circuit(self.gates + tuple(other.gates))

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def relabel(self, mapping: Sequence[int]) -> Circuit:
        return Circuit(tuple(g.relabel(mapping) for g in self.gates))


def rotation_matrix(kind: str, angle: float) -> np.ndarray:
    if kind == "ph":
        return np.array([[1, 0], [0, np.exp(1j * angle)]], dtype=complex)
    return np.cos(angle) * np.eye(2, dtype=complex) - 1j * np.sin(angle) * _PAULI[kind]


def qubit_count(state) -> int:
    dim = np.shape(state)[0]
    n = int(round(np.log2(dim))) if dim > 0 else 0
    if 2**n != dim or n not in (1, 2, 3):
        raise GateError(f"state dimension {dim} is not 2, 4 or 8")
    return n


def as_state(amplitudes, normalize: bool = False) -> np.ndarray:
    """Validate ``amplitudes`` as a unit vector and return a complex copy."""
    psi = np.array(amplitudes, dtype=complex).reshape(-1)
    qubit_count(psi)
    norm = np.linalg.norm(psi)
    if normalize:
        if norm == 0:
            raise ValueError("zero vector is not a state")
        return psi / norm
    if abs(norm - 1) > 1e-10:
        raise ValueError(f"state is not normalized (norm {norm!r})")
    return psi


def _check_qubits(gate: Gate, n: int):
    for q in gate.qubits:
        if not 1 <= q <= n:
            raise GateError(f"qubit {q} out of range for {n} qubits")


def apply_single(state: np.ndarray, qubit: int, matrix: np.ndarray) -> np.ndarray:
    """Apply an arbitrary 2x2 matrix to one qubit."""
    n = qubit_count(state)
    if not 1 <= qubit <= n:
        raise GateError(f"qubit {qubit} out of range for {n} qubits")
    t = np.asarray(state).reshape((2,) * n)
    t = np.tensordot(matrix, t, axes=([1], [qubit - 1]))
    return np.moveaxis(t, 0, qubit - 1).reshape(-1)


def apply_local(state: np.ndarray, unitaries: Sequence[np.ndarray]) -> np.ndarray:
    """Apply ``U1 (x) U2 (x) ...`` to ``state``."""
    out = np.asarray(state, dtype=complex)
    for q, u in enumerate(unitaries, start=1):
        out = apply_single(out, q, u)
    return out


def apply_gate(state, gate: Gate) -> np.ndarray:
    psi = np.asarray(state, dtype=complex)
    n = qubit_count(psi)
    _check_qubits(gate, n)
    if not gate.is_cnot:
        return apply_single(psi, gate.qubits[0], gate.matrix())
    c, t = (q - 1 for q in gate.qubits)
    tensor = psi.reshape((2,) * n).copy()
    sel = [slice(None)] * n
    sel[c] = 1
    sub = tensor[tuple(sel)]
    # after removing the control axis the target axis shifts down by one if it was above
    axis = t - 1 if t > c else t
    tensor[tuple(sel)] = np.flip(sub, axis=axis)
    return tensor.reshape(-1)


def apply_circuit(state, circuit: Circuit | Iterable[Gate]) -> np.ndarray:
    psi = np.asarray(state, dtype=complex)
    for gate in circuit:
        psi = apply_gate(psi, gate)
    return psi


def invert_circuit(circuit: Circuit) -> Circuit:
    return Circuit(tuple(g.inverse() for g in reversed(circuit.gates)))


def circuit_unitary(circuit: Circuit, n: int) -> np.ndarray:
    dim = 2**n
    cols = [apply_circuit(np.eye(dim, dtype=complex)[:, i], circuit) for i in range(dim)]
    return np.stack(cols, axis=1)


def fidelity(a, b) -> float:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(min(1.0, abs(np.vdot(a, b)) ** 2))


def reduced_density(state, qubits: Iterable[int]) -> np.ndarray:
    """Reduced density matrix of the given (1-based) qubits, in ascending order."""
    psi = np.asarray(state, dtype=complex)
    n = qubit_count(psi)
    keep = sorted(set(int(q) for q in qubits))
    if not keep or len(keep) >= n or keep[0] < 1 or keep[-1] > n:
        raise ValueError(f"qubit subset {keep} must be a nonempty proper subset of 1..{n}")
    rest = [q for q in range(1, n + 1) if q not in keep]
    m = np.transpose(psi.reshape((2,) * n), [q - 1 for q in keep + rest]).reshape(2 ** len(keep), -1)
    return m @ m.conj().T


def haar_sample(qubits: int, seed=None) -> np.ndarray:
    """Haar-random pure state; ``seed`` may be an int or a numpy Generator."""
    if qubits not in (2, 3):
        raise ValueError("only 2 or 3 qubits are supported")
    rng = np.random.default_rng(seed)
    v = rng.normal(size=2**qubits) + 1j * rng.normal(size=2**qubits)
    return v / np.linalg.norm(v)


def random_unitary(rng: np.random.Generator) -> np.ndarray:
    """Haar-random 2x2 unitary."""
    z = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_local(state, rng: np.random.Generator) -> np.ndarray:
    n = qubit_count(state)
    return apply_local(state, [random_unitary(rng) for _ in range(n)])


def permute_qubits(state, order: Sequence[int]) -> np.ndarray:
    """Relabel qubits: new qubit ``i`` is old qubit ``order[i - 1]`` (1-based)."""
    n = qubit_count(state)
    axes = [int(q) - 1 for q in order]
    if sorted(axes) != list(range(n)):
        raise ValueError(f"{order} is not a permutation of 1..{n}")
    return np.transpose(np.asarray(state).reshape((2,) * n), axes).reshape(-1)


def basis_state(bits: str) -> np.ndarray:
    psi = np.zeros(2 ** len(bits), dtype=complex)
    psi[int(bits, 2)] = 1
    return psi


def product_state(*factors) -> np.ndarray:
    out = np.ones(1, dtype=complex)
    for f in factors:
        f = np.asarray(f, dtype=complex)
        out = np.kron(out, f / np.linalg.norm(f))
    return out


def ghz_state() -> np.ndarray:
    return (basis_state("000") + basis_state("111")) / np.sqrt(2)


def w_state() -> np.ndarray:
    return (basis_state("100") + basis_state("010") + basis_state("001")) / np.sqrt(3)


def zero_state(qubits: int = 3) -> np.ndarray:
    return basis_state("0" * qubits)


# --- single-qubit unitaries as gates -------------------------------------------------

def zyz_angles(u: np.ndarray) -> tuple[float, float, float, float]:
    """Angles ``(alpha, a, b, c)`` with ``u = e^{i alpha} RZ(a) RY(b) RZ(c)``."""
    u = np.asarray(u, dtype=complex)
    det = np.linalg.det(u)
    alpha = np.angle(det) / 2
    v = u * np.exp(-1j * alpha)  # special unitary
    b = np.arctan2(abs(v[1, 0]), abs(v[0, 0]))
    # v00 = e^{-i(a+c)} cos b, v10 = e^{i(a-c)} sin b
    if abs(v[0, 0]) > 1e-12 and abs(v[1, 0]) > 1e-12:
        s = -np.angle(v[0, 0])
        d = np.angle(v[1, 0])
        a, c = (s + d) / 2, (s - d) / 2
    elif abs(v[1, 0]) <= 1e-12:
        a, c = -np.angle(v[0, 0]), 0.0
    else:
        a, c = np.angle(v[1, 0]), 0.0
    # e^{i alpha} RZ RY RZ reproduces v up to a sign; fold it into alpha
    w = rotation_matrix("rz", a) @ rotation_matrix("ry", b) @ rotation_matrix("rz", c)
    k = np.argmax(np.abs(w.ravel()))
    if np.real(v.ravel()[k] / w.ravel()[k]) < 0:
        alpha += np.pi
    return float(alpha), float(a), float(b), float(c)


def unitary_gates(qubit: int, u: np.ndarray, tol: float = 1e-14) -> list[Gate]:
    """Gates realising ``u`` on ``qubit`` up to global phase (identity parts dropped)."""
    _, a, b, c = zyz_angles(u)
    gates = [Gate.rz(qubit, c), Gate.ry(qubit, b), Gate.rz(qubit, a)]
    return [g for g in gates if abs(g.angle) > tol]


def local_gates(unitaries: Sequence[np.ndarray]) -> list[Gate]:
    gates: list[Gate] = []
    for q, u in enumerate(unitaries, start=1):
        gates.extend(unitary_gates(q, u))
    return gates


def unitary_to_zero(v: np.ndarray) -> np.ndarray:
    """A unitary whose first row is ``v^dagger``, i.e. sending ``v`` to ``|0>``."""
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.array([[np.conj(v[0]), np.conj(v[1])], [-v[1], v[0]]], dtype=complex)
