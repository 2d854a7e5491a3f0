"""CNOT-distance classes of three-qubit states relative to |000> and to GHZ."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .canonical import (
    DEFAULT_TOL,
    TANGLE_TOL,
    GhzForm,
    SchmidtForm,
    ghz_form,
    i05_form,
    lu_equivalent,
    purity_invariants,
    schmidt_two_qubit,
    tangle,
    w_form,
)
from .state import apply_local, ghz_state, permute_qubits, product_state, qubit_count, reduced_density

ZERO_STATE = "zero"
GHZ_STATE = "ghz"


@dataclass(frozen=True)
class ProductWitness:
    factors: tuple

    def reconstruct(self):
        return product_state(*self.factors)


@dataclass(frozen=True)
class BiSeparableWitness:
    """``factor`` on ``qubit`` times an entangled pair in Schmidt form."""

    qubit: int
    factor: np.ndarray
    pair: tuple
    schmidt: SchmidtForm

    def reconstruct(self):
        order = (self.qubit,) + self.pair
        joint = np.kron(self.factor, self.schmidt.reconstruct())
        inverse = [order.index(q) + 1 for q in (1, 2, 3)]
        return permute_qubits(joint, inverse)


@dataclass(frozen=True)
class TwoTermWitness:
    """Two product terms whose factors on ``orthogonal_qubit`` are orthogonal."""

    form: GhzForm
    orthogonal_qubit: int

    def reconstruct(self):
        return self.form.reconstruct()


@dataclass(frozen=True)
class GhzEquivalenceWitness:
    """Local unitaries taking GHZ to the state (up to global phase)."""

    unitaries: tuple

    def reconstruct(self):
        return apply_local(ghz_state(), self.unitaries)


@dataclass(frozen=True)
class StateClass:
    reference: str
    class_index: int
    witness: Any
    margin: float

    def summary(self) -> dict:
        w = self.witness
        info: dict = {"type": type(w).__name__}
        if isinstance(w, BiSeparableWitness):
            info.update(separable_qubit=w.qubit, schmidt_angle=w.schmidt.angle)
        elif isinstance(w, TwoTermWitness):
            info.update(orthogonal_qubit=w.orthogonal_qubit, a=w.form.a, b=w.form.b,
                        xi=w.form.xi, phis=list(w.form.phis))
        elif isinstance(w, GhzForm):
            info.update(a=w.a, b=w.b, xi=w.xi, phis=list(w.phis))
        elif hasattr(w, "phi2"):
            info.update(phi=w.phi, phi2=w.phi2, xi=w.xi)
        elif hasattr(w, "lambda2"):
            info.update(qubit=w.qubit, lambda2=w.lambda2, lambda3=w.lambda3, lambda4=w.lambda4)
        return info


def _check3(state):
    psi = np.asarray(state, dtype=complex)
    if qubit_count(psi) != 3:
        raise ValueError("classification needs a three-qubit state")
    return psi


def _top_vector(rho):
    return np.linalg.eigh(rho)[1][:, -1]


def _biseparable_witness(psi, k):
    pair = tuple(q for q in (1, 2, 3) if q != k)
    order = (k,) + pair
    permuted = permute_qubits(psi, order)
    factor = _top_vector(reduced_density(permuted, [1]))
    rest = factor.conj() @ permuted.reshape(2, 4)
    rest = rest / np.linalg.norm(rest)
    return BiSeparableWitness(k, factor, pair, schmidt_two_qubit(rest))


def _margin(values):
    values = [float(v) for v in values]
    return min(values) if values else float("inf")


def classify_from_zero(state, tol: float = DEFAULT_TOL) -> StateClass:
    """Class 0..3: the number of CNOTs needed to reach the state from |000>."""
    psi = _check3(state)
    defects = [1 - v for v in purity_invariants(psi)]
    sep = [k for k, d in enumerate(defects, start=1) if d < tol]
    if len(sep) >= 2:
        factors = tuple(_top_vector(reduced_density(psi, [k])) for k in (1, 2, 3))
        return StateClass(ZERO_STATE, 0, ProductWitness(factors), float("inf"))
    if len(sep) == 1:
        k = sep[0]
        others = [d for q, d in enumerate(defects, start=1) if q != k]
        return StateClass(ZERO_STATE, 1, _biseparable_witness(psi, k), _margin(others))
    tau = tangle(psi)
    if tau <= TANGLE_TOL:
        return StateClass(ZERO_STATE, 3, w_form(psi, tol), _margin(defects))
    form = ghz_form(psi, tol)
    overlaps = form.overlaps()
    orth = [k for k, o in enumerate(overlaps, start=1) if o < tol]
    if orth:
        rest = [o for k, o in enumerate(overlaps, start=1) if k not in orth]
        if all(o < 1 - tol for o in rest):
            return StateClass(ZERO_STATE, 2, TwoTermWitness(form, orth[0]),
                              _margin(defects + [tau] + [1 - o for o in rest]))
    return StateClass(ZERO_STATE, 3, form, _margin(defects + [tau] + list(overlaps)))


def classify_from_ghz(state, tol: float = DEFAULT_TOL) -> StateClass:
    """Class 0..2: the number of CNOTs needed to reach the state from GHZ."""
    psi = _check3(state)
    same, unitaries = lu_equivalent(ghz_state(), psi, tol, return_unitaries=True)
    if same:
        return StateClass(GHZ_STATE, 0, GhzEquivalenceWitness(unitaries), float("inf"))
    gaps = [abs(v - 0.5) for v in purity_invariants(psi)]
    if min(gaps) < tol:
        others = [g for g in gaps if g >= tol]
        return StateClass(GHZ_STATE, 1, i05_form(psi, tol), _margin(others))
    witness = classify_from_zero(psi, tol).witness
    return StateClass(GHZ_STATE, 2, witness, _margin(gaps))


def classify_two_qubit(a, b, tol: float = DEFAULT_TOL) -> int:
    """0 when the pair is LU-equivalent (equal Schmidt angles), else 1."""
    fa = schmidt_two_qubit(a)
    fb = schmidt_two_qubit(b)
    return 0 if abs(fa.angle - fb.angle) < tol else 1
