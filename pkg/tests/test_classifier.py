import itertools

import numpy as np
import pytest

from cnotm.canonical import w_canonical
from cnotm.classifier import (BiSeparableWitness, GhzEquivalenceWitness, ProductWitness, TwoTermWitness,
                              classify_from_ghz, classify_from_zero, classify_two_qubit)
from cnotm.state import (Circuit, Gate, apply_circuit, apply_gate, basis_state, fidelity, ghz_state,
                         haar_sample, permute_qubits, random_local, w_state, zero_state)
from cnotm.synthesizer import prepare_from_ghz, prepare_from_zero

from conftest import PAIRS, constructed_state, random_layer

BELL = (basis_state("00") + basis_state("11")) / np.sqrt(2)
HALF = (basis_state("000") + basis_state("110")) / np.sqrt(2)


def test_zero_reference_examples():
    assert classify_from_zero(zero_state()).class_index == 0
    c1 = classify_from_zero(np.kron(basis_state("0"), BELL))
    assert c1.class_index == 1 and isinstance(c1.witness, BiSeparableWitness) and c1.witness.qubit == 1
    c2 = classify_from_zero(ghz_state())
    assert c2.class_index == 2 and isinstance(c2.witness, TwoTermWitness)
    assert classify_from_zero(w_state()).class_index == 3


def test_ghz_reference_examples():
    c0 = classify_from_ghz(ghz_state())
    assert c0.class_index == 0 and isinstance(c0.witness, GhzEquivalenceWitness)
    assert classify_from_ghz(HALF).class_index == 1
    assert classify_from_ghz(zero_state()).class_index == 2
    assert classify_from_ghz(w_state()).class_index == 2


def test_two_qubit_examples(rng):
    rotated = random_local(BELL, rng)
    assert classify_two_qubit(BELL, rotated) == 0
    assert classify_two_qubit(basis_state("00"), BELL) == 1
    s = np.array([np.cos(0.3), 0, 0, np.sin(0.3)])
    assert classify_two_qubit(s, s) == 0


def test_witnesses_reconstruct(rng):
    states = [zero_state(), np.kron(basis_state("0"), BELL), ghz_state(), HALF,
              random_local(ghz_state(), rng), constructed_state(2, rng)]
    for psi in states:
        for cls in (classify_from_zero(psi), classify_from_ghz(psi)):
            w = cls.witness
            if hasattr(w, "reconstruct"):
                assert fidelity(w.reconstruct(), psi) >= 1 - 1e-9


def test_product_witness_factors():
    w = classify_from_zero(basis_state("101")).witness
    assert isinstance(w, ProductWitness)
    assert fidelity(w.reconstruct(), basis_state("101")) == pytest.approx(1)


def test_summary_is_plain_data():
    s = classify_from_zero(ghz_state()).summary()
    assert s["type"] == "TwoTermWitness" and "orthogonal_qubit" in s


def test_wrong_qubit_count():
    with pytest.raises(ValueError):
        classify_from_zero(BELL)
    with pytest.raises(ValueError):
        classify_from_ghz(BELL)


def test_permutation_invariance(rng):
    states = [constructed_state(k, rng) for k in (0, 1, 2, 3) for _ in range(5)]
    states += [random_local(w_canonical(*rng.uniform(0.1, 1.4, 3)), rng) for _ in range(5)]
    for psi in states:
        z, g = classify_from_zero(psi).class_index, classify_from_ghz(psi).class_index
        for order in itertools.permutations((1, 2, 3)):
            p = permute_qubits(psi, order)
            assert classify_from_zero(p).class_index == z
            assert classify_from_ghz(p).class_index == g


def test_local_unitary_invariance(rng):
    for i in range(1000):
        psi = constructed_state(i % 4, rng) if i % 3 else haar_sample(3, i)
        phi = random_local(psi, rng)
        assert classify_from_zero(phi).class_index == classify_from_zero(psi).class_index
        assert classify_from_ghz(phi).class_index == classify_from_ghz(psi).class_index


def test_one_cnot_changes_class_by_at_most_one(rng):
    for i in range(300):
        psi = constructed_state(int(rng.integers(0, 4)), rng) if i % 2 else haar_sample(3, i)
        step = Circuit(tuple(random_layer(rng)) + (Gate.cnot(*PAIRS[rng.integers(6)]),))
        phi = apply_circuit(psi, step)
        assert abs(classify_from_zero(phi).class_index - classify_from_zero(psi).class_index) <= 1
        assert abs(classify_from_ghz(phi).class_index - classify_from_ghz(psi).class_index) <= 1


def test_class_equals_constructive_cnot_count(rng):
    for i in range(120):
        psi = constructed_state(i % 4, rng)
        z = classify_from_zero(psi).class_index
        res = prepare_from_zero(psi)
        assert res.cnot_count == z and res.achieved_fidelity >= 1 - 1e-8
        g = classify_from_ghz(psi).class_index
        res = prepare_from_ghz(psi)
        assert res.cnot_count == g and res.achieved_fidelity >= 1 - 1e-8


def test_constructed_class_bound(rng):
    # k CNOTs from |000> never produce a state above class k
    for i in range(200):
        k = i % 4
        assert classify_from_zero(constructed_state(k, rng)).class_index <= k


def test_ghz_cnot_lands_in_class_one():
    for c, t in PAIRS:
        psi = apply_gate(ghz_state(), Gate.cnot(c, t))
        assert classify_from_ghz(psi).class_index == 1
        assert classify_from_zero(psi).class_index == 1


def test_haar_generic_classes():
    n = 10_000
    zero = sum(classify_from_zero(haar_sample(3, s)).class_index == 3 for s in range(n))
    ghz = sum(classify_from_ghz(haar_sample(3, s)).class_index == 2 for s in range(n))
    assert zero >= 0.99 * n and ghz >= 0.99 * n


def test_margin_reported():
    assert classify_from_zero(haar_sample(3, 1)).margin > 1e-6
    assert classify_from_zero(zero_state()).margin == float("inf")
