import numpy as np
import pytest
from hypothesis import settings

from cnotm.state import Gate, apply_circuit, Circuit, local_gates, random_unitary, zero_state

settings.register_profile("repo", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("repo")

PAIRS = ((1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_layer(rng, n=3):
    return local_gates([random_unitary(rng) for _ in range(n)])


def constructed_state(k, rng, pairs=PAIRS):
    """|000> followed by k (random local layer, CNOT) rounds and a final local layer."""
    gates = []
    for _ in range(k):
        gates += random_layer(rng)
        gates.append(Gate.cnot(*pairs[rng.integers(len(pairs))]))
    gates += random_layer(rng)
    return apply_circuit(zero_state(), Circuit(tuple(gates)))
