"""Walk through the two reference classifications and the matching circuits.

Run:  python3 demos/classify_and_prepare.py
"""
import numpy as np

from cnotm import (classify_from_ghz, classify_from_zero, ghz_state, haar_sample, prepare_from_ghz,
                   prepare_from_zero, purity_invariants, tangle, w_state, zero_state)
from cnotm.state import apply_gate, basis_state, Gate

bell = (basis_state("00") + basis_state("11")) / np.sqrt(2)
states = {
    "|000>": zero_state(),
    "|0> Bell": np.kron(basis_state("0"), bell),
    "GHZ": ghz_state(),
    "CNOT23 GHZ": apply_gate(ghz_state(), Gate.cnot(2, 3)),
    "W": w_state(),
    "Haar #7": haar_sample(3, 7),
}

print(f"{'state':<12} {'I1':>6} {'I2':>6} {'I3':>6} {'tangle':>7}  from|000>  from GHZ")
for name, psi in states.items():
    inv = purity_invariants(psi)
    z, g = classify_from_zero(psi), classify_from_ghz(psi)
    print(f"{name:<12} {inv[0]:6.3f} {inv[1]:6.3f} {inv[2]:6.3f} {tangle(psi):7.3f}  "
          f"{z.class_index:^9}  {g.class_index:^8}")

# the class index is also the CNOT count of the constructed circuit
print()
for name, psi in states.items():
    rz, rg = prepare_from_zero(psi), prepare_from_ghz(psi)
    print(f"{name:<12} |000> -> {rz.cnot_count} CNOTs {rz.circuit.cnot_pairs}  "
          f"GHZ -> {rg.cnot_count} CNOTs {rg.circuit.cnot_pairs}  "
          f"(fidelities {rz.achieved_fidelity:.12f}, {rg.achieved_fidelity:.12f})")
