"""Any-to-any transformations, with and without the line constraint 1-2-3.

Run:  python3 demos/any_to_any.py
"""
from collections import Counter

from cnotm import haar_sample, transform_any

free, line = Counter(), Counter()
for i in range(20):
    a, b = haar_sample(3, 2 * i), haar_sample(3, 2 * i + 1)
    free[transform_any(a, b).cnot_count] += 1
    r = transform_any(a, b, nearest_neighbor=True)
    line[r.cnot_count] += 1
    assert all(abs(c - t) == 1 for c, t in r.circuit.cnot_pairs)

print("CNOT counts over 20 random pairs")
print("  all pairs allowed:", dict(free))
print("  line 1-2-3 only:  ", dict(line))

a, b = haar_sample(3, 100), haar_sample(3, 101)
r = transform_any(a, b)
print("\nexample circuit:")
for g in r.circuit.gates:
    print("  ", g)
print("fidelity", f"{r.achieved_fidelity:.12f}")
