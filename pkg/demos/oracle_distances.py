"""Numerical CNOT distances from the optimizer, compared with the classifier.

A failed level only means no fit was found; it is evidence, not a proof.

Run:  python3 demos/oracle_distances.py
"""
from cnotm import classify_from_zero, ghz_state, haar_sample, min_cnot_search, probe_max_distance, w_state
from cnotm.state import zero_state

for name, target in (("GHZ", ghz_state()), ("W", w_state()), ("Haar #3", haar_sample(3, 3))):
    rep = min_cnot_search(zero_state(), target, k_max=3)
    best = ", ".join(f"k={k}: {rep.best_at(k):.2e}" for k in range(rep.verdict + 1))
    print(f"|000> -> {name:<8} oracle {rep.verdict}  classifier {classify_from_zero(target).class_index}  ({best})")

probe = probe_max_distance(samples=5, seed=1, k_max=4, escalated_restarts=50)
print("\nrandom pairs, oracle verdicts:", [e.verdict for e in probe.entries])
print(probe.note)
