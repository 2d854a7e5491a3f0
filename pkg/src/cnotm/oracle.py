"""Numerical CNOT-distance search over every CNOT placement pattern.

For each pattern the local layers are fitted by :mod:`cnotm.template`.  A
level ``k`` is declared unreachable only after every pattern of length ``k``
failed with the escalated restart count.  Negative verdicts are numerical
evidence, not proofs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .state import as_state, haar_sample, qubit_count
from .template import fit_template, initial_angles

ORACLE_THRESHOLD = 1e-7
DEFAULT_RESTARTS = 20
ESCALATED_RESTARTS = 100


def ordered_pairs(n: int = 3) -> list[tuple[int, int]]:
    return [(c, t) for c in range(1, n + 1) for t in range(1, n + 1) if c != t]


def _pattern_key(pattern):
    # patterns touching more distinct pairs and avoiding immediate repeats first
    repeats = sum(a == b for a, b in zip(pattern, pattern[1:]))
    return (repeats, -len(set(pattern)), pattern)


def patterns_of_length(k: int, pairs: Sequence | None = None, n: int = 3) -> list[tuple]:
    pairs = [tuple(p) for p in (pairs or ordered_pairs(n))]
    return sorted(itertools.product(pairs, repeat=k), key=_pattern_key)


@dataclass(frozen=True)
class PatternResult:
    pattern: tuple
    best_infidelity: float
    best_parameters: tuple
    restarts_used: int

    def to_dict(self) -> dict:
        return {
            "pattern": [list(p) for p in self.pattern],
            "best_infidelity": self.best_infidelity,
            "best_parameters": list(self.best_parameters),
            "restarts_used": self.restarts_used,
        }


@dataclass
class OracleReport:
    source: np.ndarray
    target: np.ndarray
    per_pattern: list = field(default_factory=list)
    verdict: int | None = None
    threshold: float = ORACLE_THRESHOLD
    seed: int = 0
    k_max: int = 4

    def best_at(self, k: int) -> float:
        vals = [r.best_infidelity for r in self.per_pattern if len(r.pattern) == k]
        return min(vals) if vals else float("nan")

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "threshold": self.threshold,
            "seed": self.seed,
            "k_max": self.k_max,
            "per_pattern": [r.to_dict() for r in self.per_pattern],
        }


def _stream(seed, k, index, pattern, count, n):
    return initial_angles(pattern, count, [int(seed), int(k), int(index)], n)


def optimize_pattern(source, target, pattern: Sequence, seed: int = 0,
                     restarts: int = DEFAULT_RESTARTS) -> tuple[float, np.ndarray]:
    """Best infidelity over ``restarts`` fits of the template for ``pattern``."""
    a, b = as_state(source), as_state(target)
    n = qubit_count(a)
    pattern = [tuple(int(x) for x in p) for p in pattern]
    batch = fit_template(a, b, pattern, initial_angles(pattern, restarts, seed, n))
    return batch.best_infidelity, batch.best_params


def min_cnot_search(source, target, k_max: int = 4, threshold: float = ORACLE_THRESHOLD,
                    seed: int = 0, restarts: int = DEFAULT_RESTARTS,
                    escalated_restarts: int = ESCALATED_RESTARTS, pairs: Sequence | None = None) -> OracleReport:
    """Smallest CNOT count whose best pattern fit falls below ``threshold``.

    Level ``k`` first tries every pattern with ``restarts`` starts and stops
    at the first success.  Otherwise the patterns are revisited with starts
    up to ``escalated_restarts`` (continuing the same seeded streams) before
    the level counts as unreachable.
    """
    if k_max > 5:
        raise ValueError("k_max is limited to 5")
    a, b = as_state(source), as_state(target)
    if a.shape != b.shape:
        raise ValueError("source and target have different qubit counts")
    n = qubit_count(a)
    report = OracleReport(a, b, [], None, threshold, seed, k_max)
    for k in range(k_max + 1):
        pats = patterns_of_length(k, pairs, n)
        level = []
        found = None
        for idx, pat in enumerate(pats):
            start = _stream(seed, k, idx, pat, max(restarts, escalated_restarts), n)
            batch = fit_template(a, b, list(pat), start[:restarts])
            level.append([pat, batch, restarts, start])
            if batch.best_infidelity < threshold:
                found = k
                break
        if found is None and escalated_restarts > restarts:
            for entry in level:
                pat, first, used, start = entry
                more = fit_template(a, b, list(pat), start[used:escalated_restarts])
                if more.best_infidelity < first.best_infidelity:
                    # restart indices of the second batch come after the first
                    entry[1] = more
                entry[2] = escalated_restarts
                if entry[1].best_infidelity < threshold:
                    found = k
                    break
        for pat, batch, used, _ in level:
            report.per_pattern.append(
                PatternResult(tuple(pat), batch.best_infidelity, tuple(float(x) for x in batch.best_params), used))
        if found is not None:
            report.verdict = found
            return report
    return report


@dataclass
class ProbeEntry:
    index: int
    verdict: int | None
    best_at_kmax: float
    flagged: bool

    def to_dict(self) -> dict:
        return {"index": self.index, "verdict": self.verdict,
                "best_at_kmax": self.best_at_kmax, "flagged": self.flagged}


@dataclass
class ProbeReport:
    entries: list
    k_max: int
    seed: int
    note: str = ("numerical evidence only: a flagged pair failed every pattern up to k_max "
                 "in the optimizer; this does not certify a lower bound")

    @property
    def max_verdict(self):
        vals = [e.verdict for e in self.entries if e.verdict is not None]
        return max(vals) if vals else None

    def to_dict(self) -> dict:
        return {"k_max": self.k_max, "seed": self.seed, "note": self.note,
                "max_verdict": self.max_verdict, "entries": [e.to_dict() for e in self.entries]}


def probe_max_distance(samples: int = 20, seed: int = 0, k_max: int = 4, pairs_of_states=None,
                       restarts: int = DEFAULT_RESTARTS, escalated_restarts: int = ESCALATED_RESTARTS) -> ProbeReport:
    """Oracle distances for random three-qubit pairs (or the given pairs).

    A pair is flagged when no pattern up to ``k_max`` reaches the threshold.
    """
    if pairs_of_states is None:
        rng = np.random.default_rng(seed)
        seeds = rng.integers(0, 2**32, size=(samples, 2))
        pairs_of_states = [(haar_sample(3, int(s)), haar_sample(3, int(t))) for s, t in seeds]
    entries = []
    for i, (a, b) in enumerate(pairs_of_states):
        rep = min_cnot_search(a, b, k_max, seed=seed + i, restarts=restarts, escalated_restarts=escalated_restarts)
        entries.append(ProbeEntry(i, rep.verdict, rep.best_at(k_max) if rep.verdict is None else 0.0,
                                  rep.verdict is None))
    return ProbeReport(entries, k_max, seed)
