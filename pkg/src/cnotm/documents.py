"""JSON documents for states, circuits and reports.

A state document is ``{"qubits": n, "amps": [[re, im], ...]}`` with ``2**n``
amplitudes; amplitude ``i`` belongs to the bit string whose most significant
bit is qubit 1.  A circuit document is ``{"gates": [...], "cnot_count": k}``
where a gate is ``{"g": "rx"|"ry"|"rz"|"ph", "q": q, "theta": t}`` or
``{"g": "cnot", "c": c, "t": t}``.

Floats are written with 17 significant digits so every double survives a
round trip, and keys keep a fixed order so output is byte-stable.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .state import ROTATIONS, Circuit, Gate

INGEST_NORM_TOL = 1e-6


class DocumentError(ValueError):
    """Malformed JSON or a document that does not follow the schema."""


class DimensionError(ValueError):
    """A well-formed document with the wrong number of qubits or amplitudes."""


def _number(x) -> str:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g")


def dumps(obj, indent: int | None = 2) -> str:
    """Serialize ``obj`` deterministically with round-trip-safe floats."""
    pad = "" if indent is None else " " * indent

    def enc(o, depth):
        if isinstance(o, (bool, np.bool_)):
            return "true" if o else "false"
        if o is None:
            return "null"
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return _number(o)
        if isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, dict):
            items = [json.dumps(str(k)) + ": " + enc(v, depth + 1) for k, v in o.items()]
            return _wrap("{", "}", items, depth)
        if isinstance(o, (list, tuple, np.ndarray)):
            items = [enc(v, depth + 1) for v in o]
            # short numeric rows stay on one line
            if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in o):
                return "[" + ", ".join(items) + "]"
            return _wrap("[", "]", items, depth)
        raise TypeError(f"cannot serialize {type(o).__name__}")

    def _wrap(open_, close, items, depth):
        if not items:
            return open_ + close
        if indent is None:
            return open_ + ", ".join(items) + close
        inner = "\n" + pad * (depth + 1)
        return open_ + inner + ("," + inner).join(items) + "\n" + pad * depth + close

    return enc(obj, 0)


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc}") from exc


# --- states ------------------------------------------------------------------------------

def state_to_document(state) -> dict:
    psi = np.asarray(state, dtype=complex)
    n = int(round(math.log2(psi.size)))
    return {"qubits": n, "amps": [[float(a.real), float(a.imag)] for a in psi]}


def state_from_document(doc) -> np.ndarray:
    """Amplitude vector of a state document, renormalized exactly."""
    if not isinstance(doc, dict) or "qubits" not in doc or "amps" not in doc:
        raise DocumentError("state document needs 'qubits' and 'amps'")
    n, amps = doc["qubits"], doc["amps"]
    if not isinstance(n, int) or isinstance(n, bool) or not isinstance(amps, list):
        raise DocumentError("'qubits' must be an integer and 'amps' a list")
    try:
        psi = np.array([complex(float(re), float(im)) for re, im in amps], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise DocumentError("each amplitude must be a [re, im] pair of numbers") from exc
    if n < 1 or psi.size != 2**n:
        raise DimensionError(f"{psi.size} amplitudes do not match {n} qubits")
    if not np.all(np.isfinite(psi)):
        raise DocumentError("amplitudes must be finite")
    norm = np.linalg.norm(psi)
    if abs(norm - 1) > INGEST_NORM_TOL:
        raise DocumentError(f"state norm {norm:.9g} is not 1 within {INGEST_NORM_TOL:g}")
    return psi / norm


# --- circuits ----------------------------------------------------------------------------

def gate_to_dict(gate: Gate) -> dict:
    if gate.is_cnot:
        return {"g": "cnot", "c": gate.qubits[0], "t": gate.qubits[1]}
    return {"g": gate.kind, "q": gate.qubits[0], "theta": gate.angle}


def circuit_to_document(circuit: Circuit) -> dict:
    return {"gates": [gate_to_dict(g) for g in circuit.gates], "cnot_count": circuit.cnot_count}


def circuit_from_document(doc) -> Circuit:
    if not isinstance(doc, dict) or not isinstance(doc.get("gates"), list):
        raise DocumentError("circuit document needs a 'gates' list")
    gates = []
    for entry in doc["gates"]:
        if not isinstance(entry, dict):
            raise DocumentError("each gate must be an object")
        kind = entry.get("g")
        try:
            if kind == "cnot":
                gates.append(Gate.cnot(_label(entry["c"]), _label(entry["t"])))
            elif kind in ROTATIONS:
                gates.append(Gate(kind, (_label(entry["q"]),), float(entry["theta"])))
            else:
                raise DocumentError(f"unknown gate {kind!r}")
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, DocumentError):
                raise
            raise DocumentError(f"bad gate entry {entry}") from exc
    circuit = Circuit(tuple(gates))
    if "cnot_count" in doc and doc["cnot_count"] != circuit.cnot_count:
        raise DocumentError("cnot_count does not match the gate list")
    return circuit


def _label(x) -> int:
    if isinstance(x, bool) or not isinstance(x, int) or x < 1:
        raise DocumentError(f"qubit label {x!r} must be a positive integer")
    return x


def circuit_max_qubit(circuit: Circuit) -> int:
    return max((q for g in circuit.gates for q in g.qubits), default=0)
