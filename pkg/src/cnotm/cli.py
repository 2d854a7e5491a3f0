"""Command-line front end.

State arguments are JSON state documents, or one of the names ``zero``,
``ghz`` and ``w`` for the three-qubit reference states.  Every command
prints a short text rendering by default and the full report with ``--json``.

Exit codes: 0 success, 2 parse error, 3 dimension error, 4 failed internal
verification, 5 oracle without a verdict.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import canonical, classifier, oracle, synthesizer
from .documents import (DimensionError, DocumentError, circuit_from_document, circuit_max_qubit,
                        circuit_to_document, dumps, loads, state_from_document, state_to_document)
from .state import (GateError, apply_circuit, fidelity, ghz_state, haar_sample, qubit_count, reduced_density,
                    w_state, zero_state)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_DIMENSION = 3
EXIT_VERIFY = 4
EXIT_NO_VERDICT = 5

TOLERANCE_ENV = "CNOTM_TOLERANCE"
NAMED_STATES = {"zero": zero_state, "ghz": ghz_state, "w": w_state}


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_PARSE) from exc
    try:
        return loads(text)
    except DocumentError as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from exc


def load_state(arg: str) -> np.ndarray:
    if arg in NAMED_STATES:
        return NAMED_STATES[arg]()
    try:
        return state_from_document(_read_json(arg))
    except DimensionError as exc:
        raise CliError(f"{arg}: {exc}", EXIT_DIMENSION) from exc
    except DocumentError as exc:
        raise CliError(f"{arg}: {exc}", EXIT_PARSE) from exc


def load_circuit(path: str):
    try:
        return circuit_from_document(_read_json(path))
    except DocumentError as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from exc


def resolve_tolerance(flag: float | None) -> float:
    if flag is not None:
        return flag
    env = os.environ.get(TOLERANCE_ENV)
    if env is None or env == "":
        return canonical.DEFAULT_TOL
    try:
        return float(env)
    except ValueError as exc:
        raise CliError(f"{TOLERANCE_ENV}={env!r} is not a number", EXIT_PARSE) from exc


def _need_qubits(psi, allowed, what):
    if qubit_count(psi) not in allowed:
        raise CliError(f"{what} needs {' or '.join(map(str, allowed))} qubits, got {qubit_count(psi)}",
                       EXIT_DIMENSION)


def _same_size(a, b):
    if a.shape != b.shape:
        raise CliError(f"states have {qubit_count(a)} and {qubit_count(b)} qubits", EXIT_DIMENSION)


# --- commands ----------------------------------------------------------------------------

def cmd_classify(args):
    psi = load_state(args.state)
    tol = resolve_tolerance(args.tolerance)
    if args.ref == "ghz":
        _need_qubits(psi, (3,), "classification against GHZ")
        result = classifier.classify_from_ghz(psi, tol)
    elif qubit_count(psi) == 2:
        k = classifier.classify_two_qubit(zero_state(2), psi, tol)
        report = {"reference": "zero", "class_index": k, "witness": {"type": "SchmidtAngle",
                  "schmidt_angle": canonical.schmidt_two_qubit(psi).angle}, "margin": None}
        return report, f"class {k} from zero (two qubits)"
    else:
        _need_qubits(psi, (3,), "classification")
        result = classifier.classify_from_zero(psi, tol)
    report = {"reference": result.reference, "class_index": result.class_index,
              "witness": result.summary(), "margin": result.margin}
    text = (f"class {result.class_index} from {result.reference}\n"
            f"witness {report['witness']['type']}\nmargin {result.margin:.3e}")
    return report, text


def cmd_synth(args):
    target = load_state(args.target)
    tol = resolve_tolerance(args.tolerance)
    nn = args.nearest_neighbor
    try:
        if args.source == "zero":
            if qubit_count(target) == 2:
                res = synthesizer.two_qubit_transform(zero_state(2), target, tol)
            else:
                _need_qubits(target, (3,), "preparation from zero")
                res = synthesizer.prepare_from_zero(target, nn, tol, args.seed)
        elif args.source == "ghz":
            _need_qubits(target, (3,), "preparation from GHZ")
            res = synthesizer.prepare_from_ghz(target, nn, tol, args.seed)
        else:
            source = load_state(args.source)
            _same_size(source, target)
            res = synthesizer.transform_any(source, target, nn, tol, args.seed)
    except synthesizer.SynthesisError as exc:
        raise CliError(f"synthesis failed: {exc}", EXIT_VERIFY) from exc
    # independent re-check of the emitted circuit
    f = fidelity(apply_circuit(res.source, res.circuit), target)
    if f < 1 - synthesizer.VERIFY_TOL:
        raise CliError(f"emitted circuit reaches fidelity {f:.12f} only", EXIT_VERIFY)
    doc = circuit_to_document(res.circuit)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(dumps(doc) + "\n")
    report = {"circuit": doc, "cnot_count": res.cnot_count, "route": res.route, "fidelity": f}
    lines = [repr(g) for g in res.circuit.gates]
    lines.append(f"cnot_count {res.cnot_count}")
    lines.append(f"fidelity {f:.12f}")
    return report, "\n".join(lines)


def cmd_verify(args):
    source = load_state(args.source)
    circuit = load_circuit(args.circuit)
    target = load_state(args.target)
    _same_size(source, target)
    if circuit_max_qubit(circuit) > qubit_count(source):
        raise CliError("circuit acts on more qubits than the state has", EXIT_DIMENSION)
    f = fidelity(apply_circuit(source, circuit), target)
    passed = bool(f >= args.threshold)
    report = {"fidelity": f, "threshold": args.threshold, "pass": passed, "cnot_count": circuit.cnot_count}
    return report, f"fidelity {f:.12f}\n{'pass' if passed else 'fail'}"


def cmd_invariants(args):
    psi = load_state(args.state)
    _need_qubits(psi, (2, 3), "invariants")
    n = qubit_count(psi)
    inv = [float(np.real(np.trace(r @ r))) for r in (reduced_density(psi, [k]) for k in range(1, n + 1))]
    report = {"qubits": n, "purities": inv}
    if qubit_count(psi) == 3:
        report["tangle"] = canonical.tangle(psi)
    elif qubit_count(psi) == 2:
        report["schmidt_angle"] = canonical.schmidt_two_qubit(psi).angle
    text = "I = (" + ", ".join(f"{x:.12f}" for x in inv) + ")"
    if "tangle" in report:
        text += f"\ntangle {report['tangle']:.12f}"
    return report, text


def cmd_sample(args):
    if args.qubits not in (2, 3):
        raise CliError("--qubits must be 2 or 3", EXIT_DIMENSION)
    seeds = np.random.default_rng(args.seed).integers(0, 2**32, size=args.count)
    states = [state_to_document(haar_sample(args.qubits, int(s))) for s in seeds]
    text = "\n".join(dumps(doc, indent=None) for doc in states)
    return {"seed": args.seed, "states": states}, text


def cmd_oracle(args):
    source, target = load_state(args.source), load_state(args.target)
    _same_size(source, target)
    try:
        rep = oracle.min_cnot_search(source, target, args.kmax, args.threshold, args.seed,
                                     args.restarts, args.escalated_restarts)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARSE) from exc
    report = rep.to_dict()
    text = [f"verdict {rep.verdict}"]
    for k in range(args.kmax + 1):
        best = rep.best_at(k)
        if not np.isnan(best):
            text.append(f"k={k} best infidelity {best:.3e}")
    code = EXIT_OK if rep.verdict is not None else EXIT_NO_VERDICT
    return report, "\n".join(text), code


def cmd_probe(args):
    rep = oracle.probe_max_distance(args.samples, args.seed, args.kmax, restarts=args.restarts,
                                    escalated_restarts=args.escalated_restarts)
    text = [f"{e.index}: verdict {e.verdict}{' flagged' if e.flagged else ''}" for e in rep.entries]
    text.append(f"max verdict {rep.max_verdict}")
    text.append(rep.note)
    return rep.to_dict(), "\n".join(text)


# --- parser ------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cnotm", description="CNOT-distance classification and synthesis "
                                     "for two- and three-qubit pure states.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the full report as JSON")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="CNOT-distance class of a state")
    p.add_argument("state")
    p.add_argument("--ref", choices=("zero", "ghz"), default="zero")
    p.add_argument("--tolerance", type=float)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("synth", parents=[common], help="circuit preparing a target state")
    p.add_argument("target")
    p.add_argument("--from", dest="source", default="zero", help="zero, ghz or a state file")
    p.add_argument("--nearest-neighbor", action="store_true", help="restrict CNOTs to the line 1-2-3")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--output", help="also write the circuit document to this file")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("verify", parents=[common], help="fidelity of a circuit applied to a source state")
    p.add_argument("source")
    p.add_argument("circuit")
    p.add_argument("target")
    p.add_argument("--threshold", type=float, default=1 - 1e-8)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("invariants", parents=[common], help="local purities and tangle")
    p.add_argument("state")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("sample", parents=[common], help="Haar-random state documents")
    p.add_argument("--qubits", type=int, default=3)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sample)

    for name, func in (("oracle", cmd_oracle), ("probe-max-distance", cmd_probe)):
        p = sub.add_parser(name, parents=[common], help="numerical CNOT-distance search" if name == "oracle"
                           else "oracle distances of random pairs (evidence only)")
        if name == "oracle":
            p.add_argument("source")
            p.add_argument("target")
            p.add_argument("--threshold", type=float, default=oracle.ORACLE_THRESHOLD)
        else:
            p.add_argument("--samples", type=int, default=20)
        p.add_argument("--kmax", type=int, default=4)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--restarts", type=int, default=oracle.DEFAULT_RESTARTS)
        p.add_argument("--escalated-restarts", type=int, default=oracle.ESCALATED_RESTARTS)
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (GateError, DimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    report, text = out[0], out[1]
    code = out[2] if len(out) > 2 else EXIT_OK
    print(dumps(report) if args.json else text)
    return code


if __name__ == "__main__":
    sys.exit(main())
