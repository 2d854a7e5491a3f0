"""Explicit minimal-CNOT circuits for two- and three-qubit states.

Three-qubit preparations from |000> follow the reduction argument: each
class is lowered by one CNOT after suitable local unitaries, the residual
product state is rotated to |000>, and the whole reduction is inverted.
Preparations from GHZ go through the ``I_k = 1/2`` stratum.  Every circuit
is simulated before it is returned.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .canonical import (
    DEFAULT_TOL,
    TANGLE_TOL,
    GhzForm,
    NotGhzType,
    NotWType,
    WForm,
    acin_form,
    ghz_canonical,
    ghz_form,
    lu_equivalent,
    purity_invariants,
    schmidt_two_qubit,
    separable_qubits,
    tangle,
    w_canonical,
    w_form,
)
from .classifier import (
    BiSeparableWitness,
    GhzEquivalenceWitness,
    ProductWitness,
    TwoTermWitness,
    classify_from_ghz,
    classify_from_zero,
)
from .state import (
    Circuit,
    Gate,
    apply_circuit,
    as_state,
    fidelity,
    ghz_state,
    invert_circuit,
    local_gates,
    permute_qubits,
    qubit_count,
    reduced_density,
    rotation_matrix,
    unitary_gates,
    unitary_to_zero,
    zero_state,
)
from .template import fit_template, initial_angles, template_circuit

ZERO_REDUCTION = "zero_reduction"
GHZ_ROUTE = "ghz_route"
TWO_QUBIT = "two_qubit"
COMPOSITE = "composite"
TEMPLATE_FIT = "template_fit"

ROUTE_BOUNDS = {ZERO_REDUCTION: 3, GHZ_ROUTE: 2, TWO_QUBIT: 1, COMPOSITE: 4}

VERIFY_TOL = 1e-8
FIT_THRESHOLD = 1e-10
ANGLE_CHECK_TOL = 1e-9
_EPS = 1e-12

ALL_PAIRS = ((1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2))
LINE_PAIRS = ((1, 2), (2, 1), (2, 3), (3, 2))


class SynthesisError(RuntimeError):
    """No verified circuit could be produced."""


class ConvergenceFailure(SynthesisError):
    def __init__(self, message: str, best_infidelity: float):
        super().__init__(message)
        self.best_infidelity = best_infidelity


class DegenerateAngles(ValueError):
    """A closed-form angle is undefined for these parameters."""


class InvalidWitness(ValueError):
    """The witness does not describe the state it was passed with."""


@dataclass(frozen=True)
class SynthesisResult:
    circuit: Circuit
    source: np.ndarray
    target: np.ndarray
    achieved_fidelity: float
    route: str

    @property
    def cnot_count(self) -> int:
        return self.circuit.cnot_count


def _result(circuit, source, target, route) -> SynthesisResult:
    circuit = Circuit(tuple(circuit))
    f = fidelity(apply_circuit(source, circuit), target)
    return SynthesisResult(circuit, np.asarray(source), np.asarray(target), f, route)


def _ok(result: SynthesisResult | None) -> bool:
    return result is not None and result.achieved_fidelity >= 1 - VERIFY_TOL


def _pairs_ok(circuit, pairs) -> bool:
    return all(tuple(p) in pairs for p in Circuit(tuple(circuit)).cnot_pairs)


def _three(state):
    psi = as_state(state)
    if qubit_count(psi) != 3:
        raise ValueError("expected a three-qubit state")
    return psi


def _dagger(u):
    return np.asarray(u).conj().T


def _unit(v):
    v = np.asarray(v, dtype=complex)
    return v / np.linalg.norm(v)


# --- two qubits --------------------------------------------------------------------------

def two_qubit_transform(psi, psi2, tol: float = DEFAULT_TOL) -> SynthesisResult:
    """At most one CNOT between any two two-qubit states."""
    a, b = as_state(psi), as_state(psi2)
    if qubit_count(a) != 2 or qubit_count(b) != 2:
        raise ValueError("two_qubit_transform takes two-qubit states")
    fa, fb = schmidt_two_qubit(a), schmidt_two_qubit(b)
    gates = local_gates([_dagger(u) for u in fa.local_unitaries])
    if abs(fa.angle - fb.angle) >= tol:
        # on cos(p)|00> + sin(p)|11>, RY_1(t) then CNOT_12 leaves Schmidt angle t
        gates += [Gate.ry(1, fb.angle), Gate.cnot(1, 2)]
    mid = apply_circuit(a, gates)
    fm = schmidt_two_qubit(mid)
    gates += local_gates([ub @ _dagger(um) for um, ub in zip(fm.local_unitaries, fb.local_unitaries)])
    res = _result(gates, a, b, TWO_QUBIT)
    if not _ok(res):
        raise SynthesisError(f"two-qubit transform reached fidelity {res.achieved_fidelity}")
    return res


# --- local building blocks -------------------------------------------------------------

def align_rotation(d, dp):
    """``(pre, angle)`` with ``L = RY(angle) pre`` and ``L d`` parallel to ``X L dp``.

    ``pre`` sends ``d`` to |0> and ``dp`` to ``cos(g)|0> + sin(g)|1>``; the
    final rotation is ``RY(pi/4 - g/2)``.
    """
    w = unitary_to_zero(_unit(d))
    v = w @ _unit(dp)
    g = float(np.arctan2(abs(v[1]), abs(v[0])))
    kappa = 0.0
    if abs(v[1]) > _EPS:
        kappa = float(np.angle(v[1]) - (np.angle(v[0]) if abs(v[0]) > _EPS else 0.0))
    pre = np.diag([1, np.exp(-1j * kappa)]) @ w
    return pre, np.pi / 4 - g / 2


def _align_gates(qubit, d, dp):
    pre, angle = align_rotation(d, dp)
    return unitary_gates(qubit, pre) + [Gate.ry(qubit, angle)]


def _cnot_between(a, b, pairs):
    if (a, b) in pairs:
        return Gate.cnot(a, b)
    return None


# --- reduction towards |000> ----------------------------------------------------------------

def _step_biseparable(w: BiSeparableWitness, pairs):
    i, j = w.pair
    ui, uj = w.schmidt.local_unitaries
    gates = unitary_gates(i, _dagger(ui)) + unitary_gates(j, _dagger(uj))
    # cos(p)|00> + sin(p)|11> is symmetric, either direction disentangles it
    for c, t in ((i, j), (j, i)):
        if (c, t) in pairs:
            return gates + [Gate.cnot(c, t)]
    k = w.qubit
    for c, t in ((i, j), (j, i)):
        if (c, k) in pairs and (k, t) in pairs:
            # with qubit k in |0>, CNOT(c,k) CNOT(k,t) CNOT(c,k) acts as CNOT(c,t)
            gates += unitary_gates(k, unitary_to_zero(w.factor))
            return gates + [Gate.cnot(c, k), Gate.cnot(k, t), Gate.cnot(c, k)]
    raise SynthesisError(f"no allowed CNOT can disentangle pair {w.pair}")


def _step_two_term(form: GhzForm, pairs, tol):
    (_, f), (_, g) = form.terms()
    overlaps = [abs(np.vdot(_unit(x), _unit(y))) for x, y in zip(f, g)]
    orth = sorted((q for q in (1, 2, 3) if overlaps[q - 1] < max(tol, 1e-6)), key=lambda q: overlaps[q - 1])
    choices = []
    for k in orth:
        for t in (1, 2, 3):
            if t == k or (k, t) not in pairs:
                continue
            other = 6 - k - t
            # the pair left entangled is (k, other); prefer one a single CNOT can reach
            rank = 0 if ((k, other) in pairs or (other, k) in pairs) else 1
            choices.append((rank, overlaps[k - 1], k, t))
    if not choices:
        raise SynthesisError("no allowed CNOT starts on an orthogonal qubit")
    _, _, k, t = min(choices)
    gates = unitary_gates(k, unitary_to_zero(f[k - 1]))
    gates += _align_gates(t, f[t - 1], g[t - 1])
    return gates + [Gate.cnot(k, t)]


def _step_w(form: WForm, pairs):
    gates = local_gates([_dagger(u) for u in form.local_unitaries])
    # CNOT_23 (or CNOT_32) makes the target's two factors orthogonal; prefer
    # the target with the most outgoing links for the next step
    options = [(c, t) for c, t in ((2, 3), (3, 2)) if (c, t) in pairs]
    if not options:
        raise SynthesisError("W-type step needs a CNOT between qubits 2 and 3")
    c, t = max(options, key=lambda p: sum((p[1], x) in pairs for x in (1, 2, 3)))
    return gates + [Gate.cnot(c, t)]


_GHZ_STEP_ORDER = ((2, 3), (2, 1), (1, 2), (3, 2), (1, 3), (3, 1))


def _step_ghz(psi, form: GhzForm, pairs):
    """One CNOT taking a GHZ-type class-3 state to two terms orthogonal on qubit ``o``.

    Qubit ``o`` is split along ``f_o`` and its complement; the complement
    slice is a product, and the control is rotated so that slice sits on
    control |0>.  The target is then aligned so the other slice becomes a
    product after the CNOT.
    """
    (_, f), (_, g) = form.terms()
    for c, t in _GHZ_STEP_ORDER:
        if (c, t) in pairs:
            break
    else:
        raise SynthesisError("no allowed CNOT for the GHZ-type step")
    o = 6 - c - t
    gates = unitary_gates(o, unitary_to_zero(f[o - 1])) + unitary_gates(c, unitary_to_zero(g[c - 1]))
    state = apply_circuit(psi, gates)
    tens = permute_qubits(state, (o, c, t)).reshape(2, 2, 2)
    p, q = tens[0, 0], tens[0, 1]
    if np.linalg.norm(p) > _EPS and np.linalg.norm(q) > _EPS:
        gates += _align_gates(t, p, q)
    return gates + [Gate.cnot(c, t)]


def _check_witness(psi, witness, tol=VERIFY_TOL):
    rec = witness.reconstruct()
    if rec.shape != psi.shape or fidelity(rec, psi) < 1 - tol:
        raise InvalidWitness("witness does not reconstruct the state")


def reduce_step_zero(state, class_witness=None, pairs: Sequence = ALL_PAIRS, tol: float = DEFAULT_TOL):
    """One reduction step: ``(fragment, new_state)`` with one CNOT and class lowered by one.

    ``class_witness`` is the :class:`StateClass` from :func:`classify_from_zero`
    or its witness; when omitted the state is classified here.  In a restricted coupling graph
    (``pairs``) a bi-separable pair without a direct link is handled with a
    three-CNOT bridge through the idle qubit.
    """
    psi = _three(state)
    pairs = tuple(tuple(p) for p in pairs)
    if class_witness is None:
        class_witness = classify_from_zero(psi, tol).witness
    w = getattr(class_witness, "witness", class_witness)
    if isinstance(w, ProductWitness):
        raise ValueError("a product state needs no reduction")
    _check_witness(psi, w)
    if isinstance(w, BiSeparableWitness):
        gates = _step_biseparable(w, pairs)
    elif isinstance(w, TwoTermWitness):
        gates = _step_two_term(w.form, pairs, tol)
    elif isinstance(w, WForm):
        gates = _step_w(w, pairs)
    elif isinstance(w, GhzForm):
        gates = _step_ghz(psi, w, pairs)
    else:
        raise InvalidWitness(f"unsupported witness {type(w).__name__}")
    frag = Circuit(tuple(gates))
    return frag, apply_circuit(psi, frag)


def _patterns(length, pairs):
    return [list(p) for p in itertools.product(pairs, repeat=length)]


def _fit_first(source, target, patterns, seed, restarts=20):
    best = None
    for pat in patterns:
        try:
            res = template_fit(source, target, pat, restarts=restarts, seed=seed)
        except ConvergenceFailure as exc:
            best = exc.best_infidelity if best is None else min(best, exc.best_infidelity)
            continue
        if _ok(res):
            return res
    return None


def prepare_from_zero(target, nearest_neighbor: bool = False, tol: float = DEFAULT_TOL,
                      seed: int = 0) -> SynthesisResult:
    """Circuit from |000> to ``target`` with as many CNOTs as its class."""
    psi = _three(target)
    pairs = LINE_PAIRS if nearest_neighbor else ALL_PAIRS
    cls = classify_from_zero(psi, tol)
    start = cls.class_index
    gates: list[Gate] = []
    state = psi
    for _ in range(6):
        if cls.class_index == 0:
            break
        frag, state = reduce_step_zero(state, cls.witness, pairs, tol)
        gates.extend(frag)
        cls = classify_from_zero(state, tol)
    res = None
    if cls.class_index == 0:
        for q, v in enumerate(cls.witness.factors, start=1):
            gates += unitary_gates(q, unitary_to_zero(v))
        prep = invert_circuit(Circuit(tuple(gates)))
        res = _result(prep, zero_state(), psi, ZERO_REDUCTION)
    limit = start if not nearest_neighbor else start + 1
    if _ok(res) and res.cnot_count <= limit:
        return res
    # numerical fallback on the same CNOT count
    pats = []
    if res is not None and res.cnot_count == limit:
        pats.append(res.circuit.cnot_pairs)
    pats += [p for p in _patterns(limit, pairs) if p not in pats][: 64 if nearest_neighbor else None]
    fit = _fit_first(zero_state(), psi, pats, seed)
    if fit is not None:
        return fit
    if _ok(res):
        return res
    raise SynthesisError("could not prepare the state from |000>")


# --- closed-form angles ----------------------------------------------------------------

def _half_angle(num, den, what):
    if abs(den) < _EPS:
        if abs(num) < _EPS:
            return 0.0
        raise DegenerateAngles(f"denominator of {what} vanishes")
    return 0.5 * float(np.arctan2(num, den))


def ghz_class1_angles(lambda2: float, lambda3: float) -> tuple[float, float]:
    """``(theta2, theta3)`` for ``CNOT_23 RY_2(theta2) RY_3(theta3)|GHZ>``."""
    s, c = lambda2 * np.sqrt(2), lambda3 * np.sqrt(2)
    if lambda2**2 + lambda3**2 > 0.5 + 1e-12 or abs(s) > 1 + 1e-12 or abs(c) > 1 + 1e-12:
        raise ValueError(f"(lambda2, lambda3) = ({lambda2}, {lambda3}) outside the admissible range")
    s, c = float(np.clip(s, -1, 1)), float(np.clip(c, -1, 1))
    return 0.5 * float(np.arcsin(s)), 0.5 * float(np.arccos(c))


def _i1(state):
    return purity_invariants(state)[0]


def _half_step_circuit(theta1, theta2, chi=None):
    gates = [Gate.ry(2, theta2), Gate.ry(1, theta1)]
    if chi is not None:
        gates.append(Gate.rx(1, chi))
    return Circuit(tuple(gates + [Gate.cnot(1, 2)]))


def w_to_half_I1_angles(phi: float, xi: float, phi2: float) -> tuple[float, float]:
    """``(theta1, theta2)`` giving ``I_1 = 1/2`` after ``CNOT_12 RY_1(theta1) RY_2(theta2)``.

    The input is the W-type frame ``cos(phi)|000> + sin(phi)|alpha>(cos(phi2)|10> + sin(phi2)|01>)``
    with ``|alpha> = cos(xi)|0> + sin(xi)|1>``.
    """
    if abs(np.sin(2 * xi)) < _EPS:
        raise DegenerateAngles("sin(2 xi) vanishes")
    if abs(np.sin(phi)) < _EPS:
        raise DegenerateAngles("cot(phi) is undefined")
    base = _half_angle(1 / np.tan(phi) ** 2 + np.cos(2 * xi), np.sin(2 * xi), "theta1")
    state = w_canonical(phi, phi2, xi)
    for t1 in (base, base + np.pi / 2):
        num = np.sin(xi + 2 * t1) * np.cos(phi2) * np.sin(2 * phi)
        den = np.sin(2 * xi + 2 * t1) * np.cos(2 * phi2) * np.sin(phi) ** 2 - np.cos(phi) ** 2 * np.sin(2 * t1)
        t2 = _half_angle(num, den, "theta2")
        for cand in (t2, t2 + np.pi / 2):
            if abs(_i1(apply_circuit(state, _half_step_circuit(t1, cand))) - 0.5) < ANGLE_CHECK_TOL:
                return float(t1), float(cand)
    raise DegenerateAngles("no branch reaches I_1 = 1/2")


def ghz_to_half_I1_angles(a, b, xi, phi1, phi2, phi3) -> tuple[float, float, float]:
    """``(theta1, theta2, chi)`` giving ``I_1 = 1/2`` after ``CNOT_12 RX_1(chi) RY_1(theta1) RY_2(theta2)``.

    The input is the GHZ-type frame ``a|000> + e^{i xi} b |alpha beta gamma>``
    with real factors ``cos(phi_k)|0> + sin(phi_k)|1>``.
    """
    c, s = np.cos, np.sin
    p1, p2, p3 = phi1, phi2, phi3
    n1 = (b**2 - b**4) * c(2 * p1) - a**2 * (
        a**2 - 1 - 2 * b**2 * c(p1) ** 2 * c(2 * p2) + 2 * b**4 * c(p2) ** 2 * s(2 * p1) ** 2 * s(p3) ** 2)
    d1 = b**2 * s(2 * p1) * (
        1 - a**2 - b**2 + 2 * a**2 * c(p2) ** 2 * (1 - a**2 * s(p3) ** 2 + b**2 * c(2 * p1) * s(p3) ** 2))
    base = _half_angle(n1, d1, "theta1")
    state = ghz_canonical(a, b, xi, p1, p2, p3)
    for t1 in (base, base + np.pi / 2):
        n2 = -(b**2 * s(2 * p1 + 2 * t1) * s(2 * p2) + 2 * a * b * c(xi) * s(p1 + 2 * t1) * s(p2) * c(p3))
        d2 = (a**2 * s(2 * t1) + b**2 * s(2 * p1 + 2 * t1) * c(2 * p2)
              + 2 * a * b * c(xi) * s(p1 + 2 * t1) * c(p2) * c(p3))
        n3 = -(2 * a * b * s(xi) * s(p1) * s(p2) * c(p3) * (a**2 * s(2 * t1) - b**2 * s(2 * p1 + 2 * t1)))
        d3 = 2 * a * s(p1) * s(p2) * (2 * a * b**2 * c(p1) * c(p2) + b * (a**2 + b**2) * c(xi) * c(p3))
        t2 = _half_angle(n2, d2, "theta2")
        ch = _half_angle(n3, d3, "chi")
        for cand2 in (t2, t2 + np.pi / 2):
            for cand3 in (ch, ch + np.pi / 2):
                out = apply_circuit(state, _half_step_circuit(t1, cand2, cand3))
                if abs(_i1(out) - 0.5) < ANGLE_CHECK_TOL:
                    return float(t1), float(cand2), float(cand3)
    raise DegenerateAngles("no branch reaches I_1 = 1/2")


# --- preparation from GHZ -------------------------------------------------------------------

_ORDERS = tuple(itertools.permutations((1, 2, 3)))


def _frame_pairs(order, pairs):
    """Pairs allowed in the frame where frame qubit ``p`` is ``order[p - 1]``."""
    return tuple((a, b) for a in (1, 2, 3) for b in (1, 2, 3)
                 if a != b and (order[a - 1], order[b - 1]) in pairs)


def _lu_gates(src, dst, tol):
    same, us = lu_equivalent(src, dst, tol, return_unitaries=True)
    return local_gates(us) if same else None


def _class1_from_ghz(psi, pairs, tol, prefer=None):
    """GHZ -> psi with one CNOT for a state with some ``I_k = 1/2``."""
    inv = purity_invariants(psi)
    ks = sorted((q for q in (1, 2, 3) if abs(inv[q - 1] - 0.5) < tol), key=lambda q: (q != prefer, abs(inv[q - 1] - 0.5)))
    ghz = ghz_state()
    for k in ks:
        rest = [q for q in (1, 2, 3) if q != k]
        for order in ((k, rest[0], rest[1]), (k, rest[1], rest[0])):
            if (order[1], order[2]) not in pairs:
                continue
            framed = permute_qubits(psi, order)
            form = acin_form(framed)
            l0, l1, l2, l3, _ = form.lambdas
            if abs(l0 - 1 / np.sqrt(2)) > 1e-6 or l1 > 1e-6:
                continue
            try:
                t2, t3 = ghz_class1_angles(l2, l3)
            except ValueError:
                continue
            head = Circuit((Gate.ry(3, t3), Gate.ry(2, t2), Gate.cnot(2, 3)))
            lu = _lu_gates(apply_circuit(ghz, head), framed, tol)
            if lu is None:
                continue
            circ = (head + Circuit(tuple(lu))).relabel(order)
            res = _result(circ, ghz, psi, GHZ_ROUTE)
            if _ok(res):
                return res
    return None


def _low_from_ghz(psi, pairs, tol, prefer=None):
    """GHZ -> psi for states of GHZ class 0 or 1."""
    lu = _lu_gates(ghz_state(), psi, tol)
    if lu is not None:
        res = _result(lu, ghz_state(), psi, GHZ_ROUTE)
        if _ok(res):
            return res
    return _class1_from_ghz(psi, pairs, tol, prefer)


def _half_step_frames(psi, pairs):
    for order in _ORDERS:
        fp = _frame_pairs(order, pairs)
        if (1, 2) in fp and ((2, 3) in fp or (3, 2) in fp):
            yield order, fp


def _class2_closed_form(psi, pairs, tol):
    ghz_type = tangle(psi) > TANGLE_TOL
    for order, fp in _half_step_frames(psi, pairs):
        framed = permute_qubits(psi, order)
        try:
            if ghz_type:
                form = ghz_form(framed, tol)
                angles = ghz_to_half_I1_angles(form.a, form.b, form.xi, *form.phis)
            else:
                form = w_form(framed, tol)
                angles = w_to_half_I1_angles(form.phi, form.xi, form.phi2)
        except (NotGhzType, NotWType, DegenerateAngles):
            continue
        step = _half_step_circuit(*angles)
        canon = form.canonical_vector()
        mid = apply_circuit(canon, step)
        low = _low_from_ghz(mid, fp, tol, prefer=1)
        if low is None:
            continue
        tail = invert_circuit(step) + Circuit(tuple(local_gates(form.local_unitaries)))
        circ = (low.circuit + tail).relabel(order)
        res = _result(circ, ghz_state(), psi, GHZ_ROUTE)
        if _ok(res):
            return res
    return None


def _class2_separable(psi, pairs, tol):
    """States with a separable qubit ``k``: put ``k`` in |+>, make a neighbour's
    Bloch vector lie on z, and a CNOT from ``k`` leaves ``I_k = 1/2``."""
    sep = separable_qubits(psi, tol)
    plus = rotation_matrix("ry", np.pi / 4)
    for k in sep:
        for j in (1, 2, 3):
            if j == k or (k, j) not in pairs:
                continue
            rho_k = reduced_density(psi, [k])
            s = np.linalg.eigh(rho_k)[1][:, -1]
            vecs = np.linalg.eigh(reduced_density(psi, [j]))[1]
            down = Circuit(tuple(unitary_gates(k, plus @ unitary_to_zero(s))
                                 + unitary_gates(j, _dagger(vecs)) + [Gate.cnot(k, j)]))
            mid = apply_circuit(psi, down)
            low = _low_from_ghz(mid, pairs, tol, prefer=k)
            if low is None:
                continue
            res = _result(low.circuit + invert_circuit(down), ghz_state(), psi, GHZ_ROUTE)
            if _ok(res):
                return res
    return None


def prepare_from_ghz(target, nearest_neighbor: bool = False, tol: float = DEFAULT_TOL,
                     seed: int = 0) -> SynthesisResult:
    """Circuit from GHZ to ``target`` with as many CNOTs as its GHZ class (at most two)."""
    psi = _three(target)
    pairs = LINE_PAIRS if nearest_neighbor else ALL_PAIRS
    cls = classify_from_ghz(psi, tol)
    k = cls.class_index
    res = None
    if k == 0:
        lu = local_gates(cls.witness.unitaries) if isinstance(cls.witness, GhzEquivalenceWitness) else None
        if lu is not None:
            res = _result(lu, ghz_state(), psi, GHZ_ROUTE)
    elif k == 1:
        res = _class1_from_ghz(psi, pairs, tol)
    else:
        if separable_qubits(psi, tol):
            res = _class2_separable(psi, pairs, tol)
        else:
            res = _class2_closed_form(psi, pairs, tol)
    if _ok(res) and res.cnot_count <= k:
        return res
    fit = _fit_first(ghz_state(), psi, _patterns(k, pairs), seed)
    if fit is not None:
        return fit
    raise SynthesisError(f"could not prepare the GHZ-class-{k} state from GHZ")


# --- any to any ----------------------------------------------------------------------------

def _pair_shortcut(a, b, pairs, tol):
    """Both states share a separable qubit: one CNOT on the remaining pair suffices."""
    sa, sb = separable_qubits(a, tol), separable_qubits(b, tol)
    for k in sa:
        if k not in sb:
            continue
        i, j = [q for q in (1, 2, 3) if q != k]
        if (i, j) not in pairs:
            continue
        order = (k, i, j)
        fa, fb = permute_qubits(a, order), permute_qubits(b, order)
        va = np.linalg.eigh(reduced_density(fa, [1]))[1][:, -1]
        vb = np.linalg.eigh(reduced_density(fb, [1]))[1][:, -1]
        ra = _unit(va.conj() @ fa.reshape(2, 4))
        rb = _unit(vb.conj() @ fb.reshape(2, 4))
        two = two_qubit_transform(ra, rb, tol)
        circ = Circuit(tuple(unitary_gates(1, _dagger(unitary_to_zero(vb)) @ unitary_to_zero(va))))
        circ = circ + two.circuit.relabel((2, 3))
        res = _result(circ.relabel(order), a, b, COMPOSITE)
        if _ok(res):
            return res
    return None


def transform_any(source, target, nearest_neighbor: bool = False, tol: float = DEFAULT_TOL,
                  seed: int = 0) -> SynthesisResult:
    """Circuit from ``source`` to ``target``: at most one CNOT for two qubits, four for three."""
    a, b = as_state(source), as_state(target)
    if a.shape != b.shape:
        raise ValueError("source and target have different qubit counts")
    if qubit_count(a) == 2:
        return two_qubit_transform(a, b, tol)
    a, b = _three(a), _three(b)
    pairs = LINE_PAIRS if nearest_neighbor else ALL_PAIRS
    lu = _lu_gates(a, b, tol)
    if lu is not None:
        res = _result(lu, a, b, COMPOSITE)
        if _ok(res):
            return res
    options = []
    shortcut = _pair_shortcut(a, b, pairs, tol)
    if shortcut is not None:
        options.append(shortcut)
    ga = prepare_from_ghz(a, nearest_neighbor, tol, seed)
    gb = prepare_from_ghz(b, nearest_neighbor, tol, seed)
    options.append(_result(invert_circuit(ga.circuit) + gb.circuit, a, b, COMPOSITE))
    za, zb = classify_from_zero(a, tol).class_index, classify_from_zero(b, tol).class_index
    if za + zb < ga.cnot_count + gb.cnot_count:
        pa = prepare_from_zero(a, nearest_neighbor, tol, seed)
        pb = prepare_from_zero(b, nearest_neighbor, tol, seed)
        options.append(_result(invert_circuit(pa.circuit) + pb.circuit, a, b, COMPOSITE))
    good = [r for r in options if _ok(r) and _pairs_ok(r.circuit, pairs)]
    if not good:
        raise SynthesisError("no verified any-to-any circuit")
    return min(good, key=lambda r: r.cnot_count)


# --- numerical fallback ------------------------------------------------------------------

def template_fit(source, target, cnot_pattern: Sequence, restarts: int = 20, seed: int = 0,
                 threshold: float = FIT_THRESHOLD) -> SynthesisResult:
    """Fit local layers around a fixed CNOT pattern; succeed below ``threshold`` infidelity."""
    a, b = as_state(source), as_state(target)
    if a.shape != b.shape:
        raise ValueError("source and target have different qubit counts")
    n = qubit_count(a)
    pattern = [tuple(int(x) for x in p) for p in cnot_pattern]
    for c, t in pattern:
        if c == t or not (1 <= c <= n and 1 <= t <= n):
            raise ValueError(f"invalid CNOT ({c}, {t}) for {n} qubits")
    batch = fit_template(a, b, pattern, initial_angles(pattern, restarts, seed, n))
    if batch.best_infidelity >= threshold:
        raise ConvergenceFailure(
            f"pattern {pattern} reached infidelity {batch.best_infidelity:.3e}", batch.best_infidelity)
    circ = template_circuit(pattern, batch.best_params, n)
    return _result(circ, a, b, TEMPLATE_FIT)
