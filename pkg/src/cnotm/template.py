"""Fixed-CNOT-pattern circuit templates fitted by batched Levenberg-Marquardt.

A pattern of ``k`` CNOTs defines ``k + 1`` local layers.  Each layer puts
``RZ(a) RY(b) RZ(c)`` on every qubit, so a template has ``3 n (k + 1)``
angles.  All restarts of one pattern are optimized together as one batch.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .state import Circuit, Gate, qubit_count


def cnot_matrix(control: int, target: int, n: int) -> np.ndarray:
    dim = 2**n
    m = np.zeros((dim, dim))
    for i in range(dim):
        bits = [(i >> (n - q)) & 1 for q in range(1, n + 1)]
        if bits[control - 1]:
            bits[target - 1] ^= 1
        j = int("".join(map(str, bits)), 2)
        m[j, i] = 1
    return m


def _zyz_batch(angles):
    """Unitaries ``RZ(a) RY(b) RZ(c)`` and their angle derivatives.

    ``angles`` has shape ``(..., 3)``; returns ``(..., 2, 2)`` and ``(..., 3, 2, 2)``.
    """
    a, b, c = angles[..., 0], angles[..., 1], angles[..., 2]
    cb, sb = np.cos(b), np.sin(b)
    ep = np.exp(-1j * (a + c))  # e^{-i(a+c)}
    em = np.exp(-1j * (a - c))  # e^{-i(a-c)}
    u = np.empty(angles.shape[:-1] + (2, 2), dtype=complex)
    u[..., 0, 0] = ep * cb
    u[..., 0, 1] = -em * sb
    u[..., 1, 0] = np.conj(em) * sb
    u[..., 1, 1] = np.conj(ep) * cb
    du = np.empty(angles.shape[:-1] + (3, 2, 2), dtype=complex)
    # d/da
    du[..., 0, 0, 0] = -1j * u[..., 0, 0]
    du[..., 0, 0, 1] = -1j * u[..., 0, 1]
    du[..., 0, 1, 0] = 1j * u[..., 1, 0]
    du[..., 0, 1, 1] = 1j * u[..., 1, 1]
    # d/db
    du[..., 1, 0, 0] = -ep * sb
    du[..., 1, 0, 1] = -em * cb
    du[..., 1, 1, 0] = np.conj(em) * cb
    du[..., 1, 1, 1] = -np.conj(ep) * sb
    # d/dc
    du[..., 2, 0, 0] = -1j * u[..., 0, 0]
    du[..., 2, 0, 1] = 1j * u[..., 0, 1]
    du[..., 2, 1, 0] = -1j * u[..., 1, 0]
    du[..., 2, 1, 1] = 1j * u[..., 1, 1]
    return u, du


def _on_qubit(x, m, q, n):
    """Apply per-restart 2x2 matrices ``m`` (R, ..., 2, 2) to qubit ``q`` of ``x`` (R, ..., D)."""
    lead = x.shape[:-1]
    y = x.reshape(lead + (2**q, 2, 2 ** (n - q - 1)))
    y0, y1 = y[..., 0, :], y[..., 1, :]
    m = m[..., None, None]
    shape = np.broadcast_shapes(m.shape[:-4], lead)
    out = np.empty(shape + (2**q, 2, 2 ** (n - q - 1)), dtype=complex)
    out[..., 0, :] = m[..., 0, 0, :, :] * y0 + m[..., 0, 1, :, :] * y1
    out[..., 1, :] = m[..., 1, 0, :, :] * y0 + m[..., 1, 1, :, :] * y1
    return out.reshape(shape + (2**n,))


def _layer_matrix(u, n):
    """Full layer unitary (R, D, D) from per-qubit factors (R, n, 2, 2)."""
    r = u.shape[0]
    out = u[:, 0]
    for q in range(1, n):
        d = out.shape[-1]
        out = (out[:, :, None, :, None] * u[:, q, None, :, None, :]).reshape(r, 2 * d, 2 * d)
    return out


def template_size(pattern: Sequence, n: int = 3) -> int:
    return 3 * n * (len(pattern) + 1)


def template_circuit(pattern: Sequence, params, n: int = 3, tol: float = 0.0) -> Circuit:
    params = np.asarray(params, dtype=float).reshape(len(pattern) + 1, n, 3)
    gates = []
    for layer in range(len(pattern) + 1):
        for q in range(n):
            a, b, c = params[layer, q]
            for g in (Gate.rz(q + 1, c), Gate.ry(q + 1, b), Gate.rz(q + 1, a)):
                if abs(g.angle) > tol:
                    gates.append(g)
        if layer < len(pattern):
            gates.append(Gate.cnot(*pattern[layer]))
    return Circuit(tuple(gates))


def _simulate(params, source, cnots, n, with_jacobian):
    r = params.shape[0]
    dim = 2**n
    per_layer = 3 * n
    factors = []
    for l in range(len(cnots) + 1):
        block = params[:, l * per_layer:(l + 1) * per_layer].reshape(r, n, 3)
        factors.append(_zyz_batch(block))
    state = np.broadcast_to(source, (r, dim)).astype(complex)
    inputs = []
    for l, (u, _) in enumerate(factors):
        inputs.append(state)
        for q in range(n):
            state = _on_qubit(state, u[:, q], q, n)
        if l < len(cnots):
            state = state @ cnots[l].T
    if not with_jacobian:
        return state, None
    jac = []
    back = None
    for l in range(len(factors) - 1, -1, -1):
        u, du = factors[l]
        cols = []
        for q in range(n):
            y = inputs[l]
            for p in range(n):
                if p != q:
                    y = _on_qubit(y, u[:, p], p, n)
            cols.append(_on_qubit(y[:, None, :], du[:, q], q, n))
        d = np.concatenate(cols, axis=1)  # (R, 3n, D)
        jac.append(d if back is None else d @ back.transpose(0, 2, 1))
        if l > 0:
            step = _layer_matrix(u, n)
            back = step if back is None else back @ step
            back = back @ cnots[l - 1]
    jac = np.concatenate(jac[::-1], axis=1)  # (R, P, D)
    return state, jac


@dataclass
class FitBatch:
    infidelities: np.ndarray
    params: np.ndarray
    iterations: int

    @property
    def best_index(self) -> int:
        # argmin returns the lowest index among ties
        return int(np.argmin(self.infidelities))

    @property
    def best_infidelity(self) -> float:
        return float(self.infidelities[self.best_index])

    @property
    def best_params(self) -> np.ndarray:
        return self.params[self.best_index]


def initial_angles(pattern: Sequence, count: int, seed, n: int = 3) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(-np.pi, np.pi, size=(count, template_size(pattern, n)))


def fit_template(source, target, pattern: Sequence, start: np.ndarray, max_iter: int = 300,
                 stall: float = 1e-12, floor: float = 1e-15, rel_stall: float = 1e-6,
                 plateau: float = 1e-4) -> FitBatch:
    """Levenberg-Marquardt fit (gain-ratio damping) of ``|<target| T(angles) |source>|`` towards 1.

    ``start`` holds one row of angles per restart.  A restart stops when its
    infidelity drops below ``floor``, when an accepted step improves the
    infidelity by less than ``stall``, or after ``max_iter`` iterations.  A
    restart sitting above ``plateau`` also stops once an accepted step gains
    less than ``rel_stall`` of its current infidelity.
    """
    source = np.asarray(source, dtype=complex)
    target = np.asarray(target, dtype=complex)
    n = qubit_count(source)
    cnots = [cnot_matrix(c, t, n) for c, t in pattern]
    params = np.array(start, dtype=float, copy=True)
    r, p = params.shape
    if p != template_size(pattern, n):
        raise ValueError("start angles do not match the template size")

    def infid(states):
        return np.clip(1 - np.abs(states @ target.conj()) ** 2, 0.0, None)

    state, _ = _simulate(params, source, cnots, n, False)
    cur = infid(state)
    mu = np.full(r, 1e-3)
    nu = np.full(r, 2.0)
    eye = np.eye(p + 1)
    active = cur > floor
    it = 0
    while it < max_iter and active.any():
        it += 1
        idx = np.flatnonzero(active)
        th = params[idx]
        psi, jac = _simulate(th, source, cnots, n, True)
        # residual psi - e^{i beta} target with the optimal beta, beta kept as a parameter
        beta = np.angle(psi @ target.conj())
        res = psi - np.exp(1j * beta)[:, None] * target[None, :]
        dbeta = (-1j * np.exp(1j * beta))[:, None] * target[None, :]
        jfull = np.concatenate([jac, dbeta[:, None, :]], axis=1)  # (m, P+1, D)
        jr = np.concatenate([jfull.real, jfull.imag], axis=2)  # (m, P+1, 2D)
        rr = np.concatenate([res.real, res.imag], axis=1)
        jtj = jr @ jr.transpose(0, 2, 1)
        grad = (jr @ rr[..., None])[..., 0]
        step = np.linalg.solve(jtj + mu[idx, None, None] * eye, -grad[..., None])[..., 0]
        trial = th + step[:, :p]
        tpsi, _ = _simulate(trial, source, cnots, n, False)
        new = infid(tpsi)
        better = new < cur[idx]
        gain = cur[idx] - new
        # gain ratio on 0.5 |r|^2 = 1 - |<t|psi>|
        predicted = -(step * grad).sum(1) - 0.5 * (step * (jtj @ step[..., None])[..., 0]).sum(1)
        actual = np.sqrt(np.clip(1 - new, 0, 1)) - np.sqrt(np.clip(1 - cur[idx], 0, 1))
        rho = actual / np.maximum(predicted, 1e-300)
        acc, rej = idx[better], idx[~better]
        mu[acc] = np.maximum(mu[acc] * np.maximum(1 / 3, 1 - (2 * rho[better] - 1) ** 3), 1e-12)
        nu[acc] = 2.0
        mu[rej] = mu[rej] * nu[rej]
        nu[rej] = nu[rej] * 2
        params[acc] = trial[better]
        cur[acc] = new[better]
        slow = (gain < stall) | ((new > plateau) & (gain < rel_stall * new))
        done = (cur[idx] <= floor) | (mu[idx] > 1e8) | (better & slow & (it > 5))
        active[idx[done]] = False
    return FitBatch(cur.copy(), params, it)
