"""Local-unitary canonical forms and invariants of two- and three-qubit states.

Every form stores ``local_unitaries`` and ``global_phase`` such that::

    state == exp(1j * global_phase) * kron(U1, U2, ...) @ form.canonical_vector()

so ``reconstruct()`` reproduces the input state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import least_squares

from .state import (
    apply_local,
    ghz_state,
    permute_qubits,
    qubit_count,
    reduced_density,
    rotation_matrix,
    unitary_to_zero,
)

DEFAULT_TOL = 1e-8
RANK_TOL = 1e-10
TANGLE_TOL = 1e-8
# entries of a canonical tensor below this are treated as structural zeros
# when fixing phases
_ZERO = 1e-10


class NotWType(ValueError):
    pass


class NotGhzType(ValueError):
    pass


class NotInClass(ValueError):
    pass


class InvariantTriple(NamedTuple):
    I1: float
    I2: float
    I3: float


def purity_invariants(state) -> InvariantTriple:
    """Purities ``tr rho_k^2`` of the three single-qubit reductions."""
    psi = np.asarray(state, dtype=complex)
    if qubit_count(psi) != 3:
        raise ValueError("purity invariants are defined for three qubits")
    values = []
    for k in (1, 2, 3):
        rho = reduced_density(psi, [k])
        values.append(float(np.real(np.trace(rho @ rho))))
    return InvariantTriple(*values)


def hyperdeterminant(state) -> complex:
    """Cayley hyperdeterminant of the 2x2x2 amplitude tensor."""
    psi = np.asarray(state, dtype=complex)
    if qubit_count(psi) != 3:
        raise ValueError("the hyperdeterminant is defined for three qubits")
    a000, a001, a010, a011, a100, a101, a110, a111 = psi
    d1 = a000**2 * a111**2 + a001**2 * a110**2 + a010**2 * a101**2 + a100**2 * a011**2
    d2 = (a000 * a111 * a011 * a100 + a000 * a111 * a101 * a010
          + a000 * a111 * a110 * a001 + a011 * a100 * a101 * a010
          + a011 * a100 * a110 * a001 + a101 * a010 * a110 * a001)
    d3 = a000 * a110 * a101 * a011 + a111 * a001 * a010 * a100
    return d1 - 2 * d2 + 4 * d3


def tangle(state) -> float:
    return float(4 * abs(hyperdeterminant(state)))


# --- homogeneous quadratic det(x M0 + y M1) = 0 ---------------------------------------

def _pencil_coefficients(m0, m1):
    a = np.linalg.det(m0)
    c = np.linalg.det(m1)
    b = m0[0, 0] * m1[1, 1] + m1[0, 0] * m0[1, 1] - m0[0, 1] * m1[1, 0] - m1[0, 1] * m0[1, 0]
    return a, b, c


def pencil_roots(m0, m1, tol: float = 1e-12, double_tol: float = 0.0):
    """Normalized roots ``(x, y)`` of ``det(x*m0 + y*m1) = 0``.

    Returns ``None`` when the determinant vanishes identically.  A root is
    reported once when the discriminant is below ``double_tol``.
    """
    a, b, c = _pencil_coefficients(np.asarray(m0), np.asarray(m1))
    if max(abs(a), abs(b), abs(c)) < tol:
        return None
    disc = b * b - 4 * a * c
    double = abs(disc) <= double_tol
    sq = 0j if double else np.sqrt(complex(disc))
    if np.real(np.conj(b) * sq) < 0:
        sq = -sq
    q = -(b + sq) / 2
    # q^2 + b q + a c = 0, so (q, a) and (c, q) both solve a x^2 + b x y + c y^2 = 0
    roots = []
    for pair in ((q, a), (c, q)):
        norm = np.hypot(abs(pair[0]), abs(pair[1]))
        if norm > 0:
            roots.append(np.array(pair, dtype=complex) / norm)
    if double or len(roots) == 1:
        return roots[:1]
    return roots


def _factor_product(vec):
    """Split a (near) product 2-qubit vector into unnormalized factors ``b (x) c``."""
    m = np.asarray(vec, dtype=complex).reshape(2, 2)
    u, s, vh = np.linalg.svd(m)
    return u[:, 0] * np.sqrt(s[0]), vh[0] * np.sqrt(s[0])


ALL = "all"


def product_states_in_span(v0, v1, tol: float = 1e-10):
    """Product vectors ``x*v0 + y*v1`` (normalized) spanned by two 2-qubit vectors.

    Returns a list with one or two vectors, or :data:`ALL` when every vector
    of the span is a product.
    """
    v0 = np.asarray(v0, dtype=complex).reshape(-1)
    v1 = np.asarray(v1, dtype=complex).reshape(-1)
    v0 = v0 / np.linalg.norm(v0)
    v1 = v1 / np.linalg.norm(v1)
    if np.linalg.matrix_rank(np.stack([v0, v1]), tol=1e-10) < 2:
        raise ValueError("span vectors are linearly dependent")
    roots = pencil_roots(v0.reshape(2, 2), v1.reshape(2, 2), tol=tol, double_tol=tol)
    if roots is None:
        return ALL
    out = []
    for x, y in roots:
        p = x * v0 + y * v1
        out.append(p / np.linalg.norm(p))
    return out


# --- two qubits -------------------------------------------------------------------------

@dataclass(frozen=True)
class SchmidtForm:
    """``cos(angle)|00> + sin(angle)|11>`` with ``angle`` in ``[0, pi/4]``."""

    angle: float
    local_unitaries: tuple
    global_phase: float = 0.0

    def canonical_vector(self):
        v = np.zeros(4, dtype=complex)
        v[0], v[3] = np.cos(self.angle), np.sin(self.angle)
        return v

    def reconstruct(self):
        return np.exp(1j * self.global_phase) * apply_local(self.canonical_vector(), self.local_unitaries)


def _completed_basis(col):
    col = col / np.linalg.norm(col)
    return np.array([[col[0], -np.conj(col[1])], [col[1], np.conj(col[0])]], dtype=complex)


def schmidt_two_qubit(state) -> SchmidtForm:
    psi = np.asarray(state, dtype=complex)
    if qubit_count(psi) != 2:
        raise ValueError("Schmidt form is for two-qubit states")
    w, s, vh = np.linalg.svd(psi.reshape(2, 2))
    angle = float(np.arctan2(s[1], s[0]))
    # psi = sum_i s_i w_i (x) vh_i
    u1 = _completed_basis(w[:, 0])
    u2 = _completed_basis(vh[0])
    # the second Schmidt vectors are fixed up to phase; absorb it on qubit 2
    canon = np.array([np.cos(angle), 0, 0, np.sin(angle)], dtype=complex)
    back = apply_local(psi, [u1.conj().T, u2.conj().T])
    if s[1] > _ZERO:
        u2 = u2 @ np.diag([1, np.exp(1j * np.angle(back[3]))])
    return SchmidtForm(angle, (u1, u2), 0.0)


# --- Acin five-term form ----------------------------------------------------------------

@dataclass(frozen=True)
class AcinForm:
    """``l0|000> + l1 e^{i phase}|100> + l2|101> + l3|110> + l4|111>``."""

    lambdas: tuple
    phase: float
    local_unitaries: tuple
    global_phase: float = 0.0

    def canonical_vector(self):
        l0, l1, l2, l3, l4 = self.lambdas
        v = np.zeros(8, dtype=complex)
        v[0] = l0
        v[4] = l1 * np.exp(1j * self.phase)
        v[5], v[6], v[7] = l2, l3, l4
        return v

    def reconstruct(self):
        return np.exp(1j * self.global_phase) * apply_local(self.canonical_vector(), self.local_unitaries)

    def key(self):
        """Comparable parameter vector; the phase enters through ``l1 e^{i phase}``."""
        l0, l1, l2, l3, l4 = self.lambdas
        z = l1 * np.exp(1j * self.phase)
        return np.array([l0, z.real, z.imag, l2, l3, l4])


def _fix_phases(t, zero_l4=False):
    """Qubit phases ``(c, a, b)`` on the ``|1>`` components making t01, t10, t11 real.

    ``t`` is the ``|1>`` slice of qubit 1 after the five-term reduction; the
    phase picked up by ``|1 j k>`` is ``c + j*a + k*b``.  With ``zero_l4`` the
    ``|111>`` entry is treated as rounding noise.
    """
    th = np.angle(t)
    nz = np.abs(t) > _ZERO
    if zero_l4:
        nz[1, 1] = False
    if nz[0, 1] and nz[1, 0] and nz[1, 1]:
        c = th[1, 1] - th[0, 1] - th[1, 0]
        return c, -th[1, 0] - c, -th[0, 1] - c
    if nz[0, 0]:
        c = -th[0, 0]
    elif nz[0, 1]:
        c = -th[0, 1]
    elif nz[1, 0]:
        c = -th[1, 0]
    elif nz[1, 1]:
        c = -th[1, 1]
    else:
        c = 0.0
    a = b = 0.0
    if nz[0, 1]:
        b = -th[0, 1] - c
    if nz[1, 0]:
        a = -th[1, 0] - c
    if nz[1, 1] and not (nz[0, 1] and nz[1, 0]):
        if nz[0, 1]:
            a = -th[1, 1] - c - b
        else:
            b = -th[1, 1] - c - a
    return c, a, b


def _acin_candidate(tensor, root, zero_l4=False):
    x, y = root
    u1 = np.array([[x, y], [-np.conj(y), np.conj(x)]], dtype=complex)
    t = np.einsum("ij,jkl->ikl", u1, tensor)
    w, s, vh = np.linalg.svd(t[0])
    if s[0] < _ZERO:
        # qubit 1 separable: t[0] vanishes and the pair basis comes from t[1]
        w, _, vh = np.linalg.svd(t[1])
    u2 = w.conj().T
    u3 = vh.conj()
    t = np.einsum("ij,ajk,lk->ail", u2, t, u3)
    c, a, b = _fix_phases(t[1], zero_l4)
    p1, p2, p3 = (np.diag([1, np.exp(1j * ang)]) for ang in (c, a, b))
    m = (p1 @ u1, p2 @ u2, p3 @ u3)
    t1 = t[1] * np.exp(1j * (c + a * np.array([[0, 0], [1, 1]]) + b * np.array([[0, 1], [0, 1]])))
    lam = (float(s[0]), float(abs(t1[0, 0])), float(abs(t1[0, 1])), float(abs(t1[1, 0])), float(abs(t1[1, 1])))
    phase = float(np.angle(t1[0, 0]) % (2 * np.pi)) if lam[1] > _ZERO else 0.0
    if phase > 2 * np.pi - 1e-12:
        phase = 0.0
    return AcinForm(lam, phase, tuple(u.conj().T for u in m), 0.0)


def _lex_less(a, b, tol):
    for x, y in zip(a, b):
        if abs(x - y) > tol:
            return x < y
    return False


def acin_form(state, tie_tol: float = 1e-9) -> AcinForm:
    """Five-term canonical form with ``0 <= phase <= pi``.

    The qubit-1 basis change is a root of ``det(x T0 + y T1) = 0``.  Among
    the candidate roots those with ``phase`` in ``[0, pi]`` are kept and the
    lexicographically smallest ``(l0, .., l4, phase)`` wins.
    """
    psi = np.asarray(state, dtype=complex)
    if qubit_count(psi) != 3:
        raise ValueError("the five-term form is for three qubits")
    tensor = psi.reshape(2, 2, 2)
    # zero tangle means a double root (l4 = 0); solving it as two nearby roots
    # would leave l4 and the phase at the square root of rounding noise
    w_like = tangle(psi) < TANGLE_TOL
    roots = pencil_roots(tensor[0], tensor[1], tol=1e-13, double_tol=np.inf if w_like else 0.0)
    if roots is None:
        # every qubit-1 slice is a product: take the principal axis of rho_1
        _, vecs = np.linalg.eigh(reduced_density(psi, [1]))
        roots = [vecs[:, 1].conj()]
    cands = [_acin_candidate(tensor, r, w_like) for r in roots]
    admissible = [f for f in cands if f.phase <= np.pi + tie_tol or f.phase >= 2 * np.pi - tie_tol]
    pool = admissible or cands
    best = pool[0]
    for f in pool[1:]:
        if _lex_less(f.lambdas + (f.phase,), best.lambdas + (best.phase,), tie_tol):
            best = f
    return best


# --- LU canonicalization across strata ----------------------------------------------------

def _top_vector(rho):
    vals, vecs = np.linalg.eigh(rho)
    return vecs[:, -1]


def separable_qubits(state, tol: float = DEFAULT_TOL) -> list[int]:
    """Qubits whose one-qubit reduction is pure (``1 - I_k < tol``)."""
    inv = purity_invariants(state)
    return [k for k, v in enumerate(inv, start=1) if 1 - v < tol]


@dataclass(frozen=True)
class _LUClass:
    kind: str
    key: tuple
    canonical: np.ndarray
    unitaries: tuple
    global_phase: float


def _lu_class(state, tol):
    psi = np.asarray(state, dtype=complex)
    n = qubit_count(psi)
    if n == 2:
        f = schmidt_two_qubit(psi)
        return _LUClass("schmidt", (f.angle,), f.canonical_vector(), f.local_unitaries, f.global_phase)
    sep = separable_qubits(psi, tol)
    if len(sep) >= 2:
        factors = [_top_vector(reduced_density(psi, [k])) for k in (1, 2, 3)]
        us = tuple(unitary_to_zero(f).conj().T for f in factors)
        canon = np.zeros(8, dtype=complex)
        canon[0] = 1
        back = apply_local(psi, [u.conj().T for u in us])
        return _LUClass("product", (), canon, us, float(np.angle(back[0])))
    if len(sep) == 1:
        k = sep[0]
        pair = [q for q in (1, 2, 3) if q != k]
        order = [k] + pair
        permuted = permute_qubits(psi, order)
        factor = _top_vector(reduced_density(permuted, [1]))
        rest = (factor.conj() @ permuted.reshape(2, 4))
        rest = rest / np.linalg.norm(rest)
        sf = schmidt_two_qubit(rest)
        u_sep = unitary_to_zero(factor).conj().T
        us_perm = (u_sep,) + tuple(sf.local_unitaries)
        us = [None, None, None]
        for pos, q in enumerate(order):
            us[q - 1] = us_perm[pos]
        canon_perm = np.kron(np.array([1, 0], dtype=complex), sf.canonical_vector())
        inverse = [order.index(q) + 1 for q in (1, 2, 3)]
        canon = permute_qubits(canon_perm, inverse)
        back = apply_local(psi, [u.conj().T for u in us])
        ph = float(np.angle(np.vdot(canon, back)))
        return _LUClass("biseparable", (k, sf.angle), canon, tuple(us), ph)
    f = acin_form(psi)
    return _LUClass("acin", tuple(f.key()), f.canonical_vector(), f.local_unitaries, f.global_phase)


def lu_equivalent(a, b, tol: float = DEFAULT_TOL, return_unitaries: bool = False):
    """Decide whether ``b = e^{i g} (V1 (x) V2 (x) ...) a`` for some local unitaries.

    With ``return_unitaries`` the result is ``(flag, unitaries)`` and, when
    ``flag`` is true, ``unitaries`` maps ``a`` onto ``b`` up to global phase.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError("states have different qubit counts")
    ca, cb = _lu_class(a, tol), _lu_class(b, tol)
    same = ca.kind == cb.kind and len(ca.key) == len(cb.key)
    if same and ca.kind == "biseparable":
        same = ca.key[0] == cb.key[0] and abs(ca.key[1] - cb.key[1]) < tol
    elif same:
        same = bool(np.all(np.abs(np.subtract(ca.key, cb.key)) < tol))
    if not return_unitaries:
        return same
    if not same:
        return False, None
    us = tuple(ub @ ua.conj().T for ua, ub in zip(ca.unitaries, cb.unitaries))
    return True, us


# --- W-type form ---------------------------------------------------------------------------

def _range_basis(rho, tol=RANK_TOL):
    vals, vecs = np.linalg.eigh(rho)
    keep = vals > tol
    return vals[keep][::-1], vecs[:, keep][:, ::-1]


@dataclass(frozen=True)
class WForm:
    """``cos(phi)|000> + sin(phi)|alpha>(cos(phi2)|10> + sin(phi2)|01>)``,
    ``|alpha> = cos(xi)|0> + sin(xi)|1>``."""

    phi: float
    phi2: float
    xi: float
    local_unitaries: tuple
    global_phase: float = 0.0

    def canonical_vector(self):
        return w_canonical(self.phi, self.phi2, self.xi)

    def reconstruct(self):
        return np.exp(1j * self.global_phase) * apply_local(self.canonical_vector(), self.local_unitaries)


def w_canonical(phi, phi2, xi):
    alpha = np.array([np.cos(xi), np.sin(xi)], dtype=complex)
    pair = np.zeros(4, dtype=complex)
    pair[2], pair[1] = np.cos(phi2), np.sin(phi2)
    v = np.zeros(8, dtype=complex)
    v[0] = np.cos(phi)
    return v + np.sin(phi) * np.kron(alpha, pair)


def _phase_to_real(w):
    """Phase-gate angle on |1> aligning ``w1`` with ``w0``, and the common phase."""
    if abs(w[0]) > _ZERO and abs(w[1]) > _ZERO:
        return np.angle(w[0]) - np.angle(w[1]), np.angle(w[0])
    if abs(w[0]) > _ZERO:
        return 0.0, np.angle(w[0])
    return 0.0, np.angle(w[1])


def _zyz(angles):
    a, b, c = angles
    return rotation_matrix("rz", a) @ rotation_matrix("ry", b) @ rotation_matrix("rz", c)


def _refine_w(psi, form: WForm) -> WForm:
    """Least-squares polish of the frame when the closed-form fit is off."""
    start_us = [u for u in form.local_unitaries]

    def unpack(p):
        us = [start_us[k] @ _zyz(p[3 + 3 * k: 6 + 3 * k]) for k in range(3)]
        return p[0], p[1], p[2], us, p[12]

    def residual(p):
        phi, phi2, xi, us, g = unpack(p)
        r = np.exp(1j * g) * apply_local(w_canonical(phi, phi2, xi), us) - psi
        return np.concatenate([r.real, r.imag])

    p0 = np.concatenate([[form.phi, form.phi2, form.xi], np.zeros(9), [form.global_phase]])
    sol = least_squares(residual, p0, xtol=1e-15, ftol=1e-15, gtol=1e-15)
    phi, phi2, xi, us, g = unpack(sol.x)
    return WForm(float(phi), float(phi2), float(xi), tuple(us), float(g))


def w_form(state, tol: float = DEFAULT_TOL) -> WForm:
    """W-type canonical frame; qubit 1 carries ``|alpha>``."""
    psi = np.asarray(state, dtype=complex)
    if qubit_count(psi) != 3:
        raise NotWType("W form is for three qubits")
    if tangle(psi) >= TANGLE_TOL:
        raise NotWType("state has nonzero tangle (GHZ type)")
    if separable_qubits(psi, tol):
        raise NotWType("state is not genuinely tripartite")
    _, basis = _range_basis(reduced_density(psi, [2, 3]))
    if basis.shape[1] != 2:
        raise NotWType("rank of rho_23 is not 2")
    v0, v1 = basis[:, 0], basis[:, 1]
    roots = pencil_roots(v0.reshape(2, 2), v1.reshape(2, 2), tol=1e-14, double_tol=np.inf)
    if roots is None:
        raise NotWType("range of rho_23 consists of product states")
    x, y = roots[0]
    b2, c2 = _factor_product(x * v0 + y * v1)
    l2, l3 = unitary_to_zero(b2), unitary_to_zero(c2)
    psi1 = apply_local(psi, [np.eye(2), l2, l3])
    rng_vecs = np.kron(l2, l3) @ basis
    # component of the range orthogonal to |00>
    resid = rng_vecs - np.outer(np.eye(4)[0], rng_vecs[0])
    chi = resid[:, np.argmax(np.linalg.norm(resid, axis=0))]
    chi = chi / np.linalg.norm(chi)
    m = psi1.reshape(2, 4)
    u = m[:, 0]
    w = m @ chi.conj()
    u1 = unitary_to_zero(u)
    w1 = u1 @ w
    delta1, kappa = _phase_to_real(w1)
    xcoef, ycoef = chi[1], chi[2]  # |01>, |10>
    p2 = -kappa - np.angle(ycoef) if abs(ycoef) > _ZERO else 0.0
    p3 = -kappa - np.angle(xcoef) if abs(xcoef) > _ZERO else 0.0
    m1 = np.diag([1, np.exp(1j * delta1)]) @ u1
    m2 = np.diag([1, np.exp(1j * p2)]) @ l2
    m3 = np.diag([1, np.exp(1j * p3)]) @ l3
    phi = float(np.arctan2(np.linalg.norm(w), np.linalg.norm(u)))
    phi2 = float(np.arctan2(abs(xcoef), abs(ycoef)))
    xi = float(np.arctan2(abs(w1[1]), abs(w1[0])))
    form = WForm(phi, phi2, xi, tuple(mm.conj().T for mm in (m1, m2, m3)), 0.0)
    if 1 - abs(np.vdot(form.reconstruct(), psi)) ** 2 > 1e-10:
        form = _refine_w(psi, form)
    return form


# --- GHZ-type form ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GhzForm:
    """``a|000> + e^{i xi} b |alpha beta gamma>`` with real one-qubit factors
    ``cos(phis[k])|0> + sin(phis[k])|1>``."""

    a: float
    b: float
    xi: float
    phis: tuple
    local_unitaries: tuple
    global_phase: float = 0.0

    def canonical_vector(self):
        return ghz_canonical(self.a, self.b, self.xi, *self.phis)

    def reconstruct(self):
        return np.exp(1j * self.global_phase) * apply_local(self.canonical_vector(), self.local_unitaries)

    def normalization_residual(self):
        p1, p2, p3 = self.phis
        lhs = self.a**2 + self.b**2 + 2 * self.a * self.b * np.cos(self.xi) * np.cos(p1) * np.cos(p2) * np.cos(p3)
        return float(lhs - 1)

    def overlaps(self):
        """``|<f_k|f'_k>|`` between the two terms' factors on each qubit."""
        return tuple(abs(float(np.cos(p))) for p in self.phis)

    def terms(self):
        """The two product terms as ``(coefficient, [factor1, factor2, factor3])`` in the input frame."""
        zero = np.array([1, 0], dtype=complex)
        g = np.exp(1j * self.global_phase)
        first = [u @ zero for u in self.local_unitaries]
        second = [u @ np.array([np.cos(p), np.sin(p)], dtype=complex)
                  for u, p in zip(self.local_unitaries, self.phis)]
        return (self.a * g, first), (self.b * g * np.exp(1j * self.xi), second)


def ghz_canonical(a, b, xi, p1, p2, p3):
    ket = lambda p: np.array([np.cos(p), np.sin(p)], dtype=complex)
    v = np.zeros(8, dtype=complex)
    v[0] = a
    return v + np.exp(1j * xi) * b * np.kron(np.kron(ket(p1), ket(p2)), ket(p3))


def two_term_decomposition(state):
    """Split a GHZ-type state into two product terms via the range of rho_23.

    Returns ``[(u, b, c), (u', b', c')]`` of unnormalized factors with
    ``state = u(x)b(x)c + u'(x)b'(x)c'``.
    """
    psi = np.asarray(state, dtype=complex)
    _, basis = _range_basis(reduced_density(psi, [2, 3]))
    if basis.shape[1] != 2:
        raise NotGhzType("rank of rho_23 is not 2")
    v0, v1 = basis[:, 0], basis[:, 1]
    roots = pencil_roots(v0.reshape(2, 2), v1.reshape(2, 2), tol=1e-14)
    if roots is None or len(roots) != 2:
        raise NotGhzType("range of rho_23 does not hold two product states")
    prods = [x * v0 + y * v1 for x, y in roots]
    prods = [p / np.linalg.norm(p) for p in prods]
    mat = np.stack(prods)  # 2 x 4
    coeffs = psi.reshape(2, 4) @ np.linalg.pinv(mat)  # columns: qubit-1 vectors
    out = []
    for j, p in enumerate(prods):
        b, c = _factor_product(p)
        out.append((coeffs[:, j], b, c))
    return out


def ghz_form(state, tol: float = DEFAULT_TOL) -> GhzForm:
    psi = np.asarray(state, dtype=complex)
    if qubit_count(psi) != 3:
        raise NotGhzType("GHZ form is for three qubits")
    if tangle(psi) <= TANGLE_TOL:
        raise NotGhzType("state has zero tangle")
    terms = two_term_decomposition(psi)
    weights = [np.prod([np.linalg.norm(f) for f in t]) for t in terms]
    if weights[1] > weights[0] + 1e-12:
        terms = terms[::-1]
        weights = weights[::-1]
    first, second = terms
    mats, phis = [], []
    xi = 0.0
    for f, g in zip(first, second):
        u = unitary_to_zero(f)
        gg = u @ (g / np.linalg.norm(g))
        delta, ph = _phase_to_real(gg)
        mats.append(np.diag([1, np.exp(1j * delta)]) @ u)
        phis.append(float(np.arctan2(abs(gg[1]), abs(gg[0]))))
        xi += ph
    a, b = float(weights[0]), float(weights[1])
    free = [k for k, p in enumerate(phis) if abs(np.cos(p)) < _ZERO]
    if free:
        # an orthogonal factor leaves a free phase on |1>; spend it on xi
        k = free[0]
        mats[k] = np.diag([1, np.exp(-1j * xi)]) @ mats[k]
        xi = 0.0
    form = GhzForm(a, b, float(xi % (2 * np.pi)), tuple(phis), tuple(m.conj().T for m in mats), 0.0)
    return form


# --- I1 = 1/2 stratum ------------------------------------------------------------------------

@dataclass(frozen=True)
class HalfPurityForm:
    """``|000>/sqrt2 + l2|101> + l3|110> + l4|111>`` after moving ``qubit`` to position 1."""

    lambda2: float
    lambda3: float
    lambda4: float
    qubit: int
    order: tuple
    acin: AcinForm

    @property
    def local_unitaries(self):
        return self.acin.local_unitaries

    def reconstruct(self):
        inverse = [self.order.index(q) + 1 for q in (1, 2, 3)]
        return permute_qubits(self.acin.reconstruct(), inverse)


def i05_form(state, tol: float = DEFAULT_TOL) -> HalfPurityForm:
    psi = np.asarray(state, dtype=complex)
    inv = purity_invariants(psi)
    hits = [k for k, v in enumerate(inv, start=1) if abs(v - 0.5) < tol]
    if not hits:
        raise NotInClass("no single-qubit purity equals 1/2")
    if lu_equivalent(psi, ghz_state(), tol):
        raise NotInClass("state is LU-equivalent to GHZ")
    k = hits[0]
    order = (k,) + tuple(q for q in (1, 2, 3) if q != k)
    f = acin_form(permute_qubits(psi, order))
    l0, l1, l2, l3, l4 = f.lambdas
    if abs(l0 - 1 / np.sqrt(2)) > 1e-6 or l1 > 1e-6:
        raise NotInClass(f"five-term form is not of the half-purity shape: {f.lambdas}")
    return HalfPurityForm(l2, l3, l4, k, order, f)
