import numpy as np
import pytest
from hypothesis import given, strategies as st

from cnotm.canonical import (ALL, NotGhzType, NotInClass, NotWType, acin_form, ghz_form,
                             hyperdeterminant, i05_form, lu_equivalent, product_states_in_span,
                             purity_invariants, schmidt_two_qubit, tangle, w_canonical, w_form)
from cnotm.state import (apply_gate, apply_local, basis_state, fidelity, Gate, ghz_state, haar_sample,
                         product_state, random_local, random_unitary, reduced_density, w_state, zero_state)

BELL = (basis_state("00") + basis_state("11")) / np.sqrt(2)
seeds = st.integers(0, 2**32 - 1)


def ckw_tangle(psi):
    """Residual tangle C^2_{1|23} - C^2_{12} - C^2_{13}, with Wootters concurrences."""
    r1 = reduced_density(psi, [1])
    c1 = 4 * np.real(np.linalg.det(r1))
    yy = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])

    def conc(rho):
        ev = np.real(np.linalg.eigvals(rho @ yy @ rho.conj() @ yy))
        # the two null eigenvalues come out at rounding level; their square roots would not
        ev = np.sqrt(np.where(ev > 1e-13, ev, 0.0))
        ev = np.sort(ev)[::-1]
        return max(0.0, ev[0] - ev[1] - ev[2] - ev[3])

    return c1 - conc(reduced_density(psi, [1, 2])) ** 2 - conc(reduced_density(psi, [1, 3])) ** 2


def random_w_type(rng):
    phi, phi2, xi = rng.uniform(0.1, 1.4, 3)
    return random_local(w_canonical(phi, phi2, xi), rng)


# --- invariants ---------------------------------------------------------------------------

def test_purity_examples():
    assert np.allclose(purity_invariants(ghz_state()), (0.5, 0.5, 0.5), atol=1e-12)
    assert np.allclose(purity_invariants(zero_state()), (1, 1, 1))
    assert np.allclose(purity_invariants(np.kron(BELL, basis_state("0"))), (0.5, 0.5, 1))


def test_tangle_examples():
    assert tangle(ghz_state()) == pytest.approx(1, abs=1e-10)
    assert tangle(w_state()) <= 1e-10
    assert tangle(product_state(*[random_unitary(np.random.default_rng(3))[:, 0]] * 3)) < 1e-12
    assert tangle(np.kron(BELL, basis_state("1"))) < 1e-12


@given(seeds)
def test_tangle_matches_concurrence_residual(seed):
    psi = haar_sample(3, seed)
    assert tangle(psi) == pytest.approx(ckw_tangle(psi), abs=1e-9)


def test_hyperdeterminant_scaling():
    psi = haar_sample(3, 8)
    assert hyperdeterminant(2 * psi) == pytest.approx(16 * hyperdeterminant(psi))


def test_invariants_under_local_unitaries(rng):
    for s in range(1000):
        psi = haar_sample(3, s)
        phi = random_local(psi, rng)
        assert np.allclose(purity_invariants(phi), purity_invariants(psi), atol=1e-10)
        assert abs(tangle(phi) - tangle(psi)) < 1e-9


def test_wrong_qubit_count():
    with pytest.raises(ValueError):
        purity_invariants(BELL)
    with pytest.raises(ValueError):
        tangle(BELL)


# --- product states in a span ---------------------------------------------------------------

def _is_product(v):
    return np.linalg.svd(np.asarray(v).reshape(2, 2), compute_uv=False)[1] < 1e-10


def test_span_examples():
    two = product_states_in_span(basis_state("00"), basis_state("11"))
    assert len(two) == 2
    assert sorted(int(np.argmax(np.abs(v))) for v in two) == [0, 3]
    one = product_states_in_span(basis_state("00"), (basis_state("01") + basis_state("10")) / np.sqrt(2))
    assert len(one) == 1 and fidelity(one[0], basis_state("00")) == pytest.approx(1)
    assert product_states_in_span(basis_state("00"), basis_state("01")) == ALL


def test_span_dependent_inputs():
    with pytest.raises(ValueError):
        product_states_in_span(basis_state("00"), 2 * basis_state("00"))


def test_span_root_count_tracks_tangle(rng):
    for i in range(1000):
        psi = random_w_type(rng) if i % 2 else haar_sample(3, i)
        vals, vecs = np.linalg.eigh(reduced_density(psi, [2, 3]))
        found = product_states_in_span(vecs[:, 2], vecs[:, 3])
        assert all(_is_product(v) for v in found)
        assert (len(found) == 2) == (tangle(psi) > 1e-6)


# --- Schmidt form --------------------------------------------------------------------------

def test_schmidt_examples():
    assert schmidt_two_qubit(BELL).angle == pytest.approx(np.pi / 4)
    assert schmidt_two_qubit(basis_state("01")).angle == pytest.approx(0)


@given(seeds)
def test_schmidt_round_trip(seed):
    psi = haar_sample(2, seed)
    form = schmidt_two_qubit(psi)
    assert 0 <= form.angle <= np.pi / 4 + 1e-15
    assert fidelity(form.reconstruct(), psi) >= 1 - 1e-10


# --- Acin form -------------------------------------------------------------------------------

def test_acin_examples():
    g = acin_form(ghz_state())
    assert np.allclose(g.lambdas, (2**-0.5, 0, 0, 0, 2**-0.5), atol=1e-12)
    assert np.allclose(acin_form(zero_state()).lambdas, (1, 0, 0, 0, 0), atol=1e-12)


def test_acin_round_trip_and_range():
    for s in range(300):
        psi = haar_sample(3, s)
        f = acin_form(psi)
        assert fidelity(f.reconstruct(), psi) >= 1 - 1e-10
        assert 0 <= f.phase <= np.pi + 1e-9
        assert min(f.lambdas) >= 0
        assert sum(x**2 for x in f.lambdas) == pytest.approx(1)


def test_acin_lu_invariant_and_idempotent(rng):
    for s in range(200):
        psi = haar_sample(3, 10_000 + s)
        f = acin_form(psi)
        assert np.allclose(acin_form(random_local(psi, rng)).key(), f.key(), atol=1e-8)
        assert np.allclose(acin_form(f.canonical_vector()).key(), f.key(), atol=1e-8)


# --- LU equivalence --------------------------------------------------------------------------

def test_lu_equivalent(rng):
    psi = haar_sample(3, 4)
    phi = random_local(psi, rng)
    ok, us = lu_equivalent(psi, phi, return_unitaries=True)
    assert ok
    assert fidelity(apply_local(psi, us), phi) >= 1 - 1e-9
    assert not lu_equivalent(ghz_state(), w_state())
    assert not lu_equivalent(psi, haar_sample(3, 5))


def test_lu_equivalent_degenerate_strata(rng):
    for psi in (zero_state(), np.kron(basis_state("0"), BELL), w_state(), ghz_state()):
        phi = random_local(psi, rng)
        ok, us = lu_equivalent(psi, phi, return_unitaries=True)
        assert ok and fidelity(apply_local(psi, us), phi) >= 1 - 1e-9
    assert not lu_equivalent(zero_state(), np.kron(basis_state("0"), BELL))


# --- W and GHZ forms -------------------------------------------------------------------------

def test_w_form_examples():
    f = w_form(w_state())
    assert fidelity(f.reconstruct(), w_state()) >= 1 - 1e-9
    with pytest.raises(NotWType):
        w_form(np.kron(BELL, basis_state("0")))
    with pytest.raises(NotWType):
        w_form(ghz_state())


def test_w_form_random(rng):
    for _ in range(100):
        psi = random_w_type(rng)
        assert fidelity(w_form(psi).reconstruct(), psi) >= 1 - 1e-9


def test_ghz_form_examples():
    f = ghz_form(ghz_state())
    assert f.a == pytest.approx(2**-0.5) and f.b == pytest.approx(2**-0.5)
    assert f.xi == pytest.approx(0, abs=1e-12)
    assert np.allclose(f.phis, np.pi / 2)
    with pytest.raises(NotGhzType):
        ghz_form(w_state())


def test_ghz_form_random():
    for s in range(200):
        psi = haar_sample(3, s)
        f = ghz_form(psi)
        assert fidelity(f.reconstruct(), psi) >= 1 - 1e-9
        assert abs(f.normalization_residual()) < 1e-10


def test_acin_w_type_stable(rng):
    # zero tangle gives a double root; the form must not pick up rounding noise
    for _ in range(100):
        psi = random_w_type(rng)
        f = acin_form(psi)
        assert f.lambdas[4] < 1e-12
        assert np.allclose(acin_form(random_local(psi, rng)).key(), f.key(), atol=1e-8)
        assert fidelity(f.reconstruct(), psi) >= 1 - 1e-10


# --- half-purity form ----------------------------------------------------------------------

def test_i05_examples():
    psi = apply_gate(ghz_state(), Gate.cnot(2, 3))
    assert fidelity(psi, (basis_state("000") + basis_state("110")) / np.sqrt(2)) == pytest.approx(1)
    f = i05_form(psi)
    assert (f.lambda2, f.lambda3, f.lambda4) == pytest.approx((0, 2**-0.5, 0), abs=1e-10)
    assert fidelity(f.reconstruct(), psi) >= 1 - 1e-10
    with pytest.raises(NotInClass):
        i05_form(ghz_state())
    with pytest.raises(NotInClass):
        i05_form(zero_state())


def test_acin_stable_on_every_stratum(rng):
    from conftest import constructed_state
    for i in range(400):
        psi = constructed_state(i % 4, rng)
        f = acin_form(psi)
        assert np.allclose(acin_form(random_local(psi, rng)).key(), f.key(), atol=1e-8)
        assert fidelity(f.reconstruct(), psi) >= 1 - 1e-10


def test_acin_first_qubit_separable():
    psi = np.kron(basis_state("1"), np.cos(0.3) * basis_state("00") + np.sin(0.3) * basis_state("11"))
    f = acin_form(psi)
    assert np.allclose(f.lambdas, (0, np.cos(0.3), 0, 0, np.sin(0.3)), atol=1e-12)
