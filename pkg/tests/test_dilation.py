import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from measnoise import dilation as dl
from measnoise import hilbert as hb
from measnoise import measurement as ms
from measnoise import metrics as mt
from measnoise.errors import CompletenessViolated, LabelMismatch

from conftest import I2, X, Z

seeds = st.integers(min_value=0, max_value=2**32 - 1)
PROJ_Z = ms.projective_family(Z)


def test_dilate_identity_family():
    f = ms.identity_family(2)
    p = dl.dilate(f)
    assert p.ancilla_dim == 1
    np.testing.assert_allclose(p.u, np.eye(2))
    np.testing.assert_allclose(p.meter.op, [[1]])
    assert dl.verify_realization(p, f) == 0.0


def test_dilate_projective_z():
    p = dl.dilate(PROJ_Z)
    assert p.u.shape == (4, 4)
    assert hb.is_unitary(p.u)
    np.testing.assert_array_equal(p.xi, [1, 0])
    assert p.meter.eigenvalues == (-1.0, 1.0)
    assert dl.verify_realization(p, PROJ_Z) <= 1e-12


def test_dilate_random_family_is_unitary(rng):
    f = ms.random_family(3, 4, rng)
    p = dl.dilate(f)
    assert np.linalg.norm(p.u.conj().T @ p.u - np.eye(12), 2) <= 1e-10
    assert dl.verify_realization(p, f) <= 1e-9


def test_isometry_maps_psi_xi_to_kraus_branches(rng):
    f = ms.random_family(2, 3, rng)
    p = dl.dilate(f)
    psi = hb.haar_random_ket(2, rng)
    out = p.u @ np.kron(psi, p.xi)
    expected = sum(np.kron(op @ psi, hb.basis_ket(3, i)) for i, op in enumerate(f.ops))
    np.testing.assert_allclose(out, expected, atol=1e-12)


def test_corrupted_unitary_is_detected(rng):
    f = ms.random_family(2, 3, rng)
    p = dl.dilate(f)
    # column 0 carries |0>|xi>, column 1 is a completion column
    bad = dl.swap_columns(p, 0, 1)
    assert dl.verify_realization(bad, f) > 0.1


def test_verify_realization_rejects_label_mismatch():
    p = dl.dilate(PROJ_Z)
    other = ms.MeasurementFamily([(0, (I2 - Z) / 2), (1, (I2 + Z) / 2)])
    with pytest.raises(LabelMismatch):
        dl.verify_realization(p, other)


def test_model_noise_pauli_example():
    p = dl.dilate(PROJ_Z)
    rng = hb.rng_stream(3)
    for _ in range(20):
        psi = hb.haar_random_ket(2, rng)
        assert dl.model_epsilon(p, Z, psi) == pytest.approx(0, abs=1e-7)
        assert dl.model_eta(p, X, psi) == pytest.approx(np.sqrt(2), abs=1e-12)


def test_model_matches_kraus_side(rng):
    for dim in range(2, 6):
        f = ms.random_family(dim, 3, rng)
        p = dl.dilate(f)
        a, b = hb.random_hermitian(dim, rng), hb.random_hermitian(dim, rng)
        psi = hb.haar_random_ket(dim, rng)
        assert dl.model_epsilon(p, a, psi) == pytest.approx(mt.epsilon(f, a, psi), abs=1e-9)
        assert dl.model_eta(p, b, psi) == pytest.approx(mt.eta(f, b, psi), abs=1e-9)


def test_noise_operators_are_hermitian(rng):
    f = ms.random_family(3, 2, rng)
    ops = dl.noise_operators(dl.dilate(f), hb.random_hermitian(3, rng), hb.random_hermitian(3, rng))
    assert hb.is_hermitian(ops.n_op) and hb.is_hermitian(ops.d_op)


def test_model_mean_operators_match_closed_forms(rng):
    f = ms.random_family(3, 4, rng)
    p = dl.dilate(f)
    a, b = hb.random_hermitian(3, rng), hb.random_hermitian(3, rng)
    psi = hb.haar_random_ket(3, rng)
    n_a = dl.model_mean_noise_operator(p, a)
    np.testing.assert_allclose(n_a, mt.mean_noise_operator(f, a), atol=1e-10)
    np.testing.assert_allclose(dl.model_mean_disturbance_operator(p, b),
                               mt.mean_disturbance_operator(f, b), atol=1e-10)
    big = np.kron(psi, p.xi)
    n_op = dl.noise_operators(p, a, b).n_op
    assert np.vdot(big, n_op @ big) == pytest.approx(hb.expectation(n_a, psi), abs=1e-10)


def test_model_born_rule_matches_family(rng):
    f = ms.random_family(3, 4, rng)
    p = dl.dilate(f)
    g = hb.ginibre(3, 3, rng)
    rho = g @ g.conj().T / np.trace(g @ g.conj().T)
    for m in f.labels:
        assert dl.model_probability(p, [m], rho) == pytest.approx(ms.outcome_probability(f, [m], rho), abs=1e-10)
    np.testing.assert_allclose(dl.model_tpcp(p, rho), ms.tpcp_of(f).apply(rho), atol=1e-10)


def test_realize_pom_square_root():
    pom = ms.pom_of(PROJ_Z)
    p = dl.realize_pom(pom)
    model = dl.model_pom(p)
    for m in (-1, 1):
        np.testing.assert_allclose(model.effect(m), pom.effect(m), atol=1e-10)


def test_realize_pom_unsharp(rng):
    pom = ms.Pom([(0, (I2 + 0.3 * X) / 2), (1, (I2 - 0.3 * X) / 2)])
    model = dl.model_pom(dl.realize_pom(pom))
    np.testing.assert_allclose(model.effects, pom.effects, atol=1e-10)


def test_realize_tpcp_identity_channel(rng):
    p = dl.realize_tpcp(ms.TpcpMap([np.eye(2)]))
    rho = hb.density_operator(hb.haar_random_ket(2, rng))
    np.testing.assert_allclose(dl.model_tpcp(p, rho), rho, atol=1e-10)


def test_realize_tpcp_projective_channel(rng):
    t = ms.tpcp_of(PROJ_Z)
    p = dl.realize_tpcp(t)
    assert p.meter.eigenvalues == (1.0, 2.0)
    rho = hb.density_operator(hb.haar_random_ket(2, rng))
    expected = sum(e @ rho @ e for e in ((I2 + Z) / 2, (I2 - Z) / 2))
    np.testing.assert_allclose(dl.model_tpcp(p, rho), expected, atol=1e-10)
    b = hb.random_hermitian(2, rng)
    np.testing.assert_allclose(dl.model_dual(p, b), ms.apply_dual(t, b), atol=1e-10)


def test_realize_rejects_invalid_inputs():
    with pytest.raises(CompletenessViolated):
        dl.realize_tpcp(ms.TpcpMap([0.5 * np.eye(2)]))


def test_permuted_completion_changes_u_not_statistics(rng):
    f = ms.random_family(2, 3, rng)
    p1 = dl.dilate(f)
    p2 = dl.dilate(f, completion_perm=[3, 1, 0, 2])
    assert not np.allclose(p1.u, p2.u)
    assert dl.verify_realization(p2, f) <= 1e-9
    a, b, psi = hb.random_hermitian(2, rng), hb.random_hermitian(2, rng), hb.haar_random_ket(2, rng)
    assert dl.model_epsilon(p1, a, psi) == pytest.approx(dl.model_epsilon(p2, a, psi), abs=1e-9)
    assert dl.model_eta(p1, b, psi) == pytest.approx(dl.model_eta(p2, b, psi), abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, dim=st.integers(2, 6), k=st.integers(1, 6))
def test_dilation_is_always_unitary(seed, dim, k):
    f = ms.random_family(dim, k, hb.rng_stream(seed))
    p = dl.dilate(f)
    assert np.linalg.norm(p.u.conj().T @ p.u - np.eye(dim * k), 2) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(seed=seeds, dim=st.integers(2, 4), k=st.integers(1, 5))
def test_model_oracle_equivalence(seed, dim, k):
    rng = hb.rng_stream(seed)
    f = ms.random_family(dim, k, rng)
    p = dl.dilate(f)
    a, b, psi = hb.random_hermitian(dim, rng), hb.random_hermitian(dim, rng), hb.haar_random_ket(dim, rng)
    assert abs(dl.model_epsilon(p, a, psi) - mt.epsilon(f, a, psi)) <= 1e-9
    assert abs(dl.model_eta(p, b, psi) - mt.eta(f, b, psi)) <= 1e-9
