import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from measnoise import hilbert as hb
from measnoise import measurement as ms
from measnoise.errors import CompletenessViolated, UnknownLabel, ZeroProbability

from conftest import I2, KET_0, KET_PLUS, X, Z

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def _family_pairs(f):
    return {m: op for m, op in f}


def test_projective_family_z_matches_pauli_operators():
    f = ms.projective_family(Z)
    ops = _family_pairs(f)
    assert f.labels == (-1.0, 1.0)
    np.testing.assert_allclose(ops[-1.0], (I2 - Z) / 2)
    np.testing.assert_allclose(ops[1.0], (I2 + Z) / 2)


def test_projective_family_identity_and_x():
    f = ms.projective_family(I2)
    assert f.labels == (1.0,)
    f = ms.projective_family(X)
    ops = _family_pairs(f)
    np.testing.assert_allclose(ops[f.labels[0]], (I2 - X) / 2, atol=1e-14)
    np.testing.assert_allclose(ops[f.labels[1]], (I2 + X) / 2, atol=1e-14)
    moment = sum(m * op for m, op in f)
    np.testing.assert_allclose(moment, X, atol=1e-9)


def test_family_rejects_incomplete_and_duplicate_labels():
    with pytest.raises(CompletenessViolated):
        ms.MeasurementFamily([(0, (I2 + Z) / 2)])
    with pytest.raises(ValueError):
        ms.MeasurementFamily([(1, (I2 + Z) / 2), (1, (I2 - Z) / 2)])


def test_family_allows_zero_operators():
    f = ms.MeasurementFamily([(-1, (I2 - Z) / 2), (0, np.zeros((2, 2))), (1, (I2 + Z) / 2)])
    assert len(f) == 3
    assert ms.outcome_probability(f, [0], KET_PLUS) == 0.0


def test_pom_and_tpcp_of_projective_z():
    pom = ms.pom_of(ms.projective_family(Z))
    np.testing.assert_allclose(pom.effect(1), (I2 + Z) / 2)
    np.testing.assert_allclose(pom.effect(-1), (I2 - Z) / 2)
    rho = hb.density_operator(KET_PLUS)
    t = ms.tpcp_of(ms.identity_family(2))
    np.testing.assert_allclose(t.apply(rho), rho)


def test_pom_of_random_family_sums_to_identity(rng):
    f = ms.random_family(3, 4, rng)
    pom = ms.pom_of(f)
    total = np.zeros((3, 3), dtype=complex)
    for _, effect in pom:
        total += effect
    assert np.linalg.norm(total - np.eye(3), 2) <= 1e-10


def test_pom_rejects_invalid_effects():
    with pytest.raises(ValueError):
        ms.Pom([(0, Z), (1, I2 - Z)])
    with pytest.raises(CompletenessViolated):
        ms.Pom([(0, I2 / 2)])


def test_apply_dual_projective_z():
    t = ms.tpcp_of(ms.projective_family(Z))
    np.testing.assert_allclose(ms.apply_dual(t, I2), I2)
    # (X + Z X Z) / 2 = 0
    np.testing.assert_allclose(ms.apply_dual(t, X), (X + Z @ X @ Z) / 2, atol=1e-15)
    np.testing.assert_allclose(ms.apply_dual(t, X), 0, atol=1e-15)
    np.testing.assert_allclose(ms.apply_dual(t, Z), Z, atol=1e-15)


def test_apply_dual_is_adjoint_of_apply(rng):
    f = ms.random_family(3, 3, rng)
    t = ms.tpcp_of(f)
    b = hb.random_hermitian(3, rng)
    rho = hb.density_operator(hb.haar_random_ket(3, rng))
    assert np.trace(ms.apply_dual(t, b) @ rho) == pytest.approx(np.trace(b @ t.apply(rho)), abs=1e-12)
    assert hb.is_hermitian(ms.apply_dual(t, b))


def test_outcome_probability_examples(rng):
    f = ms.projective_family(Z)
    assert ms.outcome_probability(f, [1], KET_0) == pytest.approx(1)
    assert ms.outcome_probability(f, [1], KET_PLUS) == pytest.approx(0.5)
    rho = hb.density_operator(hb.haar_random_ket(2, rng))
    assert ms.outcome_probability(f, [-1, 1], rho) == pytest.approx(1, abs=1e-12)
    with pytest.raises(UnknownLabel):
        ms.outcome_probability(f, [0.5], rho)


def test_post_state_examples():
    f = ms.projective_family(Z)
    np.testing.assert_allclose(ms.post_state(f, [1], KET_PLUS), np.diag([1, 0]), atol=1e-15)
    with pytest.raises(ZeroProbability):
        ms.post_state(f, [-1], KET_0)
    rho = hb.density_operator(KET_PLUS)
    np.testing.assert_allclose(ms.post_state(ms.identity_family(2), [1], rho), rho)


def test_instrument_total_is_trace_preserving(rng):
    f = ms.random_family(3, 4, rng)
    inst = ms.Instrument(f)
    rho = hb.density_operator(hb.haar_random_ket(3, rng))
    assert np.trace(inst.apply(f.labels, rho)).real == pytest.approx(1, abs=1e-10)


def test_marginals_degenerate_second_axis():
    obs = hb.spectral(Z)
    j = ms.JointFamily(((a, 0.0), e) for a, e in zip(obs.eigenvalues, obs.projectors))
    pa, pb = ms.marginals(j)
    np.testing.assert_allclose(pa.effects, ms.pom_of(ms.projective_family(Z)).effects)
    assert pb.labels == (0.0,)
    np.testing.assert_allclose(pb.effects[0], I2)
    assert ms.joint_unbiasedness_residual(j, Z, 0 * I2) == pytest.approx((0, 0), abs=1e-15)
    assert ms.joint_unbiasedness_residual(j, Z, X) == pytest.approx((0, 1), abs=1e-12)


def test_marginals_random_joint_family(rng):
    j = ms.random_joint_family(3, 2, 3, rng)
    pa, pb = ms.marginals(j)
    assert np.linalg.norm(pa.effects.sum(axis=0) - np.eye(3), 2) <= 1e-10
    assert np.linalg.norm(pb.effects.sum(axis=0) - np.eye(3), 2) <= 1e-10


def test_product_family_marginals_by_direct_summation():
    lz, lx = 0.8, 0.6
    pom_z = ms.Pom([(-1, (I2 - lz * Z) / 2), (1, (I2 + lz * Z) / 2)])
    pom_x = ms.Pom([(-1, (I2 - lx * X) / 2), (1, (I2 + lx * X) / 2)])
    j = ms.unsharp_product_family(pom_z, pom_x)
    pa, pb = ms.marginals(j)
    for b in (-1, 1):
        direct = sum(op.conj().T @ op for (la, lb), op in j if lb == b)
        np.testing.assert_allclose(pb.effect(b), direct, atol=1e-14)
        np.testing.assert_allclose(pb.effect(b), pom_x.effect(b), atol=1e-14)
    # A marginal is smeared: the Z contrast shrinks by sqrt(1 - lx^2)
    shrink = np.sqrt(1 - lx**2)
    for a in (-1, 1):
        np.testing.assert_allclose(pa.effect(a), (I2 + a * lz * shrink * Z) / 2, atol=1e-14)


def test_unbiased_zx_family():
    j = ms.unbiased_zx_family()
    ra, rb = ms.joint_unbiasedness_residual(j, Z, X)
    assert ra < 1e-9 and rb < 1e-9
    # sharp Z, x-sharpness 1/sqrt(2): A labels stretched by sqrt(2), B labels by sqrt(2)
    assert sorted({la for la, _ in j.labels}) == pytest.approx([-np.sqrt(2), np.sqrt(2)])
    assert sorted({lb for _, lb in j.labels}) == pytest.approx([-np.sqrt(2), np.sqrt(2)])


@settings(max_examples=50, deadline=None)
@given(seed=seeds, dim=st.integers(2, 5), k=st.integers(1, 6))
def test_probability_additivity_and_pom_consistency(seed, dim, k):
    rng = hb.rng_stream(seed)
    f = ms.random_family(dim, k, rng)
    g = hb.ginibre(dim, dim, rng)
    rho = g @ g.conj().T
    rho /= np.trace(rho)
    pom = ms.pom_of(f)
    probs = [ms.outcome_probability(f, [m], rho) for m in f.labels]
    assert sum(probs) == pytest.approx(1, abs=1e-9)
    np.testing.assert_allclose(probs, pom.probabilities(rho), atol=1e-10)
    # nonselective reduction equals the full-set instrument
    np.testing.assert_allclose(ms.post_state(f, f.labels, rho), ms.tpcp_of(f).apply(rho), atol=1e-10)
    # unitality of the dual map
    np.testing.assert_allclose(ms.apply_dual(ms.tpcp_of(f), np.eye(dim)), np.eye(dim), atol=1e-10)
