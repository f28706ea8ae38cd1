import numpy as np
import pytest
import scipy.linalg as sla

from petzlab import zoo
from petzlab.channels import (
    ChannelError,
    KrausSet,
    affine_from_channel,
    apply,
    compose,
    superop_from_kraus,
    verify_cptp,
)
from petzlab.metrics import trace_distance
from petzlab.petz import petz_map, petz_superop_aform, recover, recoverability_defect, verify_petz
from petzlab.qubit import bloch_from_state, petz_ad_factors

from conftest import PAULI_X, random_channel, random_state

GRID_DIMS = (2, 3, 4, 8)
GRID_P = (0.1, 0.5, 0.9)
BUILTIN = {"dephasing": zoo.dephasing, "ad": zoo.amplitude_damping}


def grid():
    for name, make in BUILTIN.items():
        for d in GRID_DIMS:
            for p in GRID_P:
                for eps in (0.01, 1 - 1 / d):
                    yield name, make(d, p), zoo.reference_state(d, eps)


def petz_by_formula(channel, sigma, rho):
    """Literal evaluation of the Petz formula through scipy matrix functions."""
    s_half = sla.sqrtm(sigma)
    out = sum(k @ sigma @ k.conj().T for k in channel.operators)
    inv_half = sla.fractional_matrix_power(out, -0.5)
    inner = inv_half @ rho @ inv_half
    dual = sum(k.conj().T @ inner @ k for k in channel.operators)
    return s_half @ dual @ s_half


def test_petz_of_identity_is_identity(rng):
    sigma = random_state(3, rng)
    p = petz_map(zoo.identity_channel(3), sigma)
    np.testing.assert_allclose(superop_from_kraus(p.channel).matrix, np.eye(9), atol=1e-10)


@pytest.mark.parametrize("eps", [0.01, 0.3, 0.5, 0.9])
@pytest.mark.parametrize("p", [0.2, 0.7])
def test_petz_of_dephasing_is_dephasing(eps, p):
    petz = petz_map(zoo.dephasing(2, p), zoo.reference_state(2, eps))
    aff = affine_from_channel(petz.channel)
    np.testing.assert_allclose(aff.M, np.diag([1 - p, 1 - p, 1]), atol=1e-12)
    np.testing.assert_allclose(aff.tau, 0, atol=1e-12)


def test_petz_damping_shift_quoted_value():
    petz = petz_map(zoo.amplitude_damping(2, 0.3), zoo.reference_state(2, 0.01))
    shift_z = affine_from_channel(petz.composed()).tau[2] / np.sqrt(2)
    assert shift_z == pytest.approx(0.296, abs=1e-3)
    assert shift_z == pytest.approx(0.3 * 0.98 / (1 - 0.01 * 0.7), abs=1e-12)


def test_petz_matches_literal_formula(rng):
    for d in (2, 3):
        ch = random_channel(d, 2, rng)
        sigma = random_state(d, rng)
        petz = petz_map(ch, sigma)
        rho = random_state(d, rng)
        np.testing.assert_allclose(recover(petz, rho), petz_by_formula(ch, sigma, rho), atol=1e-8)


def test_petz_errors():
    with pytest.raises(ChannelError):
        petz_map(zoo.dephasing(2, 0.3), np.eye(3) / 3)
    with pytest.raises(ChannelError):
        petz_map(KrausSet(np.zeros((1, 2, 2))), np.eye(2) / 2)


def test_recover_reference_state_examples(rng):
    ch = zoo.amplitude_damping(3, 0.4)
    sigma = zoo.reference_state(3, 0.2)
    petz = petz_map(ch, sigma)
    out = recover(petz, apply(ch, sigma))
    np.testing.assert_allclose(out, sigma, atol=1e-9)
    assert np.trace(out).real == pytest.approx(1, abs=1e-9)


def test_recover_diagonal_states_under_dephasing(rng):
    ch = zoo.dephasing(4, 0.6)
    petz = petz_map(ch, zoo.reference_state(4, 0.3))
    rho = np.diag(rng.dirichlet(np.ones(4))).astype(complex)
    np.testing.assert_allclose(recover(petz, apply(ch, rho)), rho, atol=1e-12)


def test_recover_equator_state_after_damping():
    p, eps = 0.5, 0.01
    ch = zoo.amplitude_damping(2, p)
    petz = petz_map(ch, zoo.reference_state(2, eps))
    plus = (np.eye(2) + PAULI_X) / 2
    r = bloch_from_state(recover(petz, apply(ch, plus)))
    transverse, _, shift = petz_ad_factors(p, eps)
    assert r.rx == pytest.approx(transverse, abs=1e-9)
    assert r.ry == pytest.approx(0, abs=1e-12)
    assert r.rz == pytest.approx(shift, abs=1e-9)


def test_recover_rank_deficient_reference_still_returns_reference():
    ch = zoo.amplitude_damping(2, 0.4)
    sigma = np.diag([1.0, 0.0]).astype(complex)
    petz = petz_map(ch, sigma)
    np.testing.assert_allclose(recover(petz, apply(ch, sigma)), sigma, atol=1e-12)


def test_defect_zero_cases(rng):
    sigma = random_state(3, rng)
    ch = random_channel(3, 2, rng)
    assert recoverability_defect(ch, sigma, sigma) == pytest.approx(0, abs=1e-10)
    deph = zoo.dephasing(3, 0.5)
    rho = np.diag([0.2, 0.5, 0.3]).astype(complex)
    sig = np.diag([0.6, 0.1, 0.3]).astype(complex)
    assert recoverability_defect(deph, sig, rho) == pytest.approx(0, abs=1e-12)


def test_defect_positive_for_coherent_state():
    plus = (np.eye(2) + PAULI_X) / 2
    half = np.eye(2) / 2
    ch = zoo.dephasing(2, 0.5)
    value = recoverability_defect(ch, half, plus)
    out = apply(ch, plus)
    # plus is pure, so Tr plus log plus = 0
    oracle = (-np.trace(plus @ sla.logm(half))
              - np.trace(out @ sla.logm(out) - out @ sla.logm(apply(ch, half)))).real
    # S(plus || I/2) = log 2; output has eigenvalues 3/4, 1/4
    expected = np.log(2) - (np.log(2) + 0.75 * np.log(0.75) + 0.25 * np.log(0.25))
    assert value == pytest.approx(expected, abs=1e-12)
    assert value == pytest.approx(oracle, abs=1e-6)
    assert value > 0


def test_defect_infinite_outside_support():
    ch = zoo.dephasing(2, 0.3)
    assert recoverability_defect(ch, np.diag([1.0, 0.0]), np.eye(2) / 2) == np.inf


@pytest.mark.parametrize("name, channel, sigma", list(grid()), ids=lambda x: x if isinstance(x, str) else "")
def test_petz_cptp_and_reference_recovery_grid(name, channel, sigma):
    petz = petz_map(channel, sigma)
    assert verify_cptp(petz.channel, 1e-8).ok
    recovered = recover(petz, apply(channel, sigma))
    assert 2 * trace_distance(recovered, sigma) <= 1e-8


def test_defect_zero_implies_recovery(rng):
    ch = zoo.dephasing(3, 0.7)
    sigma = zoo.reference_state(3, 0.4)
    petz = petz_map(ch, sigma)
    for _ in range(5):
        rho = np.diag(rng.dirichlet(np.ones(3))).astype(complex)
        assert recoverability_defect(ch, sigma, rho) <= 1e-10
        assert 2 * trace_distance(recover(petz, apply(ch, rho)), rho) <= 1e-6


def test_data_processing_inequality(rng):
    for _ in range(100):
        d = int(rng.integers(2, 5))
        ch = random_channel(d, int(rng.integers(1, 4)), rng)
        assert recoverability_defect(ch, random_state(d, rng), random_state(d, rng)) >= -1e-8


def test_kraus_and_aform_constructions_agree(rng):
    cases = [(zoo.amplitude_damping(3, 0.3), zoo.reference_state(3, 0.01)),
             (zoo.dephasing(4, 0.6), zoo.reference_state(4, 0.75))]
    cases += [(random_channel(d, 2, rng), random_state(d, rng)) for d in (2, 3)]
    for ch, sigma in cases:
        kraus = superop_from_kraus(petz_map(ch, sigma).channel).matrix
        aform = petz_superop_aform(ch, sigma).matrix
        assert np.abs(kraus - aform).max() <= 1e-10


def test_dephasing_recovery_independent_of_reference():
    p = 0.4
    ch = zoo.dephasing(2, p)
    maps = [affine_from_channel(compose(petz_map(ch, zoo.reference_state(2, e)).channel, ch)) for e in (0.1, 0.5, 0.9)]
    for aff in maps[1:]:
        np.testing.assert_allclose(aff.M, maps[0].M, atol=1e-10)
        np.testing.assert_allclose(aff.tau, maps[0].tau, atol=1e-10)


@pytest.mark.parametrize("eps", [0.0, 0.3, 1.0])
def test_verify_petz_on_support_for_full_damping(eps):
    ch = zoo.amplitude_damping(3, 1.0)
    petz = petz_map(ch, zoo.reference_state(3, eps))
    assert not verify_cptp(petz.channel, 1e-9).ok
    assert verify_petz(petz, 1e-9).ok


def test_verify_petz_flags_non_tp_map():
    ch = zoo.dephasing(2, 0.3)
    petz = petz_map(ch, np.eye(2) / 2)
    broken = type(petz)(KrausSet(petz.channel.operators * 1.1), petz.reference, ch)
    report = verify_petz(broken, 1e-9)
    assert not report.ok and report.tp_residual > 0.1
