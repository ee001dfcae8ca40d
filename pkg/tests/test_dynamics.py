import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import central_difference
from wigmetro import (
    EulerAngles,
    HalfInt,
    PhaseConfig,
    SectorState,
    TwoModePureState,
    apply_phase,
    apply_rotation,
    ec_pure_state,
    generator_moments,
    noon,
    qfi_pure,
)

SINGLE, BALANCED = PhaseConfig.SINGLE_ARM, PhaseConfig.BALANCED


def random_sector(tj, seed):
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=tj + 1) + 1j * rng.normal(size=tj + 1)
    return SectorState.from_amplitudes(HalfInt(tj), amps)


def test_apply_phase_noon():
    out = apply_phase(noon(2), 0.3, SINGLE).state.amps
    s = 1 / math.sqrt(2)
    assert np.allclose(out, [s * np.exp(-0.6j), 0, s], atol=1e-15)
    out = apply_phase(noon(2), 0.3, BALANCED).state.amps
    assert np.allclose(out, [s * np.exp(-0.3j), 0, s * np.exp(0.3j)], atol=1e-15)


@pytest.mark.parametrize("config", [SINGLE, BALANCED])
def test_phase_derivatives_match_finite_differences(config):
    psi = random_sector(5, 1)
    ev = apply_phase(psi, 0.7, config)

    def amps(phi):
        return apply_phase(psi, phi, config).state.amps

    def first(phi):
        return apply_phase(psi, phi, config).derivative

    assert np.abs(ev.derivative - central_difference(amps, 0.7)).max() <= 1e-7
    assert np.abs(ev.second_derivative - central_difference(first, 0.7)).max() <= 1e-7


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 20), st.floats(-10, 10), st.sampled_from([SINGLE, BALANCED]))
def test_phase_preserves_norm(tj, phi, config):
    out = apply_phase(random_sector(tj, tj), phi, config).state.amps
    assert np.vdot(out, out).real == pytest.approx(1.0, abs=1e-13)


def test_single_arm_and_balanced_differ_by_global_phase():
    psi = random_sector(7, 3)
    phi = 1.1
    a = apply_phase(psi, phi, SINGLE).state.amps
    b = apply_phase(psi, phi, BALANCED).state.amps
    assert np.allclose(a, np.exp(-1j * 3.5 * phi) * b, atol=1e-14)


def test_rotation_examples():
    up = SectorState.basis("1/2", "1/2")
    out = apply_rotation(up, EulerAngles.ry(math.pi / 2)).amps
    assert np.allclose(out, [1 / math.sqrt(2), 1 / math.sqrt(2)], atol=1e-15)
    out = apply_rotation(up, EulerAngles.ry(math.pi)).amps
    assert np.allclose(out, [0, 1], atol=1e-15)


def test_rotation_carries_derivatives():
    psi = random_sector(4, 2)
    ev = apply_rotation(apply_phase(psi, 0.4, SINGLE), EulerAngles.ry(math.pi / 2))

    def amps(phi):
        return apply_rotation(apply_phase(psi, phi, SINGLE).state, EulerAngles.ry(math.pi / 2)).amps

    assert np.abs(ev.derivative - central_difference(amps, 0.4)).max() <= 1e-7
    assert ev.phi == 0.4 and ev.config is SINGLE


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 15), st.floats(-3, 3), st.floats(0, 3), st.floats(-3, 3))
def test_z_rotation_commutes_with_phase(tj, phi, beta, gamma):
    psi = random_sector(tj, 11)
    rz = EulerAngles(gamma, 0.0, 0.0)
    a = apply_phase(apply_rotation(psi, rz), phi, BALANCED).state.amps
    b = apply_rotation(apply_phase(psi, phi, BALANCED).state, rz).amps
    assert np.allclose(a, b, atol=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12), st.floats(-3, 3))
def test_qfi_invariant_under_z_rotation(tj, gamma):
    psi = random_sector(tj, tj + 100)
    rotated = apply_rotation(psi, EulerAngles(gamma, 0.0, 0.0))
    assert qfi_pure(rotated, BALANCED).value == pytest.approx(qfi_pure(psi, BALANCED).value, abs=1e-10)


def test_generator_moments_noon():
    mom = generator_moments(noon(4), BALANCED)
    assert mom.mean == pytest.approx(0.0, abs=1e-15)
    assert mom.variance == pytest.approx(4.0)
    mom = generator_moments(noon(4), SINGLE)
    assert mom.mean == pytest.approx(2.0)
    assert mom.variance == pytest.approx(4.0)
    assert mom.mean_N == 4.0 and mom.var_N == 0.0


def test_generator_moments_two_mode():
    psi = TwoModePureState.from_amplitudes({(0, 0): 1.0, (2, 0): 1.0})
    mom = generator_moments(psi, SINGLE)
    assert mom.mean == pytest.approx(1.0)
    assert mom.variance == pytest.approx(1.0)
    assert mom.var_N == pytest.approx(1.0)
    assert mom.cov_N_Jz == pytest.approx(0.5)


@pytest.mark.parametrize("alpha", [0.5, 1.0, math.sqrt(5), 3.0])
def test_single_arm_variance_decomposition(alpha):
    # G_1 = N/2 + J_z, so 4 Var(G_1) = Var(N) + 4 Cov(N, J_z) + 4 Var(J_z)
    psi = ec_pure_state(alpha)
    one = generator_moments(psi, SINGLE)
    two = generator_moments(psi, BALANCED)
    assert abs(4 * one.variance - (one.var_N + 4 * one.cov_N_Jz + 4 * two.variance)) <= 1e-10
