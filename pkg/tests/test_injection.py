import numpy as np
import pytest

from qudit_magic.gates import canonical_gate
from qudit_magic.injection import (
    DensityMatrix,
    DimensionMismatch,
    PhaseState,
    conjugated_shift_power_defect,
    inject,
    injection_deviation,
    measurement_unbiasedness_check,
    outcome_unitary_identity_defect,
    phase_state_of,
    resource_infidelity,
    twirl_resource,
    u_of_outcome,
)
from qudit_magic.oracle import gate_matrix, magic_basis

RNG_SEED = 20260819


def random_pure(d, rng):
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return DensityMatrix.pure(v / np.linalg.norm(v))


def random_mixed(d, rng):
    raw = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = raw @ raw.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


def test_phase_state_is_the_clean_resource():
    for d, m in [(3, 2), (5, 1), (7, 1)]:
        gate = canonical_gate(d, m)
        theta = phase_state_of(gate)
        assert theta.d == d
        clean = magic_basis(gate)[:, 0]
        assert np.allclose(theta.vector(), clean, atol=1e-12)


def test_outcome_unitary_identities():
    for d, m in [(3, 2), (5, 1), (7, 1)]:
        gate = canonical_gate(d, m)
        theta = phase_state_of(gate)
        assert outcome_unitary_identity_defect(theta) < 1e-12
        assert conjugated_shift_power_defect(gate) < 1e-12
        u0 = u_of_outcome(theta, 0)
        assert np.allclose(u0, np.diag(np.exp(1j * np.asarray(theta.theta))), atol=1e-12)


def test_measurement_unbiasedness():
    gate = canonical_gate(5, 1)
    rep = measurement_unbiasedness_check(phase_state_of(gate))
    assert rep.unbiased
    assert rep.z_max_deviation < 1e-12
    assert rep.joint_max_deviation < 1e-12
    biased = measurement_unbiasedness_check((1.0, 0.0, 0.0))
    assert not biased.unbiased
    assert biased.z_max_deviation > 0.1


def test_perfect_resource_reproduces_the_gate():
    rng = np.random.default_rng(RNG_SEED)
    for d, m in [(3, 2), (5, 1), (7, 1)]:
        gate = canonical_gate(d, m)
        sigma = DensityMatrix.pure(phase_state_of(gate).vector())
        rho = random_pure(d, rng)
        out, branches = inject(gate, sigma, rho, return_branches=True)
        assert len(branches) == d
        for br in branches:
            assert abs(br.probability - 1 / d) < 1e-12
        mat = gate_matrix(gate)
        ideal = mat @ rho.entries @ mat.conj().T
        assert np.max(np.abs(out.entries - ideal)) < 1e-12
        assert injection_deviation(gate, sigma, rho) < 1e-12


def test_noisy_resource_respects_trace_norm_bound():
    rng = np.random.default_rng(RNG_SEED + 1)
    for d, m in [(3, 2), (5, 1)]:
        gate = canonical_gate(d, m)
        for _ in range(20):
            sigma = random_mixed(d, rng)
            rho = random_pure(d, rng)
            eps = resource_infidelity(gate, sigma)
            dev = injection_deviation(gate, sigma, rho)
            assert dev <= 2 * eps + 1e-10


def test_injection_is_trace_preserving():
    rng = np.random.default_rng(RNG_SEED + 2)
    gate = canonical_gate(5, 1)
    sigma = random_mixed(5, rng)
    rho = random_mixed(5, rng)
    for twirl in (True, False):
        out = inject(gate, sigma, rho, twirl=twirl)
        assert abs(np.trace(out.entries).real - 1) < 1e-12


def test_twirl_preserves_infidelity_and_dephases():
    rng = np.random.default_rng(RNG_SEED + 3)
    gate = canonical_gate(3, 2)
    sigma = random_mixed(3, rng)
    twirled = twirl_resource(gate, sigma)
    assert abs(resource_infidelity(gate, sigma) - resource_infidelity(gate, twirled)) < 1e-12
    basis = magic_basis(gate)
    in_magic = basis.conj().T @ twirled.entries @ basis
    off = in_magic - np.diag(np.diag(in_magic))
    assert np.max(np.abs(off)) < 1e-12


def test_mixed_resource_infidelity():
    gate = canonical_gate(5, 1)
    assert abs(resource_infidelity(gate, DensityMatrix.maximally_mixed(5)) - 4 / 5) < 1e-12


def test_dimension_and_validation_guards():
    gate = canonical_gate(3, 2)
    rng = np.random.default_rng(RNG_SEED + 4)
    with pytest.raises(DimensionMismatch):
        inject(gate, random_mixed(3, rng), random_mixed(5, rng))
    with pytest.raises(ValueError):
        DensityMatrix(np.array([[0.5, 0.5j], [0.5j, 0.5]]))
    with pytest.raises(ValueError):
        DensityMatrix(np.eye(2))
    with pytest.raises(ValueError):
        DensityMatrix(np.array([[1.5, 0.0], [0.0, -0.5]]))


def test_phase_state_guards():
    st = PhaseState((0.0, 1.0, 2.0))
    assert st.d == 3
    v = st.vector()
    assert np.allclose(np.abs(v), 1 / np.sqrt(3))
