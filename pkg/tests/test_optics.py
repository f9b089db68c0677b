import numpy as np
import pytest

from holophase.errors import DecompositionMismatch, InvalidCounts
from holophase.evolutions import experiment_unitary
from holophase.optics import (CoincidenceModel, WavePlate, arm_unitaries, expected_counts,
                              experimental_visibility, jones_matrix, plate_fringe_offset,
                              plate_unitary, sample_counts, verify_arm_decomposition,
                              verify_plate_decomposition, visibility_theory)
from holophase.states import prepared_state

N, N0 = 11911, 1616


def phase_free_residual(actual, target):
    """min over gamma of |actual - e^{i gamma} target| via the polar angle of tr(target^dagger actual)."""
    g = np.angle(np.sum(target.conj() * actual))
    return np.abs(actual - np.exp(1j * g) * target).max()


def test_jones_axis_aligned_plates():
    assert np.allclose(jones_matrix(WavePlate(np.pi, 0.0)), np.diag([-1j, 1j]), atol=1e-15)
    assert np.allclose(jones_matrix(WavePlate(np.pi / 2, 0.0)),
                       np.diag([np.exp(-0.25j * np.pi), np.exp(0.25j * np.pi)]), atol=1e-15)


@pytest.mark.parametrize("delta", [np.pi / 2, np.pi, 0.3])
@pytest.mark.parametrize("theta", np.linspace(-np.pi, np.pi, 7))
def test_jones_matrices_are_special_unitary(delta, theta):
    j = jones_matrix(WavePlate(delta, theta))
    assert np.abs(j.conj().T @ j - np.eye(2)).max() <= 1e-12
    assert abs(np.linalg.det(j) - 1) <= 1e-12


def test_half_wave_rotated_explicitly():
    # R(t) diag(-i, i) R(-t) = -i (cos 2t s1 + sin 2t s2) in the (H, V) basis
    t = 0.37
    expected = -1j * np.array([[np.cos(2 * t), np.sin(2 * t)], [np.sin(2 * t), -np.cos(2 * t)]])
    assert np.abs(jones_matrix(WavePlate(np.pi, t)) - expected).max() <= 1e-15


@pytest.mark.parametrize("s", [0.0, np.pi / 4])
def test_plate_decomposition_examples(s):
    check = verify_plate_decomposition(s)
    assert check.residual <= 1e-10
    assert phase_free_residual(plate_unitary(s), experiment_unitary(s)) <= 1e-10


def test_plate_decomposition_sweep():
    residuals, phases = [], []
    for s in np.linspace(0, np.pi / 2, 50):
        c = verify_plate_decomposition(s)
        residuals.append(c.residual)
        phases.append(c.global_phase)
        p = plate_unitary(s)
        assert np.abs(p.conj().T @ p - np.eye(2)).max() <= 1e-12
    assert max(residuals) <= 1e-10
    assert np.all(np.isfinite(phases))


def test_plate_decomposition_fault_is_detected():
    with pytest.raises(DecompositionMismatch):
        verify_plate_decomposition(0.4, hwp_offset=1e-3)


def test_arm_product_at_zero_is_scalar():
    ub, uh = arm_unitaries(0.0)
    m = uh.conj().T @ ub
    assert phase_free_residual(m, np.eye(2)) <= 1e-12


@pytest.mark.parametrize("s", [np.pi / 8] + list(np.linspace(0, np.pi / 2, 11)))
def test_arm_product_matches_u(s):
    ub, uh = arm_unitaries(s)
    assert phase_free_residual(uh.conj().T @ ub, experiment_unitary(s)) <= 1e-10
    assert verify_arm_decomposition(s).residual <= 1e-10


def test_visibility_theory_examples():
    for a in np.linspace(0, np.pi, 5):
        assert visibility_theory(a, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert visibility_theory(np.pi / 2, np.pi / 4) == pytest.approx(0.0, abs=1e-15)


def test_visibility_theory_matches_direct_overlap():
    rng = np.random.default_rng(0)
    for _ in range(50):
        a, s = rng.uniform(0, np.pi), rng.uniform(0, np.pi / 2)
        u = experiment_unitary(s)
        psi = prepared_state(a)
        assert visibility_theory(a, s) == pytest.approx(abs(np.vdot(psi, np.kron(u, u) @ psi)), abs=1e-12)


def test_expected_counts_examples():
    m = CoincidenceModel(n=N, n0=N0, v_t=1.0, phi_h=0.4)
    assert expected_counts(0.2, m) == pytest.approx(N)
    flat = CoincidenceModel(n=N, n0=N0, v_t=0.0, phi_h=0.4)
    assert np.allclose(expected_counts(np.linspace(0, 3, 9), flat), (N + N0) / 2)
    assert expected_counts(np.pi / 2, CoincidenceModel(N, N0, 1.0, 0.0)) == pytest.approx(1616)


def test_expected_counts_period_pi():
    m = CoincidenceModel(N, N0, 0.6, 1.3)
    phi = np.linspace(-2, 2, 41)
    assert np.array_equal(expected_counts(phi + np.pi, m), expected_counts(phi, m)) or \
        np.abs(expected_counts(phi + np.pi, m) - expected_counts(phi, m)).max() <= 1e-9


def test_expected_counts_peak_location():
    for phi_h in (-2.5, -0.3, 0.0, 1.1, 3.0):
        m = CoincidenceModel(N, N0, 0.8, phi_h)
        grid = np.linspace(0, np.pi, 100001)
        peak = grid[np.argmax(expected_counts(grid, m))]
        d = np.mod(peak - phi_h / 2 + np.pi / 2, np.pi) - np.pi / 2
        assert abs(d) <= 2 * (grid[1] - grid[0])


def test_background_free_model_reduces_to_ideal_fringe():
    m = CoincidenceModel(N, 0, 0.55, 0.7)
    phi = np.linspace(0, np.pi, 17)
    ideal = N / 2 * (1 + 0.55 * np.cos(2 * phi - 0.7))
    assert np.allclose(expected_counts(phi, m), ideal, rtol=0, atol=1e-9)


def test_experimental_visibility_examples():
    assert experimental_visibility(0.8, 100, 0) == 0.8
    inside = experimental_visibility(1.0, N, N0)
    assert inside == pytest.approx(10295 / 13527, abs=1e-15)
    assert inside == pytest.approx(0.7611, abs=5e-5)
    ratio = experimental_visibility(1.0, 10000, 5068) / inside
    assert abs(ratio - 0.430) <= 0.005
    with pytest.raises(InvalidCounts):
        experimental_visibility(1.0, 0, 0)
    with pytest.raises(InvalidCounts):
        experimental_visibility(1.0, 5, 10)


def test_model_visibility_invariants():
    m = CoincidenceModel.from_settings(0.4 * np.pi, 0.3, N, N0)
    assert m.reference_visibility == pytest.approx((N - N0) / (N + N0))
    assert 0 <= m.visibility <= m.reference_visibility
    with pytest.raises(InvalidCounts):
        CoincidenceModel(10, 20, 0.5, 0.0)


def test_model_at_transition_point_is_flat():
    m = CoincidenceModel.from_settings(np.pi / 2, np.pi / 4, N, N0)
    assert m.v_t == 0.0


def test_plate_phase_is_zero_in_this_convention():
    for s in np.linspace(0, np.pi / 2, 11):
        assert abs(plate_fringe_offset(s)) <= 1e-12


def test_sample_counts_zero_mean():
    m = CoincidenceModel(0, 0, 0.0, 0.0)
    assert np.all(sample_counts(np.linspace(0, 1, 5), m, 3) == 0)


def test_sample_counts_law_of_large_numbers():
    m = CoincidenceModel(N, N0, 0.7, 0.9)
    draws = sample_counts(np.full(100000, 0.4), m, 12345)
    assert abs(draws.mean() / expected_counts(0.4, m) - 1) <= 0.01
    assert draws.dtype.kind == "i"


def test_sample_counts_deterministic():
    m = CoincidenceModel(N, N0, 0.7, 0.9)
    phi = np.linspace(0, np.pi, 21, endpoint=False)
    assert np.array_equal(sample_counts(phi, m, 7), sample_counts(phi, m, 7))
    assert not np.array_equal(sample_counts(phi, m, 7), sample_counts(phi, m, 8))
