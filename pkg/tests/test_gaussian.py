import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from conftest import omega_oracle, random_state, random_symplectic, unitary_oracle
from cvloop import gaussian as g

angles = st.floats(-2 * np.pi, 2 * np.pi, allow_nan=False)
squeezings = st.floats(-1.5, 1.5, allow_nan=False)
transmissivities = st.floats(0.0, 1.0, allow_nan=False)
seeds = st.integers(0, 2**32 - 1)


def test_omega_matches_block_form():
    for n in range(1, 5):
        np.testing.assert_array_equal(g.omega(n), omega_oracle(n))


def test_vacuum_and_db_round_trip():
    np.testing.assert_array_equal(g.vacuum(2).cov, 0.5 * np.eye(4))
    assert g.db_to_variance(10.0) == pytest.approx(0.05)
    assert g.variance_to_db(g.db_to_variance(17.3)) == pytest.approx(17.3)
    sq = g.squeezed_vacuum(r=0.7)
    assert g.squeezing_db(sq) == pytest.approx(20 * 0.7 * np.log10(np.e))
    assert np.linalg.det(g.squeezed_vacuum(db=12.0).cov) == pytest.approx(0.25)


def test_squeezed_vacuum_needs_exactly_one_parameter():
    with pytest.raises(g.GaussianError):
        g.squeezed_vacuum()
    with pytest.raises(g.GaussianError):
        g.squeezed_vacuum(r=1.0, db=3.0)


def test_ideal_ancilla_carries_unbounded_p():
    st_ = g.squeezed_vacuum(db=g.IDEAL)
    assert st_.is_ideal
    assert st_.cov[0, 0] == 0.0 and st_.inf_cov[1, 1] > 0


@given(angles)
def test_rotation_is_phase_shift(theta):
    # a -> e^{i theta} a
    expected = unitary_oracle(np.array([[np.exp(1j * theta)]]))
    np.testing.assert_allclose(g.rotation(theta).matrix, expected, atol=1e-14)


@given(squeezings)
def test_squeezer_scales_x_down(r):
    np.testing.assert_allclose(g.squeezer(r).matrix, np.diag([np.exp(-r), np.exp(r)]), atol=1e-14)


@given(transmissivities)
def test_beamsplitter_matches_mode_unitary(T):
    t, rr = np.sqrt(T), np.sqrt(1 - T)
    U = np.array([[-rr, t], [t, rr]], dtype=complex)
    np.testing.assert_allclose(g.beamsplitter(T).matrix, unitary_oracle(U), atol=1e-14)
    assert g.is_symplectic(g.beamsplitter(T).matrix)


def test_full_transmission_swaps():
    st_ = g.product(g.coherent(1.0, 2.0), g.coherent(-3.0, 0.5))
    out = g.apply(st_, g.beamsplitter(1.0))
    np.testing.assert_allclose(out.mean, [-3.0, 1.0, 0.5, 2.0])


def test_embedded_gates_touch_only_their_modes():
    op = g.squeezer(0.4, mode=1, n_modes=3)
    expected = np.eye(6)
    expected[1, 1], expected[4, 4] = np.exp(-0.4), np.exp(0.4)
    np.testing.assert_allclose(op.matrix, expected)
    bs = g.beamsplitter(0.3, outer=2, loop=0, n_modes=3).matrix
    assert bs[1, 1] == 1.0 and bs[4, 4] == 1.0


def test_build_symplectic_dispatch():
    np.testing.assert_allclose(
        g.build_symplectic("rotation", theta=0.3).matrix, g.rotation(0.3).matrix
    )
    with pytest.raises(g.GaussianError):
        g.build_symplectic("shear")


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(1, 4))
def test_symplectic_evolution_preserves_physicality(seed, n):
    rng = np.random.default_rng(seed)
    state = random_state(n, rng)
    op = g.SymplecticOp(random_symplectic(n, rng), rng.normal(size=2 * n))
    assert g.is_physical(state)
    out = g.apply(state, op)
    assert g.is_physical(out)
    # symplectic maps preserve the determinant of the covariance
    assert np.linalg.det(out.cov) == pytest.approx(np.linalg.det(state.cov), rel=1e-8)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_composition_and_inverse(seed):
    rng = np.random.default_rng(seed)
    a = g.SymplecticOp(random_symplectic(2, rng), rng.normal(size=4))
    b = g.SymplecticOp(random_symplectic(2, rng), rng.normal(size=4))
    state = random_state(2, rng)
    lhs = g.apply(state, a @ b)
    rhs = g.apply(g.apply(state, b), a)
    np.testing.assert_allclose(lhs.mean, rhs.mean, atol=1e-10)
    np.testing.assert_allclose(lhs.cov, rhs.cov, atol=1e-10)
    back = g.apply(g.apply(state, a), a.inverse())
    np.testing.assert_allclose(back.cov, state.cov, atol=1e-9)


def test_non_symplectic_matrix_detected():
    assert not g.is_symplectic(np.diag([2.0, 2.0]))
    assert g.symplectic_error(np.diag([2.0, 0.5])) < 1e-15
    with pytest.raises(g.GaussianError):
        g.SymplecticOp(np.eye(3))


def test_unphysical_covariance_detected():
    assert not g.is_physical(g.GaussianState(np.zeros(2), np.diag([0.1, 0.1])))


def test_homodyne_conditions_by_schur_complement(rng):
    state = random_state(2, rng)
    angle, outcome = 0.7, 0.4
    v = np.zeros(4)
    v[1], v[3] = np.cos(angle), np.sin(angle)
    c = v @ state.cov @ v
    k = state.cov @ v / c
    mean = state.mean + k * (outcome - v @ state.mean)
    cov = state.cov - np.outer(state.cov @ v, state.cov @ v) / c
    keep = [0, 2]
    value, out = g.homodyne(state, 1, angle, outcome=outcome)
    assert value == outcome
    np.testing.assert_allclose(out.mean, mean[keep], atol=1e-12)
    np.testing.assert_allclose(out.cov, cov[np.ix_(keep, keep)], atol=1e-12)


def test_homodyne_outcomes_follow_the_marginal():
    state = g.apply(g.coherent(0.8, -0.4), g.squeezer(0.5))
    angle = 0.3
    v = np.array([np.cos(angle), np.sin(angle)])
    mu, sd = v @ state.mean, np.sqrt(v @ state.cov @ v)
    r = np.random.default_rng(5)
    samples = [g.homodyne(state, 0, angle, rng=r)[0] for _ in range(4000)]
    assert stats.kstest(samples, "norm", args=(mu, sd)).pvalue > 1e-3


def test_zero_variance_measurement_raises():
    state = g.GaussianState(np.zeros(4), np.diag([0.0, 0.5, 1.0, 0.5]))
    with pytest.raises(g.DegenerateMeasurementError):
        g.homodyne(state, 0, 0.0, outcome=0.0)


@given(st.floats(0.01, 1.0))
def test_loss_channel_mixes_in_vacuum(eta):
    state = g.apply(g.coherent(1.0, -2.0), g.squeezer(0.8))
    out = g.loss_channel(state, 0, eta)
    np.testing.assert_allclose(out.cov, eta * state.cov + (1 - eta) * 0.5 * np.eye(2), atol=1e-14)
    np.testing.assert_allclose(out.mean, np.sqrt(eta) * state.mean, atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 0.95), seeds)
def test_measurement_induced_squeeze_ideal(R0, seed):
    rng = np.random.default_rng(seed)
    state = random_state(1, rng)
    out = g.measurement_induced_squeeze(state, 0, R0, rng=rng)
    expected = g.apply(state, g.squeezer(-np.log(np.sqrt(R0))))
    dm, dc = g.state_distance(out, expected)
    assert dm < 1e-9 and dc < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.0, 30.0), seeds)
def test_measurement_induced_squeeze_finite_ancilla(R0, db, seed):
    # Heisenberg map, then condition the joint Gaussian on the p outcome q.
    rng = np.random.default_rng(seed)
    state = random_state(1, rng)
    T0, outcome = 1 - R0, 0.3
    gain = np.sqrt(T0 / R0)
    var_a = g.db_to_variance(db)
    cov_in = np.zeros((4, 4))
    cov_in[:2, :2] = state.cov
    cov_in[2:, 2:] = np.diag([var_a, 0.25 / var_a])
    mean_in = np.concatenate([state.mean, [0.0, 0.0]])
    # rows (x_out, p_out, q) on (x_in, p_in, x_a, p_a)
    q_row = np.array([0.0, np.sqrt(T0), 0.0, -np.sqrt(R0)])
    L = np.array([
        [np.sqrt(R0), 0.0, np.sqrt(T0), 0.0],
        [0.0, np.sqrt(R0), 0.0, np.sqrt(T0)],
    ])
    L[1] += gain * q_row
    L = np.vstack([L, q_row])
    mu, cov = L @ mean_in, L @ cov_in @ L.T
    k = cov[:2, 2] / cov[2, 2]
    mean = mu[:2] + k * (outcome - mu[2])
    cond = cov[:2, :2] - np.outer(cov[:2, 2], cov[:2, 2]) / cov[2, 2]
    out = g.measurement_induced_squeeze(state, 0, R0, ancilla=db, outcome=outcome)
    np.testing.assert_allclose(out.cov, cond, atol=1e-9)
    np.testing.assert_allclose(out.mean, mean, atol=1e-9)
    assert g.is_physical(out)


def test_state_round_trips_through_dict(rng):
    state = random_state(3, rng)
    back = g.GaussianState.from_dict(state.to_dict())
    assert g.state_distance(state, back) == (0.0, 0.0)
    ideal = g.GaussianState.from_dict(g.ideal_squeezed_vacuum().to_dict())
    assert ideal.is_ideal


def test_conditional_covariance_ignores_outcome(rng):
    state = random_state(3, rng)
    _, a = g.homodyne(state, 1, 0.4, outcome=-1.3)
    _, b = g.homodyne(state, 1, 0.4, outcome=2.2)
    np.testing.assert_array_equal(a.cov, b.cov)
    assert not np.array_equal(a.mean, b.mean)


def test_vacuum_p_statistics():
    r = np.random.default_rng(0)
    samples = [g.homodyne(g.vacuum(1), 0, np.pi / 2, rng=r)[0] for _ in range(10_000)]
    assert stats.kstest(samples, "norm", args=(0.0, np.sqrt(0.5))).pvalue > 1e-3


@settings(max_examples=40, deadline=None)
@given(seeds, st.floats(0.01, 1.0))
def test_loss_contracts_toward_vacuum(seed, eta):
    state = random_state(1, np.random.default_rng(seed))
    vac = g.vacuum(1)
    before = g.state_distance(state, vac)[1]
    after = g.state_distance(g.loss_channel(state, 0, eta), vac)[1]
    assert after <= before + 1e-12
