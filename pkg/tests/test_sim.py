import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_state, random_symplectic
from cvloop import gaussian as g
from cvloop import sim
from cvloop.compiler import compile_cubic, compile_gaussian, compile_single_mode
from cvloop.decomp import EulerForm
from cvloop.schemas import check

seeds = st.integers(0, 2**32 - 1)


@pytest.fixture(scope="module")
def two_mode():
    rng = np.random.default_rng(11)
    S = g.SymplecticOp(random_symplectic(2, rng), rng.normal(size=4))
    return compile_gaussian(S), S


@settings(max_examples=20, deadline=None)
@given(seeds, st.integers(1, 3))
def test_ideal_trajectory_applies_target(seed, n):
    rng = np.random.default_rng(seed)
    S = g.SymplecticOp(random_symplectic(n, rng), rng.normal(size=2 * n))
    state = random_state(n, rng)
    out, _ = sim.run(compile_gaussian(S), state, seed=seed)
    expected = g.apply(state, S)
    dm, dc = g.state_distance(out, expected)
    assert dm < 1e-9 and dc < 1e-9


def test_replay_is_bit_exact(two_mode):
    prog, _ = two_mode
    noise = sim.NoiseConfig(ancilla_db=12.0, eta_in=0.995)
    state = random_state(2, np.random.default_rng(3))
    first, tr = sim.run(prog, state, noise, seed=42)
    again, tr2 = sim.run(prog, state, noise, seed=None, outcomes=tr.outcomes)
    np.testing.assert_array_equal(first.mean, again.mean)
    np.testing.assert_array_equal(first.cov, again.cov)
    assert tr.outcomes == tr2.outcomes


def test_same_seed_same_transcript(two_mode):
    prog, _ = two_mode
    noise = sim.NoiseConfig(ancilla_db=10.0)
    a = sim.run(prog, None, noise, seed=5)[1].to_json()
    b = sim.run(prog, None, noise, seed=5)[1].to_json()
    assert a == b
    check(json.loads(a))


def test_covariance_is_seed_independent(two_mode):
    prog, _ = two_mode
    noise = sim.NoiseConfig(ancilla_db=10.0, eta_in=0.99, eta_out=0.98, eta_det=0.97)
    covs = [sim.run(prog, None, noise, seed=s)[0].cov for s in range(20)]
    means = [sim.run(prog, None, noise, seed=s)[0].mean for s in range(2)]
    for cov in covs[1:]:
        np.testing.assert_array_equal(cov, covs[0])
    assert not np.array_equal(means[0], means[1])


def test_channel_matches_target(two_mode):
    prog, S = two_mode
    rep = sim.verify(prog, S)
    assert rep.passed
    assert rep.transfer_error < 1e-10 and rep.noise_norm < 1e-12


def test_noise_shrinks_with_ancilla_squeezing(two_mode):
    prog, S = two_mode
    norms = [sim.extract_channel(prog, sim.NoiseConfig(ancilla_db=db)).noise_norm for db in (0, 10, 20, 40, 60)]
    assert all(a > b for a, b in zip(norms, norms[1:]))
    assert sim.extract_channel(prog, sim.NoiseConfig()).noise_norm < 1e-12
    for db in (0, 10, 20, 40, 60):
        rep = sim.verify(prog, S, sim.NoiseConfig(ancilla_db=db))
        assert rep.transfer_error < 1e-10


def test_finite_ancilla_squeeze_channel_closed_form():
    # x_out = sqrt(R0) x_in + sqrt(T0) x_a and p_out = p_in / sqrt(R0)
    r, db = 0.4, 15.0
    R0 = np.exp(-2 * r)
    ch = sim.extract_channel(compile_single_mode(EulerForm(0.0, r, 0.0)), sim.NoiseConfig(ancilla_db=db))
    np.testing.assert_allclose(ch.transfer, np.diag([np.sqrt(R0), 1 / np.sqrt(R0)]), atol=1e-12)
    np.testing.assert_allclose(ch.noise, np.diag([(1 - R0) * g.db_to_variance(db), 0.0]), atol=1e-12)


@settings(max_examples=15, deadline=None)
@given(seeds, st.floats(0.0, 30.0), st.floats(0.9, 1.0), st.floats(0.9, 1.0))
def test_noisy_channels_are_physical(seed, db, eta_in, eta_det):
    rng = np.random.default_rng(seed)
    prog = compile_gaussian(random_symplectic(2, rng))
    noise = sim.NoiseConfig(ancilla_db=db, eta_in=eta_in, eta_out=eta_in, eta_det=eta_det)
    ch = sim.extract_channel(prog, noise)
    assert ch.is_physical()
    out, _ = sim.run(prog, random_state(2, rng), noise, seed=seed)
    assert g.is_physical(out)


def test_loss_adds_noise(two_mode):
    prog, S = two_mode
    lossy = sim.NoiseConfig(ancilla_db=g.IDEAL, eta_in=0.99)
    rep = sim.verify(prog, S, lossy)
    assert not lossy.is_ideal
    assert rep.noise_norm > 1e-4 or rep.transfer_error > 1e-4


def test_channel_averages_trajectories():
    prog = compile_single_mode(EulerForm(0.3, 0.5, -0.4))
    noise = sim.NoiseConfig(ancilla_db=6.0)
    state = g.coherent(0.7, -0.2)
    ch = sim.extract_channel(prog, noise)
    expected = ch.transfer @ state.mean + ch.displacement
    means = np.array([sim.run(prog, state, noise, seed=s)[0].mean for s in range(4000)])
    # averaged trajectories reproduce the deferred mean within 5 sigma
    err = np.abs(means.mean(axis=0) - expected)
    assert np.all(err < 5 * means.std(axis=0) / np.sqrt(len(means)))


def test_cubic_program_needs_fock_backend():
    with pytest.raises(sim.UnsupportedProgramError):
        sim.run(compile_cubic(0.1))
    with pytest.raises(sim.UnsupportedProgramError):
        sim.extract_channel(compile_cubic(0.1))


def test_budget_closed_form():
    noise = sim.NoiseConfig(ancilla_db=15.0, eta_in=0.99)
    rep = sim.noise_budget(noise, round_trips=1)
    expected = -10 * np.log10(2 * (0.99 * 0.5 * 10**-1.5 + 0.01 * 0.5))
    assert rep["effective_squeezing_db"] == pytest.approx(expected, abs=1e-12)
    assert not rep["meets_threshold"]
    # one percent per round trip is already over budget
    assert not rep["loss_budget_ok"]
    assert sim.noise_budget(sim.NoiseConfig(ancilla_db=25.0, eta_in=0.995), 1)["loss_budget_ok"]
    assert sim.noise_budget(sim.NoiseConfig(ancilla_db=21.0), 0)["meets_threshold"]


@given(st.floats(0.0, 40.0), st.integers(0, 50))
def test_budget_degrades_with_round_trips(db, k):
    noise = sim.NoiseConfig(ancilla_db=db, eta_in=0.995)
    a = sim.noise_budget(noise, k)["effective_squeezing_db"]
    b = sim.noise_budget(noise, k + 1)["effective_squeezing_db"]
    assert b <= a + 1e-12
    assert b >= 0.0


def test_noise_config_round_trip():
    cfg = sim.NoiseConfig.from_dict({"ancilla_db": 12, "loop_loss": 0.02})
    assert cfg.eta_in == pytest.approx(0.98)
    assert sim.NoiseConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(ValueError):
        sim.NoiseConfig(eta_in=0.0)
