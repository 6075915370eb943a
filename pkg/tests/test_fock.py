import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from cvloop import fock as f
from cvloop import gaussian as g
from cvloop import sim
from cvloop.compiler import compile_cubic, compile_single_mode
from cvloop.decomp import EulerForm

N = 40


def moments(state, mode=0):
    return np.array(f.mean_quadratures(state, mode))


def gaussian_moments(state, mode=0):
    return np.array(state.mode_moments(mode))


def test_ladder_operator_and_commutator():
    a = f.annihilation(5)
    np.testing.assert_allclose(np.diag(a, 1), np.sqrt(np.arange(1, 5)))
    ops = f.QuadratureOperators.at(N)
    assert ops.cutoff == N
    assert ops.commutator_error() < 1e-12  # [x, p] = i away from the truncation edge


def test_hermite_functions_are_orthonormal():
    xs = np.linspace(-12, 12, 4001)
    H = f.hermite_functions(20, xs)
    gram = H @ H.T * (xs[1] - xs[0])
    np.testing.assert_allclose(gram, np.eye(20), atol=1e-8)


def test_vacuum_and_coherent_moments():
    np.testing.assert_allclose(moments(f.vacuum(N)), [0, 0, 0.5, 0.5], atol=1e-12)
    np.testing.assert_allclose(moments(f.coherent(1.2, -0.7, N)), [1.2, -0.7, 0.5, 0.5], atol=1e-9)


@pytest.mark.parametrize("r", [-0.6, 0.3, 0.8])
def test_squeezed_vacuum_moments(r):
    np.testing.assert_allclose(
        moments(f.squeezed(r, 60)), [0, 0, np.exp(-2 * r) / 2, np.exp(2 * r) / 2], atol=1e-8
    )


@given(st.floats(-np.pi, np.pi))
@settings(max_examples=20, deadline=None)
def test_rotation_matches_gaussian(theta):
    fs = f.rotate(f.coherent(0.8, 0.3, N), 0, theta)
    gs = g.apply(g.coherent(0.8, 0.3), g.rotation(theta))
    np.testing.assert_allclose(moments(fs), gaussian_moments(gs), atol=1e-9)


@given(st.floats(0.0, 1.0))
@settings(max_examples=20, deadline=None)
def test_beamsplitter_matches_gaussian(T):
    fs = f.coherent(0.6, -0.2, N).tensor(f.squeezed(0.4, N))
    f.beamsplitter(fs, T, 0, 1)
    gs = g.apply(g.product(g.coherent(0.6, -0.2), g.squeezed_vacuum(r=0.4)), g.beamsplitter(T))
    for mode in (0, 1):
        np.testing.assert_allclose(moments(fs, mode), gaussian_moments(gs, mode), atol=1e-8)


def test_displacement_and_squeeze_gates():
    fs = f.squeeze(f.displace(f.vacuum(N), 0, 0.5, -0.3), 0, 0.3)
    gs = g.apply(g.apply(g.vacuum(1), g.displacement(0.5, -0.3)), g.squeezer(0.3))
    np.testing.assert_allclose(moments(fs), gaussian_moments(gs), atol=1e-8)


def test_cubic_gate_shifts_p_by_x_squared():
    # p -> p + 3 gamma x^2 on a coherent state: <x^2> = x0^2 + 1/2
    gamma = 0.05
    fs = f.coherent(1.0, 0.0, 60)
    fs.apply_single(0, f.cubic_matrix(gamma, 60))
    mx, mp, _, _ = moments(fs)
    assert mx == pytest.approx(1.0, abs=1e-8)
    assert mp == pytest.approx(3 * gamma * 1.5, abs=1e-6)


def test_cubic_matrix_keeps_low_photon_columns():
    U = f.cubic_matrix(0.05, 60)
    # x^3 spreads high-n columns past the cutoff; low ones stay normalized
    norms = np.linalg.norm(U[:, :5], axis=0)
    np.testing.assert_allclose(norms, 1.0, atol=1e-6)


def test_reduced_density_is_a_state():
    fs = f.coherent(0.3, 0.1, N).tensor(f.squeezed(0.5, N))
    f.beamsplitter(fs, 0.4, 0, 1)
    rho = fs.reduced_density(0)
    np.testing.assert_allclose(rho, rho.conj().T, atol=1e-14)
    assert np.trace(rho).real == pytest.approx(1.0)
    assert np.linalg.eigvalsh(rho).min() > -1e-12


def test_cutoff_error_when_state_does_not_fit():
    with pytest.raises(f.CutoffError):
        f.squeezed(2.0, 20)
    loose = f.squeezed(2.0, 20, leakage_bound=1.0)
    assert loose.max_leakage > 1e-3 and loose.norm == pytest.approx(1.0)


@pytest.mark.parametrize("angle", [0.0, np.pi / 2, 0.9])
def test_vacuum_homodyne_ks(angle):
    rng = np.random.default_rng(1)
    samples = f.sample_homodyne(f.vacuum(N, modes=2), 0, angle, size=10_000, rng=rng)
    assert stats.kstest(samples, "norm", args=(0.0, np.sqrt(0.5))).pvalue > 1e-3


def test_projective_homodyne_samples_the_marginal():
    rng = np.random.default_rng(2)
    st_ = f.squeezed(0.4, N).tensor(f.vacuum(N))
    samples = [f.homodyne_fock(st_, 0, 0.0, rng=rng)[0] for _ in range(500)]
    assert stats.kstest(samples, "norm", args=(0.0, np.sqrt(np.exp(-0.8) / 2))).pvalue > 1e-3


def test_product_state_homodyne_leaves_partner_unchanged():
    st_ = f.coherent(0.5, 0.2, N).tensor(f.squeezed(0.3, N))
    _, rest = f.homodyne_fock(st_, 0, 0.0, outcome=0.9)
    np.testing.assert_allclose(moments(rest), moments(f.squeezed(0.3, N)), atol=1e-10)


def test_correlated_homodyne_matches_gaussian_conditioning():
    # entangle two squeezed modes, then condition on x of one of them
    fs = f.squeezed(0.5, 50).tensor(f.squeezed(-0.5, 50))
    f.beamsplitter(fs, 0.5, 0, 1)
    gs = g.apply(g.product(g.squeezed_vacuum(r=0.5), g.squeezed_vacuum(r=-0.5)), g.beamsplitter(0.5))
    for u in (-0.8, 0.0, 0.6):
        _, frest = f.homodyne_fock(fs, 1, 0.0, outcome=u)
        _, grest = g.homodyne(gs, 1, 0.0, outcome=u)
        np.testing.assert_allclose(moments(frest), gaussian_moments(grest), atol=1e-7)


def test_predicted_cubic_moments():
    x, p = f.predicted_cubic_moments(1.0, 0.0, 1.5, 0.1)
    assert x == pytest.approx(1 / np.sqrt(2))
    assert p == pytest.approx(0.225)
    _, p2 = f.predicted_cubic_moments(1.0, 0.0, 1.5, 0.1, r=2.0)
    assert p2 == pytest.approx(0.15 * (1.5 + np.exp(-4) / 2))


def test_direct_cubic_circuit_matches_program():
    gamma_target, r, n_cut = 0.05, 0.6, 40
    q, y = 0.3, -0.2
    direct, *_ = f.finish_cubic_circuit(
        f.prepare_cubic_circuit(f.coherent(0.4, 0.1, n_cut), 2 * np.sqrt(2) * gamma_target, r, n_cut, 1.0),
        q=q,
        y=y,
    )
    out, record = f.run_program(
        compile_cubic(gamma_target), f.coherent(0.4, 0.1, n_cut), r, outcomes={"q": q, "y": y}, leakage_bound=1.0
    )
    assert record["phi"] == pytest.approx(np.arctan(3 * np.sqrt(2) * 2 * np.sqrt(2) * gamma_target * q))
    np.testing.assert_allclose(moments(out), moments(direct), atol=1e-10)


def test_gaussian_program_matches_loop_sim():
    r = 0.8
    prog = compile_single_mode(EulerForm(0.4, 0.3, -0.7))
    noise = sim.NoiseConfig(ancilla_db=g.squeezing_db(g.squeezed_vacuum(r=r)))
    gs, tr = sim.run(prog, g.coherent(0.5, -0.3), noise, seed=2)
    fs, _ = f.run_program(prog, f.coherent(0.5, -0.3, 50), r, outcomes=tr.outcomes)
    np.testing.assert_allclose(moments(fs), gaussian_moments(gs), atol=1e-7)


def test_fock_backend_checks_input_modes():
    with pytest.raises(f.FockError):
        f.run_program(compile_cubic(0.1), f.vacuum(N, modes=2), 0.5)
