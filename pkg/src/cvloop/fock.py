"""Truncated number-basis simulation, used for the cubic phase gate.

States are pure tensors of shape ``(N,) * modes``. Single-mode unitaries are
built at a padded cutoff and truncated; the weight pushed above the cutoff
by each step is recorded as leakage, compared with a bound, and removed by
renormalization.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg as sla

from .machine import Backend, execute
from .program import CUBIC, SQUEEZED, ControlProgram, SingularFeedforwardError

DEFAULT_CUTOFF = 80
DEFAULT_LEAKAGE_BOUND = 1e-6
DEFAULT_PAD = 60
HOMODYNE_BINS = 2001
HOMODYNE_SIGMAS = 6.0


class FockError(RuntimeError):
    """Numerical failure in the Fock backend."""


class CutoffError(FockError):
    """Truncation leakage exceeded the configured bound."""


# --- operators ---------------------------------------------------------------------


def annihilation(N):
    return np.diag(np.sqrt(np.arange(1, N, dtype=float)), 1).astype(complex)


@dataclass(frozen=True)
class QuadratureOperators:
    """``x = (a + a^dag)/sqrt(2)`` and ``p = (a - a^dag)/(i sqrt(2))`` at cutoff ``N``."""

    x_matrix: np.ndarray
    p_matrix: np.ndarray

    @classmethod
    def at(cls, N):
        a = annihilation(N)
        ad = a.conj().T
        return cls((a + ad) / np.sqrt(2), (a - ad) / (1j * np.sqrt(2)))

    @property
    def cutoff(self):
        return self.x_matrix.shape[0]

    def commutator_error(self):
        """Max deviation of ``[x, p]`` from ``i`` below the top two levels."""
        x, p = self.x_matrix, self.p_matrix
        c = x @ p - p @ x
        k = self.cutoff - 2
        return float(np.abs(c[:k, :k] - 1j * np.eye(k)).max())


@lru_cache(maxsize=64)
def _quads(N):
    return QuadratureOperators.at(N)


def hermite_functions(N, xs):
    """Position wavefunctions ``psi_n(x)`` for ``n < N``, shape ``(N, len(xs))``."""
    xs = np.asarray(xs, dtype=float)
    psi = np.zeros((N, xs.size))
    psi[0] = np.pi**-0.25 * np.exp(-(xs**2) / 2)
    if N > 1:
        psi[1] = np.sqrt(2.0) * xs * psi[0]
    for n in range(2, N):
        psi[n] = np.sqrt(2.0 / n) * xs * psi[n - 1] - np.sqrt((n - 1) / n) * psi[n - 2]
    return psi


def _padded_expm(generator, N, pad):
    """Top-left ``N x N`` block of ``expm(generator(a))`` at cutoff ``N + pad``."""
    a = annihilation(N + pad)
    return sla.expm(generator(a, a.conj().T))[:N, :N]


@lru_cache(maxsize=128)
def squeeze_matrix(r, N, pad=DEFAULT_PAD):
    """``S(r) = exp(r/2 (a^2 - a^dag^2))``: x scaled by ``exp(-r)``."""
    return _padded_expm(lambda a, ad: 0.5 * r * (a @ a - ad @ ad), N, pad)


def displacement_matrix(x, p, N, pad=DEFAULT_PAD):
    """``D(alpha)`` with ``alpha = (x + i p)/sqrt(2)``: shifts the means by ``(x, p)``."""
    alpha = (x + 1j * p) / np.sqrt(2)
    return _padded_expm(lambda a, ad: alpha * ad - np.conj(alpha) * a, N, pad)


@lru_cache(maxsize=32)
def cubic_matrix(gamma, N, pad=DEFAULT_PAD):
    """``exp(i gamma x^3)`` via the eigenbasis of the padded position operator."""
    x = _quads(N + pad).x_matrix
    lam, vec = np.linalg.eigh(x)
    return ((vec * np.exp(1j * gamma * lam**3)) @ vec.conj().T)[:N, :N]


def rotation_phases(theta, N):
    """Diagonal of ``R(theta) = exp(i theta n)``."""
    return np.exp(1j * theta * np.arange(N))


@lru_cache(maxsize=16)
def _sector_blocks(theta, N):
    """Blocks of the two-mode mixing ``exp(theta (a1^dag a2 - a1 a2^dag))`` per photon sector.

    Block ``k`` acts on amplitudes ``c[j, k - j]`` for the ``j`` allowed by the
    cutoff. In the Heisenberg picture the mode pair transforms as
    ``[[cos, -sin], [sin, cos]]``.
    """
    blocks = []
    for total in range(2 * N - 1):
        G = np.zeros((total + 1, total + 1))
        for j in range(total + 1):
            if j < total:
                G[j + 1, j] -= theta * np.sqrt((j + 1) * (total - j))
            if j > 0:
                G[j - 1, j] += theta * np.sqrt(j * (total - j + 1))
        js = np.arange(max(0, total - N + 1), min(total, N - 1) + 1)
        blocks.append((js, sla.expm(G)[np.ix_(js, js)]))
    return blocks


# --- states ------------------------------------------------------------------------


@dataclass
class FockState:
    """Pure state of ``modes`` modes truncated at ``cutoff`` photons per mode.

    Attributes:
        amplitudes: Tensor of shape ``(cutoff,) * modes``.
        leakage: Norm loss of each truncated step, in order.
        leakage_bound: Per-step bound; exceeding it raises ``CutoffError``.
    """

    amplitudes: np.ndarray
    leakage: list = field(default_factory=list)
    leakage_bound: float = DEFAULT_LEAKAGE_BOUND

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        shape = self.amplitudes.shape
        if not shape or len(set(shape)) != 1:
            raise FockError(f"amplitudes must have shape (N,)*modes, got {shape}")

    @property
    def cutoff(self):
        return self.amplitudes.shape[0]

    @property
    def modes(self):
        return self.amplitudes.ndim

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    @property
    def max_leakage(self):
        return max(self.leakage, default=0.0)

    def copy(self):
        return FockState(self.amplitudes.copy(), list(self.leakage), self.leakage_bound)

    def _renormalize(self, step):
        nrm2 = float(np.vdot(self.amplitudes, self.amplitudes).real)
        lost = max(0.0, 1.0 - nrm2)
        self.leakage.append(lost)
        if lost > self.leakage_bound:
            raise CutoffError(
                f"{step}: leakage {lost:.3e} exceeds bound {self.leakage_bound:.1e} at cutoff {self.cutoff}"
            )
        self.amplitudes = self.amplitudes / np.sqrt(nrm2)

    def apply_single(self, mode, U, step="gate"):
        psi = np.tensordot(U, self.amplitudes, axes=([1], [mode]))
        self.amplitudes = np.moveaxis(psi, 0, mode)
        self._renormalize(step)
        return self

    def apply_phases(self, mode, phases):
        shape = [1] * self.modes
        shape[mode] = self.cutoff
        self.amplitudes = self.amplitudes * phases.reshape(shape)
        return self

    def tensor(self, other: FockState):
        if other.cutoff != self.cutoff:
            raise FockError("cutoff must be consistent across modes")
        amps = np.multiply.outer(self.amplitudes, other.amplitudes)
        return FockState(amps, self.leakage + other.leakage, self.leakage_bound)

    def reduced_density(self, mode):
        psi = np.moveaxis(self.amplitudes, mode, 0).reshape(self.cutoff, -1)
        return psi @ psi.conj().T

    def to_dict(self):
        return {"cutoff": self.cutoff, "modes": self.modes, "norm": self.norm, "max_leakage": self.max_leakage}


def _single(vec, bound=DEFAULT_LEAKAGE_BOUND):
    st = FockState(vec, leakage_bound=bound)
    st._renormalize("preparation")
    return st


def vacuum(N, modes=1):
    amps = np.zeros((N,) * modes, dtype=complex)
    amps[(0,) * modes] = 1.0
    return FockState(amps)


def coherent(x, p, N, leakage_bound=DEFAULT_LEAKAGE_BOUND):
    """Coherent state with quadrature means ``(x, p)``."""
    return _single(displacement_matrix(x, p, N)[:, 0], leakage_bound)


def squeezed(r, N, leakage_bound=DEFAULT_LEAKAGE_BOUND):
    """``S(r)|0>``: x-variance ``exp(-2r)/2`` (p-squeezed for ``r < 0``)."""
    return _single(squeeze_matrix(float(r), N)[:, 0], leakage_bound)


def cubic_ancilla(gamma, r, N, leakage_bound=DEFAULT_LEAKAGE_BOUND):
    """Finitely squeezed approximation of ``int dx exp(i gamma x^3)|x>``.

    ``exp(i gamma x^3)`` acting on the p-squeezed vacuum ``S(-r)|0>``; it
    approaches the ideal ancilla as ``r`` grows.

    Args:
        gamma: Cubicity.
        r: Squeezing parameter, ``r >= 0``.
        N: Cutoff, at least 20.
        leakage_bound: Per-step leakage bound.

    Raises:
        CutoffError: the cutoff cannot hold the state.
    """
    if N < 20:
        raise FockError("cubic_ancilla needs a cutoff of at least 20")
    if r < 0:
        raise FockError("squeezing r must be non-negative")
    st = squeezed(-r, N, leakage_bound)
    if gamma != 0.0:
        st.apply_single(0, cubic_matrix(float(gamma), N), "cubic phase")
    return st


# --- gates on multi-mode states -------------------------------------------------------


def rotate(state, mode, theta):
    """``R(theta)``: ``(x, p) -> (cos x - sin p, sin x + cos p)``."""
    return state.apply_phases(mode, rotation_phases(theta, state.cutoff))


def squeeze(state, mode, r):
    return state.apply_single(mode, squeeze_matrix(float(r), state.cutoff), "squeeze")


def displace(state, mode, x=0.0, p=0.0):
    return state.apply_single(mode, displacement_matrix(x, p, state.cutoff), "displacement")


def _mix(state, i, j, theta):
    N = state.cutoff
    psi = np.moveaxis(state.amplitudes, (i, j), (0, 1))
    out = np.zeros_like(psi)
    for total, (js, U) in enumerate(_sector_blocks(float(theta), N)):
        vec = psi[js, total - js]
        out[js, total - js] = np.tensordot(U, vec, axes=(1, 0))
    state.amplitudes = np.moveaxis(out, (0, 1), (i, j))
    state._renormalize("beam splitter")
    return state


def beamsplitter(state, T, outer, loop):
    """Loop VBS on ``(outer, loop)``: ``[[-sqrt(R), sqrt(T)], [sqrt(T), sqrt(R)]]``.

    Realized as a pi phase on ``outer`` followed by a mixing rotation with
    ``cos(theta) = sqrt(R)`` and ``sin(theta) = -sqrt(T)``.
    """
    rotate(state, outer, np.pi)
    theta = np.arctan2(-np.sqrt(T), np.sqrt(1.0 - T))
    return _mix(state, outer, loop, theta)


# --- measurement ---------------------------------------------------------------------


def mean_quadratures(state, mode=0):
    """``(<x>, <p>, Var x, Var p)`` of one mode."""
    rho = state.reduced_density(mode)
    q = _quads(state.cutoff)
    x, p = q.x_matrix, q.p_matrix
    ex = np.trace(rho @ x).real
    ep = np.trace(rho @ p).real
    vx = np.trace(rho @ x @ x).real - ex**2
    vp = np.trace(rho @ p @ p).real - ep**2
    return float(ex), float(ep), float(vx), float(vp)


def _rotated(state, mode, quadrature_angle):
    # Measuring x_a equals rotating by -a and measuring x.
    N = state.cutoff
    psi = np.moveaxis(state.amplitudes, mode, 0)
    return psi * rotation_phases(-quadrature_angle, N).reshape((N,) + (1,) * (psi.ndim - 1))


def _marginal(psi, bins):
    """Grid and cell probabilities of the x marginal of axis 0 of ``psi``."""
    N = psi.shape[0]
    flat = psi.reshape(N, -1)
    rho = flat @ flat.conj().T
    x = _quads(N).x_matrix
    mu = np.trace(rho @ x).real
    sigma = np.sqrt(max(np.trace(rho @ x @ x).real - mu**2, 1e-12))
    xs = np.linspace(mu - HOMODYNE_SIGMAS * sigma, mu + HOMODYNE_SIGMAS * sigma, bins)
    H = hermite_functions(N, xs)
    dens = np.clip(np.sum(H * (rho @ H), axis=0).real, 0.0, None)
    return xs, dens / dens.sum()


def _draw(xs, prob, rng, size=None):
    k = rng.choice(len(xs), size=size, p=prob)
    dx = xs[1] - xs[0]
    return xs[k] + dx * (rng.random(size) - 0.5)


def sample_homodyne(state, mode, quadrature_angle=0.0, size=1, rng=None, bins=HOMODYNE_BINS):
    """Draw ``size`` outcomes of ``cos(a) x + sin(a) p`` without projecting.

    Uses the same grid as ``homodyne_fock``; the state is not modified.
    """
    rng = rng if rng is not None else np.random.default_rng()
    xs, prob = _marginal(_rotated(state, mode, quadrature_angle), bins)
    return _draw(xs, prob, rng, size)


def homodyne_fock(state, mode, quadrature_angle=0.0, rng=None, outcome=None, bins=HOMODYNE_BINS):
    """Measure ``cos(a) x + sin(a) p`` of ``mode`` and project the rest.

    The marginal is evaluated from Hermite-function wavefunctions on a
    uniform grid of ``bins`` points spanning six standard deviations either
    side of the mean. A sampled outcome picks a grid cell by its probability
    and a uniform point within it; the state is projected exactly at that
    point.

    Args:
        state: ``FockState`` (not modified).
        mode: Measured mode; it is removed.
        quadrature_angle: LO angle ``a``.
        rng: ``numpy.random.Generator`` for sampling.
        outcome: Fixed outcome instead of sampling.
        bins: Grid resolution.

    Returns:
        ``(outcome, conditioned)``; ``conditioned`` is None if no mode is left.

    Raises:
        FockError: projection onto an outcome of negligible probability.
    """
    N = state.cutoff
    psi = _rotated(state, mode, quadrature_angle)
    if outcome is None:
        rng = rng if rng is not None else np.random.default_rng()
        xs, prob = _marginal(psi, bins)
        outcome = _draw(xs, prob, rng)
    outcome = float(outcome)
    if state.modes == 1:
        return outcome, None
    h = hermite_functions(N, [outcome])[:, 0]
    rest = np.tensordot(h, psi, axes=(0, 0))
    nrm = np.linalg.norm(rest)
    if not np.isfinite(nrm) or nrm < 1e-150:
        raise FockError(f"projection onto outcome {outcome} has negligible probability")
    return outcome, FockState(rest / nrm, list(state.leakage), state.leakage_bound)


# --- cubic phase gate circuit ------------------------------------------------------------


def predicted_cubic_moments(mean_x, mean_p, second_x, gamma_anc, r=np.inf):
    """Output means of the cubic gate circuit on an input with the given moments.

    ``<x_out> = <x>/sqrt(2)`` and ``<p_out> = sqrt(2)<p> + (3 gamma'/2)(<x^2> +
    exp(-2r)/2)``; the last term is the finite-squeezing residual.
    """
    resid = 0.0 if np.isinf(r) else np.exp(-2.0 * r) / 2.0
    return mean_x / np.sqrt(2.0), np.sqrt(2.0) * mean_p + 1.5 * gamma_anc * (second_x + resid)


@dataclass
class CubicPrepared:
    """Three-mode state of the cubic circuit just before the first homodyne.

    Mode order: 0 kept output, 1 HD-1 port, 2 HD-2 port.
    """

    state: FockState
    gamma: float
    r: float


def prepare_cubic_circuit(input_state, gamma, r, N=DEFAULT_CUTOFF, leakage_bound=DEFAULT_LEAKAGE_BOUND):
    """Interfere the input with both ancillae (outcome-independent part)."""
    if input_state.modes != 1 or input_state.cutoff != N:
        raise FockError("input must be a single mode at the circuit cutoff")
    inp = input_state.copy()
    inp.leakage_bound = leakage_bound
    a1 = squeezed(r, N, leakage_bound)
    anc = cubic_ancilla(gamma, r, N, leakage_bound)
    # modes: 0 ancilla 1 (outer port), 1 input (loop port), 2 cubic ancilla
    st = a1.tensor(inp).tensor(anc)
    st.leakage_bound = leakage_bound
    beamsplitter(st, 0.5, 0, 1)  # mode 0 is kept, mode 1 continues
    beamsplitter(st, 0.5, 2, 1)  # mode 2 -> HD-1, mode 1 -> HD-2
    st.amplitudes = np.moveaxis(st.amplitudes, (0, 2, 1), (0, 1, 2))
    return CubicPrepared(st, float(gamma), float(r))


def finish_cubic_circuit(prepared: CubicPrepared, rng=None, q=None, y=None):
    """Homodyne, phase feedforward and displacement.

    Returns:
        ``(output FockState, q, y, phi)``.
    """
    q, rest = homodyne_fock(prepared.state, 1, 0.0, rng=rng, outcome=q)
    phi = float(np.arctan(3.0 * np.sqrt(2.0) * prepared.gamma * q))
    rotate(rest, 1, phi)
    y, out = homodyne_fock(rest, 1, np.pi / 2, rng=rng, outcome=y)
    c = np.cos(phi)
    if abs(c) < 1e-12:
        raise SingularFeedforwardError("cos(phi) = 0 in feedforward")
    displace(out, 0, 0.0, np.sqrt(2.0) * y / c)
    return out, q, y, phi


def run_cubic_circuit(
    input_state, gamma, r, N=DEFAULT_CUTOFF, rng=None, q=None, y=None, leakage_bound=DEFAULT_LEAKAGE_BOUND
):
    """Measurement-induced cubic phase gate on a single-mode Fock state.

    The input meets an x-squeezed ancilla on a 50:50 beam splitter; one
    output meets the cubic ancilla on a second 50:50 beam splitter. HD-1
    measures x there (``q``), the other port is rotated by
    ``phi = arctan(3 sqrt(2) gamma q)`` and HD-2 measures p (``y``). The
    kept mode is displaced in p by ``sqrt(2) y / cos(phi)``. Net effect:
    ``S(ln sqrt(2)) C(gamma / (2 sqrt(2)))``.

    Args:
        input_state: Single-mode ``FockState`` at cutoff ``N``.
        gamma: Ancilla cubicity ``gamma'``.
        r: Ancilla squeezing.
        N: Cutoff.
        rng: Generator for outcomes not fixed by ``q``/``y``.
        q, y: Fixed homodyne outcomes.
        leakage_bound: Per-step leakage bound.

    Returns:
        Output ``FockState``.
    """
    prepared = prepare_cubic_circuit(input_state, gamma, r, N, leakage_bound)
    return finish_cubic_circuit(prepared, rng=rng, q=q, y=y)[0]


@dataclass
class CubicResult:
    gamma: float
    squeezing_r: float
    cutoff: int
    samples: int
    mean_x: float
    mean_p: float
    predicted_x: float
    predicted_p: float
    max_leakage: float
    std_x: float = 0.0
    std_p: float = 0.0

    @property
    def abs_error(self):
        return {"x": abs(self.mean_x - self.predicted_x), "p": abs(self.mean_p - self.predicted_p)}

    def to_dict(self):
        return {
            "gamma": self.gamma,
            "squeezing_r": self.squeezing_r,
            "cutoff": self.cutoff,
            "samples": self.samples,
            "mean_x": self.mean_x,
            "mean_p": self.mean_p,
            "predicted_x": self.predicted_x,
            "predicted_p": self.predicted_p,
            "abs_error": self.abs_error,
            "max_leakage": self.max_leakage,
        }

    def to_json(self, indent=None):
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)


def sample_cubic_circuit(
    input_state,
    gamma,
    r,
    N=DEFAULT_CUTOFF,
    samples=200,
    seed=0,
    predicted=None,
    leakage_bound=DEFAULT_LEAKAGE_BOUND,
):
    """Outcome-averaged output means of the cubic circuit.

    Args:
        predicted: ``(x, p)`` to compare against; defaults to the ideal-ancilla
            prediction for the input's moments.

    Returns:
        CubicResult
    """
    rng = np.random.default_rng(seed)
    prepared = prepare_cubic_circuit(input_state, gamma, r, N, leakage_bound)
    xs, ps = [], []
    leak = prepared.state.max_leakage
    for _ in range(samples):
        out = finish_cubic_circuit(prepared, rng=rng)[0]
        mx, mp, _, _ = mean_quadratures(out, 0)
        xs.append(mx)
        ps.append(mp)
        leak = max(leak, out.max_leakage)
    if predicted is None:
        mx, mp, vx, _ = mean_quadratures(input_state, 0)
        predicted = predicted_cubic_moments(mx, mp, vx + mx**2, gamma)
    return CubicResult(
        gamma=float(gamma),
        squeezing_r=float(r),
        cutoff=int(N),
        samples=int(samples),
        mean_x=float(np.mean(xs)),
        mean_p=float(np.mean(ps)),
        predicted_x=float(predicted[0]),
        predicted_p=float(predicted[1]),
        max_leakage=float(leak),
        std_x=float(np.std(xs)),
        std_p=float(np.std(ps)),
    )


# --- control-program executor --------------------------------------------------------------


class FockBackend(Backend):
    """Runs control programs on pure Fock states (no loss).

    Squeezed ancillae are ``S(r)|0>``; cubic ancillae use ``cubic_ancilla``
    with the schedule's ``gamma``. A bin routed to the detector without a
    measurement is homodyned and its outcome discarded, which is a valid
    unraveling of tracing it out.
    """

    def __init__(self, program, inputs, r, rng=None, outcomes=None, leakage_bound=DEFAULT_LEAKAGE_BOUND):
        if inputs.modes != program.n:
            raise FockError(f"program expects {program.n} inputs, got {inputs.modes} modes")
        self.program = program
        self.N = inputs.cutoff
        self.r = float(r)
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.fixed = dict(outcomes or {})
        self.state = inputs.copy()
        self.state.leakage_bound = leakage_bound
        self.bound = leakage_bound
        self.order = list(range(program.n))  # inputs occupy the first axes from the start
        self.ancillae = {a.bin: a for a in program.ancilla_schedule}
        self.emitted = {}

    def _idx(self, handle):
        return self.order.index(handle)

    def _append(self, single):
        self.state = self.state.tensor(single)
        self.state.leakage_bound = self.bound

    def admit(self, handle, bin_index):
        if bin_index < self.program.n:
            return
        anc = self.ancillae[bin_index]
        if anc.kind == SQUEEZED:
            single = squeezed(self.r, self.N, self.bound)
        elif anc.kind == CUBIC:
            single = cubic_ancilla(float(anc.gamma or 0.0), self.r, self.N, self.bound)
        else:
            raise FockError(f"unknown ancilla kind {anc.kind}")
        self._append(single)
        self.order.append(handle)

    def vacuum(self, handle):
        self._append(vacuum(self.N))
        self.order.append(handle)

    def rotate(self, handle, theta):
        rotate(self.state, self._idx(handle), theta)

    def beamsplitter(self, T, outer, loop):
        beamsplitter(self.state, T, self._idx(outer), self._idx(loop))

    def _remove(self, handle, angle, outcome):
        i = self._idx(handle)
        value, rest = homodyne_fock(self.state, i, angle, rng=self.rng, outcome=outcome)
        self.order.pop(i)
        self.state = rest
        return value

    def measure(self, handle, angle, label):
        return self._remove(handle, angle, self.fixed.get(label))

    def discard(self, handle):
        self._remove(handle, 0.0, None)

    def feedforward(self, handle, quadrature, fn, record):
        amount = float(fn(record))
        dx, dp = (amount, 0.0) if quadrature == "x" else (0.0, amount)
        displace(self.state, self._idx(handle), dx, dp)
        return amount

    def emit(self, handle, output):
        self.emitted[output] = handle

    def output_state(self):
        outputs = [self.emitted[k] for k in sorted(self.emitted)]
        axes = [self._idx(h) for h in outputs]
        if len(axes) != self.state.modes:
            raise FockError("live modes remain that were not emitted")
        st = self.state
        st.amplitudes = np.transpose(st.amplitudes, axes)
        return st


def run_program(
    program: ControlProgram,
    inputs: FockState,
    r: float,
    seed: int | None = 0,
    outcomes: dict | None = None,
    leakage_bound: float = DEFAULT_LEAKAGE_BOUND,
):
    """Execute a control program in the Fock backend.

    Args:
        program: Control program (Gaussian or cubic).
        inputs: ``n``-mode Fock input.
        r: Squeezing parameter of every ancilla.
        seed: Seed for sampled outcomes.
        outcomes: Fixed outcomes by label.
        leakage_bound: Per-step leakage bound.

    Returns:
        ``(output FockState, record)``.
    """
    backend = FockBackend(program, inputs, r, np.random.default_rng(seed), outcomes, leakage_bound)
    _, record, _ = execute(program, backend)
    return backend.output_state(), record
