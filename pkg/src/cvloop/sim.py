"""Gaussian simulation of control programs on the loop machine."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import gaussian as g
from .gaussian import IDEAL, GaussianState, SymplecticOp
from .machine import Backend, ExecutionError, execute
from .program import SQUEEZED, Affine, ControlProgram

THRESHOLD_DB = 20.5
LOSS_BUDGET = 0.01


class UnsupportedProgramError(ValueError):
    """The program cannot be handled by the Gaussian simulator."""


@dataclass(frozen=True)
class NoiseConfig:
    """Ancilla squeezing and per-pass transmissions.

    Attributes:
        ancilla_db: Ancilla squeezing in dB below vacuum, or ``IDEAL``.
        eta_in: Transmission of one inner-loop cycle.
        eta_out: Transmission of one outer-loop round trip.
        eta_det: Homodyne detector efficiency.
    """

    ancilla_db: float | str = IDEAL
    eta_in: float = 1.0
    eta_out: float = 1.0
    eta_det: float = 1.0

    def __post_init__(self):
        if self.ancilla_db != IDEAL:
            object.__setattr__(self, "ancilla_db", float(self.ancilla_db))
        for name in ("eta_in", "eta_out", "eta_det"):
            eta = float(getattr(self, name))
            if not 0.0 < eta <= 1.0:
                raise ValueError(f"{name} must be in (0, 1], got {eta}")
            object.__setattr__(self, name, eta)

    @property
    def is_ideal(self):
        return self.ancilla_db == IDEAL and self.eta_in == self.eta_out == self.eta_det == 1.0

    def ancilla_state(self, db=None):
        db = self.ancilla_db if db is None else db
        return g.ideal_squeezed_vacuum() if db == IDEAL else g.squeezed_vacuum(db=db)

    def to_dict(self):
        return {
            "ancilla_db": self.ancilla_db,
            "eta_in": self.eta_in,
            "eta_out": self.eta_out,
            "eta_det": self.eta_det,
        }

    @classmethod
    def from_dict(cls, data):
        known = {k: data[k] for k in ("ancilla_db", "eta_in", "eta_out", "eta_det") if k in data}
        if "loop_loss" in data:
            known.setdefault("eta_in", 1.0 - float(data["loop_loss"]))
        return cls(**known)


# --- backends --------------------------------------------------------------------


class _GaussianBackend(Backend):
    def __init__(self, program, inputs, noise):
        if inputs.n_modes != program.n:
            raise ValueError(f"program expects {program.n} inputs, got {inputs.n_modes} modes")
        for anc in program.ancilla_schedule:
            if anc.kind != SQUEEZED:
                raise UnsupportedProgramError(f"ancilla kind {anc.kind} needs the Fock backend")
        self.program = program
        self.inputs = inputs
        self.noise = noise
        self.ancillae = {a.bin: a for a in program.ancilla_schedule}
        # inputs occupy the first modes from the start so correlations survive
        self.state = inputs
        self.order = list(range(program.n))  # handle of each mode in ``state``
        self.emitted = {}

    def _idx(self, handle):
        return self.order.index(handle)

    def _append(self, handle, mode_state):
        self.state = mode_state if self.state is None else g.product(self.state, mode_state)
        self.order.append(handle)

    def _op(self, op):
        self.state = g.apply(self.state, op)

    def _delete(self, handle):
        i = self._idx(handle)
        self.state = g.delete_mode(self.state, i)
        self.order.pop(i)

    def admit(self, handle, bin_index):
        if bin_index < self.program.n:
            return
        anc = self.ancillae.get(bin_index)
        if anc is None:
            raise ExecutionError("ancilla-schedule", -1, f"bin {bin_index} has no ancilla entry")
        self._append(handle, self.noise.ancilla_state(anc.squeezing_db))

    def vacuum(self, handle):
        self._append(handle, g.vacuum(1))

    def _loss(self, handle, eta):
        if eta < 1.0:
            self.state = g.loss_channel(self.state, self._idx(handle), eta)

    def inner_round_trip(self, handle):
        self._loss(handle, self.noise.eta_in)

    def outer_round_trip(self, handle):
        self._loss(handle, self.noise.eta_out)

    def rotate(self, handle, theta):
        self._op(g.rotation(theta, self._idx(handle), len(self.order)))

    def beamsplitter(self, T, outer, loop):
        self._op(g.beamsplitter(T, self._idx(outer), self._idx(loop), len(self.order)))

    def discard(self, handle):
        self._delete(handle)

    def emit(self, handle, output):
        self.emitted[output] = handle

    def output_state(self):
        outputs = [self.emitted[k] for k in sorted(self.emitted)]
        if len(outputs) != self.program.n:
            raise ExecutionError("output-count", -1, f"{len(outputs)} outputs emitted, expected {self.program.n}")
        return self.state.reduced([self._idx(h) for h in outputs])


class TrajectoryBackend(_GaussianBackend):
    """Samples (or replays) homodyne outcomes and conditions the state."""

    def __init__(self, program, inputs, noise, rng=None, outcomes=None):
        super().__init__(program, inputs, noise)
        self.rng = rng
        self.fixed = dict(outcomes or {})

    def measure(self, handle, angle, label):
        self._loss(handle, self.noise.eta_det)
        i = self._idx(handle)
        fixed = self.fixed.get(label)
        outcome, rest = g.homodyne(self.state, i, angle, rng=self.rng, outcome=fixed)
        self.state = rest
        self.order.pop(i)
        return outcome

    def feedforward(self, handle, quadrature, fn, record):
        amount = float(fn(record))
        angle = 0.0 if quadrature == "x" else np.pi / 2
        self.state = g.feedforward_displace(self.state, self._idx(handle), angle, amount)
        return amount


class DeferredBackend(_GaussianBackend):
    """Unconditional propagation: measurements are deferred to the end.

    A measured mode is frozen in place (never addressed again) and affine
    feedforward becomes the linear map ``q_target += sum(g * pi . r)``
    acting on the joint moments, where ``pi`` selects the measured
    quadrature. This is the measurement-averaged channel, exact for any
    squeezing level.
    """

    def __init__(self, program, inputs, noise):
        super().__init__(program, inputs, noise)
        self.readout_vec = {}

    def measure(self, handle, angle, label):
        self._loss(handle, self.noise.eta_det)
        self.readout_vec[label] = (handle, float(angle))
        return 0.0

    def _quad_vec(self, handle, angle):
        n = len(self.order)
        v = np.zeros(2 * n)
        i = self._idx(handle)
        v[i], v[n + i] = np.cos(angle), np.sin(angle)
        return v

    def feedforward(self, handle, quadrature, fn, record):
        if not isinstance(fn, Affine):
            raise UnsupportedProgramError("deferred propagation needs affine feedforward")
        n = len(self.order)
        i = self._idx(handle)
        target = i if quadrature == "x" else n + i
        F = np.eye(2 * n)
        for label, gain in fn.gains:
            if label not in self.readout_vec:
                raise ExecutionError("feedforward-source", -1, f"label {label!r} was never recorded")
            F[target] += gain * self._quad_vec(*self.readout_vec[label])
        s = self.state
        mean = F @ s.mean
        mean[target] += fn.offset
        inf = None if s.inf_cov is None else F @ s.inf_cov @ F.T
        self.state = GaussianState(mean, F @ s.cov @ F.T, inf)
        return fn.offset

    def discard(self, handle):
        pass


# --- running ---------------------------------------------------------------------


@dataclass
class Transcript:
    """Per-tick log of one run plus its outcomes and output state."""

    seed: int | None
    ticks: list
    outcomes: dict
    output_state: GaussianState | None = None
    record: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "format": "cvloop-transcript/1",
            "seed": self.seed,
            "ticks": [t.to_dict() for t in self.ticks],
            "outcomes": dict(self.outcomes),
            "output_state": None if self.output_state is None else self.output_state.to_dict(),
        }

    def to_json(self, indent=None):
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)


def _resolve_inputs(program, inputs):
    if inputs is None:
        return g.vacuum(program.n)
    return inputs


def run(
    program: ControlProgram,
    inputs: GaussianState | None = None,
    noise: NoiseConfig | None = None,
    seed: int | None = 0,
    outcomes: dict | None = None,
):
    """Execute ``program`` on Gaussian inputs.

    Args:
        program: Control program.
        inputs: ``n``-mode input state; vacuum if None.
        noise: Noise configuration; ideal if None.
        seed: Seed for homodyne sampling.
        outcomes: Fixed outcomes by label; labels not listed are sampled.

    Returns:
        ``(output_state, transcript)``.

    Raises:
        ExecutionError: an event addressed an empty position or an
            unrecorded label.
    """
    noise = noise or NoiseConfig()
    inputs = _resolve_inputs(program, inputs)
    rng = np.random.default_rng(seed)
    backend = TrajectoryBackend(program, inputs, noise, rng=rng, outcomes=outcomes)
    _, record, ticks = execute(program, backend, log=True)
    out = backend.output_state()
    measured = {ev.args["label"] for ev in program.events if ev.kind == "MEASURE"}
    transcript = Transcript(seed, ticks, {k: record[k] for k in record if k in measured}, out, record)
    return out, transcript


@dataclass(frozen=True)
class GaussianChannel:
    """Affine channel: ``mean -> A mean + d`` and ``cov -> A cov A^T + N``."""

    transfer: np.ndarray
    noise: np.ndarray
    displacement: np.ndarray
    unbounded: bool = False

    @property
    def n_modes(self):
        return self.transfer.shape[0] // 2

    @property
    def noise_norm(self):
        return float("inf") if self.unbounded else float(np.linalg.norm(self.noise))

    def is_physical(self, tol=1e-9):
        """Complete positivity ``N + i/2 (Omega - A Omega A^T) >= 0``."""
        if self.unbounded:
            return True
        om = g.omega(self.n_modes)
        A = self.transfer
        M = self.noise + 0.5j * (om - A @ om @ A.T)
        return bool(np.linalg.eigvalsh(0.5 * (M + M.conj().T)).min() >= -tol)

    def to_dict(self):
        return {
            "A": self.transfer.tolist(),
            "N": self.noise.tolist(),
            "d": self.displacement.tolist(),
            "noise_norm": self.noise_norm,
        }


def _deferred_output(program, inputs, noise):
    backend = DeferredBackend(program, inputs, noise)
    execute(program, backend)
    return backend.output_state()


def extract_channel(program: ControlProgram, noise: NoiseConfig | None = None) -> GaussianChannel:
    """Channel induced by a Gaussian program.

    ``A`` and ``d`` come from propagating the ``2n`` unit mean vectors and
    the zero vector; ``N`` is the vacuum-input output covariance minus
    ``A A^T / 2``. Measurements are handled by deferred propagation, so the
    result is the outcome-averaged channel.

    Raises:
        UnsupportedProgramError: the program has non-affine control or
            non-Gaussian ancillae.
    """
    if not program.is_gaussian:
        raise UnsupportedProgramError("program is not Gaussian (cubic ancilla or non-affine control)")
    noise = noise or NoiseConfig()
    n = program.n
    base = _deferred_output(program, g.vacuum(n), noise)
    d = base.mean.copy()
    A = np.zeros((2 * n, 2 * n))
    for k in range(2 * n):
        mean = np.zeros(2 * n)
        mean[k] = 1.0
        out = _deferred_output(program, GaussianState(mean, g.VACUUM_VARIANCE * np.eye(2 * n)), noise)
        A[:, k] = out.mean - d
    N = base.cov - g.VACUUM_VARIANCE * A @ A.T
    N = 0.5 * (N + N.T)
    return GaussianChannel(A, N, d, unbounded=base.is_ideal)


@dataclass
class VerifyReport:
    transfer_error: float
    displacement_error: float
    noise_norm: float
    transfer_tol: float
    noise_tol: float
    channel: GaussianChannel

    @property
    def passed(self):
        return (
            self.transfer_error < self.transfer_tol
            and self.displacement_error < self.transfer_tol
            and self.noise_norm < self.noise_tol
        )

    def to_dict(self):
        return {
            "transfer_error": self.transfer_error,
            "displacement_error": self.displacement_error,
            "noise_norm": self.noise_norm,
            "pass": self.passed,
            "thresholds": {"transfer_tol": self.transfer_tol, "noise_tol": self.noise_tol},
            "channel": self.channel.to_dict(),
        }


def default_tolerances(noise: NoiseConfig):
    """``(transfer_tol, noise_tol)``: tight for ideal runs, loose otherwise."""
    return (1e-8, 1e-9) if noise.is_ideal else (1e-4, 1e-4)


def verify(program, target, noise=None, transfer_tol=None, noise_tol=None) -> VerifyReport:
    """Compare the channel of ``program`` with a target Gaussian unitary.

    Args:
        program: Gaussian control program.
        target: ``SymplecticOp`` or symplectic matrix.
        noise: Noise configuration; ideal if None.
        transfer_tol: Bound on ``||A - S||_F`` (and the displacement error).
        noise_tol: Bound on ``||N||_F``.

    Returns:
        VerifyReport
    """
    noise = noise or NoiseConfig()
    op = target if isinstance(target, SymplecticOp) else SymplecticOp(np.asarray(target, float))
    if op.n_modes != program.n:
        raise ValueError(f"target acts on {op.n_modes} modes, program on {program.n}")
    dt, dn = default_tolerances(noise)
    ch = extract_channel(program, noise)
    return VerifyReport(
        transfer_error=float(np.linalg.norm(ch.transfer - op.matrix)),
        displacement_error=float(np.linalg.norm(ch.displacement - op.displacement)),
        noise_norm=ch.noise_norm,
        transfer_tol=dt if transfer_tol is None else float(transfer_tol),
        noise_tol=dn if noise_tol is None else float(noise_tol),
        channel=ch,
    )


def effective_variance(ancilla_db, eta, round_trips):
    """x-variance of an ancilla after ``round_trips`` passes at transmission ``eta``."""
    var = 0.0 if ancilla_db == IDEAL else g.db_to_variance(float(ancilla_db))
    t = eta ** int(round_trips)
    return t * var + (1.0 - t) * g.VACUUM_VARIANCE


def noise_budget(noise: NoiseConfig, round_trips: int = 1) -> dict:
    """Effective ancilla squeezing after loop losses, against the GKP threshold.

    Args:
        noise: Supplies the ancilla squeezing and the inner-loop loss.
        round_trips: Number of loop passes the ancilla makes.

    Returns:
        dict with ``effective_squeezing_db``, ``threshold_db``,
        ``meets_threshold``, ``loss_per_round_trip`` and ``loss_budget_ok``.
    """
    if round_trips < 0:
        raise ValueError("round_trips must be non-negative")
    var = effective_variance(noise.ancilla_db, noise.eta_in, round_trips)
    eff = float("inf") if var == 0.0 else float(g.variance_to_db(var))
    loss = 1.0 - noise.eta_in
    return {
        "ancilla_db": noise.ancilla_db,
        "round_trips": int(round_trips),
        "effective_squeezing_db": eff,
        "threshold_db": THRESHOLD_DB,
        "meets_threshold": bool(eff >= THRESHOLD_DB - 1e-9),
        "loss_per_round_trip": loss,
        "loss_budget_ok": bool(loss < LOSS_BUDGET),
    }
