"""Compile gates into control programs for the nested-loop machine.

Compilation works on a mirror of the machine's register. Each logical mode
(circuit wire) maps to a bin handle, and the builder places events on a
monotone ``(tick, phase)`` cursor, so operations execute in the order they
were requested. The primitives are:

* pick up a logical mode into the inner loop (``VBS(T=1)`` swap when its
  outer slot arrives),
* mix two adjacent logical modes with one mesh element (``PHASE1`` then
  ``VBS(T)``),
* measurement-induced squeezing with a just-in-time ancilla,
* rotations (``PHASE1`` in the loop, ``PHASE2`` on the outer path) and
  constant displacements (``FEEDFORWARD``),
* readout of every logical mode into its output port.
"""

from __future__ import annotations

import numpy as np

from .decomp import EulerForm, GaussianDecomposition, bloch_messiah, euler_single_mode
from .gaussian import SymplecticOp
from .program import (
    CUBIC,
    FEEDFORWARD,
    MEASURE,
    PHASE1,
    PHASE2,
    PHASE_ORDER,
    SQUEEZED,
    SWITCH1,
    SWITCH2,
    VBS,
    Affine,
    Ancilla,
    ArctanScaled,
    ControlProgram,
    Event,
    SecScaled,
)
from .validation import validate

_EPS_ANGLE = 1e-15


class CompileError(ValueError):
    """The requested compilation is not possible."""


class InsufficientAncillaError(CompileError):
    """Fewer ancillae than nonzero squeezers."""


class ConstraintViolationError(CompileError):
    """A computed schedule failed validation (a compiler bug)."""

    def __init__(self, report):
        super().__init__(f"compiled program failed validation: {report.rules}")
        self.report = report


def squeeze_settings(r):
    """``(T0, gain)`` of a measurement-induced ``S(r)`` with ``r >= 0``."""
    R0 = np.exp(-2.0 * r)
    T0 = 1.0 - R0
    return float(T0), float(np.sqrt(T0 / R0))


class _Builder:
    def __init__(self, n, tau_prime, force_phases=False):
        if tau_prime < n:
            raise CompileError(f"tau_prime={tau_prime} cannot hold {n} inputs")
        self.n = n
        self.tau_prime = tau_prime
        self.outer = [None] * tau_prime
        self.loop = None
        self.handle = {}  # logical -> bin handle
        self.next_bin = 0
        self.next_handle = None
        self.cursor = (-1, len(PHASE_ORDER))
        self.events = []
        self.ancillae = []
        self.pending = {}  # logical -> queued rotation not yet emitted
        self.n_labels = 0
        self.force_phases = force_phases

    # -- cursor ----------------------------------------------------------------

    def _when(self, kind, slot=None, predicate=None):
        """Earliest tick at ``kind``'s phase after the cursor meeting the constraints."""
        ph = PHASE_ORDER[kind]
        t = self.cursor[0] if ph > self.cursor[1] else self.cursor[0] + 1
        t = max(t, 0)
        for _ in range(4 * self.tau_prime + 4):
            if (slot is None or t % self.tau_prime == slot) and (predicate is None or predicate(t)):
                return t
            t += 1
        raise CompileError("no tick satisfies the scheduling constraint")

    def _emit(self, tick, kind, args):
        key = (tick, PHASE_ORDER[kind])
        if key <= self.cursor:
            raise CompileError(f"event {kind} at tick {tick} would run before {self.cursor}")
        self.cursor = key
        self.events.append(Event(tick, kind, args))

    def _slot_of(self, logical):
        h = self.handle[logical]
        return self.outer.index(h)

    def _logical_of(self, handle):
        for k, h in self.handle.items():
            if h == handle:
                return k
        return None

    def _empty_slot(self, t):
        return self.outer[t % self.tau_prime] is None

    # -- admission -------------------------------------------------------------

    def admit_inputs(self):
        for k in range(self.n):
            t = self._when(SWITCH1, slot=k)
            self._emit(t, SWITCH1, {"mode": "admit", "bin": self.next_bin})
            self.outer[k] = self.next_bin
            self.handle[k] = self.next_bin
            self.next_bin += 1

    # -- inner loop ------------------------------------------------------------

    def _flush_loop_phase(self, t):
        """Emit the loop pulse's queued rotation at tick ``t`` (before its VBS)."""
        if self.loop is None:
            return
        k = self._logical_of(self.loop)
        if k not in self.pending:
            return
        theta = self.pending.pop(k)
        if abs(theta) > _EPS_ANGLE or self.force_phases:
            self._emit(t, PHASE1, {"theta": float(theta)})

    def _flush_outer_phase(self, logical):
        theta = self.pending.pop(logical, 0.0)
        if abs(theta) <= _EPS_ANGLE:
            return
        t = self._when(PHASE2, slot=self._slot_of(logical))
        self._emit(t, PHASE2, {"phi": float(theta)})

    def pickup(self, logical):
        """Bring ``logical`` into the inner loop."""
        if self.loop is not None and self.loop == self.handle[logical]:
            return
        t = self._when(VBS, slot=self._slot_of(logical))
        self._flush_loop_phase(t)
        s = t % self.tau_prime
        self._emit(t, VBS, {"T": 1.0})
        self.outer[s], self.loop = self.loop, self.outer[s]

    def release(self):
        """Swap the loop pulse into the next empty outer slot."""
        if self.loop is None:
            return
        t = self._when(VBS, predicate=self._empty_slot)
        self._flush_loop_phase(t)
        s = t % self.tau_prime
        self._emit(t, VBS, {"T": 1.0})
        self.outer[s], self.loop = self.loop, None

    # -- gates -----------------------------------------------------------------

    def rotate(self, logical, theta):
        """Queue ``R(theta)`` on ``logical``; emitted before its next interaction."""
        self.pending[logical] = self.pending.get(logical, 0.0) + float(theta)

    def mix(self, i, T, phase):
        """Mesh element on logical ``(i, i + 1)``: phase on ``i`` then ``VBS(T)``."""
        j = i + 1
        self.pickup(i)
        self._flush_outer_phase(j)
        self.rotate(i, phase)
        t = self._when(VBS, slot=self._slot_of(j))
        self._flush_loop_phase(t)
        self._emit(t, VBS, {"T": float(T)})
        # Outer output becomes logical i, loop output logical i + 1.
        self.handle[i], self.handle[j] = self.outer[t % self.tau_prime], self.loop

    def squeeze(self, logical, r):
        """Measurement-induced ``S(r)`` on ``logical`` (x scaled by ``e^-r``)."""
        if r == 0.0:
            return
        if r < 0:
            self.rotate(logical, -np.pi / 2)
            self.squeeze(logical, -r)
            self.rotate(logical, np.pi / 2)
            return
        T0, gain = squeeze_settings(r)
        self.pickup(logical)
        t = self._when(PHASE1, predicate=self._empty_slot)
        self._flush_loop_phase(t)
        s = t % self.tau_prime
        bin_index = self.next_bin
        self.next_bin += 1
        self.ancillae.append(Ancilla(bin_index, SQUEEZED))
        label = f"m{self.n_labels}"
        self.n_labels += 1
        self._emit(t, SWITCH1, {"mode": "admit", "bin": bin_index})
        self._emit(t, VBS, {"T": T0})
        self._emit(t, SWITCH2, {"route": "to_detector"})
        self._emit(t, MEASURE, {"label": label, "angle": float(np.pi / 2)})
        self.outer[s] = None
        self._feedforward(logical, "p", Affine.of({label: gain}))

    def _feedforward(self, logical, quadrature, fn):
        self.pickup(logical)
        if logical in self.pending:
            t = self._when(PHASE1)
            self._flush_loop_phase(t)
        t = self._when(FEEDFORWARD)
        self._emit(t, FEEDFORWARD, {"target_bin": self.handle[logical], "quadrature": quadrature, "fn": fn})

    def displace(self, logical, dx, dp):
        for q, amount in (("x", dx), ("p", dp)):
            if amount != 0.0:
                self._feedforward(logical, q, Affine.of({}, float(amount)))

    # -- finish ----------------------------------------------------------------

    def readout_all(self):
        self.release()
        for k in range(self.n):
            self._flush_outer_phase(k)
        remaining = set(range(self.n))
        while remaining:
            t = self._when(
                SWITCH1,
                predicate=lambda t: self._logical_of(self.outer[t % self.tau_prime]) in remaining,
            )
            s = t % self.tau_prime
            k = self._logical_of(self.outer[s])
            self._emit(t, SWITCH1, {"mode": "readout", "bin": self.outer[s], "output": k})
            self.outer[s] = None
            remaining.discard(k)

    def program(self, ancillae=None):
        return ControlProgram(
            n=self.n,
            tau_prime=self.tau_prime,
            ancilla_schedule=self.ancillae if ancillae is None else ancillae,
            events=self.events,
        )


def _checked(program, m_budget=None):
    report = validate(program, m_budget=m_budget)
    if not report.ok:
        raise ConstraintViolationError(report)
    return program


def compile_single_mode(euler: EulerForm, tau_prime: int | None = None, displacement=None) -> ControlProgram:
    """Program for ``R(theta2) S(r) R(theta1)`` on one input pulse.

    Layout for ``r > 0`` (one ancilla in bin 1): tick 0 picks the input up
    into the inner loop; tick 1 applies ``PHASE1(theta1)``, admits the
    ancilla, interferes it at ``T0 = 1 - exp(-2r)`` and measures p; tick 2
    feeds ``sqrt(T0/R0)`` times the outcome forward onto p, applies
    ``PHASE1(theta2)`` and releases the pulse. With ``r = 0`` no ancilla is
    used and a single ``PHASE1(theta1 + theta2)`` precedes the release.

    Args:
        euler: Euler form with ``r >= 0``.
        tau_prime: Outer-loop length; defaults to ``1 + m``.
        displacement: Optional final ``(dx, dp)``.

    Returns:
        Validated ``ControlProgram``.
    """
    if euler.r < 0:
        raise CompileError("compile_single_mode needs r >= 0")
    m = 1 if euler.r > 0 else 0
    b = _Builder(1, tau_prime or 1 + m, force_phases=True)
    b.admit_inputs()
    b.pickup(0)
    b.rotate(0, euler.theta1)
    b.squeeze(0, euler.r)
    b.rotate(0, euler.theta2)
    if displacement is not None:
        b.displace(0, float(displacement[0]), float(displacement[1]))
    b.readout_all()
    return _checked(b.program())


def compile_gaussian(target, m: int | None = None, tau_prime: int | None = None) -> ControlProgram:
    """Program implementing a Gaussian unitary via Bloch-Messiah.

    Args:
        target: ``SymplecticOp`` or ``2n x 2n`` symplectic matrix.
        m: Ancilla budget, ``#nonzero squeezers <= m <= n``; defaults to ``n``.
        tau_prime: Outer-loop length; defaults to ``n`` plus the number of
            ancillae consumed.

    Returns:
        Validated ``ControlProgram`` consuming one ancilla per nonzero squeezer.

    Raises:
        InsufficientAncillaError: ``m`` below the number of nonzero squeezers.
    """
    op = target if isinstance(target, SymplecticOp) else SymplecticOp(np.asarray(target, float))
    n = op.n_modes
    m = n if m is None else int(m)
    if m > n or m < 0:
        raise CompileError(f"ancilla budget m={m} must satisfy 0 <= m <= n={n}")
    if n == 1:
        euler = euler_single_mode(op.matrix)
        if euler.r > 0 and m < 1:
            raise InsufficientAncillaError("target needs 1 squeezer but the ancilla budget is 0")
        disp = op.displacement if np.any(op.displacement) else None
        return compile_single_mode(euler, tau_prime=tau_prime, displacement=disp)
    dec = bloch_messiah(op)
    if dec.n_squeezers > m:
        raise InsufficientAncillaError(f"target needs {dec.n_squeezers} squeezers but the ancilla budget is {m}")
    return compile_decomposition(dec, tau_prime=tau_prime, m_budget=m)


def compile_decomposition(dec: GaussianDecomposition, tau_prime=None, m_budget=None) -> ControlProgram:
    """Schedule a Bloch-Messiah decomposition: mesh, squeezers, mesh, displacement."""
    n = dec.n_modes
    b = _Builder(n, tau_prime or n + dec.n_squeezers)
    b.admit_inputs()
    _schedule_mesh(b, dec.mesh_in)
    for k, r in enumerate(dec.squeezers):
        b.squeeze(k, float(r))
    _schedule_mesh(b, dec.mesh_out)
    for k in range(n):
        b.displace(k, float(dec.displacement[k]), float(dec.displacement[n + k]))
    b.readout_all()
    return _checked(b.program(), m_budget=m_budget)


def _schedule_mesh(b, mesh):
    for el in mesh.elements:
        b.mix(el.mode, el.T, el.phase)
    for k, phi in enumerate(mesh.phases):
        b.rotate(k, float(phi))


def cubic_ancilla_gamma(gamma_target):
    """Cubicity of the ancilla needed for ``C(gamma_target)``."""
    return 2.0 * np.sqrt(2.0) * float(gamma_target)


def compile_cubic(gamma_target: float, anti_squeeze: bool = False) -> ControlProgram:
    """Program for the measurement-induced cubic phase gate.

    Bins: 0 input, 1 x-squeezed ancilla, 2 cubic ancilla with
    ``gamma' = 2 sqrt(2) gamma_target``. The input meets ancilla 1 on a 50:50
    VBS; the outer output is kept in the outer loop while the loop output
    meets ancilla 2 on a second 50:50 VBS. The outer output of that pass is
    measured in x (label ``q``). The loop output is then swapped out, rotated
    by ``phi = arctan(3 sqrt(2) gamma' q)`` (recorded as ``phi``) and measured
    in p (label ``y``). Finally the kept pulse is picked up and displaced in p
    by ``sqrt(2) y / cos(phi)``.

    Without correction the gate realized is ``S(ln sqrt(2)) C(gamma_target)``.
    ``anti_squeeze`` appends a measurement-induced ``S(-ln sqrt(2))`` that
    consumes one more ancilla (bin 3).

    Args:
        gamma_target: Cubic gate strength.
        anti_squeeze: Cancel the accompanying squeezing.

    Returns:
        Validated ``ControlProgram``.
    """
    g_anc = cubic_ancilla_gamma(gamma_target)
    tau_prime = 4 if anti_squeeze else 3
    b = _Builder(1, tau_prime)
    b.admit_inputs()
    b.pickup(0)
    t = b._when(SWITCH1, predicate=b._empty_slot)
    s = t % tau_prime
    b._emit(t, SWITCH1, {"mode": "admit", "bin": 1})
    b._emit(t, VBS, {"T": 0.5})
    b._emit(t, SWITCH2, {"route": "to_outer"})
    b.outer[s] = 1
    t = b._when(SWITCH1, predicate=b._empty_slot)
    b._emit(t, SWITCH1, {"mode": "admit", "bin": 2})
    b._emit(t, VBS, {"T": 0.5})
    b._emit(t, SWITCH2, {"route": "to_detector"})
    b._emit(t, MEASURE, {"label": "q", "angle": 0.0})
    t = b._when(VBS, predicate=b._empty_slot)
    b._emit(t, VBS, {"T": 1.0})
    b._emit(t, PHASE2, {"phi": ArctanScaled(float(3.0 * np.sqrt(2.0) * g_anc), "q"), "label": "phi"})
    b._emit(t, SWITCH2, {"route": "to_detector"})
    b._emit(t, MEASURE, {"label": "y", "angle": float(np.pi / 2)})
    b.loop = None
    b.next_bin = 3
    b.handle = {0: 1}
    b.ancillae = [Ancilla(1, SQUEEZED), Ancilla(2, CUBIC, gamma=float(g_anc))]
    b._feedforward(0, "p", SecScaled(float(np.sqrt(2.0)), ("y", "phi")))
    if anti_squeeze:
        b.squeeze(0, -float(np.log(np.sqrt(2.0))))
    b.readout_all()
    return _checked(b.program())
