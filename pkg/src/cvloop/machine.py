"""Tick-by-tick execution of control programs over a pluggable backend.

The executor owns the bookkeeping of where every pulse is: which outer-loop
slot holds which bin, which bin is in the inner loop, and what has been
emitted. Bins are identified by integer handles. Admitted pulses use their
train index as a handle. A VBS with ``0 < T < 1`` and an empty port couples
in a fresh vacuum mode that gets the next unused handle. ``T = 1`` swaps the
two handles exactly and ``T = 0`` leaves them in place.

A backend implements the quantum side (see ``Backend``). Rule violations go
to ``backend.violation`` so a validator can collect them while a simulator
raises.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .program import (
    FEEDFORWARD,
    MEASURE,
    PHASE1,
    PHASE2,
    SWITCH1,
    SWITCH2,
    VBS,
    ControlProgram,
    UnrecordedLabelError,
)


class ExecutionError(RuntimeError):
    """A program addressed an empty or inconsistent position while running."""

    def __init__(self, rule, tick, message):
        super().__init__(f"tick {tick}: [{rule}] {message}")
        self.rule = rule
        self.tick = tick


class Backend:
    """Quantum-side hooks. Handles are opaque integers chosen by the executor."""

    def admit(self, handle, bin_index):
        raise NotImplementedError

    def vacuum(self, handle):
        raise NotImplementedError

    def inner_round_trip(self, handle):
        """Loss of one inner-loop cycle."""

    def outer_round_trip(self, handle):
        """Loss of one outer-loop cycle."""

    def rotate(self, handle, theta):
        raise NotImplementedError

    def beamsplitter(self, T, outer, loop):
        raise NotImplementedError

    def flip(self, handle):
        """Pi phase picked up by the outer port at ``T = 0``."""
        self.rotate(handle, 3.141592653589793)

    def measure(self, handle, angle, label):
        """Homodyne the bin at quadrature ``angle`` and return the outcome."""
        raise NotImplementedError

    def discard(self, handle):
        raise NotImplementedError

    def feedforward(self, handle, quadrature, fn, record):
        """Displace ``quadrature`` of the bin by ``fn(record)``; return the amount."""
        raise NotImplementedError

    def emit(self, handle, output):
        """The bin left the machine as output ``output``."""

    def violation(self, rule, tick, message):
        raise ExecutionError(rule, tick, message)


@dataclass
class PulseRegister:
    """Positions of all live bins."""

    tau_prime: int
    outer: list = field(default_factory=list)
    loop: int | None = None
    emitted: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.outer:
            self.outer = [None] * self.tau_prime

    def snapshot(self):
        return {"outer": list(self.outer), "loop": self.loop}


@dataclass
class TickLog:
    tick: int
    events: list
    positions: dict

    def to_dict(self):
        return {"tick": self.tick, "events": self.events, "positions": self.positions}


def execute(program: ControlProgram, backend: Backend, log: bool = False):
    """Run ``program`` on ``backend``.

    Args:
        program: Control program.
        backend: Quantum backend.
        log: Collect a per-tick transcript.

    Returns:
        ``(register, record, ticks)``: final positions, measurement and
        labelled-phase record, and the transcript (empty unless ``log``).
    """
    tau_p = program.tau_prime
    if tau_p < 1:
        backend.violation("outer-loop-capacity", 0, "tau_prime must be at least 1")
        return PulseRegister(1), {}, []
    reg = PulseRegister(tau_p)
    record: dict = {}
    ticks: list = []
    next_bin = 0
    n_train = program.n + program.m
    next_handle = n_train
    by_tick: dict = {}
    for ev in program.events:
        by_tick.setdefault(ev.tick, []).append(ev)

    for t in range(program.n_ticks):
        evs = by_tick.get(t, [])
        s = t % tau_p
        entries = []
        if reg.loop is not None:
            backend.inner_round_trip(reg.loop)
        if reg.outer[s] is not None:
            backend.outer_round_trip(reg.outer[s])
        detector = False
        measured = False

        for ev in evs:
            a = ev.args
            entry = {"kind": ev.kind}
            if ev.kind == FEEDFORWARD:
                target = reg.loop
                if target is None or target != a.get("target_bin"):
                    backend.violation(
                        "feedforward-target", t, f"bin {a.get('target_bin')} is not in the inner loop (holds {target})"
                    )
                    continue
                try:
                    amount = backend.feedforward(target, a["quadrature"], a["fn"], record)
                except UnrecordedLabelError as exc:
                    backend.violation("feedforward-source", t, f"label {exc.args[0]!r} was never recorded")
                    continue
                entry.update(bin=target, quadrature=a["quadrature"], amount=amount)
            elif ev.kind == PHASE1:
                if reg.loop is not None:
                    backend.rotate(reg.loop, a["theta"])
                entry.update(bin=reg.loop, theta=a["theta"])
            elif ev.kind == SWITCH1:
                mode = a.get("mode")
                if mode == "admit":
                    if reg.outer[s] is not None:
                        backend.violation("admit-occupied", t, f"outer slot {s} is occupied by bin {reg.outer[s]}")
                        continue
                    if a.get("bin") != next_bin or next_bin >= n_train:
                        backend.violation(
                            "admit-order", t, f"admitted bin {a.get('bin')} but the next train pulse is {next_bin}"
                        )
                        continue
                    backend.admit(next_bin, next_bin)
                    reg.outer[s] = next_bin
                    next_bin += 1
                    entry.update(bin=reg.outer[s])
                elif mode == "readout":
                    h = reg.outer[s]
                    if h is None or h != a.get("bin"):
                        backend.violation("readout-empty", t, f"readout of bin {a.get('bin')} but slot {s} holds {h}")
                        continue
                    out = int(a.get("output", len(reg.emitted)))
                    backend.emit(h, out)
                    reg.emitted[out] = h
                    reg.outer[s] = None
                    entry.update(bin=h, output=out)
                elif mode != "recirculate":
                    backend.violation("switch1-mode", t, f"unknown SWITCH1 mode {mode!r}")
                    continue
            elif ev.kind == VBS:
                T = float(a["T"])
                if not 0.0 <= T <= 1.0:
                    backend.violation("vbs-range", t, f"transmissivity {T} outside [0, 1]")
                    continue
                o, lp = reg.outer[s], reg.loop
                if T == 1.0:
                    reg.outer[s], reg.loop = lp, o
                elif T == 0.0:
                    if o is not None:
                        backend.flip(o)
                else:
                    if o is None and lp is None:
                        pass
                    else:
                        if o is None:
                            o = next_handle
                            next_handle += 1
                            backend.vacuum(o)
                        if lp is None:
                            lp = next_handle
                            next_handle += 1
                            backend.vacuum(lp)
                        backend.beamsplitter(T, o, lp)
                        reg.outer[s], reg.loop = o, lp
                entry.update(T=T, outer=reg.outer[s], loop=reg.loop)
            elif ev.kind == PHASE2:
                h = reg.outer[s]
                phi = a["phi"]
                try:
                    value = phi(record) if callable(phi) else float(phi)
                except UnrecordedLabelError as exc:
                    backend.violation("feedforward-source", t, f"label {exc.args[0]!r} was never recorded")
                    continue
                if h is not None:
                    backend.rotate(h, value)
                if a.get("label"):
                    record[a["label"]] = value
                entry.update(bin=h, phi=value)
            elif ev.kind == SWITCH2:
                if a.get("route") == "to_detector":
                    detector = True
                entry.update(route=a.get("route"))
            elif ev.kind == MEASURE:
                h = reg.outer[s]
                if not detector:
                    backend.violation("measure-without-switch", t, "MEASURE without SWITCH2 to_detector")
                    continue
                if h is None:
                    backend.violation("measure-empty", t, f"outer slot {s} is empty at measurement")
                    continue
                angle = a["angle"]
                try:
                    value = angle(record) if callable(angle) else float(angle)
                except UnrecordedLabelError as exc:
                    backend.violation("feedforward-source", t, f"label {exc.args[0]!r} was never recorded")
                    continue
                outcome = backend.measure(h, value, a["label"])
                record[a["label"]] = outcome
                reg.outer[s] = None
                measured = True
                entry.update(bin=h, label=a["label"], angle=value, outcome=outcome)
            entries.append(entry)

        if detector and not measured and reg.outer[s] is not None:
            backend.discard(reg.outer[s])
            reg.outer[s] = None
        if log and entries:
            ticks.append(TickLog(t, entries, reg.snapshot()))

    return reg, record, ticks
