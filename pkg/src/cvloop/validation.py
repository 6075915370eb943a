"""Hardware-constraint checks for control programs."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .machine import Backend, execute
from .program import FEEDFORWARD, MEASURE, PHASE2, SQUEEZED, SWITCH1, VBS, ControlProgram


@dataclass(frozen=True)
class Violation:
    rule: str
    tick: int
    message: str

    def to_dict(self):
        return {"rule": self.rule, "tick": self.tick, "message": self.message}


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    @property
    def rules(self):
        return sorted({v.rule for v in self.violations})

    def add(self, rule, tick, message):
        self.violations.append(Violation(rule, int(tick), message))

    def to_dict(self):
        return {"ok": self.ok, "violations": [v.to_dict() for v in self.violations]}

    def __bool__(self):
        return self.ok


class _SymbolicBackend(Backend):
    """Tracks nothing quantum; every outcome reads as zero."""

    def __init__(self, report):
        self.report = report

    def admit(self, handle, bin_index):
        pass

    def vacuum(self, handle):
        pass

    def rotate(self, handle, theta):
        pass

    def beamsplitter(self, T, outer, loop):
        pass

    def flip(self, handle):
        pass

    def measure(self, handle, angle, label):
        return 0.0

    def discard(self, handle):
        pass

    def feedforward(self, handle, quadrature, fn, record):
        return float(fn(record))

    def violation(self, rule, tick, message):
        self.report.add(rule, tick, message)


def _produced_labels(program):
    """label -> tick for MEASURE outcomes and labelled PHASE2 values."""
    out = {}
    for ev in program.events:
        if ev.kind == MEASURE or (ev.kind == PHASE2 and ev.args.get("label")):
            out.setdefault(ev.args["label"], ev.tick)
    return out


def validate(program: ControlProgram, m_budget: int | None = None) -> ValidationReport:
    """Check ``program`` against the machine's constraints.

    Static checks cover tick order, one VBS and one SWITCH1 action per tick,
    unique labels, the ancilla schedule, causality of every control function
    and the ancilla budget. A symbolic run then checks that every switch,
    measurement and feedforward addresses an occupied position, and that
    exactly ``n`` outputs are read out.

    Args:
        program: Program to check.
        m_budget: Optional cap on the number of ancillae.

    Returns:
        ``ValidationReport`` listing every violation found.
    """
    report = ValidationReport()
    if program.tau_prime < 1:
        report.add("outer-loop-capacity", 0, "tau_prime must be at least 1")
        return report
    if program.n + program.m > program.tau_prime:
        report.add(
            "outer-loop-capacity",
            0,
            f"{program.n} inputs and {program.m} ancillae exceed tau_prime = {program.tau_prime}",
        )
    if m_budget is not None and program.m > m_budget:
        report.add("ancilla-bound", 0, f"{program.m} ancillae exceed the budget of {m_budget}")
    if program.is_gaussian and program.m > program.n:
        report.add("ancilla-bound", 0, f"Gaussian program uses {program.m} ancillae for {program.n} inputs")

    bins = [a.bin for a in program.ancilla_schedule]
    expected = set(range(program.n, program.n + program.m))
    if len(set(bins)) != len(bins) or set(bins) != expected:
        report.add("ancilla-schedule", 0, f"ancilla bins {bins} must be a permutation of {sorted(expected)}")
    for a in program.ancilla_schedule:
        if a.kind not in (SQUEEZED, "CUBIC"):
            report.add("ancilla-schedule", 0, f"unknown ancilla kind {a.kind!r}")

    for ev in program.events:
        if ev.tick < 0:
            report.add("tick-order", ev.tick, "negative tick")
    for kind, rule in ((VBS, "vbs-conflict"), (SWITCH1, "switch1-conflict")):
        counts = Counter(ev.tick for ev in program.events if ev.kind == kind)
        for tick, c in sorted(counts.items()):
            if c > 1:
                report.add(rule, tick, f"{c} {kind} events in one tick")

    labels = Counter(
        ev.args.get("label")
        for ev in program.events
        if ev.kind == MEASURE or (ev.kind == PHASE2 and ev.args.get("label"))
    )
    for label, c in sorted(labels.items()):
        if c > 1:
            report.add("duplicate-label", 0, f"label {label!r} is produced {c} times")

    produced = _produced_labels(program)
    for ev in program.events:
        fn = ev.dynamic
        if fn is None:
            continue
        for src in fn.sources:
            if src not in produced:
                report.add("feedforward-source", ev.tick, f"{ev.kind} reads label {src!r} that is never produced")
                continue
            at = produced[src]
            # A same-tick PHASE2 label may feed the following measurement's angle.
            same_tick_ok = ev.kind == MEASURE and at == ev.tick
            if at > ev.tick or (at == ev.tick and not same_tick_ok and ev.kind == FEEDFORWARD):
                report.add(
                    "feedforward-delay", ev.tick, f"{ev.kind} at tick {ev.tick} reads {src!r} produced at tick {at}"
                )

    static_rules = {v.rule for v in report.violations}
    if static_rules & {"feedforward-source", "feedforward-delay"}:
        return report

    reg, _, _ = execute(program, _SymbolicBackend(report))
    outputs = sorted(reg.emitted)
    if outputs != list(range(program.n)):
        report.add(
            "output-count", program.n_ticks, f"read out outputs {outputs}, expected 0..{program.n - 1}"
        )
    return report
