"""Control programs for the nested-loop machine.

A ``ControlProgram`` is a timeline of events on an integer tick grid where
one tick is one inner-loop round trip. Within a tick, events are applied in
a fixed phase order (see ``PHASE_ORDER``) that mirrors where each component
sits along the optical path:

1. ``FEEDFORWARD`` and ``PHASE1`` act on the pulse completing its inner-loop
   cycle (the modulator and phase shifter 1 are inside the inner loop).
2. ``SWITCH1`` admits a new pulse into, or reads a pulse out of, the outer
   slot arriving at this tick.
3. ``VBS`` couples the arriving outer slot with the inner-loop pulse.
4. ``PHASE2``, ``SWITCH2`` and ``MEASURE`` act on the pulse leaving the VBS
   on the outer path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

FORMAT = "cvloop-program/1"

SWITCH1 = "SWITCH1"
SWITCH2 = "SWITCH2"
VBS = "VBS"
PHASE1 = "PHASE1"
PHASE2 = "PHASE2"
MEASURE = "MEASURE"
FEEDFORWARD = "FEEDFORWARD"

PHASE_ORDER = {
    FEEDFORWARD: 0,
    PHASE1: 1,
    SWITCH1: 2,
    VBS: 3,
    PHASE2: 4,
    SWITCH2: 5,
    MEASURE: 6,
}

SQUEEZED = "SQUEEZED"
CUBIC = "CUBIC"


class ProgramError(ValueError):
    """Malformed control program."""


class SingularFeedforwardError(ArithmeticError):
    """A feedforward function hit ``cos(phi) = 0``."""


class UnrecordedLabelError(KeyError):
    """A dynamic function referenced an outcome that was never recorded."""


def _lookup(record, label):
    try:
        return record[label]
    except KeyError:
        raise UnrecordedLabelError(label) from None


# --- classical control functions ------------------------------------------


@dataclass(frozen=True)
class Affine:
    """``offset + sum(gain * record[label])``."""

    gains: tuple = ()
    offset: float = 0.0

    @classmethod
    def of(cls, gains: Mapping[str, float] | None = None, offset=0.0):
        return cls(tuple((str(k), float(v)) for k, v in (gains or {}).items()), float(offset))

    @property
    def sources(self):
        return tuple(label for label, _ in self.gains)

    def __call__(self, record):
        return self.offset + sum(g * _lookup(record, label) for label, g in self.gains)

    def to_dict(self):
        return {"fn": "affine", "gains": dict(self.gains), "offset": self.offset}


@dataclass(frozen=True)
class ArctanScaled:
    """``arctan(scale * record[source])``; the cubic gate's phase shift."""

    scale: float
    source: str

    @property
    def sources(self):
        return (self.source,)

    def __call__(self, record):
        return float(np.arctan(self.scale * _lookup(record, self.source)))

    def to_dict(self):
        return {"fn": "arctan_scaled", "scale": self.scale, "source": self.source}


@dataclass(frozen=True)
class SecScaled:
    """``scale * record[value] / cos(record[angle])``."""

    scale: float
    sources: tuple = ("y", "phi")

    def __call__(self, record):
        value, angle = (_lookup(record, s) for s in self.sources)
        c = np.cos(angle)
        if abs(c) < 1e-12:
            raise SingularFeedforwardError(f"cos({angle}) = 0 in feedforward")
        return float(self.scale * value / c)

    def to_dict(self):
        return {"fn": "sec_scaled", "scale": self.scale, "sources": list(self.sources)}


def fn_from_dict(data):
    kind = data.get("fn")
    if kind == "affine":
        return Affine.of(data.get("gains", {}), data.get("offset", 0.0))
    if kind == "arctan_scaled":
        return ArctanScaled(float(data["scale"]), str(data["source"]))
    if kind == "sec_scaled":
        return SecScaled(float(data["scale"]), tuple(data["sources"]))
    raise ProgramError(f"unknown control function {kind!r}")


def is_affine(fn):
    return isinstance(fn, Affine)


def _value_to_dict(value):
    return value.to_dict() if hasattr(value, "to_dict") else float(value)


def _value_from_json(value):
    return fn_from_dict(value) if isinstance(value, dict) else float(value)


# --- events -----------------------------------------------------------------

_DYNAMIC_ARGS = {PHASE2: "phi", MEASURE: "angle", FEEDFORWARD: "fn"}


@dataclass(frozen=True)
class Event:
    """One timed control action. ``args`` depends on ``kind``:

    ========== ==============================================================
    SWITCH1    ``mode`` (admit | recirculate | readout), ``bin`` (admit: pulse
               train index; readout: bin handle), ``output`` (readout index)
    SWITCH2    ``route`` (to_detector | to_outer)
    VBS        ``T``
    PHASE1     ``theta``
    PHASE2     ``phi`` (number or function), optional ``label`` to record it
    MEASURE    ``label``, ``angle`` (number or function)
    FEEDFORWARD ``target_bin``, ``quadrature`` (x | p), ``fn``
    ========== ==============================================================
    """

    tick: int
    kind: str
    args: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in PHASE_ORDER:
            raise ProgramError(f"unknown event kind {self.kind!r}")
        object.__setattr__(self, "tick", int(self.tick))
        object.__setattr__(self, "args", dict(self.args))

    def to_dict(self):
        out = {"tick": self.tick, "kind": self.kind}
        for key, value in self.args.items():
            out[key] = _value_to_dict(value) if key in ("phi", "angle", "fn") else value
        return out

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        tick, kind = data.pop("tick"), data.pop("kind")
        for key in ("phi", "angle", "fn"):
            if key in data:
                data[key] = _value_from_json(data[key])
        for key in ("T", "theta"):
            if key in data:
                data[key] = float(data[key])
        return cls(tick, kind, data)

    @property
    def dynamic(self):
        """The control function of this event, if it has one."""
        key = _DYNAMIC_ARGS.get(self.kind)
        value = self.args.get(key) if key else None
        return value if callable(value) else None


def admit(tick, bin):
    return Event(tick, SWITCH1, {"mode": "admit", "bin": int(bin)})


def readout(tick, handle, output):
    return Event(tick, SWITCH1, {"mode": "readout", "bin": int(handle), "output": int(output)})


def vbs(tick, T):
    return Event(tick, VBS, {"T": float(T)})


def phase1(tick, theta):
    return Event(tick, PHASE1, {"theta": float(theta)})


def phase2(tick, phi, label=None):
    args = {"phi": phi}
    if label is not None:
        args["label"] = label
    return Event(tick, PHASE2, args)


def to_detector(tick):
    return Event(tick, SWITCH2, {"route": "to_detector"})


def measure(tick, label, angle):
    return Event(tick, MEASURE, {"label": label, "angle": angle})


def feedforward(tick, target_bin, quadrature, fn):
    if quadrature not in ("x", "p"):
        raise ProgramError(f"quadrature must be 'x' or 'p', got {quadrature!r}")
    return Event(tick, FEEDFORWARD, {"target_bin": int(target_bin), "quadrature": quadrature, "fn": fn})


# --- programs -----------------------------------------------------------------


@dataclass(frozen=True)
class Ancilla:
    """An ancilla pulse in the train. ``squeezing_db`` None defers to the noise config."""

    bin: int
    kind: str = SQUEEZED
    gamma: float | None = None
    squeezing_db: float | None = None

    def to_dict(self):
        out = {"bin": self.bin, "kind": self.kind}
        if self.gamma is not None:
            out["gamma"] = self.gamma
        if self.squeezing_db is not None:
            out["squeezing_db"] = self.squeezing_db
        return out

    @classmethod
    def from_dict(cls, data):
        return cls(int(data["bin"]), data.get("kind", SQUEEZED), data.get("gamma"), data.get("squeezing_db"))


def _sort_key(event):
    return (event.tick, PHASE_ORDER[event.kind])


@dataclass(frozen=True)
class ControlProgram:
    """Timed event schedule for ``n`` input and ``m`` ancilla pulses."""

    n: int
    tau_prime: int
    ancilla_schedule: tuple = ()
    events: tuple = ()
    tau: int = 1

    def __post_init__(self):
        object.__setattr__(self, "ancilla_schedule", tuple(self.ancilla_schedule))
        object.__setattr__(self, "events", tuple(sorted(self.events, key=_sort_key)))

    @property
    def m(self):
        return len(self.ancilla_schedule)

    @property
    def n_ticks(self):
        return self.events[-1].tick + 1 if self.events else 0

    @property
    def is_gaussian(self):
        """No cubic ancillae and only affine (or constant) control functions."""
        if any(a.kind != SQUEEZED for a in self.ancilla_schedule):
            return False
        for ev in self.events:
            fn = ev.dynamic
            if fn is not None and not is_affine(fn):
                return False
            if ev.kind in (PHASE2, MEASURE) and fn is not None:
                return False
        return True

    def of_kind(self, kind):
        return [ev for ev in self.events if ev.kind == kind]

    def to_dict(self):
        return {
            "format": FORMAT,
            "tau": self.tau,
            "tau_prime": self.tau_prime,
            "n": self.n,
            "m": self.m,
            "ancilla_schedule": [a.to_dict() for a in self.ancilla_schedule],
            "events": [ev.to_dict() for ev in self.events],
        }

    def to_json(self, indent=None):
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        if data.get("format") != FORMAT:
            raise ProgramError(f"expected format {FORMAT!r}, got {data.get('format')!r}")
        prog = cls(
            n=int(data["n"]),
            tau_prime=int(data["tau_prime"]),
            ancilla_schedule=[Ancilla.from_dict(a) for a in data.get("ancilla_schedule", [])],
            events=[Event.from_dict(ev) for ev in data.get("events", [])],
            tau=int(data.get("tau", 1)),
        )
        if "m" in data and int(data["m"]) != prog.m:
            raise ProgramError("m does not match the ancilla schedule length")
        return prog

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def replace(self, **changes):
        fields = {
            "n": self.n,
            "tau_prime": self.tau_prime,
            "ancilla_schedule": self.ancilla_schedule,
            "events": self.events,
            "tau": self.tau,
        }
        fields.update(changes)
        return ControlProgram(**fields)
