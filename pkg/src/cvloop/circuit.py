"""Gate-level circuits and their JSON file format."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import gaussian as g
from .compiler import compile_cubic, compile_gaussian
from .decomp import unitary_to_passive_symplectic
from .gaussian import GaussianState, SymplecticOp

FORMAT = "cvloop-circuit/1"


class CircuitError(ValueError):
    """Malformed circuit or circuit file."""


@dataclass(frozen=True)
class Rotation:
    mode: int
    theta: float


@dataclass(frozen=True)
class Squeeze:
    """``S(r)`` with ``r >= 0``; express p-squeezing through rotations."""

    mode: int
    r: float


@dataclass(frozen=True)
class BeamSplitter:
    """Loop mesh element on ``(i, j)``: phase on ``i``, then transmissivity ``T``.

    Mode unitary ``[[sqrt(T) e^{i phase}, -sqrt(1-T)], [sqrt(1-T) e^{i phase}, sqrt(T)]]``.
    """

    i: int
    j: int
    T: float
    phase: float = 0.0


@dataclass(frozen=True)
class Displace:
    mode: int
    dx: float = 0.0
    dp: float = 0.0


@dataclass(frozen=True)
class CubicPhase:
    """``C(gamma)``: ``p -> p + 3 gamma x^2``."""

    mode: int
    gamma: float


Instruction = Union[Rotation, Squeeze, BeamSplitter, Displace, CubicPhase]

_OPS = {
    "rotation": (Rotation, ("mode", "theta")),
    "squeeze": (Squeeze, ("mode", "r")),
    "beamsplitter": (BeamSplitter, ("i", "j", "T", "phase")),
    "displace": (Displace, ("mode", "dx", "dp")),
    "cubic": (CubicPhase, ("mode", "gamma")),
}
_NAMES = {cls: name for name, (cls, _) in _OPS.items()}


@dataclass(frozen=True)
class CircuitIR:
    n_inputs: int
    instructions: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "instructions", tuple(self.instructions))
        if self.n_inputs < 1:
            raise CircuitError("a circuit needs at least one input")
        for ins in self.instructions:
            modes = (ins.i, ins.j) if isinstance(ins, BeamSplitter) else (ins.mode,)
            for m in modes:
                if not 0 <= m < self.n_inputs:
                    raise CircuitError(f"mode {m} out of range in {ins}")
            if isinstance(ins, BeamSplitter):
                if ins.i == ins.j:
                    raise CircuitError("beam splitter needs two distinct modes")
                if not 0.0 <= ins.T <= 1.0:
                    raise CircuitError(f"beam splitter T={ins.T} outside [0, 1]")
            if isinstance(ins, Squeeze) and ins.r < 0:
                raise CircuitError("squeeze r must be >= 0; use rotations for p-squeezing")

    @property
    def is_gaussian(self):
        return not any(isinstance(ins, CubicPhase) for ins in self.instructions)

    def symplectic(self) -> SymplecticOp:
        """Composite Gaussian unitary of the circuit."""
        if not self.is_gaussian:
            raise CircuitError("circuit contains a cubic phase gate")
        n = self.n_inputs
        op = SymplecticOp(np.eye(2 * n))
        for ins in self.instructions:
            op = _gate(ins, n) @ op
        return op

    def to_dict(self):
        out = []
        for ins in self.instructions:
            name = _NAMES[type(ins)]
            out.append({"op": name, **{k: getattr(ins, k) for k in _OPS[name][1]}})
        return {"format": FORMAT, "n_inputs": self.n_inputs, "instructions": out}


def _gate(ins, n):
    if isinstance(ins, Rotation):
        return g.rotation(ins.theta, ins.mode, n)
    if isinstance(ins, Squeeze):
        return g.squeezer(ins.r, ins.mode, n)
    if isinstance(ins, Displace):
        return g.displacement(ins.dx, ins.dp, ins.mode, n)
    t, rr = np.sqrt(ins.T), np.sqrt(1.0 - ins.T)
    e = np.exp(1j * ins.phase)
    U = np.eye(n, dtype=complex)
    U[np.ix_([ins.i, ins.j], [ins.i, ins.j])] = [[t * e, -rr], [rr * e, t]]
    return SymplecticOp(unitary_to_passive_symplectic(U))


def instruction_from_dict(data):
    data = dict(data)
    name = data.pop("op", None)
    if name not in _OPS:
        raise CircuitError(f"unknown op {name!r}")
    cls, fields = _OPS[name]
    unknown = set(data) - set(fields)
    if unknown:
        raise CircuitError(f"unknown arguments {sorted(unknown)} for {name}")
    try:
        kwargs = {k: (int(v) if k in ("mode", "i", "j") else float(v)) for k, v in data.items()}
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise CircuitError(f"bad arguments for {name}: {exc}") from None


def parse_input_state(spec, n):
    """Input state from ``"vacuum"``, ``{mean, cov}`` or ``{coherent: [[x, p], ...]}``."""
    if spec is None or spec == "vacuum":
        return g.vacuum(n)
    if isinstance(spec, dict) and "coherent" in spec:
        pts = np.asarray(spec["coherent"], dtype=float).reshape(-1, 2)
        if len(pts) != n:
            raise CircuitError(f"{len(pts)} coherent amplitudes for {n} inputs")
        return g.product(*(g.coherent(x, p) for x, p in pts))
    if isinstance(spec, dict) and "mean" in spec:
        st = GaussianState(np.asarray(spec["mean"], float), np.asarray(spec["cov"], float))
        if st.n_modes != n:
            raise CircuitError(f"input state has {st.n_modes} modes, circuit {n}")
        return st
    raise CircuitError(f"unrecognized input_state {spec!r}")


@dataclass(frozen=True)
class CircuitFile:
    circuit: CircuitIR
    input_state: GaussianState
    input_spec: object = "vacuum"

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict) or data.get("format") != FORMAT:
            raise CircuitError(f"expected a {FORMAT!r} document")
        try:
            n = int(data["n_inputs"])
            ins = [instruction_from_dict(d) for d in data.get("instructions", [])]
        except KeyError as exc:
            raise CircuitError(f"missing field {exc}") from None
        circuit = CircuitIR(n, ins)
        spec = data.get("input_state", "vacuum")
        return cls(circuit, parse_input_state(spec, n), spec)

    @classmethod
    def from_json(cls, text):
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise CircuitError(f"invalid JSON: {exc}") from None

    def to_dict(self):
        out = self.circuit.to_dict()
        out["input_state"] = self.input_spec
        return out


def compile_circuit(circuit: CircuitIR, m: int | None = None):
    """Compile a circuit: Gaussian circuits via Bloch-Messiah, a lone cubic gate directly.

    A non-Gaussian circuit must be a single ``CubicPhase`` on one mode; it
    compiles with the accompanying squeezing cancelled.
    """
    if circuit.is_gaussian:
        return compile_gaussian(circuit.symplectic(), m=m)
    if circuit.n_inputs != 1 or len(circuit.instructions) != 1:
        raise CircuitError("only a single-mode circuit holding one cubic gate is supported")
    return compile_cubic(circuit.instructions[0].gamma, anti_squeeze=True)
