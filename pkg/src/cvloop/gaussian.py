"""Gaussian-state calculus in the xxpp quadrature ordering.

Conventions: ``[x, p] = i`` so the vacuum covariance is ``I/2``, and the
symplectic form is ``Omega = [[0, I], [-I, 0]]``. Quadrature vectors are
ordered ``(x_1, ..., x_n, p_1, ..., p_n)``.

Infinitely squeezed ("IDEAL") ancillae are represented exactly through an
extra matrix ``inf_cov``: the covariance is understood as
``cov + lambda * inf_cov`` in the limit ``lambda -> infinity``. All
operations below propagate that limit analytically, so measurement-induced
gates with IDEAL ancillae reproduce their ideal input-output relations to
machine precision.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

IDEAL = "ideal"

VACUUM_VARIANCE = 0.5

# Entries of inf_cov below this are rounding residue of exact cancellation.
_INF_ATOL = 1e-12


class GaussianError(ValueError):
    """Invalid argument to a Gaussian-state operation."""


class DegenerateMeasurementError(GaussianError):
    """Homodyne on a quadrature with zero marginal variance."""


def omega(n_modes):
    """Symplectic form for ``n_modes`` modes in xxpp ordering."""
    eye = np.eye(n_modes)
    zero = np.zeros((n_modes, n_modes))
    return np.block([[zero, eye], [-eye, zero]])


def _freeze(arr):
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Mean vector and covariance matrix over ``n_modes`` modes.

    ``inf_cov`` is ``None`` for ordinary states. It is nonzero only while a
    state still carries unbounded variance from an IDEAL ancilla.
    """

    mean: np.ndarray
    cov: np.ndarray
    inf_cov: np.ndarray | None = None

    def __post_init__(self):
        mean = _freeze(self.mean).reshape(-1)
        cov = _freeze(self.cov)
        if mean.size % 2 or cov.shape != (mean.size, mean.size):
            raise GaussianError(
                f"inconsistent shapes: mean {mean.shape}, cov {cov.shape}"
            )
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        inf = self.inf_cov
        if inf is not None:
            inf = np.array(inf, dtype=float)
            if inf.shape != cov.shape:
                raise GaussianError("inf_cov must match cov in shape")
            inf[np.abs(inf) < _INF_ATOL] = 0.0
            inf = _freeze(inf) if np.any(inf) else None
        object.__setattr__(self, "inf_cov", inf)

    @property
    def n_modes(self):
        return self.mean.size // 2

    @property
    def is_ideal(self):
        """True while any unbounded (IDEAL) variance remains."""
        return self.inf_cov is not None

    def mode_moments(self, mode):
        """Return ``(mean_x, mean_p, var_x, var_p)`` of one mode."""
        i, j = mode, self.n_modes + mode
        return self.mean[i], self.mean[j], self.cov[i, i], self.cov[j, j]

    def reduced(self, modes: Sequence[int]):
        """State restricted to ``modes`` (in the given order)."""
        idx = _quad_indices(self.n_modes, modes)
        inf = None if self.inf_cov is None else self.inf_cov[np.ix_(idx, idx)]
        return GaussianState(self.mean[idx], self.cov[np.ix_(idx, idx)], inf)

    def to_dict(self):
        out = {
            "n_modes": self.n_modes,
            "mean": self.mean.tolist(),
            "cov": self.cov.tolist(),
        }
        if self.inf_cov is not None:
            out["inf_cov"] = self.inf_cov.tolist()
        return out

    @classmethod
    def from_dict(cls, data):
        mean = np.asarray(data["mean"], dtype=float)
        cov = np.asarray(data["cov"], dtype=float)
        if "n_modes" in data and 2 * int(data["n_modes"]) != mean.size:
            raise GaussianError("n_modes does not match mean length")
        return cls(mean, cov, data.get("inf_cov"))

    def to_json(self):
        return json.dumps(self.to_dict())


def _quad_indices(n_modes, modes):
    modes = list(modes)
    return np.array(modes + [n_modes + k for k in modes], dtype=int)


@dataclass(frozen=True, eq=False)
class SymplecticOp:
    """Affine phase-space map ``r -> matrix @ r + displacement``."""

    matrix: np.ndarray
    displacement: np.ndarray | None = None

    def __post_init__(self):
        mat = _freeze(self.matrix)
        dim = mat.shape[0]
        if mat.shape != (dim, dim) or dim % 2:
            raise GaussianError(f"symplectic matrix must be 2k x 2k, got {mat.shape}")
        disp = np.zeros(dim) if self.displacement is None else self.displacement
        disp = _freeze(disp).reshape(-1)
        if disp.size != dim:
            raise GaussianError("displacement length must match matrix size")
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "displacement", disp)

    @property
    def n_modes(self):
        return self.matrix.shape[0] // 2

    def __matmul__(self, other):
        """Composition: ``(self @ other)`` applies ``other`` first."""
        return SymplecticOp(
            self.matrix @ other.matrix,
            self.matrix @ other.displacement + self.displacement,
        )

    def inverse(self):
        inv = np.linalg.inv(self.matrix)
        return SymplecticOp(inv, -inv @ self.displacement)

    def to_dict(self):
        return {"matrix": self.matrix.tolist(), "displacement": self.displacement.tolist()}


def symplectic_error(matrix):
    """Frobenius norm of ``M Omega M^T - Omega``."""
    matrix = np.asarray(matrix, dtype=float)
    om = omega(matrix.shape[0] // 2)
    return np.linalg.norm(matrix @ om @ matrix.T - om)


def is_symplectic(matrix, tol=1e-10):
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] % 2:
        return False
    return symplectic_error(matrix) < tol


def is_physical(state: GaussianState, tol=1e-10):
    """Robertson-Schrodinger check ``cov + i Omega / 2 >= 0``.

    States still carrying IDEAL variance are not checked and return True.
    """
    if state.is_ideal:
        return True
    if not np.allclose(state.cov, state.cov.T, atol=1e-12, rtol=0):
        return False
    herm = state.cov + 0.5j * omega(state.n_modes)
    return np.linalg.eigvalsh(herm).min() >= -tol


# --- state constructors -------------------------------------------------


def vacuum(n_modes=1):
    if n_modes < 1:
        raise GaussianError("vacuum needs at least one mode")
    return GaussianState(np.zeros(2 * n_modes), VACUUM_VARIANCE * np.eye(2 * n_modes))


def db_to_variance(db):
    """x-variance of a squeezed vacuum squeezed ``db`` decibels below vacuum."""
    return VACUUM_VARIANCE * 10.0 ** (-db / 10.0)


def variance_to_db(var):
    return -10.0 * np.log10(var / VACUUM_VARIANCE)


def squeezing_db(state: GaussianState, mode=0):
    """Squeezing of the x quadrature of ``mode`` in dB below vacuum."""
    return variance_to_db(state.cov[mode, mode])


def squeezed_vacuum(r=None, db=None):
    """Single-mode x-squeezed vacuum, parametrised by ``r`` or by ``db``.

    ``db=IDEAL`` (or ``r=inf``) gives the infinitely squeezed limit.
    """
    if (r is None) == (db is None):
        raise GaussianError("give exactly one of r or db")
    if db is IDEAL or db == IDEAL or r == np.inf:
        return ideal_squeezed_vacuum()
    if db is not None:
        var_x = db_to_variance(float(db))
        return GaussianState(np.zeros(2), np.diag([var_x, VACUUM_VARIANCE**2 / var_x]))
    r = float(r)
    return GaussianState(np.zeros(2), np.diag([np.exp(-2 * r) / 2, np.exp(2 * r) / 2]))


def ideal_squeezed_vacuum():
    """Infinitely x-squeezed vacuum: ``Var(x) = 0`` and unbounded ``Var(p)``."""
    return GaussianState(np.zeros(2), np.zeros((2, 2)), np.diag([0.0, VACUUM_VARIANCE]))


def coherent(x=0.0, p=0.0):
    return GaussianState(np.array([x, p], dtype=float), VACUUM_VARIANCE * np.eye(2))


def product(*states: GaussianState):
    """Tensor product; modes are concatenated in argument order."""
    means_x, means_p = [], []
    n_total = sum(s.n_modes for s in states)
    cov = np.zeros((2 * n_total, 2 * n_total))
    inf = np.zeros_like(cov)
    any_inf = False
    offset = 0
    for s in states:
        k = s.n_modes
        means_x.append(s.mean[:k])
        means_p.append(s.mean[k:])
        idx = np.r_[offset : offset + k, n_total + offset : n_total + offset + k]
        cov[np.ix_(idx, idx)] = s.cov
        if s.inf_cov is not None:
            inf[np.ix_(idx, idx)] = s.inf_cov
            any_inf = True
        offset += k
    mean = np.concatenate(means_x + means_p)
    return GaussianState(mean, cov, inf if any_inf else None)


# --- symplectic constructors --------------------------------------------


def _embed(block, modes, n_modes):
    """Embed a 2k x 2k xxpp block acting on ``modes`` into ``n_modes``."""
    mat = np.eye(2 * n_modes)
    idx = _quad_indices(n_modes, modes)
    mat[np.ix_(idx, idx)] = block
    return mat


def rotation(theta, mode=0, n_modes=1):
    c, s = np.cos(theta), np.sin(theta)
    return SymplecticOp(_embed(np.array([[c, -s], [s, c]]), [mode], n_modes))


def squeezer(r, mode=0, n_modes=1):
    """``S(r)``: x scaled by ``exp(-r)``, p by ``exp(r)``."""
    return SymplecticOp(_embed(np.diag([np.exp(-r), np.exp(r)]), [mode], n_modes))


def beamsplitter(T, outer=0, loop=1, n_modes=2):
    """Variable beam splitter with transmissivity ``T``.

    Acts on the (outer, loop) mode pair as ``[[-sqrt(R), sqrt(T)],
    [sqrt(T), sqrt(R)]]`` identically on x and p. ``T = 1`` swaps the modes.
    """
    if not 0.0 <= T <= 1.0:
        raise GaussianError(f"transmissivity must be in [0, 1], got {T}")
    if outer == loop:
        raise GaussianError("beam splitter needs two distinct modes")
    for m in (outer, loop):
        if not 0 <= m < n_modes:
            raise GaussianError(f"mode {m} out of range for {n_modes} modes")
    t, rr = np.sqrt(T), np.sqrt(1.0 - T)
    pair = np.array([[-rr, t], [t, rr]])
    block = np.zeros((4, 4))
    block[:2, :2] = pair
    block[2:, 2:] = pair
    return SymplecticOp(_embed(block, [outer, loop], n_modes))


def displacement(dx=0.0, dp=0.0, mode=0, n_modes=1):
    d = np.zeros(2 * n_modes)
    d[mode] = dx
    d[n_modes + mode] = dp
    return SymplecticOp(np.eye(2 * n_modes), d)


def build_symplectic(kind, n_modes=1, **params):
    """Construct a gate from a ``kind`` name and its parameters.

    ``kind`` is one of ``rotation`` (theta, mode), ``squeeze`` (r, mode),
    ``beamsplitter`` (T, outer, loop) and ``displacement`` (dx, dp, mode).
    """
    builders = {
        "rotation": rotation,
        "squeeze": squeezer,
        "beamsplitter": beamsplitter,
        "displacement": displacement,
    }
    if kind not in builders:
        raise GaussianError(f"unknown gate kind {kind!r}")
    return builders[kind](n_modes=n_modes, **params)


# --- state updates --------------------------------------------------------


def apply(state: GaussianState, op: SymplecticOp):
    if op.n_modes != state.n_modes:
        raise GaussianError(
            f"operator on {op.n_modes} modes applied to {state.n_modes}-mode state"
        )
    m = op.matrix
    inf = None if state.inf_cov is None else m @ state.inf_cov @ m.T
    return GaussianState(m @ state.mean + op.displacement, m @ state.cov @ m.T, inf)


def _quadrature_vector(n_modes, mode, angle):
    vec = np.zeros(2 * n_modes)
    vec[mode] = np.cos(angle)
    vec[n_modes + mode] = np.sin(angle)
    return vec


def _check_mode(state, mode):
    if not 0 <= mode < state.n_modes:
        raise GaussianError(f"mode {mode} out of range for {state.n_modes} modes")


def delete_mode(state: GaussianState, mode):
    _check_mode(state, mode)
    keep = [k for k in range(state.n_modes) if k != mode]
    if not keep:
        return None
    return state.reduced(keep)


def homodyne(state: GaussianState, mode, quadrature_angle=0.0, rng=None, outcome=None):
    """Measure ``cos(a) x + sin(a) p`` of ``mode`` and condition the rest.

    Args:
        state: the state before measurement.
        mode: index of the measured mode; it is removed afterwards.
        quadrature_angle: LO angle ``a``; 0 measures x, pi/2 measures p.
        rng: ``numpy.random.Generator`` used when ``outcome`` is None.
        outcome: fixed outcome to condition on instead of sampling.

    Returns:
        tuple: ``(outcome, conditioned)``. ``conditioned`` is None when the
        measured mode was the only one.

    When the measured quadrature carries IDEAL (unbounded) variance its
    distribution is improper; a sampled outcome is then drawn from the
    finite part of the marginal. Gaussian programs with IDEAL ancillae
    cancel that dependence through feedforward.
    """
    _check_mode(state, mode)
    n = state.n_modes
    pi = _quadrature_vector(n, mode, quadrature_angle)
    mu, cov = state.mean, state.cov
    v = cov @ pi
    c = float(pi @ v)
    mu_m = float(pi @ mu)
    inf = state.inf_cov
    s = 0.0 if inf is None else float(pi @ inf @ pi)

    if outcome is None:
        if rng is None:
            rng = np.random.default_rng()
        outcome = mu_m + np.sqrt(max(c, 0.0)) * rng.standard_normal()
    outcome = float(outcome)

    if s > _INF_ATOL:
        w = inf @ pi
        new_mean = mu + w * (outcome - mu_m) / s
        new_cov = cov - (np.outer(v, w) + np.outer(w, v)) / s + c * np.outer(w, w) / s**2
        new_inf = inf - np.outer(w, w) / s
    else:
        if c <= 0.0:
            raise DegenerateMeasurementError(
                f"measured quadrature of mode {mode} has zero variance"
            )
        new_mean = mu + v * (outcome - mu_m) / c
        new_cov = cov - np.outer(v, v) / c
        new_inf = inf
    new_cov = 0.5 * (new_cov + new_cov.T)
    conditioned = delete_mode(GaussianState(new_mean, new_cov, new_inf), mode)
    return outcome, conditioned


def feedforward_displace(state: GaussianState, mode, quadrature_angle, amount):
    """Displace the quadrature at ``quadrature_angle`` of ``mode`` by ``amount``."""
    _check_mode(state, mode)
    pi = _quadrature_vector(state.n_modes, mode, quadrature_angle)
    return GaussianState(state.mean + amount * pi, state.cov, state.inf_cov)


def loss_channel(state: GaussianState, mode, eta):
    """Pure-loss channel of transmission ``eta`` on one mode."""
    if not 0.0 < eta <= 1.0:
        raise GaussianError(f"transmission must be in (0, 1], got {eta}")
    _check_mode(state, mode)
    if eta == 1.0:
        return state
    n = state.n_modes
    scale = np.ones(2 * n)
    scale[[mode, n + mode]] = np.sqrt(eta)
    cov = state.cov * np.outer(scale, scale)
    cov[mode, mode] += (1 - eta) * VACUUM_VARIANCE
    cov[n + mode, n + mode] += (1 - eta) * VACUUM_VARIANCE
    inf = None if state.inf_cov is None else state.inf_cov * np.outer(scale, scale)
    return GaussianState(scale * state.mean, cov, inf)


def _resolve_ancilla(ancilla):
    if isinstance(ancilla, GaussianState):
        if ancilla.n_modes != 1:
            raise GaussianError("ancilla must be a single mode")
        return ancilla
    if ancilla is None or ancilla == IDEAL:
        return ideal_squeezed_vacuum()
    return squeezed_vacuum(db=float(ancilla))


def measurement_induced_squeeze(
    state: GaussianState, in_mode, R0, ancilla=IDEAL, rng=None, outcome=None
):
    """Squeeze ``in_mode`` by ``S(-ln sqrt(R0))`` using an x-squeezed ancilla.

    The ancilla meets the input on a beam splitter of transmissivity
    ``T0 = 1 - R0`` (ancilla on the outer port, input on the loop port), the
    outer output's p quadrature is measured, and the outcome is fed forward
    onto p of the kept mode with gain ``sqrt(T0 / R0)``.

    Args:
        state: input state; the squeezed mode keeps its index.
        in_mode: index of the mode to squeeze.
        R0: beam splitter reflectivity, strictly between 0 and 1.
        ancilla: IDEAL, a squeezing level in dB, or a one-mode GaussianState.
        rng: generator for the homodyne outcome.
        outcome: fixed homodyne outcome.

    Returns:
        GaussianState: the conditioned and corrected output.
    """
    if not 0.0 < R0 < 1.0:
        raise GaussianError(f"R0 must be in (0, 1), got {R0}")
    _check_mode(state, in_mode)
    T0 = 1.0 - R0
    anc = _resolve_ancilla(ancilla)
    n = state.n_modes
    joint = product(state, anc)
    joint = apply(joint, beamsplitter(T0, outer=n, loop=in_mode, n_modes=n + 1))
    q, out = homodyne(joint, n, np.pi / 2, rng=rng, outcome=outcome)
    return feedforward_displace(out, in_mode, np.pi / 2, np.sqrt(T0 / R0) * q)


def state_distance(a: GaussianState, b: GaussianState):
    """Return ``(mean_dist, cov_dist)``: Euclidean and Frobenius norms."""
    if a.n_modes != b.n_modes:
        raise GaussianError("states have different mode counts")
    return (
        float(np.linalg.norm(a.mean - b.mean)),
        float(np.linalg.norm(a.cov - b.cov)),
    )
