"""Decompositions of Gaussian unitaries into loop-executable primitives.

Three layers:

* ``euler_single_mode``: a 2x2 symplectic as ``R(theta2) S(r) R(theta1)``.
* ``decompose_interferometer``: an n x n unitary as a rectangular mesh of
  adjacent-pair elements followed by per-mode phases.
* ``bloch_messiah``: a 2n x 2n symplectic as interferometer, parallel
  single-mode squeezers, interferometer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .gaussian import GaussianError, SymplecticOp, omega, rotation, squeezer, symplectic_error


class DecompositionError(GaussianError):
    """Input is not of the form required by a decomposition."""


def _wrap(angle):
    """Map an angle into (-pi, pi]."""
    wrapped = -((-angle + np.pi) % (2 * np.pi) - np.pi)
    return 0.0 if wrapped == 0 else float(wrapped)


# --- single mode ------------------------------------------------------------


@dataclass(frozen=True)
class EulerForm:
    theta2: float
    r: float
    theta1: float

    def symplectic(self):
        return rotation(self.theta2) @ squeezer(self.r) @ rotation(self.theta1)

    def to_dict(self):
        return {"theta2": self.theta2, "r": self.r, "theta1": self.theta1}


def euler_single_mode(M, tol=1e-10, r_tol=1e-12):
    """Euler decomposition ``M = R(theta2) S(r) R(theta1)`` with ``r >= 0``.

    The pair ``(theta2 + pi, theta1 - pi)`` is equivalent; ``theta1`` is
    normalised into ``[-pi/2, pi/2)``. When ``r`` vanishes the gate is a
    pure rotation and ``theta1 = 0``.
    """
    M = np.asarray(M, dtype=float)
    if M.shape != (2, 2):
        raise DecompositionError(f"expected a 2x2 matrix, got shape {M.shape}")
    if symplectic_error(M) >= tol:
        raise DecompositionError("matrix is not symplectic")

    u, s, vt = np.linalg.svd(M)
    r = float(np.log(s[0]))
    if r <= r_tol:
        return EulerForm(_wrap(np.arctan2(M[1, 0], M[0, 0])), 0.0, 0.0)

    # SVD gives diag(e^r, e^-r); S(r) wants the small value first.
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    left, right = u @ swap, swap @ vt
    if np.linalg.det(left) < 0:
        flip = np.diag([1.0, -1.0])
        left, right = left @ flip, flip @ right
    theta2 = np.arctan2(left[1, 0], left[0, 0])
    theta1 = np.arctan2(right[1, 0], right[0, 0])
    if not -np.pi / 2 <= theta1 < np.pi / 2:
        shift = np.pi if theta1 < -np.pi / 2 else -np.pi
        theta1 += shift
        theta2 -= shift
    return EulerForm(_wrap(theta2), r, float(theta1))


# --- interferometers ----------------------------------------------------------


class MeshElement(NamedTuple):
    """Adjacent-pair element on modes ``(mode, mode + 1)``.

    Its unitary is ``[[sqrt(T) e^{i phase}, -sqrt(1-T)],
    [sqrt(1-T) e^{i phase}, sqrt(T)]]``: a phase on the first mode followed
    by the loop beam splitter.
    """

    mode: int
    T: float
    phase: float

    @property
    def pair(self):
        return (self.mode, self.mode + 1)

    def block(self):
        t, r = np.sqrt(self.T), np.sqrt(1.0 - self.T)
        e = np.exp(1j * self.phase)
        return np.array([[t * e, -r], [r * e, t]])

    def unitary(self, n):
        mat = np.eye(n, dtype=complex)
        i = self.mode
        mat[i : i + 2, i : i + 2] = self.block()
        return mat


@dataclass(frozen=True)
class InterferometerMesh:
    """Elements in application order, then residual per-mode phases."""

    n_modes: int
    elements: tuple = ()
    phases: np.ndarray = field(default=None)

    def __post_init__(self):
        phases = np.zeros(self.n_modes) if self.phases is None else np.asarray(self.phases, float)
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "elements", tuple(MeshElement(*e) for e in self.elements))

    def unitary(self):
        u = np.eye(self.n_modes, dtype=complex)
        for el in self.elements:
            u = el.unitary(self.n_modes) @ u
        return np.diag(np.exp(1j * self.phases)) @ u

    def to_dict(self):
        return {
            "n_modes": self.n_modes,
            "elements": [
                {"pair": list(el.pair), "T": el.T, "phase": el.phase} for el in self.elements
            ],
            "phases": self.phases.tolist(),
        }


def decompose_interferometer(U, tol=1e-10, null_tol=1e-13):
    """Rectangular decomposition of an n x n unitary into adjacent-pair elements.

    Elements whose target entry is already zero are skipped, so the count
    is at most ``n(n-1)/2`` and the identity gives an empty mesh.
    """
    U = np.array(U, dtype=complex)
    n = U.shape[0]
    if U.shape != (n, n):
        raise DecompositionError("interferometer matrix must be square")
    if np.linalg.norm(U.conj().T @ U - np.eye(n)) >= tol:
        raise DecompositionError("matrix is not unitary")

    work = U.copy()
    right = []  # applied first, in order
    left = []  # nulled from the left, in nulling order
    for i in range(n - 1):
        if i % 2 == 0:
            for j in range(i + 1):
                row, col = n - 1 - j, i - j
                a, b = work[row, col], work[row, col + 1]
                if abs(a) <= null_tol:
                    continue
                theta = np.arctan2(abs(a), abs(b))
                phase = np.angle(a) - np.angle(b)
                el = MeshElement(col, float(np.cos(theta) ** 2), float(phase))
                blk = el.block()
                # right-multiply by the inverse element on columns (col, col+1)
                work[:, col : col + 2] = work[:, col : col + 2] @ blk.conj().T
                right.append(el)
        else:
            for j in range(1, i + 2):
                row, col = n + j - i - 2, j - 1
                a, b = work[row, col], work[row - 1, col]
                if abs(a) <= null_tol:
                    continue
                theta = np.arctan2(abs(a), abs(b))
                phase = np.angle(a) - np.angle(b) + np.pi
                el = MeshElement(row - 1, float(np.cos(theta) ** 2), float(phase))
                work[row - 1 : row + 1, :] = el.block() @ work[row - 1 : row + 1, :]
                left.append(el)

    diag = np.diag(work).copy()
    if np.linalg.norm(work - np.diag(diag)) > 1e-9:
        raise DecompositionError("nulling did not reach a diagonal matrix")

    # U = L_1^-1 ... L_k^-1 D R_K ... R_1. Move each inverse through D.
    moved = []
    for el in reversed(left):
        i = el.mode
        d1, d2 = diag[i], diag[i + 1]
        new_phase = float(np.angle(-d1 / d2))
        diag[i] = -np.exp(-1j * el.phase) * d2
        moved.append(MeshElement(i, el.T, new_phase))
    # moved[0] sits next to the right-hand elements, so it acts first.
    elements = tuple(right) + tuple(moved)
    phases = np.angle(diag)
    return InterferometerMesh(n, elements, phases)


def passive_symplectic_to_unitary(O, tol=1e-10):
    """``U = X + iY`` for a passive ``O = [[X, -Y], [Y, X]]``."""
    O = np.asarray(O, dtype=float)
    n = O.shape[0] // 2
    X, Y = O[:n, :n], O[n:, :n]
    if (
        np.linalg.norm(O[:n, n:] + Y) > tol
        or np.linalg.norm(O[n:, n:] - X) > tol
        or np.linalg.norm(O @ O.T - np.eye(2 * n)) > tol
    ):
        raise DecompositionError("matrix is not orthogonal-symplectic (passive)")
    return X + 1j * Y


def unitary_to_passive_symplectic(U):
    U = np.asarray(U, dtype=complex)
    X, Y = U.real, U.imag
    return np.block([[X, -Y], [Y, X]])


# --- Bloch-Messiah ------------------------------------------------------------


@dataclass(frozen=True)
class GaussianDecomposition:
    mesh_in: InterferometerMesh
    squeezers: np.ndarray
    mesh_out: InterferometerMesh
    displacement: np.ndarray

    @property
    def n_modes(self):
        return self.mesh_in.n_modes

    @property
    def n_squeezers(self):
        return int(np.count_nonzero(self.squeezers))

    def symplectic(self):
        o_in = unitary_to_passive_symplectic(self.mesh_in.unitary())
        o_out = unitary_to_passive_symplectic(self.mesh_out.unitary())
        d = np.diag(np.concatenate([np.exp(-self.squeezers), np.exp(self.squeezers)]))
        return SymplecticOp(o_out @ d @ o_in, self.displacement)

    def to_dict(self):
        return {
            "mesh_in": self.mesh_in.to_dict(),
            "squeezers": self.squeezers.tolist(),
            "mesh_out": self.mesh_out.to_dict(),
            "displacement": self.displacement.tolist(),
        }


def _unit_block_basis(basis, n):
    """Orthonormal p-rows for the unit-singular-value subspace.

    ``basis`` spans an Omega-invariant subspace of dimension ``2k``. Returns
    ``k`` vectors ``v`` such that the ``v`` and ``Omega v`` are orthonormal and
    span it. They are picked
    greedily from the standard p-basis so that block-diagonal inputs keep
    trivial interferometers.
    """
    om = omega(n)
    k = basis.shape[1] // 2
    chosen = []
    proj = basis @ basis.T
    for _ in range(k):
        best, best_norm = None, -1.0
        for j in range(n):
            cand = proj[:, n + j].copy()
            for v in chosen:
                for w in (v, om @ v):
                    cand -= w * (w @ cand)
            norm = np.linalg.norm(cand)
            if norm > best_norm + 1e-12:
                best, best_norm = cand, norm
        if best_norm < 1e-8:
            # fall back to any remaining direction of the subspace
            for col in basis.T:
                cand = col.copy()
                for v in chosen:
                    for w in (v, om @ v):
                        cand -= w * (w @ cand)
                if np.linalg.norm(cand) > 1e-6:
                    best, best_norm = cand, np.linalg.norm(cand)
                    break
        chosen.append(best / best_norm)
    return chosen


def bloch_messiah_factors(S, tol=1e-10, unit_tol=1e-9):
    """Return ``(O_out, r, O_in)`` with ``S = O_out diag(e^-r, e^r) O_in``.

    ``r`` is sorted descending; zero entries are modes without squeezing.
    """
    S = np.asarray(S, dtype=float)
    dim = S.shape[0]
    if S.shape != (dim, dim) or dim % 2:
        raise DecompositionError(f"expected a 2n x 2n matrix, got {S.shape}")
    if symplectic_error(S) >= tol:
        raise DecompositionError("matrix is not symplectic")
    n = dim // 2
    om = omega(n)

    gram = S.T @ S
    gram = 0.5 * (gram + gram.T)
    evals, evecs = np.linalg.eigh(gram)
    logs = np.log(np.clip(evals, 1e-300, None)) / 2.0
    stretched = [i for i in range(dim) if logs[i] > unit_tol]
    stretched.sort(key=lambda i: -logs[i])  # stable: ties keep eigh order
    unit = [i for i in range(dim) if abs(logs[i]) <= unit_tol]

    p_rows = [evecs[:, i] for i in stretched]
    r = [float(logs[i]) for i in stretched]
    if unit:
        p_rows += _unit_block_basis(evecs[:, unit], n)
        r += [0.0] * (len(unit) // 2)
    if len(p_rows) != n:
        raise DecompositionError("symplectic spectrum did not pair up")

    p_rows = np.array(p_rows)
    x_rows = (om @ p_rows.T).T
    o_in = np.vstack([x_rows, p_rows])
    r = np.array(r)
    d_inv = np.diag(np.concatenate([np.exp(r), np.exp(-r)]))
    o_out = S @ o_in.T @ d_inv
    return o_out, r, o_in


def bloch_messiah(S, displacement=None, tol=1e-10):
    """Bloch-Messiah decomposition into meshes and squeezers.

    Args:
        S: 2n x 2n symplectic matrix or a ``SymplecticOp``.
        displacement: final displacement (taken from ``S`` if it is an op).

    Returns:
        GaussianDecomposition
    """
    if isinstance(S, SymplecticOp):
        displacement = S.displacement if displacement is None else displacement
        S = S.matrix
    S = np.asarray(S, dtype=float)
    o_out, r, o_in = bloch_messiah_factors(S, tol=tol)
    n = S.shape[0] // 2
    mesh_in = decompose_interferometer(passive_symplectic_to_unitary(o_in, tol=1e-8))
    mesh_out = decompose_interferometer(passive_symplectic_to_unitary(o_out, tol=1e-8), tol=1e-8)
    disp = np.zeros(2 * n) if displacement is None else np.asarray(displacement, float)
    return GaussianDecomposition(mesh_in, r, mesh_out, disp)
