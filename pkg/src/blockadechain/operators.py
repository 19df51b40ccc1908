"""Pauli-string operators, unitary propagators, and spectral-norm distances.

Basis convention used across the package: site 1 is the most significant
bit of the basis index, ``|1>`` is the ``sigma^z = +1`` eigenstate and
``|0>`` the ``-1`` eigenstate, so the occupation operator is
``n = (1 + sigma^z) / 2``.  All energies are in units with hbar = 1.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

#: Largest register realized as a dense 2^N x 2^N matrix.
DIMENSION_CAP = 14
#: Largest register handled by the diagonal (Z-only) fast path.
DIAGONAL_CAP = 20

HERMITICITY_TOL = 1e-12
UNITARITY_TOL = 1e-10

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, 1.0j], [-1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)

_PAULI = {"X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}
_ID2 = np.eye(2, dtype=complex)


class InvariantViolation(RuntimeError):
    """A numerical invariant (unitarity, hermiticity, bound dominance) failed."""


@dataclass(frozen=True)
class PauliTerm:
    """One term ``coefficient * prod_i sigma_i^letter`` of a spin operator.

    ``letters`` maps 1-based site indices to ``'X' | 'Y' | 'Z'``; absent
    sites act as identity.  Coefficients are real so that every term is
    Hermitian.
    """

    coefficient: float
    letters: tuple

    def __init__(self, coefficient: float, letters) -> None:
        coefficient = float(coefficient)
        if not np.isfinite(coefficient):
            raise ValueError("coefficient must be finite")
        if isinstance(letters, Mapping):
            items = letters.items()
        else:
            items = letters
        norm = tuple(sorted((int(s), str(p).upper()) for s, p in items))
        for site, pauli in norm:
            if site < 1:
                raise ValueError(f"site index {site} out of range (sites are 1-based)")
            if pauli not in ("X", "Y", "Z"):
                raise ValueError(f"unknown Pauli letter {pauli!r}")
        if len({s for s, _ in norm}) != len(norm):
            raise ValueError("duplicate site index in Pauli term")
        object.__setattr__(self, "coefficient", coefficient)
        object.__setattr__(self, "letters", norm)

    @property
    def max_site(self) -> int:
        return self.letters[-1][0] if self.letters else 0

    @property
    def is_diagonal(self) -> bool:
        return all(p == "Z" for _, p in self.letters)


@dataclass(frozen=True)
class OperatorSum:
    """Sum of Pauli terms on an N-spin register; always Hermitian."""

    terms: tuple
    n_spins: int

    def __init__(self, terms, n_spins: int) -> None:
        terms = tuple(terms)
        n_spins = int(n_spins)
        if n_spins < 1:
            raise ValueError("n_spins must be positive")
        for term in terms:
            if term.max_site > n_spins:
                raise ValueError(
                    f"term touches site {term.max_site} beyond register size {n_spins}"
                )
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "n_spins", n_spins)

    @property
    def is_diagonal(self) -> bool:
        return all(t.is_diagonal for t in self.terms)

    def __add__(self, other: "OperatorSum") -> "OperatorSum":
        if other.n_spins != self.n_spins:
            raise ValueError("cannot add operators on different registers")
        return OperatorSum(self.terms + other.terms, self.n_spins)


@dataclass(frozen=True)
class StateVector:
    """Normalized state on 2^N amplitudes (site 1 = most significant bit)."""

    amplitudes: np.ndarray
    n_spins: int
    unnormalized: bool = False

    def __post_init__(self) -> None:
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != (2**self.n_spins,):
            raise ValueError("amplitude vector has wrong length")
        if not self.unnormalized:
            norm = np.linalg.norm(amp)
            if abs(norm - 1.0) > 1e-12:
                raise ValueError(f"state norm {norm} deviates from 1 beyond 1e-12")
        object.__setattr__(self, "amplitudes", amp)

    @staticmethod
    def basis_index(bits) -> int:
        """Index of the product state ``|b_1 b_2 ... b_N>`` (b_1 most significant)."""
        idx = 0
        for b in bits:
            if b not in (0, 1):
                raise ValueError("bits must be 0 or 1")
            idx = (idx << 1) | b
        return idx

    @classmethod
    def basis_state(cls, bits) -> "StateVector":
        bits = list(bits)
        amp = np.zeros(2 ** len(bits), dtype=complex)
        amp[cls.basis_index(bits)] = 1.0
        return cls(amp, len(bits))


@dataclass(frozen=True)
class Propagator:
    """Unitary on the full register, with a certificate check at construction."""

    matrix: np.ndarray
    generator_trace: tuple | None = None

    def __post_init__(self) -> None:
        u = np.asarray(self.matrix, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ValueError("propagator must be a square matrix")
        defect = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
        if defect > UNITARITY_TOL:
            raise InvariantViolation(f"unitarity defect {defect:.3e} exceeds {UNITARITY_TOL}")
        object.__setattr__(self, "matrix", u)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def realize(op: OperatorSum) -> np.ndarray:
    """Dense Hermitian matrix of an operator sum via tensor embedding."""
    if op.n_spins > DIMENSION_CAP:
        raise ValueError(
            f"register of {op.n_spins} spins exceeds the dense dimension cap {DIMENSION_CAP}"
        )
    dim = 2**op.n_spins
    out = np.zeros((dim, dim), dtype=complex)
    for term in op.terms:
        letters = dict(term.letters)
        acc = np.array([[1.0 + 0.0j]])
        for site in range(1, op.n_spins + 1):
            acc = np.kron(acc, _PAULI.get(letters.get(site), _ID2) if site in letters else _ID2)
        out += term.coefficient * acc
    defect = np.max(np.abs(out - out.conj().T)) if dim else 0.0
    if defect > 1e-14:
        raise InvariantViolation(f"realized matrix hermiticity defect {defect:.3e}")
    return out


def realize_diagonal(op: OperatorSum) -> np.ndarray:
    """Diagonal (length 2^N, real) of a Z-only operator sum.

    Fast path for purely Ising generators; supports registers up to
    ``DIAGONAL_CAP`` spins without materializing matrices.
    """
    if not op.is_diagonal:
        raise ValueError("operator has non-Z terms; no diagonal fast path")
    if op.n_spins > DIAGONAL_CAP:
        raise ValueError(
            f"register of {op.n_spins} spins exceeds the diagonal cap {DIAGONAL_CAP}"
        )
    n = op.n_spins
    idx = np.arange(2**n, dtype=np.int64)
    # sigma^z eigenvalue of site s: +1 when the bit is 1 (|1> is spin up)
    zvals = [2.0 * ((idx >> (n - s)) & 1) - 1.0 for s in range(1, n + 1)]
    diag = np.zeros(2**n)
    for term in op.terms:
        contrib = np.full(2**n, term.coefficient)
        for site, _ in term.letters:
            contrib = contrib * zvals[site - 1]
        diag += contrib
    return diag


def expm_unitary(h: np.ndarray, t: float, sign: int = 1) -> Propagator:
    """``exp(sign * (-i) * t * H)`` for Hermitian H via eigendecomposition.

    Uses a phase-only path for diagonal H and a real symmetric
    eigensolver when H has no imaginary part.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("H must be a square matrix")
    if not np.all(np.isfinite(h)):
        raise ValueError("H has non-finite entries")
    defect = np.max(np.abs(h - h.conj().T))
    if defect > HERMITICITY_TOL:
        raise ValueError(f"H is not Hermitian (defect {defect:.3e})")

    offdiag = h - np.diag(np.diag(h))
    if not offdiag.any():
        u = np.diag(np.exp(-1j * sign * t * np.real(np.diag(h))))
        return Propagator(u)
    if not h.imag.any():
        w, v = np.linalg.eigh(h.real)
    else:
        w, v = np.linalg.eigh(h)
    u = (v * np.exp(-1j * sign * t * w)) @ v.conj().T
    return Propagator(u)


def spectral_norm(a) -> float:
    """Largest singular value (the operator 2-norm)."""
    a = a.matrix if isinstance(a, Propagator) else np.asarray(a, dtype=complex)
    if not np.all(np.isfinite(a.view(float))):
        raise ValueError("matrix has non-finite entries")
    return float(np.linalg.norm(a, ord=2))


def phase_set_distance(phases) -> tuple[float, float]:
    """Optimal global phase against a set of unit-circle points.

    For diagonal unitaries ``V = diag(e^{i theta_k})`` this returns
    ``(phi*, d*)`` with ``d* = min_phi max_k |1 - e^{i(phi + theta_k)}|``,
    located exactly through the largest circular gap of the phase set.
    """
    p = np.sort(np.mod(np.asarray(phases, dtype=float), 2.0 * np.pi))
    if p.size == 0:
        raise ValueError("empty phase set")
    gaps = np.diff(np.concatenate([p, [p[0] + 2.0 * np.pi]]))
    g = int(np.argmax(gaps))
    width = 2.0 * np.pi - gaps[g]
    start = p[(g + 1) % p.size]
    centre = start + width / 2.0
    dist = 2.0 * np.sin(width / 4.0)
    return float((-centre) % (2.0 * np.pi)), float(dist)


def phase_optimized_distance(u, v, refine_to: float = 1e-12) -> tuple[float, float]:
    """Minimize ``|| U - e^{i phi} V ||`` over the global phase of V.

    Coarse 512-point grid over [0, 2pi) followed by window refinement
    until the grid step drops below ``refine_to``.  Returns
    ``(phi*, d*)``; the phase multiplies V, matching the freedom of
    choosing an energy zero point for the realistic evolution.
    """
    u = u.matrix if isinstance(u, Propagator) else np.asarray(u, dtype=complex)
    v = v.matrix if isinstance(v, Propagator) else np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise ValueError("dimension mismatch between U and V")

    def objective(phi: float) -> float:
        return float(np.linalg.norm(u - np.exp(1j * phi) * v, ord=2))

    phis = np.linspace(0.0, 2.0 * np.pi, 512, endpoint=False)
    vals = np.array([objective(p) for p in phis])
    best = int(np.argmin(vals))
    step = phis[1] - phis[0]
    lo, hi = phis[best] - step, phis[best] + step
    best_phi, best_val = phis[best], vals[best]
    while hi - lo > refine_to:
        phis = np.linspace(lo, hi, 33)
        vals = np.array([objective(p) for p in phis])
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_val, best_phi = vals[k], phis[k]
        step = phis[1] - phis[0]
        lo, hi = phis[k] - step, phis[k] + step
    return float(best_phi % (2.0 * np.pi)), float(best_val)
