"""Truncated-Fock-space linear algebra.

Everything downstream (KPO spectra, Lindblad integration, leakage models)
is built on the dense-matrix primitives defined here: ladder operators,
coherent and cat states, displacement operators, displaced-Fock
superpositions, and thin eigensolver wrappers with a fixed phase
convention.

Conventions
-----------
* Fock levels run 0 .. dim-1; all matrices are dense complex.
* Amplitudes are real (the driven-KPO models never need complex ones).
* Hamiltonians are expressed in units of the Kerr coefficient K, times in
  units of 1/K.
* Returned eigenvectors/states have their largest-magnitude component
  rotated to the positive real axis (deterministic comparisons).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import ceil, exp, lgamma, log
from typing import Iterable

import numpy as np
from scipy.linalg import expm

from .errors import (
    ConvergenceFailure,
    DegenerateAmplitude,
    DimensionMismatch,
    TruncationError,
)

__all__ = [
    "FockSpace",
    "Operator",
    "StateVector",
    "DensityMatrix",
    "CatBasis",
    "GeneralEigensystem",
    "default_dim",
    "check_truncation",
    "fix_phase",
    "make_annihilation",
    "number_operator",
    "parity_operator",
    "identity_operator",
    "fock_state",
    "coherent_state",
    "cat_state",
    "make_cat_basis",
    "make_displacement",
    "displaced_fock_superposition",
    "eig_hermitian",
    "eig_general",
]

HERMITICITY_TOL = 1e-12
TAIL_BOUND = 1e-14
MIN_ODD_CAT_AMPLITUDE = 1e-3

# Condition number of the right-eigenvector matrix beyond which a general
# eigensystem is treated as defective (coalesced eigenvectors near an EP).
DEFECTIVE_CONDITION = 1e8


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class FockSpace:
    """Truncated bosonic Hilbert space keeping photon numbers 0 .. dim-1."""

    dim: int

    def __post_init__(self):
        if not isinstance(self.dim, (int, np.integer)) or self.dim < 2:
            raise ValueError(f"FockSpace dim must be an integer >= 2, got {self.dim!r}")

    def check_same(self, other: "FockSpace"):
        if self.dim != other.dim:
            raise DimensionMismatch(f"Fock dimensions differ: {self.dim} vs {other.dim}")


@dataclass(frozen=True)
class Operator:
    """Dense operator on a truncated Fock space.

    Entries are dimensionless unless stated; Hamiltonians are in units of
    K.  When constructed with ``hermitian=True`` the matrix is checked to
    be Hermitian within 1e-12.
    """

    space: FockSpace
    matrix: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.space.dim, self.space.dim):
            raise DimensionMismatch(
                f"operator shape {m.shape} does not match dim {self.space.dim}"
            )
        if self.hermitian:
            dev = np.max(np.abs(m - m.conj().T))
            if dev >= HERMITICITY_TOL:
                raise ValueError(f"operator flagged Hermitian but max|M - M^dag| = {dev:.3e}")
        object.__setattr__(self, "matrix", _freeze(m))

    def dag(self) -> "Operator":
        return Operator(self.space, self.matrix.conj().T, hermitian=self.hermitian)

    def __matmul__(self, other: "Operator") -> "Operator":
        self.space.check_same(other.space)
        return Operator(self.space, self.matrix @ other.matrix)


@dataclass(frozen=True)
class StateVector:
    """Pure state on a truncated Fock space."""

    space: FockSpace
    amplitudes: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex)
        if v.shape != (self.space.dim,):
            raise DimensionMismatch(
                f"state length {v.shape} does not match dim {self.space.dim}"
            )
        if self.normalized and abs(np.linalg.norm(v) - 1.0) >= 1e-12:
            raise ValueError("state flagged normalized but has norm "
                             f"{np.linalg.norm(v)!r}")
        object.__setattr__(self, "amplitudes", _freeze(v))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other: "StateVector") -> complex:
        """<self|other>."""
        self.space.check_same(other.space)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def expectation(self, op: Operator) -> complex:
        self.space.check_same(op.space)
        return complex(np.vdot(self.amplitudes, op.matrix @ self.amplitudes))

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(self.space, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """Mixed state on a truncated Fock space."""

    space: FockSpace
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.space.dim, self.space.dim):
            raise DimensionMismatch(
                f"density matrix shape {m.shape} does not match dim {self.space.dim}"
            )
        object.__setattr__(self, "matrix", _freeze(m))

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)

    def hermiticity_deviation(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh((self.matrix + self.matrix.conj().T) / 2)[0])

    def check_physical(self, trace_target: float = 1.0,
                       herm_tol: float = 1e-10, trace_tol: float = 1e-10,
                       psd_tol: float = 1e-8):
        """Raise ValueError unless Hermitian/trace/PSD within tolerances."""
        if self.hermiticity_deviation() >= herm_tol:
            raise ValueError("density matrix not Hermitian within tolerance")
        if abs(self.trace() - trace_target) >= trace_tol:
            raise ValueError(f"trace {self.trace()!r} differs from {trace_target}")
        if self.min_eigenvalue() < -psd_tol:
            raise ValueError(f"density matrix has eigenvalue {self.min_eigenvalue():.3e}")


@dataclass(frozen=True)
class CatBasis:
    """Even/odd cat pair |C+-> = N_+- (|alpha> +- |-alpha>) with its constants.

    ``n_plus``/``n_minus`` are the normalizations N_+- =
    [2(1 +- e^(-2 alpha^2))]^(-1/2) and ``p`` = N_+/N_-, the ratio entering
    a|C+-> = alpha p^(+-1) |C-+>.
    """

    alpha: float
    space: FockSpace
    n_plus: float
    n_minus: float
    p: float
    c_plus: StateVector
    c_minus: StateVector


@dataclass(frozen=True)
class GeneralEigensystem:
    """Right/left eigenpairs of a small complex matrix.

    After rescaling, left and right vectors satisfy <left_i|right_j> =
    delta_ij unless ``defective`` is set (eigenvector condition number
    above DEFECTIVE_CONDITION, i.e. the matrix is within numerical reach
    of a Jordan block).
    """

    values: np.ndarray
    right: np.ndarray
    left: np.ndarray
    defective: bool


def default_dim(alpha: float) -> int:
    """Truncation rule dim = max(30, ceil(alpha^2 + 8 alpha + 10)).

    Coherent-state tails decay super-exponentially past n ~ alpha^2, so
    this leaves a wide safety band; adequacy is re-checked analytically by
    check_truncation and post hoc on evolved states.
    """
    return max(30, ceil(alpha ** 2 + 8 * abs(alpha) + 10))


def check_truncation(alpha: float, space: FockSpace):
    """Verify the Poisson tail bound e^(-a^2) a^(2 dim)/dim! < 1e-14.

    Raises TruncationError when a coherent state of amplitude ``alpha``
    does not comfortably fit in ``space``.
    """
    a = abs(float(alpha))
    if a == 0.0:
        return
    log_tail = -a ** 2 + 2 * space.dim * log(a) - lgamma(space.dim + 1)
    if log_tail >= log(TAIL_BOUND):
        raise TruncationError(
            f"dim={space.dim} too small for alpha={alpha}: "
            f"tail bound exp({log_tail:.2f}) >= {TAIL_BOUND}"
        )


def fix_phase(vec: np.ndarray) -> np.ndarray:
    """Rotate a vector so its largest-magnitude component is real positive."""
    v = np.asarray(vec, dtype=complex)
    k = int(np.argmax(np.abs(v)))
    if abs(v[k]) == 0.0:
        return v.copy()
    return v * (abs(v[k]) / v[k])


@lru_cache(maxsize=None)
def _annihilation_matrix(dim: int) -> np.ndarray:
    return _freeze(np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex))


def make_annihilation(space: FockSpace) -> Operator:
    """Bosonic annihilation operator, <n-1|a|n> = sqrt(n)."""
    return Operator(space, _annihilation_matrix(space.dim))


def number_operator(space: FockSpace) -> Operator:
    """Photon number operator n = a^dag a (diagonal 0..dim-1)."""
    return Operator(space, np.diag(np.arange(space.dim, dtype=float)).astype(complex),
                    hermitian=True)


def parity_operator(space: FockSpace) -> Operator:
    """Photon parity (-1)^n."""
    return Operator(space, np.diag((-1.0) ** np.arange(space.dim)).astype(complex),
                    hermitian=True)


def identity_operator(space: FockSpace) -> Operator:
    return Operator(space, np.eye(space.dim, dtype=complex), hermitian=True)


def fock_state(n: int, space: FockSpace) -> StateVector:
    if not 0 <= n < space.dim:
        raise DimensionMismatch(f"Fock level {n} outside 0..{space.dim - 1}")
    v = np.zeros(space.dim, dtype=complex)
    v[n] = 1.0
    return StateVector(space, v)


def coherent_state(alpha: float, space: FockSpace) -> StateVector:
    """Coherent state |alpha> with amplitudes e^(-a^2/2) a^n / sqrt(n!).

    Amplitudes are evaluated in log space and renormalized, so the state
    is exactly unit norm in the truncated space.  Supports real alpha of
    either sign (|-alpha> flips the sign of odd components).
    """
    if isinstance(alpha, complex):
        raise ValueError("complex coherent amplitudes are not supported")
    check_truncation(alpha, space)
    a = float(alpha)
    if a == 0.0:
        return fock_state(0, space)
    n = np.arange(space.dim)
    log_amp = -a ** 2 / 2 + n * log(abs(a)) - 0.5 * np.array([lgamma(k + 1) for k in n])
    amps = np.exp(log_amp)
    if a < 0:
        amps = amps * (-1.0) ** n
    amps = amps / np.linalg.norm(amps)
    return StateVector(space, amps.astype(complex))


def cat_state(alpha: float, parity: int, space: FockSpace) -> StateVector:
    """Even (parity=+1) or odd (parity=-1) cat state N_+-(|alpha> +- |-alpha>).

    The odd cat degenerates to |1> as alpha -> 0 and its normalization
    becomes ill-conditioned; amplitudes below 1e-3 are rejected for
    parity=-1 rather than regularized.
    """
    if parity not in (+1, -1):
        raise ValueError("parity must be +1 or -1")
    if alpha < 0:
        raise ValueError("cat amplitude must be non-negative")
    if parity == -1 and alpha < MIN_ODD_CAT_AMPLITUDE:
        raise DegenerateAmplitude(
            f"odd cat undefined for alpha={alpha} < {MIN_ODD_CAT_AMPLITUDE}"
        )
    plus = coherent_state(alpha, space).amplitudes
    minus = coherent_state(-alpha, space).amplitudes
    v = plus + minus if parity == +1 else plus - minus
    v = v / np.linalg.norm(v)
    return StateVector(space, fix_phase(v))


def make_cat_basis(alpha: float, space: FockSpace) -> CatBasis:
    """Construct the cat pair together with N_+-, and p = N_+/N_-."""
    c_plus = cat_state(alpha, +1, space)
    c_minus = cat_state(alpha, -1, space)
    q = exp(-2 * alpha ** 2)
    n_plus = (2 * (1 + q)) ** -0.5
    n_minus = (2 * (1 - q)) ** -0.5
    return CatBasis(alpha=float(alpha), space=space, n_plus=n_plus, n_minus=n_minus,
                    p=n_plus / n_minus, c_plus=c_plus, c_minus=c_minus)


def make_displacement(alpha: float, space: FockSpace) -> Operator:
    """Displacement D(alpha) = exp[alpha (a^dag - a)] for real alpha.

    Computed with the scaling-and-squaring Pade matrix exponential.  The
    result is unitary on the interior sub-block n < dim - ceil(4|alpha|) - 4;
    rows/columns near the truncation edge are not trustworthy.
    """
    if isinstance(alpha, complex):
        raise ValueError("complex displacement amplitudes are not supported")
    check_truncation(alpha, space)
    a = make_annihilation(space).matrix
    return Operator(space, expm(float(alpha) * (a.conj().T - a)))


def displaced_fock_superposition(alpha: float, k: int, sign: int,
                                 space: FockSpace) -> tuple[StateVector, float]:
    """Normalized N (D(alpha)|k> + sign * D(-alpha)|k>) and its N.

    These are the standard large-amplitude approximations to the KPO
    excited states; the normalization satisfies
    N = [2(1 + sign * <k|D(-2 alpha)|k>)]^(-1/2) and is returned alongside
    the state.
    """
    if k < 1:
        raise ValueError("excitation index k must be >= 1")
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    d_plus = make_displacement(alpha, space).matrix
    d_minus = make_displacement(-alpha, space).matrix
    kvec = fock_state(k, space).amplitudes
    v = d_plus @ kvec + sign * (d_minus @ kvec)
    nrm = np.linalg.norm(v)
    # nrm^2 = 2 (1 + sign <k|D(-2a)|k>)
    if nrm ** 2 < 2e-12:
        raise DegenerateAmplitude(
            f"displaced Fock superposition degenerate: 1 {'+' if sign > 0 else '-'} "
            f"<{k}|D(-2a)|{k}> < 1e-12 at alpha={alpha}"
        )
    state = StateVector(space, fix_phase(v / nrm))
    # post hoc truncation check on the constructed state
    tail = float(np.sum(np.abs(state.amplitudes[space.dim - 5:]) ** 2))
    if tail > 1e-10:
        raise TruncationError(
            f"displaced Fock state has tail population {tail:.2e} at dim={space.dim}"
        )
    return state, float(1.0 / nrm)


def eig_hermitian(op: Operator) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and phase-fixed orthonormal eigenvectors.

    Requires a Hermitian-flagged Operator; residuals satisfy
    ||H v - w v|| < 1e-10 ||H||.
    """
    if not op.hermitian:
        raise ValueError("eig_hermitian requires a Hermitian-flagged operator")
    w, v = np.linalg.eigh(op.matrix)
    v = np.column_stack([fix_phase(v[:, i]) for i in range(v.shape[1])])
    scale = max(np.max(np.abs(w)), 1.0)
    resid = np.max(np.abs(op.matrix @ v - v * w))
    if resid > 1e-10 * scale:
        raise ConvergenceFailure(f"eigh residual {resid:.3e} exceeds 1e-10*||H||")
    return w, v


def eig_general(m: np.ndarray) -> GeneralEigensystem:
    """Eigenvalues with biorthogonal right/left eigenvectors.

    Right vectors satisfy M r_i = w_i r_i, left vectors M^dag l_i =
    conj(w_i) l_i, rescaled so <l_i|r_j> = delta_ij.  When the
    right-eigenvector matrix has condition number above 1e8 the system is
    flagged defective (near an exceptional point) and the left vectors are
    returned unscaled.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("eig_general requires a square matrix")
    from scipy.linalg import eig as scipy_eig

    w, vl, vr = scipy_eig(m, left=True, right=True)
    order = np.lexsort((w.imag, w.real))
    w, vl, vr = w[order], vl[:, order], vr[:, order]
    vr = np.column_stack([fix_phase(vr[:, i]) for i in range(vr.shape[1])])
    vl = np.column_stack([fix_phase(vl[:, i]) for i in range(vl.shape[1])])
    resid = np.max(np.abs(m @ vr - vr * w))
    if not np.all(np.isfinite(w)) or resid > 1e-8 * max(1.0, np.max(np.abs(m)) * m.shape[0]):
        raise ConvergenceFailure(f"general eigensolver residual {resid:.3e}")
    defective = np.linalg.cond(vr) > DEFECTIVE_CONDITION
    if not defective:
        # rescale left vectors for biorthonormality <l_i|r_j> = delta_ij
        overlaps = np.einsum("ij,ij->j", vl.conj(), vr)
        vl = vl / overlaps.conj()[np.newaxis, :]
    return GeneralEigensystem(values=w, right=vr, left=vl, defective=bool(defective))
