"""Kerr parametric oscillator: Hamiltonian, spectrum, cat-subspace labels.

The KPO Hamiltonian (in units of K, frame rotating at the resonator
frequency) is

    H = -a^dag a^dag a a + (P/K)(a^dag^2 + a^2),

with cat size alpha = sqrt(P/K).  Because the Kerr term enters with a
minus sign, the degenerate cat pair sits at the *top* of the spectrum
(eigenvalue alpha^4) and excited manifolds appear below it, separated by
a gap that approaches 4 K alpha^2 for large alpha.

H commutes with photon parity, so diagonalization is done per parity
sector; labels are therefore exact, and degenerate cat states can never
mix across sectors.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import sqrt

import numpy as np

from .errors import ClassificationFailure
from .fock import (
    CatBasis,
    FockSpace,
    Operator,
    StateVector,
    check_truncation,
    fix_phase,
    make_annihilation,
    make_cat_basis,
)

__all__ = ["KpoParams", "KpoSpectrum", "build_kpo_hamiltonian", "diagonalize_kpo"]

CAT_OVERLAP_MIN = 0.99
PARITY_EXPECTATION_MIN = 0.999
DEGENERACY_TOL = 1e-6  # eigenvalues closer than this (units of K) form a pair


@dataclass(frozen=True)
class KpoParams:
    """Physical parameters of a single driven KPO.

    All rates are in units of the Kerr coefficient ``kerr`` (K); K=1
    internally.  ``drive_two_photon`` is the squeezing-drive amplitude P,
    ``drive_single_photon`` the weak probe amplitude Omega, ``dephasing``
    the pure-dephasing rate kappa_phi.
    """

    kerr: float = 1.0
    drive_two_photon: float = 0.0
    drive_single_photon: float = 0.0
    dephasing: float = 0.0

    def __post_init__(self):
        if self.kerr <= 0:
            raise ValueError("kerr must be positive")
        if self.drive_two_photon < 0 or self.drive_single_photon < 0 or self.dephasing < 0:
            raise ValueError("drive and dephasing rates must be non-negative")
        gap = 4 * self.kerr * self.alpha ** 2
        if gap > 0 and self.drive_single_photon >= 0.1 * gap:
            warnings.warn(
                f"single-photon drive {self.drive_single_photon} is not small against "
                f"the spectral gap {gap:.3g}; the cat-subspace picture degrades",
                stacklevel=2,
            )

    @property
    def alpha(self) -> float:
        """Cat size alpha = sqrt(P/K)."""
        return sqrt(self.drive_two_photon / self.kerr)

    @classmethod
    def from_alpha(cls, alpha: float, kerr: float = 1.0,
                   drive_single_photon: float = 0.0,
                   dephasing: float = 0.0) -> "KpoParams":
        return cls(kerr=kerr, drive_two_photon=kerr * alpha ** 2,
                   drive_single_photon=drive_single_photon, dephasing=dephasing)


@dataclass(frozen=True)
class KpoSpectrum:
    """Classified eigensystem of the (undriven) KPO Hamiltonian.

    Eigenvalues ascend; ``parity_label[i]`` is the exact photon parity
    (+1/-1) of ``eigenvectors[i]``.  ``cat_plus_idx``/``cat_minus_idx``
    point at the even/odd cat states (identified by overlap with the
    analytic cats, never by energy ordering).  ``first_excited_idx`` holds
    the (odd-sector, even-sector) indices of the next state down within
    each sector -- the targets of the + and - displaced-Fock
    superpositions respectively -- and ``gap`` is the mean cat energy
    minus the mean first-excited energy, in units of K.
    """

    params: KpoParams
    space: FockSpace
    eigenvalues: np.ndarray
    eigenvectors: list[StateVector]
    parity_label: np.ndarray
    cat_plus_idx: int
    cat_minus_idx: int
    first_excited_idx: tuple[int, int]
    gap: float
    cat_basis: CatBasis


def build_kpo_hamiltonian(params: KpoParams, space: FockSpace) -> Operator:
    """KPO Hamiltonian matrix in units of K (single-photon drive excluded).

    The weak probe drive only enters the dynamics modules; the spectrum and
    subspace labels are defined by the undriven Hamiltonian.
    """
    check_truncation(params.alpha, space)
    a = make_annihilation(space).matrix
    ad = a.conj().T
    p_over_k = params.drive_two_photon / params.kerr
    h = -(ad @ ad @ a @ a) + p_over_k * (ad @ ad + a @ a)
    return Operator(space, h, hermitian=True)


def _sector_eigh(h: np.ndarray, indices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Diagonalize one parity block; returns (eigenvalues, full-space vectors)."""
    block = h[np.ix_(indices, indices)].real
    w, v = np.linalg.eigh(block)
    full = np.zeros((h.shape[0], len(indices)))
    full[indices, :] = v
    return w, full


def diagonalize_kpo(params: KpoParams, space: FockSpace) -> KpoSpectrum:
    """Diagonalize per parity sector and label the cat subspace.

    Raises ClassificationFailure when the analytic cats do not overlap an
    eigenvector above 0.99 (alpha too small for a clean cat subspace, or
    inadequate truncation).
    """
    h_op = build_kpo_hamiltonian(params, space)
    h = h_op.matrix
    dim = space.dim
    basis = make_cat_basis(params.alpha, space) if params.alpha > 0 else None

    even_idx = np.arange(0, dim, 2)
    odd_idx = np.arange(1, dim, 2)
    w_even, v_even = _sector_eigh(h, even_idx)
    w_odd, v_odd = _sector_eigh(h, odd_idx)

    values = np.concatenate([w_even, w_odd])
    parities = np.concatenate([np.ones(len(w_even)), -np.ones(len(w_odd))])
    vectors = np.concatenate([v_even, v_odd], axis=1)
    order = np.argsort(values, kind="stable")
    values = values[order]
    parities = parities[order]
    vectors = vectors[:, order]

    states = [StateVector(space, fix_phase(vectors[:, i])) for i in range(dim)]

    if basis is None:
        raise ClassificationFailure("cannot classify cat subspace at alpha = 0")

    overlaps_plus = np.array([abs(basis.c_plus.overlap(s)) for s in states])
    overlaps_minus = np.array([abs(basis.c_minus.overlap(s)) for s in states])
    # restrict to matching parity sectors
    overlaps_plus[parities < 0] = 0.0
    overlaps_minus[parities > 0] = 0.0
    cat_plus_idx = int(np.argmax(overlaps_plus))
    cat_minus_idx = int(np.argmax(overlaps_minus))
    if overlaps_plus[cat_plus_idx] <= CAT_OVERLAP_MIN or \
            overlaps_minus[cat_minus_idx] <= CAT_OVERLAP_MIN:
        raise ClassificationFailure(
            f"cat overlap too small at alpha={params.alpha}: "
            f"{overlaps_plus[cat_plus_idx]:.4f}/{overlaps_minus[cat_minus_idx]:.4f}"
        )

    # parity expectations are exact by construction; keep the guard anyway
    parity_diag = (-1.0) ** np.arange(dim)
    for i in (cat_plus_idx, cat_minus_idx):
        amp = states[i].amplitudes
        expect = float(np.real(np.vdot(amp, parity_diag * amp)))
        if abs(expect) <= PARITY_EXPECTATION_MIN:
            raise ClassificationFailure(f"parity expectation {expect:.4f} at index {i}")

    def next_down(sector_positions, cat_idx):
        below = [j for j in sector_positions if values[j] < values[cat_idx] - DEGENERACY_TOL]
        if not below:
            raise ClassificationFailure("no excited state below the cat pair")
        return max(below, key=lambda j: values[j])

    even_positions = [i for i in range(dim) if parities[i] > 0]
    odd_positions = [i for i in range(dim) if parities[i] < 0]
    # first excited per sector, one below the cat of that sector:
    # odd-parity partner of the + superposition, even-parity of the -
    exc_odd = next_down(odd_positions, cat_minus_idx)
    exc_even = next_down(even_positions, cat_plus_idx)

    gap = float((values[cat_plus_idx] + values[cat_minus_idx]) / 2
                - (values[exc_odd] + values[exc_even]) / 2)
    if gap <= 0:
        raise ClassificationFailure(f"non-positive gap {gap}")

    return KpoSpectrum(
        params=params, space=space, eigenvalues=values, eigenvectors=states,
        parity_label=parities.astype(int), cat_plus_idx=cat_plus_idx,
        cat_minus_idx=cat_minus_idx, first_excited_idx=(exc_odd, exc_even),
        gap=gap, cat_basis=basis,
    )
