"""Two coupled cat qubits: 4x4 non-Hermitian model and entanglement sweep.

Projecting an exchange coupling g(a^dag b + a b^dag) onto the joint cat
subspace |C_+- C_+-> of two dephasing-driven KPOs gives

    H = [[ i Dl, 0,    0,   J ],
         [ 0,    i dl, J,   0 ],
         [ 0,    J,   -i dl,0 ],
         [ J,    0,    0,  -i Dl]],

with Dl = gamma_1 + gamma_2, dl = gamma_1 - gamma_2, J = 2 alpha beta g.
The parity block structure splits it into two independent PT dimers: the
f sector spans (|C+C+>, |C-C->) with imaginary splitting Dl, the s sector
spans (|C+C->, |C-C+>) with dl.  Eigenvectors are Bell-like and their
concurrence C = 2J|E|/(J^2+|E|^2) reaches 1 exactly at (and beyond) each
sector's exceptional point J = |splitting|.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .effective import gamma_rate
from .errors import NoSignChange, UndefinedConcurrence
from .fock import fix_phase

__all__ = [
    "TwoKpoParams",
    "TwoQubitNh",
    "EntangledEigenpair",
    "build_two_kpo",
    "analytic_eigensystem",
    "concurrence_formula",
    "find_sector_ep",
    "entanglement_sweep",
    "TwoKpoSweep",
]


@dataclass(frozen=True)
class TwoKpoParams:
    """Cat sizes, coupling and dephasing rates of two coupled KPOs.

    Rates are in units of K_1; ``kerr2_ratio`` = K_2/K_1 only enters the
    weak-coupling sanity check (the projected model depends on the second
    Kerr coefficient solely through beta).
    """

    alpha: float
    beta: float
    coupling: float
    dephasing1: float
    dephasing2: float
    kerr2_ratio: float = 1.0

    def __post_init__(self):
        if self.alpha < 1e-3 or self.beta < 1e-3:
            from .errors import DegenerateAmplitude
            raise DegenerateAmplitude("cat sizes must be at least 1e-3")
        if self.coupling < 0 or self.dephasing1 < 0 or self.dephasing2 < 0:
            raise ValueError("coupling and dephasing rates must be non-negative")
        gap = 4 * min(self.alpha ** 2, self.kerr2_ratio * self.beta ** 2)
        if self.coupling >= 0.1 * gap:
            warnings.warn(
                f"coupling {self.coupling} is not small against the smaller "
                f"spectral gap {gap:.3g}", stacklevel=2,
            )

    @property
    def gamma1(self) -> float:
        return gamma_rate(self.alpha, self.dephasing1)

    @property
    def gamma2(self) -> float:
        return gamma_rate(self.beta, self.dephasing2)

    @property
    def delta_big(self) -> float:
        return self.gamma1 + self.gamma2

    @property
    def delta_small(self) -> float:
        return self.gamma1 - self.gamma2

    @property
    def j_eff(self) -> float:
        return 2 * self.alpha * self.beta * self.coupling


@dataclass(frozen=True)
class TwoQubitNh:
    """4x4 non-Hermitian matrix in the basis (C+C+, C+C-, C-C+, C-C-)."""

    params: TwoKpoParams
    matrix: np.ndarray
    delta_big: float
    delta_small: float
    j_eff: float


@dataclass(frozen=True)
class EntangledEigenpair:
    """One eigenpair of the coupled model.

    ``sector`` is "f" (outer parity block) or "s" (inner block),
    ``branch`` +-1, ``cal_e`` the amplitude i*splitting +-
    sqrt(J^2 - splitting^2) entering both the eigenvector and the
    concurrence.  ``coalesced`` marks pairs within an EP neighborhood.
    """

    sector: str
    branch: int
    energy: complex
    cal_e: complex
    eigenvector: np.ndarray
    concurrence: float
    coalesced: bool = False


def build_two_kpo(params: TwoKpoParams) -> TwoQubitNh:
    """Assemble the projected 4x4 model from the derived rates."""
    d_big, d_small, j = params.delta_big, params.delta_small, params.j_eff
    m = np.array([
        [1j * d_big, 0, 0, j],
        [0, 1j * d_small, j, 0],
        [0, j, -1j * d_small, 0],
        [j, 0, 0, -1j * d_big],
    ], dtype=complex)
    m.flags.writeable = False
    return TwoQubitNh(params=params, matrix=m, delta_big=d_big,
                      delta_small=d_small, j_eff=j)


def _sector_pairs(splitting: float, j: float, sector: str) -> list[EntangledEigenpair]:
    root = np.lib.scimath.sqrt(j ** 2 - splitting ** 2)  # principal branch
    slots = (0, 3) if sector == "f" else (1, 2)
    pairs = []
    coalesced = abs(j - abs(splitting)) <= 1e-9 * max(j, abs(splitting), 1e-30)
    for branch in (+1, -1):
        energy = branch * root
        cal_e = 1j * splitting + energy
        vec = np.zeros(4, dtype=complex)
        vec[slots[0]] = cal_e
        vec[slots[1]] = j
        nrm = np.linalg.norm(vec)
        if nrm > 0:
            vec = fix_phase(vec / nrm)
        conc = concurrence_formula(cal_e, j) if (j > 0 or abs(cal_e) > 0) else 0.0
        pairs.append(EntangledEigenpair(
            sector=sector, branch=branch, energy=complex(energy),
            cal_e=complex(cal_e), eigenvector=vec, concurrence=conc,
            coalesced=coalesced,
        ))
    return pairs


def analytic_eigensystem(model: TwoQubitNh) -> list[EntangledEigenpair]:
    """All four eigenpairs in closed form, ordered (f+, f-, s+, s-).

    Each eigenvector is checked against the matrix: ||H v - E v|| must not
    exceed 1e-10 ||H||.
    """
    pairs = (_sector_pairs(model.delta_big, model.j_eff, "f")
             + _sector_pairs(model.delta_small, model.j_eff, "s"))
    scale = max(np.max(np.abs(model.matrix)), 1e-30)
    for pair in pairs:
        if np.linalg.norm(pair.eigenvector) == 0:
            continue
        resid = np.linalg.norm(model.matrix @ pair.eigenvector
                               - pair.energy * pair.eigenvector)
        if resid > 1e-10 * scale:
            raise AssertionError(
                f"analytic eigenpair {pair.sector}{pair.branch:+d} residual {resid:.3e}")
    return pairs


def concurrence_formula(cal_e: complex, j_eff: float) -> float:
    """Concurrence 2 J |E| / (J^2 + |E|^2) of a [E, J]-weighted Bell-like state.

    Equals 1 exactly when |E| = J and 0 when either weight vanishes.
    """
    mag = abs(cal_e)
    if j_eff == 0 and mag == 0:
        raise UndefinedConcurrence("concurrence undefined for the zero vector")
    return float(2 * j_eff * mag / (j_eff ** 2 + mag ** 2))


def _splitting_fn(base: TwoKpoParams, sector: str):
    g1 = base.gamma1

    def splitting(beta: float) -> float:
        g2 = gamma_rate(beta, base.dephasing2)
        return g1 + g2 if sector == "f" else abs(g1 - g2)

    return splitting


def find_sector_ep(base: TwoKpoParams, sector: str,
                   bracket: tuple[float, float],
                   xtol: float = 1e-12) -> float:
    """Locate the beta at which J(beta) meets the sector splitting.

    The s-sector splitting is |gamma_1 - gamma_2|: the crossing occurs on
    a branch where gamma_2 exceeds gamma_1 and the printed difference is
    negative, so the root is taken against the magnitude.  Raises
    NoSignChange when no crossing lies in the bracket.
    """
    if sector not in ("f", "s"):
        raise ValueError("sector must be 'f' or 's'")
    splitting = _splitting_fn(base, sector)

    def f(beta: float) -> float:
        return 2 * base.alpha * beta * base.coupling - splitting(beta)

    lo, hi = bracket
    f_lo, f_hi = f(lo), f(hi)
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoSignChange(
            f"J - splitting({sector}) does not change sign on [{lo}, {hi}]")
    return float(brentq(f, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps))


@dataclass(frozen=True)
class TwoKpoSweep:
    """Columns of an entanglement sweep over the second cat size."""

    beta: np.ndarray
    gamma2: np.ndarray
    delta_big: np.ndarray
    delta_small: np.ndarray
    j_eff: np.ndarray
    energies: dict[str, np.ndarray]       # keys f+, f-, s+, s- (complex)
    concurrences: dict[str, np.ndarray]
    dC_dbeta: dict[str, np.ndarray]
    ep_f: float | None
    ep_s: float | None
    notes: list[str] = field(default_factory=list)


def entanglement_sweep(base: TwoKpoParams, beta_grid: np.ndarray) -> TwoKpoSweep:
    """Evaluate the four eigenbranches along a beta grid and locate the EPs.

    Derivatives are central differences at grid resolution (np.gradient on
    the possibly non-uniform grid).  Missing EPs are recorded in ``notes``
    rather than raised.
    """
    beta_grid = np.asarray(beta_grid, dtype=float)
    if beta_grid.ndim != 1 or len(beta_grid) < 3:
        raise ValueError("beta grid must be 1-d with at least 3 points")
    if np.any(np.diff(beta_grid) <= 0):
        raise ValueError("beta grid must strictly ascend")

    n = len(beta_grid)
    keys = ["f+", "f-", "s+", "s-"]
    energies = {k: np.empty(n, dtype=complex) for k in keys}
    concs = {k: np.empty(n) for k in keys}
    gamma2 = np.empty(n)
    d_big = np.empty(n)
    d_small = np.empty(n)
    j_eff = np.empty(n)
    for i, beta in enumerate(beta_grid):
        params = TwoKpoParams(alpha=base.alpha, beta=float(beta),
                              coupling=base.coupling, dephasing1=base.dephasing1,
                              dephasing2=base.dephasing2,
                              kerr2_ratio=base.kerr2_ratio)
        model = build_two_kpo(params)
        gamma2[i] = params.gamma2
        d_big[i] = model.delta_big
        d_small[i] = model.delta_small
        j_eff[i] = model.j_eff
        for pair in analytic_eigensystem(model):
            key = f"{pair.sector}{'+' if pair.branch > 0 else '-'}"
            energies[key][i] = pair.energy
            concs[key][i] = pair.concurrence

    dC = {k: np.gradient(concs[k], beta_grid) for k in keys}

    notes = []
    eps = {}
    for sector in ("f", "s"):
        try:
            eps[sector] = find_sector_ep(base, sector,
                                         (float(beta_grid[0]), float(beta_grid[-1])))
        except NoSignChange as exc:
            eps[sector] = None
            notes.append(f"sector {sector}: {exc}")

    return TwoKpoSweep(
        beta=beta_grid, gamma2=gamma2, delta_big=d_big, delta_small=d_small,
        j_eff=j_eff, energies=energies, concurrences=concs, dC_dbeta=dC,
        ep_f=eps["f"], ep_s=eps["s"], notes=notes,
    )
