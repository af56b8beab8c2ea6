"""Effective non-Hermitian description of a dephasing-driven cat qubit.

Pure dephasing (collapse operator a^dag a) leaks population out of the
cat subspace asymmetrically: acting on the cats,

    n |C_+> = alpha^2 |C_+> + alpha p   (N_-/N_-^1) |psi_-^1>,
    n |C_-> = alpha^2 |C_-> + alpha p^-1(N_+/N_+^1) |psi_+^1>,

where |psi_+-^1> are the displaced-Fock superpositions
N_+-^1 (D(alpha) +- D(-alpha))|1>.  The module builds the two rank-1
leakage channels, the closed-form gain/loss rate

    gamma = (kappa_phi alpha^2 / 2) [p^-1 N_-/N_-^1 - p N_+/N_+^1],

the PT-symmetric two-level model [[i gamma, eps], [eps, -i gamma]] with
eps = 2 alpha Omega, phase diagnosis on either side of the exceptional
point gamma = eps, and the full-Fock-space non-Hermitian Hamiltonian used
to benchmark the model against the exact master equation.

The printed-model convention puts +i gamma on |C_+> (gain); the computed
rates actually make |C_+> the faster-leaking state.  Every quantity
reported here (eigenvalues, |eigenvector components|, EP locations,
concurrences downstream) depends only on |gamma|; validate_leakage_model
records the tension instead of silently flipping the sign.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import acosh, asin, cos, cosh, exp, pi, sin, sinh, sqrt

import numpy as np
from scipy.linalg import expm
from scipy.optimize import brentq
from scipy.special import eval_laguerre

from .errors import (
    DegenerateAmplitude,
    NoSignChange,
    UndefinedDiagnosis,
)
from .fock import (
    CatBasis,
    Operator,
    StateVector,
    displaced_fock_superposition,
    eig_general,
    fix_phase,
    make_annihilation,
)
from .kpo import KpoSpectrum, build_kpo_hamiltonian

__all__ = [
    "cat_normalizations",
    "norm_ratio",
    "displaced_fock_moment",
    "excited_normalizations",
    "leakage_rate_coefficients",
    "gamma_rate",
    "epsilon_coupling",
    "LeakageChannel",
    "leakage_channels",
    "LeakageModelReport",
    "validate_leakage_model",
    "PtDimer",
    "PtDiagnosis",
    "build_pt_dimer",
    "diagnose_pt",
    "evolve_effective",
    "find_ep_alpha",
    "effective_hamiltonian",
    "evolve_nonhermitian",
]

EP_TOL_FACTOR = 1e-9  # |gamma - eps| <= factor * max(gamma, eps) classifies as EP
K1_CAPTURE_THRESHOLD = 0.95


# ---------------------------------------------------------------------------
# closed-form scalar ingredients
# ---------------------------------------------------------------------------

def cat_normalizations(alpha: float) -> tuple[float, float]:
    """(N_+, N_-) = [2(1 +- e^(-2 alpha^2))]^(-1/2)."""
    _check_alpha(alpha)
    q = exp(-2 * alpha ** 2)
    return (2 * (1 + q)) ** -0.5, (2 * (1 - q)) ** -0.5


def norm_ratio(alpha: float) -> float:
    """p = N_+/N_- (equals sqrt(tanh(alpha^2)); 0 < p <= 1, -> 1 as alpha grows)."""
    n_plus, n_minus = cat_normalizations(alpha)
    return n_plus / n_minus


def displaced_fock_moment(alpha: float, k: int) -> float:
    """<k|D(-2 alpha)|k> = e^(-2 alpha^2) L_k(4 alpha^2)."""
    return exp(-2 * alpha ** 2) * float(eval_laguerre(k, 4 * alpha ** 2))


def excited_normalizations(alpha: float, k: int = 1) -> tuple[float, float]:
    """(N_+^k, N_-^k) = [2(1 +- <k|D(-2 alpha)|k>)]^(-1/2)."""
    _check_alpha(alpha)
    m = displaced_fock_moment(alpha, k)
    if 1 + m < 1e-12 or 1 - m < 1e-12:
        raise DegenerateAmplitude(f"excited normalization degenerate at alpha={alpha}")
    return (2 * (1 + m)) ** -0.5, (2 * (1 - m)) ** -0.5


def leakage_rate_coefficients(alpha: float) -> tuple[float, float]:
    """Dimensionless rate coefficients (r1, r2) of the two leakage channels.

    r1 = p N_+/N_+^1 weights the |C_-> -> |psi_+^1> channel, r2 =
    p^-1 N_-/N_-^1 the |C_+> -> |psi_-^1> channel; both approach 1 as the
    cat grows and r2 > r1 for every finite amplitude (the even cat leaks
    faster).
    """
    n_plus, n_minus = cat_normalizations(alpha)
    n1_plus, n1_minus = excited_normalizations(alpha, 1)
    p = n_plus / n_minus
    return p * n_plus / n1_plus, n_minus / (p * n1_minus)


def gamma_rate(alpha: float, kappa_phi: float) -> float:
    """Leakage-rate asymmetry gamma (units of K).

    gamma = (kappa_phi alpha^2 / 2)(r2 - r1); positive for all finite
    amplitudes and vanishing as alpha -> infinity, where the two cats
    become indistinguishable to the dephasing channel.
    """
    r1, r2 = leakage_rate_coefficients(alpha)
    return kappa_phi * alpha ** 2 / 2 * (r2 - r1)


def epsilon_coupling(alpha: float, omega: float) -> float:
    """Coherent cat-to-cat coupling eps = 2 alpha Omega of a weak drive."""
    if alpha < 0 or omega < 0:
        raise ValueError("alpha and omega must be non-negative")
    return 2.0 * alpha * omega


def mean_leak_rate(alpha: float, kappa_phi: float) -> float:
    """Amplitude decay rate common to both cats, (kappa_phi alpha^2/4)(r1+r2).

    This is the trace part excluded from the two-level model; it shows up
    as an overall norm loss of the subspace.
    """
    r1, r2 = leakage_rate_coefficients(alpha)
    return kappa_phi * alpha ** 2 / 4 * (r1 + r2)


def _check_alpha(alpha: float):
    if alpha < 1e-3:
        raise DegenerateAmplitude(f"alpha={alpha} below 1e-3: odd-cat quantities ill-conditioned")


# ---------------------------------------------------------------------------
# leakage channels and their validation against the exact eigenbasis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LeakageChannel:
    """Rank-1 leakage operator sqrt(coeff) |target><source cat|."""

    source: int                     # parity of the source cat (+1 even, -1 odd)
    target: StateVector
    rate_coefficient: float
    operator: Operator


def leakage_channels(spectrum: KpoSpectrum,
                     basis: CatBasis) -> tuple[LeakageChannel, LeakageChannel]:
    """The two dephasing-induced leakage channels out of the cat subspace.

    Channel 1 drains the odd cat into the odd-parity first-excited state,
    channel 2 the even cat into the even-parity one.  Targets are the
    exact (phase-fixed) eigenvectors; the rate coefficients are the
    closed-form normalization ratios.
    """
    r1, r2 = leakage_rate_coefficients(basis.alpha)
    exc_odd, exc_even = spectrum.first_excited_idx
    target1 = spectrum.eigenvectors[exc_odd]
    target2 = spectrum.eigenvectors[exc_even]
    op1 = Operator(basis.space, sqrt(r1) * np.outer(
        target1.amplitudes, basis.c_minus.amplitudes.conj()))
    op2 = Operator(basis.space, sqrt(r2) * np.outer(
        target2.amplitudes, basis.c_plus.amplitudes.conj()))
    return (
        LeakageChannel(source=-1, target=target1, rate_coefficient=r1, operator=op1),
        LeakageChannel(source=+1, target=target2, rate_coefficient=r2, operator=op2),
    )


@dataclass(frozen=True)
class LeakageModelReport:
    """Numerical cross-examination of the rank-1 leakage model.

    Projects the dephasing operator onto the exact KPO eigenbasis and
    compares against the closed-form model: in-subspace block of n,
    squared matrix elements from each cat into excited manifolds k=1..4,
    the fraction of out-of-subspace weight captured by k=1, overlap of the
    exact first-excited states with the displaced-Fock superpositions, and
    the gain/loss rate obtained three ways.  ``passed`` requires the k=1
    capture fraction to exceed 0.95 for both channels.
    """

    alpha: float
    in_subspace_block: np.ndarray          # 2x2: <C_i|n|C_j>, basis (C+, C-)
    cross_elements: dict[str, list[float]]  # |<psi(k)|n|C_+->|^2 for k = 1..4
    out_weight: dict[str, float]           # total out-of-subspace weight per cat
    k1_capture: dict[str, float]           # k=1 share of that weight
    dfs_overlap: dict[str, float]          # |<exact k=1|displaced-Fock k=1>|
    rate_coefficients_closed: tuple[float, float]
    rate_coefficients_projected_k1: tuple[float, float]
    rate_coefficients_projected_total: tuple[float, float]
    gamma_closed: float
    gamma_projected_k1: float
    gamma_projected_total: float
    in_subspace_dephasing_rate: float      # coherence decay (kappa/2)(n_+ - n_-)^2
    passed: bool
    notes: list[str] = field(default_factory=list)


def validate_leakage_model(spectrum: KpoSpectrum, basis: CatBasis,
                           n_manifolds: int = 4) -> LeakageModelReport:
    """Re-derive the leakage structure numerically and report the comparison.

    The projection uses the dephasing rate stored in the spectrum's
    parameters (falling back to 1.0 when zero, since only ratios matter
    for the capture fractions).
    """
    alpha = basis.alpha
    kappa = spectrum.params.dephasing or 1.0
    dim = basis.space.dim
    n_diag = np.arange(dim, dtype=float)
    cp = basis.c_plus.amplitudes
    cm = basis.c_minus.amplitudes

    block = np.array([
        [np.vdot(cp, n_diag * cp), np.vdot(cp, n_diag * cm)],
        [np.vdot(cm, n_diag * cp), np.vdot(cm, n_diag * cm)],
    ])

    n_cp = n_diag * cp
    n_cm = n_diag * cm
    # out-of-subspace components of n|C_+->
    w_plus = n_cp - block[0, 0] * cp - block[1, 0] * cm
    w_minus = n_cm - block[1, 1] * cm - block[0, 1] * cp
    out_weight = {
        "plus": float(np.real(np.vdot(w_plus, w_plus))),
        "minus": float(np.real(np.vdot(w_minus, w_minus))),
    }

    # manifold pairs below the cats, one per parity sector, ordered by k
    order = np.argsort(spectrum.eigenvalues)[::-1]
    evens = [i for i in order if spectrum.parity_label[i] > 0 and i != spectrum.cat_plus_idx]
    odds = [i for i in order if spectrum.parity_label[i] < 0 and i != spectrum.cat_minus_idx]
    cross = {"plus": [], "minus": []}
    for k in range(n_manifolds):
        even_state = spectrum.eigenvectors[evens[k]].amplitudes
        odd_state = spectrum.eigenvectors[odds[k]].amplitudes
        cross["plus"].append(float(abs(np.vdot(even_state, n_cp)) ** 2))
        cross["minus"].append(float(abs(np.vdot(odd_state, n_cm)) ** 2))

    k1_capture = {
        "plus": cross["plus"][0] / out_weight["plus"],
        "minus": cross["minus"][0] / out_weight["minus"],
    }

    dfs_plus, _ = displaced_fock_superposition(alpha, 1, +1, basis.space)
    dfs_minus, _ = displaced_fock_superposition(alpha, 1, -1, basis.space)
    exc_odd, exc_even = spectrum.first_excited_idx
    dfs_overlap = {
        "plus": abs(spectrum.eigenvectors[exc_odd].overlap(dfs_plus)),
        "minus": abs(spectrum.eigenvectors[exc_even].overlap(dfs_minus)),
    }

    r_closed = leakage_rate_coefficients(alpha)
    r_proj_k1 = (cross["minus"][0] / alpha ** 2, cross["plus"][0] / alpha ** 2)
    r_proj_tot = (out_weight["minus"] / alpha ** 2, out_weight["plus"] / alpha ** 2)
    gamma_closed = kappa * alpha ** 2 / 2 * (r_closed[1] - r_closed[0])
    gamma_k1 = kappa * alpha ** 2 / 2 * (r_proj_k1[1] - r_proj_k1[0])
    gamma_tot = kappa * alpha ** 2 / 2 * (r_proj_tot[1] - r_proj_tot[0])

    dephasing_rate = kappa / 2 * float(np.real(block[0, 0] - block[1, 1])) ** 2

    notes = [
        "sign convention: the even cat is the faster-leaking state "
        "(r2 > r1), while the two-level model places the gain on |C_+>; "
        "all reported quantities depend only on |gamma|",
        "the closed-form rate coefficients are normalization-ratio "
        "weights, not squared eigenbasis matrix elements; the projected "
        "values differ at order exp(-2 alpha^2)",
        "the in-subspace dephasing (diagonal block of n) is excluded from "
        "the two-level model; its coherence-decay rate is reported here",
    ]
    passed = (k1_capture["plus"] > K1_CAPTURE_THRESHOLD
              and k1_capture["minus"] > K1_CAPTURE_THRESHOLD)
    return LeakageModelReport(
        alpha=alpha, in_subspace_block=block, cross_elements=cross,
        out_weight=out_weight, k1_capture=k1_capture, dfs_overlap=dfs_overlap,
        rate_coefficients_closed=r_closed,
        rate_coefficients_projected_k1=r_proj_k1,
        rate_coefficients_projected_total=r_proj_tot,
        gamma_closed=gamma_closed, gamma_projected_k1=gamma_k1,
        gamma_projected_total=gamma_tot,
        in_subspace_dephasing_rate=dephasing_rate,
        passed=passed, notes=notes,
    )


# ---------------------------------------------------------------------------
# PT-symmetric two-level model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PtDimer:
    """Two-level gain/loss model [[i gamma, eps], [eps, -i gamma]].

    Basis order (|C_+>, |C_->); PT symmetry holds exactly:
    sigma_x conj(M) sigma_x = M.
    """

    gamma: float
    epsilon: float
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class PtDiagnosis:
    """Phase classification and eigensystem of a PT dimer.

    EXACT (gamma < eps): real eigenvalues +-eps cos(theta), theta =
    asin(gamma/eps).  BROKEN (gamma > eps): imaginary pair
    +-i eps sinh(theta), theta = acosh(gamma/eps).  EP: coalesced
    eigenvalue 0 with a single eigenvector, flagged defective.
    """

    phase: str                      # "EXACT", "BROKEN" or "EP"
    eigenvalues: np.ndarray
    right: np.ndarray               # columns are right eigenvectors
    left: np.ndarray
    theta: float
    defective: bool


def build_pt_dimer(gamma: float, epsilon: float) -> PtDimer:
    """Assemble the PT two-level matrix from gain/loss and coupling rates."""
    if gamma < 0 or epsilon < 0:
        raise ValueError("gamma and epsilon must be non-negative")
    m = np.array([[1j * gamma, epsilon], [epsilon, -1j * gamma]], dtype=complex)
    return PtDimer(gamma=float(gamma), epsilon=float(epsilon), matrix=m)


def diagnose_pt(dimer: PtDimer) -> PtDiagnosis:
    """Classify the PT phase and return the branch eigensystem.

    At the EP the single coalesced eigenvector (proportional to [1, -i])
    is returned in both columns with ``defective`` set and theta = pi/2
    (the exact-side limit).
    """
    g, e = dimer.gamma, dimer.epsilon
    if g == 0 and e == 0:
        raise UndefinedDiagnosis("PT diagnosis undefined for the zero matrix")
    if abs(g - e) <= EP_TOL_FACTOR * max(g, e, 1e-30):
        vec = fix_phase(np.array([1.0, -1.0j]) / sqrt(2))
        vecs = np.column_stack([vec, vec])
        return PtDiagnosis(phase="EP", eigenvalues=np.zeros(2, dtype=complex),
                           right=vecs, left=vecs.copy(), theta=pi / 2, defective=True)
    if g < e:
        theta = asin(g / e)
        energy = e * cos(theta)
        values = np.array([energy, -energy], dtype=complex)
        right = np.column_stack([
            [1.0, np.exp(-1j * theta)],
            [1.0, -np.exp(1j * theta)],
        ]).astype(complex) / sqrt(2)
        phase = "EXACT"
    else:
        theta = acosh(g / e)
        rate = e * sinh(theta)
        values = np.array([1j * rate, -1j * rate], dtype=complex)
        # eigenvectors of [[i g, e],[e, -i g]]: [1, -i e^(-+theta)]
        right = np.column_stack([
            [1.0, -1j * exp(-theta)],
            [1.0, -1j * exp(theta)],
        ]).astype(complex)
        right = right / np.linalg.norm(right, axis=0)
        phase = "BROKEN"
    right = np.column_stack([fix_phase(right[:, 0]), fix_phase(right[:, 1])])
    # left eigenvectors from the general solver, biorthonormalized
    gen = eig_general(dimer.matrix)
    left = np.empty_like(right)
    for i in range(2):
        j = int(np.argmin(np.abs(gen.values - values[i])))
        scale = np.vdot(gen.left[:, j], right[:, i])
        left[:, i] = gen.left[:, j] / np.conj(scale)
    return PtDiagnosis(phase=phase, eigenvalues=values, right=right, left=left,
                       theta=theta, defective=False)


def evolve_effective(initial: np.ndarray, dimer: PtDimer, times: np.ndarray,
                     mean_decay_rate: float = 0.0) -> dict[str, np.ndarray]:
    """Propagate a 2-vector or 2x2 density matrix under the dimer.

    Uses the exact matrix exponential of -i H t (density matrices evolve
    as rho -> e^(-iHt) rho e^(+iH^dag t)).  Populations are reported
    relative to the initial total, without renormalization, so leaked or
    gained norm shows up directly.  ``mean_decay_rate`` optionally
    restores the trace part -i Gamma_bar I excluded from the dimer.
    """
    times = np.asarray(times, dtype=float)
    init = np.asarray(initial, dtype=complex)
    h = dimer.matrix - 1j * mean_decay_rate * np.eye(2)
    n = len(times)
    p_plus = np.empty(n)
    p_minus = np.empty(n)
    coherence = np.empty(n, dtype=complex)
    if init.ndim == 1:
        total0 = float(np.linalg.norm(init) ** 2)
        for i, t in enumerate(times):
            u = expm(-1j * h * t)
            psi = u @ init
            p_plus[i] = abs(psi[0]) ** 2 / total0
            p_minus[i] = abs(psi[1]) ** 2 / total0
            coherence[i] = psi[0] * np.conj(psi[1]) / total0
    elif init.shape == (2, 2):
        total0 = float(np.trace(init).real)
        for i, t in enumerate(times):
            u = expm(-1j * h * t)
            rho = u @ init @ u.conj().T
            p_plus[i] = rho[0, 0].real / total0
            p_minus[i] = rho[1, 1].real / total0
            coherence[i] = rho[0, 1] / total0
    else:
        raise ValueError("initial must be a 2-vector or a 2x2 matrix")
    return {
        "times": times,
        "p_plus": p_plus,
        "p_minus": p_minus,
        "total": p_plus + p_minus,
        "coherence": coherence,
    }


def find_ep_alpha(omega: float, kappa_phi: float,
                  bracket: tuple[float, float] = (1.0, 2.5),
                  xtol: float = 1e-8) -> float:
    """Amplitude at which gamma(alpha) crosses eps(alpha) = 2 alpha Omega.

    Solved with Brent's method; raises NoSignChange when gamma - eps does
    not change sign over the bracket.
    """
    lo, hi = bracket

    def f(alpha):
        return gamma_rate(alpha, kappa_phi) - epsilon_coupling(alpha, omega)

    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoSignChange(
            f"gamma - eps has the same sign at both ends of [{lo}, {hi}]"
        )
    return float(brentq(f, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps))


# ---------------------------------------------------------------------------
# full-Fock-space effective model (benchmark against the master equation)
# ---------------------------------------------------------------------------

def effective_hamiltonian(spectrum: KpoSpectrum, basis: CatBasis) -> Operator:
    """Non-Hermitian Hamiltonian absorbing the leakage channels.

    H_eff = H_KPO + Omega (a^dag + a)
            - i (kappa_phi alpha^2 / 2)(r1 |C_-><C_-| + r2 |C_+><C_+|),

    built on the full Fock space with the drive and dephasing rate taken
    from the spectrum's parameters.  Evolving a state in the cat subspace
    under e^(-i H_eff t) reproduces the master equation up to the dropped
    jump (recycling) term.
    """
    params = spectrum.params
    space = spectrum.space
    h = build_kpo_hamiltonian(params, space).matrix.copy()
    a = make_annihilation(space).matrix
    h = h + params.drive_single_photon / params.kerr * (a.conj().T + a)
    r1, r2 = leakage_rate_coefficients(basis.alpha)
    kappa = params.dephasing / params.kerr
    cp = basis.c_plus.amplitudes
    cm = basis.c_minus.amplitudes
    decay = r1 * np.outer(cm, cm.conj()) + r2 * np.outer(cp, cp.conj())
    h = h - 0.5j * kappa * basis.alpha ** 2 * decay
    return Operator(space, h)


def evolve_nonhermitian(h_op: Operator, psi0: StateVector,
                        times: np.ndarray) -> np.ndarray:
    """Amplitude trajectories psi(t) = e^(-i H t) psi0 for constant H.

    Propagates through the eigendecomposition when it is well conditioned
    and falls back to per-sample matrix exponentials otherwise.  Returns
    an array of shape (len(times), dim); norms decay according to the
    anti-Hermitian part of H.
    """
    h_op.space.check_same(psi0.space)
    times = np.asarray(times, dtype=float)
    h = h_op.matrix
    out = np.empty((len(times), h.shape[0]), dtype=complex)
    w, v = np.linalg.eig(h)
    if np.linalg.cond(v) < 1e8:
        c0 = np.linalg.solve(v, psi0.amplitudes)
        for i, t in enumerate(times):
            out[i] = v @ (np.exp(-1j * w * t) * c0)
    else:
        dt = np.diff(np.concatenate([[0.0], times]))
        psi = psi0.amplitudes.copy()
        for i, step in enumerate(dt):
            if step != 0.0:
                psi = expm(-1j * h * step) @ psi
            out[i] = psi
    return out
