"""Full master-equation integration on the truncated Fock space.

The generator is the standard Lindblad form

    drho/dt = -i [H, rho] + sum_k rate_k ( A_k rho A_k^dag
                                           - 1/2 {A_k^dag A_k, rho} ),

integrated as a vectorized complex ODE with an adaptive embedded
Runge-Kutta pair (error control on the entries of rho).  Densities stay
dense: at dim <= ~80 a superoperator-free right-hand side at O(dim^3) per
step is cheap and easy to test.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DimensionMismatch, PositivityLoss, StepSizeUnderflow
from .fock import CatBasis, DensityMatrix, Operator

__all__ = ["EvolutionSpec", "Trajectory", "dissipator", "evolve_master",
           "cat_subspace_populations"]

DEFAULT_RTOL = 1e-8
DEFAULT_ATOL = 1e-10
DEFAULT_METHOD = "DOP853"  # embedded adaptive RK, order >= 4(5)
POSITIVITY_TOL = -1e-6


@dataclass(frozen=True)
class EvolutionSpec:
    """What to integrate: Hamiltonian, collapse channels, times, tolerance.

    ``collapse_ops`` is a list of (operator, rate) pairs with rates in
    units of K; ``sample_times`` must ascend within [0, t_final].
    """

    hamiltonian: Operator
    collapse_ops: list[tuple[Operator, float]]
    t_final: float
    sample_times: np.ndarray
    tolerance: float = DEFAULT_RTOL
    atol: float = DEFAULT_ATOL
    method: str = DEFAULT_METHOD

    def __post_init__(self):
        ts = np.asarray(self.sample_times, dtype=float)
        if ts.ndim != 1 or len(ts) == 0:
            raise ValueError("sample_times must be a non-empty 1-d array")
        if np.any(np.diff(ts) < 0):
            raise ValueError("sample_times must ascend")
        if ts[0] < 0 or ts[-1] > self.t_final + 1e-12:
            raise ValueError("sample_times must lie within [0, t_final]")
        for op, rate in self.collapse_ops:
            self.hamiltonian.space.check_same(op.space)
            if rate < 0:
                raise ValueError("collapse rates must be non-negative")
        object.__setattr__(self, "sample_times", ts)


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution rho(t) plus bookkeeping.

    ``observables`` carries named scalar series (trace, purity, tail
    population of the top five Fock levels) recorded at the samples.
    """

    times: np.ndarray
    states: list[DensityMatrix]
    observables: dict[str, np.ndarray] = field(default_factory=dict)


def dissipator(a_op: Operator, rho: DensityMatrix | np.ndarray) -> np.ndarray:
    """Single Lindblad dissipator D[A]rho = A rho A^dag - 1/2 {A^dag A, rho}.

    Trace-free by construction and Hermiticity-preserving when rho is
    Hermitian.
    """
    if isinstance(rho, DensityMatrix):
        a_op.space.check_same(rho.space)
        r = rho.matrix
    else:
        r = np.asarray(rho, dtype=complex)
        if r.shape != a_op.matrix.shape:
            raise DimensionMismatch(
                f"rho shape {r.shape} vs operator {a_op.matrix.shape}")
    a = a_op.matrix
    ada = a.conj().T @ a
    return a @ r @ a.conj().T - 0.5 * (ada @ r + r @ ada)


def evolve_master(initial: DensityMatrix, spec: EvolutionSpec) -> Trajectory:
    """Integrate the master equation and sample it at spec.sample_times.

    The initial state must be physical (Hermitian, unit trace, PSD within
    -1e-8).  Raises StepSizeUnderflow if the integrator stalls and
    PositivityLoss if any sampled state develops an eigenvalue below
    -1e-6 (symptom of truncation or tolerance failure).
    """
    initial.space.check_same(spec.hamiltonian.space)
    initial.check_physical()
    dim = initial.space.dim
    h = spec.hamiltonian.matrix
    channels = [(op.matrix, op.matrix.conj().T @ op.matrix, rate)
                for op, rate in spec.collapse_ops if rate > 0]

    def rhs(_t, y):
        rho = y.reshape(dim, dim)
        drho = -1j * (h @ rho - rho @ h)
        for a, ada, rate in channels:
            drho += rate * (a @ rho @ a.conj().T - 0.5 * (ada @ rho + rho @ ada))
        return drho.ravel()

    sol = solve_ivp(
        rhs, (0.0, float(spec.t_final)), initial.matrix.ravel(),
        t_eval=spec.sample_times, method=spec.method,
        rtol=spec.tolerance, atol=spec.atol,
    )
    if not sol.success:
        raise StepSizeUnderflow(f"integration failed: {sol.message}")

    states = []
    traces = np.empty(len(sol.t))
    purities = np.empty(len(sol.t))
    tails = np.empty(len(sol.t))
    min_eig = 0.0
    for i in range(len(sol.t)):
        rho = sol.y[:, i].reshape(dim, dim)
        dm = DensityMatrix(initial.space, rho)
        states.append(dm)
        traces[i] = dm.trace()
        purities[i] = dm.purity()
        tails[i] = float(np.sum(np.abs(np.diag(rho))[dim - 5:]))
        min_eig = min(min_eig, dm.min_eigenvalue())
    if min_eig < POSITIVITY_TOL:
        raise PositivityLoss(
            f"sampled state reached eigenvalue {min_eig:.3e}; "
            "increase dim or tighten tolerance"
        )
    return Trajectory(
        times=np.array(sol.t), states=states,
        observables={"trace": traces, "purity": purities, "tail_population": tails},
    )


def cat_subspace_populations(rho: DensityMatrix,
                             basis: CatBasis) -> tuple[float, float, float]:
    """(p_plus, p_minus, leakage) with p_+- = <C_+-|rho|C_+->.

    ``leakage`` is 1 - p_plus - p_minus, the weight outside the cat
    subspace (for a unit-trace rho).
    """
    rho.space.check_same(basis.space)
    cp = basis.c_plus.amplitudes
    cm = basis.c_minus.amplitudes
    p_plus = float(np.real(np.vdot(cp, rho.matrix @ cp)))
    p_minus = float(np.real(np.vdot(cm, rho.matrix @ cm)))
    return p_plus, p_minus, 1.0 - p_plus - p_minus
