"""catnh: dephasing-induced non-Hermitian dynamics of Kerr-cat qubits.

A simulator library plus CLI that benchmarks an effective non-Hermitian
description of a dephasing-driven Kerr parametric oscillator against the
full Lindblad master equation, maps the PT-symmetry-breaking transition
of a single cat qubit, and maps the exceptional-point entanglement
transition of two coupled cat qubits.
"""

from .errors import (
    CatnhError,
    ClassificationFailure,
    ConfigError,
    ConvergenceFailure,
    DegenerateAmplitude,
    DimensionMismatch,
    NoSignChange,
    PositivityLoss,
    StepSizeUnderflow,
    TruncationError,
    UndefinedConcurrence,
    UndefinedDiagnosis,
)
from .fock import (
    CatBasis,
    DensityMatrix,
    FockSpace,
    GeneralEigensystem,
    Operator,
    StateVector,
    cat_state,
    coherent_state,
    default_dim,
    displaced_fock_superposition,
    eig_general,
    eig_hermitian,
    fock_state,
    identity_operator,
    make_annihilation,
    make_cat_basis,
    make_displacement,
    number_operator,
    parity_operator,
)
from .kpo import KpoParams, KpoSpectrum, build_kpo_hamiltonian, diagonalize_kpo
from .lindblad import (
    EvolutionSpec,
    Trajectory,
    cat_subspace_populations,
    dissipator,
    evolve_master,
)
from .effective import (
    LeakageChannel,
    LeakageModelReport,
    PtDiagnosis,
    PtDimer,
    build_pt_dimer,
    diagnose_pt,
    effective_hamiltonian,
    epsilon_coupling,
    evolve_effective,
    evolve_nonhermitian,
    find_ep_alpha,
    gamma_rate,
    leakage_channels,
    validate_leakage_model,
)
from .two_kpo import (
    EntangledEigenpair,
    TwoKpoParams,
    TwoQubitNh,
    analytic_eigensystem,
    build_two_kpo,
    concurrence_formula,
    entanglement_sweep,
    find_sector_ep,
)
from .dataset import SweepResult

__version__ = "0.1.0"
