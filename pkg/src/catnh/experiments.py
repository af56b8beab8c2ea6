"""Configuration-driven experiments: datasets, plot scripts, validation.

Each experiment takes a flat key-value config (strict: unknown keys are
rejected before any computation), runs the relevant modules, and writes a
CSV dataset with a JSON provenance header plus a standalone plot script.

Defaults reproduce the three bundled studies:

* ``fig2``  -- cat-population dynamics under the full master equation vs
  the effective non-Hermitian model, plus an (alpha, t) discrepancy map.
* ``fig3``  -- gain/loss rate vs drive coupling across the PT transition
  of a single cat qubit, with the located exceptional point.
* ``fig4``  -- concurrence and eigenvalue branches of two coupled cat
  qubits across the sector exceptional points in the second cat size.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import ceil

import numpy as np

from . import plot_templates
from .dataset import SweepResult, config_hash
from .effective import (
    build_pt_dimer,
    diagnose_pt,
    effective_hamiltonian,
    epsilon_coupling,
    evolve_effective,
    evolve_nonhermitian,
    excited_normalizations,
    find_ep_alpha,
    gamma_rate,
    leakage_rate_coefficients,
    validate_leakage_model,
)
from .errors import CatnhError, ConfigError, NoSignChange
from .fock import (
    DensityMatrix,
    FockSpace,
    Operator,
    default_dim,
    displaced_fock_superposition,
    eig_general,
    make_annihilation,
    make_cat_basis,
    make_displacement,
    number_operator,
    parity_operator,
)
from .kpo import KpoParams, build_kpo_hamiltonian, diagonalize_kpo
from .lindblad import EvolutionSpec, cat_subspace_populations, evolve_master
from .two_kpo import (
    TwoKpoParams,
    build_two_kpo,
    analytic_eigensystem,
    concurrence_formula,
    entanglement_sweep,
    find_sector_ep,
)

try:  # package version for provenance
    from importlib.metadata import version as _pkg_version

    PACKAGE_VERSION = _pkg_version("catnh")
except Exception:  # pragma: no cover
    PACKAGE_VERSION = "0.1.0"

__all__ = ["EXPERIMENTS", "ExperimentConfig", "resolve_config", "load_config_file",
           "run_fig2", "run_fig3", "run_fig4", "run_sweep", "run_validate"]


# ---------------------------------------------------------------------------
# config schemas (strict key-value parsing)
# ---------------------------------------------------------------------------

_SCHEMAS: dict[str, dict[str, tuple[type, object]]] = {
    "fig2": {
        "alpha": (float, 1.5),
        "omega": (float, 0.01),
        "kappa_phi": (float, 0.001),
        "t_final": (float, 40.0),
        "n_samples": (int, 501),
        "alpha_grid_start": (float, 1.0),
        "alpha_grid_stop": (float, 2.5),
        "alpha_grid_step": (float, 0.1),
        "include_map": (bool, True),
        "dim": (int, None),
        "tolerance": (float, 1e-8),
        "initial": (str, "cat_plus"),
    },
    "fig3": {
        "kappa_phi": (float, 0.05),
        "omega": (float, 0.0023),
        "alpha_min": (float, 1.0),
        "alpha_max": (float, 2.5),
        "alpha_step": (float, 0.005),
    },
    "fig4": {
        "alpha": (float, 2.0),
        "kappa_phi1": (float, 0.05),
        "kappa_phi2": (float, 0.05),
        "coupling": (float, 0.001),
        "kerr2_ratio": (float, 1.0),
        "beta_min": (float, 1.0),
        "beta_max": (float, 3.0),
        "beta_step": (float, 0.005),
        "refine_radius": (float, 0.05),
        "refine_factor": (int, 10),
    },
    "sweep": {
        "model": (str, "pt_dimer"),
        "parameter": (str, "alpha"),
        "start": (float, 1.0),
        "stop": (float, 2.5),
        "step": (float, 0.005),
        "alpha": (float, 1.5),
        "omega": (float, 0.0023),
        "kappa_phi": (float, 0.05),
        "coupling": (float, 0.001),
        "kappa_phi2": (float, 0.05),
        "kerr2_ratio": (float, 1.0),
    },
    "validate": {
        "alpha": (float, 2.0),
        "dim": (int, None),
        "tolerance": (float, 1e-8),
        "leakage_alphas": (list, [1.0, 1.5, 2.0, 2.5]),
    },
}

EXPERIMENTS = tuple(_SCHEMAS)


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated experiment name plus its fully-resolved parameters."""

    experiment: str
    params: dict


def load_config_file(path) -> dict:
    """Read a YAML key-value config file into a flat mapping."""
    import yaml

    with open(path) as fh:
        loaded = yaml.safe_load(fh)
    if loaded is None:
        return {}
    if not isinstance(loaded, dict):
        raise ConfigError(f"{path}: config must be a mapping of key: value")
    return loaded


def _coerce(experiment: str, key: str, value, kind: type):
    if value is None:
        return None
    if kind is bool:
        if isinstance(value, bool):
            return value
        if isinstance(value, str) and value.lower() in ("true", "false"):
            return value.lower() == "true"
        raise ConfigError(f"{experiment}.{key}: expected a boolean, got {value!r}")
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{experiment}.{key}: expected a number, got {value!r}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            if isinstance(value, float) and value.is_integer():
                return int(value)
            raise ConfigError(f"{experiment}.{key}: expected an integer, got {value!r}")
        return int(value)
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError(f"{experiment}.{key}: expected a string, got {value!r}")
        return value
    if kind is list:
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{experiment}.{key}: expected a list, got {value!r}")
        return list(value)
    raise ConfigError(f"{experiment}.{key}: unsupported type")  # pragma: no cover


def resolve_config(experiment: str, overrides: dict | None = None) -> ExperimentConfig:
    """Merge defaults with overrides; reject unknown keys and bad types."""
    if experiment not in _SCHEMAS:
        raise ConfigError(
            f"unknown experiment {experiment!r}; choose from {', '.join(EXPERIMENTS)}")
    schema = _SCHEMAS[experiment]
    params = {key: default for key, (_, default) in schema.items()}
    for key, value in (overrides or {}).items():
        if key not in schema:
            raise ConfigError(f"unknown config key {key!r} for experiment {experiment!r}")
        params[key] = _coerce(experiment, key, value, schema[key][0])
    _validate_values(experiment, params)
    return ExperimentConfig(experiment=experiment, params=params)


def _validate_values(experiment: str, p: dict):
    for key, value in p.items():
        if isinstance(value, float) and key not in () and value < 0:
            raise ConfigError(f"{experiment}.{key} must be non-negative, got {value}")
    if experiment == "fig2":
        if p["n_samples"] < 2:
            raise ConfigError("fig2.n_samples must be at least 2")
        if p["alpha_grid_stop"] < p["alpha_grid_start"] or p["alpha_grid_step"] <= 0:
            raise ConfigError("fig2 alpha grid must ascend with positive step")
        if p["initial"] not in ("cat_plus", "cat_minus"):
            raise ConfigError("fig2.initial must be cat_plus or cat_minus")
    if experiment == "fig3" and (p["alpha_max"] <= p["alpha_min"] or p["alpha_step"] <= 0):
        raise ConfigError("fig3 alpha grid must ascend with positive step")
    if experiment == "fig4" and (p["beta_max"] <= p["beta_min"] or p["beta_step"] <= 0):
        raise ConfigError("fig4 beta grid must ascend with positive step")
    if experiment == "sweep":
        if p["model"] not in ("pt_dimer", "two_kpo"):
            raise ConfigError("sweep.model must be pt_dimer or two_kpo")
        if p["stop"] <= p["start"] or p["step"] <= 0:
            raise ConfigError("sweep grid must ascend with positive step")
        if p["model"] == "pt_dimer" and p["parameter"] not in ("alpha", "omega", "kappa_phi"):
            raise ConfigError("pt_dimer sweep parameter must be alpha, omega or kappa_phi")
        if p["model"] == "two_kpo" and p["parameter"] != "beta":
            raise ConfigError("two_kpo sweeps support parameter beta only")


def _grid(start: float, stop: float, step: float) -> np.ndarray:
    n = int(round((stop - start) / step)) + 1
    grid = start + step * np.arange(n)
    return grid[grid <= stop + 1e-12]


def _provenance(config: ExperimentConfig, dims: dict, tolerances: dict,
                wall_time: float, extra: dict | None = None) -> dict:
    prov = {
        "config": config.params,
        "config_sha256": config_hash({"experiment": config.experiment,
                                      **config.params}),
        "dims": dims,
        "tolerances": tolerances,
        "package_version": PACKAGE_VERSION,
        "wall_time_s": round(wall_time, 3),
    }
    if extra:
        prov.update(extra)
    return prov


# ---------------------------------------------------------------------------
# fig2: full master equation vs effective model
# ---------------------------------------------------------------------------

def fig2_single_alpha(alpha: float, omega: float, kappa_phi: float,
                      t_final: float, n_samples: int, dim: int | None,
                      tolerance: float, initial: str = "cat_plus") -> dict:
    """Run one (full ME, effective) pair; returns the sampled populations.

    This is the worker used by the discrepancy map; it is importable at
    module level so sweeps can distribute it over processes.
    """
    space = FockSpace(dim if dim else default_dim(alpha))
    params = KpoParams.from_alpha(alpha, drive_single_photon=omega,
                                  dephasing=kappa_phi)
    basis = make_cat_basis(alpha, space)
    times = np.linspace(0.0, t_final, n_samples)

    h_kpo = build_kpo_hamiltonian(params, space)
    a = make_annihilation(space).matrix
    h_driven = Operator(space, h_kpo.matrix + omega * (a.conj().T + a), hermitian=True)
    start = basis.c_plus if initial == "cat_plus" else basis.c_minus
    spec = EvolutionSpec(
        hamiltonian=h_driven,
        collapse_ops=[(number_operator(space), kappa_phi)],
        t_final=t_final, sample_times=times, tolerance=tolerance,
    )
    traj = evolve_master(start.to_density(), spec)
    pops = np.array([cat_subspace_populations(s, basis) for s in traj.states])
    herm_drift = max(s.hermiticity_deviation() for s in traj.states)

    spectrum = diagonalize_kpo(params, space)
    h_eff = effective_hamiltonian(spectrum, basis)
    psi = evolve_nonhermitian(h_eff, start, times)
    p_plus_eff = np.abs(psi @ basis.c_plus.amplitudes.conj()) ** 2
    p_minus_eff = np.abs(psi @ basis.c_minus.amplitudes.conj()) ** 2

    return {
        "times": times,
        "p_plus_full": pops[:, 0], "p_minus_full": pops[:, 1],
        "leakage_full": pops[:, 2],
        "p_plus_eff": p_plus_eff, "p_minus_eff": p_minus_eff,
        "dim": space.dim,
        "max_tail_population": float(np.max(traj.observables["tail_population"])),
        "trace_drift": float(np.max(np.abs(traj.observables["trace"] - 1.0))),
        "herm_drift": float(herm_drift),
    }


def _fig2_map_worker(args):
    alpha, p = args
    run = fig2_single_alpha(alpha, p["omega"], p["kappa_phi"], p["t_final"],
                            p["n_samples"], p["dim"], p["tolerance"], p["initial"])
    return alpha, run


def run_fig2(config: ExperimentConfig, out_dir, jobs: int = 1) -> list[SweepResult]:
    """Population dynamics at one alpha plus the (alpha, t) discrepancy map."""
    p = config.params
    t0 = time.perf_counter()
    results = []

    run = fig2_single_alpha(p["alpha"], p["omega"], p["kappa_phi"], p["t_final"],
                            p["n_samples"], p["dim"], p["tolerance"], p["initial"])
    discrepancy = np.abs(run["p_plus_full"] - run["p_plus_eff"])
    dynamics = SweepResult(
        experiment="fig2_dynamics",
        columns=["time", "p_plus_full", "p_minus_full", "leakage_full",
                 "p_plus_eff", "p_minus_eff", "discrepancy"],
        data={"time": run["times"], "p_plus_full": run["p_plus_full"],
              "p_minus_full": run["p_minus_full"], "leakage_full": run["leakage_full"],
              "p_plus_eff": run["p_plus_eff"], "p_minus_eff": run["p_minus_eff"],
              "discrepancy": discrepancy},
        provenance=_provenance(
            config, {"fock_dim": run["dim"]},
            {"integrator_rtol": p["tolerance"], "integrator_atol": 1e-10},
            time.perf_counter() - t0,
            {"max_discrepancy": float(discrepancy.max()),
             "max_tail_population": run["max_tail_population"],
             "trace_drift": run["trace_drift"]},
        ),
    )
    _write(dynamics, out_dir, "fig2_dynamics", plot_templates.DYNAMICS_PLOT)
    results.append(dynamics)

    if p["include_map"]:
        t1 = time.perf_counter()
        alphas = _grid(p["alpha_grid_start"], p["alpha_grid_stop"], p["alpha_grid_step"])
        args = [(float(a), p) for a in alphas]
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                rows = list(pool.map(_fig2_map_worker, args))
        else:
            rows = [_fig2_map_worker(arg) for arg in args]
        n_t = p["n_samples"]
        col_alpha = np.repeat(alphas, n_t)
        col_time = np.tile(rows[0][1]["times"], len(alphas))
        col_disc = np.concatenate([
            np.abs(r["p_plus_full"] - r["p_plus_eff"]) for _, r in rows])
        per_alpha_max = [[float(a), float(np.max(np.abs(r["p_plus_full"] - r["p_plus_eff"])))]
                         for a, r in rows]
        mapres = SweepResult(
            experiment="fig2_discrepancy_map",
            columns=["alpha", "time", "discrepancy"],
            data={"alpha": col_alpha, "time": col_time, "discrepancy": col_disc},
            provenance=_provenance(
                config, {"fock_dims": [r["dim"] for _, r in rows]},
                {"integrator_rtol": p["tolerance"], "integrator_atol": 1e-10},
                time.perf_counter() - t1,
                {"per_alpha_max_discrepancy": per_alpha_max},
            ),
        )
        _write(mapres, out_dir, "fig2_discrepancy", plot_templates.DISCREPANCY_PLOT)
        results.append(mapres)
    return results


# ---------------------------------------------------------------------------
# fig3: PT transition of a single cat qubit
# ---------------------------------------------------------------------------

def run_fig3(config: ExperimentConfig, out_dir) -> SweepResult:
    """Sweep alpha across the PT transition and locate the EP."""
    p = config.params
    t0 = time.perf_counter()
    alphas = _grid(p["alpha_min"], p["alpha_max"], p["alpha_step"])
    gam = np.array([gamma_rate(a, p["kappa_phi"]) for a in alphas])
    eps = np.array([epsilon_coupling(a, p["omega"]) for a in alphas])
    e_plus = np.empty(len(alphas), dtype=complex)
    e_minus = np.empty(len(alphas), dtype=complex)
    phase = []
    for i, a in enumerate(alphas):
        diag = diagnose_pt(build_pt_dimer(gam[i], eps[i]))
        e_plus[i], e_minus[i] = diag.eigenvalues
        phase.append(diag.phase)
    try:
        ep_alpha = find_ep_alpha(p["omega"], p["kappa_phi"],
                                 (float(alphas[0]), float(alphas[-1])), xtol=1e-10)
    except NoSignChange:
        ep_alpha = None
    result = SweepResult(
        experiment="fig3_pt_transition",
        columns=["alpha", "gamma", "epsilon", "re_e_plus", "im_e_plus",
                 "re_e_minus", "im_e_minus", "phase"],
        data={"alpha": alphas, "gamma": gam, "epsilon": eps,
              "re_e_plus": e_plus.real, "im_e_plus": e_plus.imag,
              "re_e_minus": e_minus.real, "im_e_minus": e_minus.imag,
              "phase": np.array(phase)},
        provenance=_provenance(config, {}, {"ep_root_xtol": 1e-10},
                               time.perf_counter() - t0,
                               {"ep_alpha": ep_alpha}),
    )
    _write(result, out_dir, "fig3_pt", plot_templates.PT_TRANSITION_PLOT)
    return result


# ---------------------------------------------------------------------------
# fig4: entanglement transition of two coupled cat qubits
# ---------------------------------------------------------------------------

def _fig4_grid(base: TwoKpoParams, p: dict) -> tuple[np.ndarray, dict]:
    grid = _grid(p["beta_min"], p["beta_max"], p["beta_step"])
    eps = {}
    for sector in ("f", "s"):
        try:
            eps[sector] = find_sector_ep(base, sector, (p["beta_min"], p["beta_max"]))
        except NoSignChange:
            eps[sector] = None
    fine = [grid]
    for ep in eps.values():
        if ep is not None:
            radius, factor = p["refine_radius"], p["refine_factor"]
            fine.append(_grid(max(p["beta_min"], ep - radius),
                              min(p["beta_max"], ep + radius),
                              p["beta_step"] / factor))
    merged = np.unique(np.concatenate(fine))
    return merged, eps


def run_fig4(config: ExperimentConfig, out_dir) -> SweepResult:
    """Concurrence and eigenvalue branches vs the second cat size."""
    p = config.params
    t0 = time.perf_counter()
    base = TwoKpoParams(alpha=p["alpha"], beta=p["beta_min"], coupling=p["coupling"],
                        dephasing1=p["kappa_phi1"], dephasing2=p["kappa_phi2"],
                        kerr2_ratio=p["kerr2_ratio"])
    grid, eps = _fig4_grid(base, p)
    sweep = entanglement_sweep(base, grid)

    data = {"beta": sweep.beta, "gamma2": sweep.gamma2, "delta_big": sweep.delta_big,
            "delta_small": sweep.delta_small, "j_eff": sweep.j_eff}
    columns = list(data)
    for key in ("f+", "f-", "s+", "s-"):
        suffix = key.replace("+", "_plus").replace("-", "_minus")
        data[f"re_e_{suffix}"] = sweep.energies[key].real
        data[f"im_e_{suffix}"] = sweep.energies[key].imag
        data[f"c_{suffix}"] = sweep.concurrences[key]
        data[f"dc_dbeta_{suffix}"] = sweep.dC_dbeta[key]
        columns += [f"re_e_{suffix}", f"im_e_{suffix}", f"c_{suffix}", f"dc_dbeta_{suffix}"]

    ep_conc = {}
    for sector, ep in eps.items():
        if ep is None:
            continue
        params = TwoKpoParams(alpha=base.alpha, beta=ep, coupling=base.coupling,
                              dephasing1=base.dephasing1, dephasing2=base.dephasing2,
                              kerr2_ratio=base.kerr2_ratio)
        pairs = analytic_eigensystem(build_two_kpo(params))
        ep_conc[sector] = max(pr.concurrence for pr in pairs if pr.sector == sector)

    result = SweepResult(
        experiment="fig4_entanglement",
        columns=columns,
        data=data,
        provenance=_provenance(
            config, {}, {"ep_root_xtol": 1e-12},
            time.perf_counter() - t0,
            {"ep_beta_f": eps["f"], "ep_beta_s": eps["s"],
             "concurrence_at_ep": ep_conc, "notes": sweep.notes},
        ),
    )
    _write(result, out_dir, "fig4_entanglement", plot_templates.ENTANGLEMENT_PLOT)
    return result


# ---------------------------------------------------------------------------
# generic parameter sweep
# ---------------------------------------------------------------------------

def run_sweep(config: ExperimentConfig, out_dir) -> SweepResult:
    """Custom 1-d sweep over a PT-dimer parameter or the second cat size."""
    p = config.params
    t0 = time.perf_counter()
    grid = _grid(p["start"], p["stop"], p["step"])
    if p["model"] == "pt_dimer":
        fixed = {"alpha": p["alpha"], "omega": p["omega"], "kappa_phi": p["kappa_phi"]}
        gam = np.empty(len(grid))
        eps_arr = np.empty(len(grid))
        e_plus = np.empty(len(grid), dtype=complex)
        phase = []
        for i, x in enumerate(grid):
            vals = dict(fixed)
            vals[p["parameter"]] = float(x)
            gam[i] = gamma_rate(vals["alpha"], vals["kappa_phi"])
            eps_arr[i] = epsilon_coupling(vals["alpha"], vals["omega"])
            diag = diagnose_pt(build_pt_dimer(gam[i], eps_arr[i]))
            e_plus[i] = diag.eigenvalues[0]
            phase.append(diag.phase)
        result = SweepResult(
            experiment="custom_sweep",
            columns=[p["parameter"], "gamma", "epsilon", "re_e_plus", "im_e_plus", "phase"],
            data={p["parameter"]: grid, "gamma": gam, "epsilon": eps_arr,
                  "re_e_plus": e_plus.real, "im_e_plus": e_plus.imag,
                  "phase": np.array(phase)},
            provenance=_provenance(config, {}, {}, time.perf_counter() - t0),
        )
    else:
        base = TwoKpoParams(alpha=p["alpha"], beta=float(grid[0]),
                            coupling=p["coupling"], dephasing1=p["kappa_phi"],
                            dephasing2=p["kappa_phi2"], kerr2_ratio=p["kerr2_ratio"])
        sweep = entanglement_sweep(base, grid)
        data = {"beta": sweep.beta, "j_eff": sweep.j_eff,
                "delta_big": sweep.delta_big, "delta_small": sweep.delta_small}
        columns = list(data)
        for key in ("f+", "f-", "s+", "s-"):
            suffix = key.replace("+", "_plus").replace("-", "_minus")
            data[f"c_{suffix}"] = sweep.concurrences[key]
            columns.append(f"c_{suffix}")
        result = SweepResult(
            experiment="custom_sweep", columns=columns, data=data,
            provenance=_provenance(config, {}, {}, time.perf_counter() - t0,
                                   {"ep_beta_f": sweep.ep_f, "ep_beta_s": sweep.ep_s}),
        )
    _write(result, out_dir, "custom_sweep", None)
    return result


# ---------------------------------------------------------------------------
# validation suite
# ---------------------------------------------------------------------------

@dataclass
class Check:
    name: str
    tolerance: float | None
    measured: float
    passed: bool
    required: bool = True
    detail: str = ""


def _pt_checks(checks: list[Check]):
    rng_ratios = (0.3, 0.6, 0.9)
    worst_eig = 0.0
    worst_bio = 0.0
    for ratio in rng_ratios:
        dimer = build_pt_dimer(ratio, 1.0)
        diag = diagnose_pt(dimer)
        gen = eig_general(dimer.matrix)
        for val in diag.eigenvalues:
            worst_eig = max(worst_eig, float(np.min(np.abs(gen.values - val))))
        bio = np.abs(diag.left.conj().T @ diag.right - np.eye(2))
        worst_bio = max(worst_bio, float(np.max(bio)))
    checks.append(Check("pt diagnosis eigenvalues match general solver", 1e-12,
                        worst_eig, worst_eig < 1e-12))
    checks.append(Check("pt biorthonormality <left|right> = identity", 1e-8,
                        worst_bio, worst_bio < 1e-8))

    # exact phase: sup of total population from a cat basis state is 1/(1-gamma/eps)
    worst_bound = 0.0
    for ratio in rng_ratios:
        dimer = build_pt_dimer(ratio, 1.0)
        ts = np.linspace(0, 100.0, 20001)
        series = _dimer_population_series(dimer, ts)
        bound = 1.0 / (1.0 - ratio)
        worst_bound = max(worst_bound, float(series.max() - bound))
    checks.append(Check("pt exact-phase population bound 1/(1-gamma/eps)", 1e-6,
                        worst_bound, worst_bound < 1e-6))

    # broken phase: dominant growth rate equals eps sinh(theta)
    gamma, eps = 2.0, 1.0
    theta = float(np.arccosh(gamma / eps))
    dimer = build_pt_dimer(gamma, eps)
    ts = np.linspace(5.0, 10.0, 201)
    series = _dimer_population_series(dimer, ts)
    slope = np.polyfit(ts, np.log(series), 1)[0] / 2.0
    err = abs(slope - eps * np.sinh(theta))
    checks.append(Check("pt broken-phase growth rate eps*sinh(theta)", 1e-6,
                        float(err), err < 1e-6))


def _dimer_population_series(dimer, ts):
    series = evolve_effective(np.array([1.0, 0.0], dtype=complex), dimer, ts)
    return series["total"]


def run_validate(config: ExperimentConfig, out_dir) -> tuple[dict, bool]:
    """Run the invariant suites; returns (report, all_required_passed).

    Required checks cover the linear-algebra core, the spectrum, the
    integrator, the PT module and the coupled-qubit formulas.  The
    rank-1-leakage fidelity metrics (k=1 capture, closed-form vs projected
    rates, displaced-Fock overlaps) are reported against their recorded
    thresholds but classified as model-approximation metrics: they
    describe the quality of the physical approximation, not the
    correctness of the code.
    """
    p = config.params
    t0 = time.perf_counter()
    checks: list[Check] = []
    notes: list[str] = []

    try:
        _core_checks(checks, p)
        _pt_checks(checks)
        _coupled_checks(checks)
        _leakage_metrics(checks, notes, p)
    except CatnhError as exc:
        checks.append(Check(f"aborted: {type(exc).__name__}", None, float("nan"),
                            False, detail=str(exc)))

    required_failed = [c for c in checks if c.required and not c.passed]
    all_passed = not required_failed
    report = {
        "experiment": "validate",
        "package_version": PACKAGE_VERSION,
        "wall_time_s": round(time.perf_counter() - t0, 3),
        "all_required_passed": all_passed,
        "checks": [
            {"name": c.name, "tolerance": c.tolerance, "measured": c.measured,
             "passed": c.passed, "required": c.required, "detail": c.detail}
            for c in checks
        ],
        "notes": notes,
    }
    _write_validate_report(report, out_dir)
    return report, all_passed


def _core_checks(checks: list[Check], p: dict):
    alpha = p["alpha"]
    space = FockSpace(p["dim"] if p["dim"] else default_dim(alpha))
    a = make_annihilation(space).matrix
    dim = space.dim

    comm = a @ a.conj().T - a.conj().T @ a
    err = float(np.max(np.abs((comm - np.eye(dim))[:dim - 1, :dim - 1])))
    checks.append(Check("ladder commutator identity below truncation edge", 1e-12,
                        err, err < 1e-12))

    basis = make_cat_basis(alpha, space)
    even_odd = float(np.max(np.abs(basis.c_plus.amplitudes[1::2])))
    odd_even = float(np.max(np.abs(basis.c_minus.amplitudes[0::2])))
    checks.append(Check("cat parity support", 1e-12, max(even_odd, odd_even),
                        max(even_odd, odd_even) < 1e-12))

    worst = 0.0
    for al in (0.5, 1.0, 1.5, 2.0, 3.0):
        sp = FockSpace(default_dim(al))
        b = make_cat_basis(al, sp)
        aa = make_annihilation(sp).matrix
        res1 = np.linalg.norm(aa @ b.c_plus.amplitudes - al * b.p * b.c_minus.amplitudes)
        res2 = np.linalg.norm(aa @ b.c_minus.amplitudes - al / b.p * b.c_plus.amplitudes)
        worst = max(worst, float(res1), float(res2))
    checks.append(Check("annihilation maps cats with weight alpha*p^(+-1)", 1e-10,
                        worst, worst < 1e-10))

    d_plus = make_displacement(alpha, space).matrix
    d_minus = make_displacement(-alpha, space).matrix
    interior = dim - ceil(4 * alpha) - 4
    unit = float(np.max(np.abs((d_plus @ d_minus - np.eye(dim))[:interior, :interior])))
    checks.append(Check("displacement inverse on interior block", 1e-8, unit, unit < 1e-8))

    worst = 0.0
    for al in (1.0, 2.0, 3.0):
        sp = FockSpace(default_dim(al))
        for k in (1, 2):
            for sign in (+1, -1):
                _, n_brute = displaced_fock_superposition(al, k, sign, sp)
                n_closed = excited_normalizations(al, k)[0 if sign > 0 else 1]
                worst = max(worst, abs(n_brute - n_closed))
    checks.append(Check("excited-state normalizations closed form vs direct norm",
                        1e-10, worst, worst < 1e-10))

    params = KpoParams.from_alpha(alpha, dephasing=0.05)
    h = build_kpo_hamiltonian(params, space).matrix
    par = parity_operator(space).matrix
    err = float(np.max(np.abs(h @ par - par @ h)))
    checks.append(Check("kpo commutes with photon parity", 1e-12, err, err < 1e-12))

    spectrum = diagonalize_kpo(params, space)
    split = abs(spectrum.eigenvalues[spectrum.cat_plus_idx]
                - spectrum.eigenvalues[spectrum.cat_minus_idx])
    checks.append(Check("cat pair degeneracy split", 1e-6, float(split), split < 1e-6))

    for al, tol in ((2.0, 0.15), (3.0, 0.08)):
        sp = FockSpace(default_dim(al))
        spec_a = diagonalize_kpo(KpoParams.from_alpha(al), sp)
        ratio = spec_a.gap / (4 * al ** 2)
        checks.append(Check(f"spectral gap within {int(tol*100)}% of 4Ka^2 at alpha={al}",
                            tol, float(abs(ratio - 1)), abs(ratio - 1) < tol))

    sp1 = FockSpace(default_dim(1.5))
    sp2 = FockSpace(sp1.dim + 10)
    top1 = np.sort(np.linalg.eigvalsh(build_kpo_hamiltonian(
        KpoParams.from_alpha(1.5), sp1).matrix))[-6:]
    top2 = np.sort(np.linalg.eigvalsh(build_kpo_hamiltonian(
        KpoParams.from_alpha(1.5), sp2).matrix))[-6:]
    drift = float(np.max(np.abs(top1 - top2)))
    checks.append(Check("top-6 eigenvalues stable under dim -> dim+10", 1e-8,
                        drift, drift < 1e-8))

    _integrator_checks(checks, p)


def _integrator_checks(checks: list[Check], p: dict):
    # analytic dephasing decay of a free mode
    dim = 12
    space = FockSpace(dim)
    kappa = 0.05
    rng = np.random.default_rng(7)
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho0 = m @ m.conj().T
    rho0 /= np.trace(rho0).real
    zero_h = Operator(space, np.zeros((dim, dim), dtype=complex), hermitian=True)
    t_final = 10.0
    times = np.linspace(0, t_final, 6)
    spec = EvolutionSpec(hamiltonian=zero_h,
                         collapse_ops=[(number_operator(space), kappa)],
                         t_final=t_final, sample_times=times,
                         tolerance=p["tolerance"])
    traj = evolve_master(DensityMatrix(space, rho0), spec)
    n = np.arange(dim)
    worst = 0.0
    for t, state in zip(traj.times, traj.states):
        expected = rho0 * np.exp(-kappa * (n[:, None] - n[None, :]) ** 2 * t / 2)
        worst = max(worst, float(np.max(np.abs(state.matrix - expected))))
    checks.append(Check("dephasing channel matches analytic coherence decay", 1e-8,
                        worst, worst < 1e-8))
    drift = float(np.max(np.abs(traj.observables["trace"] - 1.0)))
    checks.append(Check("trace preserved along trajectory", 1e-8, drift, drift < 1e-8))
    herm = max(s.hermiticity_deviation() for s in traj.states)
    checks.append(Check("hermiticity preserved along trajectory", 1e-10, herm,
                        herm < 1e-10))
    tail = float(np.max(traj.observables["tail_population"]))
    checks.append(Check("population above level dim-5 stays negligible", 1e-10,
                        tail, tail < 1e-10, detail="post-hoc truncation rule"))

    # unitary (kappa=0) evolution preserves purity
    alpha = 1.5
    space = FockSpace(default_dim(alpha))
    params = KpoParams.from_alpha(alpha, drive_single_photon=0.01)
    basis = make_cat_basis(alpha, space)
    h = build_kpo_hamiltonian(params, space)
    a = make_annihilation(space).matrix
    h_driven = Operator(space, h.matrix + 0.01 * (a.conj().T + a), hermitian=True)
    times = np.linspace(0, 10.0, 6)
    spec = EvolutionSpec(hamiltonian=h_driven, collapse_ops=[],
                         t_final=10.0, sample_times=times, tolerance=p["tolerance"])
    traj = evolve_master(basis.c_plus.to_density(), spec)
    purity_drift = float(np.max(np.abs(traj.observables["purity"] - 1.0)))
    checks.append(Check("unitary evolution preserves purity", 1e-8, purity_drift,
                        purity_drift < 1e-8))


def _coupled_checks(checks: list[Check]):
    rng = np.random.default_rng(11)
    sy = np.array([[0, -1j], [1j, 0]])
    flip = np.kron(sy, sy)
    worst_eig = 0.0
    worst_conc = 0.0
    for _ in range(1000):
        j, d_big, d_small = rng.uniform(0.0, 0.05, size=3)
        m = np.array([[1j * d_big, 0, 0, j], [0, 1j * d_small, j, 0],
                      [0, j, -1j * d_small, 0], [j, 0, 0, -1j * d_big]])
        analytic = []
        for split in (d_big, d_small):
            root = np.lib.scimath.sqrt(j ** 2 - split ** 2)
            if abs(j - split) < 1e-6:
                continue
            analytic += [root, -root]
        if len(analytic) < 4:
            continue
        gen = eig_general(m)
        for val in analytic:
            worst_eig = max(worst_eig, float(np.min(np.abs(gen.values - val))))
        for split, slots in ((d_big, (0, 3)), (d_small, (1, 2))):
            for s in (+1, -1):
                cal = 1j * split + s * np.lib.scimath.sqrt(j ** 2 - split ** 2)
                vec = np.zeros(4, dtype=complex)
                vec[slots[0]], vec[slots[1]] = cal, j
                nrm = np.linalg.norm(vec)
                if nrm == 0:
                    continue
                vec = vec / nrm
                spin_flip = abs(vec @ flip @ vec)
                worst_conc = max(worst_conc, abs(
                    concurrence_formula(cal, j) - spin_flip))
    checks.append(Check("coupled-model analytic eigenvalues vs general solver",
                        1e-10, worst_eig, worst_eig < 1e-10))
    checks.append(Check("concurrence formula vs spin-flip construction", 1e-10,
                        worst_conc, worst_conc < 1e-10))

    base = TwoKpoParams(alpha=2.0, beta=1.0, coupling=0.001,
                        dephasing1=0.05, dephasing2=0.05)
    worst = 0.0
    for sector in ("f", "s"):
        ep = find_sector_ep(base, sector, (1.0, 3.0))
        params = TwoKpoParams(alpha=2.0, beta=ep, coupling=0.001,
                              dephasing1=0.05, dephasing2=0.05)
        pairs = analytic_eigensystem(build_two_kpo(params))
        for pr in pairs:
            if pr.sector == sector:
                worst = max(worst, abs(pr.concurrence - 1.0))
    checks.append(Check("concurrence reaches 1 at the sector EPs", 1e-9, worst,
                        worst < 1e-9))


def _leakage_metrics(checks: list[Check], notes: list[str], p: dict):
    worst_gap = 0.0
    for alpha in p["leakage_alphas"]:
        space = FockSpace(p["dim"] if p["dim"] else default_dim(alpha))
        params = KpoParams.from_alpha(alpha, dephasing=0.05)
        spectrum = diagonalize_kpo(params, space)
        report = validate_leakage_model(spectrum, spectrum.cat_basis)
        min_capture = min(report.k1_capture.values())
        checks.append(Check(
            f"k=1 manifold captures leakage weight at alpha={alpha}", 0.95,
            float(min_capture), min_capture > 0.95, required=False,
            detail=f"capture plus/minus = {report.k1_capture['plus']:.4f}/"
                   f"{report.k1_capture['minus']:.4f}"))
        rel = abs(report.gamma_closed - report.gamma_projected_total) / abs(
            report.gamma_closed)
        checks.append(Check(
            f"closed-form gamma vs eigenbasis projection at alpha={alpha}", 1e-6,
            float(rel), rel < 1e-6, required=False,
            detail=f"closed {report.gamma_closed:.4e}, projected total "
                   f"{report.gamma_projected_total:.4e}, projected k=1 "
                   f"{report.gamma_projected_k1:.4e}"))
        min_overlap = min(report.dfs_overlap.values())
        checks.append(Check(
            f"displaced-Fock vs exact first-excited overlap at alpha={alpha}", 0.99,
            float(min_overlap), min_overlap > 0.99, required=False))
        worst_gap = max(worst_gap, rel)
        if alpha == p["leakage_alphas"][0]:
            notes.extend(report.notes)
    notes.append(
        "model-approximation metrics quantify the rank-1 leakage ansatz; "
        "they do not gate the exit status (see decisions on the recorded "
        "thresholds vs the measured physics)")

    worst = 0.0
    for alpha in (0.5, 1.0, 2.0, 3.0):
        r1, r2 = leakage_rate_coefficients(alpha)
        if r2 <= r1:
            worst = max(worst, r1 - r2)
    checks.append(Check("leakage asymmetry sign: even cat leaks faster", 0.0,
                        float(worst), worst == 0.0))


def _write_validate_report(report: dict, out_dir):
    import json

    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "validate_report.json"), "w") as fh:
        json.dump(report, fh, indent=2)
    lines = [
        "catnh validation report",
        f"package version: {report['package_version']}",
        f"all required checks passed: {report['all_required_passed']}",
        "",
        f"{'check':64s} {'tolerance':>10s} {'measured':>12s} {'status':>8s}",
        "-" * 100,
    ]
    for c in report["checks"]:
        tol = "-" if c["tolerance"] is None else f"{c['tolerance']:.1e}"
        status = "PASS" if c["passed"] else ("FAIL" if c["required"] else "fail*")
        lines.append(f"{c['name']:64s} {tol:>10s} {c['measured']:>12.3e} {status:>8s}")
        if c["detail"]:
            lines.append(f"{'':8s}{c['detail']}")
    lines.append("")
    lines.append("fail* = model-approximation metric below its recorded threshold "
                 "(informational, does not gate the exit status)")
    for note in report["notes"]:
        lines.append(f"note: {note}")
    with open(os.path.join(out_dir, "validate_report.txt"), "w") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# shared output helpers
# ---------------------------------------------------------------------------

def _write(result: SweepResult, out_dir, stem: str, template: str | None):
    os.makedirs(out_dir, exist_ok=True)
    csv_name = f"{stem}.csv"
    result.to_csv(os.path.join(out_dir, csv_name))
    if template is not None:
        script = plot_templates.render(template, csv_name)
        with open(os.path.join(out_dir, f"{stem}_plot.py"), "w") as fh:
            fh.write(script)
