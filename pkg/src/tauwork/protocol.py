"""The two-point-measurement work protocol and its fluctuation relations.

Three pipelines share the same bookkeeping:

* ``flat`` -- projective energy measurement, an arbitrary Kraus channel, a
  second measurement in the final Hamiltonian's eigenbasis. The exponential
  work average obeys the generalized equality with a correction term for
  non-unital channels.
* ``dilated`` -- the internal Hamiltonian is fixed but the particle's clock
  runs at a rate ``alpha`` relative to the laboratory at the second
  measurement point, so every energy eigenvalue is rescaled and the work
  variable is diagonal in the initial eigenbasis.
* ``appendix`` (driven) -- the internal Hamiltonian depends on proper time;
  the evolution is a time-ordered product and the final measurement basis is
  either the transported initial eigenbasis or the eigenbasis of the final
  laboratory-frame Hamiltonian.

Work distributions are exact discrete atom lists, so every estimator is a
finite sum; Monte Carlo sampling is provided as a front-end for the exact
distribution, not as the primary estimator.
"""

from __future__ import annotations

from dataclasses import dataclass
import json

import numpy as np

from .channels import PropagatorSchedule, QuantumChannel, time_ordered_propagator, unitality_deviation
from .operators import HermitianOperator, Spectrum, spectral_decompose
from .spacetime import DilationProfile
from .thermo import (
    free_energy_difference,
    free_energy_difference_from_values,
    log_sum_exp,
    thermal_state,
)

PROB_SUM_ATOL = 1e-10
PROB_NEGATIVE_ATOL = 1e-12
MERGE_REL_TOL = 1e-9

FINAL_BASES = ("evolved", "instantaneous")


@dataclass(frozen=True)
class WorkDistribution:
    """Discrete work atoms (value, probability), sorted and deduplicated.

    Atoms closer than ``merge_tol`` are combined into one at their
    probability-weighted mean value; forbidden transitions (zero weight)
    are dropped, so the remaining atoms are exactly the support.
    """

    values: np.ndarray
    probs: np.ndarray
    merge_tol: float

    def __init__(self, values, probs, merge_tol: float):
        values = np.array(values, dtype=float)
        probs = np.array(probs, dtype=float)
        if values.shape != probs.shape or values.ndim != 1 or values.size == 0:
            raise ValueError("values and probs must be equal-length 1-D arrays")
        if not (np.all(np.isfinite(values)) and np.all(np.isfinite(probs))):
            raise ValueError("work atoms must be finite")
        if np.any(probs < -PROB_NEGATIVE_ATOL):
            raise ValueError(f"negative atom probability: {probs.min():.3e}")
        total = probs.sum()
        if abs(total - 1.0) > PROB_SUM_ATOL:
            raise ValueError(f"atom probabilities sum to {total!r}, not 1")
        values, probs = _merge_atoms(values, np.clip(probs, 0.0, None), merge_tol)
        keep = probs > 0.0
        values, probs = values[keep], probs[keep]
        values.flags.writeable = False
        probs.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "merge_tol", float(merge_tol))

    @property
    def size(self) -> int:
        return self.values.size

    def mean(self) -> float:
        return float(self.values @ self.probs)


def _merge_atoms(values: np.ndarray, probs: np.ndarray, tol: float):
    """Cluster near-equal work values; repeat until all gaps exceed ``tol``."""
    order = np.argsort(values, kind="stable")
    values, probs = values[order], probs[order]
    while True:
        merged_v, merged_p = [], []
        i = 0
        changed = False
        while i < values.size:
            j = i + 1
            while j < values.size and values[j] - values[i] < tol:
                j += 1
            block_p = probs[i:j].sum()
            if block_p > 0.0:
                v = float(values[i:j] @ probs[i:j] / block_p)
            else:
                v = float(values[i:j].mean())
            merged_v.append(v)
            merged_p.append(float(block_p))
            changed = changed or (j - i > 1)
            i = j
        values = np.array(merged_v)
        probs = np.array(merged_p)
        if not changed:
            return values, probs


def default_merge_tol(values: np.ndarray) -> float:
    spread = float(values.max() - values.min()) if values.size else 0.0
    return MERGE_REL_TOL * max(1.0, spread)


def conditional_probabilities(
    spec0: Spectrum, spec_final: Spectrum, channel: QuantumChannel
) -> np.ndarray:
    """Transition matrix P[n, m] = Tr(P_n Theta(P_m)) between energy eigenbases.

    Columns (fixed initial outcome m) sum to 1 by trace preservation. Tiny
    negative entries from rounding are clamped to zero and each column is
    renormalized; anything beyond rounding noise raises.
    """
    if not spec0.dim == spec_final.dim == channel.dim:
        raise ValueError("initial basis, final basis and channel dimensions differ")
    v0 = spec0.eigenvectors
    vf = spec_final.eigenvectors
    d = spec0.dim
    p = np.empty((d, d), dtype=float)
    for m in range(d):
        pm = np.outer(v0[:, m], v0[:, m].conj())
        out = channel.apply_matrix(pm)
        p[:, m] = np.real(np.einsum("in,ij,jn->n", vf.conj(), out, vf))
    if p.min() < -PROB_NEGATIVE_ATOL or p.max() > 1.0 + PROB_NEGATIVE_ATOL:
        raise ValueError(
            f"transition probabilities outside [0, 1]: min {p.min():.3e}, "
            f"max {p.max():.3e}"
        )
    cols = p.sum(axis=0)
    if np.max(np.abs(cols - 1.0)) > PROB_SUM_ATOL:
        raise ValueError("transition matrix columns do not sum to 1")
    p = np.clip(p, 0.0, 1.0)
    return p / p.sum(axis=0, keepdims=True)


def _transition_probabilities_unitary(
    final_vectors: np.ndarray, u: np.ndarray, initial_vectors: np.ndarray
) -> np.ndarray:
    amp = final_vectors.conj().T @ u @ initial_vectors
    p = np.abs(amp) ** 2
    return np.clip(p, 0.0, 1.0)


def tpm_distribution(
    initial_energies: np.ndarray,
    initial_probs: np.ndarray,
    final_energies: np.ndarray,
    transitions: np.ndarray,
) -> WorkDistribution:
    """Assemble work atoms W[n, m] = E_final[n] - E_initial[m] with joint weights."""
    w = final_energies[:, None] - initial_energies[None, :]
    joint = transitions * initial_probs[None, :]
    flat_w = w.ravel()
    return WorkDistribution(flat_w, joint.ravel(), default_merge_tol(flat_w))


def work_distribution_flat(
    h0: HermitianOperator,
    h_final: HermitianOperator,
    channel: QuantumChannel,
    beta: float,
) -> WorkDistribution:
    """Work statistics for the flat pipeline: thermal start, channel, final basis."""
    spec0 = spectral_decompose(h0)
    spec_f = spectral_decompose(h_final)
    ens = thermal_state(spec0, beta)
    trans = conditional_probabilities(spec0, spec_f, channel)
    return tpm_distribution(spec0.eigenvalues, ens.probs, spec_f.eigenvalues, trans)


def work_distribution_dilated(
    spec0: Spectrum, alpha_final: float, beta: float
) -> WorkDistribution:
    """Work statistics when the spectrum is rescaled by the final clock rate.

    Eigenstates ride along the evolution, so each trajectory keeps its level
    index and the work atoms are exactly (alpha - 1) * E_m with the thermal
    weights.
    """
    if alpha_final <= 0:
        raise ValueError(f"alpha_final must be positive, got {alpha_final!r}")
    ens = thermal_state(spec0, beta)
    values = (alpha_final - 1.0) * spec0.eigenvalues
    return WorkDistribution(values, ens.probs, default_merge_tol(values))


def jarzynski_lhs(wd: WorkDistribution, beta: float) -> float:
    """The exponential work average sum_i p_i e^(-beta w_i), max-shifted."""
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta!r}")
    x = -beta * wd.values
    shift = float(x.max())
    return float(np.exp(shift) * np.sum(wd.probs * np.exp(x - shift)))


def generalized_jarzynski_rhs(
    h_final: HermitianOperator, channel: QuantumChannel, beta: float, delta_f: float
) -> float:
    """Equilibrium side of the work equality, with the non-unital correction.

    For unital channels this is exactly e^(-beta delta_f). Otherwise the
    correction is Tr[(Theta(1) - 1) w_final], i.e. the unitality deviation
    traced against the final Gibbs state and scaled back up by the dimension
    (the deviation is stored relative to the maximally mixed state 1/d).
    """
    if channel.is_unital:
        return float(np.exp(-beta * delta_f))
    ens = thermal_state(h_final, beta)
    g = unitality_deviation(channel)
    correction = channel.dim * float(
        np.trace(g @ ens.density_operator().matrix).real
    )
    return float(np.exp(-beta * delta_f) * (1.0 + correction))


def entropy_production(mean_work: float, delta_f: float, beta: float) -> float:
    """Mean irreversible entropy: beta * (<W> - delta F), nonnegative for
    unital processes by Jensen's inequality."""
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta!r}")
    return beta * (mean_work - delta_f)


def sample_outcomes(wd: WorkDistribution, n: int, seed: int) -> np.ndarray:
    """n i.i.d. draws of the work variable; deterministic for a fixed seed."""
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n!r}")
    rng = np.random.default_rng(seed)
    probs = wd.probs / wd.probs.sum()
    idx = rng.choice(wd.size, size=n, p=probs)
    return wd.values[idx]


CSV_COLUMNS = (
    "scenario_id",
    "pipeline",
    "dim",
    "beta",
    "alpha_final",
    "tau_total",
    "mean_work",
    "delta_F",
    "lhs",
    "rhs",
    "residual",
    "entropy_production",
    "final_basis",
    "steps",
)


@dataclass(frozen=True)
class ProtocolReport:
    """One protocol run, flattened to the canonical report columns."""

    scenario_id: str
    pipeline: str
    dim: int
    beta: float
    alpha_final: float
    tau_total: float
    mean_work: float
    delta_F: float
    lhs: float
    rhs: float
    residual: float
    entropy_production: float
    final_basis: str
    steps: int

    @classmethod
    def build(
        cls,
        *,
        scenario_id: str,
        pipeline: str,
        dim: int,
        beta: float,
        alpha_final: float,
        tau_total: float,
        mean_work: float,
        delta_F: float,
        lhs: float,
        rhs: float,
        final_basis: str,
        steps: int,
    ) -> "ProtocolReport":
        beta, mean_work, delta_F = float(beta), float(mean_work), float(delta_F)
        lhs, rhs = float(lhs), float(rhs)
        return cls(
            scenario_id=str(scenario_id),
            pipeline=str(pipeline),
            dim=int(dim),
            beta=beta,
            alpha_final=float(alpha_final),
            tau_total=float(tau_total),
            mean_work=mean_work,
            delta_F=delta_F,
            lhs=lhs,
            rhs=rhs,
            residual=lhs - rhs,
            entropy_production=beta * (mean_work - delta_F),
            final_basis=str(final_basis),
            steps=int(steps),
        )

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in CSV_COLUMNS}

    def to_csv_row(self) -> str:
        return ",".join(_csv_cell(getattr(self, name)) for name in CSV_COLUMNS)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @staticmethod
    def csv_header() -> str:
        return ",".join(CSV_COLUMNS)


def _csv_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class FlatRun:
    """Prepared inputs for the flat pipeline."""

    scenario_id: str
    beta: float
    h0: HermitianOperator
    h_final: HermitianOperator
    channel: QuantumChannel


@dataclass(frozen=True)
class DilatedRun:
    """Prepared inputs for the time-independent dilated pipeline."""

    scenario_id: str
    beta: float
    h0: HermitianOperator
    profile: DilationProfile


@dataclass(frozen=True)
class AppendixRun:
    """Prepared inputs for the driven (proper-time-dependent) pipeline."""

    scenario_id: str
    beta: float
    schedule: PropagatorSchedule
    final_basis: str = "evolved"

    def __post_init__(self):
        if self.final_basis not in FINAL_BASES:
            raise ValueError(
                f"final_basis must be one of {FINAL_BASES}, got {self.final_basis!r}"
            )


def run_protocol(run) -> ProtocolReport:
    """Dispatch a prepared run to its pipeline and assemble the report."""
    if isinstance(run, FlatRun):
        return _run_flat(run)
    if isinstance(run, DilatedRun):
        return _run_dilated(run)
    if isinstance(run, AppendixRun):
        return _run_appendix(run)
    raise TypeError(f"unsupported run type: {type(run).__name__}")


def _run_flat(run: FlatRun) -> ProtocolReport:
    spec0 = spectral_decompose(run.h0)
    spec_f = spectral_decompose(run.h_final)
    ens0 = thermal_state(spec0, run.beta)
    trans = conditional_probabilities(spec0, spec_f, run.channel)
    wd = tpm_distribution(spec0.eigenvalues, ens0.probs, spec_f.eigenvalues, trans)
    delta_f = free_energy_difference_from_values(
        spec_f.eigenvalues, spec0.eigenvalues, run.beta
    )
    lhs = jarzynski_lhs(wd, run.beta)
    rhs = generalized_jarzynski_rhs(run.h_final, run.channel, run.beta, delta_f)
    return ProtocolReport.build(
        scenario_id=run.scenario_id,
        pipeline="flat",
        dim=run.h0.dim,
        beta=run.beta,
        alpha_final=1.0,
        tau_total=0.0,
        mean_work=wd.mean(),
        delta_F=delta_f,
        lhs=lhs,
        rhs=rhs,
        final_basis="instantaneous",
        steps=0,
    )


def _run_dilated(run: DilatedRun) -> ProtocolReport:
    spec0 = spectral_decompose(run.h0)
    alpha = run.profile.alpha_final
    wd = work_distribution_dilated(spec0, alpha, run.beta)
    delta_f = free_energy_difference(spec0, alpha, run.beta)
    lhs = jarzynski_lhs(wd, run.beta)
    rhs = float(np.exp(-run.beta * delta_f))
    return ProtocolReport.build(
        scenario_id=run.scenario_id,
        pipeline="dilated",
        dim=run.h0.dim,
        beta=run.beta,
        alpha_final=alpha,
        tau_total=run.profile.tau_total,
        mean_work=wd.mean(),
        delta_F=delta_f,
        lhs=lhs,
        rhs=rhs,
        final_basis="evolved",
        steps=0,
    )


def _run_appendix(run: AppendixRun) -> ProtocolReport:
    sched = run.schedule
    prof = sched.dilation
    alpha = prof.alpha_final
    u = time_ordered_propagator(sched)
    spec0 = spectral_decompose(sched.initial_hamiltonian())
    ens0 = thermal_state(spec0, run.beta)
    h_lab_final = alpha * sched.final_hamiltonian().matrix

    if run.final_basis == "evolved":
        vectors_f = u @ spec0.eigenvectors
        energies_f = np.real(
            np.einsum("in,ij,jn->n", vectors_f.conj(), h_lab_final, vectors_f)
        )
    else:
        spec_f = spectral_decompose(HermitianOperator(h_lab_final))
        vectors_f = spec_f.eigenvectors
        energies_f = spec_f.eigenvalues

    trans = _transition_probabilities_unitary(vectors_f, u, spec0.eigenvectors)
    wd = tpm_distribution(spec0.eigenvalues, ens0.probs, energies_f, trans)
    delta_f = free_energy_difference_from_values(
        energies_f, spec0.eigenvalues, run.beta
    )
    lhs = jarzynski_lhs(wd, run.beta)
    rhs = float(np.exp(-run.beta * delta_f))
    return ProtocolReport.build(
        scenario_id=run.scenario_id,
        pipeline="appendix",
        dim=sched.dim,
        beta=run.beta,
        alpha_final=alpha,
        tau_total=prof.tau_total,
        mean_work=wd.mean(),
        delta_F=delta_f,
        lhs=lhs,
        rhs=rhs,
        final_basis=run.final_basis,
        steps=sched.steps,
    )
