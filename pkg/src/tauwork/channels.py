"""Quantum processes: Kraus families, unitality, and proper-time propagators.

Channels are stored concretely as Kraus families (a unitary is a one-element
family) because the generalized fluctuation relation needs the deviation
from unitality for arbitrary processes. Proper-time evolution comes in two
flavors: the closed-form exponential for a fixed internal Hamiltonian, and a
left-ordered product of step exponentials for piecewise-constant schedules,
with each step's duration in proper time read off a dilation profile.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import (
    DensityOperator,
    HermitianOperator,
    as_complex_matrix,
    spectral_decompose,
    spectrum_expm,
)
from .spacetime import DilationProfile

TRACE_PRESERVATION_ATOL = 1e-10
UNITARITY_ATOL = 1e-10


@dataclass(frozen=True)
class QuantumChannel:
    """A completely positive trace-preserving map given by Kraus operators.

    Construction enforces sum_j K_j^dag K_j = 1 within ``atol`` and records
    whether the map is also unital (sum_j K_j K_j^dag = 1).
    """

    kraus_ops: tuple
    is_unital: bool

    def __init__(self, kraus_ops, atol: float = TRACE_PRESERVATION_ATOL):
        ops = tuple(as_complex_matrix(k, name="Kraus operator") for k in kraus_ops)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        dim = ops[0].shape[0]
        if any(k.shape != (dim, dim) for k in ops):
            raise ValueError("all Kraus operators must share one dimension")
        ident = np.eye(dim)
        tp = sum(k.conj().T @ k for k in ops)
        dev = np.max(np.abs(tp - ident))
        if dev > atol:
            raise ValueError(
                f"Kraus family is not trace preserving: |sum K^dag K - 1| = {dev:.3e}"
            )
        un = sum(k @ k.conj().T for k in ops)
        unital = bool(np.max(np.abs(un - ident)) <= atol)
        object.__setattr__(self, "kraus_ops", ops)
        object.__setattr__(self, "is_unital", unital)

    @property
    def dim(self) -> int:
        return self.kraus_ops[0].shape[0]

    def apply_matrix(self, mat: np.ndarray) -> np.ndarray:
        """sum_j K_j M K_j^dag without state validation (internal fast path)."""
        return sum(k @ mat @ k.conj().T for k in self.kraus_ops)


def unitary_channel(u, atol: float = UNITARITY_ATOL) -> QuantumChannel:
    """Wrap a unitary matrix as a single-Kraus (necessarily unital) channel."""
    mat = as_complex_matrix(u, name="unitary")
    dev = np.max(np.abs(mat.conj().T @ mat - np.eye(mat.shape[0])))
    if dev > atol:
        raise ValueError(f"matrix is not unitary: |U^dag U - 1| = {dev:.3e}")
    return QuantumChannel([mat])


def identity_channel(dim: int) -> QuantumChannel:
    return QuantumChannel([np.eye(dim, dtype=complex)])


def amplitude_damping_channel(gamma: float, dim: int = 2) -> QuantumChannel:
    """Decay of every excited level into the ground level with probability gamma."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma!r}")
    k0 = np.diag(np.concatenate(([1.0], np.full(dim - 1, np.sqrt(1.0 - gamma))))).astype(
        complex
    )
    ops = [k0]
    for j in range(1, dim):
        k = np.zeros((dim, dim), dtype=complex)
        k[0, j] = np.sqrt(gamma)
        ops.append(k)
    return QuantumChannel(ops)


def depolarizing_channel(lam: float, dim: int = 2) -> QuantumChannel:
    """Mix toward 1/d with probability lam, via the Weyl shift/clock unitaries."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam!r}")
    shift = np.roll(np.eye(dim, dtype=complex), 1, axis=0)
    clock = np.diag(np.exp(2j * np.pi * np.arange(dim) / dim))
    ops = []
    for a in range(dim):
        for b in range(dim):
            w = np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
            if a == 0 and b == 0:
                ops.append(np.sqrt(1.0 - lam * (dim * dim - 1) / (dim * dim)) * w)
            else:
                ops.append(np.sqrt(lam) / dim * w)
    return QuantumChannel(ops)


def apply(channel: QuantumChannel, rho: DensityOperator) -> DensityOperator:
    """Send a state through the channel."""
    if rho.dim != channel.dim:
        raise ValueError(
            f"dimension mismatch: state is {rho.dim}, channel is {channel.dim}"
        )
    return DensityOperator(channel.apply_matrix(rho.matrix))


def unitality_deviation(channel: QuantumChannel) -> np.ndarray:
    """How far the channel moves the maximally mixed state: Theta(1/d) - 1/d.

    Hermitian and traceless; identically zero iff the channel is unital.
    """
    d = channel.dim
    out = channel.apply_matrix(np.eye(d, dtype=complex) / d) - np.eye(d) / d
    return 0.5 * (out + out.conj().T)


def proper_time_propagator(h_int: HermitianOperator, tau: float) -> np.ndarray:
    """e^(-i H tau): unitary evolution through an elapsed proper time tau.

    The worldline enters only through the scalar tau, which is the whole
    content of the time-independent case.
    """
    if not np.isfinite(tau):
        raise ValueError(f"tau must be finite, got {tau!r}")
    return spectrum_expm(spectral_decompose(h_int), -1j * tau)


@dataclass(frozen=True)
class PropagatorSchedule:
    """A piecewise-constant internal Hamiltonian over proper time, plus the clock.

    ``segments`` maps proper time to generators: segment k applies on
    ``[tau_bounds[k-1], tau_bounds[k])`` with ``tau_bounds[-1]`` covering the
    profile's total proper time. ``steps`` controls the discretization of the
    ordered product.
    """

    segments: tuple
    tau_bounds: np.ndarray
    dilation: DilationProfile
    steps: int

    def __init__(self, segments, dilation: DilationProfile, steps: int):
        segs = []
        bounds = []
        for tau_end, h in segments:
            if not isinstance(h, HermitianOperator):
                h = HermitianOperator(h)
            segs.append(h)
            bounds.append(float(tau_end))
        if not segs:
            raise ValueError("schedule needs at least one segment")
        dim = segs[0].dim
        if any(h.dim != dim for h in segs):
            raise ValueError("all schedule segments must share one dimension")
        bounds_arr = np.array(bounds, dtype=float)
        if np.any(np.diff(bounds_arr) <= 0) or bounds_arr[0] <= 0:
            raise ValueError("segment bounds must be positive and strictly increasing")
        total = dilation.tau_total
        if bounds_arr[-1] < total * (1.0 - 1e-12):
            raise ValueError(
                f"schedule covers proper time up to {bounds_arr[-1]!r} but the "
                f"worldline accumulates {total!r}"
            )
        if not (isinstance(steps, (int, np.integer)) and steps >= 1):
            raise ValueError(f"steps must be a positive integer, got {steps!r}")
        bounds_arr.flags.writeable = False
        object.__setattr__(self, "segments", tuple(segs))
        object.__setattr__(self, "tau_bounds", bounds_arr)
        object.__setattr__(self, "dilation", dilation)
        object.__setattr__(self, "steps", int(steps))

    @classmethod
    def constant(
        cls, h: HermitianOperator, dilation: DilationProfile, steps: int = 1
    ) -> "PropagatorSchedule":
        return cls([(dilation.tau_total, h)], dilation, steps)

    @property
    def dim(self) -> int:
        return self.segments[0].dim

    def segment_index(self, tau: float) -> int:
        idx = int(np.searchsorted(self.tau_bounds, tau, side="right"))
        return min(idx, len(self.segments) - 1)

    def hamiltonian_at(self, tau: float) -> HermitianOperator:
        return self.segments[self.segment_index(tau)]

    def initial_hamiltonian(self) -> HermitianOperator:
        return self.segments[0]

    def final_hamiltonian(self) -> HermitianOperator:
        return self.segments[-1]


def time_ordered_propagator(schedule: PropagatorSchedule) -> np.ndarray:
    """Ordered product of step exponentials approximating T exp(-i integral H dtau).

    The laboratory time span is cut into ``steps`` equal slices; each slice
    contributes exp(-i H(tau_mid) dtau) with dtau read from the cumulative
    proper time at the slice edges (so the slices tile the total proper time
    exactly) and H evaluated at the slice's proper-time midpoint. Later
    slices act on the left. First-order accurate across segment boundaries,
    exact within a segment.
    """
    prof = schedule.dilation
    edges = np.linspace(prof.t[0], prof.t[-1], schedule.steps + 1)
    tau_edges = np.interp(edges, prof.t, prof.tau)
    spectra = [spectral_decompose(h) for h in schedule.segments]
    u = np.eye(schedule.dim, dtype=complex)
    for k in range(schedule.steps):
        d_tau = tau_edges[k + 1] - tau_edges[k]
        tau_mid = 0.5 * (tau_edges[k] + tau_edges[k + 1])
        spec = spectra[schedule.segment_index(tau_mid)]
        u = spectrum_expm(spec, -1j * d_tau) @ u
    return u
