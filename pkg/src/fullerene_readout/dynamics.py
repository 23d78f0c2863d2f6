"""
Open-system dynamics of the mobile (outside) spin.

Covers the phenomenological master equation with relaxation rate gamma0 and
dephasing rate gammap (analytic closed form and a fixed-step RK4 integrator),
the post-pulse imperfect-flip state produced by dwell-time jitter, detuned
Rabi pulse propagation in the rotating frame, and the population/coherence
time series used for plotting.

Basis: index 0 = |up>, index 1 = |down>. The dephasing operator is the Pauli
sigma_z (eigenvalues +/-1), so the coherence dephases at gamma0/2 + 4*gammap.
Frequencies are ordinary MHz, times ns; angular factors 2*pi/1000 appear at
the point of use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericFailure

SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
SIGMA_PLUS = SIGMA_MINUS.conj().T

# Ordinary-frequency (MHz) times time (ns) to phase (rad).
_PHASE = 2.0 * math.pi / 1000.0


@dataclass(frozen=True)
class DecoherenceRates:
    """Lindblad rates in 1/ns.

    gamma0 is the relaxation (T1-type) rate of the outside spin and gammap
    the pure-dephasing (T2-type) rate.
    """

    gamma0: float = 4e-4   # 1/T1_out, default T1_out = 2500 ns
    gammap: float = 0.04   # dephasing, default 1/gammap = 25 ns

    def __post_init__(self):
        if self.gamma0 < 0 or self.gammap < 0:
            raise ValueError("decoherence rates must be non-negative")

    @property
    def coherence_rate(self) -> float:
        """Decay rate of the off-diagonal element, 1/ns."""
        return self.gamma0 / 2.0 + 4.0 * self.gammap


@dataclass(frozen=True)
class PulseSpec:
    """A rectangular ESR pulse in the repetition train.

    omega0 is the Rabi amplitude (MHz), frequency the carrier as an ordinary
    frequency (MHz). The calibrated pi-time is 500/omega0 ns.
    """

    omega0: float
    frequency: float | None
    duration: float = 140.0   # ns
    period: float = 150.0     # ns

    def __post_init__(self):
        if self.omega0 < 0:
            raise ValueError("omega0 must be non-negative")
        if not 0 < self.duration <= self.period:
            raise ValueError("duration must lie in (0, period]")

    @classmethod
    def calibrated(cls, frequency: float | None, duration: float = 140.0,
                   period: float = 150.0) -> "PulseSpec":
        """Amplitude chosen so a full-length resonant pulse is a pi pulse."""
        return cls(omega0=500.0 / duration, frequency=frequency,
                   duration=duration, period=period)

    @property
    def pi_time(self) -> float:
        """Resonant pi-rotation time, ns."""
        return 500.0 / self.omega0


@dataclass(frozen=True)
class TimeSeries:
    """Sampled density-matrix elements: P1 = rho_uu, P2 = |rho_ud|, P3 = rho_dd."""

    times: np.ndarray
    P1: np.ndarray
    P2: np.ndarray
    P3: np.ndarray

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("t_ns,P1,P2,P3\n")
            for t, a, b, c in zip(self.times, self.P1, self.P2, self.P3):
                fh.write(f"{t:.12g},{a:.12g},{b:.12g},{c:.12g}\n")


def validate_density_matrix(rho: np.ndarray, tol: float = 1e-10) -> None:
    """Assert Hermiticity, unit trace, and positivity within tolerance."""
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValueError("density matrix not Hermitian within tolerance")
    if abs(np.trace(rho).real - 1.0) > tol or abs(np.trace(rho).imag) > tol:
        raise ValueError("density matrix trace differs from 1")
    if np.min(np.linalg.eigvalsh(rho)) < -tol:
        raise ValueError("density matrix has a negative eigenvalue")


def imperfect_flip_state(alpha: float, branch: str = "+") -> np.ndarray:
    """Pure post-pulse state for a dwell time t0*(1 +/- alpha).

    -i cos(alpha*pi/2)|up>  -/+  sin(alpha*pi/2)|down>, branch '+' -> minus.
    """
    if not 0 <= alpha < 1:
        raise ValueError("alpha must lie in [0, 1)")
    if branch not in ("+", "-"):
        raise ValueError("branch must be '+' or '-'")
    sign = -1.0 if branch == "+" else 1.0
    psi = np.array([-1j * math.cos(alpha * math.pi / 2),
                    sign * math.sin(alpha * math.pi / 2)], dtype=complex)
    return np.outer(psi, psi.conj())


def _outside_ops(dim: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(sigma-, sigma+, sigma_z) acting on the outside-spin factor."""
    if dim == 2:
        return SIGMA_MINUS, SIGMA_PLUS, SIGMA_Z
    if dim == 8:
        i4 = np.eye(4, dtype=complex)
        return (np.kron(i4, SIGMA_MINUS), np.kron(i4, SIGMA_PLUS),
                np.kron(i4, SIGMA_Z))
    raise ValueError("density matrix dimension must be 2 or 8")


def lindblad_rhs(rho: np.ndarray, rates: DecoherenceRates,
                 hamiltonian: np.ndarray | None = None) -> np.ndarray:
    """Right-hand side of the master equation, 1/ns.

    (gamma0/2)(2 s- rho s+ - s+ s- rho - rho s+ s-) - gammap [sz, [sz, rho]]
    - i (2*pi/1000) [H, rho], the last term only when a Hamiltonian (MHz)
    is supplied.
    """
    sm, sp, sz = _outside_ops(rho.shape[0])
    n = sp @ sm
    out = rates.gamma0 / 2.0 * (2.0 * (sm @ rho @ sp) - n @ rho - rho @ n)
    inner = sz @ rho - rho @ sz
    out -= rates.gammap * (sz @ inner - inner @ sz)
    if hamiltonian is not None:
        if hamiltonian.shape != rho.shape:
            raise ValueError("hamiltonian dimension mismatch")
        out = out - 1j * _PHASE * (hamiltonian @ rho - rho @ hamiltonian)
    return out


def analytic_free_evolution(rho0: np.ndarray, rates: DecoherenceRates,
                            t: float) -> np.ndarray:
    """Closed-form solution of the field-free master equation (dim 2).

    rho_uu(t) = rho_uu(0) e^{-gamma0 t}, rho_dd = 1 - rho_uu,
    rho_ud(t) = rho_ud(0) e^{-(gamma0/2 + 4 gammap) t}.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    if rho0.shape != (2, 2):
        raise ValueError("analytic solution is for the reduced 2x2 state")
    p_up = rho0[0, 0].real * math.exp(-rates.gamma0 * t)
    coh = rho0[0, 1] * math.exp(-rates.coherence_rate * t)
    return np.array([[p_up, coh], [coh.conjugate(), 1.0 - p_up]],
                    dtype=complex)


def _rk4_step(rho: np.ndarray, rates: DecoherenceRates,
              hamiltonian: np.ndarray | None, dt: float) -> np.ndarray:
    k1 = lindblad_rhs(rho, rates, hamiltonian)
    k2 = lindblad_rhs(rho + 0.5 * dt * k1, rates, hamiltonian)
    k3 = lindblad_rhs(rho + 0.5 * dt * k2, rates, hamiltonian)
    k4 = lindblad_rhs(rho + dt * k3, rates, hamiltonian)
    rho = rho + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return 0.5 * (rho + rho.conj().T)


def evolve_numeric(rho0: np.ndarray, rates: DecoherenceRates,
                   hamiltonian: np.ndarray | None, t: float,
                   dt: float) -> np.ndarray:
    """Fixed-step RK4 integration of the master equation over t ns.

    Re-Hermitizes after every step. Raises NumericFailure if the trace
    drifts by more than 1e-6.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t < 0:
        raise ValueError("t must be non-negative")
    rho = rho0.astype(complex)
    trace0 = np.trace(rho).real
    n_full = int(t // dt)
    remainder = t - n_full * dt
    for _ in range(n_full):
        rho = _rk4_step(rho, rates, hamiltonian, dt)
    if remainder > 1e-12:
        rho = _rk4_step(rho, rates, hamiltonian, remainder)
    drift = abs(np.trace(rho).real - trace0)
    if drift > 1e-6:
        raise NumericFailure(f"trace drifted by {drift:.3e} during integration")
    return rho


def rabi_pulse(rho: np.ndarray, pulse: PulseSpec, detuning: float,
               effective_duration: float) -> np.ndarray:
    """Rotating-frame unitary for a rectangular pulse segment (dim 2).

    Rotation by 2*pi*sqrt(omega0^2 + detuning^2)*tau/1000 radians about the
    axis (omega0, 0, detuning)/Omega_R; no dissipation during the pulse.
    On resonance the angle is pi * effective_duration / pi_time.
    """
    if effective_duration < 0:
        raise ValueError("effective_duration must be non-negative")
    if rho.shape != (2, 2):
        raise ValueError("rabi_pulse acts on the reduced 2x2 state")
    omega_r = math.hypot(pulse.omega0, detuning)
    if omega_r == 0.0 or effective_duration == 0.0:
        return rho.astype(complex)
    half = math.pi * omega_r * effective_duration / 1000.0  # phi/2
    nx = pulse.omega0 / omega_r
    nz = detuning / omega_r
    u = (math.cos(half) * np.eye(2, dtype=complex)
         - 1j * math.sin(half) * (nx * SIGMA_X + nz * SIGMA_Z))
    return u @ rho @ u.conj().T


def flip_probability(omega0: float, detuning: float,
                     effective_duration: float) -> float:
    """Population transfer probability of the rotating-frame pulse.

    (omega0^2 / Omega_R^2) * sin^2(pi * Omega_R * tau / 1000); scalar
    closed form of rabi_pulse for population bookkeeping.
    """
    omega_r = math.hypot(omega0, detuning)
    if omega_r == 0.0:
        return 0.0
    half = math.pi * omega_r * effective_duration / 1000.0
    return (omega0 / omega_r) ** 2 * math.sin(half) ** 2


def fig2_timeseries(alpha: float, rates: DecoherenceRates,
                    t_end: float = 1000.0, dt: float = 1.0) -> TimeSeries:
    """Free decay of the imperfect-flip state on a uniform grid."""
    rho0 = imperfect_flip_state(alpha, "+")
    times = np.arange(0.0, t_end + 0.5 * dt, dt)
    p1 = rho0[0, 0].real * np.exp(-rates.gamma0 * times)
    p2 = abs(rho0[0, 1]) * np.exp(-rates.coherence_rate * times)
    return TimeSeries(times=times, P1=p1, P2=p2, P3=1.0 - p1)
