"""
Seeded Monte Carlo of the current-based readout cycle.

One electron tunnels onto the island per cycle period (Coulomb blockade),
carrying spin-down unless the source filter leaks. An ESR pulse, tuned to the
outside-spin flip frequency conditioned on the positive inside-spin state,
rotates the electron spin; dwell-time jitter truncates or overshoots the
rotation. The electron then dephases/relaxes for the residual dwell and is
Bernoulli-sampled at the drain filter (a projective spin measurement). A
window of cycles yields a detector count that classifies the inside spin.

Population bookkeeping uses scalar closed forms of the rotating-frame pulse
and the field-free master equation; those forms are cross-checked against
the matrix operations in `dynamics` by the test suite.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass, replace

from .dynamics import DecoherenceRates, PulseSpec, flip_probability
from .spin_core import SystemParams, TransitionTable

SPIN_DOWN = "down"
SPIN_UP = "up"

_ENCODING_M1 = {"outer": 1.5, "inner": 0.5}


@dataclass(frozen=True)
class TunnelingParams:
    """Stochastic description of the SET cycle. Times in ns."""

    t0: float = 150.0            # mean dwell time
    alpha: float = 0.0           # relative dwell deviation sigma/t0
    p_leak_source: float = 0.0   # wrong-spin pass probability, source filter
    p_leak_drain: float = 0.0    # wrong-spin pass probability, drain filter
    cycle_period: float = 150.0
    window: float = 1e7          # total readout duration (default 10 ms)

    def __post_init__(self):
        if not self.t0 > 0:
            raise ValueError("t0 must be positive")
        if not 0 <= self.alpha < 1:
            raise ValueError("alpha must lie in [0, 1)")
        for name in ("p_leak_source", "p_leak_drain"):
            if not 0 <= getattr(self, name) < 1:
                raise ValueError(f"{name} must lie in [0, 1)")
        if self.t0 > self.cycle_period:
            raise ValueError("t0 cannot exceed cycle_period")
        if self.window < self.cycle_period:
            raise ValueError("window must cover at least one cycle")


@dataclass(frozen=True)
class InsideSpinState:
    """The stationary spin-3/2 level under readout and its qubit encoding."""

    m1: float
    encoding: str   # "outer" (|±3/2>) or "inner" (|±1/2>)

    def __post_init__(self):
        if self.encoding not in _ENCODING_M1:
            raise ValueError("encoding must be 'outer' or 'inner'")
        if abs(self.m1) != _ENCODING_M1[self.encoding]:
            raise ValueError(
                f"m1={self.m1} inconsistent with encoding '{self.encoding}'")

    @property
    def positive(self) -> "InsideSpinState":
        return InsideSpinState(abs(self.m1), self.encoding)


@dataclass(frozen=True)
class TunnelEvent:
    """Per-electron audit record."""

    index: int
    dwell: float
    spin_in: str
    flip_prob: float
    passed_drain: bool


@dataclass(frozen=True)
class CurrentTrace:
    """Detector-count record for one readout window."""

    n_cycles: int
    n_passed: int
    events: tuple[TunnelEvent, ...] | None
    seed: int


@dataclass(frozen=True)
class ReadoutResult:
    classified: InsideSpinState
    counts_on: int
    baseline: float    # expected off-resonant clicks
    contrast: float    # (baseline - counts_on) / (baseline + counts_on)
    threshold: float


@dataclass(frozen=True)
class SweepCell:
    """Misclassification statistics for one (alpha, leak, true state) cell."""

    alpha: float
    p_leak: float
    true_state: InsideSpinState
    trials: int
    misclassified: int

    @property
    def rate(self) -> float:
        return self.misclassified / self.trials


def sample_dwell(params: TunnelingParams, rng: random.Random) -> float:
    """Dwell draw from Normal(t0, (alpha*t0)^2), resampled into
    (0, cycle_period]. alpha = 0 returns exactly t0."""
    if params.alpha == 0.0:
        return params.t0
    sigma = params.alpha * params.t0
    while True:
        d = rng.gauss(params.t0, sigma)
        if 0.0 < d <= params.cycle_period:
            return d


def source_emit(params: TunnelingParams, rng: random.Random) -> str:
    """Spin of the electron passing the source filter."""
    return SPIN_UP if rng.random() < params.p_leak_source else SPIN_DOWN


def outside_flip_frequency(sys: SystemParams, m1: float) -> float:
    """Outside-spin flip frequency conditioned on inside level m1, MHz."""
    return 2.0 * sys.nu2 + sys.J * m1


def leak_resonance_frequency(sys: SystemParams) -> float:
    """Resonance relevant to a leaked spin-up electron, 2 nu1 + J/2 (MHz).

    With a nonzero gradient this sits at least 2*delta away from either
    interrogation frequency, so leaked electrons are far off resonance.
    """
    return 2.0 * sys.nu1 + 0.5 * sys.J


def resonance_frequency(inside: InsideSpinState,
                        table: TransitionTable) -> float:
    """Interrogation frequency: the outside-flip row for the positive-m1
    level of the encoding, regardless of the true state."""
    m1_ref = _ENCODING_M1[inside.encoding]
    for row in table.outside_rows():
        if row.initial[0] == m1_ref:
            return row.frequency
    raise ValueError("transition table lacks the interrogation row")


def electron_cycle(inside: InsideSpinState, pulse: PulseSpec,
                   sys: SystemParams, params: TunnelingParams,
                   rates: DecoherenceRates, rng: random.Random,
                   index: int = 0) -> TunnelEvent:
    """Simulate one blockaded electron: emit, dwell, pulse, decohere, drain."""
    if pulse.frequency is None:
        raise ValueError("pulse carrier frequency is unset")
    if pulse.duration > params.cycle_period:
        raise ValueError("pulse does not fit in the cycle period")
    spin = source_emit(params, rng)
    dwell = sample_dwell(params, rng)
    if spin == SPIN_DOWN:
        detuning = pulse.frequency - outside_flip_frequency(sys, inside.m1)
    else:
        detuning = pulse.frequency - leak_resonance_frequency(sys)
    # Departure mid-pulse truncates the rotation: on resonance the angle is
    # pi * dwell / t0.
    effective = dwell * pulse.duration / params.t0
    flip = flip_probability(pulse.omega0, detuning, effective)
    p_up = flip if spin == SPIN_DOWN else 1.0 - flip
    residual = max(dwell - pulse.duration, 0.0)
    if residual > 0.0:
        p_up *= math.exp(-rates.gamma0 * residual)
    pass_prob = (1.0 - p_up) + params.p_leak_drain * p_up
    passed = rng.random() < pass_prob
    return TunnelEvent(index=index, dwell=dwell, spin_in=spin,
                       flip_prob=flip, passed_drain=passed)


def run_window(inside: InsideSpinState, pulse: PulseSpec, sys: SystemParams,
               params: TunnelingParams, rates: DecoherenceRates, seed: int,
               collect_events: bool = False) -> CurrentTrace:
    """One readout window: floor(window / cycle_period) sequential cycles
    with a dedicated RNG. Deterministic for a fixed seed."""
    n_cycles = int(params.window // params.cycle_period)
    rng = random.Random(seed)
    n_passed = 0
    events: list[TunnelEvent] | None = [] if collect_events else None
    for i in range(n_cycles):
        ev = electron_cycle(inside, pulse, sys, params, rates, rng, index=i)
        if ev.passed_drain:
            n_passed += 1
        if events is not None:
            events.append(ev)
    return CurrentTrace(n_cycles=n_cycles, n_passed=n_passed,
                        events=tuple(events) if events is not None else None,
                        seed=seed)


def classify(trace: CurrentTrace, params: TunnelingParams,
             encoding: str) -> ReadoutResult:
    """Half-baseline threshold: suppressed current means the positive-m1
    state. Counts exactly at threshold classify as the negative state."""
    if trace.n_cycles == 0:
        raise ValueError("cannot classify an empty trace")
    if encoding not in _ENCODING_M1:
        raise ValueError("encoding must be 'outer' or 'inner'")
    baseline = trace.n_cycles * (1.0 - params.p_leak_source)
    threshold = baseline / 2.0
    positive = trace.n_passed < threshold
    m1 = _ENCODING_M1[encoding] * (1.0 if positive else -1.0)
    contrast = (baseline - trace.n_passed) / (baseline + trace.n_passed)
    return ReadoutResult(classified=InsideSpinState(m1, encoding),
                         counts_on=trace.n_passed, baseline=baseline,
                         contrast=contrast, threshold=threshold)


def derive_seed(base: int, *parts) -> int:
    """Stable 64-bit sub-seed from a base seed and a label tuple."""
    tag = json.dumps([base, *parts], sort_keys=True).encode()
    return int.from_bytes(hashlib.sha256(tag).digest()[:8], "big")


def sweep_states(encoding: str) -> list[InsideSpinState]:
    if encoding == "both":
        return [InsideSpinState(m, e)
                for e, mref in _ENCODING_M1.items() for m in (mref, -mref)]
    return [InsideSpinState(s * _ENCODING_M1[encoding], encoding)
            for s in (1.0, -1.0)]


def fidelity_sweep(encoding: str, sys: SystemParams, rates: DecoherenceRates,
                   alphas: list[float], leaks: list[float], trials: int,
                   seed: int,
                   tunneling: TunnelingParams | None = None,
                   pulse_duration: float = 140.0) -> list[SweepCell]:
    """Misclassification rates over an (alpha, leak) grid.

    Each cell runs `trials` independent windows per true state; leak sets
    both filters. Fully deterministic given the base seed.
    """
    if not alphas or not leaks:
        raise ValueError("alpha and leak grids must be non-empty")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    base = tunneling if tunneling is not None else TunnelingParams()
    states = sweep_states(encoding)
    cells: list[SweepCell] = []
    for a in alphas:
        for leak in leaks:
            params = replace(base, alpha=a, p_leak_source=leak,
                             p_leak_drain=leak)
            for state in states:
                freq = outside_flip_frequency(sys, state.positive.m1)
                pulse = PulseSpec.calibrated(freq, duration=pulse_duration,
                                             period=params.cycle_period)
                bad = 0
                for trial in range(trials):
                    s = derive_seed(seed, a, leak, state.m1, state.encoding,
                                    trial)
                    trace = run_window(state, pulse, sys, params, rates, s)
                    result = classify(trace, params, state.encoding)
                    if result.classified.m1 != state.m1:
                        bad += 1
                cells.append(SweepCell(alpha=a, p_leak=leak, true_state=state,
                                       trials=trials, misclassified=bad))
    return cells


def write_events_csv(trace: CurrentTrace, path) -> None:
    """Per-electron audit log: cycle,dwell_ns,spin_in,flip_prob,passed."""
    if trace.events is None:
        raise ValueError("trace was recorded without event logging")
    with open(path, "w") as fh:
        fh.write("cycle,dwell_ns,spin_in,flip_prob,passed\n")
        for ev in trace.events:
            fh.write(f"{ev.index},{ev.dwell:.12g},{ev.spin_in},"
                     f"{ev.flip_prob:.12g},{int(ev.passed_drain)}\n")
