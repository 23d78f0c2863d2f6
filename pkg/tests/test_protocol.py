import math
import random
from dataclasses import replace

import numpy as np
import pytest

from fullerene_readout.dynamics import (DecoherenceRates, PulseSpec,
                                        analytic_free_evolution, rabi_pulse)
from fullerene_readout.protocol import (CurrentTrace, InsideSpinState,
                                        TunnelingParams, classify,
                                        electron_cycle, fidelity_sweep,
                                        leak_resonance_frequency,
                                        outside_flip_frequency,
                                        resonance_frequency, run_window,
                                        sample_dwell, source_emit,
                                        write_events_csv)
from fullerene_readout.spin_core import SystemParams, transition_table

SYS = SystemParams(nu1=10000.0, nu2=10063.5, J=50.0)
RATES = DecoherenceRates()
TABLE = transition_table(SYS)
OUTER_UP = InsideSpinState(1.5, "outer")
OUTER_DOWN = InsideSpinState(-1.5, "outer")
INNER_UP = InsideSpinState(0.5, "inner")
MS_WINDOW = TunnelingParams(window=1e6)  # 6666 cycles


def outer_pulse():
    return PulseSpec.calibrated(resonance_frequency(OUTER_UP, TABLE))


class TestSampleDwell:
    def test_zero_alpha_is_exact(self):
        rng = random.Random(0)
        params = TunnelingParams(alpha=0.0)
        assert all(sample_dwell(params, rng) == 150.0 for _ in range(100))

    def test_statistics(self):
        # headroom above t0 so truncation does not bias the draw
        params = TunnelingParams(alpha=0.1, cycle_period=1500.0, window=1e7)
        rng = random.Random(123)
        draws = np.array([sample_dwell(params, rng) for _ in range(100_000)])
        assert draws.mean() == pytest.approx(150.0, abs=0.15)
        assert draws.std() == pytest.approx(15.0, abs=0.5)

    def test_bounded_by_cycle(self):
        params = TunnelingParams(alpha=0.3)
        rng = random.Random(5)
        for _ in range(10_000):
            d = sample_dwell(params, rng)
            assert 0.0 < d <= params.cycle_period

    def test_deterministic_for_fixed_seed(self):
        params = TunnelingParams(alpha=0.1)
        a = [sample_dwell(params, random.Random(42)) for _ in range(1)]
        for _ in range(3):
            rng = random.Random(42)
            assert [sample_dwell(params, rng)] == a


class TestSourceEmit:
    def test_perfect_filter(self):
        rng = random.Random(0)
        params = TunnelingParams()
        assert all(source_emit(params, rng) == "down" for _ in range(1000))

    def test_leak_fraction(self):
        params = TunnelingParams(p_leak_source=0.05)
        rng = random.Random(9)
        ups = sum(source_emit(params, rng) == "up" for _ in range(100_000))
        assert ups / 100_000 == pytest.approx(0.05, abs=0.003)


class TestFrequencies:
    def test_interrogation_rows(self):
        assert resonance_frequency(OUTER_UP, TABLE) == pytest.approx(20202.0)
        assert resonance_frequency(INNER_UP, TABLE) == pytest.approx(20152.0)

    def test_negative_state_interrogates_positive_row(self):
        assert resonance_frequency(OUTER_DOWN, TABLE) == pytest.approx(
            20202.0)

    def test_uncoupled_frequencies_coincide(self):
        p = SystemParams(nu1=10000.0, nu2=10063.5, J=0.0)
        t = transition_table(p)
        assert resonance_frequency(OUTER_UP, t) == resonance_frequency(
            InsideSpinState(0.5, "inner"), t)

    def test_leak_resonance_is_far_detuned(self):
        for state in (OUTER_UP, INNER_UP):
            detuning = (resonance_frequency(state, TABLE)
                        - leak_resonance_frequency(SYS))
            assert detuning >= 2 * SYS.delta - 1e-9


class TestInsideSpinState:
    def test_encoding_consistency(self):
        with pytest.raises(ValueError):
            InsideSpinState(1.5, "inner")
        with pytest.raises(ValueError):
            InsideSpinState(0.5, "outer")
        with pytest.raises(ValueError):
            InsideSpinState(1.5, "sideways")


class TestElectronCycle:
    def test_resonant_perfect_pulse_blocks(self):
        # gamma0 = 0 so the residual dwell cannot repopulate |down>
        params = TunnelingParams(alpha=0.0)
        rates = DecoherenceRates(0.0, RATES.gammap)
        rng = random.Random(0)
        for _ in range(200):
            ev = electron_cycle(OUTER_UP, outer_pulse(), SYS, params, rates,
                                rng)
            assert ev.spin_in == "down"
            assert ev.flip_prob == pytest.approx(1.0)
            assert not ev.passed_drain

    def test_off_resonant_state_transmits(self):
        params = TunnelingParams(alpha=0.0)
        rng = random.Random(0)
        evs = [electron_cycle(OUTER_DOWN, outer_pulse(), SYS, params, RATES,
                              rng) for _ in range(2000)]
        cap = outer_pulse().omega0 ** 2 / (outer_pulse().omega0 ** 2 + 150 ** 2)
        assert all(ev.flip_prob <= cap + 1e-12 for ev in evs)
        assert sum(ev.passed_drain for ev in evs) >= 0.999 * len(evs)

    def test_matrix_path_agreement(self):
        # the scalar bookkeeping must reproduce rabi_pulse followed by
        # analytic_free_evolution
        pulse = outer_pulse()
        params = TunnelingParams(alpha=0.2)
        down = np.diag([0.0, 1.0]).astype(complex)
        for dwell in (30.0, 120.0, 145.0, 150.0):
            for m1 in (1.5, -1.5):
                detuning = pulse.frequency - outside_flip_frequency(SYS, m1)
                eff = dwell * pulse.duration / params.t0
                rho = rabi_pulse(down, pulse, detuning, eff)
                rho = analytic_free_evolution(
                    rho, RATES, max(dwell - pulse.duration, 0.0))
                # replicate the cycle with a stub RNG fixing spin and dwell
                class Stub:
                    def __init__(self):
                        self.pass_draw = None
                    def random(self):
                        return 0.0
                    def gauss(self, mu, sigma):
                        return dwell
                ev = electron_cycle(InsideSpinState(m1, "outer"), pulse, SYS,
                                    replace(params, alpha=0.2), RATES, Stub())
                p_up_expected = rho[0, 0].real
                # flip_prob is pre-decoherence transfer probability
                assert ev.flip_prob == pytest.approx(
                    rabi_pulse(down, pulse, detuning, eff)[0, 0].real,
                    abs=1e-12)
                assert (1.0 - p_up_expected) > 0.0

    def test_requires_carrier(self):
        with pytest.raises(ValueError):
            electron_cycle(OUTER_UP, PulseSpec.calibrated(None), SYS,
                           TunnelingParams(), RATES, random.Random(0))


class TestRunWindow:
    def test_cycle_count_default_window(self):
        trace = run_window(OUTER_UP, outer_pulse(), SYS, TunnelingParams(),
                           RATES, seed=0)
        assert trace.n_cycles == 66_666

    def test_blocked_window(self):
        trace = run_window(OUTER_UP, outer_pulse(), SYS, MS_WINDOW,
                           DecoherenceRates(0.0, RATES.gammap), seed=0)
        assert trace.n_passed == 0

    def test_nearly_blocked_with_relaxation(self):
        # residual-dwell relaxation leaks ~ gamma0 * 10 ns per cycle
        trace = run_window(OUTER_UP, outer_pulse(), SYS, MS_WINDOW, RATES,
                           seed=0)
        assert trace.n_passed < 0.01 * trace.n_cycles

    def test_transmitting_window(self):
        trace = run_window(OUTER_DOWN, outer_pulse(), SYS, MS_WINDOW, RATES,
                           seed=0)
        assert trace.n_passed >= 0.999 * trace.n_cycles

    def test_determinism(self):
        params = replace(MS_WINDOW, alpha=0.1, p_leak_source=0.02,
                         p_leak_drain=0.02)
        a = run_window(OUTER_UP, outer_pulse(), SYS, params, RATES, seed=3,
                       collect_events=True)
        b = run_window(OUTER_UP, outer_pulse(), SYS, params, RATES, seed=3,
                       collect_events=True)
        assert a == b
        c = run_window(OUTER_UP, outer_pulse(), SYS, params, RATES, seed=4)
        assert c.n_passed != a.n_passed or c.seed != a.seed

    def test_blockade_audit(self):
        params = replace(MS_WINDOW, alpha=0.15, window=1e5)
        trace = run_window(OUTER_UP, outer_pulse(), SYS, params, RATES,
                           seed=1, collect_events=True)
        assert [ev.index for ev in trace.events] == list(
            range(trace.n_cycles))
        assert all(0 < ev.dwell <= params.cycle_period for ev in trace.events)

    def test_on_resonance_transmission_small_alpha(self):
        # E[sin^2(pi (tau - t0) / (2 t0))] ~ pi^2 alpha^2 / 4
        params = replace(TunnelingParams(alpha=0.1), window=2e7)
        trace = run_window(OUTER_UP, outer_pulse(), SYS, params, RATES,
                           seed=0)
        assert trace.n_cycles >= 100_000
        expected = math.pi ** 2 * 0.01 / 4
        assert trace.n_passed / trace.n_cycles == pytest.approx(
            expected, rel=0.15)

    def test_events_csv(self, tmp_path):
        params = replace(MS_WINDOW, window=1e4, alpha=0.1)
        trace = run_window(OUTER_UP, outer_pulse(), SYS, params, RATES,
                           seed=2, collect_events=True)
        path = tmp_path / "events.csv"
        write_events_csv(trace, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "cycle,dwell_ns,spin_in,flip_prob,passed"
        assert len(lines) == trace.n_cycles + 1
        with pytest.raises(ValueError):
            write_events_csv(replace(trace, events=None), path)


class TestClassify:
    def test_suppressed_current_is_positive_state(self):
        trace = CurrentTrace(n_cycles=66_666, n_passed=5, events=None, seed=0)
        result = classify(trace, TunnelingParams(), "outer")
        assert result.classified.m1 == 1.5
        assert result.contrast == pytest.approx(0.99985, abs=1e-5)

    def test_full_current_is_negative_state(self):
        trace = CurrentTrace(n_cycles=1000, n_passed=1000, events=None,
                             seed=0)
        result = classify(trace, TunnelingParams(), "outer")
        assert result.classified.m1 == -1.5
        assert result.contrast == 0.0

    def test_threshold_tie_breaks_negative(self):
        trace = CurrentTrace(n_cycles=1000, n_passed=500, events=None, seed=0)
        result = classify(trace, TunnelingParams(), "inner")
        assert result.classified.m1 == -0.5

    def test_leak_shifts_baseline(self):
        params = TunnelingParams(p_leak_source=0.05)
        trace = CurrentTrace(n_cycles=1000, n_passed=0, events=None, seed=0)
        assert classify(trace, params, "outer").baseline == 950.0

    def test_empty_trace_rejected(self):
        trace = CurrentTrace(n_cycles=0, n_passed=0, events=None, seed=0)
        with pytest.raises(ValueError):
            classify(trace, TunnelingParams(), "outer")


class TestFidelitySweep:
    def test_noiseless_grid_is_perfect(self):
        cells = fidelity_sweep("both", SYS, RATES, [0.0], [0.0], trials=2,
                               seed=0, tunneling=replace(MS_WINDOW,
                                                         window=1e5))
        assert len(cells) == 4
        assert all(c.misclassified == 0 for c in cells)

    def test_monotone_in_alpha(self):
        tun = replace(MS_WINDOW, window=1e5)
        cells = fidelity_sweep("outer", SYS, RATES, [0.0, 0.05, 0.1, 0.2],
                               [0.0], trials=50, seed=0, tunneling=tun)
        by_state = {}
        for c in cells:
            by_state.setdefault(c.true_state.m1, []).append((c.alpha, c.rate))
        for rows in by_state.values():
            rates_sorted = [r for _, r in sorted(rows)]
            assert rates_sorted == sorted(rates_sorted)

    def test_leak_degrades_contrast_not_classification(self):
        tun = replace(MS_WINDOW, alpha=0.0)
        results = {}
        for leak in (0.0, 0.05):
            params = replace(tun, p_leak_source=leak, p_leak_drain=leak)
            trace = run_window(OUTER_UP, outer_pulse(), SYS, params, RATES,
                               seed=0)
            results[leak] = classify(trace, params, "outer")
        assert results[0.05].contrast < results[0.0].contrast
        assert results[0.05].classified.m1 == results[0.0].classified.m1 == 1.5

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            fidelity_sweep("both", SYS, RATES, [], [0.0], 1, 0)
        with pytest.raises(ValueError):
            fidelity_sweep("both", SYS, RATES, [0.0], [0.0], 0, 0)


class TestTunnelingParams:
    def test_invariants(self):
        with pytest.raises(ValueError):
            TunnelingParams(alpha=1.5)
        with pytest.raises(ValueError):
            TunnelingParams(t0=0.0)
        with pytest.raises(ValueError):
            TunnelingParams(p_leak_source=1.0)
        with pytest.raises(ValueError):
            TunnelingParams(t0=200.0, cycle_period=150.0)
        with pytest.raises(ValueError):
            TunnelingParams(window=10.0)
