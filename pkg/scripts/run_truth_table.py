#!/usr/bin/env python3
"""Run the readout truth table (4 true states x N seeds) and print a summary.

Usage: python scripts/run_truth_table.py [--alpha A] [--leak P]
       [--window-ns W] [--seeds N]
"""

import argparse

from fullerene_readout.dynamics import DecoherenceRates, PulseSpec
from fullerene_readout.protocol import (TunnelingParams, classify,
                                        resonance_frequency, run_window,
                                        sweep_states)
from fullerene_readout.spin_core import SystemParams, transition_table


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--alpha", type=float, default=0.1)
    ap.add_argument("--leak", type=float, default=0.0)
    ap.add_argument("--window-ns", type=float, default=1e6)
    ap.add_argument("--seeds", type=int, default=20)
    args = ap.parse_args()

    sys_p = SystemParams(nu1=10000.0, nu2=10063.5, J=50.0)
    rates = DecoherenceRates()
    table = transition_table(sys_p)
    params = TunnelingParams(alpha=args.alpha, p_leak_source=args.leak,
                             p_leak_drain=args.leak, window=args.window_ns)

    print(f"alpha={args.alpha}  leak={args.leak}  "
          f"window={args.window_ns:g} ns  seeds={args.seeds}")
    print(f"{'true':>6} {'enc':>6} {'freq MHz':>10} {'correct':>8} "
          f"{'mean counts':>12} {'mean contrast':>14}")
    for state in sweep_states("both"):
        pulse = PulseSpec.calibrated(resonance_frequency(state, table))
        correct = 0
        counts = []
        contrasts = []
        for seed in range(args.seeds):
            trace = run_window(state, pulse, sys_p, params, rates, seed)
            res = classify(trace, params, state.encoding)
            correct += res.classified == state
            counts.append(trace.n_passed)
            contrasts.append(res.contrast)
        print(f"{state.m1:>+6.1f} {state.encoding:>6} "
              f"{pulse.frequency:>10.1f} {correct:>5}/{args.seeds} "
              f"{sum(counts) / len(counts):>12.1f} "
              f"{sum(contrasts) / len(contrasts):>14.4f}")


if __name__ == "__main__":
    main()
