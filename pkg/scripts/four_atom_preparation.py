"""Four atoms plus two photons: how close does evolution get to the half-excited phase-state subspace?

Compares several product initial conditions over a long time window.
"""
import argparse

import numpy as np

from atomphase.dynamics import SimConfig, phase_overlap_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--delta", type=float, default=0.0)
    ap.add_argument("--kappa", type=float, default=0.0)
    ap.add_argument("--t-max", type=float, default=30.0)
    ap.add_argument("--steps", type=int, default=3001)
    args = ap.parse_args()
    times = np.linspace(0, args.t_max, args.steps)
    for init in ("photon", "eggg|1", "eegg|0"):
        cfg = SimConfig(n_pairs=2, delta=args.delta, kappa=args.kappa, initial=init, times=times)
        scan = phase_overlap_scan(cfg)
        per = " ".join(f"{x:.4f}" for x in scan.max_per_state())
        print(f"{init:>8}: max subspace {scan.max_subspace:.6f} at t={scan.argmax_time:.3f}; per phase state [{per}]")


if __name__ == "__main__":
    main()
