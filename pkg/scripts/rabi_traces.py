"""Two atoms and one photon: P_plus, P_minus, P_ph traces for a few detunings, with closed-form deviation."""
import argparse

import numpy as np

from atomphase.dynamics import SimConfig, run_trace


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gamma", type=float, default=1.0)
    ap.add_argument("--kappa", type=float, default=0.0)
    ap.add_argument("--initial", default="photon")
    ap.add_argument("--t-max", type=float, default=10.0)
    ap.add_argument("--steps", type=int, default=201)
    args = ap.parse_args()
    times = np.linspace(0, args.t_max, args.steps)
    print("delta,t,P_plus,P_minus,P_ph,deviation")
    for delta in (0.0, 0.5, 1.0):
        cfg = SimConfig(delta=delta, gamma=args.gamma, kappa=args.kappa, initial=args.initial, times=times)
        for r in run_trace(cfg).records:
            print(f"{delta},{r.t:.6g},{r.p_plus:.9f},{r.p_minus:.9f},{r.p_ph:.9f},{r.deviation:.2e}")


if __name__ == "__main__":
    main()
