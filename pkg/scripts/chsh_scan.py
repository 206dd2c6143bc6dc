"""CHSH value of chi_10 versus theta_b for the reference settings, all sign placements."""
import argparse

import numpy as np

from atomphase.atomlattice import chi_state
from atomphase.nonlocality import VARIANTS, ChshSettings, chsh_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=37)
    args = ap.parse_args()
    s = chi_state(1, 0)
    print("theta_b," + ",".join(f"S[{v}]" for v in VARIANTS) + ",S_max")
    for tb in np.linspace(-np.pi / 2, np.pi / 2, args.points):
        r = chsh_scan(s, ChshSettings.reference(tb))
        print(f"{tb:.6f}," + ",".join(f"{r.values[v]:.9f}" for v in VARIANTS) + f",{r.s_max:.9f}")


if __name__ == "__main__":
    main()
