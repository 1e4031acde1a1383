"""Teleportation optimum near one full period, per mirror occupation.

Prints the traced and heterodyne peak fidelities, where they sit, and the
smallest effective thermal number of the heterodyne channel.
"""

import argparse

import numpy as np

from optomech_cv import dynamics as dyn
from optomech_cv import teleportation as tel
from optomech_cv.cli import REFERENCE_R


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--r", type=float, default=REFERENCE_R)
    parser.add_argument("--nbar", type=float, nargs="*", default=[0.0, 1.0, 10.0, 1e3])
    args = parser.parse_args()

    print(f"r - 1 = {args.r - 1:.3e}")
    print(f"{'n_bar':>8} {'F_traced':>11} {'t_traced':>11} {'F_het':>11} {'t_het':>11}"
          f" {'min n_eff':>10} {'dS(t_het)':>10}")
    for n in args.nbar:
        t_tr, f_tr = tel.optimal_fidelity_scan(None, args.r, n, tel.ChannelKind.TracedOut)
        t_het, f_het = tel.optimal_fidelity_scan(None, args.r, n,
                                                 tel.ChannelKind.HeterodyneConditioned)
        n_eff = tel.effective_thermal_number(dyn.ScaledParams(t_het, args.r, n))
        gain = tel.information_gain(dyn.ScaledParams(t_het, args.r, n))
        print(f"{n:8g} {f_tr:11.8f} {t_tr:11.7f} {f_het:11.8f} {t_het:11.7f}"
              f" {n_eff:10.6f} {gain:10.5f}")
    print(f"classical bound 0.5; 2pi = {2 * np.pi:.7f}")


if __name__ == "__main__":
    main()
