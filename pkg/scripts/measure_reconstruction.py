"""Moment reconstruction from the discrete N-extremal measure as atoms are added.

For each atom count N the table lists the relative error of
sum rho_n tau_n^m + c [m = 0] against s_m for m = 0..6, together with the
extrapolated tail-mass bound.
"""

import argparse

from qsw import gsw, spectrum
from qsw.qseries import QParams


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=float, default=0.0)
    ap.add_argument("--q", type=float, default=0.5)
    ap.add_argument("--counts", type=int, nargs="+", default=[2, 4, 6, 8, 12, 20, 30])
    args = ap.parse_args()

    P = QParams(args.p, args.q)
    s = gsw.gsw_moments(P, 7).floats()
    print(f"# p={P.p} q={P.q}")
    print(f"{'N':>4} " + " ".join(f"{'m=' + str(m):>10}" for m in range(7)) + f" {'tail bound':>12}")
    for N in args.counts:
        nu, _ = spectrum.build_measures(P, N)
        errs = [abs(nu.moment(m) - s[m]) / s[m] for m in range(7)]
        print(f"{N:4d} " + " ".join(f"{e:10.2e}" for e in errs) + f" {nu.tail_mass_bound:12.2e}")


if __name__ == "__main__":
    main()
