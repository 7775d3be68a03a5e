"""Truncation error of the continued fraction 1 - beta_1/(1 - beta_2/(1 - ...)).

For the gsw chain the truncations decrease monotonically to M_0 and the
error falls geometrically. For the constant chain beta = 1/4 (the boundary
value) the depth-d truncation is exactly (d + 2)/(2(d + 1)), so the error
decays only like 1/(2d).
"""

import argparse

import numpy as np

from qsw import chains
from qsw.chains import ChainSequence
from qsw.qseries import QParams


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=float, default=0.3)
    ap.add_argument("--q", type=float, default=0.4)
    ap.add_argument("--depths", type=int, nargs="+", default=[1, 2, 4, 8, 16, 32, 64, 200, 1000, 10000])
    args = ap.parse_args()

    P = QParams(args.p, args.q)
    M0 = chains.cf_closed_form(P, 0)
    gsw_chain = chains.gsw_chain(P, max(args.depths))
    quarter = ChainSequence(np.full(max(args.depths), 0.25))
    print(f"# p={P.p} q={P.q}  M_0={M0:.15g}")
    print(f"{'depth':>6} {'gsw cf - M_0':>14} {'1/4 chain - 1/2':>16} {'1/(2(d+1))':>12}")
    for d in args.depths:
        g = chains.continued_fraction(gsw_chain, d) - M0
        c = chains.continued_fraction(quarter, d) - 0.5
        print(f"{d:6d} {g:14.3e} {c:16.6e} {1 / (2 * (d + 1)):12.6e}")


if __name__ == "__main__":
    main()
