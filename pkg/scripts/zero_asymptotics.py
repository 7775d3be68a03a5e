"""Compare the positive zeros of D with the Hayman expansion.

Prints, for each n, the scaled zero tau_n q^{2n+1/2}, the first-order
prediction 1 + b1 q^n, and the residual divided by b3 q^{3n}. The last
column should settle near 1 until it reaches double-precision resolution.
"""

import argparse
import math

from qsw import spectrum
from qsw.qseries import QParams


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=float, default=0.3)
    ap.add_argument("--q", type=float, default=0.4)
    ap.add_argument("--count", type=int, default=14)
    args = ap.parse_args()

    P = QParams(args.p, args.q)
    q = P.q
    b1, b2, b3, b4 = spectrum.hayman_coefficients(P)
    print(f"# p={P.p} q={q}  b1={b1:.12g} b2={b2} b3={b3:.12g} b4={b4:.12g}")
    print(f"{'n':>3} {'tau_n':>22} {'scaled':>20} {'1+b1 q^n':>20} {'resid/(b3 q^3n)':>16} {'ratio/q^-2':>12}")
    taus = spectrum.zeros(P, args.count)
    for n, tau in enumerate(taus, start=1):
        scaled = tau * q ** (2 * n + 0.5)
        first = 1 + b1 * q ** n
        ratio = (scaled - first) / (b3 * q ** (3 * n))
        step = taus[n] / tau * q * q if n < len(taus) else math.nan
        print(f"{n:3d} {tau:22.15g} {scaled:20.17f} {first:20.17f} {ratio:16.6f} {step:12.9f}")


if __name__ == "__main__":
    main()
