"""The p = q specialisation: constants, reductions and the continued fraction.

When p = q the chain sequence and the maximal parameter sequence are constant,
the modified Hankel determinants shrink by exactly q^{n+1}, and the modified
recurrence takes a closed form. This script tabulates each of these against
the general-p code paths over a range of q.
"""

import argparse

import numpy as np

from qsw import chains, gsw, modified
from qsw.qseries import QParams


def rel(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    return float(np.max(np.abs(a - b) / np.abs(b)))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qs", type=float, nargs="+", default=[0.1, 0.25, 0.4, 0.5, 0.6, 0.7])
    ap.add_argument("--depth", type=int, default=200)
    args = ap.parse_args()

    print(f"{'q':>5} {'beta err':>10} {'M err':>10} {'D~/D err':>10} {'coeff err':>10} {'rec err':>10} {'cf - 1/(1+q)':>13}")
    for q in args.qs:
        P = QParams(q, q)
        beta = chains.gsw_chain(P, 50).beta
        _, mx, _ = chains.parameter_sequences(P, 50)
        det = max(rel(float(modified.modified_hankel(P, n) / gsw.hankel_det(P, n)), q ** (n + 1)) for n in range(10))
        coeff = max(
            rel(modified.modified_coeffs(P, n), [modified.modified_coeff_p_eq_q(q, n, k) for k in range(n + 1)])
            for n in range(11)
        )
        a, b = modified.modified_recurrence(P, 11), modified.modified_recurrence_p_eq_q(q, 11)
        rec = max(rel(a.c, b.c), rel(a.lam, b.lam))
        cf = chains.continued_fraction(chains.gsw_chain(P, args.depth), args.depth) - 1 / (1 + q)
        print(
            f"{q:5.2f} {rel(beta, q / (1 + q) ** 2):10.1e} {rel(mx.h, 1 / (1 + q)):10.1e} "
            f"{det:10.1e} {coeff:10.1e} {rec:10.1e} {cf:13.2e}"
        )


if __name__ == "__main__":
    main()
