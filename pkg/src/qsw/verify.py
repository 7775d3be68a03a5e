"""Self-verification suite: every module invariant evaluated at one (p, q)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from . import chains, gsw, modified, qseries, spectrum
from .qseries import QParams


@dataclass(frozen=True)
class Check:
    module: str
    name: str
    observed: float
    bound: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.observed) and self.observed <= self.bound)


def _rel(a, b) -> float:
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


# each check returns (observed, bound)
CheckFn = Callable[[QParams, dict], tuple[float, float]]


def _pochhammer_step(P, ctx):
    worst = 0.0
    for z in (0.3, -1.7, 2.5):
        for n in range(12):
            lhs = qseries.qpochhammer(z, P, n + 1)
            rhs = qseries.qpochhammer(z, P, n) * (1 - z * P.q ** n)
            worst = max(worst, lhs.rel_diff(rhs))
    return worst, 1e-13


def _qbinomial_theorem(P, ctx):
    p, q = P.p, P.q
    N = 200 if q <= 0.6 else 400
    terms, ratio = [], 1.0
    for n in range(N + 1):
        terms.append(ratio * q ** n)
        ratio *= (1 - p * q ** n) / (1 - q ** (n + 1))
    return _rel(math.fsum(terms), qseries.qpoch(p * q, q) / qseries.qpoch(q, q)), 1e-12


def _psi_dual(P, ctx):
    return max(_rel(qseries.psi(q), qseries.psi_product(q)) for q in (0.1, 0.3, 0.5, 0.7, P.q)), 1e-12


def _qbinomial_product(P, ctx):
    q = P.q
    worst = 0.0
    for n in range(13):
        for k in range(n + 1):
            lhs = qseries.qbinomial(n, k, q) * qseries.qpoch(q, q, k) * qseries.qpoch(q, q, n - k)
            worst = max(worst, _rel(lhs, qseries.qpoch(q, q, n)))
    return worst, 1e-13


def _moment_quadrature(P, ctx):
    s = gsw.gsw_moments(P, 6).floats()
    return max(_rel(gsw.moment_integral(P, m), s[m]) for m in range(6)), 1e-7


def _recurrence_residual(P, ctx):
    rec = gsw.gsw_recurrence(P, 9)
    polys = [gsw.gsw_monic(P, n) for n in range(9)]
    worst = 0.0
    for x in (0.25, 1.0, 4.0):
        for n in range(2, 9):
            r = polys[n](x) - (x - rec.c_n(n)) * polys[n - 1](x) + rec.lam_n(n) * polys[n - 2](x)
            worst = max(worst, abs(r) / max(1.0, abs(polys[n](x))))
    return worst, 1e-9


def _hankel(P, ctx):
    mom = gsw.gsw_moments(P, 11)
    closed = gsw.hankel_det(P, 0)
    worst = 0.0
    for n in range(6):
        closed = gsw.hankel_det(P, n)
        if ctx.get("inject_fault"):
            closed = closed * (1 + 1e-6)
        worst = max(worst, closed.rel_diff(gsw.hankel_det_numeric(mom, n)))
    return worst, 1e-8


def _orthonormality_quadrature(P, ctx):
    polys = [gsw.gsw_orthonormal(P, n) for n in range(5)]
    worst = 0.0
    for j in range(5):
        for k in range(j, 5):
            val = gsw.integrate_density(P, lambda x, j=j, k=k: polys[j](x) * polys[k](x), degree=j + k)
            worst = max(worst, abs(val - (j == k)))
    return worst, 5e-6


def _value_at_zero(P, ctx):
    return max(_rel(gsw.gsw_orthonormal(P, n)(0.0), gsw.orthonormal_at_zero(P, n)) for n in range(13)), 1e-14


def _modified_dual(P, ctx):
    worst = 0.0
    for n in range(11):
        for k in range(n + 1):
            a, b = modified.modified_coeff_pair(P, n, k)
            worst = max(worst, _rel(a, b))
    return worst, 1e-11


def _modified_oracle(P, ctx):
    mm = modified.modified_moments(P, 13)
    return max(_rel(modified.modified_coeffs(P, n), gsw.orthonormal_from_moments(mm, n).coeffs) for n in range(7)), 1e-8


def _gsw_oracle(P, ctx):
    mom = gsw.gsw_moments(P, 13)
    return max(_rel(gsw.gsw_orthonormal_coeffs(P, n), gsw.orthonormal_from_moments(mom, n).coeffs) for n in range(7)), 1e-8


def _modified_recurrence(P, ctx):
    rows = [modified.modified_coeffs(P, n) for n in range(12)]
    via = modified.recurrence_from_coeffs(rows)
    rec = modified.modified_recurrence(P, 11)
    return max(_rel(rec.c[:11], via.c[:11]), _rel(rec.lam[:10], via.lam[:10])), 1e-10


def _sign_pattern(P, ctx):
    bad = 0
    for n in range(11):
        c = modified.modified_coeffs(P, n)
        bad += sum(1 for k in range(n + 1) if np.sign(c[k]) != (-1) ** (n + k))
    return float(bad), 0.0


def _p_eq_q(P, ctx):
    q = P.q
    worst = 0.0
    for n in range(11):
        for k in range(n + 1):
            worst = max(worst, _rel(modified.modified_coeffs(P, n)[k], modified.modified_coeff_p_eq_q(q, n, k)))
        worst = max(worst, _rel(modified.modified_normalizer(P, n), (-1) ** n * q ** (-n / 2 - 0.25)))
        ratio = float(modified.modified_hankel(P, n) / gsw.hankel_det(P, n))
        worst = max(worst, _rel(ratio, q ** (n + 1)))
    a, b = modified.modified_recurrence(P, 11), modified.modified_recurrence_p_eq_q(q, 11)
    worst = max(worst, _rel(a.c, b.c), _rel(a.lam, b.lam))
    return worst, 1e-12


def _kernel_p_eq_q(P, ctx):
    q = P.q
    k = gsw.kernel_recurrence(P, 12)
    d = [(1 + q) * (1 - q ** n) * q ** (-2 * n - 0.5) for n in range(1, 13)]
    nu = [(1 - q ** n) * (1 - q ** (n + 1)) * q ** (-4 * n - 2) for n in range(1, 13)]
    beta = chains.gsw_chain(P, 50).beta
    _, mx, _ = chains.parameter_sequences(P, 50)
    return max(
        _rel(k.c, d), _rel(k.lam, nu), _rel(beta, q / (1 + q) ** 2), _rel(mx.h, 1 / (1 + q))
    ), 1e-12


def _chain_params(P, ctx):
    beta = chains.gsw_chain(P, 50).beta
    return max(_rel(s.chain(), beta) for s in chains.parameter_sequences(P, 51)), 1e-12


def _chain_kernel(P, ctx):
    return _rel(chains.chain_from_kernel(gsw.kernel_recurrence(P, 51)).beta, chains.gsw_chain(P, 50).beta), 1e-12


def _min_below_max(P, ctx):
    mn, mx, _ = chains.parameter_sequences(P, 51)
    violations = float(np.sum(mn.h >= mx.h)) + (0.0 if mn.h[0] == 0.0 else 1.0)
    return violations, 0.0


def _cf(P, ctx):
    beta = chains.gsw_chain(P, 400)
    return max(
        abs(chains.continued_fraction(beta.tail(k), 200) - chains.cf_closed_form(P, k)) for k in range(3)
    ), 1e-7


def _lg(P, ctx):
    L, G = chains.lg_series(P, 300)
    M0 = chains.cf_closed_form(P, 0)
    h0 = chains.parameter_sequences(P, 1)[2].h[0]
    return max(_rel(1 / L, M0), _rel(h0 + (1 - h0) / G, M0), _rel(chains.cf_closed_form_alt(P), M0)), 1e-9


def _shell(P, ctx):
    kern = gsw.kernel_recurrence(P, 12)
    _, mx, bt = chains.parameter_sequences(P, 12)
    s1 = chains.shell_recurrence(kern, bt, 11)
    s2 = chains.shell_recurrence(kern, mx, 11)
    g = gsw.gsw_recurrence(P, 11)
    m = modified.modified_recurrence(P, 11)
    return max(_rel(s1.c, g.c), _rel(s1.lam, g.lam[:10]), _rel(s2.c, m.c), _rel(s2.lam, m.lam[:10])), 1e-10


def _mu_h(P, ctx):
    kern = gsw.kernel_recurrence(P, 12)
    _, mx, bt = chains.parameter_sequences(P, 12)
    mh = chains.shell_recurrence(kern, bt, 10).moments(9)
    mM = chains.shell_recurrence(kern, mx, 10).moments(9)
    factor = mx.h[0] / bt.h[0]  # mu^h(R) / mu^M(R)
    # rescale mu^h so that orders >= 1 coincide with mu^M; order 0 then carries the extra atom
    scaled = mh * factor
    return max(_rel(scaled[1:], mM[1:]), _rel(scaled[0] / mM[0], factor)), 1e-8


def _measure(P, ctx):
    if "measure" not in ctx:
        ctx["measure"] = spectrum.build_measures(P, 30)
    return ctx["measure"]


def _zero_simplicity(P, ctx):
    nu, _ = _measure(P, ctx)
    taus = nu.points
    worst = max(spectrum.zero_residual(P, t) for t in taus[:8])
    # sign alternates strictly between consecutive zeros
    mids = np.sqrt(np.concatenate([[taus[0] * P.q], taus[:-1]]) * taus)
    signs = [spectrum.dfunction_scaled(P, m)[0] for m in mids]
    bad = sum(1 for n, s in enumerate(signs) if s * (-1) ** n <= 0)
    return worst + bad, 1e-10


def _asymptotic(P, ctx):
    nu, _ = _measure(P, ctx)
    q = P.q
    b1, _, b3, _ = spectrum.hayman_coefficients(P)
    worst = 0.0
    for n in (6, 8, 10):
        bound = 2 * abs(b3) * q ** (3 * n)
        if bound < 1e-14:  # within ~100 ulp of tau_n q^{2n+1/2} = 1: not resolvable
            continue
        err = abs(nu.points[n - 1] * q ** (2 * n + 0.5) - (1 + b1 * q ** n))
        worst = max(worst, err / bound)
    return worst, 1.0


def _measure_mass(P, ctx):
    nu, _ = _measure(P, ctx)
    s = gsw.gsw_moments(P, 7).floats()
    worst = max(_rel(nu.moment(m), s[m]) for m in range(5))
    worst = max(worst, 0.1 * max(_rel(nu.moment(m), s[m]) for m in (5, 6)))
    positive = np.all(np.isfinite(nu.log_masses)) and np.all(np.diff(nu.points) > 0)
    return (worst if positive else math.inf), 1e-5


def _recurrence_vs_coeffs(P, ctx):
    nu, _ = _measure(P, ctx)
    rec = gsw.gsw_recurrence(P, 12)
    worst = 0.0
    for tau in nu.points[:6]:
        vals = gsw.orthonormal_values(rec, 1 / math.sqrt(P.q), tau, 10)
        for k in range(11):
            worst = max(worst, _rel(gsw.gsw_orthonormal(P, k)(tau), vals[k]))
    return worst, 1e-8


def _discrete_orthonormality(P, ctx):
    _, mu = _measure(P, ctx)
    polys = [modified.modified_poly(P, j) for j in range(5)]
    worst = 0.0
    for j in range(5):
        for k in range(j, 5):
            val = mu.integrate(lambda x: polys[j](x) * polys[k](x))
            worst = max(worst, abs(val - (j == k)))
    return worst, 5e-6


SUITE: list[tuple[str, str, CheckFn]] = [
    ("qseries_core", "pochhammer step identity", _pochhammer_step),
    ("qseries_core", "q-binomial theorem partial sum", _qbinomial_theorem),
    ("qseries_core", "psi dual formula", _psi_dual),
    ("qseries_core", "qbinomial product identity", _qbinomial_product),
    ("gsw", "moment/quadrature agreement", _moment_quadrature),
    ("gsw", "recurrence residual", _recurrence_residual),
    ("gsw", "Hankel closed form vs brute force", _hankel),
    ("gsw", "orthonormality by quadrature", _orthonormality_quadrature),
    ("gsw", "orthonormal value at zero", _value_at_zero),
    ("gsw", "orthonormal polynomials vs determinant oracle", _gsw_oracle),
    ("modified", "dual-formula coefficient agreement", _modified_dual),
    ("modified", "oracle equivalence", _modified_oracle),
    ("modified", "recurrence consistency", _modified_recurrence),
    ("modified", "sign pattern", _sign_pattern),
    ("chains", "chain/parameter identity", _chain_params),
    ("chains", "chain from kernel recurrence", _chain_kernel),
    ("chains", "minimal below maximal", _min_below_max),
    ("chains", "continued fraction vs closed form", _cf),
    ("chains", "L and G series", _lg),
    ("chains", "shell synthesis round trips", _shell),
    ("chains", "mu^h moment relation", _mu_h),
    ("spectrum", "zero simplicity", _zero_simplicity),
    ("spectrum", "asymptotic consistency", _asymptotic),
    ("spectrum", "measure positivity and total mass", _measure_mass),
    ("spectrum", "recurrence vs coefficient evaluation", _recurrence_vs_coeffs),
    ("spectrum", "discrete orthonormality", _discrete_orthonormality),
]

P_EQ_Q_SUITE: list[tuple[str, str, CheckFn]] = [
    ("modified", "p=q reduction", _p_eq_q),
    ("chains", "p=q kernel coefficients and constant sequences", _kernel_p_eq_q),
]


def run_suite(params: QParams, inject_fault: bool = False) -> list[Check]:
    ctx: dict = {"inject_fault": inject_fault}
    suite = list(SUITE)
    if params.p == params.q:
        suite += P_EQ_Q_SUITE
    out = []
    for module, name, fn in suite:
        try:
            observed, bound = fn(params, ctx)
        except (ArithmeticError, ValueError, RuntimeError) as exc:
            observed, bound = math.inf, 0.0
            name = f"{name} ({type(exc).__name__}: {exc})"
        out.append(Check(module, name, float(observed), float(bound)))
    return out
