"""Modified generalized Stieltjes-Wigert polynomials.

These are orthonormal with respect to the moment sequence obtained by
removing the atom ``c`` at the origin from the N-extremal solution: the
moments agree with ``s_n`` except at ``n = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gsw import MomentSequence, Polynomial, RecurrenceCoeffs, gsw_moments, gsw_orthonormal_coeffs, hankel_det
from .qseries import LogReal, QParams, delta, qbinomial, qpoch, qpochhammer


@dataclass(frozen=True)
class ModifiedMoments(MomentSequence):
    mass_at_zero: float = 0.0


def mass_at_zero(params: QParams) -> float:
    """``c = (q;q)_inf / (sqrt(q) (pq;q)_inf)``."""
    q = params.q
    return qpoch(q, q) / (math.sqrt(q) * qpoch(params.p * q, q))


def modified_moments(params: QParams, count: int) -> ModifiedMoments:
    base = gsw_moments(params, count)
    if count == 0:
        return ModifiedMoments((), "modified", mass_at_zero(params))
    q = params.q
    # 1 - (q;q)_inf/(pq;q)_inf == Delta_1 / (pq;q)_inf, without cancellation
    s0 = delta(params, 1) / qpoch(params.p * q, q) / math.sqrt(q)
    vals = (LogReal.from_float(s0),) + base.values[1:]
    return ModifiedMoments(vals, "modified", mass_at_zero(params))


class _Products:
    """Cache of ``(p q^m; q)_inf``, ``(q^m; q)_inf`` and ``Delta_m`` for one parameter pair."""

    def __init__(self, params: QParams):
        self.params = params
        self._a: dict[int, float] = {}
        self._b: dict[int, float] = {}
        self._d: dict[int, float] = {}

    def A(self, m: int) -> float:
        if m not in self._a:
            p, q = self.params.p, self.params.q
            self._a[m] = qpoch(p * q ** m, q)
        return self._a[m]

    def B(self, m: int) -> float:
        if m not in self._b:
            self._b[m] = 0.0 if m == 0 else qpoch(self.params.q ** m, self.params.q)
        return self._b[m]

    def D(self, m: int) -> float:
        if m not in self._d:
            self._d[m] = delta(self.params, m)
        return self._d[m]

    def bracket_numerator(self, n: int, k: int) -> float:
        """``(1 - p q^k) A_{n+1} - (1 - q^k) B_{n+1}`` rewritten as ``Delta_{n+1} + q^k (B - p A)``."""
        p, q = self.params.p, self.params.q
        return self.D(n + 1) + q ** k * (self.B(n + 1) - p * self.A(n + 1))


def modified_normalizer(params: QParams, n: int, pr: _Products | None = None) -> float:
    pr = pr or _Products(params)
    p, q = params.p, params.q
    return (
        (-1) ** n
        * q ** (n / 2 + 0.25)
        * math.sqrt(qpoch(p, q, n + 1) / qpoch(q, q, n))
        * pr.A(n + 1)
        / math.sqrt(pr.D(n) * pr.D(n + 1))
    )


def modified_coeff_pair(params: QParams, n: int, k: int, pr: _Products | None = None) -> tuple[float, float]:
    """``b~_{k,n}`` by the direct normalizer route and by rescaling ``b_{k,n}``."""
    if not (0 <= k <= n):
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    pr = pr or _Products(params)
    p, q = params.p, params.q
    num = pr.bracket_numerator(n, k)
    direct = (
        modified_normalizer(params, n, pr)
        * (-1) ** k
        * qbinomial(n, k, q)
        * q ** (k * k + 0.5 * k)
        / qpoch(p, q, k)
        * num
        / ((1 - p * q ** k) * pr.A(n + 1))
    )
    b_kn = gsw_orthonormal_coeffs(params, n)[k]
    via_ratio = b_kn * num / (1 - p * q ** k) * math.sqrt((1 - p * q ** n) / (pr.D(n) * pr.D(n + 1)))
    return direct, via_ratio


def modified_coeff(params: QParams, n: int, k: int, rtol: float = 1e-11) -> float:
    direct, via_ratio = modified_coeff_pair(params, n, k)
    if abs(direct - via_ratio) > rtol * abs(direct):
        raise ArithmeticError(
            f"coefficient b~_({k},{n}) disagrees between routes: {direct!r} vs {via_ratio!r}"
        )
    return direct


def modified_coeffs(params: QParams, n: int) -> np.ndarray:
    pr = _Products(params)
    return np.array([modified_coeff_pair(params, n, k, pr)[0] for k in range(n + 1)])


def modified_poly(params: QParams, n: int) -> Polynomial:
    return Polynomial(modified_coeffs(params, n))


def modified_leading(params: QParams, n: int) -> float:
    """``b~_{n,n} = q^{n^2+n+1/4} (Delta_n / (Delta_{n+1} (p;q)_{n+1} (q;q)_n))^{1/2}``."""
    p, q = params.p, params.q
    return q ** (n * n + n + 0.25) * math.sqrt(
        delta(params, n) / (delta(params, n + 1) * qpoch(p, q, n + 1) * qpoch(q, q, n))
    )


def modified_hankel(params: QParams, n: int) -> LogReal:
    """``D~_n = Delta_{n+1} / (p q^{n+1}; q)_inf * D_n``."""
    p, q = params.p, params.q
    factor = delta(params, n + 1) / qpoch(p * q ** (n + 1), q)
    return hankel_det(params, n) * factor


def modified_recurrence(params: QParams, count: int) -> RecurrenceCoeffs:
    """Recurrence coefficients ``c~_1..c~_count`` and ``lam~_2..lam~_{count+1}``."""
    p, q = params.p, params.q
    pr = _Products(params)

    def E(m):
        # (1 - q^{m+1}) A_m - (1 - p q^{m+1}) B_m
        return pr.D(m) - q ** (m + 1) * (pr.A(m) - p * pr.B(m))

    c = [pr.A(0) * q ** -1.5 / pr.D(1)]
    for n in range(1, count):
        c.append(
            E(n) * q ** (-2 * n - 1.5) / ((1 - q) * pr.D(n + 1))
            - E(n - 1) * q ** (-2 * n + 0.5) / ((1 - q) * pr.D(n))
        )
    lam = [
        pr.D(n - 1) * pr.D(n + 1) / pr.D(n) ** 2 * (1 - q ** n) * (1 - p * q ** n) * q ** (-4 * n)
        for n in range(1, count + 1)
    ]
    return RecurrenceCoeffs(c, lam, "modified")


def recurrence_from_coeffs(coeff_rows: list[np.ndarray]) -> RecurrenceCoeffs:
    """Monic recurrence recovered from orthonormal coefficient rows ``b[n][k]``.

    ``coeff_rows[n]`` must hold the coefficients of the degree-``n`` polynomial;
    returns ``c_1..c_N`` and ``lam_2..lam_N`` for ``N = len(coeff_rows) - 1``.
    """
    b = coeff_rows
    N = len(b) - 1
    c = [-b[1][0] / b[1][1]]
    for n in range(1, N):
        c.append(b[n][n - 1] / b[n][n] - b[n + 1][n] / b[n + 1][n + 1])
    lam = [(b[n - 1][n - 1] / b[n][n]) ** 2 for n in range(1, N)]
    return RecurrenceCoeffs(c, lam, "from-coeffs")


# ----------------------------------------------------------- p = q forms


def modified_coeff_p_eq_q(q: float, n: int, k: int) -> float:
    """Reduced coefficient formula valid when ``p == q``."""
    Cn = (-1) ** n * q ** (-n / 2 - 0.25)
    # 1 - q^{k+1} - (1 - q^k)(1 - q^{n+1}), expanded so nothing cancels
    br = q ** k * (1 - q) + q ** (n + 1) * (1 - q ** k)
    return Cn * (-1) ** k * qbinomial(n, k, q) * q ** (k * k + 0.5 * k) / qpoch(q, q, k + 1) * br


def modified_recurrence_p_eq_q(q: float, count: int) -> RecurrenceCoeffs:
    c = [(1 + q ** 3 - (1 + q * q) * q ** n) * q ** (-2 * n - 0.5) for n in range(1, count + 1)]
    lam = [(1 - q ** n) ** 2 * q ** (-4 * n) for n in range(1, count + 1)]
    return RecurrenceCoeffs(c, lam, "modified p=q")


# --------------------------------------------------------------- asymptotics


def modified_asymptotic_profile(params: QParams, x: float) -> float:
    """Prefactor ``c(x)`` in ``P~_n(x) ~ (-1)^n c(x) q^{-n/2}``."""
    p, q = params.p, params.q
    pref = q ** -0.25 * (1 - q) / (1 - p) * math.sqrt(qpoch(p, q) / qpoch(q, q))
    terms = []
    k = 0
    pqk = qk = 1.0  # (pq;q)_k, (q;q)_k
    while k < params.max_terms:
        t = q ** (k * k + 0.5 * k) * (-q * x) ** k / (pqk * qk)
        terms.append(t)
        if k > 0 and abs(t) < params.eps * 1e-2 * max(abs(math.fsum(terms)), 1e-300):
            break
        pqk *= 1 - p * q ** (k + 1)
        qk *= 1 - q ** (k + 1)
        k += 1
    return pref * math.fsum(terms)


def profile_ratio(params: QParams, n: int, x: float) -> float:
    """``(-1)^n q^{n/2} P~_n(x) / c(x)``; tends to 1 as ``n`` grows."""
    val = modified_poly(params, n).eval_terms(x)
    return (-1) ** n * params.q ** (n / 2) * val / modified_asymptotic_profile(params, x)


def delta_ratio_to_asymptote(params: QParams, n: int) -> float:
    """``(1 - (q^n;q)_inf/(pq^n;q)_inf) / ((1-p)/(1-q) q^n)``; tends to 1."""
    p, q = params.p, params.q
    lhs = delta(params, n) / qpoch(p * q ** n, q)
    return lhs / ((1 - p) / (1 - q) * q ** n)
