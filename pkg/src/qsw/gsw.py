"""Generalized Stieltjes-Wigert moments, density, polynomials and recurrences.

Also hosts the moment-determinant machinery (scaled Hankel elimination and
the bordered-determinant construction of orthonormal polynomials), which is
used as an independent oracle for every closed form in this package.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import integrate

from .qseries import (
    INF,
    LogReal,
    QParams,
    qbinomial,
    qpoch,
    qpoch_table,
    qpochhammer,
)


@dataclass(frozen=True)
class MomentSequence:
    values: tuple[LogReal, ...]
    source: str = "custom"  # gsw | modified | custom

    def __len__(self):
        return len(self.values)

    def __getitem__(self, n):
        return self.values[n]

    def floats(self) -> np.ndarray:
        return np.array([float(v) for v in self.values])


@dataclass(frozen=True)
class Polynomial:
    """Dense real polynomial ``sum_k coeffs[k] x^k``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        # trim trailing zeros so that deg is exact
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:1]
        if c.size == 0:
            c = np.zeros(1)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def deg(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> float:
        return float(self.coeffs[-1])

    def __call__(self, x):
        acc = np.zeros_like(np.asarray(x, dtype=float))
        for c in self.coeffs[::-1]:
            acc = acc * x + c
        return acc if np.ndim(acc) else float(acc)

    def eval_terms(self, x: float) -> float:
        """Termwise evaluation with compensated summation (cross-check for Horner)."""
        return math.fsum(c * x ** k for k, c in enumerate(self.coeffs))

    def scaled(self, factor: float) -> "Polynomial":
        return Polynomial(self.coeffs * factor)


@dataclass(frozen=True)
class RecurrenceCoeffs:
    """Monic three-term recurrence ``p_n = (x - c_n) p_{n-1} - lam_n p_{n-2}``.

    ``c[i]`` holds ``c_{i+1}`` and ``lam[i]`` holds ``lam_{i+2}``; the
    1-based accessors :meth:`c_n` / :meth:`lam_n` hide that offset.
    """

    c: np.ndarray
    lam: np.ndarray
    label: str = ""

    def __post_init__(self):
        for name in ("c", "lam"):
            a = np.array(getattr(self, name), dtype=float)
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if np.any(self.lam <= 0):
            bad = int(np.flatnonzero(self.lam <= 0)[0]) + 2
            raise ValueError(f"lambda_{bad} is not positive")

    def __len__(self):
        return len(self.c)

    def c_n(self, n: int) -> float:
        return float(self.c[n - 1])

    def lam_n(self, n: int) -> float:
        return float(self.lam[n - 2])

    def monic_values(self, x: float, n: int) -> np.ndarray:
        """``[p_0(x), ..., p_n(x)]``."""
        out = np.empty(n + 1)
        out[0] = 1.0
        if n >= 1:
            out[1] = x - self.c[0]
        for k in range(2, n + 1):
            out[k] = (x - self.c[k - 1]) * out[k - 1] - self.lam[k - 2] * out[k - 2]
        return out

    def monic_poly(self, n: int) -> Polynomial:
        prev = np.zeros(1)
        cur = np.ones(1)
        for k in range(1, n + 1):
            nxt = np.zeros(k + 1)
            nxt[1:] += cur
            nxt[:k] -= self.c[k - 1] * cur
            if k >= 2:
                nxt[: k - 1] -= self.lam[k - 2] * prev
            prev, cur = cur, nxt
        return Polynomial(cur)

    def moments(self, count: int, mass: float = 1.0) -> np.ndarray:
        """Moments ``e_0^T J^m e_0`` of the Jacobi matrix, scaled by ``mass``.

        All Jacobi entries are positive here, so the matrix powers involve
        no cancellation.
        """
        size = count // 2 + 1
        if size > len(self.c) or size - 1 > len(self.lam):
            raise ValueError(f"need at least {size} recurrence coefficients for {count} moments")
        J = np.diag(self.c[:size])
        off = np.sqrt(self.lam[: size - 1])
        J += np.diag(off, 1) + np.diag(off, -1)
        v = np.zeros(size)
        v[0] = 1.0
        out = []
        for _ in range(count):
            out.append(v[0] * mass)
            v = J @ v
        return np.array(out)


# ---------------------------------------------------------------- moments


def gsw_moments(params: QParams, count: int) -> MomentSequence:
    """``s_n = (p;q)_n q^{-(n+1)^2/2}`` for ``n < count``."""
    lq = math.log(params.q)
    vals = []
    for n in range(count):
        poch = qpochhammer(params.p, params, n)
        vals.append(poch * LogReal(1, -0.5 * (n + 1) ** 2 * lq))
    return MomentSequence(tuple(vals), "gsw")


@functools.lru_cache(maxsize=64)
def _log_poch_inf(z: float, params: QParams) -> float:
    return qpochhammer(z, params).logmag


def log_density(params: QParams, x: float) -> float:
    if not x > 0:
        raise ValueError(f"density is defined for x > 0, got {x!r}")
    p, q = params.p, params.q
    s2 = math.log(1.0 / q)
    lx = math.log(x)
    val = -0.5 * math.log(2 * math.pi * s2) - lx * lx / (2 * s2)
    if p > 0:
        val += _log_poch_inf(p, params)
        val += qpochhammer(-p / (math.sqrt(q) * x), params).logmag
    return val


def density(params: QParams, x: float) -> float:
    """Weight function of the generalized Stieltjes-Wigert polynomials on (0, inf)."""
    return math.exp(log_density(params, x))


def moment_integral(params: QParams, m: int, rtol: float = 1e-12) -> float:
    """``int_0^inf x^m density(x) dx`` by adaptive quadrature in ``u = log x``."""
    s2 = math.log(1.0 / params.q)
    sigma = math.sqrt(s2)

    def logf(u):
        return (m + 1) * u + log_density(params, math.exp(u))

    centre = (m + 1) * s2
    # locate the peak, then walk out until the integrand is negligible
    grid = centre + sigma * np.linspace(-12, 12, 241)
    peak_u = grid[int(np.argmax([logf(u) for u in grid]))]
    peak = logf(peak_u)
    cut = peak - 48.0
    lo = peak_u
    while logf(lo) > cut:
        lo -= sigma
    hi = peak_u
    while logf(hi) > cut:
        hi += sigma
    val, _err = integrate.quad(
        lambda u: math.exp(logf(u) - peak),
        lo, hi, points=[peak_u], limit=400, epsabs=0.0, epsrel=rtol,
    )
    return val * math.exp(peak)


def integrate_density(params: QParams, f, degree: int = 0, rtol: float = 1e-11) -> float:
    """``int_0^inf f(x) density(x) dx`` for ``f`` of polynomial growth ``degree``.

    Integration runs in ``u = log x``. The lower limit comes from the weight
    alone, which for ``p > 0`` decays only exponentially in ``u`` as
    ``x -> 0`` (fixed windows lose mass there); the upper limit comes from
    ``x^degree`` times the weight.
    """
    s2 = math.log(1.0 / params.q)
    sigma = math.sqrt(s2)

    def walk(logg, start, step):
        grid = start + sigma * np.linspace(-12, 12, 97)
        top = grid[int(np.argmax([logg(u) for u in grid]))]
        cut = logg(top) - 60.0
        u = top
        while logg(u) > cut:
            u += step
        return u

    def log_w(u):
        return u + log_density(params, math.exp(u))

    lo = walk(log_w, 0.0, -sigma)
    hi = walk(lambda u: degree * max(u, 0.0) + log_w(u), (degree + 1) * s2, sigma)
    with warnings.catch_warnings():
        # off-diagonal products integrate to ~0, where a relative target is
        # unreachable; callers compare the value against their own bounds
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _err = integrate.quad(
            lambda u: f(math.exp(u)) * math.exp(log_w(u)),
            lo, hi, points=[0.0, s2 * (degree + 1)], limit=800, epsabs=1e-15, epsrel=rtol,
        )
    return val


# ------------------------------------------------------------ polynomials


def gsw_monic(params: QParams, n: int) -> Polynomial:
    """Monic ``S_n(x; p, q)`` in the monomial basis."""
    p, q = params.p, params.q
    pp = qpoch_table(p, q, n)
    coeffs = np.empty(n + 1)
    for k in range(n + 1):
        # (-1)^n q^{-n(n+1/2)} (p;q)_n [n,k] q^{k^2} (-sqrt(q))^k / (p;q)_k
        logmag = (k * k - n * (n + 0.5) + 0.5 * k) * math.log(q)
        coeffs[k] = (-1) ** (n + k) * qbinomial(n, k, q) * pp[n] / pp[k] * math.exp(logmag)
    coeffs[n] = 1.0
    return Polynomial(coeffs)


def gsw_orthonormal_coeffs(params: QParams, n: int) -> np.ndarray:
    """Coefficients ``b_{k,n}`` of the orthonormal ``P_n(x; p, q)``.

    Generated from ``b_{0,n}`` by the ratio between consecutive ``k`` terms,
    which avoids forming large factorial products separately.
    """
    p, q = params.p, params.q
    b = np.empty(n + 1)
    b[0] = (-1) ** n * q ** (n / 2 + 0.25) * math.sqrt(qpoch(p, q, n) / qpoch(q, q, n))
    for k in range(n):
        ratio = (1 - q ** (n - k)) * q ** (2 * k + 1.5) / ((1 - q ** (k + 1)) * (1 - p * q ** k))
        b[k + 1] = -b[k] * ratio
    return b


def gsw_orthonormal(params: QParams, n: int) -> Polynomial:
    return Polynomial(gsw_orthonormal_coeffs(params, n))


def orthonormal_at_zero(params: QParams, n: int) -> float:
    """``P_n(0; p, q)`` from its closed form."""
    p, q = params.p, params.q
    return (-1) ** n * q ** (n / 2 + 0.25) * math.sqrt(qpoch(p, q, n) / qpoch(q, q, n))


# ------------------------------------------------------------ recurrences


def gsw_recurrence(params: QParams, count: int) -> RecurrenceCoeffs:
    """Coefficients ``c_1..c_count`` and ``lam_2..lam_{count+1}`` of ``S_n``."""
    p, q = params.p, params.q
    c = [(1 + q - (p + q) * q ** (n - 1)) * q ** (-2 * n + 0.5) for n in range(1, count + 1)]
    lam = [(1 - q ** n) * (1 - p * q ** (n - 1)) * q ** (-4 * n) for n in range(1, count + 1)]
    return RecurrenceCoeffs(c, lam, "gsw")


def kernel_recurrence(params: QParams, count: int) -> RecurrenceCoeffs:
    """Recurrence ``(d_n, nu_n)`` of the monic kernel polynomials."""
    p, q = params.p, params.q
    d = [(1 + q - (1 + p) * q ** n) * q ** (-2 * n - 0.5) for n in range(1, count + 1)]
    nu = [(1 - q ** n) * (1 - p * q ** n) * q ** (-4 * n - 2) for n in range(1, count + 1)]
    return RecurrenceCoeffs(d, nu, "kernel")


def orthonormal_jacobi(rec: RecurrenceCoeffs, mass: float):
    """Symmetrized recurrence: diagonal ``b_k = c_{k+1}``, off-diagonal ``a_k = sqrt(lam_{k+1})``."""
    return np.asarray(rec.c), np.sqrt(np.asarray(rec.lam)), 1.0 / math.sqrt(mass)


def orthonormal_values(rec: RecurrenceCoeffs, mass: float, x: float, n: int) -> np.ndarray:
    """``[P_0(x), ..., P_n(x)]`` via the orthonormal three-term recurrence."""
    diag, off, p0 = orthonormal_jacobi(rec, mass)
    out = np.empty(n + 1)
    out[0] = p0
    if n >= 1:
        out[1] = (x - diag[0]) * p0 / off[0]
    for k in range(1, n):
        out[k + 1] = ((x - diag[k]) * out[k] - off[k - 1] * out[k - 1]) / off[k]
    return out


# ------------------------------------------------------------- determinants


def hankel_det(params: QParams, n: int) -> LogReal:
    """Closed form of ``D_n = det(s_{i+j})_{0<=i,j<=n}``."""
    lp = sum(qpochhammer(params.p, params, j).logmag for j in range(1, n + 1))
    lq = sum(qpochhammer(params.q, params, j).logmag for j in range(1, n + 1))
    expo = -(n + 1) * (2 * n + 1) * (2 * n + 3) / 6
    return LogReal(1, lp + lq + expo * math.log(params.q))


def hankel_ratio(params: QParams, n: int) -> LogReal:
    """``D_n / D_{n-1} = (p, q; q)_n q^{-(2n+1)^2/2}``."""
    return (
        qpochhammer(params.p, params, n)
        * qpochhammer(params.q, params, n)
        * LogReal(1, -0.5 * (2 * n + 1) ** 2 * math.log(params.q))
    )


def scaled_logdet(signs: np.ndarray, logs: np.ndarray) -> LogReal:
    """Determinant of a matrix given entrywise as ``signs * exp(logs)``.

    Columns and then rows are equilibrated in log space (for Hankel matrices
    this mirrors dividing column j by ``s_j``). Elimination then runs in
    extended precision, with enough digits to cover the dynamic range of the
    equilibrated entries: Hankel matrices of these moments stay extremely
    ill-conditioned after scaling, and double-precision LU loses up to 1e-7
    at q = 0.1.
    """
    signs = np.asarray(signs, dtype=float)
    logs = np.where(signs == 0, -np.inf, np.asarray(logs, dtype=float))
    n = signs.shape[0]
    if n == 0:
        return LogReal(1, 0.0)
    col = logs.max(axis=0)
    col = np.where(np.isfinite(col), col, 0.0)
    L = logs - col
    row = L.max(axis=1)
    if not np.all(np.isfinite(row)):
        return LogReal(0, -INF)
    L = L - row[:, None]
    finite = L[np.isfinite(L)]
    span = float(-finite.min()) / math.log(10) if finite.size else 0.0
    dps = 30 + int(math.ceil(n * span))
    with mpmath.workdps(dps):
        A = mpmath.matrix(n, n)
        for i in range(n):
            for j in range(n):
                if signs[i, j] != 0:
                    A[i, j] = int(signs[i, j]) * mpmath.exp(mpmath.mpf(float(L[i, j])))
        det = mpmath.det(A)
        if det == 0:
            return LogReal(0, -INF)
        sign = 1 if det > 0 else -1
        logabs = float(mpmath.log(abs(det)))
    return LogReal(sign, math.fsum([float(col.sum()), float(row.sum()), logabs]))


def _moment_arrays(moments: MomentSequence):
    s = np.array([v.sign for v in moments.values], dtype=float)
    l = np.array([v.logmag if v.sign else -np.inf for v in moments.values])
    return s, l


def hankel_det_numeric(moments: MomentSequence, n: int) -> LogReal:
    """Brute-force ``det(s_{i+j})_{0<=i,j<=n}`` by scaled elimination."""
    if len(moments) < 2 * n + 1:
        raise ValueError(f"need {2 * n + 1} moments for D_{n}")
    s, l = _moment_arrays(moments)
    idx = np.add.outer(np.arange(n + 1), np.arange(n + 1))
    return scaled_logdet(s[idx], l[idx])


def orthonormal_from_moments(moments: MomentSequence, n: int) -> Polynomial:
    """Orthonormal ``P_n`` from a moment sequence via the bordered determinant.

    The coefficient of ``x^k`` is the cofactor of the bottom-row entry
    ``x^k``, divided by ``sqrt(D_{n-1} D_n)``. Intended for small ``n``.
    """
    if len(moments) < 2 * n + 1:
        raise ValueError(f"need {2 * n + 1} moments for a degree-{n} polynomial")
    for j in range(n + 1):
        Dj = hankel_det_numeric(moments, j)
        if Dj.sign <= 0:
            raise ValueError(f"moment sequence is not positive definite: Hankel minor of order {j} is not positive")
    D_n = hankel_det_numeric(moments, n)
    D_prev = hankel_det_numeric(moments, n - 1) if n >= 1 else LogReal(1, 0.0)
    norm = (D_prev * D_n).sqrt()
    s, l = _moment_arrays(moments)
    idx = np.add.outer(np.arange(n), np.arange(n + 1))  # rows 0..n-1, cols 0..n
    S, L = s[idx], l[idx]
    coeffs = np.empty(n + 1)
    for k in range(n + 1):
        keep = [j for j in range(n + 1) if j != k]
        minor = scaled_logdet(S[:, keep], L[:, keep])
        cof = minor * ((-1) ** (n + k))
        coeffs[k] = float(cof / norm)
    return Polynomial(coeffs)


# ------------------------------------------------------- generating function


def generating_function_check(params: QParams, z: float, t: float) -> tuple[float, float]:
    """Both sides of the generating-function identity for the ``P_n``-sums.

    LHS: ``sum_n (p;q)_n/(q;q)_n (sum_k [n,k] q^{k^2+k/2} z^k/(p;q)_k) t^n``;
    RHS: ``(pt;q)_inf/(t;q)_inf sum_n q^{n^2+n/2} (zt)^n / ((pt;q)_n (q;q)_n)``.
    """
    if not abs(t) < 1:
        raise ValueError(f"|t| must be < 1, got {t!r}")
    p, q, eps = params.p, params.q, params.eps * 1e-2
    lhs_terms = []
    n = 0
    pn = qn = 1.0  # (p;q)_n, (q;q)_n
    # [n,k] (p;q)_n/(q;q)_n <= 1/(q;q)_inf^2 bounds every inner sum uniformly in n
    inner_bound = math.fsum(q ** (k * k + 0.5 * k) * abs(z) ** k / qpoch(p, q, k) for k in range(60))
    inner_bound /= qpoch(q, q) ** 2
    while n < params.max_terms:
        inner = []
        for k in range(n + 1):
            inner.append(qbinomial(n, k, q) * q ** (k * k + 0.5 * k) * z ** k / qpoch(p, q, k))
        term = pn / qn * math.fsum(inner) * t ** n
        lhs_terms.append(term)
        if abs(t) ** n * inner_bound < eps * abs(math.fsum(lhs_terms)) and n > 2:
            break
        pn *= 1 - p * q ** n
        qn *= 1 - q ** (n + 1)
        n += 1
    lhs = math.fsum(lhs_terms)

    rhs_terms = []
    ptn = qn = 1.0
    for n in range(params.max_terms):
        term = q ** (n * n + 0.5 * n) * (z * t) ** n / (ptn * qn)
        rhs_terms.append(term)
        if abs(term) < eps * abs(math.fsum(rhs_terms)) and n > 2:
            break
        ptn *= 1 - p * t * q ** n
        qn *= 1 - q ** (n + 1)
    pref = qpoch(p * t, q) / qpoch(t, q)
    return lhs, pref * math.fsum(rhs_terms)
