"""Zeros of the D-function, Christoffel masses and the discrete N-extremal measure.

The zeros grow like ``q^{-2n-1/2}`` and the masses decay like
``q^{2 n^2}``, so both the D-series and the Christoffel sums are evaluated
with an explicit log-scale: series terms relative to a smooth envelope, and
recurrence values rescaled on the fly. Masses are kept as logarithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import optimize

from .gsw import gsw_moments
from .modified import mass_at_zero
from .qseries import LogReal, QParams, psi, qpoch

# zeros are supported while they stay well inside double range
MAX_POINT = 1e300


class RangeExhaustedError(ArithmeticError):
    """Requested zero lies beyond the representable range."""


class BracketError(RuntimeError):
    """No sign change could be located for a zero."""


@dataclass(frozen=True)
class DiscreteMeasure:
    """Atoms ``(points[i], exp(log_masses[i]))`` plus an optional atom at 0."""

    points: np.ndarray
    log_masses: np.ndarray
    atom_at_zero: float = 0.0
    atom_count: int = 0
    tail_mass_bound: float = 0.0
    reconstruction_error: float = math.nan

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        lm = np.array(self.log_masses, dtype=float)
        if pts.shape != lm.shape:
            raise ValueError("points and masses differ in length")
        if np.any(pts <= 0) or np.any(np.diff(pts) <= 0):
            raise ValueError("support points must be positive and strictly increasing")
        if not np.all(np.isfinite(lm)):
            raise ValueError("masses must be positive and finite")
        if self.atom_at_zero < 0:
            raise ValueError("atom at zero must be nonnegative")
        for a in (pts, lm):
            a.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "log_masses", lm)
        if not self.atom_count:
            object.__setattr__(self, "atom_count", len(pts))

    @property
    def masses(self) -> np.ndarray:
        """Masses as floats; entries beyond double range underflow to 0."""
        return np.exp(self.log_masses)

    def total_mass(self) -> float:
        return self.moment(0)

    def moment(self, m: int) -> float:
        logs = self.log_masses + m * np.log(self.points)
        top = logs.max() if logs.size else -np.inf
        body = math.fsum(np.exp(logs - top)) * math.exp(top) if logs.size else 0.0
        return body + (self.atom_at_zero if m == 0 else 0.0)

    def integrate(self, f) -> float:
        """``sum_i mass_i f(point_i)`` plus ``atom_at_zero * f(0)``."""
        total = [math.exp(lm) * f(x) for x, lm in zip(self.points, self.log_masses)]
        if self.atom_at_zero:
            total.append(self.atom_at_zero * f(0.0))
        return math.fsum(total)

    def without_zero_atom(self) -> "DiscreteMeasure":
        return DiscreteMeasure(
            self.points, self.log_masses, 0.0, self.atom_count, self.tail_mass_bound, self.reconstruction_error
        )


# --------------------------------------------------------------- D-function


def _envelope_log(q: float, w: float) -> float:
    """Smooth upper envelope of ``log(q^{n(n+1)} w^n)`` over real ``n >= 0``."""
    a = -math.log(q)
    lw = math.log(w) if w > 0 else -math.inf
    return (lw - a) ** 2 / (4 * a) if lw > a else 0.0


def _series_scaled(params: QParams, w: float) -> tuple[float, float]:
    """``sum_n (-1)^n q^{n(n+1)} w^n / (pq,q;q)_n`` as (value / envelope, log envelope)."""
    p, q = params.p, params.q
    lq = math.log(q)
    aw = abs(w)
    env = _envelope_log(q, aw)
    if aw == 0:
        return 1.0, 0.0
    lw = math.log(aw)
    sgn_w = -1 if w > 0 else 1  # sign of (-w)
    terms = []
    lpoch = 0.0
    prev = -math.inf
    for n in range(params.max_terms):
        lt = n * (n + 1) * lq + n * lw - lpoch
        terms.append((sgn_w ** n) * math.exp(lt - env))
        # past the peak and negligible against the envelope
        if lt < prev and lt - env < math.log(params.eps) - 5:
            break
        prev = lt
        lpoch += math.log1p(-p * q ** (n + 1)) + math.log1p(-(q ** (n + 1)))
    return math.fsum(terms), env


def dfunction_scaled(params: QParams, z: float) -> tuple[float, float]:
    """D(z) as ``(value, logscale)`` with ``D(z) = value * exp(logscale)``.

    ``value`` is the series relative to a smooth envelope, so its sign is
    that of D and its size is O(1) away from the zeros.
    """
    q = params.q
    sq = math.sqrt(q)
    if z == 0:
        return 0.0, 0.0
    val, env = _series_scaled(params, z * sq)
    pref = z * sq * qpoch(params.p * q, q) / qpoch(q, q)
    return val * (1 if pref > 0 else -1), env + math.log(abs(pref))


def dfunction_log(params: QParams, z: float) -> LogReal:
    val, scale = dfunction_scaled(params, z)
    if val == 0:
        return LogReal(0, -math.inf)
    return LogReal(1 if val > 0 else -1, math.log(abs(val)) + scale)


def dfunction(params: QParams, z: float) -> float:
    """``D(z) = z sqrt(q) (pq;q)_inf/(q;q)_inf sum_n (-1)^n q^{n(n+1)} (z sqrt q)^n / (pq,q;q)_n``."""
    return float(dfunction_log(params, z))


def dfunction_from_polynomials(params: QParams, z: float, terms: int = 60) -> float:
    """``z sum_{n<terms} P_n(0) P_n(z)``, with ``P_n`` from the orthonormal recurrence."""
    from .gsw import gsw_recurrence, orthonormal_at_zero, orthonormal_values

    rec = gsw_recurrence(params, terms + 1)
    s0 = 1 / math.sqrt(params.q)
    vals = orthonormal_values(rec, s0, z, terms - 1)
    return z * math.fsum(orthonormal_at_zero(params, n) * vals[n] for n in range(terms))


# -------------------------------------------------------------------- zeros


def hayman_coefficients(params: QParams) -> tuple[float, float, float, float]:
    """``(b_1, b_2, b_3, b_4)`` of the large-zero expansion."""
    p, q = params.p, params.q
    ps = psi(q)
    b1 = -(1 + p) / ((1 - q) * ps ** 2)
    lam = []
    j = 1
    while True:
        t = (2 * j - 1) * q ** (2 * j - 1) / (1 - q ** (2 * j - 1))
        lam.append(t)
        if t < 1e-3 * params.eps * lam[0]:
            break
        j += 1
    lambert = math.fsum(lam)
    b3 = -(q * (1 + q * q) * (1 + p ** 3) + 2 * p * q * (1 + p) * (1 + q + q * q)) / (
        (1 - q) * (1 - q * q) * (1 - q ** 3) * ps ** 2
    ) + (1 + p) ** 3 / ((1 - q) ** 3 * ps ** 6) * lambert
    return b1, 0.0, b3, b1 * b3


def zero_seed(params: QParams, n: int, b1: float | None = None) -> float:
    """``q^{-2n-1/2} (1 + b_1 q^n)``, clipped away from zero for small ``n``."""
    if b1 is None:
        b1 = hayman_coefficients(params)[0]
    q = params.q
    return q ** (-2 * n - 0.5) * max(1 + b1 * q ** n, 0.05)


def _sign(params, x):
    return dfunction_scaled(params, x)[0]


def zeros(params: QParams, count: int, polish: bool = True) -> np.ndarray:
    """First ``count`` positive zeros ``tau_1 < tau_2 < ...`` of the D-function.

    For each ``n`` the interval above the previous zero is scanned on a
    geometric grid up to the seed bracket ``T_n / q``; on ``(tau_{n-1}, tau_n)``
    D has sign ``(-1)^{n-1}`` so the first grid point of the opposite sign
    closes the bracket, which is then refined with Brent's method. With
    ``polish`` the root is finished in extended precision, since the double
    series only pins tau_n to about 1e-14 relative.
    """
    if count < 1:
        raise ValueError("count must be positive")
    p, q = params.p, params.q
    b1 = hayman_coefficients(params)[0]
    log10_last = (-2 * count - 1.5) * math.log10(q)  # seed bracket T_count / q, b_1 term ~ 1
    if log10_last > math.log10(MAX_POINT):
        raise RangeExhaustedError(
            f"zero tau_{count} would lie near 1e{log10_last:.0f}, beyond the supported range (<= {MAX_POINT:.0e})"
        )
    # below this point the D-series alternates with decreasing terms, so D > 0
    lower = 0.5 * (1 - p * q) * (1 - q) * q ** -2.5
    out = []
    prev = lower
    ratio = q ** (-1 / 32)
    for n in range(1, count + 1):
        want = -1 if n % 2 else 1  # sign of D just past tau_n
        upper = zero_seed(params, n, b1) / q
        if upper > MAX_POINT:
            raise RangeExhaustedError(f"zero tau_{n} lies beyond the supported range (~{upper:.3g})")
        a = prev * (1 + 1e-9) if out else prev
        fa = _sign(params, a)
        if fa * want > 0:
            raise BracketError(f"sign pattern broken just above tau_{n - 1}: missing zero before tau_{n}")
        bracket = None
        widen = 0
        x = a
        while bracket is None:
            while x < upper:
                nx = min(x * ratio, upper)
                fx = _sign(params, nx)
                if fx * want > 0:
                    bracket = (x, nx)
                    break
                x = nx
            if bracket is None:
                widen += 1
                if widen > 6:
                    raise BracketError(f"no sign change found for tau_{n} below {upper:.6g}")
                upper *= q ** -0.5
                if upper > MAX_POINT:
                    raise RangeExhaustedError(f"zero tau_{n} lies beyond the supported range")
        root = optimize.brentq(
            lambda t: _sign(params, t), bracket[0], bracket[1], xtol=bracket[0] * 1e-16, rtol=1e-15, maxiter=500
        )
        if polish:
            root = polish_zero(params, root)
        out.append(root)
        prev = root
    return np.array(out)


def _series_mp(params: QParams, w):
    """The D-series at ``w = z sqrt(q)`` in mpmath arithmetic (no envelope needed)."""
    q = mpmath.mpf(params.q)
    pq = mpmath.mpf(params.p) * q
    total = mpmath.mpf(0)
    term = mpmath.mpf(1)  # (-w)^n q^{n(n+1)} / (pq, q; q)_n
    peak = mpmath.mpf(0)
    tiny = mpmath.mpf(10) ** (-mpmath.mp.dps - 5)
    for n in range(params.max_terms):
        total += term
        peak = max(peak, abs(term))
        nxt = term * (-w) * q ** (2 * n + 2) / ((1 - pq * q ** n) * (1 - q ** (n + 1)))
        if abs(nxt) < abs(term) and abs(nxt) < tiny * peak:
            return total
        term = nxt
    raise ArithmeticError("D-series did not converge in extended precision")


def polish_zero(params: QParams, tau: float, dps: int = 60) -> float:
    """Refine a double-precision zero with a secant solve at ``dps`` digits.

    Near the top of the double range the series cancels by about 11 decades,
    so the default leaves ample working precision. Neighbouring zeros differ by
    a factor of at least ``q^{-2}``, so a move beyond 1e-6 relative means the
    solve wandered off and is reported rather than accepted.
    """
    with mpmath.workdps(dps):
        sq = mpmath.sqrt(mpmath.mpf(params.q))
        t0 = mpmath.mpf(tau)
        root = mpmath.findroot(lambda t: _series_mp(params, t * sq), (t0, t0 * (1 + mpmath.mpf(10) ** -13)), solver="secant", verify=False)
        if abs(root / t0 - 1) > 1e-6:
            raise ArithmeticError(f"extended-precision polish moved tau={tau!r} to {float(root)!r}")
        return float(root)


def zero_residual(params: QParams, tau: float) -> float:
    """``|D(tau)|`` relative to the local envelope scale."""
    return abs(dfunction_scaled(params, tau)[0])


# --------------------------------------------------------- Christoffel sums


def christoffel_log_sum(params: QParams, x: float, rtol: float = 1e-15) -> tuple[float, int]:
    """``log sum_k P_k(x)^2`` and the number of terms used.

    ``P_k`` run through the orthonormal recurrence with diagonal ``c_{k+1}``
    and off-diagonal ``sqrt(lam_{k+2})``; the running values are rescaled
    to stay in range. Summation stops past the turning point once a geometric
    extrapolation of the tail falls below ``rtol`` of the sum.
    """
    p, q = params.p, params.q

    def diag(k):  # c_{k+1}
        n = k + 1
        return (1 + q - (p + q) * q ** (n - 1)) * q ** (-2 * n + 0.5)

    def off(k):  # sqrt(lam_{k+2})
        n = k + 1
        return math.sqrt((1 - q ** n) * (1 - p * q ** (n - 1))) * q ** (-2 * n)

    scale = 0.0  # log of the common factor removed from u_prev, u, total
    u_prev, u = 0.0, q ** 0.25
    total = u * u
    last = total
    for k in range(params.max_terms):
        nxt = ((x - diag(k)) * u - (off(k - 1) * u_prev if k else 0.0)) / off(k)
        u_prev, u = u, nxt
        term = u * u
        total += term
        ratio = term / last if last > 0 else math.inf
        last = term
        if diag(k + 1) > x and ratio < 1:
            tail = term * ratio / (1 - ratio)
            if tail < rtol * total:
                return math.log(total) + 2 * scale, k + 2
        big = max(abs(u), abs(u_prev))
        if big > 1e100 or (0 < big < 1e-100):
            f = big
            u, u_prev = u / f, u_prev / f
            total /= f * f
            last /= f * f
            scale += math.log(f)
    raise ArithmeticError(
        f"Christoffel sum at x={x!r} did not settle within max_terms={params.max_terms}"
    )


def christoffel_masses(params: QParams, taus) -> np.ndarray:
    """Log-masses ``log rho_n = -log sum_k P_k(tau_n)^2`` for each point."""
    return np.array([-christoffel_log_sum(params, float(t))[0] for t in taus])


def build_measures(params: QParams, atom_count: int) -> tuple[DiscreteMeasure, DiscreteMeasure]:
    """N-extremal measure ``nu_0`` (with the atom ``c`` at 0) and ``mu^M = nu_0 - c delta_0``."""
    taus = zeros(params, atom_count)
    logm = christoffel_masses(params, taus)
    c = mass_at_zero(params)
    if atom_count >= 2:
        r = math.exp(logm[-1] - logm[-2])
        tail = math.exp(logm[-1]) * r / (1 - r) if r < 1 else math.inf
    else:
        tail = math.inf
    s0 = float(gsw_moments(params, 1)[0])
    body = math.fsum(np.exp(logm))
    err = abs(body + c - s0) / s0
    nu0 = DiscreteMeasure(taus, logm, c, atom_count, tail, err)
    return nu0, nu0.without_zero_atom()
