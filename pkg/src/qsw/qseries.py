"""q-series primitives: q-shifted factorials, Gaussian binomials, Delta_n and psi.

Products are carried as :class:`LogReal` (sign + log-magnitude) so that the
moments and Hankel determinants, which grow like ``q**(-(n+1)**2/2)``, never
overflow before they reach an API boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

INF = math.inf

# log of the largest finite double
_LOG_MAX = math.log(2.0) * 1024


@dataclass(frozen=True)
class QParams:
    """Parameter pair (p, q) plus truncation controls for infinite series."""

    p: float
    q: float
    eps: float = 1e-15
    max_terms: int = 10_000

    def __post_init__(self):
        if not (0.0 <= self.p < 1.0):
            raise ValueError(f"p must lie in [0, 1), got {self.p!r}")
        if not (0.0 < self.q < 1.0):
            raise ValueError(f"q must lie in (0, 1), got {self.q!r}")
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps!r}")
        if self.max_terms < 1:
            raise ValueError(f"max_terms must be >= 1, got {self.max_terms!r}")

    def with_p(self, p: float) -> "QParams":
        return QParams(p, self.q, self.eps, self.max_terms)


@dataclass(frozen=True)
class LogReal:
    """A real number stored as ``sign * exp(logmag)``.

    ``sign == 0`` encodes an exact zero; ``logmag`` is then meaningless and
    kept at ``-inf``.
    """

    sign: int
    logmag: float

    @classmethod
    def from_float(cls, x: float) -> "LogReal":
        if x == 0:
            return ZERO
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    @classmethod
    def from_log(cls, logmag: float, sign: int = 1) -> "LogReal":
        return cls(sign, logmag) if sign else ZERO

    def __mul__(self, other):
        if not isinstance(other, LogReal):
            other = LogReal.from_float(float(other))
        if self.sign == 0 or other.sign == 0:
            return ZERO
        return LogReal(self.sign * other.sign, self.logmag + other.logmag)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, LogReal):
            other = LogReal.from_float(float(other))
        if other.sign == 0:
            raise ZeroDivisionError("division by LogReal zero")
        if self.sign == 0:
            return ZERO
        return LogReal(self.sign * other.sign, self.logmag - other.logmag)

    def __pow__(self, k: float):
        if self.sign == 0:
            return ZERO if k > 0 else ONE
        if self.sign < 0:
            if float(k).is_integer():
                return LogReal(-1 if int(k) % 2 else 1, self.logmag * k)
            raise ValueError("fractional power of a negative LogReal")
        return LogReal(1, self.logmag * k)

    def __neg__(self):
        return LogReal(-self.sign, self.logmag)

    def sqrt(self) -> "LogReal":
        if self.sign < 0:
            raise ValueError("square root of a negative LogReal")
        return self ** 0.5

    @property
    def overflows(self) -> bool:
        return self.sign != 0 and self.logmag >= _LOG_MAX

    @property
    def log10(self) -> float:
        return self.logmag / math.log(10.0) if self.sign else -INF

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        if self.overflows:
            return self.sign * INF
        return self.sign * math.exp(self.logmag)

    def to_float(self, strict: bool = False) -> float:
        """Convert to ``float``; with ``strict`` an out-of-range value raises."""
        if strict and self.overflows:
            raise OverflowError(f"LogReal with log-magnitude {self.logmag:.6g} exceeds double range")
        return float(self)

    def rel_diff(self, other: "LogReal") -> float:
        """Relative difference ``|self/other - 1|`` computed in log space."""
        if self.sign != other.sign:
            return INF if (self.sign or other.sign) else 0.0
        if self.sign == 0:
            return 0.0
        return abs(math.expm1(self.logmag - other.logmag))


ZERO = LogReal(0, -INF)
ONE = LogReal(1, 0.0)


def prod_log(factors: Iterable[float]) -> LogReal:
    """Product of real factors, accumulated in log space with compensated summation."""
    sign = 1
    logs = []
    for f in factors:
        if f == 0:
            return ZERO
        if f < 0:
            sign = -sign
        logs.append(math.log(abs(f)))
    return LogReal(sign, math.fsum(logs))


def _factor_logs(z: float, q: float, n: float, eps: float, max_terms: int):
    """Yield ``log|1 - z q^k|`` terms and track sign; None signals an exact zero."""
    sign = 1
    logs = []
    k = 0
    qk = 1.0
    tol = eps * (1.0 - q)
    while k < n:
        t = z * qk
        if n == INF and abs(t) < tol:
            break
        if k >= max_terms:
            if n == INF:
                break
            raise ValueError(f"finite product length {n} exceeds max_terms={max_terms}")
        f = 1.0 - t
        if f == 0.0:
            return 0, None
        if f < 0:
            sign = -sign
        # log1p keeps full precision when |t| is small
        logs.append(math.log1p(-t) if abs(t) < 0.5 else math.log(abs(f)))
        k += 1
        qk *= q
    return sign, logs


def qpochhammer(z: float, params: QParams, n: float = INF) -> LogReal:
    """q-shifted factorial ``(z; q)_n = prod_{k=1}^n (1 - z q^{k-1})`` as a LogReal.

    ``n`` may be ``math.inf``; the infinite product stops once ``|z q^k|``
    drops below ``eps * (1 - q)`` so that the neglected tail is below ``eps``.
    """
    if n != INF and (n < 0 or int(n) != n):
        raise ValueError(f"n must be a nonnegative integer or inf, got {n!r}")
    sign, logs = _factor_logs(z, params.q, n, params.eps, params.max_terms)
    if logs is None:
        return ZERO
    return LogReal(sign, math.fsum(logs))


def qpoch(z: float, q: float, n: float = INF, eps: float = 1e-17) -> float:
    """Plain-float ``(z; q)_n`` for internal loops where the value stays in range."""
    r = 1.0
    qk = 1.0
    k = 0
    while k < n:
        t = z * qk
        if n == INF and abs(t) < eps:
            break
        r *= 1.0 - t
        qk *= q
        k += 1
    return r


def qpoch_table(z: float, q: float, n: int) -> list[float]:
    """``[(z;q)_0, (z;q)_1, ..., (z;q)_n]`` by cumulative multiplication."""
    out = [1.0]
    qk = 1.0
    for _ in range(n):
        out.append(out[-1] * (1.0 - z * qk))
        qk *= q
    return out


def qbinomial(n: int, k: int, q: float) -> float:
    """Gaussian binomial coefficient ``[n choose k]_q``."""
    if not (0 <= k <= n):
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    k = min(k, n - k)
    r = 1.0
    for j in range(1, k + 1):
        r *= (1.0 - q ** (n - k + j)) / (1.0 - q ** j)
    return r


def delta(params: QParams, n: int) -> float:
    r"""``Delta_n = (p q^n; q)_inf - (q^n; q)_inf``.

    Evaluated without subtraction through the telescoped form

    .. math::

        \Delta_n = (1-p) q^n \sum_{j \ge 0} q^j (q^n;q)_j (p q^{n+j+1}; q)_\infty ,

    every term of which is nonnegative, so the leading ``(1-p)/(1-q) q^n``
    behaviour survives for large ``n``.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    p, q, eps = params.p, params.q, params.eps
    a = p * q ** (n + 1)
    tail = qpoch(a, q, eps=eps * 1e-3)  # (p q^{n+1}; q)_inf
    b = q ** n
    terms = []
    head = 1.0  # (q^n; q)_j
    qj = 1.0
    for j in range(params.max_terms):
        term = qj * head * tail
        terms.append(term)
        if term == 0.0 or term < eps * 1e-2 * terms[0]:
            break
        head *= 1.0 - b * qj
        # (p q^{n+j+2}; q)_inf = (p q^{n+j+1}; q)_inf / (1 - p q^{n+j+1})
        tail /= 1.0 - a * qj
        qj *= q
    return (1.0 - p) * b * math.fsum(terms)


def delta_naive(params: QParams, n: int) -> float:
    """Direct difference of the two infinite products (cancels for large n)."""
    return qpoch(params.p * params.q ** n, params.q, eps=params.eps) - qpoch(
        params.q ** n, params.q, eps=params.eps
    )


def psi(q: float, eps: float = 1e-17) -> float:
    """Theta-type sum ``psi(q) = sum_{n>=0} q^{n(n+1)/2}``."""
    if not (0.0 < q < 1.0):
        raise ValueError(f"q must lie in (0, 1), got {q!r}")
    terms = []
    n = 0
    while True:
        t = q ** (n * (n + 1) / 2)
        terms.append(t)
        if t < eps:
            break
        n += 1
    return math.fsum(terms)


def psi_product(q: float, eps: float = 1e-17) -> float:
    """Product form ``(q^2; q^2)_inf / (q; q^2)_inf`` of :func:`psi`."""
    return qpoch(q * q, q * q, eps=eps) / qpoch(q, q * q, eps=eps)
