"""Chain sequences, parameter sequences, shell recurrences and continued fractions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gsw import RecurrenceCoeffs
from .qseries import QParams, delta, qpoch

KINDS = ("minimal", "maximal", "gsw-intermediate", "custom")


@dataclass(frozen=True)
class ChainSequence:
    """``beta[i]`` holds ``beta_{i+1}``."""

    beta: np.ndarray
    origin: str = "custom"

    def __post_init__(self):
        b = np.array(self.beta, dtype=float)
        if np.any((b < 0) | (b >= 1)):
            raise ValueError("chain sequence entries must lie in [0, 1)")
        b.setflags(write=False)
        object.__setattr__(self, "beta", b)

    def __len__(self):
        return len(self.beta)

    def tail(self, k: int) -> "ChainSequence":
        """The shifted sequence ``(beta_{k+1}, beta_{k+2}, ...)``."""
        return ChainSequence(self.beta[k:], self.origin)


@dataclass(frozen=True)
class ParameterSequence:
    """``h[i]`` holds ``h_i`` starting at ``h_0``."""

    h: np.ndarray
    kind: str = "custom"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown parameter-sequence kind {self.kind!r}")
        h = np.array(self.h, dtype=float)
        if h.size and (h[0] < 0 or np.any((h[1:] <= 0) | (h[1:] >= 1))):
            raise ValueError("need h_0 >= 0 and 0 < h_n < 1 for n >= 1")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    def chain(self) -> np.ndarray:
        """``beta_n = h_n (1 - h_{n-1})`` for ``n = 1..len-1``."""
        return self.h[1:] * (1 - self.h[:-1])


def _den(params: QParams, n: int) -> float:
    # 1 + q - (1 + p) q^n
    return 1 + params.q - (1 + params.p) * params.q ** n


def gsw_chain(params: QParams, count: int) -> ChainSequence:
    """``beta_1..beta_count`` for the kernel polynomials of ``S_n``."""
    p, q = params.p, params.q
    beta = [
        q * (1 - q ** n) * (1 - p * q ** n) / (_den(params, n) * _den(params, n + 1))
        for n in range(1, count + 1)
    ]
    return ChainSequence(beta, "gsw")


def chain_from_kernel(kernel: RecurrenceCoeffs) -> ChainSequence:
    """``beta_n = nu_{n+1} / (d_n d_{n+1})`` from a kernel recurrence."""
    d, nu = kernel.c, kernel.lam
    m = min(len(d) - 1, len(nu))
    return ChainSequence(nu[:m] / (d[:m] * d[1 : m + 1]), "custom")


def maximal_parameter(params: QParams, n: int) -> float:
    """``M_n = q / (1 + q - (1+p) q^{n+1}) * Delta_n / Delta_{n+1}``."""
    return params.q / _den(params, n + 1) * delta(params, n) / delta(params, n + 1)


def parameter_sequences(params: QParams, count: int) -> tuple[ParameterSequence, ParameterSequence, ParameterSequence]:
    """Minimal, maximal and gsw-intermediate parameter sequences ``h_0..h_{count-1}``.

    All three come from closed forms; the forward recursion
    ``h_n = beta_n / (1 - h_{n-1})`` started at ``M_0`` is unstable and drifts
    to the minimal sequence.
    """
    p, q = params.p, params.q
    minimal = [q * (1 - q ** n) / _den(params, n + 1) for n in range(count)]
    maximal = [maximal_parameter(params, n) for n in range(count)]
    between = [q * (1 - p * q ** n) / _den(params, n + 1) for n in range(count)]
    return (
        ParameterSequence(minimal, "minimal"),
        ParameterSequence(maximal, "maximal"),
        ParameterSequence(between, "gsw-intermediate"),
    )


def shell_recurrence(kernel: RecurrenceCoeffs, h: ParameterSequence, count: int) -> RecurrenceCoeffs:
    """Shell-polynomial recurrence built from kernel ``d_n`` and parameters ``h_n``.

    ``c_1 = h_0 d_1``, ``c_{n+1} = (1 - h_{n-1}) d_n + h_n d_{n+1}`` and
    ``lam_{n+1} = (1 - h_{n-1}) h_{n-1} d_n^2``.
    Returns ``c_1..c_count`` and ``lam_2..lam_count``.
    """
    hh = h.h
    if hh[0] <= 0:
        raise ValueError("shell polynomials need h_0 > 0; h_0 = 0 (minimal sequence) has no shell family")
    if len(kernel.c) < count or len(hh) < count:
        raise ValueError(f"need {count} kernel coefficients and parameters")
    d = kernel.c  # d[i] = d_{i+1}
    c = [hh[0] * d[0]]
    lam = []
    for n in range(1, count):
        c.append((1 - hh[n - 1]) * d[n - 1] + hh[n] * d[n])
        lam.append((1 - hh[n - 1]) * hh[n - 1] * d[n - 1] ** 2)
    return RecurrenceCoeffs(c, lam, f"shell({h.kind})")


def continued_fraction(beta: ChainSequence, depth: int) -> float:
    """``1 - beta_1/(1 - beta_2/(1 - ...))`` truncated after ``depth`` levels.

    Evaluated tail-first with the innermost value set to 1.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if depth > len(beta):
        raise ValueError(f"depth {depth} exceeds the {len(beta)} available chain entries")
    t = 1.0
    for j in range(depth - 1, -1, -1):
        if t == 0.0:
            raise ZeroDivisionError(f"zero denominator at level {j + 2} of the continued fraction")
        t = 1.0 - beta.beta[j] / t
    return t


def continued_fraction_forward(beta: ChainSequence, depth: int) -> float:
    """Same truncated value from forward three-term convergent recurrences."""
    # 1 - b1/(1 - b2/(1 - ...)): numerators a_j = -beta_j, partial denominators 1
    A_prev, A = 1.0, 1.0
    B_prev, B = 0.0, 1.0
    for j in range(depth):
        a = -beta.beta[j]
        A_prev, A = A, A + a * A_prev
        B_prev, B = B, B + a * B_prev
    return A / B


def cf_closed_form(params: QParams, k: int = 0) -> float:
    """Value ``M_k`` of the tail continued fraction starting at ``beta_{k+1}``."""
    return maximal_parameter(params, k)


def cf_closed_form_alt(params: QParams) -> float:
    """``q (1-p) (pq^2;q)_inf / ((pq;q)_inf - (q;q)_inf)``, the k = 0 value."""
    p, q = params.p, params.q
    return q * (1 - p) * qpoch(p * q * q, q) / delta(params, 1)


def lg_series(params: QParams, terms: int) -> tuple[float, float]:
    """``(1 + L, 1 + G)`` by accumulating products of ``m_k/(1-m_k)`` and ``h_k/(1-h_k)``."""
    if terms < 1:
        raise ValueError("terms must be >= 1")
    minimal, _, between = parameter_sequences(params, terms + 1)
    m, h = minimal.h, between.h
    L = [1.0]
    G = [1.0]
    for n in range(1, terms + 1):
        L.append(L[-1] * m[n] / (1 - m[n]))
        G.append(G[-1] * h[n] / (1 - h[n]))
    return math.fsum(L), math.fsum(G)


def lg_series_closed(params: QParams, terms: int) -> tuple[float, float]:
    """``sum (q;q)_n q^n / (pq^2;q)_n`` and ``sum (pq;q)_n q^n / (q^2;q)_n``."""
    p, q = params.p, params.q
    L = [1.0]
    G = [1.0]
    for n in range(1, terms + 1):
        L.append(L[-1] * q * (1 - q ** n) / (1 - p * q ** (n + 1)))
        G.append(G[-1] * q * (1 - p * q ** n) / (1 - q ** (n + 1)))
    return math.fsum(L), math.fsum(G)


def maximal_divergence_witness(params: QParams, terms: int) -> np.ndarray:
    """Partial sums of ``sum_n M_1...M_n / ((1-M_1)...(1-M_n))``.

    Each term is also formed from the telescoped expression
    ``Delta_1 Delta_2 / (Delta_{n+1} Delta_{n+2}) q^n / (q^2, pq^2; q)_n``
    and the two must agree; the partial sums grow without bound.
    """
    terms_direct, terms_reduced = divergence_terms(params, terms)
    scale = np.maximum(np.abs(terms_reduced), 1e-300)
    worst = float(np.max(np.abs(terms_direct - terms_reduced) / scale)) if terms else 0.0
    if worst > 1e-10:
        raise ArithmeticError(f"divergence-series term formulas disagree (relative {worst:.3g})")
    return np.cumsum(terms_direct)


def divergence_terms(params: QParams, terms: int) -> tuple[np.ndarray, np.ndarray]:
    p, q = params.p, params.q
    M = [maximal_parameter(params, n) for n in range(terms + 1)]
    direct = []
    acc = 1.0
    for n in range(1, terms + 1):
        acc *= M[n] / (1 - M[n])
        direct.append(acc)
    D = {n: delta(params, n) for n in range(1, terms + 3)}
    reduced = []
    poch = 1.0  # (q^2, pq^2; q)_n
    for n in range(1, terms + 1):
        poch *= (1 - q ** (n + 1)) * (1 - p * q ** (n + 1))
        reduced.append(D[1] * D[2] / (D[n + 1] * D[n + 2]) * q ** n / poch)
    return np.array(direct), np.array(reduced)


def divergence_term_asymptote(params: QParams, n: int) -> float:
    """Large-``n`` form of the ``n``-th divergence term, from ``Delta_n ~ (1-p)/(1-q) q^n``."""
    p, q = params.p, params.q
    inf_poch = qpoch(q * q, q) * qpoch(p * q * q, q)
    return ((1 - q) / (1 - p)) ** 2 * delta(params, 1) * delta(params, 2) * q ** (-n - 3) / inf_poch
