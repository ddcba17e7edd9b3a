from __future__ import annotations

import math

from scipy import integrate

from src.core import DEFAULT_ENUMERATION_CAP, DomainError, optimal_integral_makespan, realized_makespan

from .instances import k14_tight_instance
from .reports import ExperimentReport


def k14_fast_prob(n: int, M: float) -> float:
    """(M/n) * (1 - (1 - 1/M)^n), the chance a task lands on its unique fast machine."""
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    if M < 1:
        raise DomainError(f"M must be at least 1, got {M}")
    if M == 1:
        return 1.0 / n
    return (M / n) * -math.expm1(n * math.log1p(-1.0 / M))


def k14_fast_prob_quadrature(n: int, M: float) -> float:
    """Integral over y in [0, 1] of (1 - y/M)^(n-1)."""
    if n < 1 or M < 1:
        raise DomainError(f"need n >= 1 and M >= 1, got n={n}, M={M}")
    value, _ = integrate.quad(lambda y: (1.0 - y / M) ** (n - 1), 0.0, 1.0, epsabs=1e-14, epsrel=1e-13)
    return float(value)


def k14_makespan_lower(n: int, *, enumeration_cap: int = DEFAULT_ENUMERATION_CAP) -> ExperimentReport:
    """Evaluate (1 - p^n) * M at M = n^3 against the published bound n(n+1)/(2 + 3/n).

    The published inequality does not hold at small n, so that comparison is
    flagged rather than failed; the comparison with n(n-1)/2 is the asymptotic one.
    """
    if n < 2:
        raise DomainError(f"n must be at least 2, got {n}")
    M = float(n**3)
    p = k14_fast_prob(n, M)
    lower = -math.expm1(n * math.log(p)) * M
    claimed = n * (n + 1) / (2.0 + 3.0 / n)
    asymptote = n * (n - 1) / 2.0

    report = ExperimentReport(name="k14", inputs={"n": n, "M": M})
    report.measure("fast_probability", p, "closed-form")
    report.measure("fast_probability_quadrature", k14_fast_prob_quadrature(n, M), "quadrature")
    report.measure("makespan_lower", lower, "closed-form")
    report.measure("asymptotic_ratio", lower / asymptote, "closed-form")

    instance = k14_tight_instance(n, M)
    if n**n <= enumeration_cap:
        optimum, _ = optimal_integral_makespan(instance, cap=enumeration_cap)
        report.measure("optimal_makespan", optimum, "enumeration")
    else:
        optimum = realized_makespan(tuple(range(n)), instance, instance)
        report.measure("optimal_makespan", optimum, "closed-form")
    report.claim("optimal_makespan", 1.0, "giving every task to its fast machine finishes at time 1")
    report.judge("optimal_makespan", abs(optimum - 1.0) <= 1e-12)
    report.claim(
        "makespan_lower",
        claimed,
        "expected makespan of the independent truthful mechanism on the tight instance is at least n(n+1)/(2+3/n) for every n >= 2",
    )
    report.claim("asymptotic_ratio", 1.0, "the lower bound grows like n(n-1)/2, matching the n(n+1)/2 upper bound asymptotically")
    report.judge("fast_probability_quadrature", abs(p - report.measured["fast_probability_quadrature"].value) <= 1e-10)
    report.judge("makespan_lower", lower >= claimed, flag_only=True)
    report.judge("asymptotic_ratio", 0.95 <= lower / asymptote <= 1.05, flag_only=True)
    if lower < claimed:
        report.notes.append(f"closed form {lower:.6g} is below the published bound {claimed:.6g} at n={n}")
    return report


def k14_quadrature_sweep(max_n: int = 50) -> float:
    """Largest gap between closed form and quadrature over n <= max_n and M in {2, 10, n^3}."""
    worst = 0.0
    for n in range(1, max_n + 1):
        for M in (2.0, 10.0, float(n**3)):
            worst = max(worst, abs(k14_fast_prob(n, M) - k14_fast_prob_quadrature(n, M)))
    return worst
