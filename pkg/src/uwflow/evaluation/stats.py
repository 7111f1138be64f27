"""Exact statistics kernel: Wilson score interval, McNemar, Fisher exact.

McNemar and Fisher run on exact rational arithmetic (math.comb plus
Fraction), so two-sided tail sums carry no floating-point ordering
ambiguity; the float conversion happens once at the end.
"""

from __future__ import annotations

import math
from fractions import Fraction


class DomainError(ValueError):
    """Inputs outside the statistic's domain."""


def wilson_interval(successes: int, n: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion.

    center = (p + z^2/2n) / (1 + z^2/n)
    halfwidth = z * sqrt(p(1-p)/n + z^2/4n^2) / (1 + z^2/n)

    Bounds are clamped to [0, 1].
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    if not 0 <= successes <= n:
        raise DomainError(f"successes {successes} outside [0, {n}]")
    if z <= 0:
        raise DomainError("z must be positive")
    p = successes / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (p + z2 / (2.0 * n)) / denom
    halfwidth = z * math.sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom
    low = max(0.0, center - halfwidth)
    high = min(1.0, center + halfwidth)
    # At the boundary proportions the closed form collapses exactly; snap
    # instead of carrying float residue above 0 or below 1.
    if successes == 0:
        low = 0.0
    if successes == n:
        high = 1.0
    return low, high


def mcnemar_test(b: int, c: int, method: str = "exact") -> float:
    """Two-sided McNemar test on discordant-pair counts.

    ``exact``: p = min(1, 2 * P(X >= max(b, c))) for X ~ Binomial(b+c, 1/2).
    ``chi2_cc``: continuity-corrected chi-square variant for large counts.
    b + c = 0 returns p = 1 by convention (no discordant information).
    """
    if b < 0 or c < 0:
        raise DomainError("counts must be non-negative")
    n = b + c
    if n == 0:
        return 1.0
    if method == "exact":
        k = max(b, c)
        tail = sum(Fraction(math.comb(n, i)) for i in range(k, n + 1))
        p = 2 * tail / Fraction(2) ** n
        return float(min(Fraction(1), p))
    if method == "chi2_cc":
        stat = (abs(b - c) - 1) ** 2 / n if abs(b - c) > 1 else 0.0
        # Chi-square survival with 1 dof.
        return math.erfc(math.sqrt(stat / 2.0))
    raise DomainError(f"unknown method {method!r}")


def fisher_exact(table: list[list[int]] | tuple[tuple[int, int], tuple[int, int]]) -> float:
    """Two-sided Fisher exact test by probability-mass ordering.

    p = sum of hypergeometric probabilities, over all tables with the
    observed margins, that are no more probable than the observed table.
    """
    try:
        (a, b), (c, d) = table
    except (ValueError, TypeError):
        raise DomainError("table must be 2x2") from None
    for v in (a, b, c, d):
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise DomainError("counts must be non-negative integers")
    r1, r2 = a + b, c + d
    c1 = a + c
    n = r1 + r2
    if n == 0:
        return 1.0
    denom = math.comb(n, c1)

    def pmf(x: int) -> Fraction:
        return Fraction(math.comb(r1, x) * math.comb(r2, c1 - x), denom)

    lo = max(0, c1 - r2)
    hi = min(r1, c1)
    p_obs = pmf(a)
    total = sum(pmf(x) for x in range(lo, hi + 1) if pmf(x) <= p_obs)
    return float(min(Fraction(1), total))
