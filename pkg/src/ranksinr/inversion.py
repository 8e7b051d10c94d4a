"""Probability clamping and inversion of monotone outage curves."""

from __future__ import annotations

from typing import Callable

from .errors import NumericInstabilityError

# round-off slack accepted on probabilities before declaring instability;
# deep-tail sums over thousands of alternating terms wobble a few 1e-12,
# genuine coefficient blowup overshoots by 1e-3 or more
PROB_SLACK = 1e-9


def clamp_probability(p: float, context: str = "probability") -> float:
    """Clamp round-off excursions; refuse anything materially outside [0,1]."""
    if not (-PROB_SLACK <= p <= 1.0 + PROB_SLACK):
        raise NumericInstabilityError(
            f"{context} evaluated to {p!r}, outside [0, 1]; "
            "the coefficient expansion has lost too much precision"
        )
    return min(max(p, 0.0), 1.0)


def threshold_at_outage(
    outage_fn: Callable[[float], float],
    p_target: float,
    rel_tol: float = 1e-10,
) -> float:
    """Largest-threshold inverse of a nondecreasing outage curve.

    Finds gamma0 with outage_fn(gamma0) = p_target by bracket growth and
    plain bisection; the curve is a CDF, hence monotone with full
    support, so a bracket always exists within floating range.
    """
    if not (0.0 < p_target < 1.0):
        raise ValueError(f"target outage must lie in (0, 1), got {p_target}")
    lo = hi = 1.0
    f_hi = outage_fn(hi)
    while f_hi < p_target:
        hi *= 4.0
        if hi > 1e150:
            raise NumericInstabilityError(
                f"no threshold below 1e150 reaches outage {p_target}"
            )
        f_hi = outage_fn(hi)
    f_lo = outage_fn(lo)
    while f_lo > p_target:
        lo /= 4.0
        if lo < 1e-150:
            raise NumericInstabilityError(
                f"no threshold above 1e-150 stays under outage {p_target}"
            )
        f_lo = outage_fn(lo)
    while hi - lo > rel_tol * lo:
        mid = 0.5 * (lo + hi)
        if outage_fn(mid) < p_target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
