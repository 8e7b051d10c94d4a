"""Extended-precision evaluation helpers for signed closed-form sums.

The outage/PDF sums combine terms c * exp(d) whose coefficients span
many orders of magnitude with alternating signs; the final value can be
eight or more decades below the largest term.  Double precision loses at
two places: the log-domain constants carry absolute error ~|log|*eps,
which turns into relative term error well above 1e-14, and the final
accumulation cancels.  Both are fixed by carrying 80-bit long doubles
end to end: exact integer coefficient ratios enter through high-
precision logs, the dynamic part is computed in long double, and the
signed terms are summed exactly (fsum of the double parts plus the
pairwise-summed conversion residue).
"""

from __future__ import annotations

import functools
import math

import mpmath
import numpy as np

LD = np.longdouble


@functools.lru_cache(maxsize=None)
def log_int_ld(n: int) -> np.longdouble:
    """log(n) of an exact positive integer, good to long-double precision."""
    with mpmath.workdps(30):
        return LD(mpmath.nstr(mpmath.log(mpmath.mpf(n)), 27))


@functools.lru_cache(maxsize=None)
def log_float_ld(x: float) -> np.longdouble:
    """log(x) of a double treated as exact, in long double."""
    return np.log(LD(x))


def sum_signed(terms: np.ndarray) -> float:
    """Sum long-double terms without losing the cancelled digits.

    fsum adds the rounded-to-double parts exactly; the conversion
    residues are tiny and near-uniform in sign, so a pairwise sum of
    them in long double is more than enough.
    """
    t64 = terms.astype(np.float64)
    resid = terms - t64.astype(LD)
    return math.fsum(t64.tolist()) + float(np.sum(resid))
