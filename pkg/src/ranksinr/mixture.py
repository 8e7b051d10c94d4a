"""Hyper-exponential model of the aggregate interference power.

The normalized interference Y is a sum of independent exponential terms
with scales rho taken from the scenario's rate set.  Collecting equal
scales into G groups (scale rho_i, multiplicity beta_i), the density of
the sum is a signed mixture of gamma densities

    p_Y(y) = sum_{i=1..G} sum_{j=1..beta_i} Xi_ij y^{j-1} e^{-y/rho_i}
             / (Gamma(j) rho_i^j),

with partial-fraction coefficients

    Xi_ij = (-1)^{beta_i+j} sum_{Omega(i,j)} prod_{k != i}
            C(beta_k+q_k-1, q_k) (rho_k/rho_i)^{q_k}
            / (1 - rho_k/rho_i)^{beta_k+q_k},

where Omega(i,j) runs over nonnegative integer tuples (q_1..q_G) with
q_i = 0 and sum q_k = beta_i - j.  G = 1 degenerates to a plain gamma
density (Xi_{1,beta_1} = 1).

The (1 - rho_k/rho_i) denominators make the expansion explosive for
near-equal group rates; near-ties must be merged before coefficients are
computed, and the coefficients themselves are evaluated in 40-digit
arithmetic because the alternating signs cancel heavily for large
multiplicities.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy import special

from .errors import DegenerateRatesError, EmptyMixtureError

DEFAULT_GROUP_TOL = 1e-9
CONDITIONING_WARN = 1e-3


@dataclass(frozen=True, eq=False)
class MixtureSpec:
    """Grouped interference rates plus their mixture coefficients.

    `rates` are strictly decreasing group scales; `xi` maps 1-based
    (group, order) pairs to coefficients.  `conditioning` is the minimum
    over group pairs of |1 - rho_k/rho_i| (inf when G = 1); small values
    mean the partial-fraction expansion is close to degenerate.
    """

    rates: tuple[float, ...]
    multiplicities: tuple[int, ...]
    xi: dict[tuple[int, int], float]
    conditioning: float
    _rho_flat: np.ndarray = field(init=False, repr=False)
    _j_flat: np.ndarray = field(init=False, repr=False)
    _xi_flat: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        items = sorted(self.xi.items())
        object.__setattr__(
            self,
            "_rho_flat",
            np.array([self.rates[i - 1] for (i, _), _ in items], dtype=np.float64),
        )
        object.__setattr__(
            self, "_j_flat", np.array([j for (_, j), _ in items], dtype=np.float64)
        )
        object.__setattr__(
            self, "_xi_flat", np.array([v for _, v in items], dtype=np.float64)
        )

    @property
    def n_groups(self) -> int:
        return len(self.rates)

    def xi_sum(self) -> float:
        """Should be 1; drift measures loss of precision in Xi."""
        return float(np.sum(self._xi_flat))

    def terms(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(rho_i, j, Xi_ij) per mixture term, sorted by (i, j)."""
        return self._rho_flat.copy(), self._j_flat.copy(), self._xi_flat.copy()


def group_rates(
    rates, rel_tol: float = DEFAULT_GROUP_TOL
) -> tuple[tuple[float, ...], tuple[int, ...]]:
    """Merge near-equal scales into groups.

    Returns (group scales descending, multiplicities).  A scale joins
    the current group when its relative gap to the group's running
    power-weighted mean is at most rel_tol; the merged scale is the
    power-weighted mean sum(rho^2)/sum(rho).
    """
    rates = [float(r) for r in rates]
    if not rates:
        raise EmptyMixtureError(
            "no interference terms; use the noise-only evaluation path"
        )
    if any(not (r > 0 and math.isfinite(r)) for r in rates):
        raise ValueError(f"rates must be positive and finite, got {rates}")
    if not (0 < rel_tol < 0.1):
        raise ValueError(f"rel_tol must lie in (0, 0.1), got {rel_tol}")

    ordered = sorted(rates, reverse=True)
    group_scales: list[float] = []
    group_counts: list[int] = []
    sum_r = sum_r2 = 0.0
    count = 0
    for r in ordered:
        if count and (sum_r2 / sum_r - r) / (sum_r2 / sum_r) > rel_tol:
            group_scales.append(sum_r2 / sum_r)
            group_counts.append(count)
            sum_r = sum_r2 = 0.0
            count = 0
        sum_r += r
        sum_r2 += r * r
        count += 1
    group_scales.append(sum_r2 / sum_r)
    group_counts.append(count)
    return tuple(group_scales), tuple(group_counts)


def enumerate_tuples(
    i: int, j: int, multiplicities: tuple[int, ...]
) -> list[tuple[int, ...]]:
    """All (q_1..q_G) with q_i = 0 and sum q = beta_i - j, 1-based i."""
    g = len(multiplicities)
    if not (1 <= i <= g):
        raise ValueError(f"group index {i} out of range 1..{g}")
    if not (1 <= j <= multiplicities[i - 1]):
        raise ValueError(f"order {j} out of range 1..{multiplicities[i - 1]}")
    budget = multiplicities[i - 1] - j
    others = [k for k in range(g) if k != i - 1]

    out: list[tuple[int, ...]] = []

    def rec(pos: int, remaining: int, acc: list[int]) -> None:
        if pos == len(others):
            if remaining == 0:
                tup = [0] * g
                for k, q in zip(others, acc):
                    tup[k] = q
                out.append(tuple(tup))
            return
        if pos == len(others) - 1:
            rec(pos + 1, 0, acc + [remaining])
            return
        for q in range(remaining + 1):
            rec(pos + 1, remaining - q, acc + [q])

    if others:
        rec(0, budget, [])
    elif budget == 0:
        out.append((0,) * g)
    # G = 1 with j < beta_1 has no admissible tuple: coefficient is 0
    return out


def xi_coefficients(
    rates: tuple[float, ...], multiplicities: tuple[int, ...]
) -> MixtureSpec:
    """Fill the partial-fraction coefficients for grouped rates."""
    g = len(rates)
    if g == 0:
        raise EmptyMixtureError("no groups")
    if len(multiplicities) != g:
        raise ValueError("rates and multiplicities must have equal length")

    conditioning = math.inf
    for a, b in itertools.combinations(range(g), 2):
        gap = abs(1.0 - rates[b] / rates[a])
        conditioning = min(conditioning, gap)
    if conditioning == 0.0:
        raise DegenerateRatesError(
            "duplicate group rates; regroup with a larger tolerance"
        )
    if conditioning < CONDITIONING_WARN:
        warnings.warn(
            f"mixture conditioning {conditioning:.2e} below {CONDITIONING_WARN:.0e}; "
            "Xi coefficients may be inaccurate, consider coarser grouping",
            RuntimeWarning,
            stacklevel=2,
        )

    xi: dict[tuple[int, int], float] = {}
    if g == 1:
        beta = multiplicities[0]
        for j in range(1, beta + 1):
            xi[(1, j)] = 1.0 if j == beta else 0.0
    else:
        with mpmath.workdps(40):
            ratios = [[mpmath.mpf(rk) / mpmath.mpf(ri) for rk in rates] for ri in rates]
            for i in range(1, g + 1):
                beta_i = multiplicities[i - 1]
                for j in range(1, beta_i + 1):
                    total = mpmath.mpf(0)
                    for tup in enumerate_tuples(i, j, multiplicities):
                        prod = mpmath.mpf(1)
                        for k in range(g):
                            if k == i - 1:
                                continue
                            beta_k, q_k = multiplicities[k], tup[k]
                            r = ratios[i - 1][k]
                            prod *= (
                                math.comb(beta_k + q_k - 1, q_k)
                                * r**q_k
                                / (1 - r) ** (beta_k + q_k)
                            )
                        total += prod
                    sign = -1 if (beta_i + j) % 2 else 1
                    xi[(i, j)] = float(sign * total)

    return MixtureSpec(
        rates=tuple(float(r) for r in rates),
        multiplicities=tuple(multiplicities),
        xi=xi,
        conditioning=conditioning,
    )


def build_mixture(rates, rel_tol: float = DEFAULT_GROUP_TOL) -> MixtureSpec:
    """Group raw scales and compute coefficients in one step."""
    scales, counts = group_rates(rates, rel_tol)
    spec = xi_coefficients(scales, counts)
    drift = abs(spec.xi_sum() - 1.0)
    if drift > 1e-6:
        warnings.warn(
            f"Xi coefficients sum to 1 with drift {drift:.2e} after rounding "
            "to double; downstream results are unreliable for this rate set",
            RuntimeWarning,
            stacklevel=2,
        )
    return spec


def pdf_y(y, spec: MixtureSpec):
    """Density of the interference sum at y (scalar or array)."""
    arr = np.asarray(y, dtype=np.float64)
    if np.any(arr < 0):
        raise ValueError("pdf_y requires y >= 0")
    flat = np.atleast_1d(arr)
    rho, jj, xi = spec._rho_flat, spec._j_flat, spec._xi_flat
    out = np.zeros_like(flat)
    pos = flat > 0
    if np.any(pos):
        yp = flat[pos, None]
        with np.errstate(divide="ignore"):
            log_abs_xi = np.log(np.abs(xi))
        logterm = (
            (jj - 1.0) * np.log(yp)
            - yp / rho
            - special.gammaln(jj)
            - jj * np.log(rho)
        )
        out[pos] = np.sum(np.sign(xi) * np.exp(log_abs_xi + logterm), axis=1)
    if np.any(~pos):
        first = jj == 1.0
        out[~pos] = float(np.sum(xi[first] / rho[first]))
    return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)


def cdf_y(y, spec: MixtureSpec):
    """CDF of the interference sum; mixture of regularized gammas."""
    arr = np.asarray(y, dtype=np.float64)
    if np.any(arr < 0):
        raise ValueError("cdf_y requires y >= 0")
    flat = np.atleast_1d(arr)[:, None]
    rho, jj, xi = spec._rho_flat, spec._j_flat, spec._xi_flat
    vals = np.sum(xi * special.gammainc(jj, flat / rho), axis=1)
    return float(vals[0]) if arr.ndim == 0 else vals.reshape(arr.shape)


def mean_y(spec: MixtureSpec) -> float:
    """Mixture mean via the coefficients (equals the sum of scales)."""
    return float(np.sum(spec._xi_flat * spec._j_flat * spec._rho_flat))


def sample_sum(rates, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draw the interference sum directly; oracle for the Xi machinery."""
    rates = list(rates)
    if not rates:
        raise EmptyMixtureError("no interference terms to sample")
    out = np.zeros(size)
    for r in rates:
        out += rng.exponential(scale=r, size=size)
    return out
