"""Time/bandwidth allocation strategies and their iteration accounting.

Four allocators share the same max-min-rate objective:

* :func:`equal_bandwidth_taf` - closed form (Lambert-W) optimum of the
  time split when every UAV gets the same bandwidth share;
* :func:`proposed_allocate` - two-phase scheme: bisection on the sign of
  the min-rate derivative for the time split, then pairwise bandwidth
  transfers from the fastest to the slowest UAV;
* :func:`conventional_allocate` - nested-bisection baseline (outer
  bisection on a common target rate, inner per-UAV bisections);
* :func:`exhaustive_optimal` - brute-force grid search over the time
  split and the bandwidth simplex (small K only).

Every allocator reports an abstract operation tally (``op_count``) so the
complexity claims can be compared empirically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapabilityError, ConfigError, NumericError
from .outage import Allocation
from .specfun import lambert_w0

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class AllocationResult:
    """Converged allocation plus the iteration/operation bookkeeping.

    ``inner_iters_beta`` is only populated by the nested-bisection
    baseline (total inner-loop count across all outer iterations); the
    other allocators report 0 there.
    """

    tau: float
    beta: tuple[float, ...]
    iters_tau: int
    iters_beta: int
    inner_iters_beta: int
    op_count: int

    def __post_init__(self) -> None:
        if not 0.0 < self.tau < 1.0:
            raise ConfigError(f"tau must lie in (0,1), got {self.tau}")
        if abs(math.fsum(self.beta) - 1.0) > 1e-12:
            raise ConfigError(
                f"beta must sum to 1 within 1e-12, got {math.fsum(self.beta)!r}"
            )
        for name in ("iters_tau", "iters_beta", "inner_iters_beta", "op_count"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 0:
                raise ConfigError(f"{name} must be a non-negative integer, got {value!r}")

    @property
    def K(self) -> int:
        return len(self.beta)

    def as_allocation(self, nu_r: float = 0.0) -> Allocation:
        """Package the converged (tau, beta) with a protocol-overhead share."""
        return Allocation(tau=self.tau, beta=self.beta, nu_r=nu_r)


def _as_gamma(gamma) -> np.ndarray:
    arr = np.asarray(gamma, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ConfigError("gamma must be a non-empty vector")
    if not np.all(np.isfinite(arr) & (arr > 0.0)):
        raise ConfigError("all channel gains must be strictly positive and finite")
    return arr


def _as_beta(beta, K: int) -> np.ndarray:
    arr = np.asarray(beta, dtype=float)
    if arr.shape != (K,):
        raise ConfigError(f"beta must have length {K}, got shape {arr.shape}")
    if not np.all((arr > 0.0) & (arr <= 1.0)):
        raise ConfigError(f"every beta_k must lie in (0,1], got {arr}")
    if abs(math.fsum(arr) - 1.0) > 1e-12:
        raise ConfigError(f"beta must sum to 1 within 1e-12, got {math.fsum(arr)!r}")
    return arr


def _check_scalars(nu_c: float, epsilon: float) -> None:
    if not nu_c > 0.0:
        raise ConfigError(f"nu_c must be > 0, got {nu_c}")
    if not 0.0 < epsilon < 0.5:
        raise ConfigError(f"epsilon must lie in (0, 0.5), got {epsilon}")


def _rates(beta: np.ndarray, tau: float, gamma: np.ndarray, nu_c: float) -> np.ndarray:
    eff = beta * (1.0 - tau)
    return eff * nu_c * np.log2(1.0 + tau * gamma / eff)


def _dmin_rate_dtau(beta: np.ndarray, gamma: np.ndarray, nu_c: float, tau: float) -> float:
    """Derivative of the min rate w.r.t. tau, at the current weakest UAV."""
    k = int(np.argmin(_rates(beta, tau, gamma, nu_c)))
    b = float(beta[k])
    g = float(gamma[k])
    eff = b * (1.0 - tau)
    return (
        -b * nu_c * math.log2(1.0 + tau * g / eff)
        + nu_c * b * g / (_LN2 * (eff + tau * g))
    )


def equal_bandwidth_taf(K: int, R_a: float) -> float:
    """Optimal time split when the band is shared equally by K UAVs.

    Closed form via the principal Lambert-W branch; depends on K and R_a
    only through their product.
    """
    if not isinstance(K, int) or K < 1:
        raise ConfigError(f"K must be an integer >= 1, got {K!r}")
    if not R_a > 0.0:
        raise ConfigError(f"R_a must be > 0, got {R_a}")
    q = K * R_a * _LN2
    w = lambert_w0(-math.exp(-1.0) * 2.0 ** (-K * R_a))
    tau = 1.0 - q / (1.0 + q + w)
    if not 0.0 < tau < 1.0:
        raise NumericError(f"equal-bandwidth time split left (0,1): {tau!r}")
    return tau


def min_rate_tau_derivative(alloc: Allocation, gamma, tau: float) -> float:
    """Closed-form d(min rate)/d(tau) evaluated at the given time split.

    The weakest UAV is re-identified at the supplied tau (the allocation's
    own tau is ignored; it only carries beta and nu_c).
    """
    if not 0.0 < tau < 1.0:
        raise ConfigError(f"tau must lie in (0,1), got {tau}")
    arr = _as_gamma(gamma)
    if arr.size != alloc.K:
        raise ConfigError(f"gamma must have length K={alloc.K}, got {arr.size}")
    return _dmin_rate_dtau(np.asarray(alloc.beta), arr, alloc.nu_c, tau)


def phase1_taf(beta, gamma, nu_c: float, epsilon: float) -> tuple[float, int]:
    """Bisection for the time split on the sign of the min-rate derivative.

    Bracket starts at [epsilon, 1-epsilon] and halves until its width is
    at most epsilon; returns the final midpoint and the iteration count.
    """
    _check_scalars(nu_c, epsilon)
    gam = _as_gamma(gamma)
    bet = _as_beta(beta, gam.size)
    lo, hi = epsilon, 1.0 - epsilon
    d_lo = _dmin_rate_dtau(bet, gam, nu_c, lo)
    d_hi = _dmin_rate_dtau(bet, gam, nu_c, hi)
    if not (d_lo > 0.0 and d_hi < 0.0):
        raise NumericError(
            "min-rate derivative does not bracket a maximum on "
            f"[{lo}, {hi}]: d(lo)={d_lo!r}, d(hi)={d_hi!r}"
        )
    iters = 0
    while hi - lo > epsilon:
        mid = 0.5 * (lo + hi)
        if _dmin_rate_dtau(bet, gam, nu_c, mid) > 0.0:
            lo = mid
        else:
            hi = mid
        iters += 1
    return 0.5 * (lo + hi), iters


def phase2_baf(
    tau_o: float,
    gamma,
    nu_c: float,
    epsilon: float,
    beta_init,
    max_updates: int | None = None,
    gap_trace: list[float] | None = None,
) -> tuple[np.ndarray, int]:
    """Pairwise bandwidth transfers until all rates agree within epsilon.

    Each update moves ``beta_hat * gap / (2 * R_hat)`` of bandwidth from
    the fastest UAV to the slowest, so the share vector's sum is
    conserved.  Returns the converged shares and the update count.
    ``gap_trace``, if given, collects the max-min rate gap seen at each
    check (including the final one at convergence).
    """
    if not 0.0 < tau_o < 1.0:
        raise ConfigError(f"tau must lie in (0,1), got {tau_o}")
    _check_scalars(nu_c, epsilon)
    gam = _as_gamma(gamma)
    beta = _as_beta(beta_init, gam.size).copy()
    cap = (
        max_updates
        if max_updates is not None
        else 10 * gam.size * math.ceil(math.log10(1.0 / epsilon))
    )
    iters = 0
    while True:
        rates = _rates(beta, tau_o, gam, nu_c)
        k_hat = int(np.argmax(rates))
        k_check = int(np.argmin(rates))
        gap = float(rates[k_hat] - rates[k_check])
        if gap_trace is not None:
            gap_trace.append(gap)
        if gap <= epsilon:
            return beta, iters
        if iters >= cap:
            raise NumericError(
                f"bandwidth equalization did not converge in {cap} updates: "
                f"gap={gap!r} > epsilon={epsilon} (K={gam.size}, tau={tau_o})"
            )
        step = float(beta[k_hat]) * gap / (2.0 * float(rates[k_hat]))
        beta[k_check] += step
        beta[k_hat] -= step
        iters += 1


def proposed_allocate(gamma, nu_c: float, epsilon: float) -> AllocationResult:
    """Two-phase allocation: derivative bisection, then pairwise transfers.

    Operation tally is K + I_tau + I_beta * K: one rate per UAV to set up,
    one derivative per bisection step, K rates per transfer update.
    """
    gam = _as_gamma(gamma)
    K = gam.size
    equal = np.full(K, 1.0 / K)
    tau_o, iters_tau = phase1_taf(equal, gam, nu_c, epsilon)
    beta_o, iters_beta = phase2_baf(tau_o, gam, nu_c, epsilon, equal)
    return AllocationResult(
        tau=tau_o,
        beta=tuple(float(b) for b in beta_o),
        iters_tau=iters_tau,
        iters_beta=iters_beta,
        inner_iters_beta=0,
        op_count=K + iters_tau + iters_beta * K,
    )


def conventional_allocate(gamma, nu_c: float, epsilon: float) -> AllocationResult:
    """Nested-bisection baseline for the same max-min program.

    The time split is bisected exactly as in phase 1 (but costed at K
    rate evaluations per step).  Bandwidth is then found by bisecting on
    a common target rate: each candidate target needs one inner bisection
    per UAV for the smallest share achieving it, and the candidate is
    feasible when those shares sum to at most 1.  The last feasible share
    vector is normalized to sum exactly 1.
    """
    gam = _as_gamma(gamma)
    K = gam.size
    _check_scalars(nu_c, epsilon)
    equal = np.full(K, 1.0 / K)
    tau_o, iters_tau = phase1_taf(equal, gam, nu_c, epsilon)
    if K == 1:
        return AllocationResult(
            tau=tau_o,
            beta=(1.0,),
            iters_tau=iters_tau,
            iters_beta=0,
            inner_iters_beta=0,
            op_count=iters_tau,
        )

    def rate_k(beta_k: float, k: int) -> float:
        eff = beta_k * (1.0 - tau_o)
        return eff * nu_c * math.log2(1.0 + tau_o * gam[k] / eff)

    def shares_for_target(target: float) -> tuple[np.ndarray | None, int]:
        """Smallest per-UAV share reaching the target, or None if any UAV
        cannot reach it with nearly the whole band.  Second value is the
        inner bisection count consumed."""
        inner = 0
        shares = np.empty(K)
        for k in range(K):
            if rate_k(1.0 - epsilon, k) < target:
                return None, inner
            lo, hi = epsilon, 1.0 - epsilon
            while hi - lo > epsilon:
                mid = 0.5 * (lo + hi)
                if rate_k(mid, k) >= target:
                    hi = mid
                else:
                    lo = mid
                inner += 1
            shares[k] = hi
        return shares, inner

    target_lo = 0.0
    target_hi = min(rate_k(1.0 - epsilon, k) for k in range(K))
    best = np.full(K, epsilon)  # the trivially feasible zero-rate shares
    iters_beta = 0
    inner_total = 0
    while target_hi - target_lo > epsilon:
        target = 0.5 * (target_lo + target_hi)
        shares, inner = shares_for_target(target)
        inner_total += inner
        iters_beta += 1
        if shares is not None and float(shares.sum()) <= 1.0:
            target_lo = target
            best = shares
        else:
            target_hi = target
    best = best / best.sum()
    return AllocationResult(
        tau=tau_o,
        beta=tuple(float(b) for b in best),
        iters_tau=iters_tau,
        iters_beta=iters_beta,
        inner_iters_beta=inner_total,
        op_count=iters_tau * K + inner_total,
    )


def exhaustive_optimal(
    gamma, nu_c: float, grid_tau: int, grid_beta: int
) -> AllocationResult:
    """Max-min rate by brute force over a tau grid and a share simplex.

    Tau takes the grid_tau evenly spaced interior points j/(grid_tau+1);
    shares are all compositions of grid_beta equal steps into K positive
    parts.  Guarded to K <= 3 (the simplex grid grows combinatorially).
    Ties keep the first point visited (tau ascending, compositions in
    lexicographic order).
    """
    gam = _as_gamma(gamma)
    K = gam.size
    if K > 3:
        raise CapabilityError(
            f"exhaustive search supports K <= 3 (the share grid explodes), got K={K}"
        )
    if not nu_c > 0.0:
        raise ConfigError(f"nu_c must be > 0, got {nu_c}")
    if not (isinstance(grid_tau, int) and grid_tau >= 1):
        raise ConfigError(f"grid_tau must be an integer >= 1, got {grid_tau!r}")
    if not (isinstance(grid_beta, int) and grid_beta >= K):
        raise ConfigError(
            f"grid_beta must be an integer >= K={K}, got {grid_beta!r}"
        )

    if K == 1:
        comps = [(grid_beta,)]
    elif K == 2:
        comps = [(i, grid_beta - i) for i in range(1, grid_beta)]
    else:
        comps = [
            (i, j, grid_beta - i - j)
            for i in range(1, grid_beta - 1)
            for j in range(1, grid_beta - i)
        ]
    steps = np.array(comps, dtype=np.int64)
    # Rates depend on a composition only through each UAV's own step count,
    # so per-tau work is K small rate tables plus gathers over the simplex.
    gathers = [steps[:, k] - 1 for k in range(K)]
    share_axis = np.arange(1, grid_beta + 1, dtype=float) / grid_beta

    best_rate = -math.inf
    best_tau = math.nan
    best_idx = -1
    for j in range(1, grid_tau + 1):
        tau = j / (grid_tau + 1)
        eff = share_axis * (1.0 - tau)
        tables = [eff * nu_c * np.log2(1.0 + tau * g / eff) for g in gam]
        worst = tables[0][gathers[0]]
        for k in range(1, K):
            np.minimum(worst, tables[k][gathers[k]], out=worst)
        value = float(worst.max())
        if value > best_rate:
            best_rate = value
            best_tau = tau
            best_idx = int(worst.argmax())
    return AllocationResult(
        tau=best_tau,
        beta=tuple(float(s) / grid_beta for s in steps[best_idx]),
        iters_tau=0,
        iters_beta=0,
        inner_iters_beta=0,
        op_count=grid_tau * len(comps) * K,
    )
