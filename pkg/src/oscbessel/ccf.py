"""Clenshaw-Curtis-Filon quadrature and convergence studies.

Q[f] = sum_k b_k M(k): interpolate f at the Clenshaw-Curtis points,
integrate the weighted oscillatory kernel exactly through the moment
table.  Moment tables are f-independent, so they are cached per
(alpha, beta, nu, omega) and N-sweeps reuse the largest one by prefix.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .chebfit import cc_points, cheb_interp_coeffs
from .errors import DomainError
from .moments import MomentTable, moment_table
from .problem import ProblemSpec

__all__ = [
    "QuadratureResult",
    "ConvergenceRecord",
    "ccf_integrate",
    "convergence_study",
    "fit_rate",
]


@dataclass(frozen=True)
class QuadratureResult:
    """One CCF evaluation: value, rule size, and diagnostics.

    ``moment_err_est`` propagates the moment-table error estimates
    through the coefficient sum; ``coeff_tail`` is |b_N|, a proxy for how
    well N resolves f.
    """

    value: float
    N: int
    moment_err_est: float
    coeff_tail: float


@dataclass(frozen=True)
class ConvergenceRecord:
    N: int
    approx: float
    reference: float
    abs_err: float


_TABLE_CACHE: dict = {}
_CACHE_LOCK = threading.Lock()


def _cached_table(spec: ProblemSpec, N: int) -> MomentTable:
    """Largest-known moment table for the spec's weight/kernel, >= N."""
    key = spec.moment_key()
    with _CACHE_LOCK:
        table = _TABLE_CACHE.get(key)
    if table is not None and table.N >= N:
        return table
    table = moment_table(spec, N)
    with _CACHE_LOCK:
        current = _TABLE_CACHE.get(key)
        if current is None or current.N < table.N:
            _TABLE_CACHE[key] = table
        else:
            table = current
    return table


def clear_moment_cache() -> None:
    with _CACHE_LOCK:
        _TABLE_CACHE.clear()


def ccf_integrate(spec: ProblemSpec, N: int) -> QuadratureResult:
    """Apply the N+1-point CCF rule to the problem's integrand."""
    if N < 1:
        raise DomainError("N must be >= 1")
    if spec.integrand is None:
        raise DomainError("problem carries no integrand")
    samples = np.array([float(spec.integrand(float(x)))
                        for x in cc_points(N)])
    if not np.all(np.isfinite(samples)):
        bad = float(cc_points(N)[int(np.argmax(~np.isfinite(samples)))])
        raise DomainError(f"integrand not finite at x={bad}")
    b = cheb_interp_coeffs(samples).coefficients
    table = _cached_table(spec, N)
    values = table.values[: N + 1]
    errs = table.err_est[: N + 1]
    value = float(np.dot(b, values))
    if not math.isfinite(value):
        raise DomainError("quadrature value is not finite")
    return QuadratureResult(value, N,
                            float(np.abs(b) @ errs), abs(float(b[-1])))


def convergence_study(spec: ProblemSpec, N_list, reference: float):
    """One ConvergenceRecord per N against a fixed reference value."""
    N_list = [int(n) for n in N_list]
    if any(b <= a for a, b in zip(N_list, N_list[1:])) or not N_list:
        raise DomainError("N_list must be nonempty and strictly increasing")
    _cached_table(spec, N_list[-1])   # one build, all N reuse the prefix
    records = []
    for n in N_list:
        q = ccf_integrate(spec, n)
        records.append(ConvergenceRecord(n, q.value, reference,
                                         abs(q.value - reference)))
    return records


def fit_rate(records, window=None) -> float:
    """Least-squares slope of log(abs_err) against log(N).

    ``window`` is a (start, stop) index pair into ``records``; the default
    is the upper half, where the asymptotic regime lives.  Records with
    abs_err = 0 carry no rate information and are dropped.
    """
    records = list(records)
    if window is None:
        # Upper half, widened if needed so the fit stays well-posed.
        window = (max(0, min(len(records) // 2, len(records) - 4)),
                  len(records))
    start, stop = window
    chosen = [r for r in records[start:stop] if r.abs_err > 0.0]
    if len(chosen) < 4:
        raise DomainError("need at least 4 usable records in the window")
    logn = np.log([r.N for r in chosen])
    loge = np.log([r.abs_err for r in chosen])
    return float(np.polyfit(logn, loge, 1)[0])
