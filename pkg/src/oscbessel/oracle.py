"""Brute-force reference integrator for the Bessel transform and its moments.

Ground truth for everything else in the package: panels split at the
kernel's sign changes, adaptive Gauss-Kronrod inside, tanh-sinh at the
singular endpoints, final summation in extended precision.  This module
deliberately knows nothing about the moment recurrence or the CCF rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp
import numpy as np

from . import specfun
from .errors import AccuracyError, DomainError
from .problem import ProblemSpec

__all__ = ["OracleConfig", "reference_integral", "reference_moment",
           "reference_moments"]


@dataclass(frozen=True)
class OracleConfig:
    rel_tol: float = 1e-12
    max_panels: int = 4096
    precision_bits: int = 192

    def __post_init__(self):
        if self.rel_tol < 1e-14:
            raise DomainError("rel_tol below 1e-14 is not supported")
        if self.max_panels < 4:
            raise DomainError("max_panels must be >= 4")


# ---------------------------------------------------------------------------
# Gauss-Kronrod 7/15 (QUADPACK abscissae and weights on [-1, 1])
# ---------------------------------------------------------------------------

_XGK = np.array([
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0,
])
_WGK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
])
_WG = np.array([
    0.129484966168870, 0.279705391489277,
    0.381830050505119, 0.417959183673469,
])

# full symmetric node set, kronrod weights, gauss weights (0 off-rule)
_GK_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_GK_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_wg_full = np.zeros(8)
_wg_full[1::2] = _WG
_GK_WGAUSS = np.concatenate([_wg_full[:-1], _wg_full[::-1]])


def _gk15(f, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    vals = np.array([f(mid + half * t) for t in _GK_NODES])
    k15 = half * float(_GK_WK @ vals)
    g7 = half * float(_GK_WGAUSS @ vals)
    return k15, abs(k15 - g7)


def _gk_adaptive(f, a, b, abs_tol, budget, depth=0):
    val, err = _gk15(f, a, b)
    budget[0] -= 1
    if err <= abs_tol or depth >= 40 or budget[0] <= 0:
        return val, err
    mid = 0.5 * (a + b)
    v1, e1 = _gk_adaptive(f, a, mid, abs_tol / 2, budget, depth + 1)
    v2, e2 = _gk_adaptive(f, mid, b, abs_tol / 2, budget, depth + 1)
    return v1 + v2, e1 + e2


# ---------------------------------------------------------------------------
# tanh-sinh for panels with one algebraically singular endpoint
# ---------------------------------------------------------------------------

_TS_TMAX = 6.8
_TS_H0 = 0.5
_TS_MAX_LEVEL = 12


@lru_cache(maxsize=32)
def _ts_tgrid(level: int):
    """t abscissae new at this refinement level (level 0: the full h0 grid)."""
    h = _TS_H0 / 2**level
    if level == 0:
        n = int(_TS_TMAX / h)
        return tuple(k * h for k in range(-n, n + 1))
    n = int(_TS_TMAX / h)
    return tuple(k * h for k in range(-n, n + 1) if k % 2 != 0)


def _log_sigmoid(y: float) -> float:
    if y >= 0:
        return -math.log1p(math.exp(-y))
    return y - math.log1p(math.exp(y))


@lru_cache(maxsize=32)
def _ts_raw_nodes(level: int):
    """(sig, logfac0) per new node: distance fraction from the singular end
    and log of sigma^1 * jacobian (the u^gamma part is applied later)."""
    out = []
    for t in _ts_tgrid(level):
        y = math.pi * math.sinh(t)
        ls = _log_sigmoid(y)
        lsm = _log_sigmoid(-y)
        lj = math.log(math.pi * math.cosh(t)) + ls + lsm
        out.append((math.exp(ls), ls, lj))
    return tuple(out)


def _tanh_sinh(psi, length, gamma, abs_tol, rel_tol=1e-14):
    """integral_0^length u^gamma psi(u) du, singularity (if any) at u = 0.

    psi receives the distance u from the singular endpoint (computed
    without cancellation); the u^gamma factor is applied in log space so
    exponents near -1 cannot underflow.
    """
    log_len = math.log(length)
    total = 0.0
    prev = math.inf
    err = math.inf
    for level in range(_TS_MAX_LEVEL + 1):
        h = _TS_H0 / 2**level
        part = 0.0
        for sig, ls, lj in _ts_raw_nodes(level):
            u = length * sig
            logfac = gamma * (log_len + ls) + log_len + lj
            if logfac < -745.0:
                continue
            part += math.exp(logfac) * psi(u)
        total = (total if level == 0 else 0.5 * total) + h * part
        if level >= 2:
            err = abs(total - prev)
            if err <= max(abs_tol, rel_tol * abs(total)):
                break
        prev = total
    return total, err


# ---------------------------------------------------------------------------
# Bessel zero bracketing (panel boundaries only; roughness is fine)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=256)
def _bessel_zeros(nu: float, xmax: float):
    """Approximate positive zeros of J_nu below xmax (McMahon + bisection)."""
    mu = 4.0 * nu * nu
    zeros = []
    s = 1
    while True:
        b = (s + 0.5 * nu - 0.25) * math.pi
        z = b - (mu - 1) / (8 * b) - 4 * (mu - 1) * (7 * mu - 31) / (3 * (8 * b) ** 3)
        if z >= xmax:
            break
        lo, hi = z - 0.4, z + 0.4
        if lo > 0:
            flo = specfun._bessel_j_real(nu, lo)
            fhi = specfun._bessel_j_real(nu, hi)
            if flo * fhi < 0:
                for _ in range(12):
                    mid = 0.5 * (lo + hi)
                    fm = specfun._bessel_j_real(nu, mid)
                    if flo * fm <= 0:
                        hi = mid
                    else:
                        lo, flo = mid, fm
                z = 0.5 * (lo + hi)
        if 0.0 < z < xmax:
            zeros.append(z)
        s += 1
        if s > 100000:  # pragma: no cover
            break
    return tuple(zeros)


def _extended_sum(panel_values, precision_bits):
    with mp.workprec(precision_bits):
        acc = mp.mpf(0)
        for v in panel_values:
            acc += v
        return float(acc)


# ---------------------------------------------------------------------------
# Reference integral
# ---------------------------------------------------------------------------

def reference_integral(spec: ProblemSpec, cfg: OracleConfig | None = None,
                       f=None, breakpoints=()):
    """(value, err_est) for int_0^1 x^a (1-x)^b f(x) J_nu(w x) dx.

    Extra breakpoints (e.g. integrand kinks) may be supplied; they are
    merged into the oscillation-aligned panel grid.
    """
    cfg = cfg or OracleConfig()
    if f is None:
        f = spec.integrand
    if f is None:
        raise DomainError("spec has no integrand and none was supplied")
    a, b, nu, w = spec.alpha, spec.beta, spec.nu, spec.omega

    def kernel(x):
        return f(x) * specfun._bessel_j_real(nu, w * x)

    pts = sorted({z / w for z in _bessel_zeros(nu, w)}
                 | {float(p) for p in breakpoints if 0.0 < float(p) < 1.0})
    if not pts:
        pts = [0.5]
    grid = [0.0] + pts + [1.0]

    panels = []
    errs = []

    # left end: u = x
    x_hi = grid[1]
    psi_l = lambda u: (1.0 - u) ** b * kernel(u) if u > 0 else 0.0
    # psi at u == 0 never happens (sigmoid > 0); guard kept for safety
    val, err = _tanh_sinh(psi_l, x_hi, a, abs_tol=0.0, rel_tol=0.1 * cfg.rel_tol)
    panels.append(val)
    errs.append(err)

    # right end: u = 1 - x
    u_hi = 1.0 - grid[-2]
    psi_r = lambda u: (1.0 - u) ** a * kernel(1.0 - u)
    val, err = _tanh_sinh(psi_r, u_hi, b, abs_tol=0.0, rel_tol=0.1 * cfg.rel_tol)
    panels.append(val)
    errs.append(err)

    def integrand(x):
        return x**a * (1.0 - x) ** b * kernel(x)

    # rough pass over the interior for a scale estimate
    interior = list(zip(grid[1:-2], grid[2:-1]))
    rough = [abs(v) for v in panels]
    first_pass = []
    for lo, hi in interior:
        v, e = _gk15(integrand, lo, hi)
        first_pass.append((v, e))
        rough.append(abs(v))
    scale = max(sum(rough), 1e-300)
    abs_tol = cfg.rel_tol * scale / max(1, len(interior))

    budget = [cfg.max_panels]
    for (lo, hi), (v, e) in zip(interior, first_pass):
        if e <= abs_tol:
            panels.append(v)
            errs.append(e)
        else:
            v, e = _gk_adaptive(integrand, lo, hi, abs_tol, budget)
            panels.append(v)
            errs.append(e)

    value = _extended_sum(panels, cfg.precision_bits)
    err_est = sum(errs)
    if err_est > 100.0 * cfg.rel_tol * scale:
        raise AccuracyError(
            f"oracle integral reached err_est={err_est:.3e} "
            f"against scale {scale:.3e}", err_est)
    return value, err_est


# ---------------------------------------------------------------------------
# Reference moments
# ---------------------------------------------------------------------------

def _tstar(k: int, x: float) -> float:
    # stable for x in [0, 1]: T_k*(x) = cos(k arccos(2x - 1))
    return math.cos(k * math.acos(min(1.0, max(-1.0, 2.0 * x - 1.0))))


def _moment_xdomain(spec, k, cfg):
    return reference_integral(spec, cfg, f=lambda x: _tstar(k, x))


def _moment_theta(spec, ks, cfg):
    """theta-form batch: M(k) = 2 (-1)^k int_0^{pi/2} W cos(2k theta) dtheta
    with W = sin^(2a+1) cos^(2b+1) J_nu(w sin^2 theta).  All requested k
    share one panel grid and one set of W evaluations.
    """
    a, b, nu, w = spec.alpha, spec.beta, spec.nu, spec.omega
    kmax = max(ks)
    q = max(kmax, int(math.ceil(w / 2.0)), 8)
    half = math.pi / (2.0 * q)          # half-period of cos(2 q theta)
    zeros = [(2 * i + 1) * math.pi / (4.0 * q) for i in range(q)]

    # tanh-sinh ends cover the first/last few half-periods so every
    # interior panel sees a smooth W
    n_end = min(4, (len(zeros) - 1) // 2) if len(zeros) > 2 else 1
    t_lo = zeros[n_end - 1]
    t_hi = zeros[-n_end]
    inner = zeros[n_end - 1: len(zeros) - n_end + 1]

    def w_smooth(theta):
        s, c = math.sin(theta), math.cos(theta)
        return s ** (2 * a + 1) * c ** (2 * b + 1) * \
            specfun._bessel_j_real(nu, w * s * s)

    ks = list(ks)
    per_k_panels = {k: [] for k in ks}
    per_k_errs = {k: 0.0 for k in ks}

    # ends: shared tanh-sinh nodes, W cached, per-k level convergence
    for side in ("left", "right"):
        if side == "left":
            length, gamma = t_lo, 2 * a + 1

            def psi_w(u):
                theta = u
                sc = math.sin(u) / u if u > 0 else 1.0
                return sc ** (2 * a + 1) * math.cos(theta) ** (2 * b + 1) * \
                    specfun._bessel_j_real(nu, w * math.sin(theta) ** 2)

            theta_of = lambda u: u
        else:
            length, gamma = math.pi / 2 - t_hi, 2 * b + 1

            def psi_w(u):
                sc = math.sin(u) / u if u > 0 else 1.0
                s = math.cos(u)  # sin(theta) with theta = pi/2 - u
                return sc ** (2 * b + 1) * s ** (2 * a + 1) * \
                    specfun._bessel_j_real(nu, w * s * s)

            theta_of = lambda u: math.pi / 2 - u

        log_len = math.log(length)
        node_cache = []   # per level: list of (weight_nof_h, W*psi, theta)
        totals = {k: 0.0 for k in ks}
        prevs = {k: math.inf for k in ks}
        level_err = {k: math.inf for k in ks}
        for level in range(_TS_MAX_LEVEL + 1):
            h = _TS_H0 / 2**level
            rows = []
            for sig, ls, lj in _ts_raw_nodes(level):
                u = length * sig
                logfac = gamma * (log_len + ls) + log_len + lj
                if logfac < -745.0:
                    continue
                rows.append((math.exp(logfac) * psi_w(u), theta_of(u)))
            node_cache.append(rows)
            done = True
            for k in ks:
                part = sum(wv * math.cos(2 * k * th) for wv, th in rows)
                totals[k] = (totals[k] if level == 0 else 0.5 * totals[k]) + h * part
                if level >= 2:
                    level_err[k] = abs(totals[k] - prevs[k])
                    if level_err[k] > 0.1 * cfg.rel_tol * abs(totals[k]) + 1e-300:
                        done = False
                else:
                    done = False
                prevs[k] = totals[k]
            if done and level >= 3:
                break
        for k in ks:
            per_k_panels[k].append(totals[k])
            per_k_errs[k] += level_err[k] if math.isfinite(level_err[k]) else 0.0

    # interior half-period panels, one K15 evaluation of W per panel
    for lo, hi in zip(inner[:-1], inner[1:]):
        half_w = 0.5 * (hi - lo)
        mid = 0.5 * (lo + hi)
        thetas = mid + half_w * _GK_NODES
        wvals = np.array([w_smooth(t) for t in thetas])
        for k in ks:
            cvals = np.cos(2 * k * thetas)
            k15 = half_w * float(_GK_WK @ (wvals * cvals))
            g7 = half_w * float(_GK_WGAUSS @ (wvals * cvals))
            per_k_panels[k].append(k15)
            per_k_errs[k] += abs(k15 - g7)

    out = {}
    for k in ks:
        sign = 2.0 if k % 2 == 0 else -2.0
        val = sign * _extended_sum(per_k_panels[k], cfg.precision_bits)
        out[k] = (val, 2.0 * per_k_errs[k])
    return out


def reference_moment(spec: ProblemSpec, k: int, cfg: OracleConfig | None = None,
                     force: str | None = None):
    """(value, err_est) for the k-th modified moment of the weight/kernel.

    Low k integrates in x with the polynomial under the oscillation-aligned
    panels; higher k switches to the theta form whose panels track
    cos(2 k theta) directly.  ``force`` pins the path for cross-checks.
    """
    if k < 0:
        raise DomainError("k must be nonnegative")
    cfg = cfg or OracleConfig()
    path = force or ("x" if k <= 2.0 * spec.omega / math.pi else "theta")
    if path == "x":
        return _moment_xdomain(spec, k, cfg)
    return _moment_theta(spec, [k], cfg)[k]


def reference_moments(spec: ProblemSpec, ks, cfg: OracleConfig | None = None):
    """Batch of modified moments sharing one set of kernel evaluations."""
    cfg = cfg or OracleConfig()
    ks = sorted(set(int(k) for k in ks))
    if any(k < 0 for k in ks):
        raise DomainError("moment indices must be nonnegative")
    return _moment_theta(spec, ks, cfg)
