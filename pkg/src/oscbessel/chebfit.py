"""Clenshaw-Curtis nodes on [0, 1] and shifted-Chebyshev interpolation.

Coefficients are computed by a type-I DCT: through an FFT of the even
extension when the node count is a power of two, by direct summation
otherwise, so correctness never depends on how N factors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = ["ChebyshevExpansion", "cc_points", "cheb_interp_coeffs", "cheb_eval"]


@dataclass(frozen=True)
class ChebyshevExpansion:
    """Coefficients b of P(x) = sum_i b[i] T_i*(x) on [0, 1]."""

    coefficients: np.ndarray
    N: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "coefficients",
                           np.asarray(self.coefficients, dtype=float))
        object.__setattr__(self, "N", len(self.coefficients) - 1)

    def __call__(self, x: float) -> float:
        return cheb_eval(self, x)


def cc_points(N: int) -> np.ndarray:
    """Clenshaw-Curtis points c_i = 1/2 + cos(i pi / N)/2, i = 0..N.

    Descending from 1 to 0, symmetric about 1/2.
    """
    if N < 1:
        raise DomainError("N must be >= 1")
    return 0.5 + 0.5 * np.cos(np.arange(N + 1) * np.pi / N)


def _coeffs_fft(samples: np.ndarray) -> np.ndarray:
    N = len(samples) - 1
    even = np.concatenate([samples, samples[-2:0:-1]])
    return np.fft.rfft(even).real[: N + 1] / N


def _coeffs_direct(samples: np.ndarray) -> np.ndarray:
    N = len(samples) - 1
    j = np.arange(N + 1)
    weights = np.ones(N + 1)
    weights[0] = weights[-1] = 0.5
    cosmat = np.cos(np.outer(j, j) * (np.pi / N))
    return (2.0 / N) * (cosmat @ (weights * samples))


def cheb_interp_coeffs(samples) -> ChebyshevExpansion:
    """Interpolation coefficients from samples of f at cc_points(N).

    Convention: b_k = (2/N) sum''_j f(c_j) cos(j k pi / N), with the j = 0
    and j = N terms halved, then b_0 and b_N halved once more so that the
    interpolant is the plain (unprimed) sum over T_i*.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 1 or len(samples) < 2:
        raise DomainError("need a flat sequence of N+1 >= 2 samples")
    N = len(samples) - 1
    if N >= 2 and N & (N - 1) == 0:
        b = _coeffs_fft(samples)
    else:
        b = _coeffs_direct(samples)
    b[0] *= 0.5
    b[-1] *= 0.5
    return ChebyshevExpansion(b)


def cheb_eval(expansion: ChebyshevExpansion, x: float) -> float:
    """Clenshaw backward recurrence for sum b_i T_i*(x), 0 <= x <= 1."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x={x} outside [0, 1]")
    b = expansion.coefficients
    t = 2.0 * x - 1.0
    y1 = 0.0
    y2 = 0.0
    for k in range(len(b) - 1, 0, -1):
        y1, y2 = b[k] + 2.0 * t * y1 - y2, y1
    return b[0] + t * y1 - y2
