"""Test functions with known derivative sup-norms on [0, inf).

Every bound in the package is stated for classes of smooth test functions,
so each TestFunction carries the sup-norms of itself and its first four
derivatives (math.inf marks an unbounded one), its polynomial growth (for
quadrature truncation), and a closed-form chi-square expectation when one
exists (cosine and sine via the characteristic function (1-2it)^(-p/2),
monomials via p(p+2)...(p+2k-2)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError

__all__ = [
    "TestFunction",
    "cosine",
    "sine",
    "power",
    "identity",
    "constant",
    "smoothing_indicator",
]


@dataclass(frozen=True)
class TestFunction:
    fn: Callable[[float], float]
    norms: tuple[float, float, float, float, float]  # sup|h|, |h'|, ..., |h''''|
    label: str
    growth_degree: int = 0
    growth_coeff: float = 1.0
    chisq_closed_form: Optional[Callable[[int], float]] = field(default=None, compare=False)
    vector_fn: Optional[Callable] = field(default=None, compare=False)  # ndarray -> ndarray

    def __call__(self, x: float) -> float:
        return self.fn(x)

    def norm(self, k: int) -> float:
        """sup-norm of the k-th derivative (k = 0 is the function itself)."""
        return self.norms[k]


def _chf_expectation(t: float, trig: str):
    # E[cos(tY_p)] + i E[sin(tY_p)] = (1 - 2it)^(-p/2)
    def closed(p: int) -> float:
        val = (1.0 - 2.0j * t) ** (-p / 2.0)
        return val.real if trig == "cos" else val.imag

    return closed


def cosine(t: float) -> TestFunction:
    """h(x) = cos(tx); the k-th derivative has sup-norm t^k."""
    return TestFunction(
        fn=lambda x: math.cos(t * x),
        norms=(1.0, abs(t), t * t, abs(t) ** 3, t ** 4),
        label=f"cos({t:g}x)",
        chisq_closed_form=_chf_expectation(t, "cos"),
        vector_fn=lambda xs: np.cos(t * xs),
    )


def sine(t: float) -> TestFunction:
    """h(x) = sin(tx)."""
    return TestFunction(
        fn=lambda x: math.sin(t * x),
        norms=(1.0, abs(t), t * t, abs(t) ** 3, t ** 4),
        label=f"sin({t:g}x)",
        chisq_closed_form=_chf_expectation(t, "sin"),
        vector_fn=lambda xs: np.sin(t * xs),
    )


def _chisq_raw_moment(p: int, k: int) -> float:
    out = 1.0
    for j in range(k):
        out *= p + 2 * j
    return out


def power(k: int) -> TestFunction:
    """h(x) = x^k on [0, inf): derivatives below order k are unbounded."""
    if k < 1:
        raise DomainError("power test functions need k >= 1")
    norms = [math.inf] * 5
    if k <= 4:
        norms[k] = float(math.factorial(k))
        for j in range(k + 1, 5):
            norms[j] = 0.0
    return TestFunction(
        fn=lambda x: x ** k,
        norms=tuple(norms),
        label=f"x^{k}",
        growth_degree=k,
        chisq_closed_form=lambda p: _chisq_raw_moment(p, k),
        vector_fn=lambda xs: xs ** k,
    )


def identity() -> TestFunction:
    return power(1)


def constant(c: float = 1.0) -> TestFunction:
    return TestFunction(
        fn=lambda x: c,
        norms=(abs(c), 0.0, 0.0, 0.0, 0.0),
        label=f"const({c:g})",
        chisq_closed_form=lambda p: c,
    )


def _bump_core(x: float) -> float:
    # Five-piece C^2 cubic ramp from 1 (x <= -1) down to 0 (x >= 1).
    if x <= -1.0:
        return 1.0
    if x <= -0.5:
        return 1.0 - (2.0 / 3.0) * (x + 1.0) ** 3
    if x <= 0.5:
        return (2.0 / 3.0) * x ** 3 - x + 0.5
    if x <= 1.0:
        return (2.0 / 3.0) * (1.0 - x) ** 3
    return 0.0


def smoothing_indicator(alpha: float, z: float) -> TestFunction:
    """Smoothed indicator h(x) = core(1 + 2(x - z)/alpha).

    Equals 1 for x <= z - alpha, 0 for x >= z, is nonincreasing and C^2 with
    Lipschitz second derivative; exact norms 2/alpha, 8/alpha^2, 32/alpha^3.
    The fourth derivative does not exist everywhere, so its slot is inf.
    """
    if alpha <= 0.0:
        raise DomainError("alpha must be positive")
    two_over = 2.0 / alpha
    return TestFunction(
        fn=lambda x: _bump_core(1.0 + two_over * (x - z)),
        norms=(1.0, 2.0 / alpha, 8.0 / alpha ** 2, 32.0 / alpha ** 3, math.inf),
        label=f"smoothed_indicator(alpha={alpha:g}, z={z:g})",
    )
