"""2pi-periodic Hill potentials as sampled profiles.

A :class:`Profile` couples a callable evaluator with uniform samples on
[0, 2pi).  Profiles built from samples evaluate by trigonometric
interpolation, so spectral operations (used by the KdV stepper and the
coadjoint action) and pointwise evaluation (used by the Floquet
integrator) see the same function to machine precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError

__all__ = ["Profile", "spectral_derivative"]

PERIOD = 2.0 * np.pi
_MIN_SAMPLES = 8
_DEFAULT_SAMPLES = 512


def grid(n: int) -> np.ndarray:
    """The uniform sample grid x_j = 2 pi j / n, j = 0..n-1."""
    return PERIOD * np.arange(n) / n


def spectral_derivative(samples: np.ndarray, order: int = 1) -> np.ndarray:
    """Derivative of a periodic sample vector via the rFFT.

    The Nyquist mode is zeroed for odd derivative orders (its sampled
    derivative is not representable on the same grid).
    """
    n = samples.size
    coef = np.fft.rfft(samples)
    k = np.arange(coef.size)
    coef = coef * (1j * k) ** order
    if n % 2 == 0 and order % 2 == 1:
        coef[-1] = 0.0
    return np.fft.irfft(coef, n)


def _trig_evaluator(samples: np.ndarray) -> Callable:
    """Trigonometric interpolant through uniform samples on [0, 2pi)."""
    n = samples.size
    coef = np.fft.rfft(samples) / n
    k = np.arange(coef.size, dtype=float)
    wr = 2.0 * coef.real
    wi = -2.0 * coef.imag
    wr[0] = coef.real[0]
    if n % 2 == 0:
        wr[-1] = coef.real[-1]
        wi[-1] = 0.0

    def evaluate(x):
        xa = np.asarray(x, dtype=float)
        if xa.ndim == 0:
            ang = float(xa) * k
            return float(np.dot(np.cos(ang), wr) + np.dot(np.sin(ang), wi))
        ang = np.multiply.outer(xa, k)
        return np.cos(ang) @ wr + np.sin(ang) @ wi

    return evaluate


@dataclass
class Profile:
    """A 2pi-periodic profile with both a callable and a sampled form."""

    evaluator: Callable = field(repr=False)
    samples: np.ndarray = field(repr=False)
    period: float = PERIOD

    @classmethod
    def from_callable(cls, f: Callable, n: int = _DEFAULT_SAMPLES) -> "Profile":
        if n < _MIN_SAMPLES:
            raise DomainError(f"need at least {_MIN_SAMPLES} samples, got {n}")
        x = grid(n)
        try:
            vals = np.asarray(f(x), dtype=float)
        except (TypeError, ValueError):
            vals = None
        if vals is None or vals.shape != x.shape:
            vals = np.array([float(f(xi)) for xi in x])
        return cls(evaluator=f, samples=vals)

    @classmethod
    def from_samples(cls, samples) -> "Profile":
        samples = np.asarray(samples, dtype=float)
        if samples.ndim != 1 or samples.size < _MIN_SAMPLES:
            raise DomainError("samples must be a 1-d vector of length >= 8")
        return cls(evaluator=_trig_evaluator(samples), samples=samples)

    def __call__(self, x):
        return self.evaluator(x)

    @property
    def n(self) -> int:
        return self.samples.size

    def mean(self) -> float:
        return float(self.samples.mean())

    def derivative(self, order: int = 1) -> "Profile":
        return Profile.from_samples(spectral_derivative(self.samples, order))

    def resampled(self, n: int) -> "Profile":
        if n == self.n:
            return self
        return Profile.from_callable(self.evaluator, n)
