"""Location-oblivious Fourier coefficient estimation.

The estimator sees only the readings and their ordinal position: coefficient
k is the average of y_i exp(-j 2 pi k i / M) over i = 1..M, as if the
samples sat on the uniform grid i/M.  No FFT: phase vectors are built by
repeated multiplication of the base vector exp(-j 2 pi i / M), and sums use
numpy's pairwise reduction so results stay bit-identical across BLAS
threading settings (replay determinism).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import BandlimitedField


def _phase_base(m: int) -> np.ndarray:
    """exp(-j 2 pi i / M) for i = 1..M."""
    return np.exp((-2j * np.pi / m) * np.arange(1, m + 1))


def _phase_power(m: int, k: int) -> np.ndarray:
    """exp(-j 2 pi k i / M) for i = 1..M, k >= 0, by repeated multiplication."""
    w = np.ones(m, dtype=complex)
    if k == 0:
        return w
    base = _phase_base(m)
    for _ in range(k):
        w = w * base
    return w


def _project(y: np.ndarray, w: np.ndarray, conjugate: bool) -> complex:
    """(1/M) sum y_i * w_i, or with conj(w) when ``conjugate``.

    For real readings the two real sums make conj-symmetry bit-exact:
    negating the imaginary sum is a lossless float operation.
    """
    m = y.size
    if np.isrealobj(y):
        re = float(np.sum(y * w.real))
        im = float(np.sum(y * w.imag))
        if conjugate:
            im = -im
        return complex(re, im) / m
    ww = np.conj(w) if conjugate else w
    return complex(np.sum(y * ww)) / m


def _check_readings(readings) -> np.ndarray:
    y = np.asarray(readings)
    if y.ndim != 1 or y.size == 0:
        raise ValueError("readings must be a non-empty 1-d vector")
    return y


def estimate_coefficient(readings, k: int) -> complex:
    """Ordinal-grid estimate of coefficient k from the readings alone."""
    y = _check_readings(readings)
    w = _phase_power(y.size, abs(int(k)))
    return _project(y, w, conjugate=k < 0)


@dataclass(frozen=True)
class CoefficientEstimate:
    """One estimated coefficient with the sample count it averaged over."""

    k: int
    value: complex
    m_used: int

    @classmethod
    def from_readings(cls, readings, k: int) -> "CoefficientEstimate":
        y = _check_readings(readings)
        value = estimate_coefficient(y, k)
        # averaging unit-modulus phases cannot beat the largest reading
        assert abs(value) <= float(np.max(np.abs(y))) + 1e-12
        return cls(k=int(k), value=value, m_used=y.size)


def estimate_field(readings, b: int) -> BandlimitedField:
    """Estimated field over harmonics -b..b.

    No symmetrization step: for real readings the estimator is already
    conjugate-symmetric, exactly.
    """
    y = _check_readings(readings)
    if b < 0:
        raise ValueError("bandwidth must be non-negative")
    m = y.size
    coeffs = np.zeros(2 * b + 1, dtype=complex)
    w = np.ones(m, dtype=complex)
    coeffs[b] = _project(y, w, conjugate=False)
    if b > 0:
        base = _phase_base(m)
        for k in range(1, b + 1):
            w = w * base
            coeffs[b + k] = _project(y, w, conjugate=False)
            coeffs[b - k] = _project(y, w, conjugate=True)
    return BandlimitedField(b=b, coeffs=coeffs)


def riemann_coefficient(field: BandlimitedField, m: int, k: int) -> complex:
    """m-point ordinal-grid approximation of coefficient k from exact field
    values g(i/m); equals a[k] whenever m >= 2b+1 (no aliasing)."""
    if m < 1:
        raise ValueError("grid size must be positive")
    g = np.asarray(field.evaluate(np.arange(1, m + 1) / m))
    w = _phase_power(m, abs(int(k)))
    return _project(g, w, conjugate=k < 0)


def energy_estimate(readings, sigma2: float) -> float:
    """Mean squared reading minus the known noise variance.

    Unbiased for the field energy; small traces can push it negative and
    the value is reported as-is (the detection stopping band tolerates it).
    """
    y = _check_readings(readings)
    if sigma2 < 0:
        raise ValueError("noise variance must be non-negative")
    return float(np.mean(np.abs(y) ** 2) - sigma2)
