"""Periodic bandlimited fields on [0, 1).

A field is g(x) = sum_{k=-b..b} a[k] exp(j 2 pi k x), stored as the dense
coefficient vector a[-b..b].  Conjugate-symmetric coefficients make g
real-valued; that is the case of interest, but complex-valued fields are
supported everywhere except the real-output fast path of ``evaluate``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# Grid resolution for sup-norm checks.  8192 points resolve every harmonic
# up to b = 64 with plenty of margin.
DENSE_GRID = 8192


@dataclass(frozen=True)
class BandlimitedField:
    """Coefficient vector ``coeffs`` ordered k = -b..b."""

    b: int
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        if int(self.b) != self.b or self.b < 0:
            raise ValueError("bandwidth must be a non-negative integer")
        object.__setattr__(self, "b", int(self.b))
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size != 2 * self.b + 1:
            raise ValueError(
                f"need {2 * self.b + 1} coefficients for bandwidth {self.b}, got shape {c.shape}"
            )
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def coefficient(self, k: int) -> complex:
        """a[k], with harmonics outside -b..b read as zero."""
        if abs(k) > self.b:
            return 0j
        return complex(self.coeffs[self.b + k])

    @property
    def is_real(self) -> bool:
        """True when the coefficients are exactly conjugate-symmetric."""
        return bool(np.array_equal(self.coeffs[::-1], np.conj(self.coeffs)))

    def evaluate(self, x):
        """Field value(s) at x (period 1).

        Returns a real array for conjugate-symmetric fields (the residual
        imaginary part is checked against 1e-9 and dropped), complex
        otherwise.  Scalar input gives scalar output.
        """
        x = np.asarray(x, dtype=float)
        e1 = np.exp(2j * np.pi * x)
        val = np.full(x.shape, self.coefficient(0), dtype=complex)
        ek = np.ones_like(e1)
        for k in range(1, self.b + 1):
            ek = ek * e1
            val += self.coeffs[self.b + k] * ek + self.coeffs[self.b - k] * np.conj(ek)
        if self.is_real:
            assert np.max(np.abs(val.imag), initial=0.0) < 1e-9
            val = val.real
        return val[()] if val.ndim == 0 else val

    def dynamic_range(self, grid: int = DENSE_GRID) -> float:
        """sup |g(x)| probed on a dense uniform grid."""
        x = np.arange(grid) / grid
        return float(np.max(np.abs(self.evaluate(x))))

    def derivative_bound(self) -> float:
        """Upper bound on sup |g'(x)|: 2 pi b sup|g| for bandwidth-b fields."""
        return 2.0 * np.pi * self.b * self.dynamic_range()

    def energy(self) -> float:
        """Integral of |g|^2 over one period = sum |a[k]|^2."""
        return float(np.sum(np.abs(self.coeffs) ** 2))

    # serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "b": self.b,
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BandlimitedField":
        try:
            b = int(data["b"])
            pairs = data["coeffs"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"field record must carry 'b' and 'coeffs': {exc}")
        coeffs = np.array([complex(re, im) for re, im in pairs])
        return cls(b=b, coeffs=coeffs)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), sort_keys=True) + "\n")

    @classmethod
    def load(cls, path) -> "BandlimitedField":
        return cls.from_dict(json.loads(Path(path).read_text()))


def distortion(truth: BandlimitedField, estimate) -> float:
    """Sum of squared coefficient errors over the union of harmonic ranges.

    ``estimate`` is a BandlimitedField or an odd-length coefficient vector
    over -B..B; harmonics absent from either side count as zero.
    """
    if isinstance(estimate, BandlimitedField):
        other = estimate.coeffs
    else:
        other = np.asarray(estimate, dtype=complex)
    if other.ndim != 1 or other.size % 2 == 0:
        raise ValueError("estimate must be an odd-length coefficient vector over -B..B")
    bb = other.size // 2
    width = max(bb, truth.b)
    a = np.zeros(2 * width + 1, dtype=complex)
    a[width - truth.b : width + truth.b + 1] = truth.coeffs
    ahat = np.zeros(2 * width + 1, dtype=complex)
    ahat[width - bb : width + bb + 1] = other
    return float(np.sum(np.abs(ahat - a) ** 2))


def random_field(b: int, seed: int) -> BandlimitedField:
    """Conjugate-symmetric field with Uniform[-1,1] coefficient draws.

    a[0] is real; Re/Im of a[1..b] are i.i.d. Uniform[-1,1]; a[-k] mirrors
    conj(a[k]).  All coefficients are then scaled by 1/max(1, sup|g|) so the
    dynamic range stays within [-1, 1].
    """
    rng = np.random.Generator(np.random.Philox(key=seed & ((1 << 64) - 1)))
    coeffs = np.zeros(2 * b + 1, dtype=complex)
    coeffs[b] = rng.uniform(-1.0, 1.0)
    for k in range(1, b + 1):
        re, im = rng.uniform(-1.0, 1.0, size=2)
        coeffs[b + k] = complex(re, im)
        coeffs[b - k] = complex(re, -im)
    field = BandlimitedField(b=b, coeffs=coeffs)
    peak = field.dynamic_range()
    if peak > 1.0:
        field = BandlimitedField(b=b, coeffs=coeffs / peak)
    return field


# Built-in benchmark coefficient sets (conjugate-mirrored to real fields).
# Selector names match the CLI tokens.
REFERENCE_COEFFS = {
    "paper1": {0: 0.2445 + 0j, 1: -0.0357 + 0.0478j, 2: 0.0978 + 0.0729j, 3: -0.1796 - 0.0756j},
    "paper2": {0: 0.1 + 0j, 1: -0.1 + 0j, 12: 0.1 + 0j},
}


def reference_field(name: str) -> BandlimitedField:
    """One of the built-in benchmark fields ('paper1', 'paper2')."""
    try:
        table = REFERENCE_COEFFS[name]
    except KeyError:
        raise ValueError(f"unknown reference field {name!r}; choose from {sorted(REFERENCE_COEFFS)}")
    b = max(table)
    coeffs = np.zeros(2 * b + 1, dtype=complex)
    for k, v in table.items():
        coeffs[b + k] = v
        coeffs[b - k] = np.conj(v)
    return BandlimitedField(b=b, coeffs=coeffs)
