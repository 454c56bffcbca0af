"""Bandwidth detection for fields of unknown harmonic extent.

Scan B = 0, 1, 2, ...: estimate coefficients +-B, zero out any whose
magnitude does not strictly exceed delta - n^(-1/3), and stop at the first
B where the accumulated kept energy lands within +-delta^2/2 of the energy
estimate computed from the readings.  Both the shrinkage term and the
stopping half-width can be overridden in the config; the defaults are the
standard choices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .estimator import _phase_base, _project, energy_estimate


@dataclass(frozen=True)
class BandwidthConfig:
    delta: float
    sigma2: float
    n: int
    b_max: int = 64
    shrink: float | None = None  # override for the n^(-1/3) threshold shrinkage
    stop_halfwidth: float | None = None  # override for the delta^2/2 stopping band

    def __post_init__(self) -> None:
        if self.delta <= 0:
            raise ConfigError("delta must be positive")
        if self.sigma2 < 0:
            raise ConfigError("sigma2 must be non-negative")
        if int(self.n) != self.n or self.n < 1:
            raise ConfigError("n must be a positive integer")
        object.__setattr__(self, "n", int(self.n))
        if int(self.b_max) != self.b_max or self.b_max < 0:
            raise ConfigError("b_max must be a non-negative integer")
        object.__setattr__(self, "b_max", int(self.b_max))

    @property
    def threshold(self) -> float:
        shrink = self.n ** (-1.0 / 3.0) if self.shrink is None else self.shrink
        return self.delta - shrink

    @property
    def band(self) -> float:
        return 0.5 * self.delta**2 if self.stop_halfwidth is None else self.stop_halfwidth

    def validate_runnable(self) -> None:
        if self.threshold <= 0:
            raise ConfigError(
                f"threshold delta - n**(-1/3) = {self.threshold:.6g} is not positive; "
                f"need n >= (1/delta)**3 = {(1.0 / self.delta) ** 3:.6g}"
            )


def threshold_coefficient(value: complex, config: BandwidthConfig) -> complex:
    """Keep the value only when |value| strictly exceeds the threshold;
    ties are zeroed."""
    value = complex(value)
    return value if abs(value) > config.threshold else 0j


@dataclass(frozen=True)
class DetectionOutcome:
    """Result of one detection run.

    kept_coeffs covers k = -B..B for the final B reached (the stopping B,
    or b_max when the cap was hit); stop_residual is the signed gap
    sum |kept|^2 - E_g at that point.
    """

    status: str  # "Stopped" | "CapReached"
    detected_b: int | None
    kept_coeffs: np.ndarray
    energy_est: float
    stop_residual: float

    def __post_init__(self) -> None:
        c = np.array(self.kept_coeffs, dtype=complex)
        c.setflags(write=False)
        object.__setattr__(self, "kept_coeffs", c)

    @property
    def b_scanned(self) -> int:
        return int(self.kept_coeffs.size // 2)

    def kept(self, k: int) -> complex:
        """Thresholded coefficient at k (zero outside the scanned range)."""
        half = self.b_scanned
        if abs(k) > half:
            return 0j
        return complex(self.kept_coeffs[half + k])

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "detected_b": self.detected_b,
            "energy_estimate": self.energy_est,
            "stop_residual": self.stop_residual,
            "kept_coeffs": [[float(c.real), float(c.imag)] for c in self.kept_coeffs],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DetectionOutcome":
        coeffs = np.array([complex(re, im) for re, im in data["kept_coeffs"]])
        return cls(
            status=str(data["status"]),
            detected_b=None if data["detected_b"] is None else int(data["detected_b"]),
            kept_coeffs=coeffs,
            energy_est=float(data["energy_estimate"]),
            stop_residual=float(data["stop_residual"]),
        )


def detect_bandwidth(readings, config: BandwidthConfig) -> DetectionOutcome:
    """Run the scan on one vector of readings."""
    config.validate_runnable()
    y = np.asarray(readings)
    if y.ndim != 1 or y.size == 0:
        raise ValueError("readings must be a non-empty 1-d vector")
    m = y.size
    e_g = energy_estimate(y, config.sigma2)
    band = config.band

    base = _phase_base(m)
    w = np.ones(m, dtype=complex)
    kept_pos: list[complex] = []  # k = 1..B
    kept_neg: list[complex] = []  # k = -1..-B
    kept_zero = 0j
    total = 0.0
    for scan_b in range(config.b_max + 1):
        if scan_b == 0:
            kept_zero = threshold_coefficient(_project(y, w, conjugate=False), config)
            total += abs(kept_zero) ** 2
        else:
            w = w * base
            kp = threshold_coefficient(_project(y, w, conjugate=False), config)
            kn = threshold_coefficient(_project(y, w, conjugate=True), config)
            kept_pos.append(kp)
            kept_neg.append(kn)
            total += abs(kp) ** 2 + abs(kn) ** 2
        residual = total - e_g
        if -band <= residual <= band:
            return DetectionOutcome(
                status="Stopped",
                detected_b=scan_b,
                kept_coeffs=_assemble(kept_zero, kept_pos, kept_neg),
                energy_est=e_g,
                stop_residual=residual,
            )
    return DetectionOutcome(
        status="CapReached",
        detected_b=None,
        kept_coeffs=_assemble(kept_zero, kept_pos, kept_neg),
        energy_est=e_g,
        stop_residual=total - e_g,
    )


def _assemble(kept_zero: complex, kept_pos: list[complex], kept_neg: list[complex]) -> np.ndarray:
    half = len(kept_pos)
    coeffs = np.zeros(2 * half + 1, dtype=complex)
    coeffs[half] = kept_zero
    for k in range(1, half + 1):
        coeffs[half + k] = kept_pos[k - 1]
        coeffs[half - k] = kept_neg[k - 1]
    return coeffs
