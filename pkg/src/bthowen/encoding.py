"""Gaussian thermometer encoding.

Each feature is modelled as a normal distribution fitted to the training data.
Its ``t`` thresholds sit at the boundaries of ``t + 1`` equal-probability
regions, so resolution is concentrated around the mean.
"""
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

_STANDARD_NORMAL = NormalDist()


def gaussian_quantiles(t: int) -> np.ndarray:
    """Standard-normal quantiles at i / (t + 1) for i = 1..t."""
    return np.array([_STANDARD_NORMAL.inv_cdf(i / (t + 1)) for i in range(1, t + 1)])


@dataclass(frozen=True)
class ThermometerEncoder:
    thresholds: np.ndarray  # (feature_count, bits_per_input), float64, rows ascending

    def __post_init__(self):
        th = np.asarray(self.thresholds, dtype=np.float64)
        if th.ndim != 2 or th.shape[0] < 1 or th.shape[1] < 1:
            raise ValueError(f"thresholds must be a non-empty 2-D matrix, got shape {th.shape}")
        if np.any(np.diff(th, axis=1) < 0):
            raise ValueError("threshold rows must be non-decreasing")
        th.setflags(write=False)
        object.__setattr__(self, "thresholds", th)

    @property
    def feature_count(self) -> int:
        return self.thresholds.shape[0]

    @property
    def bits_per_input(self) -> int:
        return self.thresholds.shape[1]

    @property
    def encoded_bits(self) -> int:
        return self.feature_count * self.bits_per_input

    @classmethod
    def fit(cls, features, bits_per_input: int) -> "ThermometerEncoder":
        """Fit per-feature mean/std (population form) and place the thresholds."""
        x = np.asarray(features, dtype=np.float64)
        if x.ndim != 2 or x.shape[0] == 0:
            raise ValueError("training features must be a non-empty (samples, features) matrix")
        if x.shape[0] < 2:
            raise ValueError("need at least 2 samples to fit a thermometer encoder")
        if bits_per_input < 1:
            raise ValueError(f"bits_per_input must be >= 1, got {bits_per_input}")
        if not np.all(np.isfinite(x)):
            raise ValueError("training features contain non-finite values")
        mean = x.mean(axis=0)
        std = x.std(axis=0)
        q = gaussian_quantiles(bits_per_input)
        return cls(mean[:, None] + std[:, None] * q[None, :])

    def encode(self, sample) -> np.ndarray:
        """Encode one sample into a uint8 bit vector of length F * t."""
        x = np.asarray(sample, dtype=np.float64)
        if x.shape != (self.feature_count,):
            raise ValueError(f"expected {self.feature_count} features, got shape {x.shape}")
        return self.encode_batch(x[None, :])[0]

    def encode_batch(self, samples) -> np.ndarray:
        x = np.asarray(samples, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.feature_count:
            raise ValueError(f"expected (samples, {self.feature_count}) features, got shape {x.shape}")
        bits = x[:, :, None] > self.thresholds[None, :, :]
        return bits.reshape(x.shape[0], -1).astype(np.uint8)
