"""Stochastic trust observations and their expectation margins.

Each round, a receiver gets a value in [0, 1] about every non-self
in-neighbor; the mean sits above 1/2 for legitimate senders and below 1/2
for malicious senders. The default model draws uniformly from a per-role
interval, but any bounded distribution with a known mean fits the contract.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TrustpropError

Interval = tuple[float, float]


def _midpoint(interval: Interval) -> float:
    return (interval[0] + interval[1]) / 2.0


@dataclass(frozen=True)
class TrustObservationModel:
    """Uniform sampling intervals for legitimate and malicious senders."""

    legit_interval: Interval = (0.35, 0.75)
    malicious_interval: Interval = (0.25, 0.65)

    def __post_init__(self):
        for name, (lo, hi) in (
            ("legit_interval", self.legit_interval),
            ("malicious_interval", self.malicious_interval),
        ):
            if not (0.0 <= lo <= hi <= 1.0):
                raise TrustpropError(f"{name} must satisfy 0 <= lo <= hi <= 1")
        if _midpoint(self.legit_interval) <= 0.5:
            raise TrustpropError("legitimate interval midpoint must exceed 1/2")
        if _midpoint(self.malicious_interval) >= 0.5:
            raise TrustpropError("malicious interval midpoint must be below 1/2")

    def interval_for(self, sender_malicious: bool) -> Interval:
        return self.malicious_interval if sender_malicious else self.legit_interval


@dataclass(frozen=True)
class Margins:
    """Expected observation minus 1/2, per sender role."""

    e_l: float  # > 0
    e_m: float  # < 0


DEFAULT_MODEL = TrustObservationModel()


def margins(model: TrustObservationModel) -> Margins:
    return Margins(
        e_l=_midpoint(model.legit_interval) - 0.5,
        e_m=_midpoint(model.malicious_interval) - 0.5,
    )


def sample_alpha(
    model: TrustObservationModel,
    sender_malicious: bool,
    rng: np.random.Generator,
) -> float:
    """One trust observation; draws are independent across calls."""
    lo, hi = model.interval_for(sender_malicious)
    return float(lo + (hi - lo) * rng.random())
