"""Failure probabilities for extended rectangles under concatenation.

An exRec fails only when two or more of its locations fault, so the
model assigns each gadget the probability of that event.  Level-1
locations fault at rates set by the physical parameters; at higher
levels the location failure probabilities are the gadget failure
probabilities of the level below.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ftlab import _backend
from ftlab.census import CensusSet, ExRecCensus, LocationKind, count_at

# Kind order used to vectorize count/probability mappings.
KIND_ORDER: tuple[LocationKind, ...] = (
    LocationKind.Memory,
    LocationKind.Swap,
    LocationKind.TGate,
    LocationKind.Readout,
)

# Gadget label at level k whose failure feeds each location kind at
# level k+1.
_KIND_TO_GADGET: Mapping[LocationKind, str] = {
    LocationKind.Memory: "memory",
    LocationKind.Swap: "swap",
    LocationKind.TGate: "tgate",
    LocationKind.Readout: "readout",
}


@dataclass(frozen=True)
class PhysicalSetting:
    """Physical noise parameters.

    ``p0S`` is the two-qubit gate failure probability; memory and
    readout rates are expressed relative to it (``Rm``, ``Rr``); and
    ``tr`` is the readout latency in gate steps.
    """

    p0S: float
    Rm: float
    Rr: float
    tr: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.p0S <= 1.0:
            raise ValueError(f"p0S must lie in [0, 1], got {self.p0S}")
        if self.Rm < 0:
            raise ValueError(f"Rm must be nonnegative, got {self.Rm}")
        if self.Rr < 0:
            raise ValueError(f"Rr must be nonnegative, got {self.Rr}")
        if self.tr < 0:
            raise ValueError(f"tr must be nonnegative, got {self.tr}")


@dataclass(frozen=True)
class FailureVector:
    """Per-gadget failure probabilities at one concatenation level."""

    level: int
    probs: Mapping[LocationKind, float]

    def __post_init__(self) -> None:
        if self.level < 1:
            raise ValueError(f"level must be at least 1, got {self.level}")
        object.__setattr__(self, "probs", dict(self.probs))


def _vectorize(mapping: Mapping[LocationKind, float]) -> np.ndarray:
    return np.array([float(mapping.get(k, 0.0)) for k in KIND_ORDER], dtype=np.float64)


def gadget_failure(
    counts: Mapping[LocationKind, float],
    probs: Mapping[LocationKind, float],
) -> float:
    """Probability that at least two locations fault.

    ``counts`` gives the number of locations of each kind and
    ``probs`` their individual failure probabilities.  Kinds missing
    from either mapping contribute nothing.  Counts may be fractional;
    a total possible-fault count of at most one yields exactly zero.
    """
    for kind, n in counts.items():
        if n < 0:
            raise ValueError(f"negative count for {kind.value}: {n}")
    for kind, q in probs.items():
        if not 0.0 <= q <= 1.0:
            raise ValueError(f"probability for {kind.value} outside [0, 1]: {q}")
    count_vec = _vectorize(counts)
    prob_vec = _vectorize(probs).reshape(1, -1)
    return float(_backend.ge2_grid(count_vec, prob_vec)[0])


def location_probs(setting: PhysicalSetting) -> dict[LocationKind, float]:
    """Physical failure probability of each level-1 location kind."""
    return {
        LocationKind.Memory: setting.Rm * setting.p0S,
        LocationKind.Swap: setting.p0S,
        LocationKind.Readout: setting.Rr * setting.p0S,
    }


def _counts_at(census: ExRecCensus, t_r: float) -> dict[LocationKind, float]:
    return {kind: count_at(census, kind, t_r) for kind in census.counts}


def level1_failures(setting: PhysicalSetting, censuses: CensusSet) -> FailureVector:
    """Failure probability of each level-1 exRec."""
    probs = location_probs(setting)
    vector = {
        kind: gadget_failure(_counts_at(censuses.level1[gadget], setting.tr), probs)
        for kind, gadget in _KIND_TO_GADGET.items()
    }
    return FailureVector(level=1, probs=vector)


def recurse_failures(setting: PhysicalSetting, censuses: CensusSet, n: int) -> FailureVector:
    """Failure probability of each exRec at concatenation level ``n``.

    Iterates the level map from level 1.  Once two consecutive vectors
    agree bit for bit the remaining levels cannot change anything, so
    the fixed point is returned immediately; results stay identical to
    running the full recursion.
    """
    if n < 1:
        raise ValueError(f"level must be at least 1, got {n}")
    vector = level1_failures(setting, censuses)
    for level in range(2, n + 1):
        nxt = {
            kind: gadget_failure(
                _counts_at(censuses.leveln[gadget], 0.0), vector.probs
            )
            for kind, gadget in _KIND_TO_GADGET.items()
        }
        if nxt == vector.probs:
            return FailureVector(level=n, probs=nxt)
        vector = FailureVector(level=level, probs=nxt)
    return FailureVector(level=n, probs=dict(vector.probs))


def mc_oracle(
    counts: Mapping[LocationKind, int],
    probs: Mapping[LocationKind, float],
    samples: int,
    seed: int,
) -> tuple[float, float]:
    """Monte Carlo estimate of :func:`gadget_failure` with its standard error.

    Requires integer counts; the analytic model allows fractional ones
    but there is no way to draw half a location.
    """
    if samples < 1:
        raise ValueError(f"samples must be positive, got {samples}")
    clean: dict[LocationKind, int] = {}
    for kind, n in counts.items():
        if isinstance(n, bool) or float(n) != int(n):
            raise ValueError(f"count for {kind.value} must be an integer, got {n!r}")
        if n < 0:
            raise ValueError(f"negative count for {kind.value}: {n}")
        clean[kind] = int(n)
    for kind, q in probs.items():
        if not 0.0 <= q <= 1.0:
            raise ValueError(f"probability for {kind.value} outside [0, 1]: {q}")

    rng = np.random.Generator(np.random.PCG64(seed))
    faults = np.zeros(samples, dtype=np.int64)
    for kind, n in clean.items():
        q = float(probs.get(kind, 0.0))
        if n == 0 or q == 0.0:
            continue
        faults += rng.binomial(n, q, size=samples)
    hits = np.count_nonzero(faults >= 2)
    estimate = hits / samples
    stderr = float(np.sqrt(estimate * (1.0 - estimate) / samples))
    return float(estimate), stderr
