"""Pseudothreshold and threshold estimation for concatenated exRecs.

The level-n pseudothreshold is the physical two-qubit failure
probability at which concatenating to level n stops paying for
itself.  It is found as the root of

    g(p) = p_nT(p) - ref(p)

where ``p_nT`` is the level-n T-gadget exRec failure and ``ref`` is
the failure of the same level-1 T-gadget with its memory locations
removed: concatenation replaces idle physical qubits with actively
corrected blocks, so the fair unencoded competitor does not pay
storage noise.  When ``Rm`` is exactly zero the comparison drops both
storage and readout location classes at every level and compares gate
locations only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from ftlab import _backend
from ftlab.census import CensusSet, ExRecCensus, LocationKind, count_at, paper_census
from ftlab.failure_model import KIND_ORDER

P_MIN = 1e-9
P_MAX = 1e-3
SCAN_POINTS = 200
BRACKET_RTOL = 1e-13
MAX_ITERATIONS = 200

GADGET_ORDER = ("memory", "swap", "tgate", "readout")
_T_COLUMN = GADGET_ORDER.index("tgate")

DEFAULT_SWEEP_RANGES: dict[str, tuple[float, float]] = {
    "rm": (1e-3, 1.0),
    "rr": (1e-1, 1e2),
    "tr": (1.0, 1e3),
}


class NoThresholdError(RuntimeError):
    """Raised when the comparison never changes sign over the scan range."""


class Ratios(NamedTuple):
    """Noise ratios relative to the two-qubit gate rate, plus latency."""

    rm: float
    rr: float
    tr: float


@dataclass(frozen=True)
class ThresholdResult:
    level: int
    ratios: Ratios
    threshold: float
    bracket: tuple[float, float]
    iterations: int
    residual: float
    multiple_crossings: bool = False


@dataclass(frozen=True)
class SweepRow:
    value: float
    result: Optional[ThresholdResult]
    error: Optional[str] = None


@dataclass(frozen=True)
class SweepTable:
    varied: str
    rows: tuple[SweepRow, ...]


@dataclass(frozen=True)
class CurveTable:
    """T-gadget exRec failure on a grid of physical rates, per level."""

    p_grid: np.ndarray
    levels: tuple[int, ...]
    values: np.ndarray  # shape (len(p_grid), len(levels))


def _check_ratios(ratios: Ratios) -> Ratios:
    ratios = Ratios(*ratios)
    if ratios.rm < 0 or ratios.rr < 0 or ratios.tr < 0:
        raise ValueError(f"ratios must be nonnegative, got {ratios}")
    return ratios


def _active_mask(rm: float) -> np.ndarray:
    """Location kinds participating in the comparison model."""
    if rm == 0.0:
        keep = {LocationKind.Swap, LocationKind.TGate}
    else:
        keep = set(KIND_ORDER)
    return np.array([1.0 if k in keep else 0.0 for k in KIND_ORDER])


def _count_vector(census: ExRecCensus, t_r: float) -> np.ndarray:
    return np.array([count_at(census, k, t_r) for k in KIND_ORDER], dtype=np.float64)


def _level1_probs(p_grid: np.ndarray, ratios: Ratios, mask: np.ndarray) -> np.ndarray:
    scale = np.array([ratios.rm, 1.0, 0.0, ratios.rr], dtype=np.float64)
    return p_grid[:, None] * (scale * mask)[None, :]


def _recurse_grid(
    p_grid: np.ndarray,
    ratios: Ratios,
    censuses: CensusSet,
    n: int,
    mask: np.ndarray,
    record: Sequence[int] = (),
) -> tuple[np.ndarray, dict[int, np.ndarray]]:
    """Per-gadget failure matrix at level ``n`` over a grid of rates.

    Returns the final (G, 4) matrix plus the T column at each level
    listed in ``record``.  Iteration stops early at a bitwise fixed
    point; later levels are then copies of the converged vector.
    """
    counts1 = {
        g: _count_vector(censuses.level1[g], ratios.tr) * mask for g in GADGET_ORDER
    }
    countsn = {
        g: _count_vector(censuses.leveln[g], 0.0) * mask for g in GADGET_ORDER
    }
    probs = _level1_probs(p_grid, ratios, mask)
    current = np.column_stack(
        [_backend.ge2_grid(counts1[g], probs) for g in GADGET_ORDER]
    )
    snapshots: dict[int, np.ndarray] = {}
    if 1 in record:
        snapshots[1] = current[:, _T_COLUMN].copy()
    converged = False
    for level in range(2, n + 1):
        if not converged:
            nxt = np.column_stack(
                [_backend.ge2_grid(countsn[g], current) for g in GADGET_ORDER]
            )
            if np.array_equal(nxt, current):
                converged = True
            current = nxt
        if level in record:
            snapshots[level] = current[:, _T_COLUMN].copy()
    return current, snapshots


def _reference_failure(
    p_grid: np.ndarray, ratios: Ratios, censuses: CensusSet, mask: np.ndarray
) -> np.ndarray:
    """Failure of the unencoded competitor: level-1 T row, storage-free."""
    ref_mask = mask.copy()
    ref_mask[KIND_ORDER.index(LocationKind.Memory)] = 0.0
    counts = _count_vector(censuses.level1["tgate"], ratios.tr) * ref_mask
    probs = _level1_probs(p_grid, ratios, mask)
    return _backend.ge2_grid(counts, probs)


def _comparison(
    p_grid: np.ndarray, ratios: Ratios, censuses: CensusSet, n: int, mask: np.ndarray
) -> np.ndarray:
    matrix, _ = _recurse_grid(p_grid, ratios, censuses, n, mask)
    return matrix[:, _T_COLUMN] - _reference_failure(p_grid, ratios, censuses, mask)


def level_threshold(
    ratios: Ratios, n: int, censuses: Optional[CensusSet] = None
) -> ThresholdResult:
    """Root of the level-``n`` comparison over [1e-9, 1e-3].

    Scans a fixed 200-point logarithmic grid for sign changes, then
    bisects the first crossing with geometric midpoints.  Several sign
    changes set ``multiple_crossings`` and resolve the smallest root.
    """
    ratios = _check_ratios(ratios)
    if n < 2:
        raise ValueError(f"threshold level must be at least 2, got {n}")
    censuses = censuses if censuses is not None else paper_census()
    mask = _active_mask(ratios.rm)

    scan = np.logspace(math.log10(P_MIN), math.log10(P_MAX), SCAN_POINTS)
    values = _comparison(scan, ratios, censuses, n, mask)

    crossings = [
        i
        for i in range(1, len(scan))
        if (values[i - 1] < 0.0) != (values[i] < 0.0)
    ]
    brackets = [i for i in crossings if values[i - 1] < 0.0 <= values[i]]
    if not brackets:
        raise NoThresholdError("no threshold in range")

    first = brackets[0]
    lo, hi = float(scan[first - 1]), float(scan[first])
    iterations = 0
    while hi - lo > BRACKET_RTOL * math.sqrt(lo * hi) and iterations < MAX_ITERATIONS:
        mid = math.sqrt(lo * hi)
        g_mid = float(
            _comparison(np.array([mid]), ratios, censuses, n, mask)[0]
        )
        if g_mid < 0.0:
            lo = mid
        else:
            hi = mid
        iterations += 1

    threshold = math.sqrt(lo * hi)
    residual = float(
        _comparison(np.array([threshold]), ratios, censuses, n, mask)[0]
    )
    return ThresholdResult(
        level=n,
        ratios=ratios,
        threshold=threshold,
        bracket=(lo, hi),
        iterations=iterations,
        residual=residual,
        multiple_crossings=len(crossings) > 1,
    )


def asymptotic_threshold(
    ratios: Ratios, censuses: Optional[CensusSet] = None, level: int = 100
) -> ThresholdResult:
    """Threshold proxy at a depth where the recursion has saturated."""
    return level_threshold(ratios, level, censuses)


def failure_curve(
    ratios: Ratios,
    levels: Sequence[int],
    p_grid: Sequence[float],
    censuses: Optional[CensusSet] = None,
) -> CurveTable:
    """T-gadget exRec failure at each requested level over ``p_grid``.

    This evaluates the literal failure model with every location kind
    active; the storage-free comparison applies only to thresholds.
    """
    ratios = _check_ratios(ratios)
    levels = tuple(int(v) for v in levels)
    if not levels:
        raise ValueError("at least one level is required")
    if any(v < 1 for v in levels):
        raise ValueError(f"levels must be at least 1, got {levels}")
    grid = np.asarray(list(p_grid), dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("p_grid must be a nonempty sequence")
    if np.any(grid <= 0.0) or np.any(grid > 1e-2):
        raise ValueError("p_grid values must lie in (0, 1e-2]")

    mask = np.ones(len(KIND_ORDER), dtype=np.float64)
    _, snapshots = _recurse_grid(
        grid, ratios, censuses if censuses is not None else paper_census(),
        max(levels), mask, record=sorted(set(levels)),
    )
    values = np.column_stack([snapshots[v] for v in levels])
    return CurveTable(p_grid=grid, levels=levels, values=values)


def sweep(
    varied: str,
    lo: Optional[float] = None,
    hi: Optional[float] = None,
    points: int = 20,
    ratios: Ratios = Ratios(0.1, 1.0, 10.0),
    n: int = 100,
    censuses: Optional[CensusSet] = None,
) -> SweepTable:
    """Threshold as one ratio varies log-spaced over [lo, hi].

    Points where no sign change exists are recorded in their row
    rather than aborting the sweep.
    """
    if varied not in DEFAULT_SWEEP_RANGES:
        raise ValueError(f"unknown sweep parameter {varied!r}")
    default_lo, default_hi = DEFAULT_SWEEP_RANGES[varied]
    lo = default_lo if lo is None else float(lo)
    hi = default_hi if hi is None else float(hi)
    if points < 2:
        raise ValueError(f"points must be at least 2, got {points}")
    if lo <= 0:
        raise ValueError(f"sweep range must be positive, got lo={lo}")
    if hi <= lo:
        raise ValueError(f"sweep range must be increasing, got [{lo}, {hi}]")

    ratios = _check_ratios(ratios)
    rows = []
    for value in np.logspace(math.log10(lo), math.log10(hi), points):
        point = ratios._replace(**{varied: float(value)})
        try:
            result = level_threshold(point, n, censuses)
            rows.append(SweepRow(value=float(value), result=result))
        except NoThresholdError as exc:
            rows.append(SweepRow(value=float(value), result=None, error=str(exc)))
    return SweepTable(varied=varied, rows=tuple(rows))
