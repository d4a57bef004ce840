"""Pure-Python reference kernels.

Selected by :mod:`ftlab._backend` when the compiled extension is not
available.  Every function here must stay behaviourally identical to
its compiled twin; the parity test suite compares them directly.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND_NAME = "python"

# Operation codes shared with the compiled kernel.  Pauli gates and
# identities are frame no-ops and are encoded as OP_NOP.
OP_NOP = 0
OP_H = 1
OP_PHASE = 2
OP_CNOT = 3
OP_SWAP = 4
OP_MEASZ = 5
OP_PREP = 6
OP_CCX = 7
OP_CCZ = 8


def ge2_grid(counts: np.ndarray, probs: np.ndarray) -> np.ndarray:
    """P(two or more faults) for each row of ``probs``.

    ``counts`` has shape (K,) and holds the location count of each
    kind; ``probs`` has shape (G, K) with one failure probability per
    kind per grid point.  Accumulation runs in log space so that
    counts in the thousands at probabilities near 1e-9 lose nothing
    to cancellation.
    """
    counts = np.ascontiguousarray(counts, dtype=np.float64)
    probs = np.ascontiguousarray(probs, dtype=np.float64)
    if counts.ndim != 1 or probs.ndim != 2 or probs.shape[1] != counts.shape[0]:
        raise ValueError("counts must have shape (K,) and probs (G, K)")
    if np.any(counts < 0):
        raise ValueError("negative location count")
    if np.any(probs < 0) or np.any(probs > 1):
        raise ValueError("failure probability outside [0, 1]")

    grid, kinds = probs.shape
    count_row = counts.tolist()
    out = np.empty(grid, dtype=np.float64)
    for g in range(grid):
        prob_row = probs[g].tolist()
        log_none = 0.0
        odds = 0.0
        total = 0.0
        saturated = False
        for k in range(kinds):
            n = count_row[k]
            q = prob_row[k]
            if n == 0.0 or q == 0.0:
                continue
            if q >= 1.0:
                saturated = True
                break
            total += n
            log_none += n * math.log1p(-q)
            odds += n * q / (1.0 - q)
        if saturated:
            out[g] = 1.0
        elif total <= 1.0:
            # At most one possible fault: the event is impossible and
            # the log-space round trip must not manufacture noise.
            out[g] = 0.0
        else:
            value = -math.expm1(log_none + math.log1p(odds))
            out[g] = min(max(value, 0.0), 1.0)
    return out


def propagate_frames(
    code: np.ndarray,
    wire_a: np.ndarray,
    wire_b: np.ndarray,
    x: np.ndarray,
    z: np.ndarray,
    flips: np.ndarray,
    start: np.ndarray,
) -> None:
    """Push a batch of Pauli frames through an operation stream, in place.

    Frame ``i`` enters just before operation ``start[i]``.  Masks are
    one bit per wire (``x``/``z``) or per measurement slot (``flips``),
    so circuits are limited to 64 wires and 64 measurements.
    """
    code = np.ascontiguousarray(code, dtype=np.int32)
    wire_a = np.ascontiguousarray(wire_a, dtype=np.int32)
    wire_b = np.ascontiguousarray(wire_b, dtype=np.int32)
    ops = code.shape[0]
    frames = x.shape[0]
    for i in range(frames):
        fx = int(x[i])
        fz = int(z[i])
        ff = int(flips[i])
        for j in range(int(start[i]), ops):
            op = code[j]
            a = int(wire_a[j])
            bit_a = 1 << a
            if op == OP_CNOT:
                bit_b = 1 << int(wire_b[j])
                if fx & bit_a:
                    fx ^= bit_b
                if fz & bit_b:
                    fz ^= bit_a
            elif op == OP_SWAP:
                bit_b = 1 << int(wire_b[j])
                pair = bit_a | bit_b
                xa, xb = fx & bit_a, fx & bit_b
                if bool(xa) != bool(xb):
                    fx ^= pair
                za, zb = fz & bit_a, fz & bit_b
                if bool(za) != bool(zb):
                    fz ^= pair
            elif op == OP_H:
                xa = fx & bit_a
                za = fz & bit_a
                if bool(xa) != bool(za):
                    fx ^= bit_a
                    fz ^= bit_a
            elif op == OP_PHASE:
                if fx & bit_a:
                    fz ^= bit_a
            elif op == OP_MEASZ:
                if fx & bit_a:
                    ff ^= 1 << int(wire_b[j])
                fx &= ~bit_a
                fz &= ~bit_a
            elif op == OP_PREP:
                fx &= ~bit_a
                fz &= ~bit_a
            elif op == OP_CCX:
                if ff & (1 << int(wire_b[j])):
                    fx ^= bit_a
            elif op == OP_CCZ:
                if ff & (1 << int(wire_b[j])):
                    fz ^= bit_a
        x[i] = fx
        z[i] = fz
        flips[i] = ff
