# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; behaviourally identical to ftlab._kernels_py."""

import numpy as np

cimport cython
cimport numpy as cnp
from libc.math cimport expm1, log1p

cnp.import_array()

BACKEND_NAME = "cython"

OP_NOP = 0
OP_H = 1
OP_PHASE = 2
OP_CNOT = 3
OP_SWAP = 4
OP_MEASZ = 5
OP_PREP = 6
OP_CCX = 7
OP_CCZ = 8

DEF C_OP_H = 1
DEF C_OP_PHASE = 2
DEF C_OP_CNOT = 3
DEF C_OP_SWAP = 4
DEF C_OP_MEASZ = 5
DEF C_OP_PREP = 6
DEF C_OP_CCX = 7
DEF C_OP_CCZ = 8


def ge2_grid(counts, probs):
    """P(two or more faults) for each row of ``probs``; see the pure twin."""
    counts_arr = np.ascontiguousarray(counts, dtype=np.float64)
    probs_arr = np.ascontiguousarray(probs, dtype=np.float64)
    if counts_arr.ndim != 1 or probs_arr.ndim != 2 or probs_arr.shape[1] != counts_arr.shape[0]:
        raise ValueError("counts must have shape (K,) and probs (G, K)")
    if np.any(counts_arr < 0):
        raise ValueError("negative location count")
    if np.any(probs_arr < 0) or np.any(probs_arr > 1):
        raise ValueError("failure probability outside [0, 1]")

    cdef double[::1] cview = counts_arr
    cdef double[:, ::1] pview = probs_arr
    cdef Py_ssize_t grid = pview.shape[0]
    cdef Py_ssize_t kinds = pview.shape[1]
    out_arr = np.empty(grid, dtype=np.float64)
    cdef double[::1] out = out_arr

    cdef Py_ssize_t g, k
    cdef double n, q, log_none, odds, total, value
    cdef bint saturated
    for g in range(grid):
        log_none = 0.0
        odds = 0.0
        total = 0.0
        saturated = False
        for k in range(kinds):
            n = cview[k]
            q = pview[g, k]
            if n == 0.0 or q == 0.0:
                continue
            if q >= 1.0:
                saturated = True
                break
            total += n
            log_none += n * log1p(-q)
            odds += n * q / (1.0 - q)
        if saturated:
            out[g] = 1.0
        elif total <= 1.0:
            out[g] = 0.0
        else:
            value = -expm1(log_none + log1p(odds))
            if value < 0.0:
                value = 0.0
            elif value > 1.0:
                value = 1.0
            out[g] = value
    return out_arr


def propagate_frames(code, wire_a, wire_b, x, z, flips, start):
    """Batch Pauli-frame propagation, in place; see the pure twin."""
    code_arr = np.ascontiguousarray(code, dtype=np.int32)
    a_arr = np.ascontiguousarray(wire_a, dtype=np.int32)
    b_arr = np.ascontiguousarray(wire_b, dtype=np.int32)

    cdef int[::1] cview = code_arr
    cdef int[::1] aview = a_arr
    cdef int[::1] bview = b_arr
    cdef cnp.uint64_t[::1] xview = x
    cdef cnp.uint64_t[::1] zview = z
    cdef cnp.uint64_t[::1] fview = flips
    cdef cnp.int64_t[::1] sview = start

    cdef Py_ssize_t ops = cview.shape[0]
    cdef Py_ssize_t frames = xview.shape[0]
    cdef Py_ssize_t i, j
    cdef int op
    cdef cnp.uint64_t fx, fz, ff, bit_a, bit_b, pair, one = 1
    for i in range(frames):
        fx = xview[i]
        fz = zview[i]
        ff = fview[i]
        for j in range(sview[i], ops):
            op = cview[j]
            bit_a = one << <cnp.uint64_t>aview[j]
            if op == C_OP_CNOT:
                bit_b = one << <cnp.uint64_t>bview[j]
                if fx & bit_a:
                    fx ^= bit_b
                if fz & bit_b:
                    fz ^= bit_a
            elif op == C_OP_SWAP:
                bit_b = one << <cnp.uint64_t>bview[j]
                pair = bit_a | bit_b
                if ((fx & bit_a) != 0) != ((fx & bit_b) != 0):
                    fx ^= pair
                if ((fz & bit_a) != 0) != ((fz & bit_b) != 0):
                    fz ^= pair
            elif op == C_OP_H:
                if ((fx & bit_a) != 0) != ((fz & bit_a) != 0):
                    fx ^= bit_a
                    fz ^= bit_a
            elif op == C_OP_PHASE:
                if fx & bit_a:
                    fz ^= bit_a
            elif op == C_OP_MEASZ:
                if fx & bit_a:
                    ff ^= one << <cnp.uint64_t>bview[j]
                fx &= ~bit_a
                fz &= ~bit_a
            elif op == C_OP_PREP:
                fx &= ~bit_a
                fz &= ~bit_a
            elif op == C_OP_CCX:
                if ff & (one << <cnp.uint64_t>bview[j]):
                    fx ^= bit_a
            elif op == C_OP_CCZ:
                if ff & (one << <cnp.uint64_t>bview[j]):
                    fz ^= bit_a
        xview[i] = fx
        zview[i] = fz
        fview[i] = ff
