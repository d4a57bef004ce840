"""Fault-path verification for lattice circuits.

Checks that no single component fault in an assembled circuit leaves
more than one error on any code block.  Faults are pushed through the
circuit as Pauli frames (the compiled kernel does the heavy lifting),
recoveries are decoded from the frame's measurement flips exactly as
the classical controller would decode them, and the surviving frame is
weighed block by block modulo the stabilizer group.

Corrections are tracked in the Pauli frame rather than applied as
physical gates, so recovery itself contributes no fault locations.
Non-Clifford rotations and classically controlled phase gates fall
outside the Pauli-frame calculus and are refused.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from . import _backend
from .lattice_circuits import (
    BLOCK_SIZE,
    ENCODE_LAYERS,
    X_LOGICAL,
    X_STABILIZERS,
    Z_LOGICAL,
    Z_STABILIZERS,
    Circuit,
    OpKind,
    Operation,
    QubitRole,
    RecoveryHook,
    Site,
    assemble_exrec,
    build_decode,
    build_encode,
    build_mesh,
    build_single_error_swap,
    build_unmesh,
)

__all__ = [
    "UnsupportedOperationError",
    "PauliOperator",
    "StabilizerTableau",
    "SimulationResult",
    "simulate_stabilizer",
    "FaultSite",
    "enumerate_single_faults",
    "propagate_pauli",
    "RecoveryTable",
    "build_recovery_table",
    "FaultRecord",
    "FaultReport",
    "verify_single_fault_tolerance",
    "COMPONENTS",
    "verify_component",
]


class UnsupportedOperationError(ValueError):
    """The circuit contains an operation outside the verifiable fragment."""


# ---------------------------------------------------------------------------
# Pauli operators

_SINGLE = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}

_I2 = np.eye(2, dtype=complex)
_X2 = np.array([[0, 1], [1, 0]], dtype=complex)
_Z2 = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class PauliOperator:
    """An n-wire Pauli as X and Z bit masks with a power-of-i phase.

    The operator is ``i**phase * X(x) * Z(z)`` with all X factors to
    the left of all Z factors; bit q of each mask addresses wire q.
    """

    n: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"need at least one wire, got {self.n}")
        full = (1 << self.n) - 1
        if self.x & ~full or self.z & ~full:
            raise ValueError("mask exceeds the declared wire count")
        object.__setattr__(self, "phase", self.phase % 4)

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def commutes(self, other: "PauliOperator") -> bool:
        anti = (self.x & other.z).bit_count() + (self.z & other.x).bit_count()
        return anti % 2 == 0

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        if self.n != other.n:
            raise ValueError("wire counts differ")
        # Commute other's X factors past self's Z factors: ZX = -XZ.
        phase = self.phase + other.phase + 2 * (self.z & other.x).bit_count()
        return PauliOperator(self.n, self.x ^ other.x, self.z ^ other.z, phase)

    def to_matrix(self) -> np.ndarray:
        """Dense matrix on basis |b_{n-1} ... b_0> (wire 0 least significant)."""
        out = np.array([[1.0 + 0j]])
        for q in range(self.n - 1, -1, -1):
            m = _I2
            if (self.x >> q) & 1:
                m = _X2
            if (self.z >> q) & 1:
                m = m @ _Z2
            out = np.kron(out, m)
        return (1j ** self.phase) * out

    def __str__(self) -> str:
        body = "".join(
            _SINGLE[((self.x >> q) & 1, (self.z >> q) & 1)]
            for q in range(self.n)
        )
        prefix = ("+", "+i", "-", "-i")[self.phase]
        return prefix + body


def _pauli_label(xbit: int, zbit: int) -> str:
    return _SINGLE[(xbit, zbit)]


# ---------------------------------------------------------------------------
# Stabilizer tableau

def _rowsum_pair(
    dst: tuple[int, int, int], src: tuple[int, int, int]
) -> tuple[int, int, int]:
    """Multiply src into dst, tracking the sign the product acquires."""
    xh, zh, rh = dst
    xi, zi, ri = src
    total = 2 * (rh + ri)
    mask = xi | zi
    while mask:
        bit = mask & -mask
        mask ^= bit
        x1 = 1 if xi & bit else 0
        z1 = 1 if zi & bit else 0
        x2 = 1 if xh & bit else 0
        z2 = 1 if zh & bit else 0
        if x1 and z1:
            total += z2 - x2
        elif x1:
            total += z2 * (2 * x2 - 1)
        else:
            total += x2 * (1 - 2 * z2)
    return xh ^ xi, zh ^ zi, (total % 4) // 2


class StabilizerTableau:
    """Destabilizer/stabilizer tableau over integer bit-mask rows.

    Rows 0..n-1 are destabilizers, rows n..2n-1 stabilizers.  Random
    measurement outcomes are resolved to 0, so repeated runs agree.
    """

    __slots__ = ("n", "xs", "zs", "rs")

    def __init__(self, n: int, xs: list, zs: list, rs: list) -> None:
        self.n = n
        self.xs = xs
        self.zs = zs
        self.rs = rs

    @classmethod
    def zeros(cls, n: int) -> "StabilizerTableau":
        """All wires in |0>."""
        if n < 1:
            raise ValueError(f"need at least one wire, got {n}")
        xs = [1 << i for i in range(n)] + [0] * n
        zs = [0] * n + [1 << i for i in range(n)]
        return cls(n, xs, zs, [0] * (2 * n))

    def copy(self) -> "StabilizerTableau":
        return StabilizerTableau(self.n, list(self.xs), list(self.zs), list(self.rs))

    # -- Clifford conjugations ------------------------------------------

    def h(self, q: int) -> None:
        bit = 1 << q
        xs, zs, rs = self.xs, self.zs, self.rs
        for i in range(2 * self.n):
            xb = xs[i] & bit
            zb = zs[i] & bit
            if xb and zb:
                rs[i] ^= 1
            if bool(xb) != bool(zb):
                xs[i] ^= bit
                zs[i] ^= bit

    def s(self, q: int) -> None:
        bit = 1 << q
        xs, zs, rs = self.xs, self.zs, self.rs
        for i in range(2 * self.n):
            xb = xs[i] & bit
            if xb and zs[i] & bit:
                rs[i] ^= 1
            if xb:
                zs[i] ^= bit

    def sdg(self, q: int) -> None:
        # S^3 = S^dagger up to global phase, which a tableau never sees.
        self.s(q)
        self.s(q)
        self.s(q)

    def x(self, q: int) -> None:
        bit = 1 << q
        for i in range(2 * self.n):
            if self.zs[i] & bit:
                self.rs[i] ^= 1

    def z(self, q: int) -> None:
        bit = 1 << q
        for i in range(2 * self.n):
            if self.xs[i] & bit:
                self.rs[i] ^= 1

    def cnot(self, a: int, b: int) -> None:
        if a == b:
            raise ValueError("control and target coincide")
        bita = 1 << a
        bitb = 1 << b
        xs, zs, rs = self.xs, self.zs, self.rs
        for i in range(2 * self.n):
            xa = xs[i] & bita
            zb = zs[i] & bitb
            if xa and zb and bool(xs[i] & bitb) == bool(zs[i] & bita):
                rs[i] ^= 1
            if xa:
                xs[i] ^= bitb
            if zb:
                zs[i] ^= bita

    def swap(self, a: int, b: int) -> None:
        xs, zs = self.xs, self.zs
        for i in range(2 * self.n):
            m = ((xs[i] >> a) ^ (xs[i] >> b)) & 1
            xs[i] ^= (m << a) | (m << b)
            m = ((zs[i] >> a) ^ (zs[i] >> b)) & 1
            zs[i] ^= (m << a) | (m << b)

    # -- measurement ----------------------------------------------------

    def _rowsum(self, h: int, i: int) -> None:
        row = _rowsum_pair(
            (self.xs[h], self.zs[h], self.rs[h]),
            (self.xs[i], self.zs[i], self.rs[i]),
        )
        self.xs[h], self.zs[h], self.rs[h] = row

    def measure(self, q: int) -> tuple[int, bool]:
        """Measure wire q in the Z basis; returns (outcome, deterministic)."""
        n = self.n
        bit = 1 << q
        p = -1
        for i in range(n, 2 * n):
            if self.xs[i] & bit:
                p = i
                break
        if p >= 0:
            for i in range(2 * n):
                if i != p and self.xs[i] & bit:
                    self._rowsum(i, p)
            self.xs[p - n] = self.xs[p]
            self.zs[p - n] = self.zs[p]
            self.rs[p - n] = self.rs[p]
            self.xs[p] = 0
            self.zs[p] = bit
            self.rs[p] = 0
            return 0, False
        acc = (0, 0, 0)
        for i in range(n):
            if self.xs[i] & bit:
                acc = _rowsum_pair(acc, (self.xs[i + n], self.zs[i + n], self.rs[i + n]))
        return acc[2], True

    def prep_zero(self, q: int) -> None:
        outcome, deterministic = self.measure(q)
        if deterministic and outcome:
            self.x(q)

    # -- group queries ---------------------------------------------------

    def coset_sign(self, x: int, z: int) -> Optional[int]:
        """+1 or -1 when the phaseless Pauli (x, z) is in the group, else None."""
        acc = (0, 0, 0)
        n = self.n
        for i in range(n):
            anti = ((x & self.zs[i]).bit_count() + (z & self.xs[i]).bit_count()) & 1
            if anti:
                acc = _rowsum_pair(acc, (self.xs[i + n], self.zs[i + n], self.rs[i + n]))
        if acc[0] == x and acc[1] == z:
            return -1 if acc[2] else 1
        return None

    def stabilizer_rows(self) -> list[tuple[int, int, int]]:
        n = self.n
        return [(self.xs[i], self.zs[i], self.rs[i]) for i in range(n, 2 * n)]


# ---------------------------------------------------------------------------
# Circuit-level stabilizer simulation

_FORBIDDEN = {OpKind.T, OpKind.Tdg, OpKind.CCS}

_PLAIN_APPLY = {
    OpKind.H: "h",
    OpKind.S: "s",
    OpKind.Sdg: "sdg",
    OpKind.X: "x",
    OpKind.Z: "z",
}


@dataclass
class SimulationResult:
    outcomes: list[int]
    deterministic: list[bool]
    tableau: StabilizerTableau


def _wire(site: Site, width: int) -> int:
    return site.row * width + site.col


def _apply_part(
    tab: StabilizerTableau, kind: OpKind, wires: Sequence[int]
) -> None:
    if kind in _FORBIDDEN:
        raise UnsupportedOperationError(
            f"{kind.value} is outside the stabilizer fragment"
        )
    name = _PLAIN_APPLY.get(kind)
    if name is not None:
        getattr(tab, name)(wires[0])
    elif kind is OpKind.CNOT:
        tab.cnot(wires[0], wires[1])
    elif kind is OpKind.SWAP:
        tab.swap(wires[0], wires[1])
    else:
        raise UnsupportedOperationError(f"cannot apply {kind.value} inside a group")


def simulate_stabilizer(
    circuit: Circuit, initial: Optional[StabilizerTableau] = None
) -> SimulationResult:
    """Run the circuit on a tableau; random outcomes resolve to 0.

    ``initial`` defaults to every wire in |0> and is modified in place
    when given.
    """
    width = circuit.width
    tab = initial if initial is not None else StabilizerTableau.zeros(2 * width)
    if tab.n != 2 * width:
        raise ValueError(f"tableau has {tab.n} wires, circuit needs {2 * width}")
    outcomes: list[int] = []
    deterministic: list[bool] = []
    for op in circuit.operations:
        wires = [_wire(s, width) for s in op.sites]
        kind = op.kind
        if kind in _FORBIDDEN:
            raise UnsupportedOperationError(
                f"{kind.value} is outside the stabilizer fragment"
            )
        if kind is OpKind.Identity or kind is OpKind.PrepZero:
            if kind is OpKind.PrepZero:
                tab.prep_zero(wires[0])
        elif kind is OpKind.MeasureZ:
            outcome, det = tab.measure(wires[0])
            outcomes.append(outcome)
            deterministic.append(det)
        elif kind is OpKind.CCX:
            if outcomes[op.control]:
                tab.x(wires[0])
        elif kind is OpKind.CCZ:
            if outcomes[op.control]:
                tab.z(wires[0])
        elif kind is OpKind.Compound:
            for part in op.parts:
                _apply_part(tab, part, wires)
        else:
            _apply_part(tab, kind, wires)
    return SimulationResult(outcomes, deterministic, tab)


def _encoder_wires(block: Sequence[Site], width: int) -> list[int]:
    return [_wire(s, width) for s in sorted(block, key=lambda s: (s.row, s.col))]


def _encode_block(tab: StabilizerTableau, wires: Sequence[int]) -> None:
    """Apply the logical-zero encoder to seven tableau wires."""
    for layer in ENCODE_LAYERS:
        for gate in layer:
            if gate[0] == "H":
                tab.h(wires[gate[1]])
            elif gate[0] == "CNOT":
                tab.cnot(wires[gate[1]], wires[gate[2]])
            else:
                tab.swap(wires[gate[1]], wires[gate[2]])


# ---------------------------------------------------------------------------
# Pauli-frame plans

@dataclass
class _FramePlan:
    width: int
    code: np.ndarray
    wire_a: np.ndarray
    wire_b: np.ndarray
    steps: np.ndarray
    after: tuple[int, ...]
    measurements: int


def _frame_plan(circuit: Circuit) -> _FramePlan:
    code: list[int] = []
    wire_a: list[int] = []
    wire_b: list[int] = []
    steps: list[int] = []
    after: list[int] = []
    width = circuit.width
    meas = 0

    def emit(opcode: int, a: int, b: int, step: int) -> None:
        code.append(opcode)
        wire_a.append(a)
        wire_b.append(b)
        steps.append(step)

    for op in circuit.operations:
        kind = op.kind
        if kind in _FORBIDDEN:
            raise UnsupportedOperationError(
                f"{kind.value} is outside the Pauli-frame fragment"
            )
        wires = [_wire(s, width) for s in op.sites]
        if kind is OpKind.H:
            emit(_backend.OP_H, wires[0], 0, op.step)
        elif kind in (OpKind.S, OpKind.Sdg):
            emit(_backend.OP_PHASE, wires[0], 0, op.step)
        elif kind is OpKind.CNOT:
            emit(_backend.OP_CNOT, wires[0], wires[1], op.step)
        elif kind is OpKind.SWAP:
            emit(_backend.OP_SWAP, wires[0], wires[1], op.step)
        elif kind is OpKind.MeasureZ:
            emit(_backend.OP_MEASZ, wires[0], meas, op.step)
            meas += 1
        elif kind is OpKind.PrepZero:
            emit(_backend.OP_PREP, wires[0], 0, op.step)
        elif kind is OpKind.CCX:
            emit(_backend.OP_CCX, wires[0], op.control, op.step)
        elif kind is OpKind.CCZ:
            emit(_backend.OP_CCZ, wires[0], op.control, op.step)
        elif kind is OpKind.Compound:
            for part in op.parts:
                if part in _FORBIDDEN:
                    raise UnsupportedOperationError(
                        f"{part.value} is outside the Pauli-frame fragment"
                    )
                if part is OpKind.H:
                    emit(_backend.OP_H, wires[0], 0, op.step)
                elif part in (OpKind.S, OpKind.Sdg):
                    emit(_backend.OP_PHASE, wires[0], 0, op.step)
                elif part is OpKind.CNOT:
                    emit(_backend.OP_CNOT, wires[0], wires[1], op.step)
                elif part is OpKind.SWAP:
                    emit(_backend.OP_SWAP, wires[0], wires[1], op.step)
                # X and Z parts commute with the frame up to sign.
        # Identity, X, Z: frame no-ops.
        after.append(len(code))

    return _FramePlan(
        width=width,
        code=np.ascontiguousarray(code, dtype=np.int32),
        wire_a=np.ascontiguousarray(wire_a, dtype=np.int32),
        wire_b=np.ascontiguousarray(wire_b, dtype=np.int32),
        steps=np.ascontiguousarray(steps, dtype=np.int64),
        after=tuple(after),
        measurements=meas,
    )


def _run_segment(
    plan: _FramePlan,
    lo: int,
    hi: int,
    x: np.ndarray,
    z: np.ndarray,
    flips: np.ndarray,
    start: np.ndarray,
) -> None:
    if hi <= lo:
        return
    rel = np.clip(start - lo, 0, hi - lo).astype(np.int64)
    _backend.propagate_frames(
        plan.code[lo:hi], plan.wire_a[lo:hi], plan.wire_b[lo:hi], x, z, flips, rel
    )


# ---------------------------------------------------------------------------
# Fault enumeration

_ONE_QUBIT = (("X", 1, 0), ("Y", 1, 1), ("Z", 0, 1))
_TWO_QUBIT = tuple(
    (la + lb, xa, za, xb, zb)
    for la, xa, za in (("I", 0, 0),) + _ONE_QUBIT
    for lb, xb, zb in (("I", 0, 0),) + _ONE_QUBIT
    if la + lb != "II"
)

_GATE_1Q = {OpKind.H, OpKind.S, OpKind.Sdg, OpKind.X, OpKind.Z, OpKind.Identity}
_GATE_2Q = {OpKind.CNOT, OpKind.SWAP}


@dataclass(frozen=True)
class FaultSite:
    """A single elementary fault: Pauli masks injected after one location."""

    step: int
    sites: tuple[Site, ...]
    label: str
    x: int
    z: int
    flips: int
    start: int


def _enumerate_faults(circuit: Circuit, plan: _FramePlan) -> list[FaultSite]:
    width = circuit.width
    faults: list[FaultSite] = []

    for index, op in enumerate(circuit.operations):
        start = plan.after[index]
        kind = op.kind
        wires = [_wire(s, width) for s in op.sites]
        if kind in _GATE_1Q or kind in (OpKind.CCX, OpKind.CCZ) or (
            kind is OpKind.Compound and len(op.sites) == 1
        ):
            for label, px, pz in _ONE_QUBIT:
                faults.append(FaultSite(
                    op.step, op.sites, label,
                    px << wires[0], pz << wires[0], 0, start,
                ))
        elif kind in _GATE_2Q or (kind is OpKind.Compound and len(op.sites) == 2):
            for label, xa, za, xb, zb in _TWO_QUBIT:
                faults.append(FaultSite(
                    op.step, op.sites, label,
                    (xa << wires[0]) | (xb << wires[1]),
                    (za << wires[0]) | (zb << wires[1]),
                    0, start,
                ))
        elif kind is OpKind.PrepZero:
            faults.append(FaultSite(
                op.step, op.sites, "X", 1 << wires[0], 0, 0, start,
            ))
        elif kind is OpKind.MeasureZ:
            meas_index = int(plan.wire_b[start - 1])
            faults.append(FaultSite(
                op.step, op.sites, "flip", 0, 0, 1 << meas_index, start,
            ))

    timeline = circuit.role_timeline()
    by_step: dict[int, list[Operation]] = {}
    for op in circuit.operations:
        by_step.setdefault(op.step, []).append(op)
    for step in range(circuit.steps):
        touched: set[Site] = set()
        for op in by_step.get(step, ()):
            touched.update(op.sites)
        start = int(np.searchsorted(plan.steps, step, side="right"))
        for site, role in sorted(timeline[step].items()):
            if role is QubitRole.Computational and site not in touched:
                w = _wire(site, width)
                for label, px, pz in _ONE_QUBIT:
                    faults.append(FaultSite(
                        step, (site,), label, px << w, pz << w, 0, start,
                    ))
    return faults


def enumerate_single_faults(circuit: Circuit) -> list[FaultSite]:
    """Every elementary fault: 3 Paulis per one-qubit location and idle,
    15 per two-qubit gate, an outcome flip per readout, a bit flip per
    preparation."""
    return _enumerate_faults(circuit, _frame_plan(circuit))


def propagate_pauli(
    circuit: Circuit, fault: FaultSite
) -> tuple[PauliOperator, int]:
    """Push one fault to the end of the circuit with no recovery.

    Returns the surviving frame as a Pauli (sign information is not
    tracked) and the measurement-flip mask it caused.
    """
    plan = _frame_plan(circuit)
    x = np.array([fault.x], dtype=np.uint64)
    z = np.array([fault.z], dtype=np.uint64)
    flips = np.array([fault.flips], dtype=np.uint64)
    start = np.array([fault.start], dtype=np.int64)
    _run_segment(plan, 0, len(plan.code), x, z, flips, start)
    residual = PauliOperator(2 * circuit.width, int(x[0]), int(z[0]))
    return residual, int(flips[0])


# ---------------------------------------------------------------------------
# Recovery tables

_POP7 = np.array([v.bit_count() for v in range(128)], dtype=np.int64)


def _span8(generators: Sequence[int]) -> tuple[int, ...]:
    span = {0}
    for g in generators:
        span |= {s ^ g for s in span}
    return tuple(sorted(span))


_STAB_SPAN = _span8(Z_STABILIZERS)


def _ball_one() -> frozenset:
    """Block errors of reduced weight <= 1, packed as (x << 7) | z."""
    light = [(0, 0)]
    for q in range(BLOCK_SIZE):
        light += [(1 << q, 0), (1 << q, 1 << q), (0, 1 << q)]
    ball = set()
    for sx in _STAB_SPAN:
        for sz in _STAB_SPAN:
            for ex, ez in light:
                ball.add(((sx ^ ex) << BLOCK_SIZE) | (sz ^ ez))
    return frozenset(ball)


_BALL1 = _ball_one()


@dataclass(frozen=True)
class RecoveryTable:
    """Outcome-pattern-to-correction map for one extraction round.

    The pattern over the extraction's measurements serves double duty:
    patterns in the image of the data-error syndrome map decode to the
    minimum weight data correction, while patterns produced only by
    faults inside the extraction itself decode to whatever those
    faults deposit on the data, undoing the back-action of a bad
    ancilla.  ``entries`` maps the pattern to (x, z) bits over the
    target block; ``masks_x``/``masks_z`` are the dense wire-mask form
    used during frame propagation.  Patterns whose candidate
    corrections cannot all be reconciled within one residual error are
    reported, not papered over.
    """

    hook: RecoveryHook
    entries: Mapping[int, tuple[int, int]]
    masks_x: np.ndarray
    masks_z: np.ndarray
    inconsistencies: tuple[str, ...]


def _segment_bounds(plan: _FramePlan, hooks: Sequence[RecoveryHook]) -> list[int]:
    """Frame-op index just past each unique hook step, ascending."""
    unique_steps = sorted({h.step for h in hooks})
    return [int(np.searchsorted(plan.steps, s, side="right")) for s in unique_steps]


def _reduced_weight(x_bits: int, z_bits: int) -> int:
    """Weight of a 7-bit block error modulo the stabilizer group."""
    best = BLOCK_SIZE + 1
    for sx in _STAB_SPAN:
        dx = x_bits ^ sx
        for sz in _STAB_SPAN:
            w = (dx | (z_bits ^ sz)).bit_count()
            if w < best:
                best = w
    return best


def _window_bounds(
    plan: _FramePlan, circuit: Circuit, hook: RecoveryHook
) -> tuple[int, int]:
    earlier = [h.step for h in circuit.hooks if h.step < hook.step]
    lo = (
        int(np.searchsorted(plan.steps, max(earlier), side="right"))
        if earlier else 0
    )
    hi = int(np.searchsorted(plan.steps, hook.step, side="right"))
    return lo, hi


def _build_table(
    plan: _FramePlan,
    circuit: Circuit,
    hook: RecoveryHook,
    faults: Sequence[FaultSite],
) -> RecoveryTable:
    lo, hi = _window_bounds(plan, circuit, hook)
    targets = [_wire(s, circuit.width) for s in hook.targets]
    k = len(targets)
    if k != BLOCK_SIZE:
        raise ValueError(f"extraction targets {k} wires, expected {BLOCK_SIZE}")
    target_mask = 0
    for w in targets:
        target_mask |= 1 << w
    hook_bits = 0
    for m in hook.measurements:
        hook_bits |= 1 << m

    def read_pattern(flip_int: int) -> int:
        pattern = 0
        for j, m in enumerate(hook.measurements):
            pattern |= ((flip_int >> m) & 1) << j
        return pattern

    def block_bits(mask: int) -> int:
        bits = 0
        for q, w in enumerate(targets):
            bits |= ((mask >> w) & 1) << q
        return bits

    # Data errors are injected where the transversal coupling picks the
    # block up, so the columns describe errors on the data that actually
    # reaches this extraction (routing gadgets may move it in earlier).
    couple = -1
    for j in range(lo, hi):
        if plan.code[j] == _backend.OP_CNOT and (
            (1 << int(plan.wire_a[j])) & target_mask
            or (1 << int(plan.wire_b[j])) & target_mask
        ):
            couple = j
            break
    if couple < 0:
        raise RuntimeError(f"extraction {hook.label!r} never couples to its block")

    x = np.zeros(k, dtype=np.uint64)
    z = np.zeros(k, dtype=np.uint64)
    for q, w in enumerate(targets):
        if hook.basis == "Z":
            z[q] = np.uint64(1) << np.uint64(w)
        else:
            x[q] = np.uint64(1) << np.uint64(w)
    flips = np.zeros(k, dtype=np.uint64)
    start = np.full(k, couple, dtype=np.int64)
    _run_segment(plan, lo, hi, x, z, flips, start)
    columns = [read_pattern(int(flips[q])) for q in range(k)]

    data_fix: dict[int, int] = {}
    order = sorted(range(1 << k), key=lambda e: (e.bit_count(), e))
    for pattern in order:
        syndrome = 0
        bits = pattern
        while bits:
            syndrome ^= columns[(bits & -bits).bit_length() - 1]
            bits &= bits - 1
        data_fix.setdefault(syndrome, pattern)

    # Faults inside the window, propagated to the hook boundary: the
    # flip pattern is the signature, the frame left on the block is the
    # damage the decoder must undo.
    window = [
        f for f in faults
        if (lo <= f.start < hi) or (f.flips & hook_bits)
    ]
    damages: dict[int, set[tuple[int, int]]] = {}
    if window:
        wx = np.array([f.x for f in window], dtype=np.uint64)
        wz = np.array([f.z for f in window], dtype=np.uint64)
        wf = np.array([f.flips for f in window], dtype=np.uint64)
        ws = np.array([f.start for f in window], dtype=np.int64)
        _run_segment(plan, lo, hi, wx, wz, wf, ws)
        for i in range(len(window)):
            pattern = read_pattern(int(wf[i]))
            dx = block_bits(int(wx[i]) & target_mask)
            dz = block_bits(int(wz[i]) & target_mask)
            if pattern or dx or dz:
                damages.setdefault(pattern, set()).add((dx, dz))

    entries: dict[int, tuple[int, int]] = {}
    inconsistencies: list[str] = []
    for pattern in sorted(set(data_fix) | set(damages)):
        fix = data_fix.get(pattern)
        fix_pair = None
        if fix is not None and pattern != 0:
            fix_pair = (0, fix) if hook.basis == "Z" else (fix, 0)

        # Single-fault scenarios this pattern must answer for: damage
        # left by faults inside the window, plus a weight-one incoming
        # error (basis type or its Y partner) when one fits the pattern.
        scenarios = set(damages.get(pattern, ()))
        if fix is not None and fix.bit_count() == 1:
            scenarios.add(fix_pair)
            scenarios.add((fix, fix))

        if pattern == 0:
            # The fault-free run sees pattern 0; correcting it would
            # corrupt clean data, so anything here must already be light.
            for sx, sz in sorted(scenarios):
                if _reduced_weight(sx, sz) > 1:
                    inconsistencies.append(
                        f"{hook.label}: a silent fault leaves weight "
                        f"{_reduced_weight(sx, sz)} with no pattern to key on"
                    )
            continue

        chosen: Optional[tuple[int, int]] = None
        if not scenarios:
            chosen = fix_pair
        else:
            viable: Optional[set[int]] = None
            for sx, sz in sorted(scenarios):
                packed = (sx << BLOCK_SIZE) | sz
                if viable is None:
                    viable = {packed ^ b for b in _BALL1}
                else:
                    viable = {c for c in viable if (c ^ packed) in _BALL1}
                if not viable:
                    break
            if viable:
                if fix_pair is not None and (
                    (fix_pair[0] << BLOCK_SIZE) | fix_pair[1]
                ) in viable:
                    chosen = fix_pair
                else:
                    packed = min(viable, key=lambda c: (c.bit_count(), c))
                    chosen = (packed >> BLOCK_SIZE, packed & ((1 << BLOCK_SIZE) - 1))
            else:
                inconsistencies.append(
                    f"{hook.label}: pattern {pattern:#04x} admits faults with "
                    f"no common correction within one residual error"
                )
                chosen = fix_pair
        if chosen is not None and chosen != (0, 0):
            entries[pattern] = chosen

    size = 1 << len(hook.measurements)
    masks_x = np.zeros(size, dtype=np.uint64)
    masks_z = np.zeros(size, dtype=np.uint64)
    for pattern, (ex, ez) in entries.items():
        mx = mz = 0
        for q, w in enumerate(targets):
            if (ex >> q) & 1:
                mx |= 1 << w
            if (ez >> q) & 1:
                mz |= 1 << w
        masks_x[pattern] = np.uint64(mx)
        masks_z[pattern] = np.uint64(mz)
    return RecoveryTable(hook, entries, masks_x, masks_z, tuple(inconsistencies))


def build_recovery_table(circuit: Circuit, hook: RecoveryHook) -> RecoveryTable:
    """Decode table for one hook, built from the circuit's own frame map."""
    plan = _frame_plan(circuit)
    return _build_table(plan, circuit, hook, _enumerate_faults(circuit, plan))


# ---------------------------------------------------------------------------
# Single-fault verification

@dataclass(frozen=True)
class FaultRecord:
    step: int
    sites: tuple[Site, ...]
    label: str
    block_weights: tuple[int, ...]
    passed: bool


@dataclass
class FaultReport:
    """Outcome of one verification run."""

    label: str
    passed: bool
    fault_count: int
    records: tuple[FaultRecord, ...] = ()
    inconsistencies: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def failures(self) -> tuple[FaultRecord, ...]:
        return tuple(r for r in self.records if not r.passed)

    def summary(self) -> str:
        state = "PASS" if self.passed else "FAIL"
        parts = [f"{self.label}: {state}", f"{self.fault_count} faults"]
        failures = self.failures
        if failures:
            parts.append(f"{len(failures)} failures")
        if self.inconsistencies:
            parts.append(f"{len(self.inconsistencies)} decode ambiguities")
        return ", ".join(parts)

    def to_json(self, include_passing: bool = False) -> str:
        def encode(record: FaultRecord) -> dict:
            return {
                "step": record.step,
                "sites": [[s.row, s.col] for s in record.sites],
                "fault": record.label,
                "block_weights": list(record.block_weights),
                "passed": record.passed,
            }

        payload = {
            "component": self.label,
            "passed": self.passed,
            "faults": self.fault_count,
            "failures": [encode(r) for r in self.failures],
            "inconsistencies": list(self.inconsistencies),
            "notes": list(self.notes),
        }
        if include_passing:
            payload["records"] = [encode(r) for r in self.records]
        return json.dumps(payload, indent=2)


def _bits_at(vec: np.ndarray, wires: Sequence[int]) -> np.ndarray:
    out = np.zeros(vec.shape[0], dtype=np.int64)
    for i, w in enumerate(wires):
        out |= ((vec >> np.uint64(w)) & np.uint64(1)).astype(np.int64) << i
    return out


def _block_weights(
    x: np.ndarray, z: np.ndarray, wires: Sequence[int], reduce_stabilizer: bool
) -> np.ndarray:
    x_bits = _bits_at(x, wires)
    z_bits = _bits_at(z, wires)
    if not reduce_stabilizer:
        return _POP7[x_bits | z_bits]
    best = np.full(x_bits.shape[0], BLOCK_SIZE + 1, dtype=np.int64)
    for sx in _STAB_SPAN:
        dx = x_bits ^ sx
        for sz in _STAB_SPAN:
            np.minimum(best, _POP7[dx | (z_bits ^ sz)], out=best)
    return best


def verify_single_fault_tolerance(
    circuit: Circuit, label: Optional[str] = None
) -> FaultReport:
    """Inject every elementary fault and weigh what survives recovery.

    A circuit passes when no single fault leaves more than one error on
    any declared block.  Blocks of seven wires in a circuit assembled
    as a gadget are weighed modulo the code stabilizer; smaller blocks
    (bare routing checks) are weighed literally.  A logical flip is
    never factored out, so an undetected logical error fails.
    """
    label = label or circuit.gadget or "circuit"
    if 2 * circuit.width > 64:
        raise UnsupportedOperationError("frame masks support at most 64 wires")
    if circuit.measurements > 64:
        raise UnsupportedOperationError("frame flips support at most 64 outcomes")
    plan = _frame_plan(circuit)

    code_blocks = circuit.gadget is not None
    blocks = circuit.blocks
    if not blocks:
        final = circuit.role_timeline()[-1] if circuit.steps else dict(circuit.roles)
        data = tuple(sorted(
            s for s, r in final.items() if r is QubitRole.Computational
        ))
        blocks = (data,) if data else ()
    block_wires = [
        [_wire(s, circuit.width) for s in block] for block in blocks
    ]
    for wires in block_wires:
        if len(wires) > BLOCK_SIZE:
            raise ValueError("blocks wider than one code block are not supported")

    hooks = sorted(circuit.hooks, key=lambda h: h.step)
    if hooks:
        tab = StabilizerTableau.zeros(2 * circuit.width)
        if code_blocks:
            for block in blocks:
                if len(block) == BLOCK_SIZE:
                    _encode_block(tab, _encoder_wires(block, circuit.width))
        ideal = simulate_stabilizer(circuit, initial=tab)
        for hook in hooks:
            for m in hook.measurements:
                if ideal.outcomes[m] != 0 or not ideal.deterministic[m]:
                    raise RuntimeError(
                        f"extraction {hook.label!r} does not return deterministic "
                        f"zero outcomes on the fault-free run"
                    )

    faults = _enumerate_faults(circuit, plan)
    tables = [_build_table(plan, circuit, hook, faults) for hook in hooks]
    inconsistencies: list[str] = []
    for table in tables:
        inconsistencies.extend(table.inconsistencies)

    count = len(faults)
    x = np.array([f.x for f in faults], dtype=np.uint64)
    z = np.array([f.z for f in faults], dtype=np.uint64)
    flips = np.array([f.flips for f in faults], dtype=np.uint64)
    start = np.array([f.start for f in faults], dtype=np.int64)

    bounds = _segment_bounds(plan, hooks)
    by_bound: dict[int, list[RecoveryTable]] = {}
    for table in tables:
        hi = int(np.searchsorted(plan.steps, table.hook.step, side="right"))
        by_bound.setdefault(hi, []).append(table)
    lo = 0
    for hi in bounds:
        _run_segment(plan, lo, hi, x, z, flips, start)
        for table in by_bound[hi]:
            syndrome = np.zeros(count, dtype=np.int64)
            for j, m in enumerate(table.hook.measurements):
                syndrome |= (
                    ((flips >> np.uint64(m)) & np.uint64(1)).astype(np.int64) << j
                )
            x ^= table.masks_x[syndrome]
            z ^= table.masks_z[syndrome]
        lo = hi
    _run_segment(plan, lo, len(plan.code), x, z, flips, start)

    weight_rows = [
        _block_weights(x, z, wires, code_blocks and len(wires) == BLOCK_SIZE)
        for wires in block_wires
    ]
    records = []
    all_passed = True
    for i, fault in enumerate(faults):
        weights = tuple(int(row[i]) for row in weight_rows)
        ok = all(w <= 1 for w in weights)
        all_passed = all_passed and ok
        records.append(FaultRecord(fault.step, fault.sites, fault.label, weights, ok))

    return FaultReport(
        label=label,
        passed=all_passed,
        fault_count=count,
        records=tuple(records),
        inconsistencies=tuple(inconsistencies),
    )


# ---------------------------------------------------------------------------
# Component checks

COMPONENTS = (
    "swap-routine",
    "encode-decode",
    "mesh",
    "memory-exrec",
    "swap-exrec",
    "naive-swap",
)


def _net_permutation(circuit: Circuit) -> dict[Site, Site]:
    """Final site of the qubit that starts on each site."""
    content: dict[Site, Site] = {}
    for op in circuit.operations:
        if op.swaps_roles():
            a, b = op.sites
            content.setdefault(a, a)
            content.setdefault(b, b)
            content[a], content[b] = content[b], content[a]
    return {origin: here for here, origin in content.items()}


def _check_encode_decode() -> FaultReport:
    notes: list[str] = []
    ok = True

    def check(name: str, good: bool) -> None:
        nonlocal ok
        notes.append(f"{name}: {'ok' if good else 'FAIL'}")
        ok = ok and good

    enc = build_encode()
    sim = simulate_stabilizer(enc)
    tab = sim.tableau
    for mask in X_STABILIZERS:
        check(f"X stabilizer {mask:#09b} fixed at +1", tab.coset_sign(mask, 0) == 1)
    for mask in Z_STABILIZERS:
        check(f"Z stabilizer {mask:#09b} fixed at +1", tab.coset_sign(0, mask) == 1)
    check("logical Z fixed at +1", tab.coset_sign(0, Z_LOGICAL) == 1)
    check("logical X not in the group", tab.coset_sign(X_LOGICAL, 0) is None)

    dec = build_decode()
    for op in dec.operations:
        _apply_part(tab, op.kind, [_wire(s, dec.width) for s in op.sites])
    round_trip = all(
        tab.measure(q) == (0, True) for q in range(BLOCK_SIZE)
    )
    check("decode returns the block to |0000000>", round_trip)

    return FaultReport(
        label="encode-decode",
        passed=ok,
        fault_count=0,
        notes=tuple(notes),
    )


def _check_mesh() -> FaultReport:
    mesh = build_mesh(3)
    report = verify_single_fault_tolerance(mesh, label="mesh")
    notes = list(report.notes)
    ok = report.passed

    perm = _net_permutation(mesh)
    want = {Site(0, i): Site(0, 2 * i) for i in range(3)}
    want.update({Site(0, 3 + i): Site(0, 2 * i + 1) for i in range(3)})
    interleaved = all(perm.get(src, src) == dst for src, dst in want.items())
    notes.append(f"mesh interleaves two blocks: {'ok' if interleaved else 'FAIL'}")
    ok = ok and interleaved

    unmesh = build_unmesh(3)
    round_trip = _net_permutation(unmesh)
    identity = all(round_trip.get(dst, dst) == src for src, dst in want.items())
    notes.append(f"unmesh restores the order: {'ok' if identity else 'FAIL'}")
    ok = ok and identity

    return FaultReport(
        label="mesh",
        passed=ok,
        fault_count=report.fault_count,
        records=report.records,
        inconsistencies=report.inconsistencies,
        notes=tuple(notes),
    )


def _naive_swap_circuit() -> Circuit:
    a, b = Site(0, 0), Site(0, 1)
    return Circuit(
        width=2,
        steps=1,
        operations=(Operation(OpKind.SWAP, (a, b), 0),),
        roles={a: QubitRole.Computational, b: QubitRole.Computational},
        blocks=((a, b),),
    )


def verify_component(name: str) -> FaultReport:
    """Run one named verification procedure.

    ``naive-swap`` is the control experiment: a bare SWAP between two
    qubits of the same block, which a correlated two-qubit fault must
    defeat.  Its report is expected to fail.
    """
    if name == "swap-routine":
        circuit = build_single_error_swap(Site(0, 0), Site(0, 1))
        return verify_single_fault_tolerance(circuit, label="swap-routine")
    if name == "encode-decode":
        return _check_encode_decode()
    if name == "mesh":
        return _check_mesh()
    if name == "memory-exrec":
        return verify_single_fault_tolerance(
            assemble_exrec("memory"), label="memory-exrec"
        )
    if name == "swap-exrec":
        return verify_single_fault_tolerance(
            assemble_exrec("swap"), label="swap-exrec"
        )
    if name == "naive-swap":
        return verify_single_fault_tolerance(_naive_swap_circuit(), label="naive-swap")
    raise ValueError(f"unknown component {name!r}; choose from {', '.join(COMPONENTS)}")
