"""Circuit construction on a two-row nearest-neighbor qubit array.

Row 0 carries seven-qubit data blocks spaced ``BLOCK_PITCH`` columns
apart; row 1 provides ancilla and routing sites directly beneath.  All
two-qubit gates act between horizontally or vertically adjacent sites.
Syndrome extraction encodes a fresh ancilla block in place on row 1,
couples it to the data block with one transversal layer of vertical
CNOTs, then decodes and measures it; the classical outcome pattern
both diagnoses data errors and flags bad ancilla preparations, so no
ancilla verification round trip is needed.

Logical qubits move by block interchange: one block drops to row 1,
slides past its neighbor, and rises again, using only plain SWAPs that
touch at most one computational qubit each.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence, Union

from ftlab.census import AffineCount, ExRecCensus, LocationKind

BLOCK_SIZE = 7
BLOCK_PITCH = 9

# Stabilizer generators of the block code, one bit per wire.  The
# encoder below prepares the +1 eigenstate of all of them plus the
# logical Z.
X_STABILIZERS: tuple[int, ...] = (0b1010101, 0b0110011, 0b0001111)
Z_STABILIZERS: tuple[int, ...] = (0b1010101, 0b0110011, 0b0001111)
X_LOGICAL = 0b0101010
Z_LOGICAL = 0b0101010


class Site(NamedTuple):
    row: int
    col: int


class QubitRole(enum.Enum):
    Computational = "computational"
    Placeholder = "placeholder"


class OpKind(enum.Enum):
    Identity = "I"
    PrepZero = "P0"
    H = "H"
    X = "X"
    Z = "Z"
    S = "S"
    Sdg = "SDG"
    T = "T"
    Tdg = "TDG"
    CNOT = "CNOT"
    SWAP = "SWAP"
    MeasureZ = "MZ"
    CCX = "CCX"
    CCZ = "CCZ"
    CCS = "CCS"
    Compound = "GROUP"


_TWO_SITE = {OpKind.CNOT, OpKind.SWAP}
_CLASSICAL = {OpKind.CCX, OpKind.CCZ, OpKind.CCS}
_COMPOUND_PARTS = {
    OpKind.H, OpKind.X, OpKind.Z, OpKind.S, OpKind.Sdg,
    OpKind.T, OpKind.Tdg, OpKind.CNOT, OpKind.SWAP,
}


@dataclass(frozen=True)
class Operation:
    """One gate, preparation, or measurement at a fixed time step."""

    kind: OpKind
    sites: tuple[Site, ...]
    step: int
    control: Optional[int] = None
    single_error: bool = False
    parts: tuple[OpKind, ...] = ()

    def __post_init__(self) -> None:
        sites = tuple(Site(*s) for s in self.sites)
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "parts", tuple(self.parts))
        if self.step < 0:
            raise ValueError(f"negative step: {self.step}")
        if self.kind in _TWO_SITE:
            if len(sites) != 2:
                raise ValueError(f"{self.kind.value} needs two sites, got {len(sites)}")
        elif self.kind is OpKind.Compound:
            if not 1 <= len(sites) <= 2:
                raise ValueError("compound operations act on one or two sites")
            if not self.parts:
                raise ValueError("compound operation with no parts")
            bad = [p for p in self.parts if p not in _COMPOUND_PARTS]
            if bad:
                raise ValueError(f"compound part {bad[0].value} is not a plain gate")
        elif len(sites) != 1:
            raise ValueError(f"{self.kind.value} needs one site, got {len(sites)}")
        if len(set(sites)) != len(sites):
            raise ValueError("operation sites must be distinct")
        if self.single_error and self.kind is not OpKind.SWAP:
            raise ValueError("single_error applies only to SWAP")
        if (self.control is not None) != (self.kind in _CLASSICAL):
            raise ValueError("control index is for classically controlled kinds only")

    def swaps_roles(self) -> bool:
        """True when the operation moves qubits between its two sites."""
        if self.kind is OpKind.SWAP:
            return True
        if self.kind is OpKind.Compound and len(self.sites) == 2:
            return sum(1 for p in self.parts if p is OpKind.SWAP) % 2 == 1
        return False


@dataclass(frozen=True)
class RecoveryHook:
    """Marks one extraction's outcomes as a recovery input.

    After ``step``, the verifier decodes the listed measurement
    outcomes and applies a correction of ``basis`` type to the target
    sites.
    """

    label: str
    basis: str
    measurements: tuple[int, ...]
    targets: tuple[Site, ...]
    step: int

    def __post_init__(self) -> None:
        if self.basis not in ("X", "Z"):
            raise ValueError(f"basis must be 'X' or 'Z', got {self.basis!r}")
        object.__setattr__(self, "measurements", tuple(self.measurements))
        object.__setattr__(self, "targets", tuple(Site(*s) for s in self.targets))


@dataclass(frozen=True)
class Circuit:
    """A scheduled operation list on a 2 x width site grid.

    ``roles`` lists the initially computational sites; everything else
    starts as a placeholder.  PrepZero promotes a site, MeasureZ
    demotes it after the measuring step, and SWAPs carry roles along
    with the qubits they move, so roles are a function of time.
    Operations must be ordered by step; measurement indices count
    MeasureZ operations in that order.
    """

    width: int
    steps: int
    operations: tuple[Operation, ...]
    roles: Mapping[Site, QubitRole]
    hooks: tuple[RecoveryHook, ...] = ()
    blocks: tuple[tuple[Site, ...], ...] = ()
    gadget: Optional[str] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "operations", tuple(self.operations))
        object.__setattr__(
            self, "roles", {Site(*s): r for s, r in dict(self.roles).items()}
        )
        object.__setattr__(self, "hooks", tuple(self.hooks))
        object.__setattr__(
            self, "blocks", tuple(tuple(Site(*s) for s in b) for b in self.blocks)
        )
        if self.width < 1:
            raise ValueError(f"width must be positive, got {self.width}")
        if self.steps < 0:
            raise ValueError(f"steps must be nonnegative, got {self.steps}")
        seen_step_sites: set[tuple[int, Site]] = set()
        measured = 0
        meas_steps: list[int] = []
        prev_step = 0
        for op in self.operations:
            if op.step < prev_step:
                raise ValueError("operations must be ordered by step")
            prev_step = op.step
            if op.step >= self.steps:
                raise ValueError(f"operation at step {op.step} beyond {self.steps}")
            for site in op.sites:
                if site.row not in (0, 1) or not 0 <= site.col < self.width:
                    raise ValueError(f"site {site} outside the 2x{self.width} grid")
                key = (op.step, site)
                if key in seen_step_sites:
                    raise ValueError(f"site {site} touched twice at step {op.step}")
                seen_step_sites.add(key)
            if op.control is not None:
                if not 0 <= op.control < measured:
                    raise ValueError(
                        f"control references measurement {op.control} which does "
                        f"not precede step {op.step}"
                    )
                if meas_steps[op.control] >= op.step:
                    raise ValueError(
                        f"control references measurement {op.control} at the same "
                        f"or a later step"
                    )
            if op.kind is OpKind.MeasureZ:
                meas_steps.append(op.step)
                measured += 1

    @property
    def measurements(self) -> int:
        """Number of classical outcome wires."""
        return sum(1 for op in self.operations if op.kind is OpKind.MeasureZ)

    def role_timeline(self) -> list[dict[Site, QubitRole]]:
        """Role of every active site at each step, following qubit moves."""
        current = dict(self.roles)
        per_step: list[dict[Site, QubitRole]] = []
        by_step: dict[int, list[Operation]] = {}
        for op in self.operations:
            by_step.setdefault(op.step, []).append(op)
        for step in range(self.steps):
            for op in by_step.get(step, ()):
                if op.kind is OpKind.PrepZero:
                    current[op.sites[0]] = QubitRole.Computational
            per_step.append(dict(current))
            for op in by_step.get(step, ()):
                if op.kind is OpKind.MeasureZ:
                    current[op.sites[0]] = QubitRole.Placeholder
                elif op.swaps_roles():
                    a, b = op.sites
                    ra = current.get(a, QubitRole.Placeholder)
                    rb = current.get(b, QubitRole.Placeholder)
                    current[a], current[b] = rb, ra
        return per_step


# ---------------------------------------------------------------------------
# Program assembly helper


class _Program:
    """Accumulates operations and renumbers measurements on finish."""

    def __init__(self, width: int):
        self.width = width
        self.ops: list[Operation] = []
        self.hooks: list[RecoveryHook] = []
        self._mz_provisional: dict[int, int] = {}
        self._meas = 0

    def add(self, kind: OpKind, sites: Sequence[Union[Site, tuple[int, int]]],
            step: int, **kw) -> Optional[int]:
        op = Operation(kind=kind, sites=tuple(Site(*s) for s in sites), step=step, **kw)
        self.ops.append(op)
        if kind is OpKind.MeasureZ:
            self._mz_provisional[id(op)] = self._meas
            self._meas += 1
            return self._meas - 1
        return None

    def finish(
        self,
        roles: Mapping[Site, QubitRole],
        steps: Optional[int] = None,
        blocks: Sequence[Sequence[Site]] = (),
        gadget: Optional[str] = None,
    ) -> Circuit:
        ordered = sorted(self.ops, key=lambda op: op.step)
        perm: dict[int, int] = {}
        final = 0
        for op in ordered:
            if op.kind is OpKind.MeasureZ:
                perm[self._mz_provisional[id(op)]] = final
                final += 1
        ops = tuple(
            replace(op, control=perm[op.control]) if op.control is not None else op
            for op in ordered
        )
        hooks = tuple(
            replace(h, measurements=tuple(perm[i] for i in h.measurements))
            for h in self.hooks
        )
        depth = steps if steps is not None else (
            max((op.step for op in ordered), default=-1) + 1
        )
        return Circuit(
            width=self.width,
            steps=depth,
            operations=ops,
            roles=roles,
            hooks=hooks,
            blocks=tuple(tuple(b) for b in blocks),
            gadget=gadget,
        )


# ---------------------------------------------------------------------------
# Encoder

# Layered encoder for the block code: seed Hadamards, then ten
# nearest-neighbor gates.  (c, t) pairs are CNOTs, {a, b} pairs are
# single-error SWAPs.  Wire numbers are block-relative.
ENCODE_LAYERS: tuple[tuple[tuple, ...], ...] = (
    (("H", 2), ("H", 4), ("H", 5)),
    (("CNOT", 2, 1), ("CNOT", 4, 3)),
    (("CNOT", 1, 0), ("SESWAP", 2, 3), ("SESWAP", 4, 5)),
    (("CNOT", 2, 1), ("CNOT", 4, 3), ("CNOT", 5, 6)),
    (("CNOT", 3, 2), ("CNOT", 4, 5)),
)

ENCODE_DEPTH = len(ENCODE_LAYERS)

X_EXTRACTION_DEPTH = 2 * ENCODE_DEPTH + 3    # prep, encode, couple, decode, measure
Z_EXTRACTION_DEPTH = X_EXTRACTION_DEPTH + 2  # plus two Hadamard layers
EC_DEPTH = X_EXTRACTION_DEPTH + Z_EXTRACTION_DEPTH

_SLIDE = BLOCK_PITCH  # columns each block travels during interchange
SWAP_GADGET_DEPTH = _SLIDE + BLOCK_SIZE + 1  # pipelined drop/slide/rise
MEMORY_GADGET_DEPTH = SWAP_GADGET_DEPTH      # idle slot of equal duration
MEMORY_EXREC_DEPTH = 2 * EC_DEPTH + MEMORY_GADGET_DEPTH


def _emit_layer(prog: _Program, layer: Iterable[tuple], row: int, col0: int,
                step: int) -> None:
    for gate in layer:
        if gate[0] == "H":
            prog.add(OpKind.H, [Site(row, col0 + gate[1])], step)
        elif gate[0] == "CNOT":
            prog.add(
                OpKind.CNOT,
                [Site(row, col0 + gate[1]), Site(row, col0 + gate[2])],
                step,
            )
        else:
            prog.add(
                OpKind.SWAP,
                [Site(row, col0 + gate[1]), Site(row, col0 + gate[2])],
                step,
                single_error=True,
            )


def _encode_into(prog: _Program, row: int, col0: int, start: int,
                 reverse: bool = False) -> int:
    layers = ENCODE_LAYERS[::-1] if reverse else ENCODE_LAYERS
    for offset, layer in enumerate(layers):
        _emit_layer(prog, layer, row, col0, start + offset)
    return start + len(layers)


def build_encode(row: int = 0, col0: int = 0) -> Circuit:
    """Unitary mapping |0000000> to the logical zero of one block."""
    prog = _Program(width=col0 + BLOCK_SIZE)
    _encode_into(prog, row, col0, 0)
    roles = {Site(row, col0 + q): QubitRole.Computational for q in range(BLOCK_SIZE)}
    block = tuple(Site(row, col0 + q) for q in range(BLOCK_SIZE))
    return prog.finish(roles, blocks=(block,))


def build_decode(row: int = 0, col0: int = 0) -> Circuit:
    """Exact inverse of :func:`build_encode` (all gates are involutions)."""
    prog = _Program(width=col0 + BLOCK_SIZE)
    _encode_into(prog, row, col0, 0, reverse=True)
    roles = {Site(row, col0 + q): QubitRole.Computational for q in range(BLOCK_SIZE)}
    block = tuple(Site(row, col0 + q) for q in range(BLOCK_SIZE))
    return prog.finish(roles, blocks=(block,))


# ---------------------------------------------------------------------------
# Single-error swap of two computational qubits

def build_single_error_swap(
    c1: Site, c2: Site, roles: Optional[Mapping[Site, QubitRole]] = None
) -> Circuit:
    """Exchange two same-row neighbors via the facing placeholder sites.

    Each of the four plain SWAPs touches at most one computational
    qubit, so no single fault can corrupt both travellers.  Equal sites
    produce an empty circuit.
    """
    c1, c2 = Site(*c1), Site(*c2)
    if c1 == c2:
        return Circuit(width=c1.col + 1, steps=0, operations=(),
                       roles={c1: QubitRole.Computational})
    if c1.row != c2.row or abs(c1.col - c2.col) != 1:
        raise ValueError(f"sites must be same-row neighbors, got {c1} and {c2}")
    if c1.col > c2.col:
        c1, c2 = c2, c1
    other = 1 - c1.row
    s1, s2 = Site(other, c1.col), Site(other, c2.col)
    if roles is not None:
        for scratch in (s1, s2):
            if roles.get(scratch, QubitRole.Placeholder) is QubitRole.Computational:
                raise ValueError(f"scratch site {scratch} is not a placeholder")

    prog = _Program(width=c2.col + 1)
    prog.add(OpKind.SWAP, [c1, s1], 0)
    prog.add(OpKind.SWAP, [c2, c1], 1)
    prog.add(OpKind.SWAP, [s1, s2], 1)
    prog.add(OpKind.SWAP, [s2, c2], 2)
    base_roles = {c1: QubitRole.Computational, c2: QubitRole.Computational}
    return prog.finish(base_roles, blocks=((c1, c2),))


# ---------------------------------------------------------------------------
# Mesh / unmesh

def _mesh_seswaps(k: int) -> list[tuple[int, int, int]]:
    """(step, col, col+1) single-error swaps interleaving two k-blocks."""
    arrangement = list(range(2 * k))  # 0..k-1 data, k..2k-1 ancilla
    swaps: list[tuple[int, int]] = []
    for i in range(k):
        src = arrangement.index(k + i)
        dst = 2 * i + 1
        for col in range(src, dst, -1):
            swaps.append((col - 1, col))
            arrangement[col - 1], arrangement[col] = (
                arrangement[col], arrangement[col - 1],
            )
    free_at = [0] * (2 * k)
    scheduled: list[tuple[int, int, int]] = []
    for a, b in swaps:
        step = max(free_at[a], free_at[b])
        scheduled.append((step, a, b))
        free_at[a] = free_at[b] = step + 1
    return scheduled


def _physical_mesh_moves(k: int) -> list[tuple[int, Site, Site]]:
    """Plain-SWAP interleave: ancillas drop, slide left, and rise.

    Data qubits slide right along row 0 into the vacated columns.  A
    greedy occupancy scheduler moves every traveller toward its target
    whenever the next site is free, which realizes the drawn
    three-block instance in four discrete steps.
    """
    position: dict[str, Site] = {}
    target: dict[str, Site] = {}
    phase: dict[str, str] = {}
    for i in range(k):
        position[f"d{i}"] = Site(0, i)
        target[f"d{i}"] = Site(0, 2 * i)
        phase[f"d{i}"] = "slide"
        position[f"a{i}"] = Site(0, k + i)
        target[f"a{i}"] = Site(0, 2 * i + 1)
        phase[f"a{i}"] = "drop"
    occupied = set(position.values())
    moves: list[tuple[int, Site, Site]] = []
    step = 0
    while any(position[t] != target[t] for t in position):
        acted = False
        touched: set[Site] = set()
        frozen = dict(position)
        for name in sorted(position, key=lambda n: -frozen[n].col):
            cur = position[name]
            if cur == target[name]:
                continue
            if phase[name] == "drop":
                nxt = Site(1, cur.col)
            elif cur.row == 1 and cur.col == target[name].col:
                nxt = Site(0, cur.col)
            elif cur.row == 1:
                nxt = Site(1, cur.col - 1)
            else:
                nxt = Site(0, cur.col + (1 if target[name].col > cur.col else -1))
            if nxt in occupied or nxt in touched or cur in touched:
                continue
            moves.append((step, cur, nxt))
            touched.update((cur, nxt))
            occupied.discard(cur)
            occupied.add(nxt)
            position[name] = nxt
            if phase[name] == "drop":
                phase[name] = "slide"
            acted = True
        if not acted:
            raise RuntimeError("mesh routing stalled")
        step += 1
    return moves


def build_mesh(k: int, physical: bool = False) -> Circuit:
    """Interleave a k-qubit data block with a k-qubit ancilla block.

    The default uses k(k-1)/2 single-error SWAPs along row 0; the
    physical variant expands to plain SWAPs using row 1 as scratch.
    """
    if k < 1:
        raise ValueError(f"block size must be positive, got {k}")
    prog = _Program(width=2 * k)
    roles = {Site(0, c): QubitRole.Computational for c in range(2 * k)}
    if physical:
        for step, src, dst in _physical_mesh_moves(k):
            prog.add(OpKind.SWAP, [src, dst], step)
    else:
        for step, a, b in _mesh_seswaps(k):
            prog.add(OpKind.SWAP, [Site(0, a), Site(0, b)], step, single_error=True)
    data = tuple(Site(0, 2 * i) for i in range(k))
    ancilla = tuple(Site(0, 2 * i + 1) for i in range(k))
    return prog.finish(roles, blocks=(data, ancilla))


def build_unmesh(k: int, physical: bool = False) -> Circuit:
    """Inverse of :func:`build_mesh`: the same swaps in reverse order."""
    mesh = build_mesh(k, physical=physical)
    prog = _Program(width=mesh.width)
    for op in reversed(mesh.operations):
        prog.add(op.kind, op.sites, mesh.steps - 1 - op.step,
                 single_error=op.single_error)
    roles = {Site(0, c): QubitRole.Computational for c in range(2 * k)}
    data = tuple(Site(0, c) for c in range(k))
    ancilla = tuple(Site(0, c) for c in range(k, 2 * k))
    return prog.finish(roles, steps=mesh.steps, blocks=(data, ancilla))


# ---------------------------------------------------------------------------
# Syndrome extraction

def _wire_layers(reverse: bool = False) -> dict[int, list[int]]:
    """Encode (or decode) layer indices touching each block wire."""
    layers = ENCODE_LAYERS[::-1] if reverse else ENCODE_LAYERS
    busy: dict[int, list[int]] = {q: [] for q in range(BLOCK_SIZE)}
    for idx, layer in enumerate(layers):
        for gate in layer:
            for wire in gate[1:]:
                busy[wire].append(idx)
    return busy


def _extraction_into(
    prog: _Program,
    kind: str,
    col0: int,
    start: int,
    label: str,
) -> int:
    """Emit one syndrome extraction; returns the first free step.

    Ancilla wires are prepared just before their first gate and
    measured right after their last, so placeholder time never counts
    as storage.  X-type extractions couple ancilla onto data (catching
    data Z errors); Z-type sandwich the coupling between transversal
    Hadamard layers and catch data X errors.
    """
    if kind not in ("X", "Z"):
        raise ValueError(f"extraction kind must be 'X' or 'Z', got {kind!r}")
    hadamards = 1 if kind == "Z" else 0
    enc_busy = _wire_layers()
    dec_busy = _wire_layers(reverse=True)
    enc0 = start + 1
    cnot_step = enc0 + ENCODE_DEPTH + hadamards
    dec0 = cnot_step + 1 + hadamards

    indices: list[int] = []
    end = 0
    for q in range(BLOCK_SIZE):
        anc = Site(1, col0 + q)
        first = enc0 + min(enc_busy[q])
        last = dec0 + max(dec_busy[q])
        prog.add(OpKind.PrepZero, [anc], first - 1)
        idx = prog.add(OpKind.MeasureZ, [anc], last + 1)
        indices.append(idx)
        end = max(end, last + 2)

    for offset, layer in enumerate(ENCODE_LAYERS):
        _emit_layer(prog, layer, 1, col0, enc0 + offset)
    if hadamards:
        for q in range(BLOCK_SIZE):
            prog.add(OpKind.H, [Site(1, col0 + q)], cnot_step - 1)
    for q in range(BLOCK_SIZE):
        data, anc = Site(0, col0 + q), Site(1, col0 + q)
        pair = [anc, data] if kind == "X" else [data, anc]
        prog.add(OpKind.CNOT, pair, cnot_step)
    if hadamards:
        for q in range(BLOCK_SIZE):
            prog.add(OpKind.H, [Site(1, col0 + q)], cnot_step + 1)
    for offset, layer in enumerate(ENCODE_LAYERS[::-1]):
        _emit_layer(prog, layer, 1, col0, dec0 + offset)

    prog.hooks.append(RecoveryHook(
        label=label,
        basis="Z" if kind == "X" else "X",
        measurements=tuple(indices),
        targets=tuple(Site(0, col0 + q) for q in range(BLOCK_SIZE)),
        step=end - 1,
    ))
    return end


def build_syndrome_extraction(kind: str, col0: int = 0) -> Circuit:
    """One extraction against the data block at columns col0..col0+6."""
    prog = _Program(width=col0 + BLOCK_SIZE)
    _extraction_into(prog, kind, col0, 0, label=f"{kind}-extraction")
    roles = {Site(0, col0 + q): QubitRole.Computational for q in range(BLOCK_SIZE)}
    block = tuple(Site(0, col0 + q) for q in range(BLOCK_SIZE))
    return prog.finish(roles, blocks=(block,))


def _ec_into(prog: _Program, col0: int, start: int, tag: str) -> int:
    """Full error correction: X-type then Z-type extraction."""
    mid = _extraction_into(prog, "X", col0, start, label=f"{tag}/X")
    return _extraction_into(prog, "Z", col0, mid, label=f"{tag}/Z")


# ---------------------------------------------------------------------------
# Extended rectangles

def _swap_gadget_into(prog: _Program, start: int) -> int:
    """Interchange the blocks at columns 0..6 and 9..15 by a row hop.

    Block A drops to row 1 and slides right while block B slides left
    along row 0 into the vacated columns; every plain SWAP pairs one
    traveller with a placeholder.  Wires enter the pipeline staggered
    so neighbors never collide.
    """
    for q in range(BLOCK_SIZE):
        stagger = start + (BLOCK_SIZE - 1 - q)
        prog.add(OpKind.SWAP, [Site(0, q), Site(1, q)], stagger)
        for j in range(_SLIDE):
            prog.add(OpKind.SWAP, [Site(1, q + j), Site(1, q + j + 1)],
                     stagger + 1 + j)
        prog.add(OpKind.SWAP, [Site(1, q + _SLIDE), Site(0, q + _SLIDE)],
                 stagger + 1 + _SLIDE)
    for q in range(BLOCK_SIZE):
        stagger = start + q
        col = BLOCK_PITCH + q
        for j in range(_SLIDE):
            prog.add(OpKind.SWAP, [Site(0, col - j), Site(0, col - j - 1)],
                     stagger + 1 + j)
    return start + SWAP_GADGET_DEPTH


def _hop_block_into(prog: _Program, start: int, src_col: int, dst_col: int) -> int:
    """Drop the block at src_col to row 1 and slide it left to dst_col."""
    d = src_col - dst_col
    if d <= 0:
        raise ValueError("hop must travel leftward")
    for q in range(BLOCK_SIZE):
        stagger = start + q
        prog.add(OpKind.SWAP, [Site(0, src_col + q), Site(1, src_col + q)], stagger)
        for j in range(d):
            prog.add(OpKind.SWAP,
                     [Site(1, src_col + q - j), Site(1, src_col + q - j - 1)],
                     stagger + 1 + j)
    return start + d + BLOCK_SIZE


def _block_sites(block_col: int, row: int = 0) -> tuple[Site, ...]:
    return tuple(Site(row, block_col + q) for q in range(BLOCK_SIZE))


GADGET_NAMES = ("memory", "swap", "readout", "tskeleton")


def _normalize_gadget(gadget: str) -> str:
    name = gadget.strip().lower()
    name = {"t": "tskeleton", "tgate": "tskeleton"}.get(name, name)
    if name not in GADGET_NAMES:
        raise ValueError(f"unknown gadget {gadget!r}")
    return name


def assemble_exrec(gadget: str) -> Circuit:
    """Extended rectangle: leading EC, transversal gadget, trailing EC.

    Depths are synchronized: the swap exRec matches the memory exRec
    exactly, readout doubles it, and the T skeleton is five times as
    deep.
    """
    name = _normalize_gadget(gadget)
    if name == "memory":
        return _assemble_memory()
    if name == "swap":
        return _assemble_swap()
    if name == "readout":
        return _assemble_readout()
    return _assemble_tskeleton()


def _assemble_memory() -> Circuit:
    prog = _Program(width=BLOCK_SIZE)
    end = _ec_into(prog, 0, 0, "lead")
    gadget_end = end + MEMORY_GADGET_DEPTH  # idle slot, same span as a swap
    total = _ec_into(prog, 0, gadget_end, "trail")
    assert total == MEMORY_EXREC_DEPTH
    roles = {s: QubitRole.Computational for s in _block_sites(0)}
    return prog.finish(roles, steps=total, blocks=(_block_sites(0),),
                       gadget="memory")


def _assemble_swap() -> Circuit:
    width = BLOCK_PITCH + BLOCK_SIZE
    prog = _Program(width=width)
    lead_a = _ec_into(prog, 0, 0, "lead-a")
    lead_b = _ec_into(prog, BLOCK_PITCH, 0, "lead-b")
    end = _swap_gadget_into(prog, max(lead_a, lead_b))
    trail_a = _ec_into(prog, 0, end, "trail-a")
    trail_b = _ec_into(prog, BLOCK_PITCH, end, "trail-b")
    total = max(trail_a, trail_b)
    assert total == MEMORY_EXREC_DEPTH
    roles = {s: QubitRole.Computational
             for s in _block_sites(0) + _block_sites(BLOCK_PITCH)}
    return prog.finish(
        roles, steps=total,
        blocks=(_block_sites(0), _block_sites(BLOCK_PITCH)),
        gadget="swap",
    )


def _assemble_readout() -> Circuit:
    prog = _Program(width=BLOCK_SIZE)
    end = _ec_into(prog, 0, 0, "lead")
    # Transversal readout, then rebuild the block: fresh preparation,
    # in-place encode, and one verification extraction.
    for q in range(BLOCK_SIZE):
        prog.add(OpKind.MeasureZ, [Site(0, q)], end)
    for q in range(BLOCK_SIZE):
        prog.add(OpKind.PrepZero, [Site(0, q)], end + 1)
    enc_end = _encode_into(prog, 0, 0, end + 2)
    verify_end = _extraction_into(prog, "X", 0, enc_end, label="verify")
    total = 2 * MEMORY_EXREC_DEPTH
    trail_start = total - EC_DEPTH
    if verify_end > trail_start:
        raise AssertionError("readout exRec exceeded its depth budget")
    _ec_into(prog, 0, trail_start, "trail")
    roles = {s: QubitRole.Computational for s in _block_sites(0)}
    return prog.finish(roles, steps=total, blocks=(_block_sites(0),),
                       gadget="readout")


def _assemble_tskeleton() -> Circuit:
    """Non-Clifford gadget skeleton on three blocks.

    A magic block and a phase block are prepared late, rotated with
    transversal T layers, verified, hopped down to row 1 beneath the
    data block, consumed by transversal coupling and measurement, and
    their outcomes steer classically controlled corrections.  The
    skeleton carries realistic location counts but is not a target of
    fault-path verification.
    """
    data_col, magic_col, phase_col = 0, BLOCK_PITCH, 2 * BLOCK_PITCH
    prog = _Program(width=phase_col + BLOCK_SIZE)

    _ec_into(prog, data_col, 0, "lead")

    def block_prep(col0: int, start: int, rotations: Sequence[OpKind]) -> int:
        for q in range(BLOCK_SIZE):
            prog.add(OpKind.PrepZero, [Site(0, col0 + q)], start)
        t = _encode_into(prog, 0, col0, start + 1)
        for kind in rotations:
            for q in range(BLOCK_SIZE):
                prog.add(kind, [Site(0, col0 + q)], t)
            t += 1
        t = _extraction_into(prog, "X", col0, t, label=f"verify-{col0}/X")
        return _extraction_into(prog, "Z", col0, t, label=f"verify-{col0}/Z")

    # Magic block: three rotation layers; phase block: one.  That puts
    # 21 + 7 transversal T locations in the skeleton.
    magic_ready = block_prep(magic_col, EC_DEPTH,
                             (OpKind.T, OpKind.Tdg, OpKind.T))
    t = _hop_block_into(prog, magic_ready, magic_col, data_col)
    for q in range(BLOCK_SIZE):
        prog.add(OpKind.CNOT, [Site(0, data_col + q), Site(1, data_col + q)], t)
    magic_meas = []
    for q in range(BLOCK_SIZE):
        magic_meas.append(
            prog.add(OpKind.MeasureZ, [Site(1, data_col + q)], t + 1))
    for q in range(BLOCK_SIZE):
        prog.add(OpKind.CCS, [Site(0, data_col + q)], t + 2,
                 control=magic_meas[q])
    mid_a = _ec_into(prog, data_col, t + 3, "mid-a")

    phase_ready = block_prep(phase_col, EC_DEPTH + 28, (OpKind.T,))
    s = _hop_block_into(prog, max(phase_ready, mid_a), phase_col, data_col)
    for q in range(BLOCK_SIZE):
        prog.add(OpKind.CNOT, [Site(0, data_col + q), Site(1, data_col + q)], s)
    phase_meas = []
    for q in range(BLOCK_SIZE):
        phase_meas.append(
            prog.add(OpKind.MeasureZ, [Site(1, data_col + q)], s + 1))
    for q in range(BLOCK_SIZE):
        prog.add(OpKind.CCZ, [Site(0, data_col + q)], s + 2,
                 control=phase_meas[q])
    mid_b = _ec_into(prog, data_col, s + 3, "mid-b")

    total = 5 * MEMORY_EXREC_DEPTH
    trail_start = total - EC_DEPTH
    if mid_b > trail_start:
        raise AssertionError("T skeleton exceeded its depth budget")
    _ec_into(prog, data_col, trail_start, "trail")
    roles = {site: QubitRole.Computational for site in _block_sites(data_col)}
    return prog.finish(roles, steps=total, blocks=(_block_sites(data_col),),
                       gadget="tskeleton")


# ---------------------------------------------------------------------------
# Census extraction

_SWAP_KIND_OPS = {
    OpKind.H, OpKind.X, OpKind.Z, OpKind.S, OpKind.Sdg,
    OpKind.CNOT, OpKind.SWAP, OpKind.Compound,
    OpKind.CCX, OpKind.CCZ, OpKind.CCS,
}


def extract_census(
    circuit: Circuit, level: Union[int, str] = "n", gadget: Optional[str] = None
) -> ExRecCensus:
    """Count fault locations in an assembled circuit.

    Idle computational wires accrue one storage location per step and
    placeholder wires accrue nothing.  Gates count one location each
    in the two-qubit class regardless of arity, measurements count one
    readout location, and T rotations count their own kind at level n
    (level 1 folds them into the gate class).  Preparations carry no
    census weight.
    """
    level_key = str(level)
    if level_key not in ("1", "n"):
        raise ValueError(f"level must be 1 or 'n', got {level!r}")
    label = gadget or circuit.gadget
    if label is None:
        raise ValueError("no gadget label: pass gadget= or use assemble_exrec")
    label = _normalize_gadget(label)
    census_label = {"tskeleton": "tgate"}.get(label, label)

    memory = swap = tgate = readout = 0
    timeline = circuit.role_timeline()
    by_step: dict[int, list[Operation]] = {}
    for op in circuit.operations:
        by_step.setdefault(op.step, []).append(op)
    for step in range(circuit.steps):
        touched: set[Site] = set()
        for op in by_step.get(step, ()):
            touched.update(op.sites)
            if op.kind in (OpKind.T, OpKind.Tdg):
                if level_key == "n":
                    tgate += 1
                else:
                    swap += 1
            elif op.kind in _SWAP_KIND_OPS:
                swap += 1
            elif op.kind is OpKind.MeasureZ:
                readout += 1
            elif op.kind is OpKind.Identity:
                memory += 1
        for site, role in timeline[step].items():
            if role is QubitRole.Computational and site not in touched:
                memory += 1

    counts = {
        LocationKind.Memory: AffineCount(memory),
        LocationKind.Swap: AffineCount(swap),
        LocationKind.Readout: AffineCount(readout),
    }
    if level_key == "n":
        counts[LocationKind.TGate] = AffineCount(tgate)
    return ExRecCensus(
        gadget=census_label,
        counts=counts,
        depth=AffineCount(circuit.steps),
    )


# ---------------------------------------------------------------------------
# Layout checking

def check_layout(circuit: Circuit) -> list[str]:
    """Geometric and role legality; returns one message per violation."""
    violations: list[str] = []
    timeline = circuit.role_timeline()
    seen: set[tuple[int, Site]] = set()
    for op in circuit.operations:
        for site in op.sites:
            key = (op.step, site)
            if key in seen:
                violations.append(f"step {op.step}: site {site} touched twice")
            seen.add(key)
            if site.row not in (0, 1) or not 0 <= site.col < circuit.width:
                violations.append(f"step {op.step}: site {site} out of range")
        if len(op.sites) == 2:
            a, b = op.sites
            dr, dc = abs(a.row - b.row), abs(a.col - b.col)
            if dr == 1 and dc == 1:
                violations.append(
                    f"step {op.step}: diagonal gate between {a} and {b}"
                )
            elif dr + dc != 1:
                violations.append(
                    f"step {op.step}: non-adjacent gate between {a} and {b}"
                )
        if op.kind is OpKind.SWAP and op.step < len(timeline):
            roles = timeline[op.step]
            comp = [
                s for s in op.sites
                if roles.get(s, QubitRole.Placeholder) is QubitRole.Computational
            ]
            if not op.single_error and len(comp) == 2:
                violations.append(
                    f"step {op.step}: plain SWAP between computational qubits "
                    f"{op.sites[0]} and {op.sites[1]}"
                )
            if op.single_error and len(comp) < 2:
                violations.append(
                    f"step {op.step}: single-error SWAP on placeholder wire"
                )
    return violations


# ---------------------------------------------------------------------------
# Export

def _site_token(site: Site) -> str:
    return f"r{site.row}c{site.col}"


def export_circuit(circuit: Circuit) -> str:
    """Plain-text listing: one operation per line, steps separated by
    blank lines, lines ordered by the operation's first site."""
    lines: list[str] = []
    by_step: dict[int, list[Operation]] = {}
    for op in circuit.operations:
        by_step.setdefault(op.step, []).append(op)
    first = True
    for step in sorted(by_step):
        if not first:
            lines.append("")
        first = False
        for op in sorted(by_step[step], key=lambda o: min(o.sites)):
            name = op.kind.value
            if op.kind is OpKind.SWAP and op.single_error:
                name = "SESWAP"
            if op.kind is OpKind.Compound:
                name = "GROUP:" + "+".join(p.value for p in op.parts)
            if op.control is not None:
                name = f"{name}[m{op.control}]"
            sites = ",".join(_site_token(s) for s in op.sites)
            lines.append(f"{name}@{sites}")
    return "\n".join(lines) + "\n"
