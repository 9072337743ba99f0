"""Memory-experiment circuit builders.

A build produces the complete annotated circuit for one logical memory
run: data initialization merged into the first reset layer, `rounds`
syndrome-extraction cycles, and a transversal data readout merged into
the last measurement layer.  Every layer touches every qubit exactly
once (IDLE fills the gaps), so layer count is circuit depth and noise
placement can be read off the instructions directly.

Detector bookkeeping uses record inclusion rather than classically
controlled corrections: where a syndrome bit kicks back onto data, the
affected downstream detectors and the logical observable absorb that
measurement record, which keeps the circuit purely Clifford + reset +
measure.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit, CircuitBuilder, CircuitError, Instruction
from .layout import Layout, build_layout

BASES = ("X", "Z")


class BuildError(CircuitError):
    pass


@dataclass(frozen=True)
class BuildSpec:
    """What to build: family, code distance, cycle count, memory basis."""

    family: str
    distance: int
    rounds: int
    basis: str = "Z"

    def __post_init__(self) -> None:
        from .layout import FAMILIES

        if self.family not in FAMILIES:
            raise BuildError(f"unknown family {self.family!r}")
        if self.distance < 3 or self.distance % 2 == 0:
            raise BuildError(f"distance must be odd and >= 3, got {self.distance}")
        if self.rounds < 1:
            raise BuildError(f"rounds must be >= 1, got {self.rounds}")
        if self.basis not in BASES:
            raise BuildError(f"basis must be X or Z, got {self.basis!r}")


def benchmark_rounds(distance: int) -> int:
    # benchmark convention: cycles scale with distance
    return 4 * distance


@dataclass(frozen=True)
class CyclePlan:
    """Layer templates for one syndrome-extraction cycle.

    `reset` and `measure` are single layers; `gates` is the ordered
    two-qubit block between them.  Templates cover only active qubits;
    the assembler pads each layer with IDLE.
    """

    reset: tuple[Instruction, ...]
    gates: tuple[tuple[Instruction, ...], ...]
    measure: tuple[Instruction, ...]

    @property
    def depth(self) -> int:
        return len(self.gates) + 2


def _idle_fill(instrs: list[Instruction], num_qubits: int) -> list[Instruction]:
    used = set()
    for ins in instrs:
        used.update(ins.targets)
    rest = tuple(q for q in range(num_qubits) if q not in used)
    if rest:
        instrs = instrs + [Instruction("IDLE", rest)]
    return instrs


# --- superdense family ----------------------------------------------------
#
# Each face carries an ancilla pair (aZ, aX) prepared in a Bell state by
# the first entangling layer and unprepared by the last, so one pair
# extracts both syndromes of its face per cycle.  Left-half members talk
# to aZ, right-half members to aX.  Member i enters at gate layer
# _SD_SCHEDULE[i] and leaves at gate layer _SD_SCHEDULE[6+i], with the
# middle six layers data->ancilla for the first three and ancilla->data
# for the last three.  The in/out pairing (3 <-> 6) is what makes the
# two layers adjacent after the step swap of the CXSWAP variant.

_SD_MEMBER_OFFSETS = ((-2, 2), (2, 2), (4, 0), (2, -2), (-2, -2), (-4, 0))
_SD_SCHEDULE = (3, 1, 2, 3, 1, 2, 6, 4, 5, 6, 4, 5)


def _sd_face_gates(layout: Layout):
    """Per-face CNOT assignments: 8 gate layers of (control, target) pairs."""
    layers = [[] for _ in range(8)]
    for face in layout.faces:
        cx, cy = face.center
        a_z, a_x = face.ancillas
        zi = layout.index_of(a_z)
        xi = layout.index_of(a_x)
        layers[0].append((xi, zi))
        layers[7].append((xi, zi))
        for i, (dx, dy) in enumerate(_SD_MEMBER_OFFSETS):
            coord = (cx + dx, cy + dy)
            if coord not in layout.qubits:
                continue
            di = layout.index_of(coord)
            anc = zi if dx < 0 else xi
            layers[_SD_SCHEDULE[i]].append((di, anc))
            layers[_SD_SCHEDULE[6 + i]].append((anc, di))
    return layers


def _left_members(layout: Layout, face):
    return frozenset(m for m in face.members if m[0] < face.center[0])


def _z_correction_faces(layout: Layout):
    """Faces g whose aZ kickback lands on face f an odd number of times.

    Pulling a face-Z region through one cycle deforms it by the faces
    listed here, so Z detectors and final Z closures must include the
    previous-round aZ records of these faces to stay deterministic.
    """
    corr = {}
    for f in layout.faces:
        members = set(f.members)
        corr[f.center] = tuple(
            g.center
            for g in layout.faces
            if len(_left_members(layout, g) & members) % 2 == 1
        )
    return corr


def _odd_overlap_faces(layout: Layout, support):
    support = set(support)
    return tuple(
        f.center
        for f in layout.faces
        if len(_left_members(layout, f) & support) % 2 == 1
    )


def build_superdense(spec: BuildSpec) -> Circuit:
    if spec.family != "superdense":
        raise BuildError(f"build_superdense got family {spec.family!r}")
    layout = build_layout(spec.distance, spec.family)
    n = len(layout.qubits)
    b = CircuitBuilder(n)

    data_idx = [layout.index_of(c) for c in layout.data_qubits()]
    anc_z = [layout.index_of(f.ancillas[0]) for f in layout.faces]
    anc_x = [layout.index_of(f.ancillas[1]) for f in layout.faces]
    gate_layers = _sd_face_gates(layout)
    corr = _z_correction_faces(layout)
    faces = [f.center for f in layout.faces]

    mem = spec.basis
    rec = {}

    for t in range(spec.rounds):
        reset = [Instruction("RZ", tuple(anc_z)), Instruction("RX", tuple(anc_x))]
        if t == 0:
            reset.append(
                Instruction("RZ" if mem == "Z" else "RX", tuple(data_idx))
            )
        b.layer(_idle_fill(reset, n))
        for pairs in gate_layers:
            flat = tuple(q for pr in pairs for q in pr)
            b.layer(_idle_fill([Instruction("CNOT", flat)], n))
        meas = [Instruction("MX", tuple(anc_x)), Instruction("MZ", tuple(anc_z))]
        base = b.num_measurements
        if t == spec.rounds - 1:
            meas.append(
                Instruction("MX" if mem == "X" else "MZ", tuple(data_idx))
            )
        b.layer(_idle_fill(meas, n))
        for k, f in enumerate(faces):
            rec[("X", f, t)] = base + k
            rec[("Z", f, t)] = base + len(faces) + k
        if t == spec.rounds - 1:
            off = base + 2 * len(faces)
            for k, q in enumerate(data_idx):
                rec[("D", q)] = off + k

    # detectors: X side closes as plain pairs, Z side needs kickback records
    for t in range(spec.rounds):
        for f in faces:
            coords = (f[0], f[1], t)
            if t == 0:
                if mem == "X":
                    b.detector([rec[("X", f, 0)]], coords + (0,), basis="X")
                if mem == "Z":
                    b.detector([rec[("Z", f, 0)]], coords + (1,), basis="Z")
                continue
            b.detector(
                [rec[("X", f, t)], rec[("X", f, t - 1)]], coords + (0,), basis="X"
            )
            refs = {rec[("Z", f, t)]}
            for g in (f,) + corr[f]:
                refs ^= {rec[("Z", g, t - 1)]}
            b.detector(sorted(refs), coords + (1,), basis="Z")

    last = spec.rounds - 1
    for f, face in zip(faces, layout.faces):
        member_recs = [rec[("D", layout.index_of(m))] for m in face.members]
        if mem == "X":
            refs = set(member_recs) ^ {rec[("X", f, last)]}
        else:
            refs = set(member_recs)
            for g in (f,) + corr[f]:
                refs ^= {rec[("Z", g, last)]}
        b.detector(sorted(refs), (f[0], f[1], spec.rounds) + (0 if mem == "X" else 1,), basis=mem)

    support = layout.observable_support()
    obs = {rec[("D", layout.index_of(c))] for c in support}
    if mem == "Z":
        for t in range(spec.rounds):
            for g in _odd_overlap_faces(layout, support):
                obs ^= {rec[("Z", g, t)]}
    b.observable(0, sorted(obs))
    return b.build()


_BUILDERS = {
    "superdense": build_superdense,
}


def build_circuit(spec: BuildSpec) -> Circuit:
    """Dispatch to the family's builder."""
    try:
        fn = _BUILDERS[spec.family]
    except KeyError:
        raise BuildError(f"no builder registered for family {spec.family!r}")
    return fn(spec)
