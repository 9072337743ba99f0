"""Layered circuit representation with a line-oriented text format.

A circuit is an ordered list of layers (time steps).  Depth claims are
stated in steps, so layers are explicit and TICK-delimited in the text
form.  Measurement records are numbered globally in chronological
order: layer order, then instruction order within a layer, then target
order within an instruction.  Detectors and observables reference
absolute record indices internally and relative `rec[-k]` offsets in
the text form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

UNITARY_2Q = ("CNOT", "CXSWAP", "SWAP")
RESETS = ("RX", "RZ")
MEASUREMENTS = ("MX", "MZ")
NOISE_1Q = ("XERR", "ZERR", "DEP1")
NOISE_2Q = ("DEP2",)
NOISE = NOISE_1Q + NOISE_2Q
GATE_KINDS = UNITARY_2Q + RESETS + MEASUREMENTS + ("IDLE",) + NOISE


class CircuitError(ValueError):
    pass


class CircuitParseError(CircuitError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Instruction:
    gate: str
    targets: tuple[int, ...]
    arg: float | None = None

    def __post_init__(self) -> None:
        if self.gate not in GATE_KINDS:
            raise CircuitError(f"unknown gate kind {self.gate!r}")
        object.__setattr__(self, "targets", tuple(self.targets))
        if self.gate in UNITARY_2Q + NOISE_2Q:
            if len(self.targets) % 2 != 0:
                raise CircuitError(f"{self.gate} needs an even target list")
            for a, b in self.target_pairs():
                if a == b:
                    raise CircuitError(f"{self.gate} pair touches qubit {a} twice")
        if (self.gate in NOISE) != (self.arg is not None):
            raise CircuitError(f"{self.gate}: probability argument mismatch")

    def target_pairs(self) -> list[tuple[int, int]]:
        return [
            (self.targets[i], self.targets[i + 1])
            for i in range(0, len(self.targets), 2)
        ]

    @property
    def is_noise(self) -> bool:
        return self.gate in NOISE


@dataclass(frozen=True)
class Layer:
    instructions: tuple[Instruction, ...]
    index: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "instructions", tuple(self.instructions))
        seen: set[int] = set()
        for ins in self.instructions:
            if ins.is_noise:
                continue
            for q in ins.targets:
                if q in seen:
                    raise CircuitError(
                        f"layer {self.index}: qubit {q} used twice in one step"
                    )
                seen.add(q)

    def operations(self) -> Iterable[Instruction]:
        return (i for i in self.instructions if not i.is_noise)


@dataclass(frozen=True)
class DetectorDef:
    measurement_refs: tuple[int, ...]
    coords: tuple[float, float, int, int]
    basis: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "measurement_refs", tuple(self.measurement_refs))
        if not self.measurement_refs:
            raise CircuitError("detector with no measurement references")
        if len(self.coords) != 4:
            raise CircuitError("detector coords must be (x, y, t, c)")


@dataclass(frozen=True)
class ObservableDef:
    id: int
    measurement_refs: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "measurement_refs", tuple(self.measurement_refs))


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    layers: tuple[Layer, ...] = ()
    detectors: tuple[DetectorDef, ...] = ()
    observables: tuple[ObservableDef, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "layers", tuple(self.layers))
        object.__setattr__(self, "detectors", tuple(self.detectors))
        object.__setattr__(self, "observables", tuple(self.observables))
        for layer in self.layers:
            for ins in layer.instructions:
                for q in ins.targets:
                    if not 0 <= q < self.num_qubits:
                        raise CircuitError(f"qubit {q} out of range")
        n = self.num_measurements
        ids = [o.id for o in self.observables]
        if len(ids) != len(set(ids)):
            raise CircuitError("duplicate observable ids")
        for det in self.detectors:
            if any(r >= n or r < 0 for r in det.measurement_refs):
                raise CircuitError("detector references missing measurement")
        for obs in self.observables:
            if any(r >= n or r < 0 for r in obs.measurement_refs):
                raise CircuitError("observable references missing measurement")

    @property
    def num_measurements(self) -> int:
        return len(self.measurements)

    @property
    def measurements(self) -> tuple[tuple[int, int, str], ...]:
        """Chronological (layer_index, qubit, basis) for every MX/MZ target."""
        cached = self.__dict__.get("_measurements")
        if cached is None:
            out = []
            for li, layer in enumerate(self.layers):
                for ins in layer.instructions:
                    if ins.gate in MEASUREMENTS:
                        for q in ins.targets:
                            out.append((li, q, ins.gate[1]))
            cached = tuple(out)
            object.__setattr__(self, "_measurements", cached)
        return cached

    def detector_basis(self, det: DetectorDef) -> str | None:
        kinds = {self.measurements[r][2] for r in det.measurement_refs}
        return kinds.pop() if len(kinds) == 1 else None


def append_layer(circuit: Circuit, instructions: Sequence[Instruction]) -> Circuit:
    layer = Layer(tuple(instructions), index=len(circuit.layers))
    return Circuit(
        circuit.num_qubits,
        circuit.layers + (layer,),
        circuit.detectors,
        circuit.observables,
    )


class CircuitBuilder:
    """Mutable accumulator used by the generators; emits an immutable Circuit."""

    def __init__(self, num_qubits: int):
        self.num_qubits = num_qubits
        self._layers: list[Layer] = []
        self._detectors: list[DetectorDef] = []
        self._observables: list[ObservableDef] = []
        self._num_measurements = 0

    def layer(self, instructions: Sequence[Instruction]) -> None:
        lay = Layer(tuple(instructions), index=len(self._layers))
        self._layers.append(lay)
        for ins in lay.instructions:
            if ins.gate in MEASUREMENTS:
                self._num_measurements += len(ins.targets)

    @property
    def num_measurements(self) -> int:
        return self._num_measurements

    @property
    def num_layers(self) -> int:
        return len(self._layers)

    def detector(self, refs, coords, basis=None) -> None:
        self._detectors.append(DetectorDef(tuple(sorted(refs)), tuple(coords), basis))

    def observable(self, obs_id: int, refs) -> None:
        self._observables.append(ObservableDef(obs_id, tuple(sorted(refs))))

    def build(self) -> Circuit:
        c = Circuit(
            self.num_qubits,
            tuple(self._layers),
            tuple(self._detectors),
            tuple(self._observables),
        )
        # Bases are always derivable from the referenced measurement
        # kinds; normalizing here keeps builder output and parse output
        # structurally identical.
        dets = tuple(
            DetectorDef(d.measurement_refs, d.coords, c.detector_basis(d))
            for d in c.detectors
        )
        return Circuit(self.num_qubits, c.layers, dets, c.observables)


def _fmt_num(v) -> str:
    f = float(v)
    if f == int(f):
        return str(int(f))
    return repr(f)


def serialize(circuit: Circuit) -> str:
    # Annotation lines live in the block of the layer holding their
    # newest referenced measurement, so every rec[-k] resolves locally.
    counts = []  # measurements seen through the end of each layer
    running = 0
    for layer in circuit.layers:
        for ins in layer.instructions:
            if ins.gate in MEASUREMENTS:
                running += len(ins.targets)
        counts.append(running)

    meas_layer = [circuit.measurements[r][0] for r in range(circuit.num_measurements)]

    def home_layer(refs):
        return max(meas_layer[r] for r in refs)

    lines = [f"QUBITS {circuit.num_qubits}"]
    for li, layer in enumerate(circuit.layers):
        for ins in layer.instructions:
            arg = "" if ins.arg is None else f"({ins.arg!r})"
            lines.append(f"{ins.gate}{arg} " + " ".join(map(str, ins.targets)))
        for det in circuit.detectors:
            if home_layer(det.measurement_refs) == li:
                coords = ",".join(_fmt_num(c) for c in det.coords)
                recs = " ".join(
                    f"rec[-{counts[li] - r}]" for r in det.measurement_refs
                )
                lines.append(f"DETECTOR({coords}) {recs}")
        for obs in circuit.observables:
            if home_layer(obs.measurement_refs) == li:
                recs = " ".join(
                    f"rec[-{counts[li] - r}]" for r in obs.measurement_refs
                )
                lines.append(f"OBSERVABLE({obs.id}) {recs}")
        lines.append("TICK")
    return "\n".join(lines) + "\n"


def _parse_targets(parts, lineno):
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise CircuitParseError(f"bad qubit index in {parts!r}", lineno)


def _parse_recs(parts, seen, lineno):
    refs = []
    for p in parts:
        if not (p.startswith("rec[-") and p.endswith("]")):
            raise CircuitParseError(f"bad record reference {p!r}", lineno)
        try:
            k = int(p[5:-1])
        except ValueError:
            raise CircuitParseError(f"bad record reference {p!r}", lineno)
        if k <= 0 or k > seen:
            raise CircuitParseError(f"dangling record reference {p!r}", lineno)
        refs.append(seen - k)
    return tuple(sorted(refs))


def parse(text: str) -> Circuit:
    num_qubits: int | None = None
    layers: list[Layer] = []
    pending: list[Instruction] = []
    detectors: list[tuple] = []
    observables: list[tuple] = []
    seen_meas = 0
    max_qubit = -1

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "TICK":
            layers.append(Layer(tuple(pending), index=len(layers)))
            pending = []
            continue
        head, _, rest = line.partition(" ")
        parts = rest.split()
        if head == "QUBITS":
            if num_qubits is not None:
                raise CircuitParseError("repeated QUBITS line", lineno)
            try:
                num_qubits = int(rest)
            except ValueError:
                raise CircuitParseError(f"bad QUBITS count {rest!r}", lineno)
            continue
        if head.startswith("DETECTOR("):
            coords = _parse_coords(head[len("DETECTOR(") :], 4, lineno)
            refs = _parse_recs(parts, seen_meas, lineno)
            detectors.append((refs, coords))
            continue
        if head.startswith("OBSERVABLE("):
            (obs_id,) = _parse_coords(head[len("OBSERVABLE(") :], 1, lineno)
            refs = _parse_recs(parts, seen_meas, lineno)
            observables.append((int(obs_id), refs))
            continue
        gate, arg = head, None
        if "(" in head:
            gate, _, argtext = head.partition("(")
            if not argtext.endswith(")"):
                raise CircuitParseError(f"unterminated argument in {head!r}", lineno)
            try:
                arg = float(argtext[:-1])
            except ValueError:
                raise CircuitParseError(f"bad argument in {head!r}", lineno)
        if gate not in GATE_KINDS:
            raise CircuitParseError(f"unknown statement {head!r}", lineno)
        targets = _parse_targets(parts, lineno)
        try:
            ins = Instruction(gate, targets, arg)
        except CircuitError as e:
            raise CircuitParseError(str(e), lineno)
        if gate in MEASUREMENTS:
            seen_meas += len(targets)
        if targets:
            max_qubit = max(max_qubit, max(targets))
        pending.append(ins)

    if pending:
        layers.append(Layer(tuple(pending), index=len(layers)))
    if num_qubits is None:
        num_qubits = max_qubit + 1

    circuit = Circuit(
        num_qubits,
        tuple(layers),
        tuple(DetectorDef(refs, coords) for refs, coords in detectors),
        tuple(ObservableDef(i, refs) for i, refs in observables),
    )
    # Fill in detector bases from the referenced measurement kinds.
    dets = tuple(
        DetectorDef(d.measurement_refs, d.coords, circuit.detector_basis(d))
        for d in circuit.detectors
    )
    return Circuit(num_qubits, circuit.layers, dets, circuit.observables)


def _parse_coords(text: str, expect: int, lineno: int):
    if not text.endswith(")"):
        raise CircuitParseError("unterminated coordinate list", lineno)
    items = text[:-1].split(",")
    if len(items) != expect:
        raise CircuitParseError(
            f"expected {expect} coordinates, got {len(items)}", lineno
        )
    out = []
    for item in items:
        try:
            out.append(int(item))
        except ValueError:
            try:
                out.append(float(item))
            except ValueError:
                raise CircuitParseError(f"bad coordinate {item!r}", lineno)
    return tuple(out)
