"""Uniform error model attachment.

Each operation occurrence gets exactly one channel: DEP1 on idle
qubits, a flip channel beside resets and measurements (after the
reset, before the measurement), DEP2 after two-qubit gates.  Channel
instructions are woven into the owning layer in composition order, so
walking a layer's instruction list front to back applies noise at the
right moment and the serialized text shows every fault location.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import (
    MEASUREMENTS,
    RESETS,
    Circuit,
    CircuitError,
    Instruction,
    Layer,
)

_PAULIS = ("I", "X", "Y", "Z")


class NoiseError(CircuitError):
    pass


@dataclass(frozen=True)
class NoiseChannel:
    """One error channel occurrence.

    ``location`` is (layer index, ordinal of the channel's instruction
    within that layer after weaving).
    """

    kind: str
    p: float
    targets: tuple[int, ...]
    location: tuple[int, int]

    def __post_init__(self) -> None:
        if self.kind not in ("XERR", "ZERR", "DEP1", "DEP2"):
            raise NoiseError(f"unknown channel kind {self.kind!r}")
        object.__setattr__(self, "targets", tuple(self.targets))
        want = 2 if self.kind == "DEP2" else 1
        if len(self.targets) != want:
            raise NoiseError(f"{self.kind} takes {want} target(s)")
        if not 0.0 <= self.p <= 1.0:
            raise NoiseError(f"probability {self.p} outside [0, 1]")


@dataclass(frozen=True)
class NoisyCircuit:
    circuit: Circuit
    channels: tuple[NoiseChannel, ...]
    p: float


@dataclass(frozen=True)
class Fault:
    """Elementary Pauli fault: one term of an expanded channel."""

    paulis: tuple[tuple[int, str], ...]
    probability: float
    channel: int


def apply_uniform_noise(c: Circuit, p: float) -> NoisyCircuit:
    if not 0.0 <= p <= 1.0:
        raise NoiseError(f"probability {p} outside [0, 1]")
    channels: list[NoiseChannel] = []
    layers: list[Layer] = []
    for li, layer in enumerate(c.layers):
        for ins in layer.instructions:
            if ins.is_noise:
                raise NoiseError("circuit already carries noise channels")
            if ins.gate == "SWAP":
                raise NoiseError(
                    "SWAP has no channel assignment; absorb it as relabeling"
                )
        pre: list[Instruction] = []
        post: list[Instruction] = []
        covered: set[int] = set()
        for ins in layer.instructions:
            covered.update(ins.targets)
            if ins.gate in MEASUREMENTS:
                err = "ZERR" if ins.gate == "MX" else "XERR"
                for q in ins.targets:
                    pre.append(Instruction(err, (q,), p))
            elif ins.gate in RESETS:
                err = "ZERR" if ins.gate == "RX" else "XERR"
                for q in ins.targets:
                    post.append(Instruction(err, (q,), p))
            elif ins.gate == "IDLE":
                for q in ins.targets:
                    post.append(Instruction("DEP1", (q,), p))
            else:
                for pair in ins.target_pairs():
                    post.append(Instruction("DEP2", pair, p))
        for q in range(c.num_qubits):
            if q not in covered:
                post.append(Instruction("DEP1", (q,), p))
        woven = pre + list(layer.instructions) + post
        new_layer = Layer(tuple(woven), index=li)
        layers.append(new_layer)
        for k, ins in enumerate(new_layer.instructions):
            if ins.is_noise:
                channels.append(NoiseChannel(ins.gate, p, ins.targets, (li, k)))
    noisy = Circuit(c.num_qubits, tuple(layers), c.detectors, c.observables)
    return NoisyCircuit(noisy, tuple(channels), p)


def enumerate_faults(nc: NoisyCircuit) -> tuple[Fault, ...]:
    """Expand every channel into its equiprobable Pauli terms."""
    out: list[Fault] = []
    for ci, ch in enumerate(nc.channels):
        if ch.kind in ("XERR", "ZERR"):
            out.append(Fault(((ch.targets[0], ch.kind[0]),), ch.p, ci))
        elif ch.kind == "DEP1":
            (q,) = ch.targets
            for pa in "XYZ":
                out.append(Fault(((q, pa),), ch.p / 3, ci))
        else:
            a, b = ch.targets
            for pa in _PAULIS:
                for pb in _PAULIS:
                    if pa == pb == "I":
                        continue
                    ops = tuple(
                        (q, o) for q, o in ((a, pa), (b, pb)) if o != "I"
                    )
                    out.append(Fault(ops, ch.p / 15, ci))
    return tuple(out)
