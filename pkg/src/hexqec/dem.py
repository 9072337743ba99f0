"""Detector error model extraction.

A single backward pass computes, for every circuit position and qubit,
the set of detectors and observables an X or Z inserted there would
flip.  Channels woven into the layers then read their symptoms off
directly, so extraction costs one circuit traversal regardless of
fault count.  Identical symptoms merge with the XOR probability
formula p1(1-p2) + p2(1-p1).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .circuit import MEASUREMENTS, RESETS, Circuit, Layer
from .noise import NoisyCircuit
from .stabilizer import OutcomePolicy, detector_parities, run_noiseless


class DemError(ValueError):
    pass


@dataclass(frozen=True)
class ErrorMechanism:
    probability: float
    detectors: tuple[int, ...]
    observables: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "detectors", tuple(sorted(self.detectors)))
        object.__setattr__(self, "observables", tuple(sorted(self.observables)))
        if not 0.0 < self.probability < 1.0:
            raise DemError(f"mechanism probability {self.probability} not in (0,1)")


@dataclass(frozen=True)
class DetectorErrorModel:
    num_detectors: int
    num_observables: int
    mechanisms: tuple[ErrorMechanism, ...]


def _merge(p1: float, p2: float) -> float:
    return p1 * (1.0 - p2) + p2 * (1.0 - p1)


def _sensitivity_walk(nc: NoisyCircuit):
    """Yield (channel ordinal is implicit) per-fault symptom masks.

    Bit i < nd marks detector i; bit nd+k marks the k-th observable in
    id order.
    """
    c = nc.circuit
    nd = len(c.detectors)
    rec_mask = [0] * c.num_measurements
    for i, det in enumerate(c.detectors):
        for r in det.measurement_refs:
            rec_mask[r] |= 1 << i
    for k, obs in enumerate(sorted(c.observables, key=lambda o: o.id)):
        for r in obs.measurement_refs:
            rec_mask[r] |= 1 << (nd + k)

    # record index at which each measurement instruction starts
    rec_base = {}
    counter = 0
    for li, layer in enumerate(c.layers):
        for ki, ins in enumerate(layer.instructions):
            if ins.gate in MEASUREMENTS:
                rec_base[(li, ki)] = counter
                counter += len(ins.targets)

    sx = [0] * c.num_qubits
    sz = [0] * c.num_qubits
    out = []
    for li in range(len(c.layers) - 1, -1, -1):
        layer = c.layers[li]
        for ki in range(len(layer.instructions) - 1, -1, -1):
            ins = layer.instructions[ki]
            g = ins.gate
            if g == "CNOT":
                for ctl, tgt in ins.target_pairs():
                    sx[ctl] ^= sx[tgt]
                    sz[tgt] ^= sz[ctl]
            elif g == "CXSWAP":
                for a, b in ins.target_pairs():
                    sx[a], sx[b] = sx[a] ^ sx[b], sx[a]
                    sz[a], sz[b] = sz[b], sz[a] ^ sz[b]
            elif g == "SWAP":
                for a, b in ins.target_pairs():
                    sx[a], sx[b] = sx[b], sx[a]
                    sz[a], sz[b] = sz[b], sz[a]
            elif g in MEASUREMENTS:
                base = rec_base[(li, ki)]
                side = sx if g == "MZ" else sz
                for off, q in enumerate(ins.targets):
                    side[q] ^= rec_mask[base + off]
            elif g in RESETS:
                for q in ins.targets:
                    sx[q] = 0
                    sz[q] = 0
            elif g == "XERR":
                (q,) = ins.targets
                out.append((sx[q], ins.arg))
            elif g == "ZERR":
                (q,) = ins.targets
                out.append((sz[q], ins.arg))
            elif g == "DEP1":
                (q,) = ins.targets
                third = ins.arg / 3
                out.append((sx[q], third))
                out.append((sz[q], third))
                out.append((sx[q] ^ sz[q], third))
            elif g == "DEP2":
                a, b = ins.targets
                fifteenth = ins.arg / 15
                comp_a = (0, sx[a], sx[a] ^ sz[a], sz[a])
                comp_b = (0, sx[b], sx[b] ^ sz[b], sz[b])
                for ia in range(4):
                    for ib in range(4):
                        if ia == ib == 0:
                            continue
                        out.append((comp_a[ia] ^ comp_b[ib], fifteenth))
    return out


def _strip_noise(c: Circuit) -> Circuit:
    layers = tuple(
        Layer(tuple(ins for ins in lay.instructions if not ins.is_noise), lay.index)
        for lay in c.layers
    )
    return Circuit(c.num_qubits, layers, c.detectors, c.observables)


def extract_dem(nc: NoisyCircuit) -> DetectorErrorModel:
    c = nc.circuit
    ideal = _strip_noise(c)
    rec, _ = run_noiseless(ideal, OutcomePolicy("zero"))
    bad = [i for i, v in enumerate(detector_parities(ideal, rec)) if v]
    if bad:
        raise DemError(f"non-deterministic detectors {bad[:5]}; builder bug")

    nd = len(c.detectors)
    merged: dict[int, float] = {}
    for mask, p in _sensitivity_walk(nc):
        if mask == 0 or p == 0.0:
            continue
        if mask in merged:
            merged[mask] = _merge(merged[mask], p)
        else:
            merged[mask] = p

    obs_ids = [o.id for o in sorted(c.observables, key=lambda o: o.id)]
    mechanisms = []
    for mask, p in merged.items():
        dets = tuple(i for i in range(nd) if (mask >> i) & 1)
        obs = tuple(
            obs_ids[k] for k in range(len(obs_ids)) if (mask >> (nd + k)) & 1
        )
        if not dets and obs:
            raise DemError(f"undetectable fault flips observables {obs}")
        if len(dets) > 6:
            warnings.warn(f"mechanism with {len(dets)} detectors", stacklevel=2)
        mechanisms.append(ErrorMechanism(p, dets, obs))
    mechanisms.sort(key=lambda m: (m.detectors, m.observables))
    return DetectorErrorModel(nd, len(obs_ids), tuple(mechanisms))


def dem_equal_up_to_merge(
    a: DetectorErrorModel, b: DetectorErrorModel, tol: float
) -> bool:
    if (a.num_detectors, a.num_observables) != (b.num_detectors, b.num_observables):
        raise DemError("detector/observable count mismatch")
    sa = {(m.detectors, m.observables): m.probability for m in a.mechanisms}
    sb = {(m.detectors, m.observables): m.probability for m in b.mechanisms}
    if sa.keys() != sb.keys():
        return False
    return all(abs(sa[k] - sb[k]) <= tol for k in sa)


def dem_to_text(dem: DetectorErrorModel) -> str:
    lines = [f"dem {dem.num_detectors} {dem.num_observables}"]
    for m in dem.mechanisms:
        parts = [f"D{i}" for i in m.detectors] + [f"L{k}" for k in m.observables]
        lines.append(f"error({m.probability!r}) " + " ".join(parts))
    return "\n".join(lines) + "\n"


def dem_from_text(text: str) -> DetectorErrorModel:
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines or not lines[0].startswith("dem "):
        raise DemError("missing dem header")
    try:
        _, nd, no = lines[0].split()
        nd, no = int(nd), int(no)
    except ValueError:
        raise DemError(f"bad header {lines[0]!r}")
    mechanisms = []
    for ln in lines[1:]:
        if not ln.startswith("error(") or ")" not in ln:
            raise DemError(f"bad mechanism line {ln!r}")
        head, _, rest = ln.partition(")")
        p = float(head[len("error(") :])
        dets, obs = [], []
        for tok in rest.split():
            if tok.startswith("D"):
                dets.append(int(tok[1:]))
            elif tok.startswith("L"):
                obs.append(int(tok[1:]))
            else:
                raise DemError(f"bad symptom token {tok!r}")
        mechanisms.append(ErrorMechanism(p, tuple(dets), tuple(obs)))
    return DetectorErrorModel(nd, no, tuple(mechanisms))
