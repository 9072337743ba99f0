"""Monte-Carlo detector sampling via vectorized Pauli frames.

Randomness is counter-based: every channel owns a Philox stream keyed
(seed, channel ordinal), advanced to the starting shot.  A shot's bits
therefore depend only on (seed, shot ordinal), never on batch
boundaries, and disjoint shot ranges can run on separate workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import MEASUREMENTS, RESETS
from .dem import DetectorErrorModel
from .noise import NoisyCircuit


@dataclass(frozen=True)
class ShotBatch:
    num_shots: int
    detector_bits: np.ndarray
    observable_bits: np.ndarray
    seed: int
    shot_offset: int


def _stream(seed: int, channel: int, shot_offset: int, shots: int) -> np.ndarray:
    # Philox advance strides one 4-double counter block per unit
    bg = np.random.Philox(key=np.array([seed, channel], dtype=np.uint64))
    bg.advance(shot_offset // 4)
    skip = shot_offset % 4
    u = np.random.Generator(bg).random(skip + shots)
    return u[skip:]


def sample_circuit(
    nc: NoisyCircuit, shots: int, seed: int, shot_offset: int = 0
) -> ShotBatch:
    c = nc.circuit
    fx = np.zeros((shots, c.num_qubits), dtype=np.uint8)
    fz = np.zeros((shots, c.num_qubits), dtype=np.uint8)
    flips = np.zeros((shots, c.num_measurements), dtype=np.uint8)
    rec = 0
    channel = 0
    for layer in c.layers:
        for ins in layer.instructions:
            g = ins.gate
            if g == "CNOT":
                for ctl, tgt in ins.target_pairs():
                    fx[:, tgt] ^= fx[:, ctl]
                    fz[:, ctl] ^= fz[:, tgt]
            elif g == "CXSWAP":
                for a, b in ins.target_pairs():
                    xa = fx[:, a].copy()
                    fx[:, a] ^= fx[:, b]
                    fx[:, b] = xa
                    zb = fz[:, b].copy()
                    fz[:, b] ^= fz[:, a]
                    fz[:, a] = zb
            elif g == "SWAP":
                for a, b in ins.target_pairs():
                    fx[:, [a, b]] = fx[:, [b, a]]
                    fz[:, [a, b]] = fz[:, [b, a]]
            elif g in MEASUREMENTS:
                comp = fx if g == "MZ" else fz
                for q in ins.targets:
                    flips[:, rec] = comp[:, q]
                    rec += 1
            elif g in RESETS:
                for q in ins.targets:
                    fx[:, q] = 0
                    fz[:, q] = 0
            elif g == "IDLE":
                pass
            else:
                p = ins.arg
                if p == 0.0:
                    channel += 1
                    continue
                u = _stream(seed, channel, shot_offset, shots)
                channel += 1
                fire = u < p
                if g == "XERR":
                    fx[:, ins.targets[0]] ^= fire
                elif g == "ZERR":
                    fz[:, ins.targets[0]] ^= fire
                elif g == "DEP1":
                    (q,) = ins.targets
                    pick = np.minimum((u * (3.0 / p)).astype(np.int64), 2)
                    which = np.where(fire, pick, -1)
                    fx[:, q] ^= fire & (which < 2)
                    fz[:, q] ^= fire & (which > 0)
                else:  # DEP2
                    a, b = ins.targets
                    pick = np.minimum((u * (15.0 / p)).astype(np.int64), 14)
                    code = np.where(fire, pick + 1, 0)
                    pa = code >> 2
                    pb = code & 3
                    fx[:, a] ^= (pa == 1) | (pa == 2)
                    fz[:, a] ^= (pa == 2) | (pa == 3)
                    fx[:, b] ^= (pb == 1) | (pb == 2)
                    fz[:, b] ^= (pb == 2) | (pb == 3)
    det = np.zeros((shots, len(c.detectors)), dtype=np.uint8)
    for i, d in enumerate(c.detectors):
        for r in d.measurement_refs:
            det[:, i] ^= flips[:, r]
    obs_defs = sorted(c.observables, key=lambda o: o.id)
    obs = np.zeros((shots, len(obs_defs)), dtype=np.uint8)
    for k, o in enumerate(obs_defs):
        for r in o.measurement_refs:
            obs[:, k] ^= flips[:, r]
    return ShotBatch(shots, det, obs, seed, shot_offset)


def sample_dem(
    dem: DetectorErrorModel, shots: int, seed: int, shot_offset: int = 0
) -> ShotBatch:
    det = np.zeros((shots, dem.num_detectors), dtype=np.uint8)
    obs = np.zeros((shots, dem.num_observables), dtype=np.uint8)
    for mi, m in enumerate(dem.mechanisms):
        fire = _stream(seed, mi, shot_offset, shots) < m.probability
        for i in m.detectors:
            det[:, i] ^= fire
        for oid in m.observables:
            obs[:, oid] ^= fire
    return ShotBatch(shots, det, obs, seed, shot_offset)
