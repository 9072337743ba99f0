"""Stabilizer tableau simulation with measurement-record prediction.

Tracks destabilizer and stabilizer generators as GF(2) bit tables in
the usual 2n x 2n arrangement.  Row operators are stored in the same
normal form as `pauli.Pauli`: i**r * X(xs) * Z(zs) with r tracked
mod 4.  In this form the CSS gates (CNOT, SWAP, CXSWAP) never touch r.

Measurements report whether the outcome was forced or a fresh coin
flip; coin flips are resolved by a pluggable policy so a circuit can
be replayed under different random choices to probe which record
parities are actually deterministic.
"""

from __future__ import annotations

import numpy as np

from .circuit import MEASUREMENTS, NOISE, RESETS, Circuit
from .pauli import Pauli


class OutcomePolicy:
    """Resolves the outcome of a non-deterministic measurement."""

    def __init__(self, mode: str = "zero", seed: int | None = None):
        if mode not in ("zero", "one", "random"):
            raise ValueError(f"unknown outcome policy {mode!r}")
        self.mode = mode
        self._rng = np.random.default_rng(seed)

    def flip(self) -> int:
        if self.mode == "zero":
            return 0
        if self.mode == "one":
            return 1
        return int(self._rng.integers(2))


class StabilizerSim:
    def __init__(self, num_qubits: int):
        n = self.n = num_qubits
        self.x = np.zeros((2 * n, n), dtype=np.uint8)
        self.z = np.zeros((2 * n, n), dtype=np.uint8)
        self.r = np.zeros(2 * n, dtype=np.uint8)  # i-exponent, mod 4
        self.x[np.arange(n), np.arange(n)] = 1
        self.z[np.arange(n, 2 * n), np.arange(n)] = 1

    # -- gates ---------------------------------------------------------

    def cnot(self, a: int, b: int) -> None:
        self.x[:, b] ^= self.x[:, a]
        self.z[:, a] ^= self.z[:, b]

    def swap(self, a: int, b: int) -> None:
        self.x[:, [a, b]] = self.x[:, [b, a]]
        self.z[:, [a, b]] = self.z[:, [b, a]]

    def cxswap(self, a: int, b: int) -> None:
        self.cnot(a, b)
        self.swap(a, b)

    def hadamard(self, q: int) -> None:
        self.r = (self.r + 2 * (self.x[:, q] & self.z[:, q])) & 3
        self.x[:, q], self.z[:, q] = self.z[:, q].copy(), self.x[:, q].copy()

    def phase_gate(self, q: int) -> None:
        self.r = (self.r + self.x[:, q]) & 3
        self.z[:, q] ^= self.x[:, q]

    def apply_pauli_x(self, q: int) -> None:
        self.r = (self.r + 2 * self.z[:, q]) & 3

    def apply_pauli_z(self, q: int) -> None:
        self.r = (self.r + 2 * self.x[:, q]) & 3

    # -- row arithmetic ------------------------------------------------

    def _row_mult(self, i: int, p: int) -> None:
        """row_i := row_p * row_i, in the i**r X Z normal form."""
        cross = 2 * int(np.bitwise_and(self.z[p], self.x[i]).sum())
        self.r[i] = (int(self.r[p]) + int(self.r[i]) + cross) & 3
        self.x[i] ^= self.x[p]
        self.z[i] ^= self.z[p]

    def _accumulate(self, acc, p: int):
        """acc := stab_row_p * acc for a scratch (r, x, z) triple."""
        r, x, z = acc
        cross = 2 * int(np.bitwise_and(self.z[p], x).sum())
        return (
            (int(self.r[p]) + r + cross) & 3,
            x ^ self.x[p],
            z ^ self.z[p],
        )

    # -- measurement and reset -----------------------------------------

    def measure_z(self, q: int, policy: OutcomePolicy) -> tuple[int, bool]:
        n = self.n
        anticommuting = np.flatnonzero(self.x[n:, q]) + n
        if anticommuting.size:
            p = int(anticommuting[0])
            for i in np.flatnonzero(self.x[:, q]):
                if int(i) != p:
                    self._row_mult(int(i), p)
            self.x[p - n] = self.x[p]
            self.z[p - n] = self.z[p]
            self.r[p - n] = self.r[p]
            self.x[p] = 0
            self.z[p] = 0
            self.z[p, q] = 1
            outcome = policy.flip()
            self.r[p] = 2 * outcome
            return outcome, True
        # Forced outcome: multiply the stabilizer rows matching the
        # destabilizer rows that anticommute with Z_q.
        acc = (0, np.zeros(n, dtype=np.uint8), np.zeros(n, dtype=np.uint8))
        for i in np.flatnonzero(self.x[:n, q]):
            acc = self._accumulate(acc, int(i) + n)
        assert acc[0] in (0, 2)
        return acc[0] // 2, False

    def measure_x(self, q: int, policy: OutcomePolicy) -> tuple[int, bool]:
        self.hadamard(q)
        out = self.measure_z(q, policy)
        self.hadamard(q)
        return out

    def reset_z(self, q: int, policy: OutcomePolicy) -> None:
        outcome, _ = self.measure_z(q, policy)
        if outcome:
            self.apply_pauli_x(q)

    def reset_x(self, q: int, policy: OutcomePolicy) -> None:
        self.hadamard(q)
        self.reset_z(q, policy)
        self.hadamard(q)

    # -- queries -------------------------------------------------------

    def state_contains(self, pauli: Pauli) -> bool:
        """Is the signed Pauli in the group generated by the stabilizer rows?"""
        n = self.n
        target = np.zeros(2 * n, dtype=np.uint8)
        for q in pauli.xs:
            target[q] = 1
        for q in pauli.zs:
            target[n + q] = 1
        work = np.concatenate([self.x[n:], self.z[n:]], axis=1).astype(np.uint8)
        row_ids = np.eye(n, dtype=np.uint8)
        t = target.copy()
        combo = np.zeros(n, dtype=np.uint8)
        unused = list(range(n))
        for j in range(2 * n):
            pivot = next((i for i in unused if work[i, j]), None)
            if pivot is None:
                continue
            unused.remove(pivot)
            for i in unused:
                if work[i, j]:
                    work[i] ^= work[pivot]
                    row_ids[i] ^= row_ids[pivot]
            if t[j]:
                t ^= work[pivot]
                combo ^= row_ids[pivot]
        if t.any():
            return False
        acc = (0, np.zeros(n, dtype=np.uint8), np.zeros(n, dtype=np.uint8))
        for i in np.flatnonzero(combo):
            acc = self._accumulate(acc, int(i) + n)
        return acc[0] == pauli.phase


def run_noiseless(
    circuit: Circuit, policy: OutcomePolicy | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Simulate, returning (record bits, per-measurement coin-flip flags)."""
    policy = policy or OutcomePolicy("zero")
    sim = StabilizerSim(circuit.num_qubits)
    record: list[int] = []
    fresh: list[bool] = []
    run_layers(sim, circuit, policy, record, fresh)
    return np.array(record, dtype=np.uint8), np.array(fresh, dtype=bool)


def run_layers(sim, circuit, policy, record, fresh, stop_after=None) -> None:
    """Feed circuit layers to a sim, optionally stopping early."""
    for li, layer in enumerate(circuit.layers):
        if stop_after is not None and li >= stop_after:
            return
        for ins in layer.instructions:
            if ins.gate in NOISE:
                raise ValueError("noiseless run given a noise instruction")
            if ins.gate == "IDLE":
                continue
            if ins.gate in ("CNOT", "CXSWAP", "SWAP"):
                op = {"CNOT": sim.cnot, "CXSWAP": sim.cxswap, "SWAP": sim.swap}[
                    ins.gate
                ]
                for a, b in ins.target_pairs():
                    op(a, b)
            elif ins.gate in RESETS:
                for q in ins.targets:
                    (sim.reset_x if ins.gate == "RX" else sim.reset_z)(q, policy)
            elif ins.gate in MEASUREMENTS:
                for q in ins.targets:
                    fn = sim.measure_x if ins.gate == "MX" else sim.measure_z
                    outcome, was_fresh = fn(q, policy)
                    record.append(outcome)
                    fresh.append(was_fresh)


def detector_parities(circuit: Circuit, record: np.ndarray) -> np.ndarray:
    out = np.zeros(len(circuit.detectors), dtype=np.uint8)
    for i, det in enumerate(circuit.detectors):
        out[i] = int(record[list(det.measurement_refs)].sum()) % 2
    return out


def observable_parities(circuit: Circuit, record: np.ndarray) -> np.ndarray:
    out = np.zeros(len(circuit.observables), dtype=np.uint8)
    for i, obs in enumerate(circuit.observables):
        out[i] = int(record[list(obs.measurement_refs)].sum()) % 2
    return out
