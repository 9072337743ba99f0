"""Failure-rate accounting and footprint projection for benchmark runs.

Estimates are per round (shot failure probability divided by the cycle
count), fits follow log P = a sqrt(n) + b by least squares on the log,
and the uncertainty region is the likelihood ellipse J <= J* + 2 ln(1000)
sigma^2 whose boundary is scanned numerically for footprint extrema.
Natural log throughout; a consistent base change rescales a, b and the
target together and leaves the footprint unchanged.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .builders import BuildSpec, benchmark_rounds, build_circuit
from .dem import extract_dem
from .noise import apply_uniform_noise
from .sampler import sample_dem

TERAQUOP_TARGET = 1e-12
REGION_ODDS = 1000.0
BOUNDARY_SAMPLES = 3600


class StatsError(ValueError):
    pass


class ShotBudgetError(StatsError):
    """Shot cap reached before the failure target; carries the partial record."""

    def __init__(self, record: "RunRecord", target: int) -> None:
        super().__init__(
            f"shot budget exhausted at {record.shots} shots with "
            f"{record.failures} failures (target {target})"
        )
        self.record = record


@dataclass(frozen=True)
class RunRecord:
    """One benchmark point: a family/distance/basis/p cell and its tally."""

    family: str
    d: int
    basis: str
    p: float
    rounds: int
    shots: int
    failures: int
    n: int

    def __post_init__(self) -> None:
        if self.rounds != 4 * self.d:
            raise StatsError(f"rounds must be 4*d, got {self.rounds} for d={self.d}")
        if not 0 <= self.failures <= self.shots:
            raise StatsError(
                f"failures {self.failures} outside [0, shots={self.shots}]"
            )


@dataclass(frozen=True)
class RateEstimate:
    rate: float
    lo: float
    hi: float


def wilson_interval(failures: int, shots: int, z: float = 1.96) -> tuple[float, float]:
    """95% score interval; lower end pinned to 0 when nothing failed."""
    if shots <= 0:
        raise StatsError("zero shots")
    phat = failures / shots
    denom = 1.0 + z * z / shots
    center = (phat + z * z / (2 * shots)) / denom
    half = z * math.sqrt(phat * (1 - phat) / shots + z * z / (4 * shots * shots)) / denom
    lo = 0.0 if failures == 0 else max(0.0, center - half)
    return lo, min(1.0, center + half)


def per_round_rate(r: RunRecord) -> RateEstimate:
    if r.shots <= 0:
        raise StatsError("zero shots")
    lo, hi = wilson_interval(r.failures, r.shots)
    scale = 1.0 / r.rounds
    return RateEstimate(
        rate=(r.failures / r.shots) * scale, lo=lo * scale, hi=hi * scale
    )


@dataclass(frozen=True)
class FitRegion:
    """Ellipse {theta : (theta-center)^T M (theta-center) <= level}."""

    center: tuple[float, float]
    matrix: tuple[tuple[float, float], tuple[float, float]]
    level: float

    def boundary(self, k: int = BOUNDARY_SAMPLES) -> np.ndarray:
        if self.level == 0.0:
            return np.asarray([self.center])
        m = np.asarray(self.matrix)
        w, v = np.linalg.eigh(m)
        theta = np.linspace(0.0, 2 * math.pi, k, endpoint=False)
        u = np.stack([np.cos(theta), np.sin(theta)])
        delta = v @ (u / np.sqrt(w)[:, None]) * math.sqrt(self.level)
        return np.asarray(self.center) + delta.T

    def quadratic_form(self, a: float, b: float) -> float:
        da = a - self.center[0]
        db = b - self.center[1]
        m = self.matrix
        return m[0][0] * da * da + 2 * m[0][1] * da * db + m[1][1] * db * db

    def contains(self, a: float, b: float) -> bool:
        return self.quadratic_form(a, b) <= self.level * (1 + 1e-12) + 1e-300


@dataclass(frozen=True)
class FitResult:
    a: float
    b: float
    sigma2: float
    region: FitRegion
    teraquop: tuple[float, float, float] | None


def fit_footprint(points: list[tuple[float, float]]) -> FitResult:
    """Least squares of ln P against sqrt(n); sigma^2 = J*/(N-2)."""
    if len(points) < 3:
        raise StatsError(f"need at least 3 points, got {len(points)}")
    for n, pl in points:
        if not 0.0 < pl < 1.0:
            raise StatsError(f"failure probability {pl} outside (0, 1)")
        if n <= 0:
            raise StatsError(f"qubit count {n} must be positive")
    x = np.sqrt([float(n) for n, _ in points])
    y = np.log([float(pl) for _, pl in points])
    nn = len(points)
    sx, sxx = x.sum(), (x * x).sum()
    det = nn * sxx - sx * sx
    if det <= 1e-12 * nn * sxx:
        raise StatsError("degenerate fit: all qubit counts equal")
    sy, sxy = y.sum(), (x * y).sum()
    a = (nn * sxy - sx * sy) / det
    b = (sy - a * sx) / nn
    resid = y - a * x - b
    jstar = float(resid @ resid)
    sigma2 = jstar / (nn - 2)
    region = FitRegion(
        center=(float(a), float(b)),
        matrix=((float(sxx), float(sx)), (float(sx), float(nn))),
        level=2.0 * math.log(REGION_ODDS) * sigma2,
    )
    fr = FitResult(float(a), float(b), sigma2, region, None)
    try:
        tq = teraquop(fr)
    except StatsError:
        tq = None
    return FitResult(float(a), float(b), sigma2, region, tq)


def _footprint(a: float, b: float, log_target: float) -> float:
    return ((log_target - b) / a) ** 2


def teraquop(fr: FitResult) -> tuple[float, float, float]:
    """Projected qubit count for the target rate, with region extrema."""
    if fr.a >= 0:
        raise StatsError(f"non-negative slope a={fr.a}: no suppression to project")
    log_target = math.log(TERAQUOP_TARGET)
    nstar = _footprint(fr.a, fr.b, log_target)
    pts = fr.region.boundary()
    if np.any(pts[:, 0] >= 0):
        raise StatsError("likelihood region reaches non-negative slope")
    ns = ((log_target - pts[:, 1]) / pts[:, 0]) ** 2
    return nstar, float(min(nstar, ns.min())), float(max(nstar, ns.max()))


def run_until_failures(
    spec: BuildSpec,
    p: float,
    target_failures: int = 100,
    batch: int = 20_000,
    seed: int = 0,
    max_shots: int = 5_000_000,
    decoder=None,
) -> RunRecord:
    """Sample and decode in fixed batches until enough failures accumulate.

    Deterministic for a given (seed, batch): batch k draws shots
    [k*batch, (k+1)*batch) of the seed's stream regardless of when the
    loop stops.  Raises ShotBudgetError if the cap comes first.
    """
    if target_failures < 1:
        raise StatsError(f"target_failures must be >= 1, got {target_failures}")
    if spec.rounds != benchmark_rounds(spec.distance):
        raise StatsError(
            f"benchmark runs use rounds=4*d, got {spec.rounds} for d={spec.distance}"
        )
    circuit = build_circuit(spec)
    dem = extract_dem(apply_uniform_noise(circuit, p))
    if decoder is None:
        from .decoder import dem_decoder

        decoder = dem_decoder(dem)
    shots = 0
    failures = 0
    while failures < target_failures and shots + batch <= max_shots:
        got = sample_dem(dem, batch, seed, shot_offset=shots)
        pred = decoder.decode_batch(got.detector_bits)
        failures += int(np.any(pred != got.observable_bits, axis=1).sum())
        shots += batch
    record = RunRecord(
        family=spec.family,
        d=spec.distance,
        basis=spec.basis,
        p=p,
        rounds=spec.rounds,
        shots=shots,
        failures=failures,
        n=circuit.num_qubits,
    )
    if failures < target_failures:
        raise ShotBudgetError(record, target_failures)
    return record


CSV_HEADER = (
    "family,d,basis,p,rounds,shots,failures,per_round_rate,wilson_lo,wilson_hi,n_qubits"
)


def records_to_csv(records: list[RunRecord]) -> str:
    lines = [CSV_HEADER]
    for r in records:
        est = per_round_rate(r)
        lines.append(
            f"{r.family},{r.d},{r.basis},{r.p!r},{r.rounds},{r.shots},"
            f"{r.failures},{est.rate!r},{est.lo!r},{est.hi!r},{r.n}"
        )
    return "\n".join(lines) + "\n"


def fit_to_json(fr: FitResult, boundary_samples: int = 360) -> str:
    tq = None
    if fr.teraquop is not None:
        tq = {"n": fr.teraquop[0], "lo": fr.teraquop[1], "hi": fr.teraquop[2]}
    return json.dumps(
        {
            "a": fr.a,
            "b": fr.b,
            "sigma2": fr.sigma2,
            "region_samples": [
                [float(a), float(b)] for a, b in fr.region.boundary(boundary_samples)
            ],
            "teraquop": tq,
        }
    )
