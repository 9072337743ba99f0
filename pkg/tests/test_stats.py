import json
import math
import random

import numpy as np
import pytest

from hexqec.builders import BuildSpec
from hexqec.stats import (
    CSV_HEADER,
    FitRegion,
    RunRecord,
    ShotBudgetError,
    StatsError,
    fit_footprint,
    fit_to_json,
    per_round_rate,
    records_to_csv,
    run_until_failures,
    teraquop,
    wilson_interval,
)


def record(failures, shots, d=3, p=1e-3, n=13):
    return RunRecord(
        family="superdense", d=d, basis="Z", p=p, rounds=4 * d,
        shots=shots, failures=failures, n=n,
    )


class TestPerRoundRate:
    def test_thousand_failures_in_a_million_shots(self):
        est = per_round_rate(record(1000, 10**6))
        assert est.rate == pytest.approx(1e-3 / 12, rel=1e-12)

    def test_interval_matches_direct_score_formula(self):
        f, s, z = 1000, 10**6, 1.96
        est = per_round_rate(record(f, s))
        ph = f / s
        center = (ph + z * z / (2 * s)) / (1 + z * z / s)
        half = (
            z * math.sqrt(ph * (1 - ph) / s + z * z / (4 * s * s)) / (1 + z * z / s)
        )
        assert est.lo == pytest.approx((center - half) / 12, rel=1e-9)
        assert est.hi == pytest.approx((center + half) / 12, rel=1e-9)
        assert est.lo < est.rate < est.hi

    def test_zero_failures_is_one_sided(self):
        est = per_round_rate(record(0, 10**6))
        assert est.rate == 0.0
        assert est.lo == 0.0
        assert est.hi > 0.0

    def test_zero_shots_rejected(self):
        with pytest.raises(StatsError):
            wilson_interval(0, 0)

    def test_agrees_with_root_conversion_below_five_percent(self):
        # alternative conversion: per-round q with (1-2q)^R = 1-2P
        rr = 12
        for pl in (1e-4, 1e-3, 0.01, 0.05):
            exact = 0.5 * (1.0 - (1.0 - 2.0 * pl) ** (1.0 / rr))
            est = per_round_rate(record(int(pl * 10**7), 10**7))
            assert abs(est.rate - exact) / exact < 0.05

    def test_record_validation(self):
        with pytest.raises(StatsError):
            record(5, 4)
        with pytest.raises(StatsError):
            RunRecord("superdense", 3, "Z", 1e-3, 13, 10, 0, 13)


class TestFit:
    def test_exact_points_recovered_to_machine_precision(self):
        a, b = -0.9, 1.2
        pts = [(n, math.exp(a * math.sqrt(n) + b)) for n in (100, 225, 400, 625)]
        fr = fit_footprint(pts)
        assert fr.a == pytest.approx(a, abs=1e-12)
        assert fr.b == pytest.approx(b, abs=1e-11)
        assert fr.sigma2 == pytest.approx(0.0, abs=1e-22)
        nstar, lo, hi = fr.teraquop
        assert lo == pytest.approx(nstar, rel=1e-9)
        assert hi == pytest.approx(nstar, rel=1e-9)

    def test_hand_computed_four_point_variance(self):
        # x = 1,2,3,4; y = -x plus residuals (e, -e, -e, e) which are
        # orthogonal to both 1 and x, so the fit stays (-1, 0) and
        # J* = 4e^2, sigma^2 = 4e^2/2.
        e = 0.1
        ys = [-1 + e, -2 - e, -3 - e, -4 + e]
        pts = [(x * x, math.exp(y)) for x, y in zip((1, 2, 3, 4), ys)]
        fr = fit_footprint(pts)
        assert fr.a == pytest.approx(-1.0, abs=1e-12)
        assert fr.b == pytest.approx(0.0, abs=1e-12)
        assert fr.sigma2 == pytest.approx(4 * e * e / 2, rel=1e-10)

    def test_order_invariance(self):
        rng = random.Random(5)
        pts = [(n, math.exp(-0.5 * math.sqrt(n) + 0.3)) for n in (50, 100, 200, 400, 800)]
        fr1 = fit_footprint(pts)
        shuffled = pts[:]
        rng.shuffle(shuffled)
        fr2 = fit_footprint(shuffled)
        assert fr1.a == pytest.approx(fr2.a, rel=1e-12)
        assert fr1.b == pytest.approx(fr2.b, rel=1e-12)
        assert fr1.sigma2 == pytest.approx(fr2.sigma2, abs=1e-15)

    def test_input_validation(self):
        good = [(100, 0.01), (200, 0.001), (300, 0.0001)]
        with pytest.raises(StatsError):
            fit_footprint(good[:2])
        with pytest.raises(StatsError):
            fit_footprint(good[:2] + [(400, 1.5)])
        with pytest.raises(StatsError):
            fit_footprint([(100, 0.01), (100, 0.001), (100, 0.0001)])

    def test_boundary_sits_on_the_level_set(self):
        rng = np.random.default_rng(11)
        xs = np.sqrt([50, 100, 200, 400, 800, 1600])
        ys = -0.7 * xs + 0.4 + rng.normal(0, 0.05, xs.size)
        fr = fit_footprint([(x * x, math.exp(y)) for x, y in zip(xs, ys)])
        for a, b in fr.region.boundary(k=64):
            q = fr.region.quadratic_form(a, b)
            assert q == pytest.approx(fr.region.level, rel=1e-9)
        # symmetric about the center in the quadratic-form metric
        for a, b in fr.region.boundary(k=16):
            ra, rb = 2 * fr.a - a, 2 * fr.b - b
            assert fr.region.quadratic_form(ra, rb) == pytest.approx(
                fr.region.level, rel=1e-9
            )

    def test_region_covers_truth_in_resamples(self):
        # measured coverage of the factor-1000 region, not an external claim
        a, b, sigma = -0.8, 0.5, 0.05
        xs = np.sqrt([60, 120, 240, 480, 960, 1500, 2100, 3000])
        rng = np.random.default_rng(7)
        hit = 0
        trials = 1000
        for _ in range(trials):
            ys = a * xs + b + rng.normal(0, sigma, xs.size)
            fr = fit_footprint([(x * x, math.exp(y)) for x, y in zip(xs, ys)])
            if fr.region.contains(a, b):
                hit += 1
        assert hit / trials >= 0.95


class TestTeraquop:
    def test_algebraic_inversion(self):
        pts = [(n, math.exp(-math.sqrt(n))) for n in (100, 400, 900, 1600)]
        fr = fit_footprint(pts)
        nstar, _, _ = fr.teraquop
        assert nstar == pytest.approx(math.log(1e-12) ** 2, rel=1e-9)
        # plugging n* back reproduces the target rate exactly
        assert fr.a * math.sqrt(nstar) + fr.b == pytest.approx(
            math.log(1e-12), rel=1e-12
        )

    def test_collapsed_region_degenerates_to_center(self):
        pts = [(n, math.exp(-0.4 * math.sqrt(n) - 1.0)) for n in (100, 300, 700)]
        fr = fit_footprint(pts)
        nstar, lo, hi = teraquop(fr)
        assert lo == pytest.approx(nstar, rel=1e-6)
        assert hi == pytest.approx(nstar, rel=1e-6)

    def test_positive_slope_rejected(self):
        pts = [(n, 1e-6 * math.exp(0.1 * math.sqrt(n))) for n in (100, 200, 300)]
        fr = fit_footprint(pts)
        assert fr.a > 0
        assert fr.teraquop is None
        with pytest.raises(StatsError):
            teraquop(fr)

    def test_base_change_invariance(self):
        rng = np.random.default_rng(3)
        xs = np.sqrt([80, 160, 320, 640, 1280])
        ys = -0.6 * xs + 0.2 + rng.normal(0, 0.02, xs.size)
        fr = fit_footprint([(x * x, math.exp(y)) for x, y in zip(xs, ys)])
        nstar, _, _ = fr.teraquop
        ln10 = math.log(10.0)
        a10 = fr.a / ln10
        b10 = fr.b / ln10
        assert ((math.log10(1e-12) - b10) / a10) ** 2 == pytest.approx(
            nstar, rel=1e-12
        )


class _ZeroDecoder:
    def decode_batch(self, dets):
        return np.zeros((dets.shape[0], 1), dtype=np.uint8)


class TestRunUntilFailures:
    SPEC = BuildSpec("superdense", 3, 12, "Z")

    def test_reaches_target_and_is_deterministic(self):
        kw = dict(
            p=0.003, target_failures=20, batch=4000, seed=77, decoder=_ZeroDecoder()
        )
        r1 = run_until_failures(self.SPEC, **kw)
        r2 = run_until_failures(self.SPEC, **kw)
        assert r1 == r2
        assert r1.failures >= 20
        assert r1.shots % 4000 == 0
        assert r1.n == 13

    def test_zero_noise_hits_the_cap(self):
        with pytest.raises(ShotBudgetError) as ei:
            run_until_failures(
                self.SPEC, 0.0, target_failures=1, batch=5000,
                seed=1, max_shots=20000, decoder=_ZeroDecoder(),
            )
        assert ei.value.record.failures == 0
        assert ei.value.record.shots == 20000

    def test_rounds_convention_enforced(self):
        with pytest.raises(StatsError):
            run_until_failures(
                BuildSpec("superdense", 3, 11, "Z"), 0.001, decoder=_ZeroDecoder()
            )


class TestOutputFormats:
    def test_csv_layout(self):
        text = records_to_csv([record(10, 1000)])
        lines = text.strip().split("\n")
        assert lines[0] == CSV_HEADER
        cells = lines[1].split(",")
        assert cells[0] == "superdense"
        assert cells[4] == "12"
        assert float(cells[7]) == pytest.approx((10 / 1000) / 12)

    def test_fit_json_fields(self):
        pts = [(n, math.exp(-0.9 * math.sqrt(n) + 1.2)) for n in (100, 225, 400)]
        out = json.loads(fit_to_json(fit_footprint(pts)))
        assert set(out) == {"a", "b", "sigma2", "region_samples", "teraquop"}
        assert out["teraquop"] is not None
        assert out["teraquop"]["lo"] <= out["teraquop"]["n"] <= out["teraquop"]["hi"]
