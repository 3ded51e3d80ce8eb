import math
import random

import numpy as np
import pytest

from hhverify.analysis import (
    DEFAULT_PARAMS_GRID,
    HISTOGRAM_BUCKETS,
    SWEEP_COLUMNS,
    bucket_of,
    fuzz,
    optimal_x,
    run_trial,
    slack_ratio,
    summarize,
    sweep_x,
)
from hhverify.catalog import CATALOG, GeneratorConfig
from hhverify.errors import ParameterError
from hhverify.exprlang import parse
from hhverify.hhbounds import ExponentParams, bound_baseline, bound_thm6
from hhverify.numerics import Interval

UNIT = Interval(0.0, 1.0)


class TestSweep:
    def test_identity_three_rows(self):
        t = sweep_x(parse("x"), UNIT, 3, ExponentParams(2, 2))
        assert list(t.column("x")) == [0.0, 0.5, 1.0]
        np.testing.assert_allclose(t.column("lhs"), [0.5, 0.0, 0.5], atol=1e-12)
        assert list(t.column("rhs6")) == [0.5, 0.25, 0.5]

    def test_constant_is_all_zero(self):
        t = sweep_x(parse("4"), Interval(-1, 2), 17)
        for c in SWEEP_COLUMNS[1:5]:
            assert np.all(t.column(c) == 0.0)

    def test_square_min_slack_row_matches_oracle(self):
        t = sweep_x(parse("x^2"), UNIT, 101)
        # Direct closed form: rhs6 = x^3 + (1-x)^2, lhs = |2/3 - x|.
        xs = UNIT.grid(101)
        oracle = xs**3 + (1 - xs) ** 2 - np.abs(2 / 3 - xs)
        k, s = t.min_slack("slack6")
        assert k == int(np.argmin(oracle)) == 33
        assert s == pytest.approx(oracle[33], abs=1e-10)

    @pytest.mark.parametrize("name", [n for n, e in CATALOG.items() if e.derivative_quasiconvex])
    def test_certified_slacks_nonnegative(self, name):
        e = CATALOG[name]
        for params in DEFAULT_PARAMS_GRID:
            t = sweep_x(e.expression, e.interval, 101, params)
            allowance = 1e-9 + t.quadrature_error
            for c in ("slack6", "slack7", "slack8"):
                assert t.min_slack(c)[1] >= -allowance

    @pytest.mark.parametrize("name", list(CATALOG))
    def test_midpoint_row_matches_baselines(self, name):
        e = CATALOG[name]
        params = ExponentParams(3.0, 1.5)
        t = sweep_x(e.expression, e.interval, 101, params, certify=False)
        row = t.rows[50]
        assert row[0] == e.interval.midpoint
        for col, base in (("rhs6", "eq1"), ("rhs7", "eq2"), ("rhs8", "eq3")):
            v, w = row[SWEEP_COLUMNS.index(col)], bound_baseline(e.expression, e.interval, base, params)
            assert abs(v - w) <= 1e-12 * max(abs(v), abs(w), 1e-300)

    def test_rows_ascending_with_exact_endpoints(self):
        t = sweep_x(parse("exp(x)"), Interval(-0.3, 0.7), 37)
        xs = t.column("x")
        assert xs[0] == -0.3 and xs[-1] == 0.7 and np.all(np.diff(xs) > 0)
        assert t.column("slack7").tolist() == (t.column("rhs7") - t.column("lhs")).tolist()

    def test_csv_header_and_round_trip(self):
        t = sweep_x(parse("exp(x)"), UNIT, 5)
        lines = t.to_csv().splitlines()
        assert lines[0] == "x,lhs,rhs6,rhs7,rhs8,slack6,slack7,slack8"
        parsed = [tuple(float(v) for v in line.split(",")) for line in lines[1:]]
        assert parsed == t.rows

    def test_needs_two_points(self):
        with pytest.raises(ParameterError):
            sweep_x(parse("x"), UNIT, 1)


class TestOptimalX:
    def test_identity(self):
        r = optimal_x(parse("x"), UNIT, "thm6")
        assert r.result.argmin == pytest.approx(0.5, abs=1e-8)
        assert r.result.min_value == pytest.approx(0.25, abs=1e-12)
        assert r.midpoint_value == 0.25

    def test_exp_beats_midpoint(self):
        f = parse("exp(x)")
        xs = np.linspace(0, 1, 1_000_001)
        oracle = xs[np.argmin(bound_thm6(f, UNIT, xs))]
        r = optimal_x(f, UNIT, "thm6")
        assert r.result.argmin == pytest.approx(0.551, abs=0.01)
        assert r.result.argmin == pytest.approx(oracle, abs=1e-5)
        assert r.result.min_value < r.midpoint_value

    def test_constant_tie_rule(self):
        r = optimal_x(parse("3"), Interval(1, 2), "thm7")
        assert (r.result.argmin, r.result.min_value) == (1.0, 0.0)

    @pytest.mark.parametrize("name", list(CATALOG))
    @pytest.mark.parametrize("theorem", ["thm6", "thm7", "thm8"])
    def test_never_loses_to_midpoint(self, name, theorem):
        e = CATALOG[name]
        r = optimal_x(e.expression, e.interval, theorem, ExponentParams(1.5, 5.0))
        assert r.result.min_value <= r.midpoint_value + 1e-10

    def test_rejects_baselines(self):
        with pytest.raises(ParameterError):
            optimal_x(parse("x"), UNIT, "eq1")


class TestHistogramRules:
    def test_ratio(self):
        assert slack_ratio(0.0, 0.0) == (0.0, False)
        assert slack_ratio(1.0, 0.0) == (0.0, True)
        assert slack_ratio(1.0, 4.0) == (0.25, False)

    @pytest.mark.parametrize("ratio, bucket", [(0.0, 0), (0.049, 0), (0.05, 1), (0.999, 19), (1.0, 19), (1.3, 19)])
    def test_buckets(self, ratio, bucket):
        assert bucket_of(ratio) == bucket
        assert HISTOGRAM_BUCKETS == 20


class TestFuzz:
    def test_single_trial_identity(self):
        cfg = GeneratorConfig(seed=42, family="monotone-exp")
        s = fuzz(cfg, trials=1)
        o = run_trial(cfg, 0, DEFAULT_PARAMS_GRID)
        assert s.min_slack == o.slacks
        assert s.families == {"monotone-exp": 1}

    def test_deterministic(self):
        cfg = GeneratorConfig(seed=11)
        assert fuzz(cfg, 25).to_dict() == fuzz(cfg, 25).to_dict()

    def test_order_independent(self):
        cfg = GeneratorConfig(seed=5)
        outcomes = [run_trial(cfg, i, DEFAULT_PARAMS_GRID) for i in range(20)]
        shuffled = outcomes[:]
        random.Random(0).shuffle(shuffled)
        reversed_run = [run_trial(cfg, i, DEFAULT_PARAMS_GRID) for i in reversed(range(20))]
        ref = summarize(5, outcomes).to_dict()
        assert summarize(5, shuffled).to_dict() == ref
        assert summarize(5, reversed_run).to_dict() == ref

    def test_small_campaign_is_clean(self):
        s = fuzz(GeneratorConfig(seed=42), 40)
        assert (s.violations, s.hypothesis_failures, s.errors) == (0, 0, 0)
        assert sum(s.families.values()) == 40
        per_theorem = 40 * len(DEFAULT_PARAMS_GRID)
        for t, counts in s.histogram.items():
            assert sum(counts) + s.degenerate[t] == per_theorem
        assert all(math.isfinite(v) for v in s.min_slack.values())

    def test_rejects_empty(self):
        with pytest.raises(ParameterError):
            fuzz(GeneratorConfig(), 0)
        with pytest.raises(ParameterError):
            fuzz(GeneratorConfig(), 3, params_grid=())
