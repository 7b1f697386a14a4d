import io
import json
import math

import pytest

from shortdlog.errors import ParameterError
from shortdlog.experiment import (ExperimentConfig, records, run_experiment, run_trial, wilson_interval,
                                  within_work_bounds)
from shortdlog.group import make_safe_prime_instance


def test_wilson_interval_matches_formula():
    z = 2.5758293035489
    for k, n in [(0, 10), (7, 10), (9950, 10000), (10000, 10000)]:
        p = k / n
        centre = (p + z * z / (2 * n)) / (1 + z * z / n)
        half = z / (1 + z * z / n) * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
        lo, hi = wilson_interval(k, n)
        assert lo == pytest.approx(max(0.0, centre - half), abs=1e-9)
        assert hi == pytest.approx(min(1.0, centre + half), abs=1e-9)
    assert all(math.isnan(v) for v in wilson_interval(0, 0))


def test_config_validation():
    with pytest.raises(ParameterError):
        ExperimentConfig(m=16, delta=0, tau=17)
    with pytest.raises(ParameterError):
        ExperimentConfig(m=16, delta=0, tau=7, kind="ecc")
    with pytest.raises(ParameterError):
        ExperimentConfig(m=16, delta=0, tau=7, prime_bits=30)
    with pytest.raises(ParameterError):
        ExperimentConfig(m=33, delta=2, tau=7, kind="rsa")
    with pytest.raises(ParameterError):
        ExperimentConfig(m=16, delta=0, tau=7, tail_policy="drop")
    assert ExperimentConfig(m=16, delta=0, tau=7).bits == 34


def test_records_are_deterministic_and_worker_independent():
    cfg = ExperimentConfig(m=12, delta=0, tau=5, trials=24, seed=3)
    a = records(cfg, workers=1)
    b = records(cfg, workers=3)
    assert [json.dumps(r) for r in a] == [json.dumps(r) for r in b]
    assert [r["trial"] for r in a] == [str(i) for i in range(24)]


def test_summary_fields_and_success():
    cfg = ExperimentConfig(m=14, delta=0, tau=7, trials=60, seed=1)
    sink = io.StringIO()
    summary = run_experiment(cfg, sink=sink)
    lines = sink.getvalue().splitlines()
    assert len(lines) == 60
    assert summary["successes"] >= 55
    assert summary["wilson_low"] <= summary["rate"] <= summary["wilson_high"]
    assert summary["bound_violations"] == 0
    assert summary["ops_max"] <= summary["ops_bound"]
    assert summary["bound_consistent"] is True


def test_zero_trials():
    summary = run_experiment(ExperimentConfig(m=12, delta=0, tau=5, trials=0))
    assert summary["rate_undefined"] and math.isnan(summary["rate"])


def test_fixed_instance_and_timing():
    inst = make_safe_prime_instance(26, 12, 0, seed=8)
    cfg = ExperimentConfig(m=12, delta=0, tau=6, trials=5, timing=True)
    recs = records(cfg, fixed_instance=inst)
    assert {r["N_group"] for r in recs} == {str(inst.N)}
    assert all("wall_time" in r for r in recs)


def test_rsa_trial():
    cfg = ExperimentConfig(m=21, delta=8, tau=6, trials=1, kind="rsa", seed=2)
    rec = run_trial(cfg, 0)
    assert rec["success"] in (True, False)
    assert rec["k"] is None or "ops" in rec


def test_within_work_bounds():
    cfg = ExperimentConfig(m=16, delta=0, tau=7, t=2)
    N = cfg.N
    assert within_work_bounds(int(8 * math.sqrt(N)), 3, cfg)
    assert not within_work_bounds(int(8 * math.sqrt(N)) + 1, 3, cfg)
    assert not within_work_bounds(1, int(8 * math.sqrt(N)) + 4, cfg)
