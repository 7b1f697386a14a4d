"""Monte Carlo runs: instance, simulated pair, recovery, one JSONL record per trial.

Every trial draws from its own generator keyed by ``(seed, trial)``, so the
log does not depend on the number of workers.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, List, Optional

from statsmodels.stats.proportion import proportion_confint

from .bounds import success_lower_bound
from .errors import ParameterError
from .group import ProblemInstance, make_rsa_instance, make_safe_prime_instance
from .lattice import work_parameter
from .postprocess import RecoveryParams, recover_d
from .simulator import DEFAULT_WINDOW, SimulatorConfig, random_bits, sample_pair, trial_rng

KINDS = ("safe_prime", "rsa")
CONFIDENCE = 0.99


@dataclass(frozen=True)
class ExperimentConfig:
    m: int
    delta: int
    tau: int
    t: int = 2
    c: int = 1
    trials: int = 1000
    seed: int = 0
    kind: str = "safe_prime"
    window: int = DEFAULT_WINDOW
    tail_policy: str = "fail"
    prime_bits: Optional[int] = None
    d_mode: str = "uniform_mbit"
    timing: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.m < 2 or not 0 <= self.delta < self.m:
            raise ParameterError(f"need m >= 2 and 0 <= delta < m (m={self.m}, delta={self.delta})")
        if not 0 <= self.tau <= self.ell:
            raise ParameterError(f"tau must lie in [0, l] = [0, {self.ell}]")
        if self.t < 0 or self.c < 1 or self.trials < 0:
            raise ParameterError("need t >= 0, c >= 1 and trials >= 0")
        if self.kind == "safe_prime" and self.prime_bits is not None and self.prime_bits < self.m + self.ell + 2:
            raise ParameterError(f"prime_bits must be >= m + l + 2 = {self.m + self.ell + 2} for shortness")
        if self.kind == "rsa":
            # element orders are below 2^(2 l_rsa - 1) while shortness needs more than 2^(m+l)
            if self.m - 1 < 16:
                raise ParameterError("rsa instances need m >= 17 (primes of m - 1 >= 16 bits)")
            if self.delta < 4:
                raise ParameterError("rsa instances need delta >= 4 for the shortness condition")
        SimulatorConfig(window=self.window, tail_policy=self.tail_policy, seed=self.seed)

    @property
    def ell(self) -> int:
        return self.m - self.delta

    @property
    def bits(self) -> int:
        return self.prime_bits or self.m + self.ell + 2

    @property
    def N(self) -> int:
        return work_parameter(self.delta, self.tau, self.t)


def make_instance(config: ExperimentConfig, seed: int) -> ProblemInstance:
    if config.kind == "rsa":
        return make_rsa_instance(config.m - 1, config.delta, seed=seed)
    return make_safe_prime_instance(config.bits, config.m, config.delta, seed=seed, d_mode=config.d_mode)


def run_trial(config: ExperimentConfig, trial: int, instance: Optional[ProblemInstance] = None) -> dict:
    """One trial as a JSON-ready record (integers as decimal strings)."""
    start = time.perf_counter()
    rng = trial_rng(config.seed, trial)
    if instance is None:
        instance = make_instance(config, random_bits(rng, 64))
    sim = SimulatorConfig(window=config.window, tail_policy=config.tail_policy, seed=config.seed)
    sample = sample_pair(instance, sim, rng)
    rec = {"trial": str(trial), "N_group": str(instance.N), "d_true": str(instance.d)}
    rec.update({k: v for k, v in sample.to_record().items()})
    if sample.k is None:
        rec.update({"found": False, "success": False})
    else:
        ctx, g, x = instance.elements()
        report = recover_d(g, x, sample.j, sample.k, instance.m, instance.ell,
                           RecoveryParams(tau=config.tau, c=config.c), d_true=instance.d)
        rec.update(report.to_record())
        rec["tau_good"] = report.tau_good
        rec["t_balanced_at"] = str(report.t_balanced_at)
        rec["success"] = bool(report.found and report.d == instance.d)
    if config.timing:
        rec["wall_time"] = round(time.perf_counter() - start, 6)
    return rec


def _run_one(args):
    config, trial, instance = args
    return run_trial(config, trial, instance)


def iter_records(config: ExperimentConfig, workers: int = 1, fixed_instance: Optional[ProblemInstance] = None,
                 chunksize: int = 16) -> Iterator[dict]:
    """Records in trial order, computed on up to ``workers`` processes."""
    if workers < 1:
        raise ParameterError("workers must be positive")
    jobs = ((config, trial, fixed_instance) for trial in range(config.trials))
    if workers == 1 or config.trials <= 1:
        yield from map(_run_one, jobs)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(_run_one, jobs, chunksize=chunksize)


def wilson_interval(successes: int, trials: int, confidence: float = CONFIDENCE):
    if trials == 0:
        return math.nan, math.nan
    lo, hi = proportion_confint(successes, trials, alpha=1 - confidence, method="wilson")
    return float(lo), float(hi)


@dataclass
class Summary:
    trials: int = 0
    successes: int = 0
    tail_events: int = 0
    tau_good: int = 0
    ops_total: int = 0
    ops_max: int = 0
    table_max: int = 0
    bound_violations: int = 0
    recovered: int = 0
    config: Optional[ExperimentConfig] = field(default=None, repr=False)

    def add(self, rec: dict):
        self.trials += 1
        self.successes += bool(rec["success"])
        self.tail_events += bool(rec.get("tail"))
        self.tau_good += bool(rec.get("tau_good"))
        if "ops" in rec:
            ops, table = int(rec["ops"]), int(rec["table"])
            self.recovered += 1
            self.ops_total += ops
            self.ops_max = max(self.ops_max, ops)
            self.table_max = max(self.table_max, table)
            if rec["success"] and not within_work_bounds(ops, table, self.config):
                self.bound_violations += 1

    def to_record(self) -> dict:
        cfg = self.config
        lo, hi = wilson_interval(self.successes, self.trials)
        rate = self.successes / self.trials if self.trials else math.nan
        bound = success_lower_bound(cfg.delta, cfg.tau, cfg.t)
        return {
            "trials": self.trials, "successes": self.successes, "rate": rate,
            "rate_undefined": self.trials == 0,
            "wilson_confidence": CONFIDENCE, "wilson_low": lo, "wilson_high": hi,
            "success_bound": bound,
            # the bound is contradicted only if it exceeds what the data allow
            "bound_consistent": None if self.trials == 0 else bound <= hi,
            "tail_events": self.tail_events, "tau_good": self.tau_good,
            "ops_mean": self.ops_total / self.recovered if self.recovered else math.nan,
            "ops_max": self.ops_max, "table_max": self.table_max,
            "ops_bound": 8 * cfg.c * math.sqrt(cfg.N), "table_bound": 8 * math.sqrt(cfg.N) / cfg.c + 3,
            "bound_violations": self.bound_violations,
            "m": cfg.m, "delta": cfg.delta, "tau": cfg.tau, "t": cfg.t, "c": cfg.c,
            "kind": cfg.kind, "seed": cfg.seed,
        }


def within_work_bounds(ops: int, table: int, config: ExperimentConfig) -> bool:
    """``ops <= 2^3 c sqrt(N)`` and ``table <= 2^3 sqrt(N) / c + 3``, compared exactly."""
    N, c = config.N, config.c
    if ops * ops > 64 * c * c * N:
        return False
    excess = table - 3
    return excess <= 0 or (excess * c) ** 2 <= 64 * N


def run_experiment(config: ExperimentConfig, workers: int = 1, fixed_instance: Optional[ProblemInstance] = None,
                   sink=None) -> dict:
    """Run every trial, writing JSONL lines to ``sink`` if given; returns the summary."""
    summary = Summary(config=config)
    for rec in iter_records(config, workers, fixed_instance):
        summary.add(rec)
        if sink is not None:
            sink.write(json.dumps(rec) + "\n")
    return summary.to_record()


def records(config: ExperimentConfig, workers: int = 1, fixed_instance=None) -> List[dict]:
    return list(iter_records(config, workers, fixed_instance))
