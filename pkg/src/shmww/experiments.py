"""Experiment drivers producing CSV-ready rows.

Every driver returns a list of dicts whose keys are the CSV header, in order.
Non-timing columns are deterministic for a given seed.
"""

from __future__ import annotations

import csv
import math
import os
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .distinguisher import (
    DistinguisherConfig,
    column_probabilities,
    confidence_level,
    experimental_threshold,
    guess_random_columns,
    log_confidence_level,
    min_signatures,
    nstar_optimal_delta,
    optimal_delta,
    tally,
    tally_bits,
)
from .isd import attack_cost_estimate, full_attack
from .params import ParameterSet
from .scheme import keygen, make_rng, sign, sign_many, signatures_to_bits, verify

BIAS_HEADER = ["index", "frequency", "label"]
CONFIDENCE_HEADER = ["N", "delta", "tau", "alpha_theory", "log10_alpha_theory",
                     "alpha_exact", "alpha_empirical", "trials"]
NSTAR_HEADER = ["params", "alpha_star", "delta", "rho_I", "n_star", "alpha_at_n_star",
                "log2_isd_cost", "log2_attack_bound"]
TIMING_HEADER = ["N", "tau", "trials", "success_rate", "key_equal_rate", "min_seconds",
                 "avg_seconds", "max_seconds", "avg_free_sets"]
BENCH_HEADER = ["params", "operation", "iterations", "mean_ms", "stdev_ms"]

EXPERIMENTS = ("bias", "confidence", "nstar", "attack-timing", "bench")


def default_workers() -> int:
    env = os.environ.get("SHMWW_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass
class ExperimentSpec:
    kind: str
    params: ParameterSet
    n_list: list[int] = field(default_factory=list)
    trials: int = 1
    seed: int = 0
    output: Path | None = None

    def __post_init__(self):
        if self.kind not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.kind!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if any(N < 1 for N in self.n_list):
            raise ValueError("signature counts must be positive")


def write_csv(rows: list[dict], path, header: list[str] | None = None) -> None:
    header = header or (list(rows[0]) if rows else [])
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=header)
        w.writeheader()
        w.writerows(rows)


def _trial_seeds(seed: int, trials: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(trials)


def _pmap(fn, items, workers: int):
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def run_bias_experiment(ps: ParameterSet, N: int, seed: int = 0,
                        raw_challenge: bool = False) -> list[dict]:
    """Relative frequency of set bits per position, labelled with the true column type."""
    if N < 1:
        raise ValueError("N must be positive")
    rng = make_rng(seed)
    pk, sk = keygen(ps, rng)
    _, sigs = sign_many(sk, pk, N, rng, raw_challenge)
    freq = tally(sigs).frequencies
    random_cols = sk.trace.random_columns
    return [{"index": i, "frequency": float(freq[i]),
             "label": "random" if i in random_cols else "identity"} for i in range(ps.n)]


def bias_summary(rows: list[dict]) -> dict:
    by = {"random": [], "identity": []}
    for r in rows:
        by[r["label"]].append(r["frequency"])
    return {
        "mean_random": float(np.mean(by["random"])),
        "mean_identity": float(np.mean(by["identity"])),
        "min_random": float(np.min(by["random"])),
        "max_identity": float(np.max(by["identity"])),
    }


def run_confidence_experiment(ps: ParameterSet, n_list: list[int], trials: int, seed: int = 0,
                              deltas: dict[int, float] | None = None,
                              raw_challenge: bool = False, workers: int = 1) -> list[dict]:
    """Theoretical versus empirical probability of guessing the random columns exactly.

    Each trial draws one key pair and ``max(n_list)`` signatures; the first
    ``N`` of them are used for every ``N``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n_list = sorted(n_list)
    deltas = dict(deltas or {})
    for N in n_list:
        deltas.setdefault(N, optimal_delta(N, ps))
    n_max = n_list[-1]

    def trial(ss):
        rng = np.random.default_rng(ss)
        pk, sk = keygen(ps, rng)
        _, sigs = sign_many(sk, pk, n_max, rng, raw_challenge)
        bits = signatures_to_bits(sigs)
        truth = sk.trace.random_columns
        hits = {}
        for N in n_list:
            cfg = DistinguisherConfig.from_delta(N, deltas[N])
            hits[N] = guess_random_columns(tally_bits(bits[:N]), cfg) == truth
        return hits

    results = _pmap(trial, _trial_seeds(seed, trials), workers)
    rows = []
    for N in n_list:
        d = deltas[N]
        la = log_confidence_level(N, d, ps)
        rows.append({
            "N": N, "delta": d, "tau": DistinguisherConfig.from_delta(N, d).tau,
            "alpha_theory": math.exp(la), "log10_alpha_theory": la / math.log(10),
            "alpha_exact": confidence_level(N, d, ps, conservative=False),
            "alpha_empirical": sum(r[N] for r in results) / trials, "trials": trials,
        })
    return rows


def run_nstar(param_sets: list[ParameterSet], alpha_star: float = 0.9,
              deltas: dict[str, float] | None = None) -> list[dict]:
    """Chernoff signature bound and the resulting attack cost per parameter set."""
    rows = []
    for ps in param_sets:
        d = (deltas or {}).get(ps.name) or nstar_optimal_delta(alpha_star, ps)
        n_star = min_signatures(alpha_star, d, ps)
        est = attack_cost_estimate(ps, alpha_star, d)
        rows.append({
            "params": ps.name, "alpha_star": alpha_star, "delta": d,
            "rho_I": column_probabilities(ps)[1], "n_star": n_star,
            "alpha_at_n_star": confidence_level(n_star, d, ps),
            "log2_isd_cost": est.log2_total_cost, "log2_attack_bound": est.log2_attack_bound,
        })
    return rows


def run_attack_trial(ps: ParameterSet, N: int, seed, tau: int | None = None,
                     shared: bool = True, max_iters: int = 5000, raw_challenge: bool = False):
    """One key pair, ``N`` signatures, one full attack; returns the report."""
    rng = np.random.default_rng(seed)
    pk, sk = keygen(ps, rng)
    _, sigs = sign_many(sk, pk, N, rng, raw_challenge)
    if tau is None:
        tau = experimental_threshold(ps, N)
    report = full_attack(pk, sigs, tau=tau, rng=rng, shared=shared, max_iters=max_iters)
    report.key_equal = report.success and report.key == sk.E
    return report


def run_attack_timing(ps: ParameterSet, n_list: list[int], trials: int, seed: int = 0,
                      shared: bool = True, max_iters: int = 5000, workers: int = 1,
                      raw_challenge: bool = False) -> list[dict]:
    """Attack wall-clock time and success rate as a function of ``N``."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rows = []
    for N in n_list:
        tau = experimental_threshold(ps, N)
        seeds = _trial_seeds(seed * 100003 + N, trials)
        reports = _pmap(lambda ss: run_attack_trial(ps, N, ss, tau, shared, max_iters, raw_challenge),
                        seeds, workers)
        secs = [r.seconds for r in reports]
        rows.append({
            "N": N, "tau": tau, "trials": trials,
            "success_rate": sum(r.success for r in reports) / trials,
            "key_equal_rate": sum(bool(r.key_equal) for r in reports) / trials,
            "min_seconds": min(secs), "avg_seconds": statistics.fmean(secs),
            "max_seconds": max(secs),
            "avg_free_sets": statistics.fmean(r.samples for r in reports),
        })
    return rows


def run_primitive_bench(ps: ParameterSet, iterations: int, seed: int = 0) -> list[dict]:
    """Mean and standard deviation of keygen, sign and verify times."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    rng = make_rng(seed)
    times = {"keygen": [], "sign": [], "verify": []}
    for i in range(iterations):
        t0 = time.perf_counter()
        pk, sk = keygen(ps, rng)
        t1 = time.perf_counter()
        msg = b"bench-%d" % i
        sig = sign(sk, pk, msg, rng)
        t2 = time.perf_counter()
        ok = verify(pk, msg, sig)
        t3 = time.perf_counter()
        if not ok:
            raise RuntimeError("benchmark signature failed to verify")
        times["keygen"].append(t1 - t0)
        times["sign"].append(t2 - t1)
        times["verify"].append(t3 - t2)
    return [{
        "params": ps.name, "operation": op, "iterations": iterations,
        "mean_ms": 1e3 * statistics.fmean(ts),
        "stdev_ms": 1e3 * statistics.stdev(ts) if len(ts) > 1 else 0.0,
    } for op, ts in times.items()]
