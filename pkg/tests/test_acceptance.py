"""Exit criteria, each at its stated tolerance.

Every test records one PASS/FAIL line, printed inline and again in the
terminal summary. Run just this module with ``pytest -m acceptance -s``.
"""

import math
import re
import time

import numpy as np
import pytest
from conftest import ACCEPTANCE_LINES

from shmww import experiments as ex
from shmww.cli import main
from shmww.distinguisher import (
    chernoff_epsilons,
    confidence_level,
    epsilon_identity,
    epsilon_random,
    experimental_threshold,
    min_signatures,
    rho_identity_exact,
)
from shmww.gf2 import BitVector
from shmww.isd import isd_success_probability, recover_row, sample_free_set
from shmww.params import PARA1, PARA2, TOY
from shmww.scheme import Signature, keygen, make_rng, sign, verify

pytestmark = [pytest.mark.acceptance, pytest.mark.slow]

TABLE5_N = [10, 16, 24, 32, 64, 128, 160, 192, 224, 256]
TABLE5 = {
    "para1": [2, 3, 6, 9, 12, 25, 32, 38, 44, 51],
    "para2": [1, 3, 6, 9, 12, 25, 31, 37, 44, 50],
}


def report(capsys, number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


def test_1_sign_verify(capsys):
    start = time.perf_counter()
    parts, ok = [], True
    for ps in (PARA1, PARA2, TOY):
        rng = make_rng(f"criterion-1-{ps.name}")
        pk, sk = keygen(ps, rng)
        accepted = rejected = c_rejected = 0
        for i in range(100):
            msg = b"round-trip %d" % i
            sig = sign(sk, pk, msg, rng)
            accepted += verify(pk, msg, sig)
            flip = BitVector.from_support(ps.n, [int(rng.integers(ps.n))])
            rejected += not verify(pk, msg, Signature(sig.z ^ flip, sig.c))
            flip_c = BitVector.from_support(ps.k_prime, [int(rng.integers(ps.k_prime))])
            c_rejected += not verify(pk, msg, Signature(sig.z, sig.c ^ flip_c))
        ok &= accepted == 100 and rejected == 100
        parts.append(f"{ps.name}: accept {accepted}/100, z-tamper reject {rejected}/100 "
                     f"(c-tamper {c_rejected}/100)")
    secs = time.perf_counter() - start
    ok &= secs < 300
    report(capsys, 1, ok, "; ".join(parts) + f"; {secs:.0f}s")


def test_2_bit_bias(capsys):
    start = time.perf_counter()
    parts, ok = [], True
    for ps, rho in ((PARA1, 0.155), (PARA2, 0.147)):
        s = ex.bias_summary(ex.run_bias_experiment(ps, 1000, seed=2))
        ok &= abs(s["mean_random"] - 0.5) <= 0.01 and abs(s["mean_identity"] - rho) <= 0.01
        parts.append(f"{ps.name}: random {s['mean_random']:.4f}, identity {s['mean_identity']:.4f} "
                     f"(target 0.500/{rho:.3f})")
    secs = time.perf_counter() - start
    ok &= secs < 600
    report(capsys, 2, ok, "; ".join(parts) + f"; {secs:.0f}s")


def test_3_confidence(capsys):
    start = time.perf_counter()
    theory = confidence_level(110, 0.309439, PARA1)
    rows = ex.run_confidence_experiment(PARA1, [110, 150], trials=100, seed=3,
                                        deltas={110: 0.309439})
    by_n = {r["N"]: r for r in rows}
    secs = time.perf_counter() - start
    ok = (abs(theory - 0.903) <= 0.01 and by_n[110]["alpha_empirical"] >= 0.82
          and by_n[150]["alpha_empirical"] >= 0.99 and secs < 3600)
    report(capsys, 3, ok,
           f"N=110: theory {theory:.4f}, empirical {by_n[110]['alpha_empirical']:.2f}; "
           f"N=150 (delta {by_n[150]['delta']:.4f}): empirical {by_n[150]['alpha_empirical']:.2f}; "
           f"100 trials, {secs:.0f}s")


def test_4_threshold_table(capsys):
    got = {name: [experimental_threshold(ps, N) for N in TABLE5_N]
           for name, ps in (("para1", PARA1), ("para2", PARA2))}
    p1_bad = [N for N, a, b in zip(TABLE5_N, got["para1"], TABLE5["para1"]) if a != b]
    p2_bad = [N for N, a, b in zip(TABLE5_N, got["para2"], TABLE5["para2"]) if a != b]
    p1_exc = {N: got["para1"][TABLE5_N.index(N)] for N in (24, 32)}
    ok = set(p1_bad) <= {24, 32} and p1_exc == {24: 4, 32: 6} and not p2_bad
    report(capsys, 4, ok,
           f"para1 mismatches at N={p1_bad} (computed {p1_exc}); "
           f"para2 mismatches at N={p2_bad} (computed "
           f"{ {N: got['para2'][TABLE5_N.index(N)] for N in p2_bad} }, published "
           f"{ {N: TABLE5['para2'][TABLE5_N.index(N)] for N in p2_bad} })")


def test_5_nstar(capsys):
    n1 = min_signatures(0.9, 0.3005, PARA1)
    n2 = min_signatures(0.9, 0.3015, PARA2)
    a1 = confidence_level(n1, 0.3005, PARA1)
    a2 = confidence_level(n2, 0.3015, PARA2)
    ok = 238 <= n1 <= 263 and 250 <= n2 <= 278 and a1 >= 0.9 and a2 >= 0.9
    report(capsys, 5, ok, f"N* = {n1} (alpha {a1:.5f}), {n2} (alpha {a2:.5f})")


def test_6_isd_probability(capsys):
    start = time.perf_counter()
    pk, sk = keygen(TOY, b"criterion-6-toy")
    rng = np.random.default_rng(6)
    forced = np.array(sorted(sk.trace.random_columns))
    E = sk.E.to_bits()
    ident = sk.trace.identity_columns
    samples, hits = 100_000, 0
    for t in range(samples):
        F = sample_free_set(TOY.n, TOY.redundancy, forced, rng)
        ones = ident[E[t % TOY.k_prime, ident] == 1]
        hits += np.isin(ones, F).all()
    p = isd_success_probability(TOY)
    se = math.sqrt(p * (1 - p) / samples)
    toy_ok = abs(hits / samples - p) <= 3 * se

    pk, sk = keygen(PARA1, b"criterion-6-para1")
    rng = make_rng(60)
    iters = []
    for j in range(50):
        rec = recover_row(pk.H, pk.S.column(j), sk.trace.random_columns, PARA1.ell, rng)
        assert rec.row == sk.E.row(j)
        iters.append(rec.iterations)
    mean = float(np.mean(iters))
    ok = toy_ok and 4.5 <= mean <= 9.5
    report(capsys, 6, ok,
           f"toy: {hits / samples:.5f} vs p = {p:.5f} ({abs(hits / samples - p) / se:.2f} se); "
           f"para1: {mean:.2f} iterations/row over 50 rows (prediction 6.68); "
           f"{time.perf_counter() - start:.0f}s")


def test_7_cost_estimate(capsys):
    totals = {}
    for name, delta in (("para1", 0.3005), ("para2", 0.3015)):
        code = main(["estimate", "--params", name, "--alpha", "0.9", "--delta", str(delta)])
        out = capsys.readouterr().out
        assert code == 0
        totals[name] = float(re.search(r"log2 total\s+([\d.]+)", out).group(1))
    ok = totals["para1"] <= 48 and totals["para2"] <= 52
    report(capsys, 7, ok, f"log2 total: para1 {totals['para1']:.3f}, para2 {totals['para2']:.3f}")


def attack_trials(ps, N, trials, seed, stop_after_success=False):
    reports = []
    for ss in np.random.SeedSequence(seed).spawn(trials):
        reports.append(ex.run_attack_trial(ps, N, ss))
        if stop_after_success and reports[-1].key_equal:
            break
    return reports


def summarize(reports):
    good = sum(bool(r.key_equal) for r in reports)
    secs = sum(r.seconds for r in reports)
    return good, secs


def test_8_end_to_end_attack(capsys):
    wall = time.perf_counter()
    p1 = attack_trials(PARA1, 32, 10, seed=81)
    p1_good, p1_secs = summarize(p1)
    p1_wall = time.perf_counter() - wall

    wall = time.perf_counter()
    p2 = attack_trials(PARA2, 32, 5, seed=82)
    p2_good, p2_secs = summarize(p2)
    p2_wall = time.perf_counter() - wall

    # "at least 1 of 3" is settled by the first success
    n10 = attack_trials(PARA1, 10, 3, seed=83, stop_after_success=True)
    n10_good, n10_secs = summarize(n10)

    ok = (p1_good / 10 >= 0.9 and p1_wall < 1800 and p2_good / 5 >= 0.8 and p2_wall < 12 * 3600
          and n10_good >= 1)
    report(capsys, 8, ok,
           f"para1 N=32: {p1_good}/10 in {p1_wall:.0f}s (tau {p1[0].tau}); "
           f"para2 N=32: {p2_good}/5 in {p2_wall:.0f}s (tau {p2[0].tau}); "
           f"para1 N=10: {n10_good} of {len(n10)} trials run, {n10_secs:.0f}s "
           f"(tau {n10[0].tau}, guessed {[r.guessed_size for r in n10]})")


def test_9_chernoff_dominance(capsys):
    pairs = bad = 0
    for ps in (PARA1, PARA2):
        rho = float(rho_identity_exact(ps))
        for N in (1, 5, 10, 20, 32, 50, 70, 90, 110, 150, 190, 250, 400, 1000):
            for d in np.linspace(rho + 0.002, 0.498, 8):
                d = float(d)
                bR, bI = chernoff_epsilons(N, d, rho)
                bad += epsilon_random(N, d) > bR or epsilon_identity(N, d, rho) > bI
                pairs += 1
    ok = pairs >= 200 and bad == 0
    report(capsys, 9, ok, f"{pairs} (N, delta) pairs, {bad} violations")
