import dataclasses
import math
from fractions import Fraction

import numpy as np
import pytest

from shmww.distinguisher import experimental_threshold
from shmww.gf2 import mat_vec_mul
from shmww.isd import (
    KeyRecoveryFailure,
    RowNotFound,
    _Problem,
    acceptance_bound,
    attack_cost_estimate,
    full_attack,
    isd_success_probability,
    isd_success_probability_exact,
    recover_private_key,
    recover_row,
    sample_free_set,
)
from shmww.params import PARA1, PARA2, SMALL, TOY
from shmww.scheme import check_key_pair, make_rng, sign_many


def support_hit_rate(sk, samples, rng):
    """Fraction of free sets forced over I_R that also hold a row's identity ones."""
    ps = sk.params
    forced = np.array(sorted(sk.trace.random_columns))
    E = sk.E.to_bits()
    ident = sk.trace.identity_columns
    hits = 0
    for t in range(samples):
        F = sample_free_set(ps.n, ps.redundancy, forced, rng)
        row = E[t % ps.k_prime]
        ones = ident[row[ident] == 1]
        hits += np.isin(ones, F).all()
    return hits / samples


# closed forms


def test_success_probability_values():
    assert isd_success_probability_exact(TOY) == Fraction(1, 28)
    assert isd_success_probability_exact(PARA1) == Fraction(math.comb(3021, 4), math.comb(3560, 4))
    assert isd_success_probability(PARA1) == pytest.approx(0.519, abs=1e-3)
    assert isd_success_probability(PARA2) == pytest.approx(0.269038, abs=1e-6)
    assert isd_success_probability(dataclasses.replace(TOY, ell=0)) == 1


def test_success_probability_precondition():
    bad = dataclasses.replace(SMALL, k=200)
    with pytest.raises(ValueError, match="free set"):
        isd_success_probability(bad)


def test_cost_estimate():
    e1 = attack_cost_estimate(PARA1, 0.9, 0.3005)
    assert e1.expected_iterations == pytest.approx(6.68, abs=0.01)
    assert e1.log2_attack_bound <= 48
    assert e1.n_star == 243
    assert e1.attack_bound == PARA1.n * (243 + 1) + e1.total_cost
    e2 = attack_cost_estimate(PARA2, 0.9, 0.3015)
    assert e2.log2_attack_bound <= 52
    assert e2.expected_iterations == pytest.approx(12.87, abs=0.01)
    # cost is inversely proportional to p
    for e, ps in ((e1, PARA1), (e2, PARA2)):
        assert e.total_cost * e.p == pytest.approx(ps.k_prime * ps.redundancy**3 / e.invertible)


# sampling and acceptance


def test_sample_free_set(rng):
    forced = np.array([3, 9, 15])
    for _ in range(50):
        F = sample_free_set(20, 8, forced, rng)
        assert len(F) == 8 == len(set(F.tolist()))
        assert set(forced) <= set(F.tolist())
        assert np.all(np.diff(F) > 0)
    with pytest.raises(ValueError):
        sample_free_set(20, 2, forced, rng)


def test_toy_support_probability_monte_carlo(toy_keys):
    _, sk = toy_keys
    samples = 100_000
    rate = support_hit_rate(sk, samples, np.random.default_rng(99))
    p = 1 / 28
    assert abs(rate - p) <= 3 * math.sqrt(p * (1 - p) / samples)


def test_para1_support_probability_sampled(para1_keys):
    _, sk = para1_keys
    samples = 4000
    rate = support_hit_rate(sk, samples, np.random.default_rng(7))
    p = isd_success_probability(PARA1)
    assert abs(rate - p) <= 3 * math.sqrt(p * (1 - p) / samples)


def test_acceptance_bound_oracle():
    for free, ell in ((100, 4), (300, 4), (1021, 4), (5975, 8)):
        w = acceptance_bound(free, ell)
        below = sum(math.comb(free, i) for i in range(w + 1))
        above = below + math.comb(free, w + 1)
        assert Fraction(below, 2**free) <= Fraction(1, 2**64)
        assert Fraction(above, 2**free) > Fraction(1, 2**64)
    assert acceptance_bound(50, 4) == 4
    assert acceptance_bound(10, 4, log2_false_accept=-2) == 4


def test_sampled_submatrix_invertibility(small_keys):
    pk, sk = small_keys
    prob = _Problem(pk.H, pk.S.to_bits(), sk.trace.random_columns)
    rng = np.random.default_rng(5)
    trials = 20_000
    ok = sum(prob.solve(prob.sample(rng), np.array([0])) is not None for _ in range(trials))
    assert abs(ok / trials - 0.2887) <= 0.01


# row and key recovery


def test_recover_row_small(small_keys):
    pk, sk = small_keys
    rng = make_rng(1)
    for j in (0, 17, 47):
        s = pk.S.column(j)
        rec = recover_row(pk.H, s, sk.trace.random_columns, SMALL.ell, rng)
        assert rec.row == sk.E.row(j)
        assert mat_vec_mul(pk.H, rec.row) == s
        assert rec.iterations >= 1 and rec.singular < rec.iterations


def test_recover_row_toy_filters(toy_keys):
    # the toy code is too short for unique decoding; check the contract only
    pk, sk = toy_keys
    guessed = sk.trace.random_columns
    outside = [i for i in range(TOY.n) if i not in guessed]
    for j in range(TOY.k_prime):
        s = pk.S.column(j)
        rec = recover_row(pk.H, s, guessed, TOY.ell, make_rng(j), max_iters=5000)
        assert mat_vec_mul(pk.H, rec.row) == s
        assert rec.row.to_bits()[outside].sum() <= TOY.ell


def test_recover_row_errors(small_keys):
    pk, sk = small_keys
    with pytest.raises(ValueError):
        recover_row(pk.H, sk.E.row(0), sk.trace.random_columns, 4)
    with pytest.raises(RowNotFound):
        recover_row(pk.H, pk.S.column(0), set(), SMALL.ell, make_rng(0), max_iters=3)
    with pytest.raises(ValueError, match="raise the threshold"):
        recover_row(pk.H, pk.S.column(0), range(SMALL.redundancy + 1), SMALL.ell)


def test_recover_private_key_small_per_row(small_keys):
    pk, sk = small_keys
    rec = recover_private_key(pk, sk.trace.random_columns, make_rng(2))
    assert rec.E == sk.E
    assert len(rec.iterations) == SMALL.k_prime
    assert rec.samples == sum(rec.iterations)
    expected = 1 / (0.2887 * isd_success_probability(SMALL))
    assert 0.5 * expected <= np.mean(rec.iterations) <= 1.5 * expected


def test_recover_private_key_threads_match_serial(small_keys):
    pk, sk = small_keys
    a = recover_private_key(pk, sk.trace.random_columns, make_rng(3))
    b = recover_private_key(pk, sk.trace.random_columns, make_rng(3), workers=4)
    assert a.E == b.E and a.iterations == b.iterations


def test_recover_private_key_shared(small_keys):
    pk, sk = small_keys
    rec = recover_private_key(pk, sk.trace.random_columns, make_rng(4), shared=True)
    assert rec.E == sk.E
    assert rec.samples == max(rec.iterations)


def test_recover_private_key_superset(small_keys):
    pk, sk = small_keys
    truth = sk.trace.random_columns
    rng = np.random.default_rng(8)
    extra = rng.choice([i for i in range(SMALL.n) if i not in truth], size=40, replace=False)
    guessed = truth | {int(i) for i in extra}
    base = recover_private_key(pk, truth, make_rng(6))
    wide = recover_private_key(pk, guessed, make_rng(6))
    assert wide.E == sk.E
    assert np.mean(wide.iterations) > np.mean(base.iterations)


def test_recover_private_key_failure(small_keys):
    pk, _ = small_keys
    with pytest.raises(KeyRecoveryFailure) as info:
        recover_private_key(pk, set(), make_rng(0), max_iters=2)
    assert info.value.row == 0
    with pytest.raises(KeyRecoveryFailure):
        recover_private_key(pk, set(), make_rng(0), max_iters=2, shared=True)


def test_auto_bound_tolerates_missed_columns(small_keys):
    pk, sk = small_keys
    missed = set(sorted(sk.trace.random_columns)[:3])
    guessed = sk.trace.random_columns - missed
    rec = recover_private_key(pk, guessed, make_rng(9), max_weight="auto", shared=True)
    assert rec.E == sk.E


@pytest.mark.slow
def test_recover_private_key_para1_superset(para1_keys):
    pk, sk = para1_keys
    truth = sk.trace.random_columns
    extra = np.random.default_rng(20).choice(
        [i for i in range(PARA1.n) if i not in truth], size=20, replace=False)
    rec = recover_private_key(pk, truth | {int(i) for i in extra}, make_rng(1), shared=True)
    assert rec.E == sk.E


# full attack


def test_full_attack_small(small_keys):
    pk, sk = small_keys
    _, sigs = sign_many(sk, pk, 64, make_rng(10))
    tau = experimental_threshold(SMALL, 64)
    report = full_attack(pk, sigs, tau=tau, rng=make_rng(11))
    assert report.success and report.key == sk.E
    assert report.tau == tau and report.N == 64
    assert report.guessed_size == len(report.guessed) >= SMALL.n_random - 5
    assert check_key_pair(pk, report.key)
    assert report.seconds > 0 and report.samples >= 1


def test_full_attack_per_row(small_keys):
    pk, sk = small_keys
    _, sigs = sign_many(sk, pk, 64, make_rng(10))
    report = full_attack(pk, sigs, delta=0.4, rng=make_rng(1), shared=False)
    assert report.success and report.key == sk.E
    assert len(report.iterations) == SMALL.k_prime


def test_full_attack_arguments(small_keys):
    pk, sk = small_keys
    _, sigs = sign_many(sk, pk, 20, make_rng(1))
    with pytest.raises(ValueError):
        full_attack(pk, [], tau=3)
    with pytest.raises(ValueError):
        full_attack(pk, sigs, tau=3, delta=0.3)
    with pytest.raises(ValueError):
        full_attack(pk, sigs)


def test_full_attack_oversized_guess(small_keys):
    pk, sk = small_keys
    _, sigs = sign_many(sk, pk, 20, make_rng(1))
    report = full_attack(pk, sigs, tau=0)
    assert not report.success and report.key is None
    assert "raise the threshold" in report.error


def test_full_attack_never_returns_unverified_key(small_keys):
    pk, sk = small_keys
    _, sigs = sign_many(sk, pk, 8, make_rng(1))
    report = full_attack(pk, sigs, tau=7, max_iters=3, max_weight=None)
    assert not report.success
    assert report.key is None and report.error
