import itertools
import random

import numpy as np
import pytest

from gradcoding import (
    InfeasibleScenarioError,
    MissingWorkerError,
    ParameterError,
    ScanStats,
    StragglerScenario,
    build_encoding,
    class_vector,
    derive_params,
    recover_gradient,
    scan_order,
    select_decoder,
    select_decoder_fast,
    worker_compute,
)


def test_class_vector_supports():
    p = derive_params(11, 3)
    assert class_vector(p, 0).support == (0, 4, 8)
    assert class_vector(p, 3).support == (3, 7)
    assert len(class_vector(p, 0).support) == p.ell + 1
    assert len(class_vector(p, 3).support) == p.ell
    single = derive_params(4, 0)
    assert class_vector(single, 0).support == (0, 1, 2, 3)
    with pytest.raises(ParameterError):
        class_vector(p, 4)


@pytest.mark.parametrize("n,s", [(11, 3), (11, 4), (14, 5), (9, 2)])
def test_cyclic_shift_between_consecutive_classes(n, s):
    # within each class set the next class's indicator is the previous one
    # rotated by a single position
    p = derive_params(n, s)
    for lo, hi in ((0, p.r - 1), (p.r, p.s)):
        for i in range(lo, hi):
            a = class_vector(p, i).to_indicator(n)
            b = class_vector(p, i + 1).to_indicator(n)
            assert b == (a[-1],) + a[:-1]


def test_scan_order_prefers_small_classes():
    assert scan_order(derive_params(11, 3)) == [3, 0, 1, 2]
    assert scan_order(derive_params(8, 3)) == [0, 1, 2, 3]


def test_select_wraps_past_incomplete_classes():
    p = derive_params(11, 3)
    vec = select_decoder(p, StragglerScenario.from_stragglers(11, (3, 7, 10)))
    assert vec.class_index == 0 and vec.support == (0, 4, 8)


def test_select_takes_first_complete_small_class():
    p = derive_params(11, 3)
    vec = select_decoder(p, StragglerScenario.from_stragglers(11, (0, 1, 2)))
    assert vec.class_index == 3 and vec.support == (3, 7)


def test_all_received_picks_first_in_scan_order():
    p = derive_params(11, 3)
    everyone = StragglerScenario.from_received(11, range(11))
    assert select_decoder(p, everyone).class_index == p.r


def test_fast_agrees_on_example():
    p = derive_params(11, 3)
    scenario = StragglerScenario.from_stragglers(11, (3, 7, 10))
    assert select_decoder_fast(p, scenario) == select_decoder(p, scenario)


def test_fast_defaults_to_last_without_checking():
    # stragglers kill every class except the last in scan order (class 2)
    p = derive_params(11, 3)
    scenario = StragglerScenario.from_stragglers(11, (3, 0, 1))
    stats = ScanStats()
    vec = select_decoder_fast(p, scenario, stats)
    assert vec.class_index == 2
    # classes 3, 0, 1 were scanned; class 2's members were never probed
    assert stats.membership_checks <= (p.ell + 1) * p.s


def test_fast_randomized_equivalence():
    rng = random.Random(12345)
    for _ in range(1000):
        n = rng.randrange(2, 15)
        s = rng.randrange(n)
        p = derive_params(n, s)
        stragglers = rng.sample(range(n), s)
        scenario = StragglerScenario.from_stragglers(n, stragglers)
        fast = select_decoder_fast(p, scenario)
        assert fast == select_decoder(p, scenario)
        assert all(scenario.received[w] for w in fast.support)


def test_exhaustive_robustness_small_n():
    for n in range(2, 12):
        for s in range(n):
            p = derive_params(n, s)
            B = build_encoding(p)
            for stragglers in itertools.combinations(range(n), s):
                vec = select_decoder(p, StragglerScenario.from_stragglers(n, stragglers))
                counts = [0] * p.k
                for w in vec.support:
                    for j in B.rows[w]:
                        counts[j] += 1
                assert counts == [1] * p.k


def test_nu_identity():
    for n in range(2, 201):
        for s in range(n):
            p = derive_params(n, s)
            assert p.ell * p.r + (p.ell - 1) * (s + 1 - p.r) + 1 == n - s


def test_membership_check_bounds():
    for n in range(2, 13):
        for s in range(n):
            p = derive_params(n, s)
            for stragglers in itertools.combinations(range(n), s):
                scenario = StragglerScenario.from_stragglers(n, stragglers)
                slow, fast = ScanStats(), ScanStats()
                select_decoder(p, scenario, slow)
                select_decoder_fast(p, scenario, fast)
                assert slow.membership_checks <= (p.ell + 1) * (s + 1)
                assert fast.membership_checks <= (p.ell + 1) * s


def test_infeasible_scenario_raises():
    p = derive_params(4, 1)
    nobody = StragglerScenario.from_received(4, ())
    with pytest.raises(InfeasibleScenarioError):
        select_decoder(p, nobody)
    with pytest.raises(InfeasibleScenarioError):
        select_decoder_fast(p, nobody)


def test_accepts_more_than_f_received():
    p = derive_params(11, 3)
    scenario = StragglerScenario.from_stragglers(11, (5,))  # only one straggler
    assert select_decoder(p, scenario).class_index == 3


def test_recover_integer_rows_exact():
    # rows g_j = j * ones(p): every scenario must recover sum(j) = 55 exactly
    p = derive_params(11, 3)
    B = build_encoding(p)
    grads = np.arange(11, dtype=np.float64)[:, None] * np.ones((11, 5))
    for stragglers in itertools.combinations(range(11), 3):
        scenario = StragglerScenario.from_stragglers(11, stragglers)
        encoded = {w: worker_compute(B, w, grads) for w in sorted(scenario.index_set)}
        out = recover_gradient(select_decoder(p, scenario), encoded)
        assert np.array_equal(out, 55.0 * np.ones(5))


def test_recover_zero_rows():
    p = derive_params(11, 3)
    B = build_encoding(p)
    grads = np.zeros((11, 3))
    scenario = StragglerScenario.from_stragglers(11, (1, 2, 3))
    encoded = {w: worker_compute(B, w, grads) for w in sorted(scenario.index_set)}
    assert np.array_equal(recover_gradient(select_decoder(p, scenario), encoded), np.zeros(3))


def test_recover_float_reassociation_bound():
    rng = np.random.default_rng(0)
    p = derive_params(11, 3)
    B = build_encoding(p)
    eps = 2.0 ** -53
    for _ in range(300):
        grads = rng.uniform(-1.0, 1.0, size=(11, 1))
        direct = grads[0].copy()
        prefix_max = abs(float(direct[0]))
        for j in range(1, 11):
            direct += grads[j]
            prefix_max = max(prefix_max, abs(float(direct[0])))
        stragglers = tuple(sorted(rng.choice(11, size=3, replace=False).tolist()))
        scenario = StragglerScenario.from_stragglers(11, stragglers)
        encoded = {w: worker_compute(B, w, grads) for w in sorted(scenario.index_set)}
        out = recover_gradient(select_decoder(p, scenario), encoded)
        assert abs(float(out[0] - direct[0])) <= 4 * 11 * eps * prefix_max


def test_recover_missing_worker():
    p = derive_params(11, 3)
    vec = class_vector(p, 0)
    with pytest.raises(MissingWorkerError):
        recover_gradient(vec, {0: np.ones(2), 4: np.ones(2)})  # worker 8 absent


def test_scenario_validation():
    with pytest.raises(ParameterError):
        StragglerScenario.from_stragglers(4, (9,))
    with pytest.raises(ParameterError):
        StragglerScenario(received=(0, 2, 1))
    scenario = StragglerScenario.from_stragglers(5, (1, 3))
    assert scenario.stragglers == (1, 3)
    assert scenario.index_set == frozenset({0, 2, 4})
    with pytest.raises(ParameterError):
        select_decoder(derive_params(4, 1), scenario)  # n mismatch
