from fractions import Fraction

import pytest

from gradcoding import (
    EncodingMatrix,
    balance_property,
    build_encoding,
    check_lemma,
    derive_params,
    distance_ds,
    load_report,
    load_vector,
    min_class_structured_ds,
    uniform_target,
    verify_scheme,
)
from gradcoding.metrics import structural_failures


def _build(n, s):
    return build_encoding(derive_params(n, s))


def test_load_vectors():
    assert load_vector(_build(11, 3)) == (4, 4, 4, 6, 4, 4, 4, 5, 3, 3, 3)
    assert load_vector(_build(4, 1)) == (2, 2, 2, 2)
    assert load_vector(_build(4, 3)) == (4, 4, 4, 4)


def test_distance_values():
    assert distance_ds(_build(11, 3)) == Fraction(6)
    assert distance_ds(_build(8, 3)) == Fraction(0)
    # (7,5): loads (4,7,7,7,7,7,3) against target 6
    assert load_vector(_build(7, 5)) == (4, 7, 7, 7, 7, 7, 3)
    assert distance_ds(_build(7, 5)) == Fraction(10)


def test_distance_zero_iff_divisible():
    for n in range(2, 61):
        for s in range(n):
            ds = distance_ds(_build(n, s))
            if n % (s + 1) == 0:
                assert ds == 0
            assert ds >= 0


def test_load_report_totals():
    report = load_report(_build(11, 3))
    assert report.total == 11 * 4
    assert report.ds_value == 6
    assert (report.spread_c1, report.spread_c2) == (1, 1)


def test_balance_property():
    assert balance_property(_build(11, 3))
    assert balance_property(_build(8, 3))
    # adversarial: move a partition between two same-class workers -> spread 2
    p = derive_params(8, 3)
    rows = [list(row) for row in build_encoding(p).rows]
    rows[4].append(rows[0].pop())  # workers 0 and 4 share class 0
    assert not balance_property(EncodingMatrix.from_rows(p, rows))


def test_verify_exhaustive_passes():
    report = verify_scheme(_build(11, 3))
    assert report.mode == "exhaustive"
    assert report.checked == 165
    assert report.passed and report.failures == 0

    report = verify_scheme(_build(14, 7))
    assert report.checked == 3432
    assert report.passed


def test_verify_threads_match_serial():
    serial = verify_scheme(_build(12, 5))
    threaded = verify_scheme(_build(12, 5), threads=4)
    assert serial.as_dict() == threaded.as_dict()


def test_verify_detects_deleted_entry():
    p = derive_params(11, 3)
    rows = [list(row) for row in build_encoding(p).rows]
    rows[0].pop()
    broken = EncodingMatrix.from_rows(p, rows)
    assert any("column" in msg or "support" in msg for msg in structural_failures(broken))
    report = verify_scheme(broken)
    assert not report.passed


def test_verify_sampled_is_seeded():
    B = _build(20, 7)
    one = verify_scheme(B, samples=200, seed=9)
    two = verify_scheme(B, samples=200, seed=9)
    assert one.as_dict() == two.as_dict()
    assert one.mode == "sampled" and one.checked == 200 and one.passed


@pytest.mark.parametrize("s,a,expected_t", [(5, 3, 1), (5, 4, 1), (5, 10, 1), (5, 7, 0), (5, 0, 0)])
def test_lemma_spot_values(s, a, expected_t):
    assert derive_params(s * s + a, s).t == expected_t


def test_lemma_sweep_clean():
    assert check_lemma(range(3, 41)) == []


def test_lemma_explicit_a_range():
    # a = 2s is a t=1 value, so restricting the scan elsewhere stays clean
    assert check_lemma([6], a_values=range(0, 3)) == []
    assert derive_params(36 + 12, 6).t == 1


def test_constructed_ds_is_minimal_among_class_structured():
    for n in range(2, 9):
        for s in range(n):
            p = derive_params(n, s)
            assert distance_ds(build_encoding(p)) == min_class_structured_ds(p)


def test_uniform_target_value():
    assert uniform_target(derive_params(11, 3)) == Fraction(4)
    assert uniform_target(derive_params(7, 5)) == Fraction(6)
