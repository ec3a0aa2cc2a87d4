import pytest

from gradcoding import CodeParams, ParameterError, derive_params


def test_eleven_workers_three_stragglers():
    p = derive_params(11, 3)
    assert (p.ell, p.r, p.t, p.q) == (2, 3, 1, 1)
    assert (p.lambda_, p.rtilde) == (3, 2)
    assert p.f == 8


def test_no_stragglers_single_class():
    p = derive_params(4, 0)
    assert (p.ell, p.r, p.t, p.q, p.lambda_, p.rtilde) == (4, 0, 0, 0, 0, 4)


def test_lambda_equals_s_when_ell_is_s_minus_r():
    # 9 = 2*4 + 1 gives ell = 2 = s - r, which forces lambda = s, rtilde = 0
    p = derive_params(9, 3)
    assert (p.ell, p.r, p.t, p.q) == (2, 1, 0, 1)
    assert p.ell == p.s - p.r
    assert (p.lambda_, p.rtilde) == (3, 0)


@pytest.mark.parametrize("n,s", [(0, 0), (5, 5), (5, 7), (3, -1), (-2, 0)])
def test_domain_errors(n, s):
    with pytest.raises(ParameterError):
        derive_params(n, s)


def test_identities_exhaustive():
    for n in range(1, 201):
        for s in range(n):
            p = derive_params(n, s)
            assert p.n == p.ell * (s + 1) + p.r and 0 <= p.r < s + 1
            assert p.r == p.t * p.ell + p.q and 0 <= p.q < p.ell
            assert p.n == p.lambda_ * (p.ell + 1) + p.rtilde and 0 <= p.rtilde < p.ell + 1
            assert p.n == p.ell * (s + p.t + 1) + p.q
            assert p.f == n - s
            if p.ell == s - p.r:
                assert p.lambda_ == s and p.rtilde == 0


def test_pure_function():
    assert derive_params(37, 11) == derive_params(37, 11)


def test_rejects_inconsistent_construction():
    good = derive_params(11, 3)
    with pytest.raises(ParameterError):
        CodeParams(n=11, k=11, s=3, ell=good.ell, r=good.r + 1, t=good.t,
                   q=good.q, lambda_=good.lambda_, rtilde=good.rtilde, f=good.f)
    with pytest.raises(ParameterError):
        CodeParams(n=11, k=10, s=3, ell=good.ell, r=good.r, t=good.t,
                   q=good.q, lambda_=good.lambda_, rtilde=good.rtilde, f=good.f)


def test_class_helpers():
    p = derive_params(11, 3)
    assert p.class_members(0) == (0, 4, 8)
    assert p.class_members(3) == (3, 7)
    assert p.class_size(0) == p.ell + 1
    assert p.class_size(3) == p.ell
    assert p.class_of(7) == 3
    with pytest.raises(ParameterError):
        p.class_members(4)
