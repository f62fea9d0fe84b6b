import math

import pytest

from besseltra.errors import DomainError
from besseltra.validation import (
    a2_form_duplication,
    a2_form_gamma,
    bessel_product_integral,
    kj_sign,
    lommel_ortho_check,
    ortho_check,
    ortho_closed_form,
    weber_schafheitlin,
    weber_schafheitlin_closed,
)

NUS = (0.5, 1.3, 2.7)


def test_ws_diagonal_example():
    res = weber_schafheitlin(1.3, 0, 0, 1.0)
    assert res.closed_form == pytest.approx(0.5 / 1.3, rel=1e-14)
    assert res.abs_error <= 1e-10
    assert res.passed


def test_ws_same_parity_vanishes():
    for nu in NUS:
        res = weber_schafheitlin(nu, 0, 2, 1.0)
        assert res.closed_form == 0.0
        assert abs(res.numeric) <= 1e-10


def test_ws_cross_parity_example():
    nu = 1.3
    res = weber_schafheitlin(nu, 0, 3, 1.0)
    assert res.closed_form == pytest.approx(-1 / (2 * math.pi * 2.8 * 1.5), rel=1e-13)
    assert res.abs_error <= 1e-10


def test_ws_band_vanishing():
    for nu in NUS:
        for n in range(5):
            for m in range(n + 2, 9, 2):
                res = weber_schafheitlin(nu, n, m, 1.0)
                assert res.closed_form == 0.0
                assert res.abs_error <= 1e-9


def test_ws_general_mu_against_closed_form():
    for nu, n, m, mu in ((0.7, 1, 2, 1.5), (1.3, 0, 3, 0.5), (2.1, 2, 2, 2.5)):
        res = weber_schafheitlin(nu, n, m, mu)
        assert res.abs_error <= 1e-9


def test_ws_segment_doubling_independence():
    for args in ((1.3, 0, 0, 1.0), (0.5, 1, 4, 1.0), (2.7, 3, 3, 1.5)):
        a = weber_schafheitlin(*args)
        b = weber_schafheitlin(*args, refine=2)
        assert b.segments_used >= 2 * a.segments_used - 1
        assert abs(a.numeric - b.numeric) <= 1e-9


def test_diagonal_forms_agree():
    for nu in NUS:
        for n in range(5):
            for mu in (0.5, 1.0, 1.7, 2.5):
                g = a2_form_gamma(nu, n, mu)
                assert a2_form_duplication(nu, n, mu) == pytest.approx(g, rel=1e-13)
                assert weber_schafheitlin_closed(nu, n, n, mu) == pytest.approx(g, rel=1e-13)


def test_ws_domain():
    with pytest.raises(DomainError):
        weber_schafheitlin(0.5, 0, 0, 0.0)
    with pytest.raises(DomainError):
        weber_schafheitlin(0.5, 0, 0, 2.5)
    with pytest.raises(DomainError):
        bessel_product_integral(1.0, 1.0, -1.0)


def test_ortho_examples():
    assert ortho_check("KK", 1.3, 0, 0).closed_form == pytest.approx(0.5 / 1.3)
    assert ortho_closed_form("KJ", 1.3, 0, 0, "unit") == 0.5
    assert ortho_closed_form("KJ", 1.3, 1, 0, "unit") == 0.5
    assert ortho_closed_form("KJ", 1.3, 2, 0, "unit") == -0.5
    assert ortho_closed_form("KJ", 1.3, 0, 1, "unit") == -0.5
    res = ortho_check("KJ", 1.3, 1, 0, weight="unit")
    assert res.numeric == pytest.approx(0.5, abs=1e-9)


def test_kj_sign_rule():
    assert [kj_sign(n, m) for n, m in ((0, 0), (0, 1), (1, 0), (2, 0), (1, 1), (3, 1))] == [1, -1, 1, -1, 1, -1]


def test_unit_weight_is_the_small_mu_limit():
    # at mu -> 0 the cross integral approaches the unit-weight value
    for n, m in ((0, 0), (1, 0), (0, 1), (2, 0)):
        limit = weber_schafheitlin_closed(1.3, 2 * n, 2 * m + 1, 1e-9)
        assert limit == pytest.approx(ortho_closed_form("KJ", 1.3, n, m, "unit"), abs=1e-6)


@pytest.mark.parametrize("nu", NUS)
@pytest.mark.parametrize("pair,weight", [("KK", "inverse"), ("JJ", "inverse"), ("KJ", "inverse"), ("KJ", "unit")])
def test_all_ortho_identities(nu, pair, weight):
    for n in range(5):
        for m in range(5):
            res = ortho_check(pair, nu, n, m, weight=weight)
            assert res.abs_error <= max(1e-8, res.tail_bound), (n, m, res)


def test_ortho_domain():
    with pytest.raises(DomainError):
        ortho_check("KK", 0.0, 0, 0)
    with pytest.raises(DomainError):
        ortho_check("KK", 1.0, -1, 0)
    with pytest.raises(DomainError):
        ortho_check("JJ", 1.0, 0, 0, weight="unit")


def test_lommel_odd_sum_is_exactly_zero():
    res = lommel_ortho_check(1.3, 0, 1)
    assert res.numeric == 0.0 and res.closed_form == 0.0


def test_lommel_examples():
    r = lommel_ortho_check(0.5, 0, 0, K=1000)
    assert r.closed_form == pytest.approx(1 / 3, rel=1e-15)
    assert r.abs_error <= r.tail_bound
    r = lommel_ortho_check(1.3, 0, 2, K=1000)
    assert r.closed_form == 0.0
    assert r.abs_error <= r.tail_bound


def test_lommel_error_shrinks_with_more_zeros():
    small = lommel_ortho_check(0.5, 1, 1, K=100)
    large = lommel_ortho_check(0.5, 1, 1, K=1000)
    assert large.abs_error < small.abs_error
    assert small.abs_error <= small.tail_bound


def test_lommel_domain():
    with pytest.raises(DomainError):
        lommel_ortho_check(0.5, 0, 0, K=5)
    with pytest.raises(DomainError):
        lommel_ortho_check(0.0, 0, 0)
