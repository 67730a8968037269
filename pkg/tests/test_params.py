from fractions import Fraction
from math import comb

import pytest

from combcache import ParamError, SchemeKind, build_topology, grid, make_params
from combcache.params import (params_baseline, params_secure_both, params_secure_caching,
                              params_secure_delivery)

T52 = build_topology(5, 2)
T42 = build_topology(4, 2)
T53 = build_topology(5, 3)


def test_worked_example_sizes():
    p = params_baseline(T52, 10, 0, 0, 3)
    assert p.M == Fraction(15, 2)
    assert p.item == Fraction(1, 8)
    assert p.share_n == comb(4, 3)


def test_small_baseline_sizes():
    p = params_baseline(T42, 6, 0, 0, 1)
    assert p.M == 2
    assert p.item == Fraction(1, 6)       # (1/r) / C(3,1)


def test_baseline_memory_with_relay_cache():
    # M = (t1 - t2) N r / Khat + t2 D / Khat, independently evaluated
    p = params_baseline(T42, 6, 3, 1, 2)
    assert p.M == Fraction((1 - 2) * 3 * 2, 3) + Fraction(2 * 6, 3)
    assert p.part1 == Fraction(3, 6)


def test_baseline_t1_limit():
    with pytest.raises(ParamError, match="grid violation"):
        params_baseline(T42, 6, 1, 1, 0)      # floor(3 * 1 / 6) = 0
    with pytest.raises(ParamError, match="exceeds"):
        params_baseline(T42, 6, 4, 0, 0)      # N > D/r


def test_secure_delivery_memory_no_relay_cache():
    for t in range(T53.Khat + 1):
        p = params_secure_delivery(T53, 50, 0, 0, t)
        assert p.M == 1 + Fraction(t * 49, 6)


def test_secure_delivery_unicast_key_length():
    D, N, t1, Kh = 6, Fraction(3), 1, 3
    p = params_secure_delivery(T42, D, N, t1, 1)
    assert p.unicast_key == N * (Kh - t1) / ((D + Kh - t1) * Kh)
    assert p.part1 == N / (D + Kh - t1)


def test_secure_caching_memory_and_sharing():
    p = params_secure_caching(T52, 10, 0, 3)
    assert (p.share_m, p.share_n) == (comb(3, 2), comb(4, 3)) == (3, 4)
    assert p.item == p.part2              # share size equals the secret
    assert p.M == Fraction(3 * 10, 1)


def test_secure_caching_t_zero_is_plain():
    p = params_secure_caching(T42, 6, 0, 0)
    assert (p.share_m, p.share_n, p.M) == (0, 1, 0)


def test_secure_both_memory():
    N = Fraction(1)
    p = params_secure_both(T42, 6, N, 1)
    assert p.M == 1 + Fraction(6, 2) * (1 - 2 * N / 9)


@pytest.mark.parametrize("kind", list(SchemeKind))
def test_grid_entries_are_valid(kind):
    for t1, t2 in grid(kind, T42, 6, 0):
        p = make_params(kind, T42, 6, 0, t1, t2)
        assert p.F_min > 0
        sz = p.sizes()
        assert sz.symbol * p.width * p.r == p.F_min


def test_shared_grid_stops_below_khat():
    assert grid(SchemeKind.SECURE_CACHING, T42, 6) == [(0, 0), (0, 1), (0, 2)]
    with pytest.raises(ParamError, match="grid violation"):
        make_params("secure_caching", T42, 6, 0, 0, 3)
    with pytest.raises(ParamError, match="no t1"):
        make_params("secure_both", T42, 6, 0, 1, 1)


def test_sizes_rejects_non_multiple():
    p = params_baseline(T42, 6, 0, 0, 1)
    with pytest.raises(ParamError):
        p.sizes(p.F_min + 1)


def test_too_few_files():
    with pytest.raises(ParamError):
        params_baseline(T52, 0, 0, 0, 0)
