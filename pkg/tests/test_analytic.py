import math

import pytest

from cliquemem import analytic
from cliquemem.experiments import TABLE1_ROWS


def test_ring_code_parameters():
    assert analytic.dmin(3) == 12
    assert analytic.rate(1, 4) == 0.5
    assert analytic.rate(2, 8) == 1 / 4


@pytest.mark.parametrize("r", range(1, 21))
@pytest.mark.parametrize("c", [4, 6, 8, 10, 16, 64])
def test_merit_factor_is_two_exactly(r, c):
    assert analytic.merit(r, c) == 2.0


def test_merit_factor_odd_order():
    # odd c keeps the general ratio, 2(c+1)/c
    assert analytic.merit(2, 5) == pytest.approx(12 / 5)


def test_density_trivial_cases():
    assert analytic.density_seq(20, 256, 0, 100) == 0.0
    # single sequence, one passage, two fanals per cluster
    assert analytic.density_seq(8, 2, 1, 8) == pytest.approx(0.25)


def test_density_printed_values():
    d = analytic.density_seq(20, 4096 / 20, 3000, 100)
    assert d == pytest.approx(0.30067, abs=5e-5)
    approx = analytic.density_seq_approx(20, 4096 / 20, 3000, 100)
    assert approx == pytest.approx(0.35763, abs=5e-5)


def test_low_load_linearization_accuracy():
    # within 5% of the exact form whenever the density stays below 0.05
    for chi, l, S, L in [(20, 256, 500, 100), (50, 128, 300, 100), (8, 512, 900, 16)]:
        exact = analytic.density_seq(chi, l, S, L)
        assert exact < 0.05
        approx = analytic.density_seq_approx(chi, l, S, L)
        assert abs(approx - exact) / exact < 0.05


def test_structural_sber_trivial():
    assert analytic.structural_sber(0.0, 19, 256) == 0.0
    assert analytic.structural_sber(1.0, 19, 256) == 1.0


def test_structural_sber_twenty_percent_operating_point():
    # the 20% error floor at chi=20, l=256, r=19, L=100 sits near S=15000
    def struct(S):
        return analytic.structural_sber(analytic.density_seq(20, 256, S, 100), 19, 256)

    lo, hi = 1.0, 1e6
    for _ in range(80):
        mid = (lo + hi) / 2
        if struct(mid) < 0.20:
            lo = mid
        else:
            hi = mid
    assert abs((lo + hi) / 2 - 15000) / 15000 < 0.03


def test_sqer_seq_guards_and_monotonicity():
    assert analytic.sqer_seq(20, 256, 19, 100, 0) == 0.0
    with pytest.raises(ValueError):
        analytic.sqer_seq(20, 256, 0, 100, 100)
    for chi, l, r, L, _s, _e in TABLE1_ROWS:
        values = [analytic.sqer_seq(chi, l, r, L, s)
                  for s in (0.5e0 * 10, 1e2, 1e3, 1e4)]
        assert values == sorted(values)
    # decreasing in r at fixed everything else
    a = analytic.sqer_seq(50, 128, 10, 100, 2000)
    b = analytic.sqer_seq(50, 128, 20, 100, 2000)
    assert b <= a
    # increasing in L
    assert analytic.sqer_seq(50, 128, 10, 200, 2000) >= a


@pytest.mark.parametrize("chi,l,r,L,s_listed,eta_listed", TABLE1_ROWS)
def test_capacity_table_reproduction(chi, l, r, L, s_listed, eta_listed):
    s = analytic.solve_sequence_capacity(chi, l, r, L, target=0.01)
    if s_listed < 1e6:
        assert abs(s - s_listed) / s_listed < 0.02
    else:
        # the huge-network row is printed with two significant figures
        assert f"{s:.1e}" == f"{s_listed:.1e}"
    eta = analytic.efficiency_seq(chi, l, r, L, s)
    assert abs(eta - eta_listed) < 0.01


def test_chi_opt():
    opt = analytic.chi_opt(4096, 3000, 100)
    assert opt == pytest.approx(4096 ** 2 / (math.e * 3000 * 100))
    assert abs(round(opt) - 20) <= 1


def test_efficiency_full_anticipation_point():
    eta = analytic.efficiency_seq(20, 4096 / 20, 19, 100, 3000)
    assert abs(eta - 0.141) < 0.01


def test_capacity_and_memory():
    assert analytic.capacity_seq(3000, 100, 256) == pytest.approx(3000 * 100 * 8)
    assert analytic.memory_bits_seq(19, 20, 256) == 19 * 20 * 256 ** 2


def test_density_restricted():
    assert analytic.density_restricted(6400, 2, 20, 0, 100) == 0.0
    d = analytic.density_restricted(6400, 2, 20, 600, 100)
    assert d == pytest.approx(-math.expm1(600 * 100 * math.log1p(-800 / 6400 ** 2)))


def test_sqer_restricted_variants():
    assert analytic.sqer_restricted(100, 64, 3, 8, 0, 100) == 0.0
    base = analytic.sqer_restricted(100, 64, 3, 8, 1300, 100)
    strict = analytic.sqer_restricted(100, 64, 3, 8, 1300, 100, future_competition=True)
    assert 0 < base < 1
    assert strict >= base
    with pytest.raises(ValueError):
        analytic.sqer_restricted(100, 64, 0, 8, 1300, 100)


def test_pattern_bits_printed_value():
    bits = analytic.pattern_bits(100, 64, 20)
    assert abs(bits - 188.9) / 188.9 < 0.01
