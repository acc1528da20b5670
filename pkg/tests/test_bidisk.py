import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import brute_bidisk
from symcap.bidisk import (
    CP1_UPPER,
    CP2_UPPER,
    GUARD,
    BidiskSpectrumQuery,
    bidisk_interval_intersection,
    bidisk_spectrum_values,
    verify_lag_report,
)
from symcap.errors import InputError


def expanded(values):
    out = []
    for v in values:
        out += [v.numeric] * v.multiplicity
    return out


def test_listing_matches_definition():
    got = expanded(bidisk_spectrum_values(60, 25.0))
    want = brute_bidisk(60, 25.0)
    assert len(got) == len(want)
    assert max(abs(a - b) for a, b in zip(got, want)) < 1e-12


def test_anchor_values_present():
    vals = [v.numeric for v in bidisk_spectrum_values(16, 10.0)]
    for x in (4.0, 3 * math.sqrt(3), 8.0, 2 * math.pi):
        assert any(abs(v - x) < 1e-12 for v in vals)


def test_first_values_frozen():
    # 4 (n=2), 3*sqrt(3) (n=3), 4*sqrt(2) (n=4), 10*cos(3pi/10) (n=5), 6 (n=6)
    head = [v.numeric for v in bidisk_spectrum_values(8, 6.05)]
    assert head == pytest.approx([4.0, 3 * math.sqrt(3), 4 * math.sqrt(2), 10 * math.cos(0.3 * math.pi), 6.0],
                                 rel=1e-14)


def test_coincident_values_merge_provenance():
    twelve = [v for v in bidisk_spectrum_values(12, 12.5) if abs(v.numeric - 12) < 1e-9]
    assert len(twelve) == 1 and twelve[0].multiplicity == 2
    assert sorted(t.expression() for t in twelve[0].provenance) == ["12", "24*cos(1*pi/3)"]


def test_cp2_interval_is_exactly_two_values():
    res = bidisk_interval_intersection(BidiskSpectrumQuery(2 * math.pi, CP2_UPPER))
    assert res.certified and not res.accumulation_warning
    assert res.numbers() == [2 * math.pi, 8.0]
    assert res.values[0].expression() == "2*pi"


def test_cp1_interval_is_finite_and_certified():
    res = bidisk_interval_intersection(BidiskSpectrumQuery(4.0, CP1_UPPER))
    nums = res.numbers()
    assert res.certified
    assert 4.0 in nums and 8.0 not in nums and 2 * math.pi not in nums
    assert len(nums) == 5


def test_accumulation_below_two_pi():
    res = bidisk_interval_intersection(BidiskSpectrumQuery(6.0, 7.0))
    assert res.accumulation_warning and not res.certified
    assert res.accumulation_points == [2 * math.pi]
    assert all(6.0 <= v < 7.0 for v in res.numbers())


def test_guard_band_reports_ambiguity():
    res = bidisk_interval_intersection(BidiskSpectrumQuery(7.0, 8.0 + GUARD / 2))
    assert 8.0 in [v.numeric for v in res.boundary_ambiguous]
    assert 8.0 not in res.numbers()


def test_half_open_endpoints():
    res = bidisk_interval_intersection(BidiskSpectrumQuery(4.0, 3 * math.sqrt(3)))
    assert res.numbers() == [4.0]


def test_truncation_uncertifies():
    res = bidisk_interval_intersection(BidiskSpectrumQuery(7.0, 100.0, n_max=20))
    assert not res.certified


@given(st.floats(0.5, 30.0), st.floats(0.01, 6.0))
def test_intersection_agrees_with_listing(lo, width):
    hi = lo + width
    res = bidisk_interval_intersection(BidiskSpectrumQuery(lo, hi, n_max=400))
    got = res.numbers()
    want = [v for v in brute_bidisk(400, hi + 1) if lo + 1e-8 < v < hi - 1e-8]
    assert all(lo <= v < hi for v in got)
    for w in want:
        assert any(abs(w - g) < 1e-10 for g in got)


@given(st.floats(0.5, 30.0), st.floats(0.01, 6.0))
def test_certified_means_no_accumulation_inside(lo, width):
    hi = lo + width
    res = bidisk_interval_intersection(BidiskSpectrumQuery(lo, hi))
    inside = [2 * c * math.pi for c in range(1, 10) if lo < 2 * c * math.pi <= hi]
    if inside:
        assert res.accumulation_warning and not res.certified


def test_query_validation():
    for lo, hi in [(0.0, 1.0), (2.0, 1.0), (1.0, math.inf)]:
        with pytest.raises(InputError):
            BidiskSpectrumQuery(lo, hi)
    with pytest.raises(InputError):
        bidisk_spectrum_values(0)


def test_lag_report():
    rep = verify_lag_report()
    assert rep.ok()
    assert rep.lower_bound_cP2 == pytest.approx(2 * math.pi)
    assert CP1_UPPER == pytest.approx(6.0397099599860, rel=1e-12)
    assert CP2_UPPER == pytest.approx(8.6464333235924, rel=1e-12)
