import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import ball_table_literal, brute_sigma_p
from symcap.capacities import (
    DomainSpec,
    Kind,
    ObstructionVerdict,
    Status,
    ball_table,
    capacity_ball,
    capacity_ellipsoid,
    capacity_polydisc,
    capacity_sequence,
    embedding_obstruction,
    related_capacities,
)
from symcap.domain import PSymmetry, Radii, validate_radii
from symcap.errors import DimensionMismatch, InputError, KappaOutOfRange, MixedSymmetry, UnsupportedKind

squares_st = st.fractions(min_value=Fraction(1, 10), max_value=10, max_denominator=12)


@st.composite
def instances(draw, max_n=5, min_kappa=0):
    n = draw(st.integers(max(1, min_kappa + 1), max_n))
    kappa = draw(st.integers(min_kappa, n - 1))
    sq = draw(st.lists(squares_st, min_size=n, max_size=n))
    return Radii.from_squares(sq), PSymmetry(n, kappa)


def test_round_ball_in_c2():
    # E(1, 1) with kappa = 1: odd multiples on axis 1, even on axis 2
    seq = capacity_sequence(DomainSpec.ellipsoid([1, 1], 1, exact=True), 4)
    assert [v.pi_multiple for v in seq] == [1, 2, 3, 4]


def test_ball_table_small_cases():
    assert [ball_table(3, 1, j) for j in range(1, 10)] == [1, 1, 2, 3, 3, 4, 5, 5, 6]
    assert [ball_table(2, 0, j) for j in range(1, 7)] == [1, 1, 3, 3, 5, 5]


@given(st.integers(1, 7).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n - 1), st.integers(1, 60))))
def test_ball_table_matches_literal_reading_and_sigma_p(args):
    n, kappa, j = args
    m = ball_table(n, kappa, j)
    assert m == ball_table_literal(n, kappa, j)
    assert brute_sigma_p([Fraction(1)] * n, kappa, j)[-1] == m


def test_ball_scaling():
    v = capacity_ball(2, PSymmetry(2, 1), Fraction(3, 2), 2)
    assert v.pi_multiple == Fraction(9, 2)
    assert v.numeric == pytest.approx(4.5 * math.pi)
    assert v.multiplicity == 1


def test_ball_rejects_kappa_n_and_bad_index():
    with pytest.raises(KappaOutOfRange):
        ball_table(2, 2, 1)
    with pytest.raises(InputError):
        ball_table(2, 1, 0)
    with pytest.raises(DimensionMismatch):
        capacity_ball(3, PSymmetry(2, 1), 1, 1)


@given(instances())
def test_capacities_are_nondecreasing(inst):
    r, sym = inst
    seq = capacity_sequence(DomainSpec(Kind.ELLIPSOID, sym, r), 20)
    assert all(a.pi_multiple <= b.pi_multiple for a, b in zip(seq, seq[1:]))


@given(instances())
def test_first_capacity_formulas(inst):
    r, sym = inst
    n, k = sym.n, sym.kappa
    first = [r.square(j) for j in range(1, n - k + 1)]
    second = [2 * r.square(j) for j in range(n - k + 1, n + 1)]
    expect = min(first + second)
    assert capacity_ellipsoid(r, sym, 1).pi_multiple == expect
    assert capacity_polydisc(r, sym, 1).pi_multiple == expect


@given(instances(), st.fractions(min_value=Fraction(1, 3), max_value=3, max_denominator=6))
def test_monotone_under_inclusion(inst, grow):
    # scaling radii up by lam >= 1 contains the original ellipsoid
    r, sym = inst
    lam = 1 + grow
    a = capacity_sequence(DomainSpec(Kind.ELLIPSOID, sym, r), 10)
    b = capacity_sequence(DomainSpec(Kind.ELLIPSOID, sym, r.scaled(lam)), 10)
    assert all(x.pi_multiple <= y.pi_multiple for x, y in zip(a, b))


@given(instances())
def test_polydisc_below_ellipsoid_after_first(inst):
    # E(r) sits inside D(r), so capacities can only grow
    r, sym = inst
    e = capacity_sequence(DomainSpec(Kind.ELLIPSOID, sym, r), 12)
    d = capacity_sequence(DomainSpec(Kind.POLYDISC, sym, r), 12)
    assert all(x.pi_multiple <= y.pi_multiple for x, y in zip(e, d))


@given(instances())
def test_relations_kappa_zero(inst):
    r, sym = inst
    sym0 = PSymmetry(sym.n, 0)
    rel = related_capacities(DomainSpec(Kind.ELLIPSOID, sym0, r))
    assert rel.c_P_1.pi_multiple == rel.c_EH_1.pi_multiple
    assert rel.c_EHZ_P is None


@given(instances(min_kappa=1))
def test_relations_kappa_positive(inst):
    r, sym = inst
    rel = related_capacities(DomainSpec(Kind.ELLIPSOID, sym, r))
    assert rel.c_EHZ_P == rel.c_P_1.numeric / 2
    assert rel.sources["c_EHZ_P"] == "derived-by-relation"
    assert rel.c_EH_1.pi_multiple <= rel.c_P_1.pi_multiple <= 2 * rel.c_EH_1.pi_multiple


def test_relation_counterexample_family():
    # min first-group square 3 > 2 * min second-group square 1
    r = Radii.from_squares([Fraction(3), Fraction(1)])
    rel = related_capacities(DomainSpec(Kind.ELLIPSOID, PSymmetry(2, 1), r))
    assert rel.c_P_1.pi_multiple == 2 * rel.c_EH_1.pi_multiple == 2


def test_polydisc_kappa_zero_relation_is_derived():
    rel = related_capacities(DomainSpec.polydisc([2.0, 1.0], 0))
    assert rel.sources["c_EH_1"] == "derived-by-relation"
    assert rel.c_EH_1 is rel.c_P_1


def test_bidisk_has_no_closed_form():
    with pytest.raises(UnsupportedKind):
        related_capacities(DomainSpec.bidisk())
    with pytest.raises(UnsupportedKind):
        capacity_sequence(DomainSpec.bidisk(), 2)


def test_obstruction_witness():
    a = DomainSpec.ellipsoid([1, 2], 1, exact=True)
    b = DomainSpec.ellipsoid([2, 1], 1, exact=True)
    v = embedding_obstruction(a, b, 8)
    assert v.status is Status.OBSTRUCTED and v.witness == 3
    assert v.values[0].pi_multiple == 5 and v.values[1].pi_multiple == 4


def test_obstruction_inconclusive_is_not_embeddable():
    a = DomainSpec.ellipsoid([1, 1], 1, exact=True)
    v = embedding_obstruction(a, DomainSpec.ellipsoid([2, 2], 1, exact=True), 16)
    assert v.status is Status.INCONCLUSIVE and v.witness is None and v.checked_up_to == 16


def test_obstruction_mixed_symmetry():
    with pytest.raises(MixedSymmetry):
        embedding_obstruction(DomainSpec.ellipsoid([1, 1], 1), DomainSpec.ellipsoid([1, 1], 0))


def test_obstructed_verdict_requires_witness():
    with pytest.raises(ValueError):
        ObstructionVerdict(Status.OBSTRUCTED, checked_up_to=4)


@given(instances(), st.integers(1, 20))
def test_obstruction_never_fires_on_inclusion(inst, depth):
    r, sym = inst
    a = DomainSpec(Kind.ELLIPSOID, sym, r)
    b = DomainSpec(Kind.ELLIPSOID, sym, r.scaled(Fraction(3, 2)))
    assert embedding_obstruction(a, b, depth).status is Status.INCONCLUSIVE


def test_domain_spec_validation():
    with pytest.raises(DimensionMismatch):
        DomainSpec(Kind.ELLIPSOID, PSymmetry(3, 0), validate_radii([1, 2]))
    with pytest.raises(InputError):
        DomainSpec(Kind.ELLIPSOID, PSymmetry(2, 0), None)
    with pytest.raises(DimensionMismatch):
        DomainSpec(Kind.LAGRANGIAN_BIDISK, PSymmetry(3, 1))
    assert DomainSpec.ball(3, 1, 2.0).full_radii().values == (2.0, 2.0, 2.0)
