import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from azdual.segments import (
    GOOD,
    GRID_HALF,
    GRID_INT,
    UGLY,
    DomainError,
    Line,
    Segment,
    half,
)
from azdual.langdata import Multisegment, SignedSymMultisegment
from azdual.mw_gl import (
    containment_count,
    kz_capacity,
    kz_capacity_labeled,
    mw_step,
    mw_transpose,
    transpose_pairs,
)

RHO = Line("rho", GOOD, GRID_INT)
SIG = Line("sig", GOOD, GRID_INT)
RHH = Line("rhh", GOOD, GRID_HALF)


def seg(b, e, ln=RHO):
    return Segment(ln, half(b), half(e))


def mseg(*pairs, ln=RHO):
    return Multisegment([seg(b, e, ln) for b, e in pairs])


pair_st = st.tuples(st.integers(-3, 3), st.integers(0, 3)).map(
    lambda t: (t[0], t[0] + t[1])
)
mseg_st = st.lists(pair_st, max_size=6).map(lambda ps: mseg(*ps))


class TestStep:
    def test_single_long_segment(self):
        top, rest = mw_step(mseg((-2, 1)))
        assert top == seg(1, 1)
        assert rest == mseg((-2, 0))

    def test_cuspidal_fixed_point(self):
        top, rest = mw_step(mseg((0, 0)))
        assert top == seg(0, 0)
        assert not rest

    def test_chain_of_three(self):
        top, rest = mw_step(mseg((-3, -1), (-2, -1), (-2, 0)))
        assert top == seg(-1, 0)
        assert rest == mseg((-3, -2), (-2, -1), (-2, -1))

    def test_rejects_zero(self):
        with pytest.raises(DomainError):
            mw_step(Multisegment([]))

    def test_rejects_mixed_lines(self):
        with pytest.raises(DomainError):
            mw_step(Multisegment([seg(0, 0), seg(0, 0, SIG)]))


class TestTranspose:
    def test_three_segment_example(self):
        got = mw_transpose(mseg((-3, -1), (-2, -1), (-2, 0)))
        assert got == mseg((-3, -2), (-2, -1), (-2, -2), (-1, 0), (-1, -1))

    def test_splits_into_singletons(self):
        got = mw_transpose(mseg((-2, 1)))
        assert got == mseg((-2, -2), (-1, -1), (0, 0), (1, 1))

    def test_cuspidal_pile_fixed(self):
        m = mseg((0, 0), (0, 0), (0, 0))
        assert mw_transpose(m) == m

    def test_zero_to_zero(self):
        z = Multisegment([])
        assert mw_transpose(z) == z

    def test_lines_processed_independently(self):
        m = Multisegment([seg(-1, 0), seg(0, 1, SIG), seg(-1, 0, SIG)])
        got = mw_transpose(m)
        assert got.restrict(RHO) == mw_transpose(mseg((-1, 0)))
        assert got.restrict(SIG) == mw_transpose(mseg((-1, 0), (0, 1), ln=SIG))

    def test_half_grid(self):
        m = Multisegment([seg("-3/2", "1/2", RHH), seg("-1/2", "-1/2", RHH)])
        got = mw_transpose(m)
        assert got.degree == m.degree
        assert mw_transpose(got) == m

    def test_ugly_sides_kept(self):
        lu = Line("u", UGLY, GRID_INT)
        m = Multisegment(
            [Segment(lu, half(-1), half(0), side=1), Segment(lu, half(0), half(1), side=1)]
        )
        got = mw_transpose(m)
        assert got == m  # linked pair is its own transpose
        assert all(d.side == 1 for d in got)

    @given(mseg_st)
    @settings(max_examples=150)
    def test_involution(self, m):
        assert mw_transpose(mw_transpose(m)) == m

    @given(mseg_st)
    @settings(max_examples=150)
    def test_degree_preserved(self, m):
        assert mw_transpose(m).degree == m.degree

    def test_involution_exhaustive_small(self):
        vals = [(b, e) for b in range(-2, 3) for e in range(b, 3)]
        for n in range(4):
            for combo in itertools.combinations_with_replacement(vals, n):
                m = mseg(*combo)
                assert mw_transpose(mw_transpose(m)) == m

    def test_first_piece_longest_at_top(self):
        rng = random.Random(7)
        for _ in range(200):
            pairs = []
            for _ in range(rng.randint(1, 6)):
                b = rng.randint(-3, 3)
                pairs.append((b, b + rng.randint(0, 3)))
            m = mseg(*pairs)
            top, _ = mw_step(m)
            t = mw_transpose(m)
            peers = [d for d in t if d.e == top.e]
            assert top in peers
            assert all(d.length <= top.length for d in peers)


class TestCapacity:
    def test_single_column(self):
        assert kz_capacity(mseg((-2, 1)), seg(0, 0)) == 1

    def test_matches_transpose_multiplicity(self):
        m = mseg((-2, -1), (-2, 0))
        t = mw_transpose(m)
        assert kz_capacity(m, seg(-2, -1)) == t.multiplicity(seg(-2, -1)) == 0

    def test_empty_target(self):
        assert kz_capacity(mseg((0, 0)), seg(1, 0)) == 0

    def test_identity_on_random_instances(self):
        rng = random.Random(20)
        for _ in range(250):
            pairs = []
            for _ in range(rng.randint(1, 8)):
                b = rng.randint(-5, 5)
                pairs.append((b, b + rng.randint(0, 4)))
            m = mseg(*pairs)
            t = mw_transpose(m)
            lo = min(b for b, _ in pairs)
            hi = max(e for _, e in pairs)
            for _ in range(4):
                tb = rng.randint(lo, hi)
                te = rng.randint(tb, hi)
                target = seg(tb, te)
                assert containment_count(t, target) == kz_capacity(m, target)

    def test_labeled_two_disjoint_paths(self):
        # large mixed-sign fixture whose dual multiplicity at [-3,-1] is 1
        # while the labeled graph still carries two disjoint paths over [1,3]
        m = Multisegment(
            [seg(3, 3), seg(-3, -3)]
            + [seg(-1, 1)] * 3
            + [seg(-2, 2)] * 3
            + [seg(-3, 3)] * 2
        )
        s = SignedSymMultisegment(m, minus={seg(-2, 2)})
        assert kz_capacity_labeled(s, seg(1, 3)) == 2

    def test_labeled_empty_target(self):
        s = SignedSymMultisegment(mseg((0, 0), (0, 0)))
        assert kz_capacity_labeled(s, seg(1, 0)) == 0


class TestPairs:
    def test_raw_pairs_roundtrip(self):
        pairs = [(-4, 2), (-2, 0)]
        t = transpose_pairs(pairs)
        assert t == [(-4, -4), (-2, -2), (-2, -2), (0, 0), (0, 0), (2, 2)]
        assert transpose_pairs(t) == sorted(pairs)
