import cmath
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from carleson_cex.dyadic import DyadicInterval, arcs_of_rank, relative_distance, turn_phase
from carleson_cex.errors import DomainError, PreconditionError
from oracles import frac_phase


def test_quarter_turns_exact():
    assert turn_phase(0, 3) == 1
    assert turn_phase(2, 3) == 1j
    assert turn_phase(4, 3) == -1
    assert turn_phase(6, 3) == -1j
    assert turn_phase(5, -1) == 1


@given(num=st.integers(min_value=-(1 << 300), max_value=1 << 300),
       den=st.integers(min_value=0, max_value=280))
def test_turn_phase_matches_rational_reduction(num, den):
    assert abs(turn_phase(num, den) - frac_phase(num, den)) < 1e-15


def test_turn_phase_huge_numerator():
    # 3 * 2^200 + 1 over 2^202 is 3/4 + 2^-202 of a turn
    z = turn_phase(3 * (1 << 200) + 1, 202)
    assert abs(z - (-1j)) < 1e-15


def test_interval_geometry():
    I = DyadicInterval(3, 5)
    assert I.length == 0.125
    assert I.left == 0.625 and I.right == 0.75
    assert I.center == pytest.approx(0.6875)
    assert I.center_numerator == 11
    assert I.parent() == DyadicInterval(2, 2)
    assert I.children() == (DyadicInterval(4, 10), DyadicInterval(4, 11))
    assert DyadicInterval(1, 1).contains(I)
    assert not DyadicInterval(1, 0).contains(I)
    assert I.ancestor(0) == DyadicInterval(0, 0)
    assert I.to_dict() == {"j": 3, "k": 5}


def test_interval_validation():
    with pytest.raises(DomainError):
        DyadicInterval(-1, 0)
    with pytest.raises(DomainError):
        DyadicInterval(2, 4).require_arc()
    assert DyadicInterval(2, -3).left == -0.75  # line intervals may have any index


def test_arcs_of_rank():
    arcs = list(arcs_of_rank(3))
    assert len(arcs) == 8
    assert sum(a.length for a in arcs) == 1.0


@given(j=st.integers(0, 8), data=st.data())
def test_relative_distance_symmetric_for_equal_ranks(j, data):
    k1 = data.draw(st.integers(-50, 50))
    k2 = data.draw(st.integers(-50, 50))
    I, J = DyadicInterval(j, k1), DyadicInterval(j, k2)
    assert relative_distance(I, J) == relative_distance(J, I) == abs(k1 - k2)


def test_relative_distance_nested_and_precondition():
    assert relative_distance(DyadicInterval(3, 5), DyadicInterval(1, 1)) == 0
    assert relative_distance(DyadicInterval(3, 0), DyadicInterval(1, 1)) == 1
    with pytest.raises(PreconditionError):
        relative_distance(DyadicInterval(1, 0), DyadicInterval(3, 0))


@given(j=st.integers(0, 60), k=st.integers(0, 1 << 60), f=st.integers(-1 << 70, 1 << 70))
def test_center_phase(j, k, f):
    k %= 1 << j
    I = DyadicInterval(j, k)
    expected = cmath.exp(2j * math.pi * float(((f * (2 * k + 1)) % (1 << (j + 1))) / (1 << (j + 1))))
    assert abs(I.center_phase(f) - expected) < 1e-14
