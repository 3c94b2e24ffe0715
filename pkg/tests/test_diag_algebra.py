import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from toda.diag_algebra import DiagSeq, shift, trace_pair

ints = st.lists(st.integers(-50, 50), max_size=12)


def test_shift_down_drops_leading_entries():
    assert shift([3, 4, 5], "down", 1) == DiagSeq([4, 5])
    assert len(shift([3, 4, 5], "down", 1)) == 2


def test_shift_up_prepends_zeros():
    out = shift([3, 4], "up", 1)
    assert out.entries.tolist() == [0, 3, 4]


def test_down_then_up_zeroes_head():
    out = shift(shift([1, 2, 3], "down", 2), "up", 2)
    assert out.entries.tolist() == [0, 0, 3]


def test_shift_down_past_length_is_empty():
    assert len(shift([1, 2], "down", 5)) == 0


def test_shift_rejects_bad_direction():
    import pytest

    with pytest.raises(ValueError):
        shift([1], "sideways", 1)


def test_trace_pair_examples():
    assert trace_pair([1, 2], [3, 4]) == 11
    assert trace_pair([1, 2, 3], [0, 0, 0]) == 0
    assert trace_pair([1, 2], shift([5, 7], "down", 1)) == 7
    assert trace_pair(shift([1, 2], "up", 1), [5, 7]) == 7


def test_mixed_length_arithmetic_zero_pads():
    s = DiagSeq([1, 2, 3]) + DiagSeq([10])
    assert s.entries.tolist() == [11, 2, 3]
    d = DiagSeq([1]) - [0, 4]
    assert d.entries.tolist() == [1, -4]


def test_norms():
    x = DiagSeq([3, -4, 1])
    assert x.l1_norm() == 8
    assert x.sup_norm() == 4
    assert DiagSeq([]).l1_norm() == 0.0


def test_integer_dtype_survives():
    x = shift(DiagSeq([1, 2, 3]) * DiagSeq([2, 2]), "up", 2)
    assert x.entries.dtype.kind == "i"


@given(ints, st.integers(0, 6))
def test_up_then_down_is_identity(x, j):
    assert shift(shift(x, "up", j), "down", j) == DiagSeq(x)


@given(ints, st.integers(0, 6))
def test_down_then_up_zeroes_first_j(x, j):
    expected = np.array(x, dtype=int)
    expected[:j] = 0
    assert shift(shift(x, "down", j), "up", j) == DiagSeq(expected)


@given(ints, ints, st.integers(0, 6))
def test_shifts_are_adjoint(rho, x, j):
    assert trace_pair(rho, shift(x, "down", j)) == trace_pair(shift(rho, "up", j), x)


@given(ints, ints, ints, st.integers(-3, 3))
def test_trace_pair_bilinear_symmetric(a, b, c, lam):
    assert trace_pair(a, b) == trace_pair(b, a)
    lhs = trace_pair(DiagSeq(a) * lam + DiagSeq(b), c)
    assert lhs == lam * trace_pair(a, c) + trace_pair(b, c)
