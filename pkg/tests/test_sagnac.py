import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from omit_ring import (C_VACUUM, SagnacSplit, ValidationError,
                       effective_detunings, sagnac_shift)

N, R, WC = 1.44, 0.25e-3, 193.5e12


def test_zero_spin_zero_shift():
    assert sagnac_shift(N, R, 0.0, WC, C_VACUUM).shift == 0.0


def test_magnitude_against_manual_formula():
    s = sagnac_shift(N, R, 40e3, WC, C_VACUUM)
    expected = N * R * 40e3 * WC / C_VACUUM * (1 - 1 / N)
    assert s.shift == pytest.approx(expected)
    assert s.shift == pytest.approx(2.838e6, rel=1e-3)


def test_shift_is_odd_in_spin():
    up = sagnac_shift(N, R, 40e3, WC, C_VACUUM).shift
    down = sagnac_shift(N, R, -40e3, WC, C_VACUUM).shift
    assert up == -down


@settings(max_examples=50, deadline=None)
@given(spin=st.floats(-1e6, 1e6, allow_nan=False),
       k=st.floats(0.1, 10.0))
def test_shift_linear_in_spin(spin, k):
    base = sagnac_shift(N, R, spin, WC, C_VACUUM).shift
    scaled = sagnac_shift(N, R, k * spin, WC, C_VACUUM).shift
    assert scaled == pytest.approx(k * base, rel=1e-12, abs=1e-12)


def test_index_one_gives_zero_drag():
    assert sagnac_shift(1.0, R, 40e3, WC, C_VACUUM).shift == 0.0


def test_opposite_split_pushes_modes_apart():
    s = sagnac_shift(N, R, 40e3, WC, C_VACUUM)
    da, db = effective_detunings(200e6, s, SagnacSplit.OPPOSITE)
    assert da == 200e6 - s.shift
    assert db == 200e6 + s.shift


def test_common_split_moves_modes_together():
    s = sagnac_shift(N, R, 40e3, WC, C_VACUUM)
    da, db = effective_detunings(200e6, s, SagnacSplit.COMMON)
    assert da == db == 200e6 - s.shift


def test_spin_reversal_swaps_modes_under_opposite_split():
    up = sagnac_shift(N, R, 40e3, WC, C_VACUUM)
    down = sagnac_shift(N, R, -40e3, WC, C_VACUUM)
    da_up, db_up = effective_detunings(200e6, up, SagnacSplit.OPPOSITE)
    da_dn, db_dn = effective_detunings(200e6, down, SagnacSplit.OPPOSITE)
    assert da_up == db_dn
    assert db_up == da_dn


@pytest.mark.parametrize("kwargs", [
    {"n": 0.5}, {"r": 0.0}, {"omega_c": -1.0},
])
def test_preconditions(kwargs):
    args = {"n": N, "r": R, "spin_rate": 1.0, "omega_c": WC, "c": C_VACUUM}
    args.update(kwargs)
    with pytest.raises(ValidationError):
        sagnac_shift(**args)
