import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from omit_ring import (HBAR, JMode, PhysicalParams, ValidationError,
                       derive_rates, drive_amplitude, format_params,
                       parse_params_text)


def test_default_derived_rates():
    r = derive_rates(PhysicalParams())
    assert r.kappa_ex == pytest.approx(6.45e6)
    assert r.kappa_in == r.kappa_ex
    assert r.beta == pytest.approx(6.45e6)
    assert r.g == pytest.approx(193.5e12 / 0.25e-3)
    assert r.delta_c == 200e6
    assert r.delta_ca == 200e6  # no spin
    assert r.delta_cb == 200e6
    assert r.delta_eg == 200e6
    assert r.delta_eg_c == complex(200e6, -0.03e6)
    assert r.sagnac == 0.0


def test_j_modes():
    r_coop = derive_rates(PhysicalParams(j_mode=JMode.FROM_COOPERATIVITY))
    assert r_coop.j_coupling == pytest.approx(
        math.sqrt(2 * 0.5 * 6.45e6 * 0.03e6))
    r_tab = derive_rates(PhysicalParams(j_mode=JMode.FROM_TABLE))
    assert r_tab.j_coupling == pytest.approx(0.75 * 6.45e6)


def test_zero_cooperativity_decouples_emitter():
    r = derive_rates(PhysicalParams(cooperativity=0.0))
    assert r.j_coupling == 0.0


def test_drive_amplitude_value_and_guards():
    assert drive_amplitude(1e-3, 193.5e12) == pytest.approx(
        math.sqrt(1e-3 / (HBAR * 193.5e12)))
    assert drive_amplitude(0.0, 1.0) == 0.0
    with pytest.raises(ValidationError):
        drive_amplitude(1.0, 0.0)
    with pytest.raises(ValidationError):
        drive_amplitude(-1.0, 1.0)


def test_pump_detuning_default_is_mechanical_frequency():
    p = PhysicalParams()
    assert p.delta_c == p.omega_m
    assert PhysicalParams(pump_detuning=5e6).delta_c == 5e6


@pytest.mark.parametrize("field,value", [
    ("mass_kg", 0.0),
    ("omega_m", -1.0),
    ("quality_factor", 0.0),
    ("radius_m", -0.1),
    ("gamma_m", -1.0),
    ("pump_power_w", -1e-3),
    ("refractive_index", 0.9),
    ("omega_c", float("nan")),
])
def test_validation_rejects_bad_values(field, value):
    with pytest.raises(ValidationError, match=field):
        PhysicalParams(**{field: value}).validate()


def test_parse_empty_gives_defaults():
    assert parse_params_text("") == PhysicalParams()


def test_parse_comments_and_values():
    p = parse_params_text(
        "# a comment\n"
        "spin_rate = -40e3  # counterclockwise\n"
        "cooperativity = 0\n"
        "j_mode = from_table\n")
    assert p.spin_rate == -40e3
    assert p.cooperativity == 0.0
    assert p.j_mode is JMode.FROM_TABLE


def test_parse_unknown_key_reports_line():
    with pytest.raises(ValidationError, match="line 2"):
        parse_params_text("spin_rate = 1\nbogus = 3\n")


def test_parse_bad_number_and_bad_enum():
    with pytest.raises(ValidationError, match="number"):
        parse_params_text("spin_rate = fast\n")
    with pytest.raises(ValidationError, match="j_mode"):
        parse_params_text("j_mode = nonsense\n")
    with pytest.raises(ValidationError, match="key = value"):
        parse_params_text("just some words\n")


def test_duplicate_key_last_wins(caplog):
    with caplog.at_level("WARNING", logger="omit_ring.params"):
        p = parse_params_text("spin_rate = 1\nspin_rate = 2\n")
    assert p.spin_rate == 2.0
    assert any("duplicate" in rec.message for rec in caplog.records)


def test_format_parse_round_trip():
    p = PhysicalParams(spin_rate=-40e3, cooperativity=0.25,
                       pump_detuning=1.23e8, j_mode=JMode.FROM_TABLE)
    q = parse_params_text(format_params(p))
    assert q == p
    assert format_params(q) == format_params(p)


@settings(max_examples=30, deadline=None)
@given(
    spin=st.floats(-1e6, 1e6, allow_nan=False),
    power=st.floats(1e-6, 1e-1),
    coop=st.floats(0.0, 2.0),
)
def test_round_trip_property(spin, power, coop):
    # pump_detuning=None is dumped as its resolved value, so compare the
    # dumped form (byte-stable) and the derived rates, not the dataclass.
    p = PhysicalParams(spin_rate=spin, pump_power_w=power, cooperativity=coop)
    text = format_params(p)
    q = parse_params_text(text)
    assert format_params(q) == text
    assert derive_rates(q) == derive_rates(p)


def test_derive_rates_is_deterministic():
    assert derive_rates(PhysicalParams()) == derive_rates(PhysicalParams())


def test_probe_pump_ratio_warning(caplog):
    with caplog.at_level("WARNING", logger="omit_ring.params"):
        PhysicalParams(probe_power_w=1e-3, pump_power_w=9e-3).validate()
    assert any("probe" in rec.message for rec in caplog.records)
