"""Physical parameters and derived rates.

Single source of truth for unit conventions: every frequency-like quantity
is an angular rate in s^-1 with no 2*pi factors inserted anywhere, lengths
are meters, masses kilograms, powers watts.  Dimensionless outputs (T, R,
isolation, enhancement factor) are unaffected by this choice; group delays
come out in seconds.

The baked-in defaults are the operating point used throughout the result
set.  Two tabulated values are internally inconsistent with the plotted
spectra and are resolved here: the pump power is taken on the milliwatt
scale (9 mW; a watt-scale pump drives the fixed point into an unstable,
strongly shifted regime with no transparency window), and the emitter is
taken resonant with the optical mode (delta_eg_ratio = 1.0, the stated
on-resonance condition) rather than detuned by half a mechanical frequency.
Both remain plain config keys, so the literal table values stay reachable.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, fields, replace

from .constants import C_VACUUM, HBAR
from .errors import ValidationError
from .sagnac import SagnacSplit, effective_detunings, sagnac_shift

logger = logging.getLogger(__name__)


class JMode(enum.Enum):
    """How the emitter-mode coupling J is fixed."""

    FROM_COOPERATIVITY = "from_cooperativity"  # J = sqrt(2 C kappa_ex gamma*)
    FROM_TABLE = "from_table"  # J = 0.75 kappa_ex


@dataclass(frozen=True)
class PhysicalParams:
    """Raw inputs: resonator, optics, drives, emitter.

    All rates are angular (s^-1); see the module docstring for conventions.
    ``pump_detuning`` of ``None`` means the red-sideband condition
    ``Delta_c = omega_m``.
    """

    mass_kg: float = 2e-12
    omega_m: float = 200e6
    gamma_m: float = 0.2e6
    lambda_m: float = 1.55e-6
    refractive_index: float = 1.44
    omega_c: float = 193.5e12
    quality_factor: float = 3e7
    pump_power_w: float = 9e-3
    probe_power_w: float = 1e-6
    radius_m: float = 0.25e-3
    spin_rate: float = 0.0  # signed; positive = clockwise
    delta_eg_ratio: float = 1.0  # emitter detuning as a fraction of omega_m
    gamma_star: float = 0.03e6
    cooperativity: float = 0.5
    pump_detuning: float | None = None
    j_mode: JMode = JMode.FROM_COOPERATIVITY

    def validate(self) -> None:
        """Raise ValidationError naming the first violated field."""
        positive = [
            "mass_kg", "omega_m", "lambda_m", "omega_c",
            "quality_factor", "radius_m",
        ]
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be > 0, got {getattr(self, name)!r}")
        nonneg = ["gamma_m", "pump_power_w", "probe_power_w", "gamma_star",
                  "cooperativity"]
        for name in nonneg:
            if not getattr(self, name) >= 0:
                raise ValidationError(f"{name} must be >= 0, got {getattr(self, name)!r}")
        if not self.refractive_index >= 1:
            raise ValidationError(
                f"refractive_index must be >= 1, got {self.refractive_index!r}")
        for name in [f.name for f in fields(self)]:
            value = getattr(self, name)
            if isinstance(value, float) and not math.isfinite(value):
                raise ValidationError(f"{name} must be finite, got {value!r}")
        if self.pump_power_w > 0 and self.probe_power_w / self.pump_power_w > 1e-3:
            logger.warning(
                "probe/pump power ratio %.3g exceeds 1e-3; the linearized "
                "sideband treatment assumes a much weaker probe",
                self.probe_power_w / self.pump_power_w,
            )

    @property
    def delta_c(self) -> float:
        """Pump-cavity detuning; defaults to the red-sideband value omega_m."""
        return self.omega_m if self.pump_detuning is None else self.pump_detuning

    def with_(self, **kwargs) -> "PhysicalParams":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class DerivedRates:
    """Rates computed from PhysicalParams; immutable, shareable."""

    kappa_ex: float
    kappa_in: float
    beta: float  # net half-linewidth (kappa_ex + kappa_in)/2
    g: float  # optomechanical coupling, rate per meter
    j_coupling: float
    eps_l: float
    eps_p: float
    delta_c: float
    delta_ca: float
    delta_cb: float
    delta_eg: float
    delta_eg_c: complex  # delta_eg - i*gamma_star
    sagnac: float  # the shift applied to the mode detunings
    # carried along for downstream solvers
    mass_kg: float
    omega_m: float
    gamma_m: float
    gamma_star: float
    radius_m: float
    spin_rate: float


def drive_amplitude(power_w: float, omega: float) -> float:
    """Coherent drive amplitude sqrt(P / (hbar * omega)).

    Used for both the pump and the probe; the probe is evaluated at the
    pump carrier since the probe-pump detuning is ~1e-8 of the carrier.
    """
    if omega <= 0:
        raise ValidationError(f"drive frequency must be > 0, got {omega!r}")
    if power_w < 0:
        raise ValidationError(f"power must be >= 0, got {power_w!r}")
    return math.sqrt(power_w / (HBAR * omega))


def derive_rates(
    p: PhysicalParams,
    split: SagnacSplit = SagnacSplit.OPPOSITE,
) -> DerivedRates:
    """Populate every derived rate from the raw parameters.

    Pure and deterministic: identical inputs give bit-identical outputs.
    """
    p.validate()
    kappa_ex = p.omega_c / p.quality_factor
    kappa_in = kappa_ex  # symmetric internal/external loss
    beta = 0.5 * (kappa_ex + kappa_in)
    g = p.omega_c / p.radius_m
    if p.j_mode is JMode.FROM_COOPERATIVITY:
        j = math.sqrt(2.0 * p.cooperativity * kappa_ex * p.gamma_star)
    elif p.j_mode is JMode.FROM_TABLE:
        j = 0.75 * kappa_ex
    else:  # pragma: no cover
        raise ValidationError(f"unknown j_mode {p.j_mode!r}")
    delta_c = p.delta_c
    omega_l = p.omega_c - delta_c
    eps_l = drive_amplitude(p.pump_power_w, omega_l)
    eps_p = drive_amplitude(p.probe_power_w, omega_l)
    shift = sagnac_shift(
        p.refractive_index, p.radius_m, p.spin_rate, p.omega_c, C_VACUUM)
    delta_ca, delta_cb = effective_detunings(delta_c, shift, split)
    delta_eg = p.delta_eg_ratio * p.omega_m
    return DerivedRates(
        kappa_ex=kappa_ex,
        kappa_in=kappa_in,
        beta=beta,
        g=g,
        j_coupling=j,
        eps_l=eps_l,
        eps_p=eps_p,
        delta_c=delta_c,
        delta_ca=delta_ca,
        delta_cb=delta_cb,
        delta_eg=delta_eg,
        delta_eg_c=delta_eg - 1j * p.gamma_star,
        sagnac=shift.shift,
        mass_kg=p.mass_kg,
        omega_m=p.omega_m,
        gamma_m=p.gamma_m,
        gamma_star=p.gamma_star,
        radius_m=p.radius_m,
        spin_rate=p.spin_rate,
    )


# --- flat key=value parameter files -------------------------------------

PARAM_KEYS = (
    "mass_kg", "omega_m", "gamma_m", "lambda_m", "refractive_index",
    "omega_c", "quality_factor", "pump_power_w", "probe_power_w",
    "radius_m", "spin_rate", "delta_eg_ratio", "gamma_star",
    "cooperativity", "pump_detuning", "j_mode",
)


def parse_params_text(text: str) -> PhysicalParams:
    """Parse `key = value` lines; `#` starts a comment; missing keys keep
    the baked-in defaults; the last occurrence of a duplicate key wins."""
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in PARAM_KEYS:
            raise ValidationError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            logger.warning("duplicate key %r at line %d; last occurrence wins",
                           key, lineno)
        if key == "j_mode":
            try:
                values[key] = JMode(val)
            except ValueError:
                raise ValidationError(
                    f"line {lineno}: j_mode must be one of "
                    f"{[m.value for m in JMode]}, got {val!r}") from None
        else:
            try:
                values[key] = float(val)
            except ValueError:
                raise ValidationError(
                    f"line {lineno}: could not parse {val!r} as a number") from None
    return PhysicalParams(**values)  # type: ignore[arg-type]


def format_params(p: PhysicalParams) -> str:
    """Dump parameters in the same key=value format parse_params_text reads."""
    lines = []
    for key in PARAM_KEYS:
        if key == "j_mode":
            lines.append(f"j_mode = {p.j_mode.value}")
        elif key == "pump_detuning":
            lines.append(f"pump_detuning = {p.delta_c!r}")
        else:
            lines.append(f"{key} = {getattr(p, key)!r}")
    return "\n".join(lines) + "\n"
