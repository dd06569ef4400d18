"""Independent time-domain verification path.

Integrates the coupled mean-field equations of motion (two optical modes,
emitter lowering operator, mechanical displacement/velocity) with the full
pump + probe drive, then demodulates the settled trajectory at the
probe-pump detuning eta.  The demodulated sideband coefficients are
compared against the linearized frequency-domain solver; the two paths
share no algebra beyond the equations of motion themselves.
"""

from __future__ import annotations

import cmath
import logging
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .constants import HBAR
from .errors import SolverError, UnsettledTrajectoryError, ValidationError
from .fluctuations import solve_many
from .params import DerivedRates, PhysicalParams, derive_rates
from .sagnac import SagnacSplit
from .steady_state import FixedPointOptions, SteadyState, solve_fixed_point

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    a: np.ndarray
    b: np.ndarray
    sigma: np.ndarray
    x: np.ndarray
    v: np.ndarray
    p_theta: float  # conserved angular momentum m r^2 Omega


@dataclass(frozen=True)
class Demodulation:
    dc: complex
    minus: complex  # e^(-i eta t) coefficient
    plus: complex  # e^(+i eta t) coefficient
    residual: float  # fit residual relative to signal norm


@dataclass(frozen=True)
class ReportEntry:
    eta: float
    dev_da: float
    dev_db: float
    dev_dx: float
    passed: bool


@dataclass(frozen=True)
class Report:
    entries: list[ReportEntry]
    tol: float

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)


def _rhs_factory(rates: DerivedRates, eta: float, probe_scale: float):
    """Scalar-arithmetic right-hand side; y = [a, b, sigma, x, v] complex."""
    ca = -(rates.beta + 1j * rates.delta_ca)
    cb = -(rates.beta + 1j * rates.delta_cb)
    cs = -1j * rates.delta_eg_c
    ij = 1j * rates.j_coupling
    ig = 1j * rates.g
    root_kex = rates.kappa_ex**0.5
    pump = root_kex * rates.eps_l
    probe = root_kex * rates.eps_p * probe_scale
    force = HBAR * rates.g / rates.mass_kg
    om2 = rates.omega_m**2
    gm = rates.gamma_m
    centrifugal = rates.radius_m * rates.spin_rate**2
    exp = cmath.exp

    def rhs(t, y):
        a, b, s, x, v = y
        igx = ig * x.real
        da = (ca + igx) * a - ij * s + pump + probe * exp(-1j * eta * t)
        db = (cb + igx) * b - ij * s
        ds = cs * s - ij * (a + b)
        dv = (
            -om2 * x.real
            - gm * v.real
            + force * (a.real**2 + a.imag**2 + b.real**2 + b.imag**2)
            + centrifugal
        )
        return [da, db, ds, v, dv]

    return rhs


def integrate_rates(
    rates: DerivedRates,
    t_end: float,
    dt: float,
    *,
    eta: float,
    sample_start: float = 0.0,
    probe_scale: float = 1.0,
    y0: np.ndarray | None = None,
    rtol: float = 1e-9,
) -> Trajectory:
    """Integrate the mean-field equations, sampling uniformly with spacing
    dt on [sample_start, t_end].

    The probe drive is eps_p * probe_scale at detuning eta from the pump.
    The initial state defaults to the pump-only fixed point, which
    minimizes the transient the demodulation window must outlive.
    """
    fastest = max(rates.omega_m, abs(rates.delta_ca), rates.beta)
    if not 0 < dt <= 1e-2 / fastest:
        raise ValidationError(
            f"sample spacing {dt!r} does not resolve the fastest scale "
            f"(need dt <= {1e-2 / fastest!r})")
    if not 0 <= sample_start < t_end:
        raise ValidationError(
            f"need 0 <= sample_start < t_end, got {sample_start!r}, {t_end!r}")
    if y0 is None:
        ss = solve_fixed_point(rates, FixedPointOptions())
        y0 = np.array(
            [ss.a_mean, ss.b_mean, ss.sigma_mean, ss.x_mean, 0.0], dtype=complex)
    else:
        y0 = np.asarray(y0, dtype=complex)
    scales = np.maximum(np.abs(y0), [1.0, 1.0, 1e-6, 1e-18, 1e-10])
    n_samples = int(np.floor((t_end - sample_start) / dt)) + 1
    times = sample_start + dt * np.arange(n_samples)
    sol = solve_ivp(
        _rhs_factory(rates, eta, probe_scale),
        (0.0, t_end),
        y0,
        method="DOP853",
        t_eval=times,
        rtol=rtol,
        atol=1e-8 * scales,
        first_step=min(1e-2 / fastest, t_end / 2),
    )
    if not sol.success:
        raise SolverError(
            f"time integration failed at t={sol.t[-1] if sol.t.size else 0.0!r}: "
            f"{sol.message}")
    return Trajectory(
        times=sol.t,
        a=sol.y[0],
        b=sol.y[1],
        sigma=sol.y[2],
        x=sol.y[3].real,
        v=sol.y[4].real,
        p_theta=rates.mass_kg * rates.radius_m**2 * rates.spin_rate,
    )


def integrate_mean_field(
    p: PhysicalParams,
    t_end: float,
    dt: float,
    *,
    eta: float,
    sample_start: float = 0.0,
    probe_scale: float = 1.0,
    y0: np.ndarray | None = None,
    rtol: float = 1e-9,
    split: SagnacSplit = SagnacSplit.OPPOSITE,
) -> Trajectory:
    return integrate_rates(
        derive_rates(p, split), t_end, dt,
        eta=eta, sample_start=sample_start, probe_scale=probe_scale,
        y0=y0, rtol=rtol)


def demodulate(
    tr: Trajectory, eta: float, n_periods: int = 200
) -> dict[str, Demodulation]:
    """Least-squares fit of each variable to dc + minus*e^(-i eta t)
    + plus*e^(+i eta t) over the last n_periods probe periods."""
    if eta <= 0:
        raise ValidationError(f"demodulation detuning must be > 0, got {eta!r}")
    window = n_periods * 2 * np.pi / eta
    t_last = tr.times[-1]
    mask = tr.times >= t_last - window
    if np.count_nonzero(mask) < 16:
        raise ValidationError(
            f"trajectory too short: {np.count_nonzero(mask)} samples in the "
            f"last {n_periods} probe periods")
    t = tr.times[mask]
    design = np.column_stack(
        [np.ones_like(t), np.exp(-1j * eta * t), np.exp(1j * eta * t)])
    out: dict[str, Demodulation] = {}
    for name, signal in (("a", tr.a), ("b", tr.b), ("sigma", tr.sigma),
                         ("x", tr.x.astype(complex))):
        sig = signal[mask]
        coeff, *_ = np.linalg.lstsq(design, sig, rcond=None)
        resid = np.linalg.norm(design @ coeff - sig)
        norm = max(np.linalg.norm(sig), 1e-300)
        rel = float(resid / norm)
        if rel > 1e-3:
            raise UnsettledTrajectoryError(
                f"demodulation of {name!r} leaves relative residual {rel:.3e} "
                f"(> 1e-3); trajectory not settled or model mismatch")
        out[name] = Demodulation(
            dc=complex(coeff[0]), minus=complex(coeff[1]),
            plus=complex(coeff[2]), residual=rel)
    return out


def _rel_dev(oracle_val: complex, linear_val: complex) -> float:
    denom = max(abs(linear_val), 1e-300)
    return abs(oracle_val - linear_val) / denom


def verify_against_linear(
    p: PhysicalParams,
    eta_list: list[float],
    tol: float,
    *,
    probe_scale: float = 1e-3,
    n_periods: int = 200,
    settle_factor: float = 40.0,
    rtol: float = 1e-9,
    split: SagnacSplit = SagnacSplit.OPPOSITE,
) -> Report:
    """Run both the frequency-domain and the time-domain path at each eta.

    The probe is scaled down (default 1e-3) so the comparison is made
    inside the regime where the linearization is exact to first order.
    A failed verdict is a result, not an error.
    """
    if not eta_list:
        raise ValidationError("eta_list must be nonempty")
    rates = derive_rates(p, split)
    ss = solve_fixed_point(rates, FixedPointOptions())
    entries: list[ReportEntry] = []
    for eta in eta_list:
        lin, _ = solve_many(rates, ss, np.array([eta]))
        settle = settle_factor / rates.gamma_m
        window = n_periods * 2 * np.pi / eta
        t_end = settle + window
        dt = 1e-2 / max(rates.omega_m, abs(rates.delta_ca), rates.beta)
        tr = integrate_rates(
            rates, t_end, dt, eta=eta, sample_start=settle,
            probe_scale=probe_scale, rtol=rtol,
            y0=np.array([ss.a_mean, ss.b_mean, ss.sigma_mean, ss.x_mean, 0.0],
                        dtype=complex))
        demod = demodulate(tr, eta, n_periods)
        dev_da = _rel_dev(demod["a"].minus, probe_scale * lin[0, 0])
        dev_db = _rel_dev(demod["b"].minus, probe_scale * lin[0, 2])
        dev_dx = _rel_dev(demod["x"].minus, probe_scale * lin[0, 6])
        passed = bool(max(dev_da, dev_db, dev_dx) <= tol)
        entries.append(ReportEntry(eta, dev_da, dev_db, dev_dx, passed))
        logger.info(
            "oracle check eta=%g: dev_da=%.3e dev_db=%.3e dev_dx=%.3e %s",
            eta, dev_da, dev_db, dev_dx, "pass" if passed else "FAIL")
    return Report(entries=entries, tol=tol)
