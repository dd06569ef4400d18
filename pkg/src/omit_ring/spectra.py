"""Observables and sweeps: transmission, reflection, isolation,
enhancement factor, group delay, and transparency-window metrics.

Probe detunings are expressed as delta_p = eta - omega_m by default (the
transparency peak then sits at delta_p = 0); the alternative
delta_p = eta - Delta_c convention is selectable.  All sweeps are
deterministic: identical inputs give bit-identical outputs.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ShapeError, ValidationError
from .fluctuations import FluctuationAmplitudes, solve_many
from .params import DerivedRates, PhysicalParams, derive_rates
from .sagnac import SagnacSplit
from .steady_state import FixedPointOptions, SteadyState, solve_fixed_point


class DeltaPConvention(enum.Enum):
    """What zero probe detuning means on the x axis."""

    SIDEBAND = "sideband"  # delta_p = eta - omega_m (peak at 0)
    PUMP = "pump"  # delta_p = eta - Delta_c


@dataclass(frozen=True)
class SpectrumPoint:
    delta_p: float
    T: float
    R: float
    t_p_arg: float
    tau_g: float | None = None


@dataclass(frozen=True)
class SweepGrid:
    start: float
    stop: float
    count: int

    def __post_init__(self) -> None:
        if self.count < 2:
            raise ValidationError(f"grid count must be >= 2, got {self.count!r}")
        if not self.start < self.stop:
            raise ValidationError(
                f"grid start must be < stop, got [{self.start!r}, {self.stop!r}]")

    def nodes(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class OmitMetrics:
    peak_T: float
    peak_pos: float
    window_width: float
    minima_pos: tuple[float, float]
    minima_T: tuple[float, float]


def worker_count() -> int:
    """Worker cap from OMIT_RING_THREADS (default 1)."""
    raw = os.environ.get("OMIT_RING_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValidationError(f"OMIT_RING_THREADS must be an integer, got {raw!r}")
    if n < 1:
        raise ValidationError(f"OMIT_RING_THREADS must be >= 1, got {n}")
    return n


def _eta_offset(rates: DerivedRates, convention: DeltaPConvention) -> float:
    if convention is DeltaPConvention.SIDEBAND:
        return rates.omega_m
    return rates.delta_c


def transmission_reflection(
    fl: FluctuationAmplitudes, rates: DerivedRates
) -> tuple[float, float, complex]:
    """(T, R, t_p) from the forward and backward sideband amplitudes."""
    if rates.eps_p == 0.0:
        raise ValidationError("observables undefined at zero probe power")
    root_kex = np.sqrt(rates.kappa_ex)
    t_p = 1.0 - root_kex * fl.da_minus / rates.eps_p
    r_amp = root_kex * fl.db_minus / rates.eps_p
    return abs(t_p) ** 2, abs(r_amp) ** 2, t_p


def _solve_grid(
    rates: DerivedRates, ss: SteadyState, etas: np.ndarray, workers: int
) -> np.ndarray:
    if workers <= 1 or etas.shape[0] < 2 * workers:
        sol, _ = solve_many(rates, ss, etas)
        return sol
    chunks = np.array_split(etas, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda c: solve_many(rates, ss, c)[0], chunks))
    return np.concatenate(parts)


def _spectrum_arrays(
    p: PhysicalParams,
    grid: SweepGrid,
    *,
    split: SagnacSplit,
    convention: DeltaPConvention,
    seed: float | None = None,
    workers: int | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, SteadyState]:
    rates = derive_rates(p, split)
    ss = solve_fixed_point(rates, FixedPointOptions(seed=seed))
    delta_ps = grid.nodes()
    etas = delta_ps + _eta_offset(rates, convention)
    sol = _solve_grid(rates, ss, etas, workers or worker_count())
    root_kex = np.sqrt(rates.kappa_ex)
    t_p = 1.0 - root_kex * sol[:, 0] / rates.eps_p
    r = np.abs(root_kex * sol[:, 2] / rates.eps_p) ** 2
    return delta_ps, np.abs(t_p) ** 2, r, np.angle(t_p), ss


def sweep_spectrum(
    p: PhysicalParams,
    grid: SweepGrid,
    *,
    split: SagnacSplit = SagnacSplit.OPPOSITE,
    convention: DeltaPConvention = DeltaPConvention.SIDEBAND,
    workers: int | None = None,
) -> list[SpectrumPoint]:
    """One SpectrumPoint per grid node, ordered by delta_p.

    The pump-driven fixed point is solved once (it does not depend on the
    probe detuning); the sideband system is then solved at every node.
    """
    delta_ps, t, r, arg, _ = _spectrum_arrays(
        p, grid, split=split, convention=convention, workers=workers)
    phases = np.unwrap(arg)
    return [
        SpectrumPoint(float(d), float(tv), float(rv), float(av))
        for d, tv, rv, av in zip(delta_ps, t, r, phases)
    ]


def point_response(
    p: PhysicalParams,
    delta_p: float,
    *,
    split: SagnacSplit = SagnacSplit.OPPOSITE,
    convention: DeltaPConvention = DeltaPConvention.SIDEBAND,
    seed: float | None = None,
) -> SpectrumPoint:
    """T, R, arg t_p at a single probe detuning."""
    rates = derive_rates(p, split)
    ss = solve_fixed_point(rates, FixedPointOptions(seed=seed))
    eta = delta_p + _eta_offset(rates, convention)
    sol, _ = solve_many(rates, ss, np.array([eta]))
    root_kex = np.sqrt(rates.kappa_ex)
    t_p = 1.0 - root_kex * sol[0, 0] / rates.eps_p
    r = abs(root_kex * sol[0, 2] / rates.eps_p) ** 2
    return SpectrumPoint(delta_p, abs(t_p) ** 2, float(r), float(np.angle(t_p)))


def isolation(
    p: PhysicalParams,
    grid: SweepGrid,
    omega_abs: float,
    *,
    normalized: bool = True,
    split: SagnacSplit = SagnacSplit.OPPOSITE,
    convention: DeltaPConvention = DeltaPConvention.SIDEBAND,
    workers: int | None = None,
) -> list[tuple[float, float]]:
    """|T_cw - T_ccw| over the grid, both spectra at spin magnitude omega_abs.

    With ``normalized`` each spectrum is divided by its own maximum before
    subtraction; pass False for the raw difference.
    """
    if not omega_abs > 0:
        raise ValidationError(f"spin magnitude must be > 0, got {omega_abs!r}")
    delta_ps, t_cw, _, _, _ = _spectrum_arrays(
        p.with_(spin_rate=abs(omega_abs)), grid,
        split=split, convention=convention, workers=workers)
    _, t_ccw, _, _, _ = _spectrum_arrays(
        p.with_(spin_rate=-abs(omega_abs)), grid,
        split=split, convention=convention, workers=workers)
    if normalized:
        t_cw = t_cw / t_cw.max()
        t_ccw = t_ccw / t_ccw.max()
    iso = np.abs(t_cw - t_ccw)
    return [(float(d), float(v)) for d, v in zip(delta_ps, iso)]


def enhancement_factor(
    p: PhysicalParams,
    omega: float,
    *,
    split: SagnacSplit = SagnacSplit.OPPOSITE,
    convention: DeltaPConvention = DeltaPConvention.SIDEBAND,
) -> float:
    """Fractional on-resonance transmission change due to spinning:
    (T(omega) - T(0)) / T(0) at delta_p = 0."""
    t0 = point_response(
        p.with_(spin_rate=0.0), 0.0, split=split, convention=convention).T
    if t0 == 0.0:
        raise ValidationError(
            "enhancement factor undefined: zero transmission at rest")
    t_spun = point_response(
        p.with_(spin_rate=omega), 0.0, split=split, convention=convention).T
    return (t_spun - t0) / t0


def ef_scan(
    p: PhysicalParams,
    omegas: np.ndarray,
    *,
    split: SagnacSplit = SagnacSplit.OPPOSITE,
    convention: DeltaPConvention = DeltaPConvention.SIDEBAND,
) -> list[tuple[float, float]]:
    """Enhancement factor at delta_p = 0 over a list of signed spin rates.

    The fixed point at each spin rate is seeded from the previous one
    (continuation), so bistable branches are followed deterministically.
    """
    t0 = point_response(
        p.with_(spin_rate=0.0), 0.0, split=split, convention=convention).T
    if t0 == 0.0:
        raise ValidationError(
            "enhancement factor undefined: zero transmission at rest")
    out: list[tuple[float, float]] = []
    seed: float | None = None
    for omega in np.asarray(omegas, dtype=float):
        rates = derive_rates(p.with_(spin_rate=float(omega)), split)
        ss = solve_fixed_point(rates, FixedPointOptions(seed=seed))
        seed = ss.x_mean
        eta = _eta_offset(rates, convention)
        sol, _ = solve_many(rates, ss, np.array([eta]))
        t_p = 1.0 - np.sqrt(rates.kappa_ex) * sol[0, 0] / rates.eps_p
        out.append((float(omega), (abs(t_p) ** 2 - t0) / t0))
    return out


def delay_scan(
    p: PhysicalParams,
    omegas: np.ndarray,
    delta_p: float = 0.0,
    h: float | None = None,
    *,
    split: SagnacSplit = SagnacSplit.OPPOSITE,
    convention: DeltaPConvention = DeltaPConvention.SIDEBAND,
) -> list[tuple[float, float]]:
    """Group delay at a fixed probe detuning over a list of signed spin
    rates, with fixed-point continuation along the scan."""
    if h is None:
        h = p.omega_m * 1e-6
    out: list[tuple[float, float]] = []
    seed: float | None = None
    for omega in np.asarray(omegas, dtype=float):
        rates = derive_rates(p.with_(spin_rate=float(omega)), split)
        ss = solve_fixed_point(rates, FixedPointOptions(seed=seed))
        seed = ss.x_mean
        eta0 = delta_p + _eta_offset(rates, convention)
        out.append((float(omega), _group_delay_core(rates, ss, eta0, h)))
    return out


def _group_delay_core(
    rates: DerivedRates, ss: SteadyState, eta0: float, h: float
) -> float:
    from .errors import StepInstabilityError

    offsets = np.array([-h, -h / 2, h / 2, h])
    phases = _phase_at(rates, ss, eta0 + offsets)
    tau_h = (phases[3] - phases[0]) / (2 * h)
    tau_h2 = (phases[2] - phases[1]) / h
    if abs(tau_h - tau_h2) > 0.01 * abs(tau_h2):
        raise StepInstabilityError(
            f"group delay unstable at eta={eta0!r}: "
            f"tau(h)={tau_h!r}, tau(h/2)={tau_h2!r} with h={h!r}")
    return float(tau_h2)


def _phase_at(
    rates: DerivedRates, ss: SteadyState, etas: np.ndarray
) -> np.ndarray:
    sol, _ = solve_many(rates, ss, etas)
    t_p = 1.0 - np.sqrt(rates.kappa_ex) * sol[:, 0] / rates.eps_p
    return np.unwrap(np.angle(t_p))


def group_delay(
    p: PhysicalParams,
    delta_p: float,
    h: float | None = None,
    *,
    split: SagnacSplit = SagnacSplit.OPPOSITE,
    convention: DeltaPConvention = DeltaPConvention.SIDEBAND,
) -> float:
    """Group delay d arg(t_p)/d delta_p by central difference.

    The estimate at step h is checked against the one at h/2 (Richardson
    consistency); disagreement beyond 1% raises StepInstabilityError and
    the h/2 value is the one returned.
    """
    if h is None:
        h = p.omega_m * 1e-6
    if not h > 0:
        raise ValidationError(f"finite-difference step must be > 0, got {h!r}")
    rates = derive_rates(p, split)
    ss = solve_fixed_point(rates, FixedPointOptions())
    eta0 = delta_p + _eta_offset(rates, convention)
    return _group_delay_core(rates, ss, eta0, h)


def delay_spectrum(
    p: PhysicalParams,
    grid: SweepGrid,
    *,
    split: SagnacSplit = SagnacSplit.OPPOSITE,
    convention: DeltaPConvention = DeltaPConvention.SIDEBAND,
    workers: int | None = None,
) -> list[SpectrumPoint]:
    """sweep_spectrum plus a tau_g column at every node.

    Uses the same verified central-difference step as group_delay, reusing
    the single per-sweep fixed point.
    """
    h = (grid.stop - grid.start) / 1e6
    delta_ps, t, r, arg, _ = _spectrum_arrays(
        p, grid, split=split, convention=convention, workers=workers)
    rates = derive_rates(p, split)
    ss = solve_fixed_point(rates, FixedPointOptions())
    eta0 = delta_ps + _eta_offset(rates, convention)
    phase_lo = _phase_at(rates, ss, eta0 - h / 2)
    phase_hi = _phase_at(rates, ss, eta0 + h / 2)
    taus = (phase_hi - phase_lo) / h
    phases = np.unwrap(arg)
    return [
        SpectrumPoint(float(d), float(tv), float(rv), float(av), float(tg))
        for d, tv, rv, av, tg in zip(delta_ps, t, r, phases, taus)
    ]


def omit_metrics(spectrum: list[SpectrumPoint]) -> OmitMetrics:
    """Peak, flanking minima, and full width of the transparency window.

    The peak is the highest T between the lowest local minimum on each
    side; the width is measured at T halfway between the peak and the
    higher of the two minima, interpolating linearly between grid nodes.
    """
    t = np.array([pt.T for pt in spectrum])
    d = np.array([pt.delta_p for pt in spectrum])
    if t.size < 5:
        raise ShapeError("spectrum too short for window metrics")
    interior = np.arange(1, t.size - 1)
    is_min = (t[interior] < t[interior - 1]) & (t[interior] <= t[interior + 1])
    minima = interior[is_min]
    if minima.size < 2:
        raise ShapeError(
            "no transparency window: need two local minima flanking a peak")
    deepest = minima[np.argsort(t[minima])[:2]]
    li, ri = int(deepest.min()), int(deepest.max())
    if ri - li < 2:
        raise ShapeError(
            "no transparency window: the two deepest minima are adjacent")
    seg = slice(li, ri + 1)
    peak_rel = int(np.argmax(t[seg]))
    pi = li + peak_rel
    peak_t = float(t[pi])
    half = 0.5 * (peak_t + max(t[li], t[ri]))

    def _cross(i_from: int, step: int) -> float:
        i = i_from
        while 0 <= i + step < t.size and t[i + step] > half:
            i += step
        j = i + step
        if not 0 <= j < t.size:
            raise ShapeError("half-height level not reached inside the grid")
        frac = (half - t[i]) / (t[j] - t[i])
        return float(d[i] + frac * (d[j] - d[i]))

    width = _cross(pi, +1) - _cross(pi, -1)
    return OmitMetrics(
        peak_T=peak_t,
        peak_pos=float(d[pi]),
        window_width=width,
        minima_pos=(float(d[li]), float(d[ri])),
        minima_T=(float(t[li]), float(t[ri])),
    )


def format_csv(points: list[SpectrumPoint], *, with_tau: bool = False) -> str:
    """CSV per the published schema: 17 significant digits, LF endings."""
    header = "delta_p,T,R,arg_tp" + (",tau_g" if with_tau else "")
    lines = [header]
    for pt in points:
        cols = [pt.delta_p, pt.T, pt.R, pt.t_p_arg]
        if with_tau:
            if pt.tau_g is None:
                raise ValidationError("delay CSV requested but tau_g missing")
            cols.append(pt.tau_g)
        lines.append(",".join(f"{c:.17g}" for c in cols))
    return "\n".join(lines) + "\n"
