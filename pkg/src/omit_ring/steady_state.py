"""Mean-field fixed point of the pump-driven system.

The optical and emitter amplitudes are linear in each other at fixed
mechanical displacement, so the fixed point is found by a damped scalar
iteration on x alone, with the 3x3 complex field solve nested inside.
With the emitter decoupled (J = 0) the same fixed point is the real root
of a cubic, solved in closed form as an independent cross-check.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .constants import HBAR
from .errors import ConvergenceError, SingularSystemError, ValidationError
from .params import DerivedRates

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SteadyState:
    a_mean: complex
    b_mean: complex
    sigma_mean: complex
    x_mean: float  # meters
    iterations: int
    residual: float


@dataclass(frozen=True)
class FixedPointOptions:
    max_iter: int = 10_000
    tol: float = 1e-10  # relative, on the x update
    damping: float = 0.5
    x_floor: float = 1e-18  # meters; relative-residual floor
    seed: float | None = None  # initial x; default r (Omega/omega_m)^2


def centrifugal_displacement(rates: DerivedRates) -> float:
    return rates.radius_m * (rates.spin_rate / rates.omega_m) ** 2


def solve_fields_given_x(
    rates: DerivedRates, x: float
) -> tuple[complex, complex, complex]:
    """Optical and emitter mean values at fixed displacement x.

    Solves the 3x3 complex linear system; the returned triple has
    relative residual <= 1e-12.
    """
    j = rates.j_coupling
    m = np.array(
        [
            [rates.beta + 1j * (rates.delta_ca - rates.g * x), 0.0, 1j * j],
            [0.0, rates.beta + 1j * (rates.delta_cb - rates.g * x), 1j * j],
            [j, j, rates.delta_eg_c],
        ],
        dtype=complex,
    )
    rhs = np.array([np.sqrt(rates.kappa_ex) * rates.eps_l, 0.0, 0.0], dtype=complex)
    try:
        sol = np.linalg.solve(m, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"field system singular at x={x!r}: {exc}") from exc
    scale = np.linalg.norm(m) * np.linalg.norm(sol) + np.linalg.norm(rhs)
    resid = np.linalg.norm(m @ sol - rhs)
    if scale > 0 and resid > 1e-12 * scale:
        raise SingularSystemError(
            f"field solve residual {resid:.3e} exceeds 1e-12 of scale {scale:.3e}")
    return sol[0], sol[1], sol[2]


def _x_target(rates: DerivedRates, a: complex, b: complex) -> float:
    rad = (HBAR * rates.g / (rates.mass_kg * rates.omega_m**2)) * (
        abs(a) ** 2 + abs(b) ** 2
    )
    return rad + centrifugal_displacement(rates)


def solve_fixed_point(
    rates: DerivedRates, opts: FixedPointOptions = FixedPointOptions()
) -> SteadyState:
    """Damped fixed-point iteration on x with the field solve nested.

    Halves the damping automatically when the update oscillates; raises
    ConvergenceError with the last residual if the budget runs out.
    """
    if not 0 < opts.damping <= 1:
        raise ValidationError(f"damping must be in (0, 1], got {opts.damping!r}")
    x = centrifugal_displacement(rates) if opts.seed is None else opts.seed
    damping = opts.damping
    last_delta = 0.0
    flips = 0
    a = b = sigma = 0.0j
    residual = np.inf
    for it in range(1, opts.max_iter + 1):
        a, b, sigma = solve_fields_given_x(rates, x)
        target = _x_target(rates, a, b)
        delta = target - x
        residual = abs(delta) / max(abs(x), opts.x_floor)
        if residual <= opts.tol:
            return SteadyState(a, b, sigma, x, it, residual)
        if delta * last_delta < 0:
            flips += 1
            if flips >= 4:
                damping = max(damping / 2, 1.0 / 1024)
                flips = 0
                logger.debug("oscillation detected, damping halved to %g", damping)
        last_delta = delta
        x = (1 - damping) * x + damping * target
    raise ConvergenceError(
        f"fixed point did not converge in {opts.max_iter} iterations; "
        f"last residual {residual:.3e}, x in "
        f"[{min(x, x - last_delta):.6e}, {max(x, x - last_delta):.6e}] m")


def solve_no_qubit_cubic(rates: DerivedRates) -> list[SteadyState]:
    """All real fixed points with the emitter decoupled, sorted by x.

    Substituting the closed-form |a|^2 into the displacement relation
    gives a real cubic; each real root is returned with its consistent
    optical amplitude.  Works in the scaled variable u = g*x so the
    coefficients stay O(rate^3).
    """
    if rates.j_coupling != 0.0:
        raise ValidationError("no-qubit cubic requires J = 0")
    g = rates.g
    beta2 = rates.beta**2
    dca = rates.delta_ca
    u0 = g * centrifugal_displacement(rates)
    # u_rad = g * (radiation-pressure displacement at resonance denominator 1)
    b_coeff = (
        HBAR * g**2 / (rates.mass_kg * rates.omega_m**2)
        * rates.kappa_ex * rates.eps_l**2
    )
    poly = np.array(
        [
            1.0,
            -(u0 + 2.0 * dca),
            dca**2 + beta2 + 2.0 * dca * u0,
            -(u0 * (dca**2 + beta2) + b_coeff),
        ]
    )
    roots = np.roots(poly)
    scale = max(abs(poly[3]), abs(rates.beta) ** 3, 1.0)
    out: list[SteadyState] = []
    for u in roots:
        if abs(u.imag) > 1e-9 * max(1.0, abs(u)):
            continue
        u = u.real
        resid = abs(np.polyval(poly, u)) / scale
        x = u / g
        a = np.sqrt(rates.kappa_ex) * rates.eps_l / (rates.beta + 1j * (dca - u))
        out.append(SteadyState(a, 0.0j, 0.0j, x, 0, resid))
    out.sort(key=lambda s: s.x_mean)
    # collapse numerically duplicated roots from np.roots
    deduped: list[SteadyState] = []
    for s in out:
        if deduped and abs(s.x_mean - deduped[-1].x_mean) <= 1e-12 * max(
            abs(s.x_mean), rates.radius_m * 1e-30
        ):
            continue
        deduped.append(s)
    return deduped
