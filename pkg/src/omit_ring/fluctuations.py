"""Linearized sideband response at a given probe-pump detuning eta.

Each mean value is expanded as a static part plus e^(-i*eta*t) and
e^(+i*eta*t) sideband amplitudes; keeping first order in the probe turns
the equations of motion into a 7x7 complex linear system in the unknowns

    [da_minus, da_plus_conj, db_minus, db_plus_conj,
     dsigma_minus, dsigma_plus_conj, dx]

which is assembled here (batched over eta for sweeps) and solved with a
dense partial-pivoting solve, with per-node residual checks.  Sign
conventions adopted where sources conflict are recorded in SIGNS.md.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .constants import HBAR
from .errors import SingularSystemError, ValidationError
from .params import DerivedRates
from .steady_state import SteadyState

logger = logging.getLogger(__name__)

LABELS = (
    "da_minus", "da_plus_conj", "db_minus", "db_plus_conj",
    "dsigma_minus", "dsigma_plus_conj", "dx",
)

RESIDUAL_FACTOR = 1e-12


@dataclass(frozen=True)
class SidebandSystem:
    matrix: np.ndarray  # (7, 7) complex
    rhs: np.ndarray  # (7,) complex; single nonzero entry in the da_minus row
    labels: tuple[str, ...]
    eta: float


@dataclass(frozen=True)
class FluctuationAmplitudes:
    da_minus: complex
    da_plus_conj: complex
    db_minus: complex
    db_plus_conj: complex
    dsigma_minus: complex
    dsigma_plus_conj: complex
    dx: complex
    eta: float
    residual: float


def assemble_matrices(
    rates: DerivedRates, ss: SteadyState, etas: np.ndarray
) -> np.ndarray:
    """Batched (N, 7, 7) coefficient matrices, one per eta.

    The rhs is eta-independent: sqrt(kappa_ex) * eps_p in the da_minus row.
    """
    etas = np.asarray(etas, dtype=float)
    n = etas.shape[0]
    beta = rates.beta
    j = rates.j_coupling
    g = rates.g
    a, b = ss.a_mean, ss.b_mean
    x = ss.x_mean
    dca = rates.delta_ca - g * x
    dcb = rates.delta_cb - g * x
    deg = rates.delta_eg_c
    force = HBAR * g / rates.mass_kg

    m = np.zeros((n, 7, 7), dtype=complex)
    m[:, 0, 0] = beta + 1j * (dca - etas)
    m[:, 0, 4] = 1j * j
    m[:, 0, 6] = -1j * g * a
    m[:, 1, 1] = beta - 1j * (dca + etas)
    m[:, 1, 5] = -1j * j
    m[:, 1, 6] = 1j * g * np.conj(a)
    m[:, 2, 2] = beta + 1j * (dcb - etas)
    m[:, 2, 4] = 1j * j
    m[:, 2, 6] = -1j * g * b
    m[:, 3, 3] = beta - 1j * (dcb + etas)
    m[:, 3, 5] = -1j * j
    m[:, 3, 6] = 1j * g * np.conj(b)
    m[:, 4, 0] = j
    m[:, 4, 2] = j
    m[:, 4, 4] = deg - etas
    m[:, 5, 1] = j
    m[:, 5, 3] = j
    m[:, 5, 5] = etas + np.conj(deg)
    m[:, 6, 0] = -force * np.conj(a)
    m[:, 6, 1] = -force * a
    m[:, 6, 2] = -force * np.conj(b)
    m[:, 6, 3] = -force * b
    m[:, 6, 6] = rates.omega_m**2 - etas**2 - 1j * etas * rates.gamma_m
    return m


def _rhs(rates: DerivedRates) -> np.ndarray:
    rhs = np.zeros(7, dtype=complex)
    rhs[0] = np.sqrt(rates.kappa_ex) * rates.eps_p
    return rhs


def assemble_system(
    rates: DerivedRates, ss: SteadyState, eta: float
) -> SidebandSystem:
    matrix = assemble_matrices(rates, ss, np.array([eta]))[0]
    if not np.all(np.isfinite(matrix.view(float))):
        raise ValidationError("sideband matrix contains non-finite entries")
    return SidebandSystem(matrix=matrix, rhs=_rhs(rates), labels=LABELS, eta=eta)


def _check_residuals(
    m: np.ndarray, sol: np.ndarray, rhs: np.ndarray, etas: np.ndarray
) -> np.ndarray:
    resid = np.linalg.norm(np.einsum("nij,nj->ni", m, sol) - rhs, axis=1)
    scale = (
        np.linalg.norm(m, axis=(1, 2)) * np.linalg.norm(sol, axis=1)
        + np.linalg.norm(rhs)
    )
    bad = resid > RESIDUAL_FACTOR * np.maximum(scale, 1e-300)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise SingularSystemError(
            f"sideband solve residual {resid[i]:.3e} exceeds "
            f"{RESIDUAL_FACTOR:g} of scale {scale[i]:.3e} at eta={etas[i]!r}")
    return resid


def solve_many(
    rates: DerivedRates, ss: SteadyState, etas: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Solve the sideband system at every eta.

    Returns (solutions, residuals) with solutions of shape (N, 7) in the
    LABELS ordering.  A zero probe gives exact zeros; a decoupled emitter
    (J = 0) is solved on the reduced (da_minus, da_plus_conj, dx) block so
    the b and sigma entries come out exactly zero, not merely small.
    """
    etas = np.asarray(etas, dtype=float)
    n = etas.shape[0]
    if rates.eps_p == 0.0:
        return np.zeros((n, 7), dtype=complex), np.zeros(n)
    full = assemble_matrices(rates, ss, etas)
    rhs = _rhs(rates)
    if rates.j_coupling == 0.0 and ss.b_mean == 0.0:
        idx = np.array([0, 1, 6])
        m = full[:, idx[:, None], idx[None, :]]
        try:
            sub = np.linalg.solve(
                m, np.broadcast_to(rhs[idx], (n, 3))[:, :, None])[:, :, 0]
        except np.linalg.LinAlgError as exc:
            raise SingularSystemError(f"reduced sideband system singular: {exc}") from exc
        resid = _check_residuals(m, sub, rhs[idx], etas)
        sol = np.zeros((n, 7), dtype=complex)
        sol[:, idx] = sub
        return sol, resid
    try:
        sol = np.linalg.solve(
            full, np.broadcast_to(rhs, (n, 7))[:, :, None])[:, :, 0]
    except np.linalg.LinAlgError as exc:
        cond = float(np.linalg.cond(full[0]))
        raise SingularSystemError(
            f"sideband system singular over eta={etas[0]!r}..{etas[-1]!r} "
            f"(cond ~ {cond:.3e})") from exc
    resid = _check_residuals(full, sol, rhs, etas)
    return sol, resid


def solve_fluctuations(sys: SidebandSystem) -> FluctuationAmplitudes:
    """Solve one assembled 7x7 system; residual recorded on the result."""
    if not np.any(sys.rhs):
        return FluctuationAmplitudes(
            0.0j, 0.0j, 0.0j, 0.0j, 0.0j, 0.0j, 0.0j, sys.eta, 0.0)
    try:
        sol = np.linalg.solve(sys.matrix, sys.rhs)
    except np.linalg.LinAlgError as exc:
        cond = float(np.linalg.cond(sys.matrix))
        raise SingularSystemError(
            f"sideband system singular at eta={sys.eta!r} (cond ~ {cond:.3e})"
        ) from exc
    resid = float(np.linalg.norm(sys.matrix @ sol - sys.rhs))
    scale = (
        np.linalg.norm(sys.matrix) * np.linalg.norm(sol)
        + np.linalg.norm(sys.rhs)
    )
    if resid > RESIDUAL_FACTOR * max(scale, 1e-300):
        raise SingularSystemError(
            f"sideband solve residual {resid:.3e} exceeds "
            f"{RESIDUAL_FACTOR:g} of scale {scale:.3e} at eta={sys.eta!r}")
    return FluctuationAmplitudes(*sol, eta=sys.eta, residual=resid)


def amplitudes_from_solution(sol: np.ndarray, eta: float,
                             residual: float) -> FluctuationAmplitudes:
    return FluctuationAmplitudes(*sol, eta=eta, residual=residual)


def no_qubit_delta_a(rates: DerivedRates, ss: SteadyState, eta: float) -> complex:
    """da_minus from the reduced 3-unknown system with the emitter off.

    This reduced solve is authoritative.  A historical closed form for the
    same quantity circulates in which a common factor appears in both
    numerator and denominator and cancels to an eta-independent expression;
    it is evaluated and the discrepancy logged at debug level, never used.
    """
    if rates.j_coupling != 0.0:
        raise ValidationError("no-qubit reduced system requires J = 0")
    sol, _ = solve_many(rates, ss, np.array([eta]))
    da = complex(sol[0, 0])

    g = rates.g
    beta_minus = rates.beta - 1j * rates.delta_ca + 1j * g * ss.x_mean - 1j * eta
    gamma_m_fac = rates.omega_m - 1j * eta * (rates.gamma_m - eta)
    common = (
        1j * g**2 * abs(ss.a_mean) ** 2
        + rates.mass_kg * beta_minus * gamma_m_fac
    )
    denom = 1j * g**2 * abs(ss.a_mean) ** 2 * beta_minus * np.conj(beta_minus) * common
    if denom != 0:
        printed = -np.sqrt(rates.kappa_ex) * rates.eps_p * common / denom
        logger.debug(
            "printed no-qubit closed form gives %r vs reduced solve %r "
            "(|rel dev| = %.3e); the closed form is logged only",
            printed, da, abs(printed - da) / max(abs(da), 1e-300))
    return da
