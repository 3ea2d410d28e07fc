"""Analytic strong-drive/low-frequency solution of the sideband equation.

In the regime beta^2 >> V - Omega >> omega the sideband index n can be
treated as continuous and the coupled amplitudes obey a driven Airy equation.
This module evaluates that closed-form solution: the linearized coefficient
c(n), the stretched variable xi, the piecewise Airy Green function G(xi), the
selected non-activated incident energies, the transition criterion whose
roots they approximate, and the exponential resonance width.

These formulas follow the source analysis verbatim, including its constants;
the exact solver is the ground truth wherever they disagree (see the
cross-validation tests).  They require Omega < V (real rho = sqrt(V - Omega))
and the selection formulas additionally require beta > 2 rho.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .airyfn import airy_scaled
from .errors import DomainError
from .model import BarrierSpec, DriveSpec, IncidentSpec

__all__ = [
    "AiryRegimeParams",
    "regime_params",
    "c_coefficient",
    "xi",
    "xi0_closed_form",
    "lattice_xi_step",
    "green_airy",
    "nonactivated_energies",
    "transition_criterion",
    "resonance_width",
]


@dataclass(frozen=True)
class AiryRegimeParams:
    """Derived quantities of the continuous-n Airy solution.

    rho   = sqrt(V - Omega)
    scale = (2 beta rho / omega)**(1/3)   (prefactor of G, and 1/scale is the
                                           xi-per-sideband step)
    shift = rho (beta - 2 rho) / omega    (xi zero-crossing in sideband units)
    xi0   = xi at n = 0
    """

    rho: float
    scale: float
    shift: float
    xi0: float
    beta: float
    omega: float


def regime_params(
    barrier: BarrierSpec, drive: DriveSpec, incident: IncidentSpec
) -> AiryRegimeParams:
    """Parameters of the Airy-regime solution; requires Omega < V and beta > 0."""
    gap = barrier.height - incident.omega0
    if gap <= 0.0:
        raise DomainError(f"regime_params: requires Omega < V (gap={gap})")
    if drive.beta <= 0.0:
        raise DomainError("regime_params: requires beta > 0")
    rho = math.sqrt(gap)
    beta, omega = drive.beta, drive.omega
    scale = (2.0 * beta * rho / omega) ** (1.0 / 3.0)
    shift = rho * (beta - 2.0 * rho) / omega
    return AiryRegimeParams(
        rho=rho, scale=scale, shift=shift, xi0=shift / scale, beta=beta, omega=omega
    )


def c_coefficient(n, params: AiryRegimeParams):
    """Linearized sideband coefficient c(n) ~ 1 - 2 rho/beta + omega n/(beta rho)."""
    n = np.asarray(n, dtype=float)
    out = 1.0 - 2.0 * params.rho / params.beta + params.omega * n / (
        params.beta * params.rho
    )
    return float(out) if out.ndim == 0 else out


def xi(n, params: AiryRegimeParams):
    """Stretched sideband coordinate xi(n) = (n + shift) / scale."""
    n = np.asarray(n, dtype=float)
    out = (n + params.shift) / params.scale
    return float(out) if out.ndim == 0 else out


def lattice_xi_step(params: AiryRegimeParams) -> float:
    """Sidebands per unit xi of the discrete equation's true continuum limit.

    Reducing the difference equation with s_{n+1} + s_{n-1} = 2 s + s'' gives
    G'' + 2 c(n) G = const * delta(n): the factor 2 on c(n) compresses the
    Airy oscillation, so one unit of xi spans (beta rho / (2 omega))**(1/3)
    sidebands, a factor 4**(1/3) fewer than the closed-form variable
    :func:`xi` implies.  The exact solver's lobe spacing follows this value;
    see the overlay report in :mod:`floqtunnel.observables`.
    """
    return (params.beta * params.rho / (2.0 * params.omega)) ** (1.0 / 3.0)


def xi0_closed_form(barrier: BarrierSpec, drive: DriveSpec, incident: IncidentSpec) -> float:
    """xi0 = (1 - 2 rho/beta) * (beta rho / (omega sqrt(2)))**(2/3).

    Algebraically identical to xi(0); kept as an independent expression for
    the dual-formula identity check.
    """
    gap = barrier.height - incident.omega0
    if gap <= 0.0:
        raise DomainError("xi0_closed_form: requires Omega < V")
    rho = math.sqrt(gap)
    base = drive.beta * rho / (drive.omega * math.sqrt(2.0))
    return (1.0 - 2.0 * rho / drive.beta) * base ** (2.0 / 3.0)


def _ai_plus_ibi_times_ai(arg_ai: float, arg_mix: float) -> complex:
    """Ai(arg_ai) * [Ai(arg_mix) + i Bi(arg_mix)] with overflow-safe scaling.

    For positive arguments the product Ai(a) * Bi(b) is assembled from the
    scaled values and a single exponential of the *difference* of the two
    growth exponents, so intermediate overflow only occurs if the result
    itself is not representable.
    """
    za = (2.0 / 3.0) * max(arg_ai, 0.0) ** 1.5
    zb = (2.0 / 3.0) * max(arg_mix, 0.0) ** 1.5
    va = airy_scaled(arg_ai)
    vb = airy_scaled(arg_mix)
    # unscaled: Ai(a) = va.ai * e^{-za}; Ai(b) = vb.ai * e^{-zb}; Bi(b) = vb.bi * e^{+zb}
    term_ai = va.ai * vb.ai * math.exp(-(za + zb)) if (za + zb) < 700 else 0.0
    term_bi = va.ai * vb.bi * _safe_exp(zb - za)
    return complex(term_ai, term_bi)


def _safe_exp(x: float) -> float:
    if x > 700.0:
        return math.inf
    if x < -745.0:
        return 0.0
    return math.exp(x)


def green_airy(xi_value: float, params: AiryRegimeParams) -> complex:
    """Piecewise Airy Green function G(xi) of the continuous-n equation.

    G(xi) = -i pi scale * Ai(-xi)  [Ai(-xi0) + i Bi(-xi0)]   for xi <= xi0
    G(xi) = -i pi scale * Ai(-xi0) [Ai(-xi)  + i Bi(-xi) ]   for xi >  xi0

    Continuous at xi = xi0.  Arguments far outside the plain-evaluation range
    are routed through the scaled Airy path.
    """
    x = float(xi_value)
    x0 = params.xi0
    if x <= x0:
        core = _ai_plus_ibi_times_ai(-x, -x0)
    else:
        core = _ai_plus_ibi_times_ai(-x0, -x)
    return -1j * math.pi * params.scale * core


def nonactivated_energies(
    barrier: BarrierSpec, drive: DriveSpec, m_range
) -> list[tuple[int, float]]:
    """Predicted suppressed incident energies Omega_m, increasing in m.

    Omega_m = V - beta^2/4 + (1/2) [ (3/2) beta omega (m + 3/4) pi ]**(2/3)

    Entries falling outside (0, V) are dropped with a warning.  Returns a
    list of (m, Omega_m) pairs (possibly empty).
    """
    out = []
    dropped = []
    for m in m_range:
        if m < 0:
            raise DomainError("nonactivated_energies: m must be >= 0")
        om = (
            barrier.height
            - 0.25 * drive.beta**2
            + 0.5 * (1.5 * drive.beta * drive.omega * (m + 0.75) * math.pi) ** (2.0 / 3.0)
        )
        if 0.0 < om < barrier.height:
            out.append((int(m), float(om)))
        else:
            dropped.append(int(m))
    if dropped:
        warnings.warn(
            f"nonactivated_energies: dropped m={dropped} (outside (0, V))",
            stacklevel=2,
        )
    out.sort(key=lambda t: t[1])
    return out


def transition_criterion(omega0: float, barrier: BarrierSpec, drive: DriveSpec) -> float:
    """Residual of the activated/non-activated transition criterion.

    residual(Omega) = cos^2[ (2/3) (1 - 2 rho/beta)^{3/2} rho beta / omega - pi/4 ]
                      - exp(-rho L)

    with rho = sqrt(V - Omega) used throughout.  Roots in Omega approximate
    the non-activated energies.  Requires Omega < V and beta > 2 rho.
    """
    gap = barrier.height - float(omega0)
    if gap <= 0.0:
        raise DomainError("transition_criterion: requires Omega < V")
    rho = math.sqrt(gap)
    if drive.beta <= 2.0 * rho:
        raise DomainError(
            f"transition_criterion: requires beta > 2 rho (beta={drive.beta}, 2rho={2*rho})"
        )
    phase = (
        (2.0 / 3.0)
        * (1.0 - 2.0 * rho / drive.beta) ** 1.5
        * rho
        * drive.beta
        / drive.omega
        - 0.25 * math.pi
    )
    return math.cos(phase) ** 2 - math.exp(-rho * barrier.half_length)


def resonance_width(barrier: BarrierSpec, drive: DriveSpec) -> float:
    """Spectral width of the suppressed regions, Gamma = exp(-beta L / 2)."""
    return math.exp(-0.5 * drive.beta * barrier.half_length)
