"""Physical parameter types and regime classification.

Units are fixed globally at hbar = 1, 2m = 1, so energies carry dimension
length**-2, the delta strength beta carries length**-1, and a wave of energy
E > 0 has wavenumber k = sqrt(E) and group velocity 2k.  There is no unit
conversion layer; every public interface works in these units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

TWO_PI = 2.0 * math.pi

# Advisory opaqueness cut: sqrt(V - Omega) * L > 3 means the single-pass
# amplitude through one barrier half is below e^-3 (about 5%).
OPAQUE_THRESHOLD = 3.0


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ParameterError(name, f"must be finite, got {value!r}")
    return value


def _require_positive(name: str, value: float) -> float:
    value = _require_finite(name, value)
    if value <= 0.0:
        raise ParameterError(name, f"must be > 0, got {value!r}")
    return value


@dataclass(frozen=True)
class BarrierSpec:
    """Rectangular barrier of height ``height`` occupying [-half_length, half_length].

    The full barrier length is ``2 * half_length``.
    """

    height: float
    half_length: float

    def __post_init__(self):
        object.__setattr__(self, "height", _require_positive("height", self.height))
        object.__setattr__(
            self, "half_length", _require_positive("half_length", self.half_length)
        )


@dataclass(frozen=True)
class DriveSpec:
    """Oscillating point perturbation -beta * delta(x) * cos(omega t + eta).

    ``eta`` is normalized into [0, 2 pi) on construction.
    """

    beta: float
    omega: float
    eta: float = 0.0

    def __post_init__(self):
        beta = _require_finite("beta", self.beta)
        if beta < 0.0:
            raise ParameterError("beta", f"must be >= 0, got {beta!r}")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "omega", _require_positive("omega", self.omega))
        eta = _require_finite("eta", self.eta) % TWO_PI
        object.__setattr__(self, "eta", eta)


@dataclass(frozen=True)
class IncidentSpec:
    """Monochromatic incident particle of energy ``omega0`` coming from x = -inf."""

    omega0: float

    def __post_init__(self):
        object.__setattr__(self, "omega0", _require_positive("omega0", self.omega0))


@dataclass(frozen=True)
class SidebandGrid:
    """Contiguous window of sideband indices n_min <= n <= n_max with 0 inside."""

    n_min: int
    n_max: int

    def __post_init__(self):
        if not (self.n_min <= 0 <= self.n_max):
            raise ParameterError(
                "n_min/n_max", f"need n_min <= 0 <= n_max, got [{self.n_min}, {self.n_max}]"
            )

    def __len__(self) -> int:
        return self.n_max - self.n_min + 1

    def offsets(self) -> np.ndarray:
        """Integer sideband indices as an array."""
        return np.arange(self.n_min, self.n_max + 1)

    def energies(self, incident: IncidentSpec, drive: DriveSpec) -> np.ndarray:
        """Channel energies E_n = omega0 + n * omega, strictly increasing in n."""
        return incident.omega0 + self.offsets() * drive.omega

    def index_of(self, n: int) -> int:
        if not self.n_min <= n <= self.n_max:
            raise IndexError(f"sideband {n} outside grid [{self.n_min}, {self.n_max}]")
        return n - self.n_min


@dataclass(frozen=True)
class RegimeReport:
    """Advisory flags describing where the parameters sit.

    The flags never reject a parameter set; they only label it.
    """

    strong_perturbation: bool
    subgap: bool
    slow_drive: bool
    opaque: bool
    gap: float = field(default=float("nan"))  # V - Omega, may be negative

    def as_dict(self) -> dict:
        return {
            "strong_perturbation": self.strong_perturbation,
            "subgap": self.subgap,
            "slow_drive": self.slow_drive,
            "opaque": self.opaque,
            "gap": self.gap,
        }


def channel_energy(incident: IncidentSpec, drive: DriveSpec, n: int) -> float:
    """Energy of sideband n: omega0 + n * omega.  Negative values are allowed
    and mark evanescent channels."""
    return incident.omega0 + n * drive.omega


def validate(barrier: BarrierSpec, drive: DriveSpec, incident: IncidentSpec) -> RegimeReport:
    """Classify a parameter set into the regimes used by the analytics.

    strong_perturbation:  beta**2 > V - Omega
    subgap:               Omega < V
    slow_drive:           omega < V - Omega
    opaque:               sqrt(V - Omega) * half_length > 3
    """
    gap = barrier.height - incident.omega0
    subgap = gap > 0.0
    return RegimeReport(
        strong_perturbation=drive.beta**2 > gap,
        subgap=subgap,
        slow_drive=drive.omega < gap,
        opaque=subgap and math.sqrt(gap) * barrier.half_length > OPAQUE_THRESHOLD,
        gap=gap,
    )
