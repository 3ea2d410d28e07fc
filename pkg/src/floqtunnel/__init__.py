"""Floquet sideband solver for a rectangular barrier driven by an oscillating
delta potential at its center.

Units: hbar = 1, 2m = 1 throughout (energies are length**-2, the delta
strength beta is length**-1).

Main entry points:

* :func:`floqtunnel.solve` - exact sideband amplitudes for one incident energy
* :func:`floqtunnel.scan` - mean activation energy over incident energies
* :mod:`floqtunnel.airyapprox` - the analytic strong-drive Airy solution
* :mod:`floqtunnel.timedomain` - wavepacket cross-check by direct integration
* :mod:`floqtunnel.airyfn` - self-contained Ai/Bi special functions
"""

from .airyfn import AiryValues, airy, airy_scaled
from .barrier import (
    ChannelFunctions,
    ChannelTable,
    RectangularBarrier,
    channel_table,
    opaque_chi,
    rect_channel,
    transfer_matrix_oracle,
    transfer_matrix_scatter,
)
from .errors import (
    DegenerateChannelError,
    DomainError,
    FloqtunnelError,
    InstabilityError,
    NonConvergenceError,
    ParameterError,
    RegimeError,
    RegimeWarning,
    ResolutionError,
    ScanError,
    SolverBreakdownError,
)
from .floquet import (
    SidebandSolution,
    SolverOptions,
    assemble,
    flux_balance,
    reflection_amplitudes,
    solve,
)
from .model import (
    BarrierSpec,
    DriveSpec,
    IncidentSpec,
    RegimeReport,
    SidebandGrid,
    channel_energy,
    validate,
)
from .observables import (
    ComparisonReport,
    Resonance,
    ScanResult,
    Spectrum,
    activation_energy,
    compare_exact_analytic,
    find_resonances,
    scan,
    spectrum,
)

__version__ = "0.1.0"

__all__ = [
    "AiryValues",
    "airy",
    "airy_scaled",
    "BarrierSpec",
    "DriveSpec",
    "IncidentSpec",
    "SidebandGrid",
    "RegimeReport",
    "channel_energy",
    "validate",
    "ChannelFunctions",
    "ChannelTable",
    "RectangularBarrier",
    "rect_channel",
    "channel_table",
    "opaque_chi",
    "transfer_matrix_scatter",
    "transfer_matrix_oracle",
    "SidebandSolution",
    "SolverOptions",
    "assemble",
    "solve",
    "reflection_amplitudes",
    "flux_balance",
    "Spectrum",
    "ScanResult",
    "Resonance",
    "ComparisonReport",
    "activation_energy",
    "spectrum",
    "scan",
    "find_resonances",
    "compare_exact_analytic",
    "FloqtunnelError",
    "ParameterError",
    "DomainError",
    "NonConvergenceError",
    "SolverBreakdownError",
    "DegenerateChannelError",
    "ScanError",
    "InstabilityError",
    "ResolutionError",
    "RegimeError",
    "RegimeWarning",
    "__version__",
]
