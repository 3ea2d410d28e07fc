import numpy as np
import pytest

from floqtunnel import BarrierSpec, DriveSpec


@pytest.fixture(scope="session")
def strong_system():
    """Strong-drive slow-drive system with a rich activation structure.

    The barrier spans [-5.375, 5.375]; beta * half_length = 9.35.
    """
    barrier = BarrierSpec(height=1.0, half_length=5.375)
    drive = DriveSpec(beta=9.35 / 5.375, omega=0.0075)
    return barrier, drive


@pytest.fixture(scope="session")
def resonance_system():
    """Regime used for the selection-rule studies: narrow dips, many orders."""
    barrier = BarrierSpec(height=1.0, half_length=14.0)
    drive = DriveSpec(beta=1.2, omega=0.004)
    return barrier, drive


@pytest.fixture(scope="session")
def weak_system():
    barrier = BarrierSpec(height=1.0, half_length=3.0)
    drive = DriveSpec(beta=0.05, omega=0.02)
    return barrier, drive


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
