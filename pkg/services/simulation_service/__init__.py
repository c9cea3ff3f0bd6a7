# __init__.py for the simulation_service package
# This package contains the dense density-matrix simulator: numerics, Hamiltonians,
# product formulas, noise channels and error metrics.

"""Simulation Service - Noisy Trotter circuits on dense density matrices."""

__version__ = "1.0.0"
