# __init__.py for the experiment_service package
# This package contains the command-line front end and the parallel sweep engine.

"""Experiment Service - Simulations, sweeps, fits and plans from the command line."""

__version__ = "1.0.0"
