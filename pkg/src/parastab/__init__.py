"""Simulation and analysis of autonomously stabilized, parametrically coupled qubits."""

__version__ = "0.1.0"
