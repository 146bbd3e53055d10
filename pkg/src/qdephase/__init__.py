"""Qubit pure dephasing under an engineered multi-harmonic noise field."""

__version__ = "0.1.0"
