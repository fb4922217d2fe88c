"""Waiting-detector simulations of Leggett-Garg correlation functions.

Modules
-------
linalg    2x2 / 4x4 complex matrices and an independent series exponential
spin      closed-form qubit correlators and Leggett-Garg combinations
detector  qubit coupled to a two-state ancilla: Kraus operators, readout
hidden    classical rotating-vector hidden-variable ensemble
cli       command-line runs, sweeps and comparisons
"""

from .spin import LGReport, ProtocolParams

__all__ = ["LGReport", "ProtocolParams"]
__version__ = "0.1.0"
