"""Hex-grid color-code circuit generation, noise, sampling, decoding, and fits."""

from .pauli import Pauli, GATES

__all__ = ["Pauli", "GATES"]
