"""Photonic graph states grown by path-qubit fusion: qubit, optics, noise and
measurement-based computation models."""

__version__ = "0.1.0"
