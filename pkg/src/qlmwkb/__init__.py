"""Quasilinearization of the Riccati-Schroedinger equation versus the WKB series."""

__version__ = "0.1.0"
