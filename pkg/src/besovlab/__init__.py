"""Pseudo-spectral Littlewood-Paley toolkit and barotropic flow solver on the torus."""

__version__ = "0.1.0"
