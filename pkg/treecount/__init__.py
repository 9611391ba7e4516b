"""Planar graphs with prescribed spanning-tree counts, thin orbits and dimension certificates."""

__version__ = "1.0.0"
