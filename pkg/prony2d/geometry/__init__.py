"""Polygons and their Fourier transforms."""
