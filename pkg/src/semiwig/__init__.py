"""Semiclassical NLS simulation and Wigner phase-space analysis."""
