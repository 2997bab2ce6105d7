"""Equilibration of a harmonic oscillator coupled to a discretized ohmic bath."""
__version__ = "0.1.0"
