"""SU(2) phase states of atoms in a cavity: construction, entanglement tests and dynamics."""

__version__ = "0.1.0"
