"""Random admissible Gamma-groups: exact measures, sampling, and Hurwitz component counts."""

__version__ = "0.1.0"
