"""Samplers and numeric cross-checks for invariant random subgroups of hyperbolic isometry groups."""

__version__ = "0.1.0"
