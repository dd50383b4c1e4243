"""Value-driven manufacturing planning with MOEA/D."""

__version__ = "0.1.0"
