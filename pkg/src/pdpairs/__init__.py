"""Chain-level Poincare duality workbench for 3-dimensional pairs."""

__version__ = "0.1.0"
